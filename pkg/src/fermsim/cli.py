"""Command-line interface.

Subcommands: trotter-error, kqd, sample, gate-count, fcidump-info. All
tabular output is CSV with a header row; floats are written with repr so
they round-trip exactly. Exit code 0 on success, 2 on any input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import set_num_threads
from .experiments import KrylovConfig, krylov_diagonalize, trotter_error_experiment
from .fcidump import parse_fcidump
from .gates import OrbitalRotationSpec
from .gatecount import count_two_qubit_gates
from .hubbard import HubbardSpec, build_hubbard, hubbard_sector
from .operators import (
    apply_diagonal_coulomb_hamiltonian,
    apply_molecular_hamiltonian,
    df_from_molecular,
)
from .sampling import SlaterSpec, sample_slater, sample_state_vector
from .sector import SectorShape, format_string
from .states import hartree_fock, load_statevector


def _float_cell(value) -> str:
    return repr(float(value))


def _write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    lines = [",".join(header)] + [",".join(row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _lattice(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected NXxNY like 4x2, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NXxNY like 4x2, got {text!r}")


def _add_hubbard_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t-hop", type=float, default=1.0, help="hopping amplitude")
    parser.add_argument("--u-int", type=float, default=8.0, help="onsite interaction")
    parser.add_argument(
        "--periodic-x", action="store_true", help="wrap hopping in the x direction"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermsim", description="Fermionic circuit simulation in a fixed sector"
    )
    parser.add_argument(
        "--threads", type=int, default=None,
        help="kernel thread count (overrides FERMSIM_NUM_THREADS)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_err = sub.add_parser(
        "trotter-error", help="Trotter error vs exact evolution on a Hubbard lattice"
    )
    p_err.add_argument("--nx", type=int, required=True)
    p_err.add_argument("--ny", type=int, required=True)
    p_err.add_argument("--filling", type=float, required=True)
    p_err.add_argument("--time", type=float, default=1.0)
    p_err.add_argument("--orders", type=_int_list, default=[0, 1])
    p_err.add_argument("--steps", type=_int_list, default=[8, 16, 32, 64])
    p_err.add_argument("--n-vectors", type=int, default=5)
    p_err.add_argument("--seed", type=int, default=0)
    p_err.add_argument("--out", default="results.csv")
    _add_hubbard_flags(p_err)

    p_kqd = sub.add_parser(
        "kqd", help="Krylov quantum diagonalization ground-energy estimates"
    )
    source = p_kqd.add_mutually_exclusive_group(required=True)
    source.add_argument("--fcidump", metavar="FILE")
    source.add_argument("--hubbard", type=_lattice, metavar="NXxNY")
    p_kqd.add_argument("--filling", type=float, default=None)
    p_kqd.add_argument("--dt", type=float, default=0.3)
    p_kqd.add_argument("--dim", type=int, default=10)
    p_kqd.add_argument("--evolve", choices=["exact", "trotter"], default="exact")
    p_kqd.add_argument("--trotter-order", type=int, default=1)
    p_kqd.add_argument("--trotter-steps", type=int, default=1)
    p_kqd.add_argument("--threshold", type=float, default=1e-10)
    p_kqd.add_argument("--seed", type=int, default=0)
    p_kqd.add_argument("--out", default="results.csv")
    _add_hubbard_flags(p_kqd)

    p_sample = sub.add_parser("sample", help="draw configurations from a state")
    state = p_sample.add_mutually_exclusive_group(required=True)
    state.add_argument("--statevector", metavar="FILE")
    state.add_argument("--slater", metavar="SPECFILE")
    p_sample.add_argument("--shots", type=int, required=True)
    p_sample.add_argument("--seed", type=int, default=0)

    p_count = sub.add_parser("gate-count", help="two-qubit gates of a circuit plan")
    p_count.add_argument("--plan", required=True, metavar="plan.json")

    p_info = sub.add_parser("fcidump-info", help="summarize an FCIDUMP file")
    p_info.add_argument("file", metavar="FILE")
    return parser


def _run_trotter_error(args) -> int:
    spec = HubbardSpec(args.nx, args.ny, args.t_hop, args.u_int, args.periodic_x)
    shape = hubbard_sector(spec, args.filling)
    records = trotter_error_experiment(
        build_hubbard(spec), shape, args.time,
        args.orders, args.steps, args.n_vectors, args.seed,
    )
    rows = [
        [
            str(rec.order),
            str(rec.n_steps),
            str(rec.gate_count),
            _float_cell(rec.mean_error),
            _float_cell(rec.std_error),
        ]
        for rec in records
    ]
    _write_csv(args.out, ["order", "n_steps", "gate_count", "mean_error", "std_error"], rows)
    return 0


def _run_kqd(args) -> int:
    if args.hubbard is not None:
        if args.filling is None:
            raise ValueError("--hubbard needs --filling to fix the sector")
        nx, ny = args.hubbard
        spec = HubbardSpec(nx, ny, args.t_hop, args.u_int, args.periodic_x)
        ham = build_hubbard(spec)
        shape = hubbard_sector(spec, args.filling)
        apply = lambda vec: apply_diagonal_coulomb_hamiltonian(ham, vec)
        trotter_ham = ham
    else:
        result = parse_fcidump(args.fcidump)
        ham = result.hamiltonian
        shape = SectorShape(ham.norb, result.nalpha, result.nbeta)
        apply = lambda vec: apply_molecular_hamiltonian(ham, vec)
        trotter_ham = df_from_molecular(ham) if args.evolve == "trotter" else None
    config = KrylovConfig(
        dim=args.dim,
        dt=args.dt,
        evolve=args.evolve,
        trotter_order=args.trotter_order,
        trotter_steps=args.trotter_steps,
        threshold=args.threshold,
    )
    energies = krylov_diagonalize(apply, hartree_fock(shape), config, trotter_ham)
    rows = [[str(d + 1), _float_cell(e)] for d, e in enumerate(energies)]
    _write_csv(args.out, ["dim", "energy"], rows)
    return 0


def _matrix_from_json(obj, name: str) -> np.ndarray:
    if not isinstance(obj, dict) or "real" not in obj:
        raise ValueError(f"{name} must be an object with 'real' (and optional 'imag')")
    mat = np.asarray(obj["real"], dtype=np.float64).astype(np.complex128)
    if "imag" in obj and obj["imag"] is not None:
        mat = mat + 1j * np.asarray(obj["imag"], dtype=np.float64)
    return mat


def _run_sample(args) -> int:
    if args.statevector is not None:
        vec = load_statevector(args.statevector)
        norb = vec.shape.norb
        samples = sample_state_vector(vec, args.shots, args.seed)
    else:
        with open(args.slater, "r", encoding="ascii") as handle:
            raw = json.load(handle)
        for key in ("norb", "reference", "u_alpha"):
            if key not in raw:
                raise ValueError(f"slater spec is missing {key!r}")
        norb = raw["norb"]
        u_alpha = _matrix_from_json(raw["u_alpha"], "u_alpha")
        u_beta = (
            _matrix_from_json(raw["u_beta"], "u_beta") if "u_beta" in raw else None
        )
        ref_a, ref_b = raw["reference"]
        spec = SlaterSpec(
            norb,
            (tuple(ref_a), tuple(ref_b)),
            OrbitalRotationSpec(u_alpha, u_beta),
        )
        samples = sample_slater(spec, args.shots, args.seed)
    out = sys.stdout
    for mask_a, mask_b in samples:
        out.write(f"{format_string(int(mask_a), norb)}/{format_string(int(mask_b), norb)}\n")
    return 0


def _run_gate_count(args) -> int:
    with open(args.plan, "r", encoding="ascii") as handle:
        raw = json.load(handle)
    if not isinstance(raw, dict) or "operations" not in raw:
        raise ValueError("plan file must be an object with an 'operations' array")
    print(count_two_qubit_gates(raw["operations"]))
    return 0


def _run_fcidump_info(args) -> int:
    result = parse_fcidump(args.file)
    ham = result.hamiltonian
    shape = SectorShape(ham.norb, result.nalpha, result.nbeta)
    print(f"norb = {ham.norb}")
    print(f"nelec = {result.nelec}")
    print(f"ms2 = {result.ms2}")
    print(f"nalpha = {shape.nalpha}")
    print(f"nbeta = {shape.nbeta}")
    print(f"constant = {_float_cell(ham.constant)}")
    print(f"sector dimension = {shape.dim}")
    print(f"state vector bytes = {shape.dim * 16}")
    return 0


_RUNNERS = {
    "trotter-error": _run_trotter_error,
    "kqd": _run_kqd,
    "sample": _run_sample,
    "gate-count": _run_gate_count,
    "fcidump-info": _run_fcidump_info,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads is not None:
            set_num_threads(args.threads)
        return _RUNNERS[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
