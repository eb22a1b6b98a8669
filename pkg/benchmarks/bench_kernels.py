"""Time the compiled kernels against the pure-python fallback.

Runs the main state-vector operations once per backend on the same inputs
and prints a table with per-call times and the compiled speedup.  Backends
are swapped by reassigning the dispatch module's implementation handle, the
same mechanism the import-time selection uses.

Usage:
    python3 benchmarks/bench_kernels.py [--norb 12] [--nalpha 6] [--nbeta 6]
"""

import argparse
import time

import numpy as np
from scipy.stats import unitary_group

from fermsim import kernels
from fermsim._kernels import core, fallback
from fermsim.gates import (
    DiagCoulombGate,
    NumOpSumGate,
    OrbitalRotationSpec,
    apply_diag_coulomb_evolution,
    apply_num_op_sum_evolution,
    apply_orbital_rotation,
)
from fermsim.operators import apply_one_body
from fermsim.sector import SectorShape
from fermsim.states import random_state


def best_of(fn, repeats):
    fn()  # warm caches and lazy tables
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def build_cases(shape, seed):
    rng = np.random.default_rng(seed)
    norb = shape.norb
    vec = random_state(shape, rng)
    u = unitary_group.rvs(norb, random_state=rng)
    sym = rng.standard_normal((norb, norb))
    j_mat = (sym + sym.T) / 2
    herm = rng.standard_normal((norb, norb)) + 1j * rng.standard_normal((norb, norb))
    cases = [
        (
            "orbital rotation",
            lambda: apply_orbital_rotation(vec, OrbitalRotationSpec(u)),
        ),
        (
            "diag-Coulomb phases",
            lambda: apply_diag_coulomb_evolution(
                vec, DiagCoulombGate(j_mat, j_mat, j_mat, 0.8)
            ),
        ),
        (
            "number-op phases",
            lambda: apply_num_op_sum_evolution(
                vec, NumOpSumGate(j_mat[0], j_mat[1], 0.8)
            ),
        ),
        (
            "one-body gather",
            lambda: apply_one_body((herm + herm.conj().T) / 2, vec),
        ),
    ]
    return cases


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--norb", type=int, default=12)
    parser.add_argument("--nalpha", type=int, default=6)
    parser.add_argument("--nbeta", type=int, default=6)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if core is None:
        raise SystemExit("compiled extension is not built; nothing to compare")

    shape = SectorShape(args.norb, args.nalpha, args.nbeta)
    print(
        f"sector ({shape.norb}, {shape.nalpha}, {shape.nbeta}), "
        f"dimension {shape.dim} ({shape.dim * 16 / 2**20:.1f} MiB per vector)"
    )

    cases = build_cases(shape, args.seed)
    original = kernels._impl
    results = {}
    try:
        for backend, impl in (("compiled", core), ("python", fallback)):
            kernels._impl = impl
            for name, fn in cases:
                results[(backend, name)] = best_of(fn, args.repeats)
    finally:
        kernels._impl = original

    width = max(len(name) for name, _ in cases)
    print(f"{'operation':<{width}}  {'compiled':>10}  {'python':>10}  {'speedup':>7}")
    for name, _ in cases:
        fast = results[("compiled", name)]
        slow = results[("python", name)]
        print(f"{name:<{width}}  {fast * 1e3:>8.2f}ms  {slow * 1e3:>8.2f}ms  {slow / fast:>6.1f}x")


if __name__ == "__main__":
    main()
