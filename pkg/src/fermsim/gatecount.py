"""Two-qubit gate counting for abstract circuit plans.

A plan is a sequence of operation dicts (the JSON schema used by the CLI):

  {"op": "orbital-rotation", "norb": N, "spins": ["alpha", "beta"],
   "mask": null | NxN 0/1 list}
  {"op": "diag-coulomb", "norb": N,
   "j_aa": null | NxN list, "j_bb": ..., "j_ab": ...}
  {"op": "slater-prep", "norb": N, "eta_alpha": int, "eta_beta": int}

Counting convention: one gate per Givens rotation and one per controlled
phase. A dense rotation costs N(N-1)/2 per spin; a masked one costs its
strictly-upper nonzero count per spin. A diagonal Coulomb step costs the
strictly-upper nonzero counts of the same-spin couplings plus every nonzero
entry of the opposite-spin coupling. Slater preparation costs eta(N - eta)
per spin. Number-operator phases are single-qubit and cost nothing.
"""

from __future__ import annotations

import numpy as np

from .operators import DiagonalCoulombHamiltonian, DoubleFactorizedHamiltonian
from .trotter import TrotterPlan, merge_sequence, suzuki_sequence

SPINS = ("alpha", "beta")


class GateCountError(ValueError):
    """Malformed circuit-plan operation."""


def orbital_rotation_op(norb: int, spins=SPINS, mask=None) -> dict:
    return {"op": "orbital-rotation", "norb": norb, "spins": list(spins), "mask": mask}


def diag_coulomb_op(norb: int, j_aa=None, j_bb=None, j_ab=None) -> dict:
    return {"op": "diag-coulomb", "norb": norb, "j_aa": j_aa, "j_bb": j_bb, "j_ab": j_ab}


def slater_prep_op(norb: int, eta_alpha: int, eta_beta: int = 0) -> dict:
    return {
        "op": "slater-prep",
        "norb": norb,
        "eta_alpha": eta_alpha,
        "eta_beta": eta_beta,
    }


def _as_mask(entry, norb: int, name: str) -> np.ndarray | None:
    if entry is None:
        return None
    mask = np.asarray(entry)
    if mask.shape != (norb, norb):
        raise GateCountError(f"{name} must be {norb}x{norb}, got shape {mask.shape}")
    return mask != 0


def _get_norb(operation: dict) -> int:
    norb = operation.get("norb")
    if not isinstance(norb, int) or norb < 1:
        raise GateCountError(f"operation needs a positive integer norb: {operation!r}")
    return norb


def _count_rotation(operation: dict) -> int:
    norb = _get_norb(operation)
    spins = operation.get("spins", list(SPINS))
    if not spins or any(s not in SPINS for s in spins):
        raise GateCountError(f"spins must be drawn from {SPINS}, got {spins!r}")
    mask = _as_mask(operation.get("mask"), norb, "mask")
    if mask is None:
        per_spin = norb * (norb - 1) // 2
    else:
        per_spin = int(np.count_nonzero(np.triu(mask, k=1)))
    return per_spin * len(spins)


def _count_diag_coulomb(operation: dict) -> int:
    norb = _get_norb(operation)
    total = 0
    for key in ("j_aa", "j_bb"):
        mask = _as_mask(operation.get(key), norb, key)
        if mask is not None:
            total += int(np.count_nonzero(np.triu(mask, k=1)))
    mask = _as_mask(operation.get("j_ab"), norb, "j_ab")
    if mask is not None:
        total += int(np.count_nonzero(mask))
    return total


def _count_slater_prep(operation: dict) -> int:
    norb = _get_norb(operation)
    total = 0
    for key in ("eta_alpha", "eta_beta"):
        eta = operation.get(key, 0)
        if not isinstance(eta, int) or eta < 0 or eta > norb:
            raise GateCountError(f"{key} must lie in [0, {norb}], got {eta!r}")
        total += eta * (norb - eta)
    return total


_COUNTERS = {
    "orbital-rotation": _count_rotation,
    "diag-coulomb": _count_diag_coulomb,
    "slater-prep": _count_slater_prep,
}


def count_two_qubit_gates(plan) -> int:
    """Total two-qubit gates of a sequence of plan operations."""
    total = 0
    for operation in plan:
        if not isinstance(operation, dict):
            raise GateCountError(f"plan entries must be dicts, got {type(operation)}")
        kind = operation.get("op")
        counter = _COUNTERS.get(kind)
        if counter is None:
            raise GateCountError(f"unknown operation kind {kind!r}")
        total += counter(operation)
    return total


def _mask_or_none(mat: np.ndarray):
    return mat.tolist() if np.any(mat != 0) else None


def trotter_plan_operations(ham, plan: TrotterPlan) -> list[dict]:
    """Expand a Trotterized evolution into countable plan operations.

    The one-body term's evolution is itself an orbital rotation (diagonal
    phases conjugated by its eigenbasis), so it composes with neighboring
    basis changes instead of emitting gates of its own. Each interaction
    term contributes one fused dense rotation when a basis change is due,
    then its controlled-phase layer.
    """
    if isinstance(ham, DiagonalCoulombHamiltonian):
        # term 1 phases in the lattice basis: no basis change of its own
        basis_change = [False, False]
        diag_ops = [
            None,
            diag_coulomb_op(
                ham.norb,
                _mask_or_none(ham.j_aa),
                _mask_or_none(ham.j_bb),
                _mask_or_none(ham.j_ab),
            ),
        ]
    elif isinstance(ham, DoubleFactorizedHamiltonian):
        basis_change = [False] + [True] * len(ham.terms)
        diag_ops = [None] + [
            diag_coulomb_op(
                ham.norb,
                _mask_or_none(j_mat),
                _mask_or_none(j_mat),
                _mask_or_none(j_mat),
            )
            for j_mat, _ in ham.terms
        ]
    else:
        raise GateCountError(f"cannot plan evolution for {type(ham).__name__}")
    if plan.term_count != len(diag_ops):
        raise GateCountError(
            f"plan declares {plan.term_count} terms, Hamiltonian has {len(diag_ops)}"
        )
    dt = plan.time / plan.n_steps
    seq = merge_sequence(suzuki_sequence(plan.order, len(diag_ops), dt) * plan.n_steps)
    ops: list[dict] = []
    pending = False
    for k, _tau in seq:
        if diag_ops[k] is None:
            pending = True
            continue
        if pending or basis_change[k]:
            ops.append(orbital_rotation_op(ham.norb))
        ops.append(diag_ops[k])
        pending = basis_change[k]
    if pending:
        ops.append(orbital_rotation_op(ham.norb))
    return ops
