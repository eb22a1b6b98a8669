"""Trotter-Suzuki product formulas and Trotterized time evolution.

Every Hamiltonian term handled here has the shape B Diag(tau) B^dag: an
orbital rotation into a basis where the term phases configurations. Walking
a product formula therefore never needs two rotations in a row; the closing
rotation of one term and the opening rotation of the next are fused into a
single orbital rotation before touching the state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import (
    DiagCoulombGate,
    NumOpSumGate,
    OrbitalRotationSpec,
    apply_diag_coulomb_evolution,
    apply_num_op_sum_evolution,
    apply_orbital_rotation,
)
from .operators import DiagonalCoulombHamiltonian, DoubleFactorizedHamiltonian
from .states import StateVector


@dataclass(frozen=True)
class TrotterPlan:
    """Shape of a product-formula run: S_order repeated n_steps times."""

    order: int
    n_steps: int
    time: float
    term_count: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"order must be >= 0, got {self.order}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.term_count < 1:
            raise ValueError(f"term_count must be >= 1, got {self.term_count}")


def suzuki_sequence(
    order: int, term_count: int, dt: float
) -> list[tuple[int, float]]:
    """Term schedule of the order-k Suzuki formula over `term_count` terms.

    Returns (term_index, fraction) pairs in application order, term 0 first
    at order 0. Fractions are constructed so that the exact float sum per
    term equals dt: the middle segment of each recursion level is computed
    as the remainder dt - 4*(u_k*dt), which is exact by Sterbenz's lemma.
    """
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    if term_count < 1:
        raise ValueError(f"term_count must be >= 1, got {term_count}")
    if order == 0:
        return [(k, dt) for k in range(term_count)]
    if order == 1:
        half = dt / 2
        forward = [(k, half) for k in range(term_count)]
        return forward + forward[::-1]
    u = 1.0 / (4.0 - 4.0 ** (1.0 / (2 * order - 1)))
    outer = u * dt
    middle = dt - 4.0 * outer
    wing = suzuki_sequence(order - 1, term_count, outer)
    return wing + wing + suzuki_sequence(order - 1, term_count, middle) + wing + wing


def merge_sequence(seq: list[tuple[int, float]]) -> list[tuple[int, float]]:
    """Fuse consecutive entries acting on the same term."""
    out: list[tuple[int, float]] = []
    for term, frac in seq:
        if out and out[-1][0] == term:
            out[-1] = (term, out[-1][1] + frac)
        else:
            out.append((term, frac))
    return out


def _walk_product_formula(
    vec: StateVector,
    bases: list[np.ndarray],
    apply_diag,
    seq: list[tuple[int, float]],
    constant: float,
    time: float,
    copy: bool,
) -> StateVector:
    """Apply prod_j B_{k_j} Diag_{k_j}(tau_j) B_{k_j}^dag with fused rotations."""
    out = vec.copy() if copy else vec
    norb = vec.shape.norb
    eye = np.eye(norb, dtype=np.complex128)
    pending = eye
    for k, tau in seq:
        rot = bases[k].conj().T @ pending
        if not np.array_equal(rot, eye):
            apply_orbital_rotation(out, OrbitalRotationSpec(rot), copy=False)
        apply_diag(out, k, tau)
        pending = bases[k]
    if not np.array_equal(pending, eye):
        apply_orbital_rotation(out, OrbitalRotationSpec(pending), copy=False)
    if constant:
        out.data[...] *= np.exp(-1j * constant * time)
    return out


def simulate_trotter_diag_coulomb(
    vec: StateVector,
    ham: DiagonalCoulombHamiltonian,
    time: float,
    n_steps: int,
    order: int = 0,
    *,
    copy: bool = True,
) -> StateVector:
    """Trotterized exp(-i time H) for a diagonal Coulomb Hamiltonian.

    Term 0 is the one-body part (evolved exactly in its eigenbasis), term 1
    the density-density part (a diagonal Coulomb gate). Converges to the
    exact evolution as n_steps grows; exact already when the two commute.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if ham.norb != vec.shape.norb:
        raise ValueError(
            f"Hamiltonian is on {ham.norb} orbitals, state on {vec.shape.norb}"
        )
    eigs, basis = np.linalg.eigh(ham.one_body)
    bases = [basis, np.eye(ham.norb, dtype=np.complex128)]

    def apply_diag(out, k, tau):
        if k == 0:
            gate = NumOpSumGate(eigs, eigs, tau)
            apply_num_op_sum_evolution(out, gate, copy=False)
        else:
            gate = DiagCoulombGate(ham.j_aa, ham.j_bb, ham.j_ab, tau)
            apply_diag_coulomb_evolution(out, gate, copy=False)

    seq = merge_sequence(suzuki_sequence(order, 2, time / n_steps) * n_steps)
    return _walk_product_formula(vec, bases, apply_diag, seq, ham.constant, time, copy)


def simulate_trotter_double_factorized(
    vec: StateVector,
    ham: DoubleFactorizedHamiltonian,
    time: float,
    n_steps: int,
    order: int = 0,
    *,
    copy: bool = True,
) -> StateVector:
    """Trotterized exp(-i time H) for a double-factorized Hamiltonian.

    Term 0 is the one-body part; term t >= 1 evolves under the t-th
    factorized interaction, spin-summed: rotate by U^(t) dagger, phase with
    J^(t) in every spin block, rotate back. Back-to-back rotations between
    terms collapse into one.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if ham.norb != vec.shape.norb:
        raise ValueError(
            f"Hamiltonian is on {ham.norb} orbitals, state on {vec.shape.norb}"
        )
    eigs, basis = np.linalg.eigh(ham.one_body)
    bases = [basis] + [u_mat for _, u_mat in ham.terms]
    j_mats = [j_mat for j_mat, _ in ham.terms]

    def apply_diag(out, k, tau):
        if k == 0:
            gate = NumOpSumGate(eigs, eigs, tau)
            apply_num_op_sum_evolution(out, gate, copy=False)
        else:
            j = j_mats[k - 1]
            apply_diag_coulomb_evolution(out, DiagCoulombGate(j, j, j, tau), copy=False)

    term_count = 1 + len(ham.terms)
    seq = merge_sequence(suzuki_sequence(order, term_count, time / n_steps) * n_steps)
    return _walk_product_formula(vec, bases, apply_diag, seq, ham.constant, time, copy)
