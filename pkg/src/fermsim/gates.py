"""The universal fermionic gate set acting on sector state vectors.

Five gates: number-operator-sum evolution, diagonal Coulomb evolution,
Givens rotations, orbital rotations (compiled to a Givens network), and
quadratic-Hamiltonian evolution.  The first two are diagonal in the
configuration basis; the rest mix amplitudes within one spin species, so
spin-up gates pair rows of the amplitude matrix and spin-down gates pair
columns.

All apply_* functions return a new StateVector by default; pass copy=False
to transform the input in place (the returned object then shares storage
with the input).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg

from . import kernels
from .sector import build_pair_lists, occupation_matrix
from .states import StateVector

ALPHA: Literal["alpha"] = "alpha"
BETA: Literal["beta"] = "beta"
Spin = Literal["alpha", "beta"]

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-10
SYMMETRIC_TOL = 1e-12


class GateError(ValueError):
    """Raised when gate parameters violate their declared invariants."""


def _as_square(arr, name: str, norb: int | None = None) -> np.ndarray:
    mat = np.asarray(arr, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise GateError(f"{name} must be a square matrix, got shape {mat.shape}")
    if norb is not None and mat.shape[0] != norb:
        raise GateError(f"{name} must be {norb}x{norb}, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise GateError(f"{name} has non-finite entries")
    return mat


def _check_unitary(mat: np.ndarray, name: str, tol: float = UNITARY_TOL) -> None:
    err = np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])))
    if err > tol:
        raise GateError(f"{name} is not unitary: max deviation {err:.3e} > {tol:.1e}")


def _check_hermitian(mat: np.ndarray, name: str, tol: float = HERMITIAN_TOL) -> None:
    err = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
    if err > tol:
        raise GateError(f"{name} is not Hermitian: max deviation {err:.3e} > {tol:.1e}")


def _check_symmetric(mat: np.ndarray, name: str, tol: float = SYMMETRIC_TOL) -> None:
    err = np.max(np.abs(mat - mat.T)) if mat.size else 0.0
    if err > tol:
        raise GateError(f"{name} is not symmetric: max deviation {err:.3e} > {tol:.1e}")


def _real_vector(arr, name: str) -> np.ndarray:
    vec = np.asarray(arr)
    if np.iscomplexobj(vec):
        raise GateError(f"{name} must be real")
    vec = vec.astype(np.float64)
    if vec.ndim != 1:
        raise GateError(f"{name} must be a 1-D real vector")
    if not np.all(np.isfinite(vec)):
        raise GateError(f"{name} has non-finite entries")
    return vec


def _real_square(arr, name: str) -> np.ndarray:
    mat = np.asarray(arr)
    if np.iscomplexobj(mat):
        if mat.size and np.max(np.abs(mat.imag)) > 0:
            raise GateError(f"{name} must be real")
        mat = mat.real
    mat = mat.astype(np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise GateError(f"{name} must be a square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise GateError(f"{name} has non-finite entries")
    return mat


@dataclass(frozen=True)
class NumOpSumGate:
    """exp(-i t sum_p [lambda_alpha_p n_p(up) + lambda_beta_p n_p(down)])."""

    lambda_alpha: np.ndarray
    lambda_beta: np.ndarray
    time: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "lambda_alpha", _real_vector(self.lambda_alpha, "lambda_alpha"))
        object.__setattr__(self, "lambda_beta", _real_vector(self.lambda_beta, "lambda_beta"))
        if len(self.lambda_alpha) != len(self.lambda_beta):
            raise GateError("lambda_alpha and lambda_beta must have equal length")
        object.__setattr__(self, "time", float(self.time))

    @property
    def norb(self) -> int:
        return len(self.lambda_alpha)


@dataclass(frozen=True)
class DiagCoulombGate:
    """exp(-i (t/2) sum over same- and cross-spin density pairs of J terms).

    The exponent for a configuration with occupation vectors (o_a, o_b) is
    -i (t/2) (o_a.J_aa.o_a + 2 o_a.J_ab.o_b + o_b.J_bb.o_b), self-pairs
    p = q included.
    """

    j_aa: np.ndarray
    j_bb: np.ndarray
    j_ab: np.ndarray
    time: float

    def __post_init__(self) -> None:
        j_aa = _real_square(self.j_aa, "j_aa")
        j_bb = _real_square(self.j_bb, "j_bb")
        j_ab = _real_square(self.j_ab, "j_ab")
        _check_symmetric(j_aa, "j_aa")
        _check_symmetric(j_bb, "j_bb")
        norb = j_aa.shape[0]
        if j_bb.shape[0] != norb or j_ab.shape[0] != norb:
            raise GateError("interaction matrices must share one orbital count")
        object.__setattr__(self, "j_aa", j_aa)
        object.__setattr__(self, "j_bb", j_bb)
        object.__setattr__(self, "j_ab", j_ab)
        object.__setattr__(self, "time", float(self.time))

    @property
    def norb(self) -> int:
        return self.j_aa.shape[0]


@dataclass(frozen=True)
class GivensRotation:
    """Two-orbital mixing within one spin species.

    On the amplitude pair (string with p occupied and q empty, its p->q
    image) the gate acts as [[c, s*par], [-conj(s)*par, c]] where par is
    the parity of occupied orbitals strictly between p and q.
    """

    c: float
    s: complex
    p: int
    q: int
    spin: Spin = ALPHA

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "s", complex(self.s))
        if abs(self.c * self.c + abs(self.s) ** 2 - 1.0) > SYMMETRIC_TOL:
            raise GateError(f"(c, s) not normalized: c={self.c}, s={self.s}")
        if self.p == self.q or self.p < 0 or self.q < 0:
            raise GateError(f"invalid orbital pair ({self.p}, {self.q})")
        if self.spin not in (ALPHA, BETA):
            raise GateError(f"spin must be {ALPHA!r} or {BETA!r}, got {self.spin!r}")


@dataclass(frozen=True)
class OrbitalRotationSpec:
    """Per-spin single-particle unitaries; u_beta defaults to u_alpha."""

    u_alpha: np.ndarray
    u_beta: np.ndarray | None = None

    def __post_init__(self) -> None:
        u_a = _as_square(self.u_alpha, "u_alpha")
        u_b = u_a if self.u_beta is None else _as_square(self.u_beta, "u_beta", u_a.shape[0])
        _check_unitary(u_a, "u_alpha")
        if u_b is not u_a:
            _check_unitary(u_b, "u_beta")
        object.__setattr__(self, "u_alpha", u_a)
        object.__setattr__(self, "u_beta", u_b)

    @property
    def norb(self) -> int:
        return self.u_alpha.shape[0]


@dataclass(frozen=True)
class QuadraticHamiltonianGate:
    """exp(-i t sum_pq M_pq a+_p a_q) per spin; m_beta defaults to m_alpha."""

    m_alpha: np.ndarray
    m_beta: np.ndarray | None = None
    time: float = field(kw_only=True)

    def __post_init__(self) -> None:
        m_a = _as_square(self.m_alpha, "m_alpha")
        m_b = m_a if self.m_beta is None else _as_square(self.m_beta, "m_beta", m_a.shape[0])
        _check_hermitian(m_a, "m_alpha")
        if m_b is not m_a:
            _check_hermitian(m_b, "m_beta")
        object.__setattr__(self, "m_alpha", m_a)
        object.__setattr__(self, "m_beta", m_b)
        object.__setattr__(self, "time", float(self.time))

    @property
    def norb(self) -> int:
        return self.m_alpha.shape[0]


def _prepare(vec: StateVector, gate_norb: int, copy: bool) -> StateVector:
    if gate_norb != vec.shape.norb:
        raise GateError(
            f"gate is on {gate_norb} orbitals but the state has {vec.shape.norb}"
        )
    return vec.copy() if copy else vec


def apply_num_op_sum_evolution(
    vec: StateVector, gate: NumOpSumGate, *, copy: bool = True
) -> StateVector:
    """Phase each configuration by exp(-i t sum of occupied coefficients)."""
    out = _prepare(vec, gate.norb, copy)
    shape = out.shape
    occ_a = occupation_matrix(shape.norb, shape.nalpha)
    occ_b = occupation_matrix(shape.norb, shape.nbeta)
    phase_a = np.exp(-1j * gate.time * (occ_a @ gate.lambda_alpha))
    phase_b = np.exp(-1j * gate.time * (occ_b @ gate.lambda_beta))
    kernels.apply_phase_outer(out.matrix, phase_a, phase_b)
    return out


def apply_diag_coulomb_evolution(
    vec: StateVector, gate: DiagCoulombGate, *, copy: bool = True
) -> StateVector:
    """Phase each configuration by its density-density interaction energy."""
    out = _prepare(vec, gate.norb, copy)
    shape = out.shape
    occ_a = occupation_matrix(shape.norb, shape.nalpha)
    occ_b = occupation_matrix(shape.norb, shape.nbeta)
    diag_a = np.einsum("ap,pq,aq->a", occ_a, gate.j_aa, occ_a)
    diag_b = np.einsum("bp,pq,bq->b", occ_b, gate.j_bb, occ_b)
    w_cross = gate.j_ab @ occ_b.T
    kernels.apply_diag_coulomb_phases(
        out.matrix, diag_a, diag_b, occ_a.astype(np.uint8), w_cross, gate.time
    )
    return out


def apply_givens_rotation(
    vec: StateVector, rot: GivensRotation, *, copy: bool = True
) -> StateVector:
    """Mix amplitude pairs related by moving one electron from p to q."""
    norb = vec.shape.norb
    if rot.p >= norb or rot.q >= norb:
        raise GateError(f"orbital pair ({rot.p}, {rot.q}) out of range for norb={norb}")
    out = _prepare(vec, norb, copy)
    shape = out.shape
    if rot.spin == ALPHA:
        src, dst, signs = build_pair_lists(norb, shape.nalpha).pair(rot.p, rot.q)
        kernels.givens_rows(out.matrix, src, dst, signs, rot.c, rot.s)
    else:
        src, dst, signs = build_pair_lists(norb, shape.nbeta).pair(rot.p, rot.q)
        kernels.givens_cols(out.matrix, src, dst, signs, rot.c, rot.s)
    return out


def rotation_matrix(rot: GivensRotation, norb: int) -> np.ndarray:
    """Single-particle matrix of a Givens rotation: the gate acts as this
    matrix on one-electron amplitude vectors."""
    mat = np.eye(norb, dtype=np.complex128)
    mat[rot.p, rot.p] = rot.c
    mat[rot.p, rot.q] = rot.s
    mat[rot.q, rot.p] = -np.conj(rot.s)
    mat[rot.q, rot.q] = rot.c
    return mat


def givens_decompose(u) -> tuple[list[GivensRotation], np.ndarray]:
    """Factor a unitary into adjacent-pair Givens rotations and phases.

    Returns (rotations, phases) with exactly N(N-1)/2 rotations, every one
    acting on an adjacent orbital pair (j, j+1), such that

        diag(phases) @ G_K @ ... @ G_1 == u

    where G_k is the single-particle matrix of rotations[k-1] (first list
    element innermost, i.e. applied first).  Trivial rotations (c=1, s=0)
    are kept so the count is always N(N-1)/2.
    """
    mat = _as_square(u, "u").copy()
    _check_unitary(mat, "u")
    n = mat.shape[0]
    if n == 0:
        return [], np.ones(0, dtype=np.complex128)
    # Eliminate below-diagonal entries bottom-up per column with rotations
    # on adjacent row pairs: r_K ... r_1 @ u = diag.
    elim: list[tuple[float, complex, int]] = []
    for col in range(n - 1):
        for row in range(n - 1, col, -1):
            a = mat[row - 1, col]
            b = mat[row, col]
            if b == 0:
                c, s = 1.0, 0.0 + 0.0j
            elif a == 0:
                c, s = 0.0, 1.0 + 0.0j
            else:
                norm = np.hypot(abs(a), abs(b))
                c = abs(a) / norm
                s = c * np.conj(b / a)
            if s != 0:
                x = mat[row - 1].copy()
                y = mat[row]
                mat[row - 1] = c * x + s * y
                mat[row] = -np.conj(s) * x + c * y
                mat[row, col] = 0.0
            elim.append((c, s, row - 1))
    diag = np.diagonal(mat).copy()
    phases = diag / np.abs(diag)
    # u = r_1' r_2' ... r_K' D (primes are adjoints); pushing D to the left
    # conjugates each adjoint rotation by D, which keeps c and rescales s.
    rotations = [
        GivensRotation(
            c=c,
            s=-s * np.conj(phases[j]) * phases[j + 1],
            p=j,
            q=j + 1,
        )
        for c, s, j in reversed(elim)
    ]
    return rotations, phases


def apply_orbital_rotation(
    vec: StateVector, spec: OrbitalRotationSpec, *, copy: bool = True
) -> StateVector:
    """Apply the sector unitary induced by per-spin orbital-basis changes.

    Compiled to the Givens network of givens_decompose per spin followed by
    one diagonal phase layer.  Rotations that are exactly trivial are
    skipped; the result is unchanged because they are identity maps.
    """
    out = _prepare(vec, spec.norb, copy)
    norb = spec.norb
    angles = []
    for spin, u in ((ALPHA, spec.u_alpha), (BETA, spec.u_beta)):
        rotations, phases = givens_decompose(u)
        for rot in rotations:
            if rot.c == 1.0 and rot.s == 0:
                continue
            apply_givens_rotation(
                out, dataclasses.replace(rot, spin=spin), copy=False
            )
        angles.append(np.angle(phases))
    occ_a = occupation_matrix(out.shape.norb, out.shape.nalpha)
    occ_b = occupation_matrix(out.shape.norb, out.shape.nbeta)
    phase_a = np.exp(1j * (occ_a @ angles[0]))
    phase_b = np.exp(1j * (occ_b @ angles[1]))
    kernels.apply_phase_outer(out.matrix, phase_a, phase_b)
    return out


def exp_quadratic(m: np.ndarray, time: float) -> np.ndarray:
    """exp(-i m time) for Hermitian m, via eigendecomposition."""
    eigs, basis = np.linalg.eigh(m)
    return (basis * np.exp(-1j * time * eigs)) @ basis.conj().T


def apply_quad_ham_evolution(
    vec: StateVector, gate: QuadraticHamiltonianGate, *, copy: bool = True
) -> StateVector:
    """Evolve under a quadratic Hamiltonian: orbital rotation by exp(-iMt)."""
    out = _prepare(vec, gate.norb, copy)
    u_a = exp_quadratic(gate.m_alpha, gate.time)
    u_b = u_a if gate.m_beta is gate.m_alpha else exp_quadratic(gate.m_beta, gate.time)
    return apply_orbital_rotation(out, OrbitalRotationSpec(u_a, u_b), copy=False)
