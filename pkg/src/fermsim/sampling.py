"""Configuration sampling from state vectors and Slater determinants.

Full-vector sampling squares amplitudes; Slater sampling never builds the
sector vector. It draws each spin's occupations from the projection
determinantal point process with kernel Q Q^dag, Q = U[:, reference], by a
chain-rule scan over orbitals with Householder updates, costing O(eta^2 N)
per shot. Shots use counter-based per-shot substreams so the output is
independent of how shots are distributed over threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import OrbitalRotationSpec
from .sector import SectorShape
from .states import StateVector, flat_to_strings

NORM_TOL = 1e-8
# conditional probabilities this small are treated as an exact miss
NEGLIGIBLE_P = 1e-14


class SamplingError(ValueError):
    """Invalid sampling specification or input state."""


def _as_occupations(config, norb: int, name: str) -> tuple[int, ...]:
    """Canonicalize a bitmask or orbital collection to sorted indices."""
    if isinstance(config, (int, np.integer)):
        mask = int(config)
        if mask < 0 or mask >> norb:
            raise SamplingError(f"{name} bitmask out of range for {norb} orbitals")
        return tuple(p for p in range(norb) if mask >> p & 1)
    orbs = sorted(int(p) for p in config)
    if any(p < 0 or p >= norb for p in orbs):
        raise SamplingError(f"{name} contains orbitals outside [0, {norb})")
    if len(set(orbs)) != len(orbs):
        raise SamplingError(f"{name} contains repeated orbitals")
    return tuple(orbs)


@dataclass(frozen=True)
class SlaterSpec:
    """A Slater determinant: `rotation` applied to the `reference` configuration."""

    norb: int
    reference: tuple
    rotation: OrbitalRotationSpec

    def __post_init__(self) -> None:
        if self.norb < 1:
            raise SamplingError(f"norb must be >= 1, got {self.norb}")
        ref_a, ref_b = self.reference
        ref = (
            _as_occupations(ref_a, self.norb, "reference alpha"),
            _as_occupations(ref_b, self.norb, "reference beta"),
        )
        object.__setattr__(self, "reference", ref)
        if self.rotation.norb != self.norb:
            raise SamplingError(
                f"rotation acts on {self.rotation.norb} orbitals, expected {self.norb}"
            )

    @property
    def nalpha(self) -> int:
        return len(self.reference[0])

    @property
    def nbeta(self) -> int:
        return len(self.reference[1])


def sample_state_vector(vec: StateVector, shots: int, seed: int) -> np.ndarray:
    """Draw configurations with probability |amplitude|^2.

    Returns a (shots, 2) uint64 array of (alpha, beta) occupation bitmasks.
    """
    if shots < 0:
        raise SamplingError(f"shots must be >= 0, got {shots}")
    norm = vec.norm()
    if abs(norm - 1.0) > NORM_TOL:
        raise SamplingError(f"state vector norm {norm} is not 1 within {NORM_TOL}")
    probs = np.abs(vec.data) ** 2
    probs /= probs.sum()
    rng = np.random.Generator(np.random.Philox(seed))
    flat = rng.choice(vec.shape.dim, size=shots, p=probs)
    out = np.empty((shots, 2), dtype=np.uint64)
    out[:, 0], out[:, 1] = flat_to_strings(vec.shape, flat)
    return out


def slater_probability(spec: SlaterSpec, config) -> float:
    """Probability of drawing `config` (bitmasks or orbital sets per spin)."""
    occ_a = _as_occupations(config[0], spec.norb, "config alpha")
    occ_b = _as_occupations(config[1], spec.norb, "config beta")
    if len(occ_a) != spec.nalpha or len(occ_b) != spec.nbeta:
        raise SamplingError(
            f"config has ({len(occ_a)}, {len(occ_b)}) particles, "
            f"spec has ({spec.nalpha}, {spec.nbeta})"
        )
    prob = 1.0
    for occ, ref, u_mat in (
        (occ_a, spec.reference[0], spec.rotation.u_alpha),
        (occ_b, spec.reference[1], spec.rotation.u_beta),
    ):
        if ref:
            sub = u_mat[np.ix_(list(occ), list(ref))]
            prob *= abs(np.linalg.det(sub)) ** 2
    return float(prob)


def _sample_spin_dpp(q_mat: np.ndarray, rng: np.random.Generator) -> int:
    """One draw of occupied orbitals from the projection DPP of Q Q^dag.

    The current orthonormal basis of the conditioned process is Q @ T; only
    coefficient updates of the eta x k matrix T are performed, so a shot
    costs O(eta^2 N).
    """
    norb, eta = q_mat.shape
    if eta == 0:
        return 0
    coeff = np.eye(eta, dtype=np.complex128)
    uniforms = rng.random(norb)
    mask = 0
    k = eta
    for j in range(norb):
        if k == 0:
            break
        if norb - j == k:
            # every remaining orbital is forced occupied
            mask |= ((1 << k) - 1) << j
            break
        row = q_mat[j] @ coeff
        p = min(max(float((row @ row.conj()).real), 0.0), 1.0)
        occupied = uniforms[j] < p
        if not occupied and p < NEGLIGIBLE_P:
            continue
        # Householder H (Hermitian, unitary) with row @ H = (c*, 0, ..., 0)
        x = row.conj()
        theta = np.angle(x[0])
        c = -np.exp(1j * theta) * np.sqrt((x @ x.conj()).real)
        u = x.copy()
        u[0] -= c
        coeff = coeff - np.outer(coeff @ u, (2.0 / (u @ u.conj()).real) * u.conj())
        if occupied:
            mask |= 1 << j
            k -= 1
            coeff = coeff[:, 1:]
        else:
            coeff[:, 0] /= np.sqrt(1.0 - p)
    return mask


def sample_slater(spec: SlaterSpec, shots: int, seed: int) -> np.ndarray:
    """Draw configurations from a Slater determinant without the full vector.

    Returns a (shots, 2) uint64 array of (alpha, beta) occupation bitmasks.
    Shot s uses the s-th jump of a counter-based stream, so results do not
    depend on how shots are batched.
    """
    if shots < 0:
        raise SamplingError(f"shots must be >= 0, got {shots}")
    q_a = spec.rotation.u_alpha[:, list(spec.reference[0])]
    q_b = spec.rotation.u_beta[:, list(spec.reference[1])]
    base = np.random.Philox(key=seed)
    out = np.empty((shots, 2), dtype=np.uint64)
    for shot in range(shots):
        rng = np.random.Generator(base.jumped(shot))
        out[shot, 0] = _sample_spin_dpp(q_a, rng)
        out[shot, 1] = _sample_spin_dpp(q_b, rng)
    return out
