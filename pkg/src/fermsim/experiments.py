"""Experiment drivers: Trotter-error scans and Krylov diagonalization."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .gatecount import count_two_qubit_gates, trotter_plan_operations
from .operators import (
    DiagonalCoulombHamiltonian,
    DoubleFactorizedHamiltonian,
    apply_diagonal_coulomb_hamiltonian,
    exact_evolve,
)
from .sector import SectorShape
from .states import StateVector, random_state
from .trotter import (
    TrotterPlan,
    simulate_trotter_diag_coulomb,
    simulate_trotter_double_factorized,
)

NORM_TOL = 1e-8


class ExperimentError(ValueError):
    """Invalid experiment configuration or a degenerate Krylov subspace."""


@dataclass(frozen=True)
class TrotterErrorRecord:
    order: int
    n_steps: int
    gate_count: int
    mean_error: float
    std_error: float


def trotter_error_experiment(
    ham: DiagonalCoulombHamiltonian,
    shape: SectorShape,
    time: float,
    orders: Sequence[int],
    steps: Sequence[int],
    n_vectors: int,
    seed: int,
    *,
    workers: int = 1,
) -> list[TrotterErrorRecord]:
    """Euclidean Trotter error against exact evolution, per (order, n_steps).

    The same seeded random unit vectors (complex Gaussian, normalized) are
    used for every cell, and each cell reports the mean and population
    standard deviation of the per-vector errors plus the two-qubit gate
    count of its merged circuit plan. Results are deterministic for a fixed
    seed regardless of `workers`.
    """
    if n_vectors < 1:
        raise ExperimentError(f"n_vectors must be >= 1, got {n_vectors}")
    if not orders or not steps:
        raise ExperimentError("orders and steps must be non-empty")
    rng = np.random.Generator(np.random.Philox(seed))
    vecs = [random_state(shape, rng) for _ in range(n_vectors)]
    exacts = [
        exact_evolve(lambda v: apply_diagonal_coulomb_hamiltonian(ham, v), vec, time)
        for vec in vecs
    ]

    def run_cell(cell: tuple[int, int]) -> TrotterErrorRecord:
        order, n_steps = cell
        errors = [
            np.linalg.norm(
                simulate_trotter_diag_coulomb(vec, ham, time, n_steps, order).data
                - exact.data
            )
            for vec, exact in zip(vecs, exacts)
        ]
        plan = TrotterPlan(order, n_steps, time, 2)
        gates = count_two_qubit_gates(trotter_plan_operations(ham, plan))
        return TrotterErrorRecord(
            order, n_steps, gates, float(np.mean(errors)), float(np.std(errors))
        )

    cells = [(order, n_steps) for order in orders for n_steps in steps]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_cell, cells))
    return [run_cell(cell) for cell in cells]


@dataclass(frozen=True)
class KrylovConfig:
    """Krylov space dimension, time step, evolution mode, overlap threshold."""

    dim: int
    dt: float
    evolve: str = "exact"
    trotter_order: int = 1
    trotter_steps: int = 1
    threshold: float = 1e-10

    def __post_init__(self):
        if self.dim < 1:
            raise ExperimentError(f"dim must be >= 1, got {self.dim}")
        if not self.dt > 0:
            raise ExperimentError(f"dt must be > 0, got {self.dt}")
        if not self.threshold > 0:
            raise ExperimentError(f"threshold must be > 0, got {self.threshold}")
        if self.evolve not in ("exact", "trotter"):
            raise ExperimentError(f"evolve must be 'exact' or 'trotter', got {self.evolve!r}")
        if self.evolve == "trotter" and self.trotter_steps < 1:
            raise ExperimentError(f"trotter_steps must be >= 1, got {self.trotter_steps}")


def _evolution_step(
    apply: Callable, config: KrylovConfig, hamiltonian
) -> Callable[[StateVector], StateVector]:
    if config.evolve == "exact":
        return lambda vec: exact_evolve(apply, vec, config.dt)
    if hamiltonian is None:
        raise ExperimentError(
            "trotter evolution needs hamiltonian= (a diagonal Coulomb or "
            "double-factorized Hamiltonian)"
        )
    if isinstance(hamiltonian, DiagonalCoulombHamiltonian):
        return lambda vec: simulate_trotter_diag_coulomb(
            vec, hamiltonian, config.dt, config.trotter_steps, config.trotter_order
        )
    if isinstance(hamiltonian, DoubleFactorizedHamiltonian):
        return lambda vec: simulate_trotter_double_factorized(
            vec, hamiltonian, config.dt, config.trotter_steps, config.trotter_order
        )
    raise ExperimentError(
        f"no Trotter simulator for {type(hamiltonian).__name__}"
    )


def krylov_diagonalize(
    apply: Callable[[StateVector], StateVector],
    ref: StateVector,
    config: KrylovConfig,
    hamiltonian=None,
) -> np.ndarray:
    """Lowest eigenvalue estimate per Krylov dimension d = 1..config.dim.

    Basis vectors are powers of one evolution operator applied to `ref`
    (each new vector evolves the previous one). For every prefix the
    generalized eigenproblem is regularized by dropping overlap eigenvalues
    below config.threshold before projecting the Hamiltonian.
    """
    norm = ref.norm()
    if abs(norm - 1.0) > NORM_TOL:
        raise ExperimentError(f"reference norm {norm} is not 1 within {NORM_TOL}")
    step = _evolution_step(apply, config, hamiltonian)
    basis = [ref]
    for _ in range(config.dim - 1):
        basis.append(step(basis[-1]))
    applied = [apply(vec) for vec in basis]
    dim = config.dim
    overlap = np.empty((dim, dim), dtype=np.complex128)
    h_mat = np.empty((dim, dim), dtype=np.complex128)
    for j in range(dim):
        for k in range(dim):
            overlap[j, k] = np.vdot(basis[j].data, basis[k].data)
            h_mat[j, k] = np.vdot(basis[j].data, applied[k].data)
    energies = np.empty(dim)
    for d in range(1, dim + 1):
        vals, vecs = scipy.linalg.eigh(overlap[:d, :d])
        keep = vals >= config.threshold
        if not np.any(keep):
            raise ExperimentError(
                f"degenerate subspace: all overlap eigenvalues at dimension {d} "
                f"fall below {config.threshold}"
            )
        transform = vecs[:, keep] / np.sqrt(vals[keep])
        projected = transform.conj().T @ h_mat[:d, :d] @ transform
        projected = (projected + projected.conj().T) / 2
        energies[d - 1] = scipy.linalg.eigvalsh(projected)[0]
    return energies
