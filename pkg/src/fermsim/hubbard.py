"""Square-lattice Hubbard model as a diagonal Coulomb Hamiltonian."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import DiagonalCoulombHamiltonian
from .sector import SectorShape


@dataclass(frozen=True)
class HubbardSpec:
    """nx x ny lattice with hopping t_hop and onsite interaction u_int.

    Site p sits at (x, y) with p = x + nx * y. Hopping acts on nearest
    neighbors; periodic_x additionally wraps each row (skipped for nx <= 2
    where the wrap edge would duplicate an open one).
    """

    nx: int
    ny: int
    t_hop: float = 1.0
    u_int: float = 8.0
    periodic_x: bool = False

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"lattice must be at least 1x1, got {self.nx}x{self.ny}")

    @property
    def norb(self) -> int:
        return self.nx * self.ny


def hubbard_edges(spec: HubbardSpec) -> list[tuple[int, int]]:
    """Unique nearest-neighbor edges (p < q) of the lattice."""
    edges = set()
    for y in range(spec.ny):
        for x in range(spec.nx):
            p = x + spec.nx * y
            if x + 1 < spec.nx:
                edges.add((p, p + 1))
            if y + 1 < spec.ny:
                edges.add((p, p + spec.nx))
        if spec.periodic_x and spec.nx > 2:
            p = spec.nx - 1 + spec.nx * y
            edges.add((spec.nx * y, p))
    return sorted(edges)


def build_hubbard(spec: HubbardSpec) -> DiagonalCoulombHamiltonian:
    """Hopping on lattice edges plus onsite opposite-spin repulsion."""
    norb = spec.norb
    one = np.zeros((norb, norb))
    for p, q in hubbard_edges(spec):
        one[p, q] = one[q, p] = -spec.t_hop
    zero = np.zeros((norb, norb))
    return DiagonalCoulombHamiltonian(one, zero, spec.u_int * np.eye(norb), zero)


def hubbard_sector(spec: HubbardSpec, filling: float) -> SectorShape:
    """Sector with round(norb * filling) electrons of each spin."""
    n_sigma = round(spec.norb * filling)
    return SectorShape(spec.norb, n_sigma, n_sigma)
