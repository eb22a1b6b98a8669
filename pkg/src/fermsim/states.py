"""State vectors over a symmetry sector, their construction and file format.

Amplitudes are stored as one dense complex128 array of length
dim_alpha * dim_beta, flat index = addr_alpha * dim_beta + addr_beta, so the
spin-up address is the major axis.  The binary file format (FSV1) is the
CLI interchange format: magic bytes "FSV1"; norb, nalpha, nbeta as 32-bit
little-endian unsigned integers; then the amplitudes as interleaved
little-endian float64 (real, imaginary) pairs in flat order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .sector import SectorError, SectorShape, make_strings, rank_string

FSV1_MAGIC = b"FSV1"


class StateFormatError(ValueError):
    """Raised when a state-vector file is malformed."""


@dataclass
class StateVector:
    """Dense sector state: a SectorShape plus its flat amplitude array."""

    shape: SectorShape
    data: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.data, np.ndarray) or self.data.dtype != np.complex128:
            raise SectorError("state data must be a complex128 numpy array")
        if self.data.ndim != 1 or not self.data.flags.c_contiguous:
            raise SectorError("state data must be a contiguous 1-D array")
        if self.data.shape[0] != self.shape.dim:
            raise SectorError(
                f"state length {self.data.shape[0]} does not match sector "
                f"dimension {self.shape.dim}"
            )

    @property
    def matrix(self) -> np.ndarray:
        """(dim_alpha, dim_beta) view of the amplitudes; shares memory."""
        return self.data.reshape(self.shape.dims)

    def copy(self) -> StateVector:
        return StateVector(self.shape, self.data.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))


def zero_state(shape: SectorShape) -> StateVector:
    return StateVector(shape, np.zeros(shape.dim, dtype=np.complex128))


def hartree_fock(shape: SectorShape) -> StateVector:
    """The configuration occupying the lowest orbitals of each spin.

    That configuration sits at address 0 of both spin spaces, hence at flat
    index 0.
    """
    vec = zero_state(shape)
    vec.data[0] = 1.0
    return vec


def configuration_state(shape: SectorShape, occ_alpha, occ_beta) -> StateVector:
    """Basis state for a configuration given as bitmasks or orbital lists."""
    addr_a = rank_string(occ_alpha, shape.norb, shape.nalpha)
    addr_b = rank_string(occ_beta, shape.norb, shape.nbeta)
    vec = zero_state(shape)
    vec.data[addr_a * shape.dims[1] + addr_b] = 1.0
    return vec


def random_state(shape: SectorShape, seed=None) -> StateVector:
    """Normalized state with i.i.d. complex Gaussian amplitudes.

    This is the uniform distribution on the unit sphere of the sector.
    ``seed`` may be an integer or a numpy Generator.
    """
    rng = np.random.default_rng(seed)
    data = rng.standard_normal(shape.dim) + 1j * rng.standard_normal(shape.dim)
    data /= np.linalg.norm(data)
    return StateVector(shape, data)


def flat_to_strings(shape: SectorShape, flat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Occupation bitmask pairs (alpha, beta) for flat amplitude indices."""
    flat = np.asarray(flat, dtype=np.int64)
    dim_b = shape.dims[1]
    strings_a = make_strings(shape.norb, shape.nalpha)
    strings_b = make_strings(shape.norb, shape.nbeta)
    return strings_a[flat // dim_b], strings_b[flat % dim_b]


def save_statevector(dest: str | Path | BinaryIO, vec: StateVector) -> None:
    """Write a state vector in the FSV1 binary format."""
    header = FSV1_MAGIC + struct.pack(
        "<III", vec.shape.norb, vec.shape.nalpha, vec.shape.nbeta
    )
    payload = np.ascontiguousarray(vec.data, dtype="<c16").tobytes()
    if hasattr(dest, "write"):
        dest.write(header)
        dest.write(payload)
    else:
        with open(dest, "wb") as handle:
            handle.write(header)
            handle.write(payload)


def load_statevector(source: str | Path | BinaryIO) -> StateVector:
    """Read a state vector in the FSV1 binary format."""
    if hasattr(source, "read"):
        raw = source.read()
    else:
        raw = Path(source).read_bytes()
    if len(raw) < 16:
        raise StateFormatError("file too short for an FSV1 header")
    if raw[:4] != FSV1_MAGIC:
        raise StateFormatError(f"bad magic bytes {raw[:4]!r}, expected {FSV1_MAGIC!r}")
    norb, nalpha, nbeta = struct.unpack("<III", raw[4:16])
    try:
        shape = SectorShape(norb, nalpha, nbeta)
    except SectorError as exc:
        raise StateFormatError(f"invalid sector in header: {exc}") from exc
    expected = shape.dim * 16
    if len(raw) - 16 != expected:
        raise StateFormatError(
            f"payload is {len(raw) - 16} bytes, expected {expected} for "
            f"sector {(norb, nalpha, nbeta)}"
        )
    data = np.frombuffer(raw, dtype="<c16", offset=16).astype(np.complex128)
    return StateVector(shape, data)
