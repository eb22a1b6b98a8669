"""Symmetry-sector basis: configuration encoding, addressing, excitation tables.

A sector is the subspace of Fock space with fixed numbers of spin-up and
spin-down electrons.  Basis configurations are pairs of occupation strings,
one per spin species, each stored as an integer bitmask over spatial
orbitals (bit p set means orbital p occupied).  Strings of fixed particle
number are addressed combinadically, in ascending bitmask-integer order, so
the string occupying the lowest orbitals sits at address 0 and the state
vector is laid out with the spin-up address as the major (slow) index.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_NORB = 64


class SectorError(ValueError):
    """Raised when sector parameters or occupation strings are inconsistent."""


@dataclass(frozen=True)
class SectorShape:
    """Orbital count and per-spin electron counts defining a symmetry sector.

    Attributes:
        norb: Number of spatial orbitals.
        nalpha: Number of spin-up electrons.
        nbeta: Number of spin-down electrons.
    """

    norb: int
    nalpha: int
    nbeta: int

    def __post_init__(self) -> None:
        if not 0 <= self.norb <= MAX_NORB:
            raise SectorError(f"norb must be in [0, {MAX_NORB}], got {self.norb}")
        for name, n in (("nalpha", self.nalpha), ("nbeta", self.nbeta)):
            if not 0 <= n <= self.norb:
                raise SectorError(f"{name} must be in [0, norb={self.norb}], got {n}")

    @property
    def nelec(self) -> tuple[int, int]:
        return (self.nalpha, self.nbeta)

    @property
    def dims(self) -> tuple[int, int]:
        """(dim_alpha, dim_beta) of the per-spin string spaces."""
        return sector_dimension(self)

    @property
    def dim(self) -> int:
        """Total sector dimension dim_alpha * dim_beta."""
        da, db = self.dims
        return da * db


def sector_dimension(shape: SectorShape) -> tuple[int, int]:
    """Per-spin string counts (binom(N, N_alpha), binom(N, N_beta)).

    The product of the two counts is the state-vector length.  Computed with
    arbitrary-precision integers, so arbitrarily large sectors report exact
    dimensions without overflow.
    """
    return (
        math.comb(shape.norb, shape.nalpha),
        math.comb(shape.norb, shape.nbeta),
    )


def orbitals_to_string(orbitals: Iterable[int], norb: int) -> int:
    """Bitmask with the given orbital indices set.

    Rejects duplicates and out-of-range indices.
    """
    occ = 0
    for p in orbitals:
        if not 0 <= p < norb:
            raise SectorError(f"orbital index {p} out of range [0, {norb})")
        bit = 1 << p
        if occ & bit:
            raise SectorError(f"orbital index {p} listed twice")
        occ |= bit
    return occ


def string_to_orbitals(occ: int) -> tuple[int, ...]:
    """Sorted occupied-orbital indices of a bitmask."""
    return tuple(p for p in range(occ.bit_length()) if occ >> p & 1)


def format_string(occ: int, norb: int) -> str:
    """Bitstring rendering with orbital 0 rightmost, e.g. 0b1010 -> "1010"."""
    return format(occ, f"0{norb}b") if norb else ""


def _as_string(occ: int | Iterable[int], norb: int) -> int:
    if isinstance(occ, (int, np.integer)):
        occ = int(occ)
        if occ < 0 or occ >> norb:
            raise SectorError(
                f"occupation {occ:#x} has bits outside orbitals [0, {norb})"
            )
        return occ
    return orbitals_to_string(occ, norb)


def rank_string(occ: int | Iterable[int], norb: int, nocc: int | None = None) -> int:
    """Combinadic address of an occupation string.

    addr = sum_i binom(o_i, i + 1) over occupied orbitals o_0 < o_1 < ...;
    this enumerates strings of fixed particle number in ascending
    bitmask-integer order.  ``occ`` may be a bitmask or an iterable of
    occupied orbital indices.  When ``nocc`` is given, a population-count
    mismatch is an error.
    """
    bits = _as_string(occ, norb)
    if nocc is not None and bits.bit_count() != nocc:
        raise SectorError(
            f"occupation {bits:#x} has {bits.bit_count()} electrons, expected {nocc}"
        )
    addr = 0
    i = 1
    for p in range(norb):
        if bits >> p & 1:
            addr += math.comb(p, i)
            i += 1
    return addr


def unrank_string(addr: int, norb: int, nocc: int) -> int:
    """Occupation bitmask at a combinadic address (inverse of rank_string)."""
    if not 0 <= nocc <= norb:
        raise SectorError(f"nocc must be in [0, norb={norb}], got {nocc}")
    dim = math.comb(norb, nocc)
    if not 0 <= addr < dim:
        raise SectorError(f"address {addr} out of range [0, {dim})")
    occ = 0
    rem = addr
    for i in range(nocc, 0, -1):
        # Largest orbital o with binom(o, i) <= rem.
        o = i - 1
        while math.comb(o + 1, i) <= rem:
            o += 1
        occ |= 1 << o
        rem -= math.comb(o, i)
    return occ


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def make_strings(norb: int, nocc: int) -> np.ndarray:
    """All occupation bitmasks with ``nocc`` bits set, ascending, as uint64.

    Index into the returned array equals the combinadic address.  Cached and
    read-only, so the table is shared freely across callers and threads.
    """
    if not 0 <= nocc <= norb <= MAX_NORB:
        raise SectorError(f"invalid string space ({norb}, {nocc})")
    dim = math.comb(norb, nocc)
    out = np.empty(dim, dtype=np.uint64)
    if nocc == 0:
        out[0] = 0
        return _frozen(out)
    s = (1 << nocc) - 1
    for a in range(dim):
        out[a] = s
        # Gosper's hack: next larger integer with the same popcount.
        low = s & -s
        ripple = s + low
        s = ripple | (((s ^ ripple) >> 2) // low)
    return _frozen(out)


def rank_strings(strings: np.ndarray, norb: int, nocc: int) -> np.ndarray:
    """Vectorized rank_string via binary search in the sorted string table."""
    table = make_strings(norb, nocc)
    addrs = np.searchsorted(table, strings)
    ok = addrs < len(table)
    if not np.all(ok) or np.any(table[np.where(ok, addrs, 0)] != strings):
        raise SectorError(f"string not in the ({norb}, {nocc}) space")
    return addrs


@lru_cache(maxsize=None)
def occupation_matrix(norb: int, nocc: int) -> np.ndarray:
    """Dense 0/1 occupations, shape (dim, norb): row a = string at address a."""
    strings = make_strings(norb, nocc)
    occ = (strings[:, None] >> np.arange(norb, dtype=np.uint64)[None, :]) & np.uint64(1)
    return _frozen(occ.astype(np.float64))


def _parity_between(strings: np.ndarray, p: int, q: int) -> np.ndarray:
    """(-1)^(#occupied orbitals strictly between p and q) per string, as int8."""
    lo, hi = (p, q) if p < q else (q, p)
    mask = np.uint64(((1 << hi) - 1) & ~((1 << (lo + 1)) - 1))
    counts = np.bitwise_count(strings & mask)
    return (1 - 2 * (counts & np.uint64(1)).astype(np.int8)).astype(np.int8)


def _pair_entries(
    strings: np.ndarray, norb: int, nocc: int, p: int, q: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sources, targets, signs of a+_q a_p over all strings (q may equal p)."""
    p_occ = (strings >> np.uint64(p)) & np.uint64(1)
    if q == p:
        src = np.nonzero(p_occ)[0].astype(np.int64)
        return src, src, np.ones(len(src), dtype=np.int8)
    q_occ = (strings >> np.uint64(q)) & np.uint64(1)
    src = np.nonzero((p_occ == 1) & (q_occ == 0))[0].astype(np.int64)
    moved = (strings[src] & ~np.uint64(1 << p)) | np.uint64(1 << q)
    tgt = rank_strings(moved, norb, nocc)
    sgn = _parity_between(strings[src], p, q)
    return src, tgt, sgn


@dataclass(frozen=True)
class PairLists:
    """Per-orbital-pair excitation lists for one spin species.

    entries[(p, q)] = (sources, targets, signs): applying a+_q a_p to the
    string at address sources[i] yields signs[i] times the string at
    targets[i].  Sources are exactly the strings with p occupied and q empty
    (all strings with p occupied when q = p).  Used by gate kernels, which
    sweep one orbital pair at a time.
    """

    norb: int
    nocc: int
    entries: dict[tuple[int, int], tuple[np.ndarray, np.ndarray, np.ndarray]]

    def pair(self, p: int, q: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.entries[(p, q)]


@lru_cache(maxsize=None)
def build_pair_lists(norb: int, nocc: int) -> PairLists:
    """Build (and cache) excitation lists grouped by ordered orbital pair."""
    strings = make_strings(norb, nocc)
    entries = {}
    for p in range(norb):
        for q in range(norb):
            src, tgt, sgn = _pair_entries(strings, norb, nocc, p, q)
            entries[(p, q)] = (_frozen(src), _frozen(tgt), _frozen(sgn))
    return PairLists(norb, nocc, entries)


@dataclass(frozen=True)
class ExcitationTable:
    """Single-excitation lookup for all strings of one spin species.

    Row s holds every entry (p, q) with p occupied in string s and q empty
    in s minus {p} (or q = p): applying a+_q a_p to string s yields
    signs[s, k] times the string at targets[s, k], where
    p = orbs_src[s, k] and q = orbs_dst[s, k].  Entries are sorted by
    (p, q); every row has exactly nocc * (norb - nocc) + nocc of them.
    """

    norb: int
    nocc: int
    orbs_src: np.ndarray
    orbs_dst: np.ndarray
    targets: np.ndarray
    signs: np.ndarray

    @property
    def n_entries(self) -> int:
        return self.orbs_src.shape[1]


@lru_cache(maxsize=None)
def build_excitation_table(norb: int, nocc: int) -> ExcitationTable:
    """Build (and cache) the per-string excitation table for one spin species."""
    strings = make_strings(norb, nocc)
    dim = len(strings)
    n_entries = nocc * (norb - nocc) + nocc
    orbs_src = np.empty((dim, n_entries), dtype=np.int64)
    orbs_dst = np.empty((dim, n_entries), dtype=np.int64)
    targets = np.empty((dim, n_entries), dtype=np.int64)
    signs = np.empty((dim, n_entries), dtype=np.int8)
    fill = np.zeros(dim, dtype=np.int64)
    for p in range(norb):
        for q in range(norb):
            src, tgt, sgn = _pair_entries(strings, norb, nocc, p, q)
            cols = fill[src]
            orbs_src[src, cols] = p
            orbs_dst[src, cols] = q
            targets[src, cols] = tgt
            signs[src, cols] = sgn
            fill[src] += 1
    assert np.all(fill == n_entries)
    for arr in (orbs_src, orbs_dst, targets, signs):
        _frozen(arr)
    return ExcitationTable(norb, nocc, orbs_src, orbs_dst, targets, signs)
