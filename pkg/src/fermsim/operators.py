"""Fermionic operators and Hamiltonian actions restricted to one sector.

Two tiers of machinery live here. `FermionOperator` is a symbolic linear
combination of creation/annihilation products, applied term by term; it
handles anything that conserves particle number and spin-z but makes no
attempt to be fast. The structured Hamiltonian types (molecular, diagonal
Coulomb, double factorized) have dedicated contraction paths built on the
excitation tables and compiled kernels.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg

from .kernels import one_body_cols, one_body_rows
from .sector import (
    build_excitation_table,
    build_pair_lists,
    make_strings,
    occupation_matrix,
    rank_strings,
)
from .states import StateVector, zero_state

ALPHA: Literal["alpha"] = "alpha"
BETA: Literal["beta"] = "beta"
CREATE: Literal["+"] = "+"
ANNIHILATE: Literal["-"] = "-"

# (action, spin, orbital)
Primitive = tuple[str, str, int]
Term = tuple[Primitive, ...]

HERMITIAN_TOL = 1e-10
SYMMETRIC_TOL = 1e-12
TENSOR_SYMMETRY_TOL = 1e-8

DEFAULT_MEMORY_BUDGET = 1 << 30
KRYLOV_CAP = 64
BREAKDOWN_TOL = 1e-14


class OperatorError(ValueError):
    """Raised for malformed operators, Hamiltonians, or their application."""


def cre(spin: str, orbital: int) -> Primitive:
    """Creation primitive for `FermionOperator` terms."""
    return (CREATE, spin, orbital)


def des(spin: str, orbital: int) -> Primitive:
    """Annihilation primitive for `FermionOperator` terms."""
    return (ANNIHILATE, spin, orbital)


def _check_primitive(prim) -> Primitive:
    try:
        action, spin, orbital = prim
    except (TypeError, ValueError):
        raise OperatorError(f"primitive must be (action, spin, orbital), got {prim!r}")
    if action not in (CREATE, ANNIHILATE):
        raise OperatorError(f"action must be '+' or '-', got {action!r}")
    if spin not in (ALPHA, BETA):
        raise OperatorError(f"spin must be 'alpha' or 'beta', got {spin!r}")
    orbital = int(orbital)
    if orbital < 0:
        raise OperatorError(f"orbital index must be non-negative, got {orbital}")
    return (action, spin, orbital)


def format_term(term: Term, coeff: complex) -> str:
    if not term:
        return repr(complex(coeff))
    prims = " ".join(
        f"a{'+' if action == CREATE else ''}_{orb}({spin})"
        for action, spin, orb in term
    )
    return f"{complex(coeff)!r} * {prims}"


class FermionOperator:
    """Linear combination of products of fermionic ladder operators.

    Terms map a tuple of primitives (applied right to left) to a complex
    coefficient. Instances are immutable; arithmetic returns new operators.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Term, complex] | None = None):
        data: dict[Term, complex] = {}
        for term, coeff in (terms or {}).items():
            key = tuple(_check_primitive(p) for p in term)
            value = complex(coeff)
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise OperatorError(f"non-finite coefficient for term {key}")
            data[key] = data.get(key, 0.0) + value
        self._terms = data

    @property
    def terms(self) -> Mapping[Term, complex]:
        return dict(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FermionOperator):
            return NotImplemented
        return self._terms == other._terms

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        if not isinstance(other, FermionOperator):
            return NotImplemented
        out = dict(self._terms)
        for term, coeff in other._terms.items():
            out[term] = out.get(term, 0.0) + coeff
        return FermionOperator(out)

    def __sub__(self, other: "FermionOperator") -> "FermionOperator":
        return self + (-1.0) * other

    def __neg__(self) -> "FermionOperator":
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, FermionOperator):
            out: dict[Term, complex] = {}
            for t1, c1 in self._terms.items():
                for t2, c2 in other._terms.items():
                    key = t1 + t2
                    out[key] = out.get(key, 0.0) + c1 * c2
            return FermionOperator(out)
        return FermionOperator(
            {term: coeff * complex(other) for term, coeff in self._terms.items()}
        )

    def __rmul__(self, other) -> "FermionOperator":
        return self * other

    def adjoint(self) -> "FermionOperator":
        """Hermitian conjugate: reversed primitives with flipped actions."""
        out = {}
        for term, coeff in self._terms.items():
            flipped = tuple(
                (CREATE if action == ANNIHILATE else ANNIHILATE, spin, orb)
                for action, spin, orb in reversed(term)
            )
            out[flipped] = out.get(flipped, 0.0) + np.conj(coeff)
        return FermionOperator(out)

    def prune(self, tol: float = 0.0) -> "FermionOperator":
        return FermionOperator(
            {t: c for t, c in self._terms.items() if abs(c) > tol}
        )

    def __repr__(self) -> str:
        if not self._terms:
            return "FermionOperator({})"
        lines = [format_term(t, c) for t, c in sorted(self._terms.items())]
        return "FermionOperator:\n  " + "\n  ".join(lines)


def format_operator(op: FermionOperator) -> str:
    """One term per line: `coeff * a+_p(spin) a_q(spin) ...`."""
    return "\n".join(format_term(t, c) for t, c in sorted(op.terms.items()))


def parse_operator(text: str) -> FermionOperator:
    """Inverse of format_operator."""
    import re

    prim_re = re.compile(r"^a(\+?)_(\d+)\((alpha|beta)\)$")
    terms: dict[Term, complex] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        coeff_text, _, prims_text = line.partition("*")
        try:
            coeff = complex(coeff_text.strip())
        except ValueError:
            raise OperatorError(f"line {lineno}: bad coefficient {coeff_text!r}")
        prims = []
        for token in prims_text.split():
            m = prim_re.match(token)
            if m is None:
                raise OperatorError(f"line {lineno}: bad primitive {token!r}")
            action = CREATE if m.group(1) else ANNIHILATE
            prims.append((action, m.group(3), int(m.group(2))))
        key = tuple(prims)
        terms[key] = terms.get(key, 0.0) + coeff
    return FermionOperator(terms)


def _mode_key(prim: Primitive) -> tuple[int, int]:
    _, spin, orb = prim
    return (0 if spin == ALPHA else 1, orb)


def normal_order(op: FermionOperator) -> FermionOperator:
    """Rewrite with creations left of annihilations, each block strictly
    descending by (spin, orbital) with beta above alpha.

    Anticommutation is applied exactly, so the result is the same operator;
    terms with a repeated creation or annihilation vanish.
    """
    result: dict[Term, complex] = {}
    stack: list[tuple[Term, complex]] = list(op.terms.items())
    while stack:
        term, coeff = stack.pop()
        if coeff == 0:
            continue
        for i in range(len(term) - 1):
            a, b = term[i], term[i + 1]
            a_cre = a[0] == CREATE
            b_cre = b[0] == CREATE
            if a_cre and not b_cre:
                continue
            if a_cre == b_cre:
                ka, kb = _mode_key(a), _mode_key(b)
                if ka == kb:
                    break  # a a or a+ a+ on one mode: term vanishes
                if ka < kb:
                    stack.append((term[:i] + (b, a) + term[i + 2 :], -coeff))
                    break
                continue
            # annihilation left of creation
            if a[1:] == b[1:]:
                stack.append((term[:i] + term[i + 2 :], coeff))
            stack.append((term[:i] + (b, a) + term[i + 2 :], -coeff))
            break
        else:
            result[term] = result.get(term, 0.0) + coeff
    return FermionOperator(result).prune()


def _spin_string_map(
    prims: Sequence[Primitive], norb: int, nocc: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Action of a single-spin primitive product on every sector string.

    Returns (alive_sources, targets, signs): string addresses that survive,
    the addresses they map to, and the accumulated fermionic signs.
    """
    strings = make_strings(norb, nocc).copy()
    dim = len(strings)
    alive = np.ones(dim, dtype=bool)
    sign = np.ones(dim, dtype=np.int8)
    for action, _, orb in reversed(prims):
        if orb >= norb:
            raise OperatorError(f"orbital {orb} out of range for {norb} orbitals")
        bit = np.uint64(1 << orb)
        occupied = (strings & bit) != 0
        alive &= occupied == (action == ANNIHILATE)
        above = strings & np.uint64(~((1 << (orb + 1)) - 1) & (2**64 - 1))
        parity = np.bitwise_count(above).astype(np.int64) & 1
        sign = np.where(parity == 1, -sign, sign).astype(np.int8)
        strings ^= bit
    src = np.nonzero(alive)[0]
    if len(src) == 0:
        return src, src, sign[:0]
    targets = rank_strings(strings[src], norb, nocc)
    return src, targets, sign[src]


def _validate_term_conserving(term: Term) -> None:
    for spin in (ALPHA, BETA):
        balance = sum(
            (1 if action == CREATE else -1)
            for action, s, _ in term
            if s == spin
        )
        if balance != 0:
            raise OperatorError(
                "term does not conserve particle number per spin: "
                + format_term(term, 1.0)
            )


def apply_fermion_operator(op: FermionOperator, vec: StateVector) -> StateVector:
    """Sum of the sector actions of every term. Terms must conserve the
    particle number of each spin; anything else cannot stay in the sector."""
    shape = vec.shape
    out = zero_state(shape)
    for term, coeff in op.terms.items():
        _validate_term_conserving(term)
        alpha_prims = [p for p in term if p[1] == ALPHA]
        beta_prims = [p for p in term if p[1] == BETA]
        # Moving every alpha primitive right past the beta primitives that
        # follow it costs one transposition each.
        crossings = 0
        beta_seen = 0
        for prim in reversed(term):
            if prim[1] == BETA:
                beta_seen += 1
            else:
                crossings += beta_seen
        cross_sign = -1.0 if crossings & 1 else 1.0
        src_a, tgt_a, sgn_a = _spin_string_map(alpha_prims, shape.norb, shape.nalpha)
        src_b, tgt_b, sgn_b = _spin_string_map(beta_prims, shape.norb, shape.nbeta)
        if len(src_a) == 0 or len(src_b) == 0:
            continue
        block = vec.matrix[np.ix_(src_a, src_b)]
        weights = np.outer(sgn_a, sgn_b) * (coeff * cross_sign)
        out.matrix[np.ix_(tgt_a, tgt_b)] += weights * block
    return out


def _as_coefficient_matrix(h, norb: int) -> np.ndarray:
    mat = np.ascontiguousarray(h, dtype=np.complex128)
    if mat.shape != (norb, norb):
        raise OperatorError(f"expected a {norb}x{norb} matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise OperatorError("coefficient matrix has non-finite entries")
    return mat


def apply_one_body(h, vec: StateVector) -> StateVector:
    """Action of the spin-summed one-body operator sum_pq h_pq a+_p a_q."""
    shape = vec.shape
    mat = _as_coefficient_matrix(h, shape.norb)
    out = zero_state(shape)
    table_a = build_excitation_table(shape.norb, shape.nalpha)
    table_b = build_excitation_table(shape.norb, shape.nbeta)
    if table_a.n_entries:
        coeffs = table_a.signs * mat[table_a.orbs_src, table_a.orbs_dst]
        one_body_rows(out.matrix, vec.matrix, table_a.targets, coeffs)
    if table_b.n_entries:
        coeffs = table_b.signs * mat[table_b.orbs_src, table_b.orbs_dst]
        one_body_cols(out.matrix, vec.matrix, table_b.targets, coeffs)
    return out


def _check_hermitian(mat: np.ndarray, name: str) -> None:
    err = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
    if err > HERMITIAN_TOL:
        raise OperatorError(f"{name} is not Hermitian: deviation {err:.3e}")


def _real_symmetric(mat, name: str) -> np.ndarray:
    arr = np.asarray(mat)
    if np.iscomplexobj(arr):
        if arr.size and np.max(np.abs(arr.imag)) > 0:
            raise OperatorError(f"{name} must be real")
        arr = arr.real
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise OperatorError(f"{name} must be square, got shape {arr.shape}")
    err = np.max(np.abs(arr - arr.T)) if arr.size else 0.0
    if err > SYMMETRIC_TOL:
        raise OperatorError(f"{name} is not symmetric: deviation {err:.3e}")
    return arr


@dataclass(frozen=True)
class MolecularHamiltonian:
    """Electronic Hamiltonian: one-body h_pq, chemist-ordered two-body
    h_pqrs, and a scalar core energy."""

    one_body: np.ndarray
    two_body: np.ndarray
    constant: float = 0.0

    def __post_init__(self):
        one = np.ascontiguousarray(self.one_body, dtype=np.complex128)
        if one.ndim != 2 or one.shape[0] != one.shape[1]:
            raise OperatorError(f"one_body must be square, got {one.shape}")
        _check_hermitian(one, "one_body")
        norb = one.shape[0]
        two = np.ascontiguousarray(self.two_body, dtype=np.complex128)
        if two.shape != (norb,) * 4:
            raise OperatorError(
                f"two_body must have shape {(norb,) * 4}, got {two.shape}"
            )
        if not (np.all(np.isfinite(one)) and np.all(np.isfinite(two))):
            raise OperatorError("Hamiltonian entries must be finite")
        object.__setattr__(self, "one_body", one)
        object.__setattr__(self, "two_body", two)
        object.__setattr__(self, "constant", float(self.constant))

    @property
    def norb(self) -> int:
        return self.one_body.shape[0]


@dataclass(frozen=True)
class DiagonalCoulombHamiltonian:
    """One-body part plus density-density couplings J^{aa}, J^{ab}, J^{bb}."""

    one_body: np.ndarray
    j_aa: np.ndarray
    j_ab: np.ndarray
    j_bb: np.ndarray
    constant: float = 0.0

    def __post_init__(self):
        one = np.ascontiguousarray(self.one_body, dtype=np.complex128)
        _check_hermitian(one, "one_body")
        norb = one.shape[0]
        j_aa = _real_symmetric(self.j_aa, "j_aa")
        j_bb = _real_symmetric(self.j_bb, "j_bb")
        j_ab = np.ascontiguousarray(self.j_ab, dtype=np.float64)
        if j_ab.shape != (norb, norb) or j_aa.shape != (norb, norb) or j_bb.shape != (norb, norb):
            raise OperatorError("all coupling matrices must match one_body's shape")
        object.__setattr__(self, "one_body", one)
        object.__setattr__(self, "j_aa", j_aa)
        object.__setattr__(self, "j_ab", j_ab)
        object.__setattr__(self, "j_bb", j_bb)
        object.__setattr__(self, "constant", float(self.constant))

    @property
    def norb(self) -> int:
        return self.one_body.shape[0]


@dataclass(frozen=True)
class DoubleFactorizedHamiltonian:
    """One-body part plus factorized two-body terms (J^{(t)}, U^{(t)})."""

    one_body: np.ndarray
    terms: tuple = field(default_factory=tuple)
    constant: float = 0.0

    def __post_init__(self):
        one = np.ascontiguousarray(self.one_body, dtype=np.complex128)
        _check_hermitian(one, "one_body")
        norb = one.shape[0]
        checked = []
        for idx, (j_mat, u_mat) in enumerate(self.terms):
            j_mat = _real_symmetric(j_mat, f"terms[{idx}] J")
            u_mat = np.ascontiguousarray(u_mat, dtype=np.complex128)
            if j_mat.shape != (norb, norb) or u_mat.shape != (norb, norb):
                raise OperatorError(f"terms[{idx}] must be {norb}x{norb}")
            dev = np.max(np.abs(u_mat.conj().T @ u_mat - np.eye(norb)))
            if dev > 1e-10:
                raise OperatorError(f"terms[{idx}] U is not unitary: {dev:.3e}")
            checked.append((j_mat, u_mat))
        object.__setattr__(self, "one_body", one)
        object.__setattr__(self, "terms", tuple(checked))
        object.__setattr__(self, "constant", float(self.constant))

    @property
    def norb(self) -> int:
        return self.one_body.shape[0]


def _diag_coulomb_energies(ham: DiagonalCoulombHamiltonian, shape) -> tuple:
    """Per-spin quadratic pieces and the cross matrix of the diagonal d."""
    occ_a = occupation_matrix(shape.norb, shape.nalpha)
    occ_b = occupation_matrix(shape.norb, shape.nbeta)
    diag_a = np.einsum("ap,pq,aq->a", occ_a, ham.j_aa, occ_a)
    diag_b = np.einsum("bp,pq,bq->b", occ_b, ham.j_bb, occ_b)
    w_cross = occ_a @ ham.j_ab @ occ_b.T
    return diag_a, diag_b, w_cross


def apply_diagonal_coulomb_hamiltonian(
    ham: DiagonalCoulombHamiltonian, vec: StateVector
) -> StateVector:
    """H v for the one-body + density-density + constant Hamiltonian."""
    shape = vec.shape
    if ham.norb != shape.norb:
        raise OperatorError(
            f"Hamiltonian is on {ham.norb} orbitals, state on {shape.norb}"
        )
    out = apply_one_body(ham.one_body, vec)
    diag_a, diag_b, w_cross = _diag_coulomb_energies(ham, shape)
    energies = 0.5 * (diag_a[:, None] + diag_b[None, :] + 2.0 * w_cross)
    out.matrix[...] += (energies + ham.constant) * vec.matrix
    return out


def _tensor_has_real_symmetry(two: np.ndarray) -> bool:
    if np.iscomplexobj(two) and two.size and np.max(np.abs(two.imag)) > TENSOR_SYMMETRY_TOL:
        return False
    t = two.real
    return (
        np.max(np.abs(t - t.transpose(1, 0, 2, 3))) <= TENSOR_SYMMETRY_TOL
        and np.max(np.abs(t - t.transpose(0, 1, 3, 2))) <= TENSOR_SYMMETRY_TOL
        and np.max(np.abs(t - t.transpose(2, 3, 0, 1))) <= TENSOR_SYMMETRY_TOL
    )


def molecular_as_fermion_operator(ham: MolecularHamiltonian) -> FermionOperator:
    """Expand into ladder-operator terms (constant omitted)."""
    norb = ham.norb
    shifted = ham.one_body - 0.5 * np.einsum("prrq->pq", ham.two_body)
    terms: dict[Term, complex] = {}
    for p in range(norb):
        for q in range(norb):
            if shifted[p, q] != 0:
                for spin in (ALPHA, BETA):
                    terms[(cre(spin, p), des(spin, q))] = shifted[p, q]
    for p in range(norb):
        for q in range(norb):
            for r in range(norb):
                for s in range(norb):
                    coeff = 0.5 * ham.two_body[p, q, r, s]
                    if coeff == 0:
                        continue
                    for s1 in (ALPHA, BETA):
                        for s2 in (ALPHA, BETA):
                            key = (cre(s1, p), des(s1, q), cre(s2, r), des(s2, s))
                            terms[key] = terms.get(key, 0.0) + coeff
    return FermionOperator(terms)


def apply_molecular_hamiltonian(
    ham: MolecularHamiltonian,
    vec: StateVector,
    *,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> StateVector:
    """H v via two excitation-table passes through an N^2-wide intermediate.

    The intermediate F[a, (pq), b] = sum_rs (h/2)[pq,rs] (E_rs v)[a, b] is
    built in alpha-row batches sized to `memory_budget` bytes. Requires the
    real 8-fold tensor symmetry; other tensors fall back to the term-by-term
    FermionOperator path.
    """
    shape = vec.shape
    if ham.norb != shape.norb:
        raise OperatorError(
            f"Hamiltonian is on {ham.norb} orbitals, state on {shape.norb}"
        )
    if not _tensor_has_real_symmetry(ham.two_body):
        out = apply_fermion_operator(molecular_as_fermion_operator(ham), vec)
        out.matrix[...] += ham.constant * vec.matrix
        return out

    norb = shape.norb
    shifted = ham.one_body - 0.5 * np.einsum("prrq->pq", ham.two_body)
    out = apply_one_body(shifted, vec)
    out.matrix[...] += ham.constant * vec.matrix

    dim_a, dim_b = shape.dims
    nsq = norb * norb
    half_h = 0.5 * np.ascontiguousarray(
        ham.two_body.real.reshape(nsq, nsq), dtype=np.float64
    )
    table_a = build_excitation_table(shape.norb, shape.nalpha)
    table_b = build_excitation_table(shape.norb, shape.nbeta)
    lists_a = build_pair_lists(shape.norb, shape.nalpha)
    rs_a = table_a.orbs_src * norb + table_a.orbs_dst
    rs_b = table_b.orbs_src * norb + table_b.orbs_dst

    per_row = dim_b * nsq * 16 * 2
    batch = max(1, memory_budget // per_row)
    cols = np.arange(dim_b)
    for start in range(0, dim_a, batch):
        stop = min(start + batch, dim_a)
        nrows = stop - start
        rows = np.arange(start, stop)
        inter = np.zeros((nrows, nsq, dim_b), dtype=np.complex128)
        # Gather D[a, (rs), b] = (E_rs v)[a, b] for the batch rows.
        for k in range(table_a.n_entries):
            inter[np.arange(nrows), rs_a[rows, k], :] = (
                table_a.signs[rows, k, None] * vec.matrix[table_a.targets[rows, k], :]
            )
        for k in range(table_b.n_entries):
            inter[:, rs_b[cols, k], cols] += (
                table_b.signs[cols, k] * vec.matrix[start:stop, table_b.targets[cols, k]]
            )
        inter = np.matmul(half_h[None, :, :], inter)
        # Scatter back out. Alpha entries are grouped by orbital pair; each
        # pair's sources are sorted, so the batch rows form one slice, and
        # its targets are distinct, so fancy += is collision-free.
        for (p, q), (src, tgt, sgn) in lists_a.entries.items():
            lo, hi = np.searchsorted(src, (start, stop))
            if lo == hi:
                continue
            slot = q * norb + p
            out.matrix[tgt[lo:hi], :] += sgn[lo:hi, None] * inter[src[lo:hi] - start, slot, :]
        for k in range(table_b.n_entries):
            out.matrix[start:stop, :] += (
                table_b.signs[cols, k] * inter[:, rs_b[cols, k], table_b.targets[cols, k]]
            )
    return out


def expectation(
    apply: Callable[[StateVector], StateVector], vec: StateVector
) -> complex:
    """<vec| H |vec> for the operator behind `apply`."""
    norm = vec.norm()
    if norm == 0:
        raise OperatorError("expectation of the zero vector is undefined")
    return complex(np.vdot(vec.data, apply(vec).data))


def double_factorize(
    two_body, tol: float = 1e-10, max_terms: int | None = None
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Factor an 8-fold-symmetric tensor as sum_t U g(J) U contractions.

    Eigendecomposes the N^2 x N^2 matrix form; each kept eigenpair yields a
    symmetric N x N matrix whose own eigenbasis gives (J^(t), U^(t)) with
    J^(t) = w_t * outer(mu, mu). Eigenvalues of either sign are kept.
    """
    two = np.asarray(two_body)
    norb = two.shape[0]
    if two.shape != (norb,) * 4:
        raise OperatorError(f"expected an N^4 tensor, got shape {two.shape}")
    if not _tensor_has_real_symmetry(two):
        raise OperatorError(
            "two-body tensor lacks the real 8-fold symmetry needed here"
        )
    mat = two.real.reshape(norb * norb, norb * norb)
    mat = (mat + mat.T) / 2
    eigvals, eigvecs = np.linalg.eigh(mat)
    order = np.argsort(-np.abs(eigvals))
    keep = [t for t in order if abs(eigvals[t]) > tol]
    if max_terms is not None:
        keep = keep[:max_terms]
    factors = []
    for t in keep:
        g = eigvecs[:, t].reshape(norb, norb)
        g = (g + g.T) / 2
        mu, basis = np.linalg.eigh(g)
        j_mat = eigvals[t] * np.outer(mu, mu)
        factors.append((j_mat, basis.astype(np.complex128)))
    return factors


def df_reconstruct(factors: Sequence[tuple[np.ndarray, np.ndarray]], norb: int) -> np.ndarray:
    """Tensor represented by double-factorized terms; inverse of the above."""
    out = np.zeros((norb,) * 4)
    for j_mat, u_mat in factors:
        u = u_mat.real
        out += np.einsum("pk,qk,kl,rl,sl->pqrs", u, u, j_mat, u, u)
    return out


def df_from_molecular(
    ham: MolecularHamiltonian, tol: float = 1e-10, max_terms: int | None = None
) -> DoubleFactorizedHamiltonian:
    """Double factorized form of a molecular Hamiltonian.

    The one-body part absorbs the -1/2 sum_r h_prrq shift so that the
    factorized two-body terms act through number operators only.
    """
    shifted = ham.one_body - 0.5 * np.einsum("prrq->pq", ham.two_body)
    factors = double_factorize(ham.two_body, tol=tol, max_terms=max_terms)
    return DoubleFactorizedHamiltonian(
        one_body=shifted, terms=tuple(factors), constant=ham.constant
    )


def exact_evolve(
    apply: Callable[[StateVector], StateVector],
    vec: StateVector,
    time: float,
    tol: float = 1e-12,
) -> StateVector:
    """exp(-i time H) vec for the Hermitian operator behind `apply`.

    Adaptive Lanczos with full reorthogonalization: builds a Krylov basis up
    to dimension 64, evaluates the projected exponential, and halves the time
    step whenever the residual estimate stays above the per-step share of
    `tol`. The caller asserts Hermiticity.
    """
    if tol <= 0:
        raise OperatorError("tol must be positive")
    norm0 = vec.norm()
    if norm0 == 0:
        raise OperatorError("cannot evolve the zero vector")
    if time == 0:
        return vec.copy()

    current = vec.copy()
    remaining = float(time)
    step = remaining
    halvings = 0
    while remaining != 0:
        if abs(step) > abs(remaining):
            step = remaining
        result = _lanczos_expm(apply, current, step, tol * abs(step / time) * norm0)
        if result is None:
            step /= 2
            halvings += 1
            if halvings > 60:
                raise OperatorError("time evolution failed to converge")
            continue
        current = result
        remaining -= step
    return current


def _lanczos_expm(apply, vec: StateVector, time: float, tol: float):
    dim = len(vec.data)
    cap = min(KRYLOV_CAP, dim)
    beta0 = vec.norm()
    basis = [vec.data / beta0]
    alphas: list[float] = []
    betas: list[float] = []
    for j in range(cap):
        w = apply(StateVector(vec.shape, np.ascontiguousarray(basis[j]))).data.copy()
        alphas.append(float(np.real(np.vdot(basis[j], w))))
        w -= alphas[j] * basis[j]
        if j > 0:
            w -= betas[j - 1] * basis[j - 1]
        # Full reorthogonalization keeps the basis usable past ~30 vectors.
        stacked = np.array(basis)
        w -= stacked.T @ (stacked.conj() @ w)
        beta = float(np.linalg.norm(w))
        theta, q = scipy.linalg.eigh_tridiagonal(alphas, betas)
        small = q @ (np.exp(-1j * time * theta) * q[0])
        if beta < BREAKDOWN_TOL * beta0 or beta * abs(small[j]) * abs(time) < tol:
            data = beta0 * (np.array(basis).T @ small)
            return StateVector(vec.shape, np.ascontiguousarray(data))
        betas.append(beta)
        basis.append(w / beta)
    return None
