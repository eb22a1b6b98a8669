"""Product-formula sequences and Trotterized evolution vs exact oracles."""

import math

import numpy as np
import pytest
from scipy.stats import unitary_group

import oracles
from fermsim import trotter
from fermsim.gates import OrbitalRotationSpec, apply_orbital_rotation
from fermsim.operators import (
    DiagonalCoulombHamiltonian,
    DoubleFactorizedHamiltonian,
    apply_diagonal_coulomb_hamiltonian,
    apply_one_body,
    exact_evolve,
)
from fermsim.sector import SectorShape
from fermsim.states import random_state
from fermsim.trotter import (
    TrotterPlan,
    merge_sequence,
    simulate_trotter_diag_coulomb,
    simulate_trotter_double_factorized,
    suzuki_sequence,
)

U2 = 0.4144907717943757  # 1 / (4 - 4**(1/3))


def per_term_sums(seq, term_count):
    buckets = [[] for _ in range(term_count)]
    for term, frac in seq:
        buckets[term].append(frac)
    return [math.fsum(b) for b in buckets]


class TestSuzukiSequence:
    def test_order_zero(self):
        assert suzuki_sequence(0, 3, 0.25) == [(0, 0.25), (1, 0.25), (2, 0.25)]

    def test_order_one_palindrome_halves(self):
        seq = suzuki_sequence(1, 2, 0.5)
        assert seq == [(0, 0.25), (1, 0.25), (1, 0.25), (0, 0.25)]

    def test_order_two_structure(self):
        seq = suzuki_sequence(2, 2, 1.0)
        assert len(seq) == 20
        # outer wings advance by u2 * dt, the middle block runs backward
        assert seq[0] == (0, U2 / 2)
        mid = 1.0 - 4.0 * U2
        assert mid < 0
        assert seq[9] == (1, mid / 2)

    def test_length_growth(self):
        for term_count in (1, 2, 3):
            assert len(suzuki_sequence(0, term_count, 1.0)) == term_count
            for order in (1, 2, 3):
                expect = 2 * term_count * 5 ** (order - 1)
                assert len(suzuki_sequence(order, term_count, 1.0)) == expect

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_palindrome(self, order):
        seq = suzuki_sequence(order, 3, 0.7)
        assert seq == seq[::-1]

    @pytest.mark.parametrize("order", [0, 1, 2, 3])
    @pytest.mark.parametrize("dt", [1.0, 0.1, -0.37, 1.0 / 3.0])
    def test_fractions_sum_exactly(self, order, dt):
        for term_count in (1, 2, 4):
            seq = suzuki_sequence(order, term_count, dt)
            assert per_term_sums(seq, term_count) == [dt] * term_count
            assert math.fsum(f for _, f in seq) == term_count * dt

    def test_validation(self):
        with pytest.raises(ValueError):
            suzuki_sequence(-1, 2, 1.0)
        with pytest.raises(ValueError):
            suzuki_sequence(1, 0, 1.0)


class TestMergeSequence:
    def test_merges_adjacent_same_term(self):
        seq = suzuki_sequence(1, 2, 1.0)
        assert merge_sequence(seq) == [(0, 0.5), (1, 1.0), (0, 0.5)]

    def test_merges_across_step_boundary(self):
        seq = suzuki_sequence(1, 2, 1.0) * 2
        merged = merge_sequence(seq)
        assert merged == [(0, 0.5), (1, 1.0), (0, 1.0), (1, 1.0), (0, 0.5)]

    def test_single_term_collapses(self):
        assert merge_sequence(suzuki_sequence(1, 1, 0.5)) == [(0, 0.5)]

    def test_preserves_sums_and_order(self):
        seq = suzuki_sequence(2, 3, 0.9)
        merged = merge_sequence(seq)
        assert per_term_sums(merged, 3) == per_term_sums(seq, 3)
        for a, b in zip(merged, merged[1:]):
            assert a[0] != b[0]

    def test_empty(self):
        assert merge_sequence([]) == []


def hubbard_like(norb, t_hop, u_int, j_same=0.0, constant=0.0):
    """Path-graph hopping plus onsite interaction, optional same-spin tail."""
    one = np.zeros((norb, norb))
    for p in range(norb - 1):
        one[p, p + 1] = one[p + 1, p] = -t_hop
    j_ab = u_int * np.eye(norb)
    j_aa = np.zeros((norb, norb))
    for p in range(norb - 1):
        j_aa[p, p + 1] = j_aa[p + 1, p] = j_same
    return DiagonalCoulombHamiltonian(one, j_aa, j_ab, j_aa, constant=constant)


def random_df_hamiltonian(norb, n_terms, seed):
    rng = np.random.default_rng(seed)
    herm = rng.normal(size=(norb, norb)) + 1j * rng.normal(size=(norb, norb))
    one = (herm + herm.conj().T) / 2
    terms = []
    for k in range(n_terms):
        sym = rng.normal(size=(norb, norb))
        u_mat = unitary_group.rvs(norb, random_state=rng)
        terms.append(((sym + sym.T) / 2, u_mat))
    return DoubleFactorizedHamiltonian(one, tuple(terms), constant=0.0)


def apply_df(ham, vec):
    out = apply_one_body(ham.one_body, vec)
    if ham.constant:
        out.matrix[...] += ham.constant * vec.matrix
    zero = np.zeros((ham.norb, ham.norb))
    for j_mat, u_mat in ham.terms:
        rotated = apply_orbital_rotation(vec, OrbitalRotationSpec(u_mat.conj().T))
        phased = apply_diagonal_coulomb_hamiltonian(
            DiagonalCoulombHamiltonian(zero, j_mat, j_mat, j_mat), rotated
        )
        back = apply_orbital_rotation(phased, OrbitalRotationSpec(u_mat))
        out.matrix[...] += back.matrix
    return out


class TestSimulateDiagCoulomb:
    shape = SectorShape(4, 2, 2)

    def exact(self, ham, vec, time):
        return exact_evolve(
            lambda v: apply_diagonal_coulomb_hamiltonian(ham, v), vec, time
        )

    def test_commuting_terms_exact(self):
        # diagonal one-body commutes with the interaction, so one step suffices
        ham = hubbard_like(4, 0.0, 2.0)
        ham = DiagonalCoulombHamiltonian(
            np.diag([0.3, -0.1, 0.7, 0.2]), ham.j_aa, ham.j_ab, ham.j_bb
        )
        vec = random_state(self.shape, seed=11)
        approx = simulate_trotter_diag_coulomb(vec, ham, 1.3, 1, 0)
        exact = self.exact(ham, vec, 1.3)
        np.testing.assert_allclose(approx.data, exact.data, atol=1e-12)

    def test_zero_time_identity(self):
        ham = hubbard_like(4, 1.0, 2.0)
        vec = random_state(self.shape, seed=3)
        out = simulate_trotter_diag_coulomb(vec, ham, 0.0, 2, 1)
        np.testing.assert_allclose(out.data, vec.data, atol=1e-12)

    @pytest.mark.parametrize(
        "order,lo,hi", [(0, 1.6, 2.6), (1, 3.2, 4.9)]
    )
    def test_error_scaling(self, order, lo, hi):
        ham = hubbard_like(4, 1.0, 2.0, j_same=0.3)
        vec = random_state(self.shape, seed=7)
        time = 1.0
        exact = self.exact(ham, vec, time)
        errs = [
            np.linalg.norm(
                simulate_trotter_diag_coulomb(vec, ham, time, r, order).data
                - exact.data
            )
            for r in (8, 16, 32)
        ]
        for a, b in zip(errs, errs[1:]):
            assert lo < a / b < hi

    def test_higher_order_wins(self):
        ham = hubbard_like(4, 1.0, 2.0)
        vec = random_state(self.shape, seed=5)
        exact = self.exact(ham, vec, 1.0)
        errs = {
            order: np.linalg.norm(
                simulate_trotter_diag_coulomb(vec, ham, 1.0, 8, order).data
                - exact.data
            )
            for order in (0, 1, 2)
        }
        assert errs[1] < errs[0]
        assert errs[2] < errs[1]

    def test_constant_becomes_global_phase(self):
        base = hubbard_like(4, 1.0, 2.0)
        shifted = hubbard_like(4, 1.0, 2.0, constant=0.7)
        vec = random_state(self.shape, seed=9)
        plain = simulate_trotter_diag_coulomb(vec, base, 0.8, 3, 1)
        with_c = simulate_trotter_diag_coulomb(vec, shifted, 0.8, 3, 1)
        assert np.array_equal(with_c.data, plain.data * np.exp(-1j * 0.7 * 0.8))

    def test_unit_norm(self):
        ham = hubbard_like(4, 1.0, 2.0, j_same=0.5, constant=1.1)
        vec = random_state(self.shape, seed=13)
        out = simulate_trotter_diag_coulomb(vec, ham, 2.0, 5, 1)
        assert abs(out.norm() - 1.0) < 1e-12

    def test_copy_semantics(self):
        ham = hubbard_like(4, 1.0, 2.0)
        vec = random_state(self.shape, seed=1)
        keep = vec.data.copy()
        out = simulate_trotter_diag_coulomb(vec, ham, 0.5, 2, 0)
        assert out is not vec and np.array_equal(vec.data, keep)
        out2 = simulate_trotter_diag_coulomb(vec, ham, 0.5, 2, 0, copy=False)
        assert out2 is vec and not np.array_equal(vec.data, keep)

    def test_validation(self):
        ham = hubbard_like(4, 1.0, 2.0)
        vec = random_state(self.shape, seed=1)
        with pytest.raises(ValueError):
            simulate_trotter_diag_coulomb(vec, ham, 1.0, 0, 0)
        small = random_state(SectorShape(3, 2, 1), seed=1)
        with pytest.raises(ValueError):
            simulate_trotter_diag_coulomb(small, ham, 1.0, 1, 0)


class TestSimulateDoubleFactorized:
    shape = SectorShape(3, 2, 1)

    def test_no_terms_is_exact_one_body(self):
        ham = random_df_hamiltonian(3, 0, seed=2)
        vec = random_state(self.shape, seed=2)
        out = simulate_trotter_double_factorized(vec, ham, 1.7, 3, 0)
        mat = oracles.one_body_sector_matrix(ham.one_body, ham.one_body, self.shape)
        expect = oracles.evolve_oracle(mat, vec.data, 1.7)
        np.testing.assert_allclose(out.data, expect, atol=1e-10)

    def test_identity_basis_matches_diag_coulomb(self):
        rng = np.random.default_rng(8)
        sym = rng.normal(size=(3, 3))
        j_mat = (sym + sym.T) / 2
        herm = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        one = (herm + herm.conj().T) / 2
        df = DoubleFactorizedHamiltonian(one, ((j_mat, np.eye(3)),))
        dc = DiagonalCoulombHamiltonian(one, j_mat, j_mat, j_mat)
        vec = random_state(self.shape, seed=8)
        a = simulate_trotter_double_factorized(vec, df, 0.9, 4, 1)
        b = simulate_trotter_diag_coulomb(vec, dc, 0.9, 4, 1)
        np.testing.assert_allclose(a.data, b.data, atol=1e-12)

    def test_error_scaling_order_one(self):
        ham = random_df_hamiltonian(3, 2, seed=21)
        vec = random_state(self.shape, seed=21)
        time = 1.0
        exact = exact_evolve(lambda v: apply_df(ham, v), vec, time)
        errs = [
            np.linalg.norm(
                simulate_trotter_double_factorized(vec, ham, time, r, 1).data
                - exact.data
            )
            for r in (8, 16)
        ]
        assert 3.2 < errs[0] / errs[1] < 4.9

    def test_rotation_fusion(self, monkeypatch):
        # one rotation per term boundary plus the closing one, never two in a row
        calls = []
        real = apply_orbital_rotation

        def counting(vec, spec, **kw):
            calls.append(1)
            return real(vec, spec, **kw)

        monkeypatch.setattr(trotter, "apply_orbital_rotation", counting)
        ham = random_df_hamiltonian(3, 2, seed=4)
        vec = random_state(self.shape, seed=4)
        simulate_trotter_double_factorized(vec, ham, 1.0, 1, 0)
        assert len(calls) == 4  # unfused would take 6 for three terms

    def test_unit_norm_and_constant(self):
        ham = random_df_hamiltonian(3, 2, seed=33)
        shifted = DoubleFactorizedHamiltonian(ham.one_body, ham.terms, constant=-0.4)
        vec = random_state(self.shape, seed=33)
        plain = simulate_trotter_double_factorized(vec, ham, 1.2, 2, 1)
        with_c = simulate_trotter_double_factorized(vec, shifted, 1.2, 2, 1)
        assert abs(plain.norm() - 1.0) < 1e-12
        assert np.array_equal(with_c.data, plain.data * np.exp(-1j * -0.4 * 1.2))

    def test_validation(self):
        ham = random_df_hamiltonian(3, 1, seed=1)
        vec = random_state(self.shape, seed=1)
        with pytest.raises(ValueError):
            simulate_trotter_double_factorized(vec, ham, 1.0, 0, 1)


class TestTrotterPlan:
    def test_fields(self):
        plan = TrotterPlan(order=1, n_steps=8, time=2.0, term_count=3)
        assert plan.n_steps == 8

    def test_validation(self):
        with pytest.raises(ValueError):
            TrotterPlan(order=-1, n_steps=1, time=1.0, term_count=1)
        with pytest.raises(ValueError):
            TrotterPlan(order=0, n_steps=0, time=1.0, term_count=1)
        with pytest.raises(ValueError):
            TrotterPlan(order=0, n_steps=1, time=1.0, term_count=0)
