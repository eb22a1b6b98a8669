"""Operator algebra and Hamiltonian actions vs anticommutation oracles."""

import numpy as np
import pytest
import scipy.linalg

import oracles
from fermsim.gates import OrbitalRotationSpec, apply_orbital_rotation
from fermsim.operators import (
    ALPHA,
    BETA,
    DiagonalCoulombHamiltonian,
    DoubleFactorizedHamiltonian,
    FermionOperator,
    MolecularHamiltonian,
    OperatorError,
    apply_diagonal_coulomb_hamiltonian,
    apply_fermion_operator,
    apply_molecular_hamiltonian,
    apply_one_body,
    cre,
    des,
    df_from_molecular,
    df_reconstruct,
    double_factorize,
    exact_evolve,
    expectation,
    format_operator,
    molecular_as_fermion_operator,
    normal_order,
    parse_operator,
)
from fermsim.sector import SectorShape
from fermsim.states import configuration_state, hartree_fock, random_state, zero_state


def to_oracle_terms(op: FermionOperator, norb: int):
    """Translate symbolic terms into the oracle's (coeff, primitives) form."""
    out = []
    for term, coeff in op.terms.items():
        prims = tuple(
            (
                oracles.CREATE if action == "+" else oracles.ANNIHILATE,
                oracles.alpha_mode(orb, norb) if spin == ALPHA else oracles.beta_mode(orb, norb),
            )
            for action, spin, orb in term
        )
        out.append((coeff, prims))
    return out


def random_conserving_operator(norb: int, n_terms: int, seed: int) -> FermionOperator:
    rng = np.random.default_rng(seed)
    terms = {}
    while len(terms) < n_terms:
        prims = []
        for spin in (ALPHA, BETA):
            moves = rng.integers(0, 3)
            ops = [cre(spin, int(rng.integers(norb))) for _ in range(moves)]
            ops += [des(spin, int(rng.integers(norb))) for _ in range(moves)]
            rng.shuffle(ops)
            prims.extend(ops)
        rng.shuffle(prims)
        coeff = complex(rng.normal(), rng.normal())
        terms[tuple(prims)] = coeff
    return FermionOperator(terms)


def symmetrize_8fold(t: np.ndarray) -> np.ndarray:
    perms = [
        (0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
        (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0),
    ]
    return sum(t.transpose(p) for p in perms) / len(perms)


def random_molecular(norb: int, seed: int) -> MolecularHamiltonian:
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(norb, norb))
    two = symmetrize_8fold(rng.normal(size=(norb,) * 4))
    return MolecularHamiltonian((h + h.T) / 2, two, constant=rng.normal())


class TestFermionOperator:
    def test_construction_validation(self):
        with pytest.raises(OperatorError):
            FermionOperator({(("x", ALPHA, 0),): 1.0})
        with pytest.raises(OperatorError):
            FermionOperator({(("+", "gamma", 0),): 1.0})
        with pytest.raises(OperatorError):
            FermionOperator({(cre(ALPHA, -1),): 1.0})
        with pytest.raises(OperatorError):
            FermionOperator({(cre(ALPHA, 0),): float("nan")})

    def test_arithmetic(self):
        a = FermionOperator({(cre(ALPHA, 0), des(ALPHA, 1)): 2.0})
        b = FermionOperator({(cre(BETA, 0), des(BETA, 0)): 1.0})
        both = a + b
        assert len(both) == 2
        assert (2.5 * b).terms == {(cre(BETA, 0), des(BETA, 0)): 2.5}
        prod = a * b
        assert prod.terms == {
            (cre(ALPHA, 0), des(ALPHA, 1), cre(BETA, 0), des(BETA, 0)): 2.0
        }
        diff = both - b
        assert diff.prune().terms == a.terms

    def test_adjoint(self):
        op = FermionOperator({(cre(ALPHA, 0), des(ALPHA, 1)): 1 + 2j})
        assert op.adjoint().terms == {(cre(ALPHA, 1), des(ALPHA, 0)): 1 - 2j}

    def test_text_round_trip(self):
        op = random_conserving_operator(3, 8, seed=2) + FermionOperator({(): 0.5 + 0j})
        text = format_operator(op)
        assert parse_operator(text) == op
        assert "a+_" in text

    def test_parse_errors(self):
        with pytest.raises(OperatorError, match="line 1"):
            parse_operator("oops * a+_0(alpha)")
        with pytest.raises(OperatorError, match="line 2"):
            parse_operator("1.0 * a+_0(alpha) a_0(alpha)\n2.0 * a?_1(beta)")


class TestNormalOrder:
    def test_contraction_pair(self):
        op = FermionOperator({(des(ALPHA, 0), cre(ALPHA, 0)): 1.0})
        expected = FermionOperator(
            {(): 1.0, (cre(ALPHA, 0), des(ALPHA, 0)): -1.0}
        )
        assert normal_order(op) == expected

    def test_distinct_modes_anticommute(self):
        op = FermionOperator({(des(ALPHA, 0), cre(ALPHA, 1)): 1.0})
        assert normal_order(op) == FermionOperator(
            {(cre(ALPHA, 1), des(ALPHA, 0)): -1.0}
        )

    def test_repeated_operator_vanishes(self):
        op = FermionOperator({(cre(ALPHA, 1), cre(ALPHA, 1)): 3.0})
        assert normal_order(op) == FermionOperator({})

    def test_canonical_shape(self):
        op = random_conserving_operator(3, 20, seed=7)
        ordered = normal_order(op)
        for term in ordered.terms:
            actions = [p[0] for p in term]
            n_cre = actions.count("+")
            assert actions == ["+"] * n_cre + ["-"] * (len(actions) - n_cre)
            keys = [(0 if p[1] == ALPHA else 1, p[2]) for p in term]
            for block in (keys[:n_cre], keys[n_cre:]):
                assert block == sorted(block, reverse=True)
                assert len(set(block)) == len(block)

    def test_preserves_operator_matrix(self):
        norb = 3
        op = random_conserving_operator(norb, 20, seed=13)
        ordered = normal_order(op)
        before = oracles.fock_matrix(to_oracle_terms(op, norb), 2 * norb)
        after = oracles.fock_matrix(to_oracle_terms(ordered, norb), 2 * norb)
        assert np.max(np.abs(before - after)) < 1e-12

    def test_idempotent(self):
        op = random_conserving_operator(3, 15, seed=21)
        once = normal_order(op)
        assert normal_order(once) == once


class TestApplyFermionOperator:
    def test_identity_term(self):
        shape = SectorShape(3, 2, 1)
        vec = random_state(shape, 1)
        out = apply_fermion_operator(FermionOperator({(): 2.0}), vec)
        np.testing.assert_allclose(out.data, 2.0 * vec.data, atol=1e-15)

    def test_number_operator_eigenvalue(self):
        shape = SectorShape(3, 1, 1)
        vec = configuration_state(shape, [2], [0])
        n_2a = FermionOperator({(cre(ALPHA, 2), des(ALPHA, 2)): 1.0})
        n_1a = FermionOperator({(cre(ALPHA, 1), des(ALPHA, 1)): 1.0})
        np.testing.assert_array_equal(apply_fermion_operator(n_2a, vec).data, vec.data)
        assert np.all(apply_fermion_operator(n_1a, vec).data == 0)

    @pytest.mark.parametrize("seed", range(4))
    def test_against_dense_oracle(self, seed):
        shape = SectorShape(3, 2, 1)
        op = random_conserving_operator(3, 6, seed=seed)
        vec = random_state(shape, 40 + seed)
        out = apply_fermion_operator(op, vec)
        mat = oracles.sector_matrix(to_oracle_terms(op, 3), shape)
        np.testing.assert_allclose(out.data, mat @ vec.data, atol=1e-12)

    def test_cross_spin_sign(self):
        # One beta primitive pair between two alpha primitives picks up the
        # interleaving parity; the dense oracle fixes the expected sign.
        shape = SectorShape(2, 1, 1)
        term = (cre(ALPHA, 1), cre(BETA, 0), des(BETA, 0), des(ALPHA, 0))
        op = FermionOperator({term: 1.0})
        vec = random_state(shape, 50)
        out = apply_fermion_operator(op, vec)
        mat = oracles.sector_matrix(to_oracle_terms(op, 2), shape)
        np.testing.assert_allclose(out.data, mat @ vec.data, atol=1e-14)

    def test_linearity(self):
        shape = SectorShape(3, 1, 2)
        op = random_conserving_operator(3, 5, seed=60)
        u, v = random_state(shape, 61), random_state(shape, 62)
        mixed = zero_state(shape)
        mixed.matrix[:] = 0.3 * u.matrix - 1.7j * v.matrix
        lhs = apply_fermion_operator(op, mixed)
        rhs = 0.3 * apply_fermion_operator(op, u).data - 1.7j * apply_fermion_operator(op, v).data
        np.testing.assert_allclose(lhs.data, rhs, atol=1e-12)

    def test_rejects_nonconserving_term(self):
        op = FermionOperator({(cre(ALPHA, 0),): 1.0})
        with pytest.raises(OperatorError, match=r"a\+_0\(alpha\)"):
            apply_fermion_operator(op, random_state(SectorShape(2, 1, 1), 0))

    def test_rejects_spin_flip_term(self):
        op = FermionOperator({(cre(ALPHA, 0), des(BETA, 0)): 1.0})
        with pytest.raises(OperatorError):
            apply_fermion_operator(op, random_state(SectorShape(2, 1, 1), 0))


class TestApplyOneBody:
    def test_identity_counts_particles(self):
        shape = SectorShape(4, 3, 1)
        vec = random_state(shape, 70)
        out = apply_one_body(np.eye(4), vec)
        np.testing.assert_allclose(out.data, 4.0 * vec.data, atol=1e-13)

    def test_diagonal_scaling(self):
        shape = SectorShape(3, 2, 1)
        h = np.diag([1.0, 10.0, 100.0])
        vec = configuration_state(shape, [0, 2], [1])
        out = apply_one_body(h, vec)
        np.testing.assert_allclose(out.data, (1.0 + 100.0 + 10.0) * vec.data)

    @pytest.mark.parametrize(
        "shape",
        [SectorShape(4, 2, 1), SectorShape(3, 1, 2), SectorShape(4, 2, 2), SectorShape(3, 2, 0)],
        ids=str,
    )
    def test_against_oracle(self, shape):
        rng = np.random.default_rng(80)
        h = rng.normal(size=(shape.norb,) * 2) + 1j * rng.normal(size=(shape.norb,) * 2)
        vec = random_state(shape, 81)
        out = apply_one_body(h, vec)
        mat = oracles.one_body_sector_matrix(h, h, shape)
        np.testing.assert_allclose(out.data, mat @ vec.data, atol=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(OperatorError):
            apply_one_body(np.eye(3), random_state(SectorShape(4, 2, 1), 0))


class TestDiagonalCoulomb:
    def test_constant_only(self):
        shape = SectorShape(3, 1, 1)
        ham = DiagonalCoulombHamiltonian(
            np.zeros((3, 3)), np.zeros((3, 3)), np.zeros((3, 3)), np.zeros((3, 3)), 2.5
        )
        vec = random_state(shape, 90)
        out = apply_diagonal_coulomb_hamiltonian(ham, vec)
        np.testing.assert_allclose(out.data, 2.5 * vec.data, atol=1e-15)

    def test_hubbard_double_occupancy(self):
        u_int = 4.0
        ham = DiagonalCoulombHamiltonian(
            np.zeros((2, 2)), np.zeros((2, 2)), u_int * np.eye(2), np.zeros((2, 2))
        )
        shape = SectorShape(2, 1, 1)
        vec = random_state(shape, 91)
        out = apply_diagonal_coulomb_hamiltonian(ham, vec)
        # Configurations in flat order: both on site 0, opposite sites (x2),
        # both on site 1.
        weights = np.array([u_int, 0.0, 0.0, u_int])
        np.testing.assert_allclose(out.data, weights * vec.data, atol=1e-15)

    def test_against_oracle(self):
        shape = SectorShape(4, 2, 1)
        rng = np.random.default_rng(92)
        h = rng.normal(size=(4, 4))
        h = (h + h.T) / 2
        j_aa = rng.normal(size=(4, 4))
        j_aa = j_aa + j_aa.T
        j_bb = rng.normal(size=(4, 4))
        j_bb = j_bb + j_bb.T
        j_ab = rng.normal(size=(4, 4))
        ham = DiagonalCoulombHamiltonian(h, j_aa, j_ab, j_bb, constant=0.7)
        vec = random_state(shape, 93)
        out = apply_diagonal_coulomb_hamiltonian(ham, vec)
        mat = oracles.one_body_sector_matrix(h, h, shape)
        mat = mat + 0.5 * oracles.density_density_sector_matrix(j_aa, j_bb, j_ab, shape)
        mat = mat + 0.7 * np.eye(shape.dim)
        np.testing.assert_allclose(out.data, mat @ vec.data, atol=1e-12)

    def test_hermitian_pairing(self):
        shape = SectorShape(3, 2, 1)
        rng = np.random.default_rng(94)
        j = rng.normal(size=(3, 3))
        ham = DiagonalCoulombHamiltonian(
            np.diag([1.0, 2.0, 3.0]), j + j.T, rng.normal(size=(3, 3)), np.zeros((3, 3))
        )
        u, v = random_state(shape, 95), random_state(shape, 96)
        lhs = np.vdot(u.data, apply_diagonal_coulomb_hamiltonian(ham, v).data)
        rhs = np.vdot(v.data, apply_diagonal_coulomb_hamiltonian(ham, u).data)
        assert lhs == pytest.approx(np.conj(rhs), abs=1e-10)

    def test_rejects_asymmetric_j(self):
        bad = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(OperatorError):
            DiagonalCoulombHamiltonian(np.zeros((2, 2)), bad, bad, bad)


def expand_for_oracle(ham: MolecularHamiltonian, shape: SectorShape):
    """Independent dense matrix of the molecular Hamiltonian."""
    norb = ham.norb
    shifted = ham.one_body - 0.5 * np.einsum("prrq->pq", ham.two_body)
    terms = []
    for p in range(norb):
        for q in range(norb):
            for mode in (oracles.alpha_mode, oracles.beta_mode):
                terms.append(
                    (
                        shifted[p, q],
                        ((oracles.CREATE, mode(p, norb)), (oracles.ANNIHILATE, mode(q, norb))),
                    )
                )
    for p in range(norb):
        for q in range(norb):
            for r in range(norb):
                for s in range(norb):
                    if ham.two_body[p, q, r, s] == 0:
                        continue
                    for m1 in (oracles.alpha_mode, oracles.beta_mode):
                        for m2 in (oracles.alpha_mode, oracles.beta_mode):
                            terms.append(
                                (
                                    0.5 * ham.two_body[p, q, r, s],
                                    (
                                        (oracles.CREATE, m1(p, norb)),
                                        (oracles.ANNIHILATE, m1(q, norb)),
                                        (oracles.CREATE, m2(r, norb)),
                                        (oracles.ANNIHILATE, m2(s, norb)),
                                    ),
                                )
                            )
    return oracles.sector_matrix(terms, shape) + ham.constant * np.eye(shape.dim)


class TestMolecularHamiltonian:
    def test_zero_two_body_reduces_to_one_body(self):
        shape = SectorShape(4, 2, 1)
        rng = np.random.default_rng(100)
        h = rng.normal(size=(4, 4))
        ham = MolecularHamiltonian((h + h.T) / 2, np.zeros((4,) * 4), constant=1.5)
        vec = random_state(shape, 101)
        out = apply_molecular_hamiltonian(ham, vec)
        ref = apply_one_body(ham.one_body, vec)
        np.testing.assert_allclose(out.data, ref.data + 1.5 * vec.data, atol=1e-13)

    def test_diagonal_hamiltonian_eigenvector(self):
        norb = 3
        rng = np.random.default_rng(102)
        h = np.diag(rng.normal(size=norb))
        two = np.zeros((norb,) * 4)
        for p in range(norb):
            for q in range(norb):
                val = rng.normal()
                two[p, p, q, q] = val
                two[q, q, p, p] = val
        ham = MolecularHamiltonian(h, two)
        shape = SectorShape(3, 2, 1)
        vec = configuration_state(shape, [0, 2], [2])
        occ = np.array([1.0, 0.0, 1.0]) + np.array([0.0, 0.0, 1.0])
        shifted = np.diag(h) - 0.5 * np.einsum("prrp->p", two)
        energy = shifted @ occ + 0.5 * occ @ np.einsum("ppqq->pq", two) @ occ
        out = apply_molecular_hamiltonian(ham, vec)
        np.testing.assert_allclose(out.data, energy * vec.data, atol=1e-12)

    @pytest.mark.parametrize("shape", [SectorShape(3, 2, 1), SectorShape(4, 2, 2)], ids=str)
    def test_against_dense_oracle(self, shape):
        ham = random_molecular(shape.norb, seed=110)
        vec = random_state(shape, 111)
        out = apply_molecular_hamiltonian(ham, vec)
        mat = expand_for_oracle(ham, shape)
        np.testing.assert_allclose(out.data, mat @ vec.data, atol=1e-10)

    def test_matches_fermion_operator_expansion(self):
        shape = SectorShape(4, 2, 2)
        ham = random_molecular(4, seed=112)
        vec = random_state(shape, 113)
        fast = apply_molecular_hamiltonian(ham, vec)
        slow = apply_fermion_operator(molecular_as_fermion_operator(ham), vec)
        np.testing.assert_allclose(
            fast.data, slow.data + ham.constant * vec.data, atol=1e-10
        )

    def test_batched_contraction_matches_unbatched(self):
        shape = SectorShape(4, 2, 2)
        ham = random_molecular(4, seed=114)
        vec = random_state(shape, 115)
        small = apply_molecular_hamiltonian(ham, vec, memory_budget=1)
        big = apply_molecular_hamiltonian(ham, vec)
        np.testing.assert_allclose(small.data, big.data, atol=1e-13)

    def test_complex_two_body_falls_back(self):
        norb = 2
        rng = np.random.default_rng(116)
        t = rng.normal(size=(norb,) * 4) + 1j * rng.normal(size=(norb,) * 4)
        two = (t + np.conj(t.transpose(1, 0, 3, 2))) / 2
        h = rng.normal(size=(norb, norb))
        ham = MolecularHamiltonian((h + h.T) / 2, two)
        shape = SectorShape(2, 1, 1)
        vec = random_state(shape, 117)
        out = apply_molecular_hamiltonian(ham, vec)
        mat = expand_for_oracle(ham, shape)
        np.testing.assert_allclose(out.data, mat @ vec.data, atol=1e-12)

    def test_hermiticity_validation(self):
        with pytest.raises(OperatorError):
            MolecularHamiltonian(np.array([[0.0, 1.0], [0.0, 0.0]]), np.zeros((2,) * 4))


class TestExpectation:
    def test_identity(self):
        vec = random_state(SectorShape(3, 1, 1), 120)
        value = expectation(lambda v: v.copy(), vec)
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_hartree_fock_diagonal(self):
        shape = SectorShape(4, 2, 1)
        h = np.diag([0.5, 1.5, 7.0, 9.0])
        vec = hartree_fock(shape)
        value = expectation(lambda v: apply_one_body(h, v), vec)
        assert value == pytest.approx(0.5 + 1.5 + 0.5, abs=1e-12)

    def test_hermitian_expectation_is_real(self):
        shape = SectorShape(3, 2, 1)
        ham = random_molecular(3, seed=121)
        vec = random_state(shape, 122)
        value = expectation(lambda v: apply_molecular_hamiltonian(ham, v), vec)
        assert abs(value.imag) < 1e-10

    def test_zero_vector_rejected(self):
        with pytest.raises(OperatorError):
            expectation(lambda v: v, zero_state(SectorShape(2, 1, 1)))


class TestDoubleFactorize:
    def test_zero_tensor(self):
        assert double_factorize(np.zeros((3,) * 4)) == []

    def test_rank_one_inversion(self):
        rng = np.random.default_rng(130)
        g = rng.normal(size=(4, 4))
        g = g + g.T
        tensor = np.einsum("pq,rs->pqrs", g, g)
        factors = double_factorize(tensor)
        assert len(factors) == 1
        j_mat, u_mat = factors[0]
        np.testing.assert_allclose(j_mat, j_mat.T, atol=1e-12)
        np.testing.assert_allclose(
            u_mat.conj().T @ u_mat, np.eye(4), atol=1e-12
        )
        np.testing.assert_allclose(df_reconstruct(factors, 4), tensor, atol=1e-10)

    def test_random_tensor_reconstruction(self):
        rng = np.random.default_rng(131)
        tensor = symmetrize_8fold(rng.normal(size=(4,) * 4))
        factors = double_factorize(tensor)
        assert np.max(np.abs(df_reconstruct(factors, 4) - tensor)) < 1e-8

    def test_signed_eigenvalues_kept(self):
        rng = np.random.default_rng(132)
        g1 = rng.normal(size=(3, 3))
        g1 = g1 + g1.T
        g2 = rng.normal(size=(3, 3))
        g2 = g2 + g2.T
        tensor = np.einsum("pq,rs->pqrs", g1, g1) - np.einsum("pq,rs->pqrs", g2, g2)
        factors = double_factorize(tensor)
        np.testing.assert_allclose(df_reconstruct(factors, 3), tensor, atol=1e-8)

    def test_truncation_bounded_by_eigenvalue_tail(self):
        rng = np.random.default_rng(133)
        tensor = symmetrize_8fold(rng.normal(size=(3,) * 4))
        mat = tensor.reshape(9, 9)
        eigvals = np.linalg.eigvalsh((mat + mat.T) / 2)
        tail = np.sort(np.abs(eigvals))[:-2].sum()
        factors = double_factorize(tensor, max_terms=2)
        assert len(factors) == 2
        err = np.max(np.abs(df_reconstruct(factors, 3) - tensor))
        assert err <= tail + 1e-12

    def test_rejects_asymmetric(self):
        bad = np.zeros((2,) * 4)
        bad[0, 1, 0, 0] = 1.0
        with pytest.raises(OperatorError):
            double_factorize(bad)


def apply_df(ham: DoubleFactorizedHamiltonian, vec):
    """Action of the double-factorized form, term by term."""
    norb = ham.norb
    out = apply_one_body(ham.one_body, vec)
    out.matrix[...] += ham.constant * vec.matrix
    zero = np.zeros((norb, norb))
    for j_mat, u_mat in ham.terms:
        rotated = apply_orbital_rotation(vec, OrbitalRotationSpec(u_mat.conj().T))
        dd = apply_diagonal_coulomb_hamiltonian(
            DiagonalCoulombHamiltonian(zero, j_mat, j_mat, j_mat), rotated
        )
        back = apply_orbital_rotation(dd, OrbitalRotationSpec(u_mat))
        out.matrix[...] += back.matrix
    return out


class TestDfFromMolecular:
    def test_zero_two_body(self):
        h = np.diag([1.0, 2.0])
        ham = MolecularHamiltonian(h, np.zeros((2,) * 4), constant=0.3)
        df = df_from_molecular(ham)
        assert df.terms == ()
        np.testing.assert_allclose(df.one_body, h)
        assert df.constant == 0.3

    def test_operator_equivalence(self):
        shape = SectorShape(4, 2, 1)
        ham = random_molecular(4, seed=140)
        df = df_from_molecular(ham)
        rng = np.random.default_rng(141)
        for trial in range(20):
            vec = random_state(shape, rng)
            direct = expectation(lambda v: apply_molecular_hamiltonian(ham, v), vec)
            factored = expectation(lambda v: apply_df(df, v), vec)
            assert abs(direct - factored) < 1e-8

    def test_action_equivalence(self):
        shape = SectorShape(3, 2, 1)
        ham = random_molecular(3, seed=142)
        df = df_from_molecular(ham)
        vec = random_state(shape, 143)
        np.testing.assert_allclose(
            apply_df(df, vec).data,
            apply_molecular_hamiltonian(ham, vec).data,
            atol=1e-8,
        )


class TestExactEvolve:
    def test_zero_time(self):
        vec = random_state(SectorShape(3, 1, 1), 150)
        out = exact_evolve(lambda v: v, vec, 0.0)
        np.testing.assert_array_equal(out.data, vec.data)
        assert out.data is not vec.data

    def test_diagonal_hamiltonian_phases(self):
        shape = SectorShape(3, 2, 1)
        lam = np.array([0.3, -1.1, 2.2])
        ham = DiagonalCoulombHamiltonian(
            np.diag(lam), np.zeros((3, 3)), np.zeros((3, 3)), np.zeros((3, 3))
        )
        apply = lambda v: apply_diagonal_coulomb_hamiltonian(ham, v)
        vec = random_state(shape, 151)
        out = exact_evolve(apply, vec, 0.9)
        occ_energy = oracles.one_body_sector_matrix(np.diag(lam), np.diag(lam), shape)
        expected = np.exp(-0.9j * np.diag(occ_energy).real) * vec.data
        np.testing.assert_allclose(out.data, expected, atol=1e-12)

    @pytest.mark.parametrize("time", [1.0, -0.6])
    def test_against_expm_oracle(self, time):
        shape = SectorShape(4, 2, 2)
        ham = random_molecular(4, seed=152)
        apply = lambda v: apply_molecular_hamiltonian(ham, v)
        vec = random_state(shape, 153)
        out = exact_evolve(apply, vec, time)
        mat = expand_for_oracle(ham, shape)
        expected = scipy.linalg.expm(-1j * time * mat) @ vec.data
        np.testing.assert_allclose(out.data, expected, atol=1e-10)

    def test_long_time_with_restarts(self):
        shape = SectorShape(4, 2, 2)
        ham = random_molecular(4, seed=154)
        apply = lambda v: apply_molecular_hamiltonian(ham, v)
        vec = random_state(shape, 155)
        out = exact_evolve(apply, vec, 40.0)
        mat = expand_for_oracle(ham, shape)
        expected = scipy.linalg.expm(-40.0j * mat) @ vec.data
        np.testing.assert_allclose(out.data, expected, atol=1e-9)
        assert out.norm() == pytest.approx(1.0, abs=1e-11)

    def test_energy_conserved(self):
        shape = SectorShape(3, 2, 1)
        ham = random_molecular(3, seed=156)
        apply = lambda v: apply_molecular_hamiltonian(ham, v)
        vec = random_state(shape, 157)
        before = expectation(apply, vec)
        after = expectation(apply, exact_evolve(apply, vec, 3.7))
        assert abs(before - after) < 1e-11

    def test_zero_vector_rejected(self):
        with pytest.raises(OperatorError):
            exact_evolve(lambda v: v, zero_state(SectorShape(2, 1, 1)), 1.0)

    def test_bad_tol_rejected(self):
        with pytest.raises(OperatorError):
            exact_evolve(lambda v: v, random_state(SectorShape(2, 1, 1), 0), 1.0, tol=0.0)
