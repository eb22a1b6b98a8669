"""Scripting surface over the fermsim library.

Every function here is a mechanical projection of a fermsim operation onto
native types: matrices arrive as nested sequences or buffer-protocol arrays,
states travel as `BoundStateVector` handles, samples come back as plain
integer tuples.  No numerics happen in this layer, so outputs are bitwise
identical to direct fermsim calls on the same inputs.

State handles are immutable from this surface: operations return new
handles and never write through an input.  The underlying kernels release
the GIL while they run; a handle itself must not be shared across threads
without external locking.

Errors raised by fermsim propagate unchanged; the exception types are
re-exported here so callers need only this package.
"""

import numpy as np

import fermsim
from fermsim import (
    FcidumpError,
    GateError,
    OperatorError,
    SamplingError,
    SectorError,
    StateFormatError,
)

__version__ = fermsim.__version__

__all__ = [
    "BoundStateVector",
    "FcidumpError",
    "GateError",
    "OperatorError",
    "SamplingError",
    "SectorError",
    "StateFormatError",
    "apply_diag_coulomb",
    "apply_diagonal_coulomb_hamiltonian",
    "apply_fermion_operator",
    "apply_givens",
    "apply_molecular_hamiltonian",
    "apply_num_op_sum",
    "apply_one_body",
    "apply_orbital_rotation",
    "apply_quad_ham",
    "build_hubbard",
    "exact_evolve_diag_coulomb",
    "exact_evolve_molecular",
    "expectation_diag_coulomb",
    "expectation_fermion_operator",
    "expectation_molecular",
    "from_buffer",
    "hartree_fock",
    "hubbard_filling_sector",
    "load_fcidump",
    "random_state",
    "sample_slater",
    "sample_state_vector",
    "sector_dimension",
    "simulate_trotter_diag_coulomb",
    "simulate_trotter_double_factorized",
    "slater_probability",
    "trotter_error_table",
]


def _shape(norb, nelec):
    nalpha, nbeta = nelec
    return fermsim.SectorShape(int(norb), int(nalpha), int(nbeta))


def _matrix(value):
    return np.asarray(value)


class BoundStateVector:
    """Handle owning a sector state; read access is a zero-copy view."""

    __slots__ = ("_vec", "_view")

    def __init__(self, vec):
        if not isinstance(vec, fermsim.StateVector):
            raise SectorError("BoundStateVector wraps a fermsim StateVector")
        self._vec = vec
        view = vec.data.view()
        view.flags.writeable = False
        self._view = view

    @property
    def norb(self):
        return self._vec.shape.norb

    @property
    def nelec(self):
        return self._vec.shape.nelec

    @property
    def dims(self):
        return self._vec.shape.dims

    @property
    def view(self):
        """Read-only complex128 buffer over the live amplitudes; no copy."""
        return self._view

    def copy(self):
        return BoundStateVector(self._vec.copy())

    def norm(self):
        return self._vec.norm()


def sector_dimension(norb, nelec):
    return fermsim.sector_dimension(_shape(norb, nelec))


def hartree_fock(norb, nelec):
    return BoundStateVector(fermsim.hartree_fock(_shape(norb, nelec)))


def random_state(norb, nelec, seed=None):
    return BoundStateVector(fermsim.random_state(_shape(norb, nelec), seed))


def from_buffer(norb, nelec, buffer):
    """Copy caller amplitudes into a fresh state; length must match the sector."""
    data = np.array(buffer, dtype=np.complex128, copy=True).reshape(-1)
    return BoundStateVector(fermsim.StateVector(_shape(norb, nelec), data))


def apply_num_op_sum(state, lambda_alpha, lambda_beta, time):
    gate = fermsim.NumOpSumGate(_matrix(lambda_alpha), _matrix(lambda_beta), time)
    return BoundStateVector(fermsim.apply_num_op_sum_evolution(state._vec, gate))


def apply_diag_coulomb(state, j_aa, j_bb, j_ab, time):
    gate = fermsim.DiagCoulombGate(_matrix(j_aa), _matrix(j_bb), _matrix(j_ab), time)
    return BoundStateVector(fermsim.apply_diag_coulomb_evolution(state._vec, gate))


def apply_givens(state, c, s, p, q, spin="alpha"):
    rot = fermsim.GivensRotation(c, s, int(p), int(q), spin)
    return BoundStateVector(fermsim.apply_givens_rotation(state._vec, rot))


def apply_orbital_rotation(state, u_alpha, u_beta=None):
    spec = fermsim.OrbitalRotationSpec(
        _matrix(u_alpha), None if u_beta is None else _matrix(u_beta)
    )
    return BoundStateVector(fermsim.apply_orbital_rotation(state._vec, spec))


def apply_quad_ham(state, m_alpha, time, m_beta=None):
    gate = fermsim.QuadraticHamiltonianGate(
        _matrix(m_alpha), None if m_beta is None else _matrix(m_beta), time=time
    )
    return BoundStateVector(fermsim.apply_quad_ham_evolution(state._vec, gate))


def apply_one_body(state, h):
    return BoundStateVector(fermsim.apply_one_body(_matrix(h), state._vec))


def _diag_coulomb_hamiltonian(one_body, j_aa, j_ab, j_bb, constant):
    return fermsim.DiagonalCoulombHamiltonian(
        _matrix(one_body), _matrix(j_aa), _matrix(j_ab), _matrix(j_bb), constant
    )


def _molecular_hamiltonian(one_body, two_body, constant):
    return fermsim.MolecularHamiltonian(_matrix(one_body), _matrix(two_body), constant)


def apply_diagonal_coulomb_hamiltonian(state, one_body, j_aa, j_ab, j_bb, constant=0.0):
    ham = _diag_coulomb_hamiltonian(one_body, j_aa, j_ab, j_bb, constant)
    return BoundStateVector(fermsim.apply_diagonal_coulomb_hamiltonian(ham, state._vec))


def apply_molecular_hamiltonian(state, one_body, two_body, constant=0.0):
    ham = _molecular_hamiltonian(one_body, two_body, constant)
    return BoundStateVector(fermsim.apply_molecular_hamiltonian(ham, state._vec))


def apply_fermion_operator(state, text):
    """Apply an operator written in the fermsim text grammar."""
    op = fermsim.parse_operator(text)
    return BoundStateVector(fermsim.apply_fermion_operator(op, state._vec))


def expectation_diag_coulomb(state, one_body, j_aa, j_ab, j_bb, constant=0.0):
    ham = _diag_coulomb_hamiltonian(one_body, j_aa, j_ab, j_bb, constant)
    return fermsim.expectation(
        lambda v: fermsim.apply_diagonal_coulomb_hamiltonian(ham, v), state._vec
    )


def expectation_molecular(state, one_body, two_body, constant=0.0):
    ham = _molecular_hamiltonian(one_body, two_body, constant)
    return fermsim.expectation(
        lambda v: fermsim.apply_molecular_hamiltonian(ham, v), state._vec
    )


def expectation_fermion_operator(state, text):
    op = fermsim.parse_operator(text)
    return fermsim.expectation(
        lambda v: fermsim.apply_fermion_operator(op, v), state._vec
    )


def exact_evolve_diag_coulomb(state, one_body, j_aa, j_ab, j_bb, constant, time):
    ham = _diag_coulomb_hamiltonian(one_body, j_aa, j_ab, j_bb, constant)
    evolved = fermsim.exact_evolve(
        lambda v: fermsim.apply_diagonal_coulomb_hamiltonian(ham, v), state._vec, time
    )
    return BoundStateVector(evolved)


def exact_evolve_molecular(state, one_body, two_body, constant, time):
    ham = _molecular_hamiltonian(one_body, two_body, constant)
    evolved = fermsim.exact_evolve(
        lambda v: fermsim.apply_molecular_hamiltonian(ham, v), state._vec, time
    )
    return BoundStateVector(evolved)


def simulate_trotter_diag_coulomb(
    state, one_body, j_aa, j_ab, j_bb, constant, time, n_steps, order=0
):
    ham = _diag_coulomb_hamiltonian(one_body, j_aa, j_ab, j_bb, constant)
    out = fermsim.simulate_trotter_diag_coulomb(
        state._vec, ham, time, n_steps, order
    )
    return BoundStateVector(out)


def simulate_trotter_double_factorized(
    state, one_body, terms, constant, time, n_steps, order=0
):
    ham = fermsim.DoubleFactorizedHamiltonian(
        _matrix(one_body),
        tuple((_matrix(j), _matrix(u)) for j, u in terms),
        constant,
    )
    out = fermsim.simulate_trotter_double_factorized(
        state._vec, ham, time, n_steps, order
    )
    return BoundStateVector(out)


def sample_state_vector(state, shots, seed):
    samples = fermsim.sample_state_vector(state._vec, shots, seed)
    return [(int(a), int(b)) for a, b in samples]


def _slater_spec(norb, reference, u_alpha, u_beta):
    rotation = fermsim.OrbitalRotationSpec(
        _matrix(u_alpha), None if u_beta is None else _matrix(u_beta)
    )
    ref_a, ref_b = reference
    return fermsim.SlaterSpec(int(norb), (tuple(ref_a), tuple(ref_b)), rotation)


def sample_slater(norb, reference, u_alpha, shots, seed, u_beta=None):
    spec = _slater_spec(norb, reference, u_alpha, u_beta)
    samples = fermsim.sample_slater(spec, shots, seed)
    return [(int(a), int(b)) for a, b in samples]


def slater_probability(norb, reference, u_alpha, config, u_beta=None):
    spec = _slater_spec(norb, reference, u_alpha, u_beta)
    return fermsim.slater_probability(spec, config)


def load_fcidump(path):
    """Parse an FCIDUMP file into plain arrays and counts."""
    result = fermsim.parse_fcidump(path)
    ham = result.hamiltonian
    return {
        "norb": ham.norb,
        "one_body": ham.one_body,
        "two_body": ham.two_body,
        "constant": ham.constant,
        "nelec": result.nelec,
        "ms2": result.ms2,
        "nalpha": result.nalpha,
        "nbeta": result.nbeta,
    }


def build_hubbard(nx, ny, t_hop=1.0, u_int=8.0, periodic_x=False):
    """Hubbard-lattice Hamiltonian pieces as plain arrays."""
    ham = fermsim.build_hubbard(
        fermsim.HubbardSpec(int(nx), int(ny), t_hop, u_int, periodic_x)
    )
    return {
        "one_body": ham.one_body,
        "j_aa": ham.j_aa,
        "j_ab": ham.j_ab,
        "j_bb": ham.j_bb,
        "constant": ham.constant,
    }


def hubbard_filling_sector(nx, ny, filling, t_hop=1.0, u_int=8.0, periodic_x=False):
    shape = fermsim.hubbard_sector(
        fermsim.HubbardSpec(int(nx), int(ny), t_hop, u_int, periodic_x), filling
    )
    return shape.norb, shape.nelec


def trotter_error_table(
    norb,
    nelec,
    one_body,
    j_aa,
    j_ab,
    j_bb,
    constant,
    time,
    orders,
    steps,
    n_vectors,
    seed,
    workers=1,
):
    """Trotter-error measurement records as plain dicts."""
    ham = _diag_coulomb_hamiltonian(one_body, j_aa, j_ab, j_bb, constant)
    records = fermsim.trotter_error_experiment(
        ham,
        _shape(norb, nelec),
        time,
        list(orders),
        list(steps),
        n_vectors,
        seed,
        workers=workers,
    )
    return [
        {
            "order": r.order,
            "n_steps": r.n_steps,
            "gate_count": r.gate_count,
            "mean_error": r.mean_error,
            "std_error": r.std_error,
        }
        for r in records
    ]
