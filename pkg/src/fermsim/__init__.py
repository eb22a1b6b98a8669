"""Exact state-vector simulation of fermionic circuits in a symmetry sector.

The simulation space is the set of determinants with fixed per-spin particle
numbers; states are dense complex vectors over that sector and every gate or
operator acts directly on them.  Numerical hot loops live in a compiled
extension with a pure-numpy fallback; ``backend_name`` reports which one is
active.
"""

from .config import get_num_threads, requested_backend, set_num_threads
from .experiments import (
    ExperimentError,
    KrylovConfig,
    TrotterErrorRecord,
    krylov_diagonalize,
    trotter_error_experiment,
)
from .fcidump import FcidumpError, FcidumpResult, parse_fcidump, write_fcidump
from .gatecount import (
    GateCountError,
    count_two_qubit_gates,
    diag_coulomb_op,
    orbital_rotation_op,
    slater_prep_op,
    trotter_plan_operations,
)
from .gates import (
    DiagCoulombGate,
    GateError,
    GivensRotation,
    NumOpSumGate,
    OrbitalRotationSpec,
    QuadraticHamiltonianGate,
    apply_diag_coulomb_evolution,
    apply_givens_rotation,
    apply_num_op_sum_evolution,
    apply_orbital_rotation,
    apply_quad_ham_evolution,
    exp_quadratic,
    givens_decompose,
    rotation_matrix,
)
from .hubbard import HubbardSpec, build_hubbard, hubbard_edges, hubbard_sector
from .kernels import backend_name
from .operators import (
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
from .sampling import (
    SamplingError,
    SlaterSpec,
    sample_slater,
    sample_state_vector,
    slater_probability,
)
from .sector import (
    SectorError,
    SectorShape,
    format_string,
    rank_string,
    sector_dimension,
    string_to_orbitals,
    unrank_string,
)
from .states import (
    StateFormatError,
    StateVector,
    configuration_state,
    flat_to_strings,
    hartree_fock,
    load_statevector,
    random_state,
    save_statevector,
    zero_state,
)
from .trotter import (
    TrotterPlan,
    merge_sequence,
    simulate_trotter_diag_coulomb,
    simulate_trotter_double_factorized,
    suzuki_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "DiagCoulombGate",
    "DiagonalCoulombHamiltonian",
    "DoubleFactorizedHamiltonian",
    "ExperimentError",
    "FcidumpError",
    "FcidumpResult",
    "FermionOperator",
    "GateCountError",
    "GateError",
    "GivensRotation",
    "HubbardSpec",
    "KrylovConfig",
    "MolecularHamiltonian",
    "NumOpSumGate",
    "OperatorError",
    "OrbitalRotationSpec",
    "QuadraticHamiltonianGate",
    "SamplingError",
    "SectorError",
    "SectorShape",
    "SlaterSpec",
    "StateFormatError",
    "StateVector",
    "TrotterErrorRecord",
    "TrotterPlan",
    "apply_diag_coulomb_evolution",
    "apply_diagonal_coulomb_hamiltonian",
    "apply_fermion_operator",
    "apply_givens_rotation",
    "apply_molecular_hamiltonian",
    "apply_num_op_sum_evolution",
    "apply_one_body",
    "apply_orbital_rotation",
    "apply_quad_ham_evolution",
    "backend_name",
    "build_hubbard",
    "configuration_state",
    "count_two_qubit_gates",
    "cre",
    "des",
    "df_from_molecular",
    "df_reconstruct",
    "diag_coulomb_op",
    "double_factorize",
    "exact_evolve",
    "exp_quadratic",
    "expectation",
    "flat_to_strings",
    "format_operator",
    "format_string",
    "get_num_threads",
    "givens_decompose",
    "hartree_fock",
    "hubbard_edges",
    "hubbard_sector",
    "krylov_diagonalize",
    "load_statevector",
    "merge_sequence",
    "molecular_as_fermion_operator",
    "normal_order",
    "orbital_rotation_op",
    "parse_fcidump",
    "parse_operator",
    "random_state",
    "rank_string",
    "requested_backend",
    "rotation_matrix",
    "sample_slater",
    "sample_state_vector",
    "save_statevector",
    "sector_dimension",
    "set_num_threads",
    "simulate_trotter_diag_coulomb",
    "simulate_trotter_double_factorized",
    "slater_prep_op",
    "slater_probability",
    "string_to_orbitals",
    "suzuki_sequence",
    "trotter_error_experiment",
    "trotter_plan_operations",
    "unrank_string",
    "write_fcidump",
    "zero_state",
]
