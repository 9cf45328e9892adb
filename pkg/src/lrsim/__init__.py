"""lrsim: plan, verify, and cost out Lieb-Robinson block decompositions.

The library compiles a lattice Hamiltonian plus a time budget into a
schedule of overlapping forward/backward block evolutions, verifies the
schedule against exact desk-scale evolution, evaluates the analytic
Lieb-Robinson bounds and the empirical error fit, and prices the
qubitization/QSP simulation of each block.
"""

from .bounds import (
    BoundQuery,
    bound_commutator_aware,
    bound_strict_commutator_tail,
    bound_strict_local,
    solve_overlap,
)
from .chebyshev import ChebyshevExpansion, degree_for_accuracy, evaluate, expand
from .errorfit import ErrorSample, FitModel, FitResult, fit, solve_budget
from .errors import (
    BudgetInfeasibleError,
    DegenerateDataError,
    DimensionCapError,
    InvalidCutError,
    LrsimError,
    NonHermitianError,
    SchemaError,
)
from .estimate import ResourceReport, heisenberg_estimate
from .lattice import (
    BoundInputs,
    Lattice,
    LatticeHamiltonian,
    LocalTerm,
    TimeSlice,
    build_heisenberg_1d,
    extract_bound_inputs,
    hamiltonian_from_json_dict,
    hamiltonian_to_json_dict,
    rescale_hamiltonian,
    validate,
)
from .operators import (
    DenseUnitary,
    OperatorSum,
    PauliString,
    commutator_norm,
    materialize,
    matrix_exponential_hermitian,
    spectral_norm,
)
from .oracle import (
    EvolutionRequest,
    PauliCommutatorEvaluator,
    StaircaseErrorEvaluator,
    evolve,
    heisenberg_commutator_decay,
    heisenberg_staircase_sweep,
)
from .planner import (
    BlockStep,
    DecompositionPlan,
    apply_plan,
    isolate_strong_term,
    layers_for_coloring,
    plan_full_evolution,
    plan_hyperplane_nd,
    plan_merged_stacks,
    plan_recursive_1d,
    plan_ring_1d,
    plan_staircase_1d,
    plan_unmerged_stacks,
)
from .qsp import (
    JacobiAngerTruncation,
    PhaseSequence,
    Qubiterate,
    StandardFormEncoding,
    bessel_j_array,
    build_qubiterate,
    encode_lcu,
    encode_lcu_gadget,
    jacobi_anger,
    reflection_gadget,
    transfer_function,
)

__version__ = "0.1.0"
