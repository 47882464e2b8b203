"""Threshold analysis for postselected quantum computation with concatenated
four-qubit error-detecting codes: syndrome-likelihood propagation through
noisy Clifford networks, encoded Bell-pair purification, block-wise
independent error-model fitting, and level recursion for logical gate errors,
decode errors, and threshold maps."""

from .backends import (
    BigFloatBackend,
    DoubleBackend,
    Poly,
    PolyBackend,
    RationalBackend,
    backend_from_spec,
)
from .error_models import (
    CosetErrorModel,
    GateErrorSet,
    LocationErrorModel,
    PauliWeights,
    PhysicalErrorParams,
    cnot_marginals,
    enumerate_cosets,
    likelihood_of,
    probability_of,
    uniform_physical_set,
    weights_from_marginals,
)
from .likelihood import (
    XPLUS,
    Z0,
    NoisyStabilizerState,
    StructuralProjectionError,
    ZeroAcceptanceError,
    add_qubit,
    apply_error_location,
    apply_gate,
    apply_pauli_likelihoods,
    canonicalize,
    empty_state,
    join_states,
    normalize,
    project_qubit,
    row_transform,
    total_mass,
)
from .symplectic import (
    GeneratorMatrix,
    PauliProduct,
    commutes,
    conjugate_by_gate,
    flip_pattern,
    multiply,
)

__version__ = "0.1.0"
