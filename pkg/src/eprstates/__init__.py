"""Structure analysis of EPR correlations in bipartite quantum systems.

The package builds on one correspondence: a pure state of a composite
system determines a conjugate-linear Hilbert-Schmidt map from the second
factor into the first, and the spectral structure of the associated
positive operator decides exactly which second-factor observables the
state predicts with certainty.
"""

from .analysis import (
    AntiunitaryImbedding,
    EprAnalyzer,
    EprReport,
    SchmidtDecomposition,
    bijection_check,
    commutant_dimension,
    commutant_is_scalar,
    construct_epr_state,
    epr_algebra_contains,
    imbedded_conjugate,
    is_epr,
    predictive_map,
    schmidt_decompose,
)
from .continuum import (
    GridEmbedding,
    TestFunction,
    cell_pairing,
    convergence_sweep,
    limit_target,
    named_test_function,
    renormalized_pairing,
)
from .groups import (
    FiniteAbelianGroup,
    bohm_state,
    character_matrix,
    epr_symmetry_table,
    momentum_observable,
    position_observable,
    spin_observables,
    spin_system_state,
    verify_star_identity,
)
from .linalg import DEFAULT_TOL, Tolerances, cluster_eigenvalues, commutator_norm, hermitian_eig
from .measurement import (
    ConditionalFamily,
    DiscreteJointDistribution,
    conditional_family,
    corollary2_check,
    epr_correlation_test,
    graph_concentration_check,
    joint_distribution,
    observable_distribution,
    off_diagonal_mass,
    total_variation,
)
from .states import (
    ConjugateLinearMap,
    HilbertSpace,
    Observable,
    PureState,
    adjoint,
    apply_conjugate_linear,
    canonical_map,
    gram,
    gram_matrix,
    inner,
    inverse_canonical,
    maximal_state,
    product_state,
    singlet_state,
    state_norm_identity,
)

__version__ = "0.1.0"
