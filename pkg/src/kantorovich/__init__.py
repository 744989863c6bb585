"""Transportation metrics on finite and sampled measure spaces."""

from .assignment import Assignment, solve_assignment, strong_mk_empirical
from .dbar import (
    MarkovChain,
    conditional_future,
    dbar_criterion,
    epsilon_entropy,
    hamming_cost,
    secondary_entropy_curve,
)
from .errors import (
    DegenerateClassError,
    DimensionError,
    DomainError,
    InputError,
    ResourceError,
    UnsupportedPairError,
)
from .krnorm import kr_norm, lipschitz_dual
from .line import LineDistribution, k1_line, quantile_map
from .matrixdist import (
    ConvergenceReport,
    MatrixSample,
    k_n_estimate,
    line_triple,
    run_convergence,
    sample_matrix,
    shifted_matrix,
)
from .measures import (
    CostSpace,
    DualPotential,
    FiniteDistribution,
    SampledTriple,
    SignedMeasure,
    TransportPlan,
    empirical_distribution,
    jordan_decompose,
    validate_metric,
)
from .tower import (
    LevelMetricSpace,
    PartitionTree,
    barycenter_project,
    quotient_step,
    tower_statistic,
)
from .transport import TransportSolution, duality_gap, solve_kp, solve_mk, verify_optimal
