"""Exact partition functions of decorated graphs, their interpolation
polynomials, truncated log-series and pseudo-marginals."""
from .errors import (
    BudgetExceeded,
    ConfigError,
    ConflictingAssignment,
    GibbsUndefined,
    InfeasibleCondition,
    VanishingConstantTerm,
    ZeroFreeError,
)
from .exact import conditional_marginal, marginal, marginal_table, partition_exact, rho_R, weight
from .graph_core import (
    ColorAssignment,
    DecoratedGraph,
    Graph,
    ball,
    boundary,
    disjoint_union,
    reduce,
)
from .models import (
    ModelSpec,
    build_hardcore,
    build_ising,
    build_list_coloring,
    build_proper_coloring,
    build_test_graph,
    hardcore_threshold,
)
from .poly import (
    InterpolationKind,
    RationalPolynomial,
    evaluate,
    i_k_counts,
    interpolation_polynomial,
    type1_polynomial,
    type2_polynomial,
)
from .pseudo import (
    PseudoMarginal,
    conditional_pseudo_marginal,
    interpolation_accuracy,
    pseudo_marginal,
    ssm_scan,
    theorem1_check,
)
from .subgraphs import (
    PatternGraph,
    beta_table_type1,
    connected_induced_subgraphs,
    ind_count,
    ind_product_decompose,
    ind_sum_additivity_check,
)
from .taylor import power_sums_girard, power_sums_newton, taylor_truncation

__version__ = "0.1.0"
