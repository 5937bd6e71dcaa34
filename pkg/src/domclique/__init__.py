"""Dominating cliques in G(n, p) random graphs.

Exact counting on sampled graphs, closed-form evaluators, exhaustive
small-n oracles and a deterministic Monte Carlo harness.
"""

from .analytic import (
    P_STAR,
    AnalyticContext,
    OffsetKind,
    PhaseClass,
    PhaseKind,
    Side,
    alpha,
    classify_phase,
    critical_r,
    epsilon_hat,
    expected_dominating_cliques,
    expected_dominating_cliques_log,
    expected_maximal_cliques,
    expected_maximal_cliques_log,
    q_factor,
    r0,
    r1,
    r_from_rho,
    ratio_analytic,
    ratio_finite,
    ratio_offset_asymptote,
    s_sum,
    second_moment_upper_log,
)
from .errors import CapacityError, DomainError, UndefinedEstimateError
from .exact import (
    CliqueCounts,
    clique_number,
    count_dominating_r_cliques,
    count_maximal_r_cliques,
    enumerate_maximal_cliques,
    exhaustive_expectation_Xr,
    exhaustive_expectation_Yr,
    exhaustive_second_moment_Xr,
    is_dominating,
    is_maximal_clique,
)
from .graph import Graph, GnpParams, NodeSet, all_graphs, graph_probability_log, sample_gnp
from .montecarlo import (
    EstimateWithCI,
    TrialAggregate,
    concentration_check,
    estimate_existence_probability,
    estimate_mean_ratio,
    run_trials,
)

__version__ = "0.1.0"
