"""Indices of departure from stochastic order.

Given two univariate distributions F and G, the package computes how
far the pair is from the pointwise quantile ordering F <= G: the
measure gamma of the set where F's quantile exceeds G's, the
exceedance probability rho = P(X > Y), the one-sided sup distance pi
between the CDFs, its complement vartheta, and the signed-area share
epsilon.  On top of the indices it provides plug-in estimation from
samples, an exact rank-order test, bootstrap standard errors and
confidence bounds, a threshold test for gamma, and Monte Carlo tools
(Brownian-bridge occupation experiments, limit-law sampling) for
checking the asymptotic theory.
"""
from .bridge import (BridgePath, SubsetSpec, bridge_path,
                     make_gamma_set_pair, nonconsistency_demo,
                     occupation_positive)
from .distributions import (Distribution, Empirical, EmpiricalDistribution,
                            NoncentralT1, Normal, NormalMixture, cdf_eval,
                            density_eval, from_descriptor, quantile_eval,
                            sample)
from .errors import (DataError, DomainError, NumericError, ParameterError,
                     StochordError)
from .indices import (GridSpec, IndexReport, epsilon_index, gamma_index,
                      index_report, optimal_copula_eval, pi_index,
                      rearranged_quantile, rho_index, vartheta_index)
from .inference import (CrossingSpec, GaltonResult, TestResult, bootstrap_sd,
                        find_crossings, galton_test, gamma_limit_variance,
                        gamma_plugin, gamma_threshold_test, pi_limit_sample,
                        pi_plugin, rho_plugin)
from .rng import SeedSpec, as_seed
from .simharness import (ExperimentResult, Scenario,
                         asymptotic_law_experiment, builtin_scenarios,
                         run_table, run_table1_cell, verify_nominal_gamma)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # distributions
    "Distribution", "Normal", "NoncentralT1", "NormalMixture",
    "EmpiricalDistribution", "Empirical", "from_descriptor",
    "cdf_eval", "quantile_eval", "density_eval", "sample",
    # indices
    "GridSpec", "IndexReport", "gamma_index", "rho_index", "pi_index",
    "vartheta_index", "epsilon_index", "index_report",
    "rearranged_quantile", "optimal_copula_eval",
    # inference
    "GaltonResult", "galton_test", "gamma_plugin", "rho_plugin",
    "pi_plugin", "bootstrap_sd", "TestResult", "gamma_threshold_test",
    "CrossingSpec", "gamma_limit_variance", "find_crossings",
    "pi_limit_sample",
    # bridge
    "BridgePath", "bridge_path", "SubsetSpec", "occupation_positive",
    "make_gamma_set_pair", "nonconsistency_demo",
    # simulation harness
    "Scenario", "builtin_scenarios", "verify_nominal_gamma",
    "ExperimentResult", "run_table1_cell", "run_table",
    "asymptotic_law_experiment",
    # rng / errors
    "SeedSpec", "as_seed",
    "StochordError", "ParameterError", "DomainError", "DataError",
    "NumericError",
]
