"""Primal-dual bipartite matching: exact offline solvers with optimality
certificates, and online RANKING / Adwords simulators."""

from ._backend import BACKEND
from .certificates import (CertificateReport, Failure, check_max_weight_certificate,
                           check_min_perfect_certificate, check_unbounded_ray)
from .graph import (BipartiteInstance, ContractError, InstanceError, Potential, Side, Vertex,
                    augment, covering_matching_or_violator, delta, gamma, is_matching,
                    left, max_cardinality_matching, right, slack, tight_subgraph)
from .hungarian import (InfeasibleError, Problem, SearchFlag, hungarian_solve, path_search,
                        reduce_to_min_perfect, solve)
from .naive import find_epsilon, naive_solve, pd_adjust
from .online import (AdwordsInstance, OnlineInstance, OnlineRun, adwords_run, dual_fit,
                     expected_dual_feasibility_check, monte_carlo_ratio, ranking_run,
                     vertex_weighted_run)
from .oracle import EnumerationBudget, brute_optimum, enumerate_matchings

__version__ = "0.1.0"
