"""Non-monotone weakly DR-submodular maximization over down-closed bodies.

The package couples a measured continuous greedy guided by Frank-Wolfe
local search with a gamma-aware double greedy, drives them through a
recursive best-of search, and ships the guarantee engine that computes
the optimized approximation curve the combination certifies.
"""

__version__ = "0.1.0"

from .bodies import Box, Halfspace, Knapsack, Polytope, diameter, is_feasible, lp_maximize
from .double_greedy import DoubleGreedyTrace, box_maximize, double_greedy, unbalanced_bound
from .driver import RunBudget, SolveReport, certified_value_bound, solve
from .fwg import FwgConfig, FwgOutput, GuessTriple, guess_triples, run_fwg
from .guarantee import PhiResult, baseline_kappa, emit_curve, optimize_phi
from .lattice import Point, hadamard, join, meet, ones, prob_sum, zeros
from .local_search import LocalMaxResult, fw_local_max, lattice_bound_check
from .objectives import (
    ConstantObjective,
    Objective,
    QuadraticObjective,
    SeparableExponential,
    estimate_gamma,
    estimate_gamma_report,
)

__all__ = [
    "Box",
    "ConstantObjective",
    "DoubleGreedyTrace",
    "FwgConfig",
    "FwgOutput",
    "GuessTriple",
    "Halfspace",
    "Knapsack",
    "LocalMaxResult",
    "Objective",
    "PhiResult",
    "Point",
    "Polytope",
    "QuadraticObjective",
    "RunBudget",
    "SeparableExponential",
    "SolveReport",
    "baseline_kappa",
    "box_maximize",
    "certified_value_bound",
    "diameter",
    "double_greedy",
    "emit_curve",
    "estimate_gamma",
    "estimate_gamma_report",
    "fw_local_max",
    "guess_triples",
    "hadamard",
    "is_feasible",
    "join",
    "lattice_bound_check",
    "lp_maximize",
    "meet",
    "ones",
    "optimize_phi",
    "prob_sum",
    "run_fwg",
    "solve",
    "unbalanced_bound",
    "zeros",
]
