"""Recursive best-of driver combining the solver components.

Each recursion node receives a seed vector, runs a box-restricted
double-greedy improvement of the seed and a full sweep of measured
continuous-greedy runs (one per surrogate triple, keeping the best
output), then recurses on every direction vector that best run emitted.
The returned point is the feasible candidate of largest objective value
encountered anywhere in the tree.  A call budget caps the fan-out and a
partial flag records when it truncated the recursion.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Optional

from .bodies import AnyBody
from .double_greedy import box_maximize
from .errors import InternalInvariantError, ParameterError
from .fwg import FwgConfig, FwgOutput, GuessTriple, guess_triples, run_fwg
from .lattice import Point, as_array, zeros
from .local_search import fw_local_max
from .objectives import Objective

FEAS_CHECK_TOL = 1e-7
SURROGATE_ESTIMATE_FACTOR = 0.2  # assumed quality of the optimum-value estimate

BRANCH_SEED = "seed"
BRANCH_BOXMAX = "boxmax"
BRANCH_FWG = "fwg_y"
BRANCH_CHILD = "recursive_child"


@dataclass
class RunBudget:
    """Recursion limits; ``max_levels=None`` uses 1 + ceil((1+g)/(eps*g))."""

    max_levels: Optional[int] = None
    max_calls: int = 100_000
    calls_used: int = 0

    def levels(self, gamma: float, epsilon: float) -> int:
        if self.max_levels is not None:
            if self.max_levels < 1:
                raise ParameterError("max_levels must be >= 1")
            return self.max_levels
        return 1 + math.ceil((1.0 + gamma) / (epsilon * gamma))


@dataclass(frozen=True)
class HeirRecord:
    level: int
    seed_hash: str
    q_empty_at: Optional[int]


@dataclass(frozen=True)
class SolveReport:
    best: Point
    best_value: float
    branch: str
    levels_expanded: int
    calls_used: int
    heir_trace: tuple[HeirRecord, ...]
    partial: bool
    seed: int


def _point_hash(x) -> str:
    payload = ",".join(format(float(v), ".17g") for v in as_array(x))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class _Candidate:
    point: Point
    value: float
    branch: str


class _Search:
    def __init__(self, f: Objective, body: AnyBody, cfg: FwgConfig, budget: RunBudget):
        self.f = f
        self.body = body
        self.cfg = cfg
        self.budget = budget
        self.levels = budget.levels(cfg.gamma, cfg.epsilon)
        self.partial = False
        self.levels_expanded = 0
        self.trace: list[HeirRecord] = []

    def _checked(self, point: Point, value: float, branch: str) -> _Candidate:
        if not self.body.is_feasible(point, FEAS_CHECK_TOL):
            raise InternalInvariantError(f"candidate from branch {branch!r} is infeasible")
        return _Candidate(point, value, branch)

    def _best_fwg(self, z: Point, value_estimate: float) -> FwgOutput:
        triples = guess_triples(
            value_estimate, SURROGATE_ESTIMATE_FACTOR, self.cfg.gamma, self.cfg.epsilon
        )
        best: Optional[FwgOutput] = None
        best_value = -math.inf
        for triple in triples:
            out = run_fwg(self.f, self.body, z, triple, self.cfg)
            val = self.f.value(out.y_final)
            if val > best_value:
                best, best_value = out, val
        assert best is not None
        return best

    def recurse(self, z: Point, level: int) -> Optional[_Candidate]:
        if self.budget.calls_used >= self.budget.max_calls:
            self.partial = True
            return None
        self.budget.calls_used += 1
        self.levels_expanded = max(self.levels_expanded, level)

        z_better = box_maximize(self.f, self.cfg.gamma, self.cfg.epsilon, z)
        candidates = [self._checked(z_better, self.f.value(z_better), BRANCH_BOXMAX)]
        # The surrogate estimate must not exceed the in-body optimum; use
        # the best feasible value in hand (see the guess_triples contract).
        estimate = max(self.f.value(z), candidates[0].value, self.f.value(zeros(self.f.dimension)))
        fwg_out = self._best_fwg(z, estimate)
        self.trace.append(HeirRecord(level, _point_hash(z), fwg_out.q_empty_at))
        candidates.append(
            self._checked(fwg_out.y_final, self.f.value(fwg_out.y_final), BRANCH_FWG)
        )
        if level < self.levels:
            for x_j in fwg_out.x_sequence:
                child = self.recurse(x_j, level + 1)
                if child is None:
                    break
                candidates.append(_Candidate(child.point, child.value, BRANCH_CHILD))
        return max(candidates, key=lambda c: c.value)


def solve(
    f: Objective,
    body: AnyBody,
    cfg: FwgConfig,
    budget: Optional[RunBudget] = None,
    seed: int = 0,
) -> SolveReport:
    """Run the full recursive search and return the best feasible point.

    Deterministic for fixed inputs; ``seed`` is recorded in the report
    (instance-level sampling such as gamma certification consumes it
    upstream).  The budget counter is reset on entry; exhausting it
    yields a partial (but valid) report rather than an error.
    """
    cfg = cfg.normalized()
    budget = budget if budget is not None else RunBudget()
    if budget.max_calls < 1:
        raise ParameterError("max_calls must be >= 1")
    budget.calls_used = 0

    accuracy = min(cfg.epsilon, cfg.delta)
    z0 = fw_local_max(f, body, delta=accuracy).point

    search = _Search(f, body, cfg, budget)
    best = _Candidate(z0, f.value(z0), BRANCH_SEED)
    root = search.recurse(z0, 1)
    if root is not None and root.value > best.value:
        best = root

    return SolveReport(
        best=best.point,
        best_value=f.value(best.point),
        branch=best.branch,
        levels_expanded=search.levels_expanded,
        calls_used=budget.calls_used,
        heir_trace=tuple(search.trace),
        partial=search.partial,
        seed=seed,
    )


def certified_value_bound(
    report: SolveReport,
    phi: float,
    f_opt_estimate: float,
    delta: float,
    smoothness: float,
    diameter: float,
) -> bool:
    """Check best_value >= phi * OPT - C * delta * D^2 * L with C = 10.

    The constant absorbs the error term's unstated factor; the check is
    property-style and only informative for small delta.
    """
    slack = 10.0 * delta * diameter * diameter * smoothness
    return report.best_value >= phi * f_opt_estimate - slack
