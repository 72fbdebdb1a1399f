"""Frank-Wolfe local search with a uniform first-order certificate.

The routine runs ceil(1/delta^2) conditional-gradient steps
``x <- (1-delta) x + delta z`` where z maximizes the linearized
objective over the feasible region, then returns the iterate *preceding*
the step with the smallest Frank-Wolfe gap.  That gap certifies
approximate local optimality uniformly: for every feasible y,
``<y - x, grad F(x)> <= min_gap``, and a telescoping/smoothness argument
bounds ``min_gap <= delta * (best value seen + L D^2 / 2)``.

``lattice_bound_check`` turns such a certificate into the weak-DR value
comparison ``F(x) >= (g^2 F(x v y) + F(x ^ y)) / (1 + g^2) - slack-term``
relating a local maximum to the join/meet of any comparator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bodies import AnyBody, Halfspace, lp_maximize
from .errors import InfeasibleRegionError, ParameterError
from .lattice import ArrayLike, Point, as_array, join, meet
from .objectives import Objective

CHECK_TOL = 1e-7


@dataclass(frozen=True)
class LocalMaxResult:
    point: Point
    certificate_bound: float  # delta * (f_max_seen + L D^2 / 2)
    iterations_used: int
    min_fw_gap: float
    f_max_seen: float


def fw_local_max(
    f: Objective,
    body: AnyBody,
    extra: Optional[Halfspace] = None,
    delta: float = 0.1,
    start: Optional[ArrayLike] = None,
) -> LocalMaxResult:
    """Approximate local maximum of f over body (optionally cut by one halfspace).

    The start point defaults to the origin; when a cut is given the
    default start is the LP witness maximizing the cut normal, which
    certifies the intersection nonempty (raises InfeasibleRegionError
    otherwise).  All iterates stay feasible by convexity.
    """
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must be in (0,1), got {delta}")
    if start is not None:
        x = as_array(start).copy()
        if not body.is_feasible(x, CHECK_TOL) or (extra is not None and not extra.contains(x, CHECK_TOL)):
            raise ParameterError("start point is not feasible in the search region")
    elif extra is None:
        x = np.zeros(f.dimension)
    else:
        witness = lp_maximize(body, extra.normal)
        if witness is None or witness[1] < extra.threshold - 1e-9:
            raise InfeasibleRegionError("the body does not meet the required halfspace")
        x = witness[0].coords.copy()

    iterations = math.ceil(delta**-2)
    iterates = [x.copy()]
    f_max_seen = f.value(x)
    best_gap = math.inf
    best_index = 0
    for i in range(1, iterations + 1):
        g = f.grad(x)
        res = lp_maximize(body, g, extra)
        if res is None:
            raise InfeasibleRegionError("LP subproblem became infeasible mid-run")
        z, lin_opt = res
        gap = lin_opt - float(g @ x)
        if gap < best_gap:
            best_gap = gap
            best_index = i - 1  # the iterate the gap was measured at
        x = (1.0 - delta) * x + delta * z.coords
        iterates.append(x.copy())
        f_max_seen = max(f_max_seen, f.value(x))

    bound = delta * (f_max_seen + f.smoothness * body.diameter**2 / 2.0)
    return LocalMaxResult(
        point=Point(iterates[best_index]),
        certificate_bound=bound,
        iterations_used=iterations,
        min_fw_gap=best_gap,
        f_max_seen=f_max_seen,
    )


def lattice_bound_check(
    f: Objective, x: ArrayLike, y: ArrayLike, gamma: float, slack: float
) -> bool:
    """Check the local-max value bound against one comparator y.

    Given that x is approximately locally optimal against y (the caller
    certifies <y - x, grad F(x)> <= slack), the weak-DR property forces

        F(x) >= [g^2 F(x v y) + F(x ^ y)] / (1 + g^2) - slack * g / (1 + g^2)

    up to a 1e-7 numerical allowance.
    """
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must be in (0,1], got {gamma}")
    fx = f.value(x)
    f_join = f.value(join(x, y))
    f_meet = f.value(meet(x, y))
    g2 = gamma * gamma
    rhs = (g2 * f_join + f_meet) / (1.0 + g2) - slack * gamma / (1.0 + g2)
    return fx >= rhs - CHECK_TOL
