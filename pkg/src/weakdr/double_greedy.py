"""Grid-discretized double greedy for unconstrained cube maximization.

Two solutions sweep toward each other: x starts at the origin and only
grows, y starts at the all-ones vector and only shrinks, and each
iteration fixes one coordinate of both to a common value w chosen from
the best upward move (a) and best downward move (b) on a uniform grid.
The blend weights the two moves by their gains, with the downward gain
discounted by the weak-DR parameter.

``unbalanced_bound`` evaluates the value guarantee this procedure
carries: a ratio of quadratics in a free parameter r >= 0 mixing the
optimum, the origin value, and the all-ones value, maximized over r.
``box_maximize`` runs the same procedure on the restriction of f to an
axis-aligned box [0, ceiling] by composing the oracle with a
coordinatewise rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError
from .lattice import ArrayLike, Point, as_array, hadamard
from .objectives import Objective, restrict_to_box

FLAT_TOL = 1e-12  # both move gains below this -> coordinate is locally flat
R_SEARCH_CAP = 100.0
R_REFINE_TOL = 1e-9


@dataclass(frozen=True)
class CoordinateStep:
    index: int
    a: float  # best upward grid move for x
    b: float  # best downward grid move for y
    delta_a: float
    delta_b: float
    w: float  # common value both solutions adopt


@dataclass(frozen=True)
class DoubleGreedyTrace:
    final: Point
    steps: tuple[CoordinateStep, ...]
    grid_step: float
    epsilon_used: float


def adjusted_epsilon(epsilon: float) -> float:
    """Replace epsilon so that 1/epsilon is an even integer."""
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must be in (0,1), got {epsilon}")
    inv = 1.0 / epsilon
    rounded = round(inv)
    if abs(inv - rounded) < 1e-9 and rounded % 2 == 0:
        return 1.0 / rounded
    return 1.0 / (2.0 * math.ceil(inv))


def double_greedy(
    f: Objective,
    gamma: float,
    epsilon: float,
    order: Optional[Sequence[int]] = None,
    zero_when_flat: bool = False,
) -> DoubleGreedyTrace:
    """Run the coordinate sweep and return the trace with the final point.

    ``order`` permutes the coordinate sweep (defaults to natural index
    order).  ``zero_when_flat`` switches the locally-flat fallback from
    w = 1 - b to w = 0; off by default to match the stated procedure.
    Grid argmax ties break toward the smallest grid value.
    """
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must be in (0,1], got {gamma}")
    eps = adjusted_epsilon(epsilon)
    n = f.dimension
    k = round(1.0 / eps)
    grid = np.linspace(0.0, 1.0, n * k + 1)  # step eps/n, exact endpoints
    order = list(range(n)) if order is None else list(order)
    if sorted(order) != list(range(n)):
        raise ParameterError("order must be a permutation of range(n)")

    x = np.zeros(n)
    y = np.ones(n)
    steps = []
    for u in order:
        fx = f.value(x)
        fy = f.value(y)
        a, best_up = _grid_argmax(f, x, u, grid, upward=True)
        b, best_down = _grid_argmax(f, y, u, grid, upward=False)
        delta_a = best_up - fx
        delta_b = best_down - fy
        if delta_a + gamma * delta_b > FLAT_TOL:
            w = (delta_a * a + gamma * delta_b * (1.0 - b)) / (delta_a + gamma * delta_b)
        else:
            w = 0.0 if zero_when_flat else 1.0 - b
        x[u] = w
        y[u] = w
        steps.append(CoordinateStep(u, a, b, delta_a, delta_b, w))
    return DoubleGreedyTrace(Point(x), tuple(steps), eps / n, eps)


def _grid_argmax(
    f: Objective, base: np.ndarray, u: int, grid: np.ndarray, upward: bool
) -> tuple[float, float]:
    """Best grid move along coordinate u; scans ascending so ties keep the
    smallest grid value."""
    best_v = grid[0]
    best_val = -math.inf
    trial = base.copy()
    for v in grid:
        trial[u] = base[u] + v if upward else base[u] - v
        val = f.value(trial)
        if val > best_val:
            best_val = val
            best_v = float(v)
    return best_v, best_val


def box_maximize(f: Objective, gamma: float, epsilon: float, ceiling: ArrayLike) -> Point:
    """Maximize f over the box [0, ceiling] via the rescaled oracle."""
    u = as_array(ceiling)
    if np.any(u < 0) or np.any(u > 1):
        raise ParameterError("ceiling must lie in [0,1]^n")
    trace = double_greedy(restrict_to_box(f, u), gamma, epsilon)
    return hadamard(u, trace.final)


def _bound_value(r: float, c_opt: float, f_zero: float, f_one: float, c_mix: float) -> float:
    return (c_opt * r + f_zero + f_one * r * r) / (r * r + c_mix * r + 1.0)


def unbalanced_bound(
    f_opt: float, f_zero: float, f_one: float, gamma: float, epsilon: float
) -> tuple[float, float]:
    """(maximizing r, bound) for the double-greedy value guarantee.

    Maximizes  [(2 g^1.5 - 4 eps g^4.5) r F_opt + F_zero + r^2 F_one] /
    (r^2 + 2 g^1.5 r + 1)  over r in [0, 100].  The objective is a ratio
    of quadratics, so its stationary points solve a quadratic; those
    roots, both endpoints, and a golden-section refinement around the
    best candidate locate the maximum to 1e-9.
    """
    if min(f_opt, f_zero, f_one) < 0:
        raise ParameterError("all objective values must be nonnegative")
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must be in (0,1], got {gamma}")
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must be in (0,1), got {epsilon}")
    c_mix = 2.0 * gamma**1.5
    c_opt = (c_mix - 4.0 * epsilon * gamma**4.5) * f_opt
    phi = lambda r: _bound_value(r, c_opt, f_zero, f_one, c_mix)

    candidates = [0.0, R_SEARCH_CAP]
    # Stationary points: (c_mix F_one - c_opt) r^2 + 2 (F_one - F_zero) r
    # + (c_opt - c_mix F_zero) = 0.
    a2 = c_mix * f_one - c_opt
    a1 = 2.0 * (f_one - f_zero)
    a0 = c_opt - c_mix * f_zero
    if abs(a2) > 1e-15:
        disc = a1 * a1 - 4.0 * a2 * a0
        if disc >= 0:
            root = math.sqrt(disc)
            for r in ((-a1 - root) / (2 * a2), (-a1 + root) / (2 * a2)):
                if 0.0 < r < R_SEARCH_CAP:
                    candidates.append(r)
    elif abs(a1) > 1e-15:
        r = -a0 / a1
        if 0.0 < r < R_SEARCH_CAP:
            candidates.append(r)

    best_r = max(candidates, key=lambda r: (phi(r), -r))
    lo = max(0.0, best_r - 1.0)
    hi = min(R_SEARCH_CAP, best_r + 1.0)
    r_gold = _golden_section_max(phi, lo, hi, R_REFINE_TOL)
    if phi(r_gold) > phi(best_r):
        best_r = r_gold
    return best_r, phi(best_r)


def _golden_section_max(fn, lo: float, hi: float, tol: float) -> float:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    return (a + b) / 2.0
