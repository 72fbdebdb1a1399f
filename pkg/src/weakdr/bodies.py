"""Down-closed convex bodies in the unit cube with LP oracles.

Three constraint families are supported, each down-closed by
construction (nonnegative constraint matrices together with the box
bounds guarantee that shrinking any coordinate preserves feasibility):

* :class:`Box` -- {x : 0 <= x <= u};
* :class:`Knapsack` -- {x in [0,1]^n : a.x <= b} for a single row;
* :class:`Polytope` -- {x in [0,1]^n : A x <= b}, A >= 0 entrywise.

``lp_maximize`` is the linear-optimization oracle.  It takes at most one
extra halfspace ``{x : w.x >= t}`` because every constrained subproblem
in this package intersects the body with exactly one such cut.  Box and
knapsack bodies (with no cut) use exact greedy solvers; everything else
goes through the dense simplex.  A pair of solver paths for the same
problem is deliberate: tests cross-check them against each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import ParameterError
from .lattice import ArrayLike, Point, as_array
from .simplex import simplex_maximize

FEASIBILITY_TOL = 1e-9
DIAMETER_EXACT_MAX_DIM = 12


@dataclass(frozen=True)
class Halfspace:
    """The set {x : <normal, x> >= threshold}."""

    normal: np.ndarray
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "normal", np.asarray(as_array(self.normal), dtype=np.float64))
        object.__setattr__(self, "threshold", float(self.threshold))

    def contains(self, x: ArrayLike, tol: float = FEASIBILITY_TOL) -> bool:
        return float(self.normal @ as_array(x)) >= self.threshold - tol


class Body:
    """Base for down-closed bodies; subclasses fill in the constraint rows."""

    dimension: int

    def inequality_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """(A, b) with the body equal to {x >= 0 : A x <= b}; box bounds included."""
        raise NotImplementedError

    def coordinate_ceiling(self) -> np.ndarray:
        """Per-coordinate maxima; the bounding box of the body."""
        raise NotImplementedError

    def is_feasible(self, x: ArrayLike, tol: float = FEASIBILITY_TOL) -> bool:
        v = as_array(x)
        if v.shape[0] != self.dimension:
            return False
        if np.any(v < -tol) or np.any(v > 1.0 + tol):
            return False
        A, b = self.inequality_rows()
        return bool(np.all(A @ v <= b + tol))

    @property
    def diameter(self) -> float:
        d, _ = self.diameter_info()
        return d

    def diameter_info(self) -> tuple[float, bool]:
        """(diameter, is_exact).  Upper bounds are safe: they only loosen
        the Frank-Wolfe error term, which scales with the diameter squared."""
        raise NotImplementedError


class Box(Body):
    def __init__(self, u: ArrayLike):
        u = as_array(u)
        if np.any(u < 0) or np.any(u > 1):
            raise ParameterError("box ceiling must lie in [0,1]^n")
        self.u = np.array(u, dtype=np.float64)
        self.dimension = self.u.shape[0]

    def inequality_rows(self) -> tuple[np.ndarray, np.ndarray]:
        return np.eye(self.dimension), self.u.copy()

    def coordinate_ceiling(self) -> np.ndarray:
        return self.u.copy()

    def diameter_info(self) -> tuple[float, bool]:
        return float(np.linalg.norm(self.u)), True


class Knapsack(Body):
    def __init__(self, a: ArrayLike, b: float):
        a = as_array(a)
        if np.any(a < 0) or b < 0:
            raise ParameterError("knapsack requires a >= 0 and b >= 0")
        self.a = np.array(a, dtype=np.float64)
        self.b = float(b)
        self.dimension = self.a.shape[0]

    def inequality_rows(self) -> tuple[np.ndarray, np.ndarray]:
        A = np.vstack([self.a[None, :], np.eye(self.dimension)])
        b = np.concatenate([[self.b], np.ones(self.dimension)])
        return A, b

    def coordinate_ceiling(self) -> np.ndarray:
        u = np.ones(self.dimension)
        tight = self.a > 0
        u[tight] = np.minimum(1.0, self.b / self.a[tight])
        return u

    def _vertices(self) -> Optional[np.ndarray]:
        """All vertices: feasible 0/1 points plus one-fractional tight points."""
        n = self.dimension
        verts: list[np.ndarray] = []
        for bits in itertools.product((0.0, 1.0), repeat=n):
            v = np.array(bits)
            load = float(self.a @ v)
            if load <= self.b + FEASIBILITY_TOL:
                verts.append(v)
            for j in range(n):
                if v[j] == 1.0 and self.a[j] > 0:
                    rest = load - self.a[j]
                    if rest <= self.b - FEASIBILITY_TOL:
                        frac = (self.b - rest) / self.a[j]
                        if 0.0 < frac < 1.0:
                            w = v.copy()
                            w[j] = frac
                            verts.append(w)
            if len(verts) > 20_000:
                return None
        return np.array(verts)

    def diameter_info(self) -> tuple[float, bool]:
        if self.dimension <= DIAMETER_EXACT_MAX_DIM:
            verts = self._vertices()
            if verts is not None and len(verts) >= 1:
                best = 0.0
                for i in range(len(verts)):  # diameter is attained at a vertex pair
                    d2 = np.sum((verts[i + 1 :] - verts[i]) ** 2, axis=1)
                    if d2.size:
                        best = max(best, float(d2.max()))
                return float(np.sqrt(best)), True
        return float(np.linalg.norm(self.coordinate_ceiling())), False


class Polytope(Body):
    def __init__(self, A: ArrayLike, b: ArrayLike):
        A = np.array(as_array(A), dtype=np.float64, ndmin=2)
        b = np.asarray(as_array(b), dtype=np.float64)
        if A.shape[0] != b.shape[0]:
            raise ParameterError(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        if np.any(A < 0):
            raise ParameterError("polytope rows must be nonnegative (down-closedness)")
        if np.any(b < 0):
            raise ParameterError("b must be nonnegative (the origin must be feasible)")
        self.A = A
        self.b = b
        self.dimension = A.shape[1]

    def inequality_rows(self) -> tuple[np.ndarray, np.ndarray]:
        A = np.vstack([self.A, np.eye(self.dimension)])
        b = np.concatenate([self.b, np.ones(self.dimension)])
        return A, b

    def coordinate_ceiling(self) -> np.ndarray:
        # With A >= 0 the max of x_i is min(1, min_j b_j / A_ji) over rows
        # touching coordinate i (all other coordinates can sit at 0).
        u = np.ones(self.dimension)
        for i in range(self.dimension):
            col = self.A[:, i]
            tight = col > 0
            if tight.any():
                u[i] = min(1.0, float(np.min(self.b[tight] / col[tight])))
        return u

    def diameter_info(self) -> tuple[float, bool]:
        return float(np.linalg.norm(self.coordinate_ceiling())), False


AnyBody = Union[Box, Knapsack, Polytope]


def _box_lp(u: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, float]:
    x = np.where(c > 0, u, 0.0)
    return x, float(c @ x)


def _knapsack_lp(a: np.ndarray, budget: float, c: np.ndarray) -> tuple[np.ndarray, float]:
    """Exact fractional greedy for one knapsack row with unit box bounds."""
    n = c.shape[0]
    x = np.zeros(n)
    free = (a <= 0) & (c > 0)
    x[free] = 1.0
    paying = [i for i in range(n) if c[i] > 0 and a[i] > 0]
    paying.sort(key=lambda i: (-c[i] / a[i], i))  # best value density first, index ties stable
    remaining = budget
    for i in paying:
        if remaining <= 0:
            break
        take = min(1.0, remaining / a[i])
        x[i] = take
        remaining -= take * a[i]
    return x, float(c @ x)


def _box_halfspace_lp(
    u: np.ndarray, c: np.ndarray, cut: Halfspace
) -> Optional[tuple[np.ndarray, float]]:
    """Exact greedy for max c.x over {0 <= x <= u, w.x >= t}.

    Start at the unconstrained box maximizer and, if the cut is violated,
    buy w.x mass in ascending order of objective cost per unit of w.x.
    One extra constraint means at most one fractional trade at optimum.
    """
    w, t = cut.normal, cut.threshold
    x, _ = _box_lp(u, c)
    slack = float(w @ x) - t
    if slack >= -FEASIBILITY_TOL:
        return x, float(c @ x)
    # Moves that increase w.x: raise coordinates with c <= 0 < w from 0,
    # or lower coordinates with c > 0 > w from u.  Cost rate = |c|/|w|.
    moves = []
    for i in range(u.shape[0]):
        if u[i] <= 0:
            continue
        if w[i] > 0 and c[i] <= 0:
            moves.append((-c[i] / w[i], i, +1.0, w[i] * u[i]))
        elif w[i] < 0 and c[i] > 0:
            moves.append((c[i] / -w[i], i, -1.0, -w[i] * u[i]))
    moves.sort(key=lambda m: (m[0], m[1]))
    need = -slack
    for _, i, direction, gain in moves:
        if need <= FEASIBILITY_TOL:
            break
        frac = min(1.0, need / gain)
        if direction > 0:
            x[i] = frac * u[i]
        else:
            x[i] = (1.0 - frac) * u[i]
        need -= frac * gain
    if need > FEASIBILITY_TOL:
        return None
    return x, float(c @ x)


def lp_maximize(
    body: AnyBody, c: ArrayLike, extra: Optional[Halfspace] = None
) -> Optional[tuple[Point, float]]:
    """Maximize <c, x> over body (optionally cut by one halfspace).

    Returns (maximizer, optimum) or None when the intersection is empty.
    The body alone is never empty (it contains the origin).
    """
    c = as_array(c)
    if c.shape[0] != body.dimension:
        raise ParameterError(f"objective vector has dimension {c.shape[0]}, body {body.dimension}")
    if extra is None:
        if isinstance(body, Box):
            x, v = _box_lp(body.u, c)
            return Point(x), v
        if isinstance(body, Knapsack):
            x, v = _knapsack_lp(body.a, body.b, c)
            return Point(x), v
    elif isinstance(body, Box):
        res = _box_halfspace_lp(body.u, c, extra)
        return None if res is None else (Point(res[0]), res[1])
    return _lp_via_simplex(body, c, extra)


def _lp_via_simplex(
    body: AnyBody, c: ArrayLike, extra: Optional[Halfspace] = None
) -> Optional[tuple[Point, float]]:
    """General solver path; also used to cross-check the greedy paths."""
    c = as_array(c)
    A, b = body.inequality_rows()
    if extra is not None:
        A = np.vstack([A, -extra.normal[None, :]])
        b = np.concatenate([b, [-extra.threshold]])
    res = simplex_maximize(A, b, c)
    if res is None:
        return None
    x, v = res
    return Point(np.clip(x, 0.0, 1.0)), v


def is_feasible(body: AnyBody, x: ArrayLike, tol: float = FEASIBILITY_TOL) -> bool:
    return body.is_feasible(x, tol)


def diameter(body: AnyBody) -> float:
    return body.diameter
