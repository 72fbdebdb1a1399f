"""First-order objective oracles and empirical weak-DR certification.

An :class:`Objective` bundles a nonnegative value oracle, its gradient,
a smoothness (gradient-Lipschitz) constant ``L``, and a weak-DR
parameter ``gamma`` in (0,1].  ``gamma`` certifies that the gradient
decays by at most that factor along the coordinatewise order:
``grad F(x) >= gamma * grad F(y)`` whenever ``x <= y``.

Concrete families used throughout the test and CLI surface:

* :class:`QuadraticObjective` -- ``F(x) = 0.5 x'Hx + h'x + c``; exact
  gradient and smoothness, and gamma = 1 whenever H <= 0 entrywise.
* :class:`SeparableExponential` -- ``F(x) = sum_i b_i (exp(a_i x_i)-1)``
  with the exact worst gradient-decay ratio ``exp(-max_i a_i)``.

``estimate_gamma`` certifies gamma empirically for arbitrary oracles by
sampling comparable pairs.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import OracleError, ParameterError
from .lattice import ArrayLike, as_array

GRAD_POSITIVITY_FLOOR = 1e-7  # gradient entries below this are skipped in ratio estimation


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox); replays are cross-platform exact."""
    return np.random.Generator(np.random.Philox(seed))


class Objective:
    """Nonnegative first-order oracle on [0,1]^n."""

    def __init__(
        self,
        dimension: int,
        value_fn: Callable[[np.ndarray], float],
        grad_fn: Callable[[np.ndarray], np.ndarray],
        smoothness: float,
        gamma: float,
    ):
        if dimension < 1:
            raise ParameterError(f"dimension must be positive, got {dimension}")
        if smoothness < 0:
            raise ParameterError(f"smoothness must be >= 0, got {smoothness}")
        if not 0.0 < gamma <= 1.0:
            raise ParameterError(f"gamma must be in (0,1], got {gamma}")
        self.dimension = dimension
        self._value_fn = value_fn
        self._grad_fn = grad_fn
        self.smoothness = float(smoothness)
        self.gamma = float(gamma)

    def value(self, x: ArrayLike) -> float:
        v = float(self._value_fn(as_array(x)))
        if not math.isfinite(v):
            raise OracleError(f"value oracle returned {v}", point=as_array(x).copy())
        return v

    def grad(self, x: ArrayLike) -> np.ndarray:
        g = np.asarray(self._grad_fn(as_array(x)), dtype=np.float64)
        if not np.all(np.isfinite(g)):
            raise OracleError("gradient oracle returned non-finite entries", point=as_array(x).copy())
        return g

    def with_gamma(self, gamma: float) -> "Objective":
        """Same oracles with a replacement certified gamma."""
        return Objective(self.dimension, self._value_fn, self._grad_fn, self.smoothness, gamma)

    def with_smoothness(self, smoothness: float) -> "Objective":
        return Objective(self.dimension, self._value_fn, self._grad_fn, smoothness, self.gamma)


class QuadraticObjective(Objective):
    """F(x) = 0.5 x'Hx + h'x + c with exact gradient Hx + h.

    ``c=None`` picks the smallest offset making F >= 0 on the cube
    (corner enumeration for n <= 20, else 10^4 Philox samples).  When H
    is entrywise nonpositive the gradient is antitone and gamma = 1;
    otherwise a certified gamma must be supplied (see
    :func:`estimate_gamma`).
    """

    def __init__(
        self,
        H: ArrayLike,
        h: ArrayLike,
        c: Optional[float] = None,
        gamma: Optional[float] = None,
        offset_seed: int = 0,
    ):
        H = np.array(as_array(H), dtype=np.float64, ndmin=2)
        h = np.asarray(as_array(h), dtype=np.float64)
        n = h.shape[0]
        if H.shape != (n, n):
            raise ParameterError(f"H must be {n}x{n}, got {H.shape}")
        if not np.allclose(H, H.T, atol=1e-12):
            raise ParameterError("H must be symmetric")
        self.H = H
        self.h = h
        if c is None:
            c = -min(0.0, self._cube_min_without_offset(offset_seed))
        self.c = float(c)
        if gamma is None:
            if np.all(H <= 0.0):
                gamma = 1.0
            else:
                raise ParameterError(
                    "gamma is required when H has positive entries; certify it with estimate_gamma"
                )
        smoothness = float(np.linalg.norm(H, 2)) if n > 0 else 0.0
        super().__init__(
            n,
            lambda x: 0.5 * float(x @ (self.H @ x)) + float(self.h @ x) + self.c,
            lambda x: self.H @ x + self.h,
            smoothness,
            gamma,
        )

    def _cube_min_without_offset(self, seed: int) -> float:
        n = self.h.shape[0]
        raw = lambda x: 0.5 * float(x @ (self.H @ x)) + float(self.h @ x)
        if n <= 20:
            best = math.inf
            for mask in range(1 << n):
                x = np.array([(mask >> i) & 1 for i in range(n)], dtype=np.float64)
                best = min(best, raw(x))
            return best
        rng = make_rng(seed)
        samples = rng.random((10_000, n))
        return min(raw(x) for x in samples)


class SeparableExponential(Objective):
    """F(x) = sum_i b_i (exp(a_i x_i) - 1) with a, b >= 0.

    The gradient b_i a_i exp(a_i x_i) grows along each coordinate, so the
    exact weak-DR parameter is exp(-max_i a_i), attained at opposite cube
    corners.  Smoothness is max_i b_i a_i^2 exp(a_i), exact on the cube.
    """

    def __init__(self, a: ArrayLike, b: ArrayLike):
        a = np.asarray(as_array(a), dtype=np.float64)
        b = np.asarray(as_array(b), dtype=np.float64)
        if a.shape != b.shape or a.ndim != 1:
            raise ParameterError("a and b must be 1-D vectors of equal length")
        if np.any(a < 0) or np.any(b < 0):
            raise ParameterError("a and b must be nonnegative")
        self.a = a
        self.b = b
        gamma = float(np.exp(-a.max(initial=0.0)))
        smoothness = float(np.max(b * a * a * np.exp(a), initial=0.0))
        super().__init__(
            a.shape[0],
            lambda x: float(np.sum(self.b * np.expm1(self.a * x))),
            lambda x: self.b * self.a * np.exp(self.a * x),
            smoothness,
            gamma,
        )


class ConstantObjective(Objective):
    def __init__(self, dimension: int, value: float = 0.0):
        if value < 0:
            raise ParameterError("constant objectives must be nonnegative")
        v = float(value)
        super().__init__(
            dimension,
            lambda x: v,
            lambda x: np.zeros_like(x),
            0.0,
            1.0,
        )
        self.constant = v


def restrict_to_box(f: Objective, ceiling: ArrayLike) -> Objective:
    """Composed oracle a -> F(ceiling * a); stays gamma-weakly DR.

    Used for maximizing F over the axis-aligned box [0, ceiling]: the
    composed gradient is ceiling * grad F(ceiling * a), and smoothness
    can only shrink (|ceiling| <= 1 per coordinate).
    """
    u = as_array(ceiling).copy()
    return Objective(
        f.dimension,
        lambda a: f.value(u * a),
        lambda a: u * f.grad(u * a),
        f.smoothness * float(np.max(u, initial=0.0) ** 2),
        f.gamma,
    )


def shift_by_prob_sum(f: Objective, base: ArrayLike) -> Objective:
    """Composed oracle a -> F(a (+) base); stays gamma-weakly DR."""
    y = as_array(base).copy()
    return Objective(
        f.dimension,
        lambda a: f.value(1.0 - (1.0 - a) * (1.0 - y)),
        lambda a: (1.0 - y) * f.grad(1.0 - (1.0 - a) * (1.0 - y)),
        f.smoothness,
        f.gamma,
    )


class GammaEstimate(NamedTuple):
    gamma: float
    degenerate: bool  # True when no pair with a usable positive gradient entry was found
    worst_lower: Optional[np.ndarray]  # x of the worst comparable pair (x <= y)
    worst_upper: Optional[np.ndarray]
    worst_coordinate: Optional[int]
    samples: int


def estimate_gamma_report(f: Objective, samples: int = 1000, seed: int = 0) -> GammaEstimate:
    """Empirical weak-DR certification with the worst pair found.

    Samples y uniformly and x = u*y (u uniform), so comparable pairs are
    dense near the diagonal where the gradient-decay ratio is worst for
    exponential families.  The certified value is the minimum of
    grad_i F(x) / grad_i F(y) over sampled pairs and coordinates with
    grad_i F(y) above a positivity floor, clamped to (0, 1].
    """
    if samples < 100:
        raise ParameterError(f"samples must be >= 100, got {samples}")
    rng = make_rng(seed)
    n = f.dimension
    worst = math.inf
    worst_pair: tuple[Optional[np.ndarray], Optional[np.ndarray], Optional[int]] = (None, None, None)
    for _ in range(samples):
        y = rng.random(n)
        x = rng.random(n) * y
        gy = f.grad(y)
        mask = gy > GRAD_POSITIVITY_FLOOR
        if not mask.any():
            continue
        ratios = f.grad(x)[mask] / gy[mask]
        k = int(np.argmin(ratios))
        if ratios[k] < worst:
            worst = float(ratios[k])
            worst_pair = (x.copy(), y.copy(), int(np.flatnonzero(mask)[k]))
    if not math.isfinite(worst):
        return GammaEstimate(1.0, True, None, None, None, samples)
    gamma = min(1.0, max(worst, 1e-12))
    return GammaEstimate(gamma, False, *worst_pair, samples)


def estimate_gamma(f: Objective, samples: int = 1000, seed: int = 0) -> float:
    """Largest empirically certified weak-DR parameter, in (0, 1]."""
    return estimate_gamma_report(f, samples, seed).gamma


def monotone_quadratic_gamma(H: ArrayLike, h: ArrayLike) -> float:
    """Exact weak-DR parameter of a quadratic whose gradient stays positive.

    For positive gradients the weak-DR condition reduces to a minimum of
    ratios of affine functions over comparable pairs, which is attained
    at cube-corner pairs; those are enumerated exactly (3^n pairs per
    coordinate, so small dimensions only).
    """
    H = np.asarray(as_array(H), dtype=np.float64)
    h = np.asarray(as_array(h), dtype=np.float64)
    n = h.shape[0]
    if n > 12:
        raise ParameterError("corner-pair enumeration is limited to n <= 12")
    if np.any(h + np.minimum(H, 0.0).sum(axis=1) <= 0.0):
        raise ParameterError("gradient is not positive everywhere on the cube")
    worst = 1.0
    # Each coordinate independently takes (x_j, y_j) in {(0,0), (0,1), (1,1)}.
    import itertools

    for i in range(n):
        row = H[i]
        for combo in itertools.product((0, 1, 2), repeat=n):
            num = h[i] + sum(row[j] for j in range(n) if combo[j] == 2)
            den = h[i] + sum(row[j] for j in range(n) if combo[j] >= 1)
            worst = min(worst, num / den)
    return min(1.0, worst)


def finite_difference_gradient(f: Objective, x: ArrayLike, h: float = 1e-6) -> np.ndarray:
    """Central finite differences of the value oracle."""
    x = as_array(x)
    g = np.empty_like(x)
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f.value(x + e) - f.value(x - e)) / (2.0 * h)
    return g


def gradient_consistency(f: Objective, samples: int = 100, seed: int = 0, h: float = 1e-6) -> float:
    """Max of |fd - oracle| / (1 + |oracle|) over sampled interior points."""
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = 0.1 + 0.8 * rng.random(f.dimension)  # keep the stencil inside the cube
        fd = finite_difference_gradient(f, x, h)
        g = f.grad(x)
        worst = max(worst, float(np.max(np.abs(fd - g) / (1.0 + np.abs(g)))))
    return worst


def lipschitz_lower_bound(f: Objective, samples: int = 200, seed: int = 0) -> float:
    """Max sampled gradient-difference ratio; a lower bound on the true L."""
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = rng.random(f.dimension)
        y = rng.random(f.dimension)
        d = float(np.linalg.norm(x - y))
        if d < 1e-12:
            continue
        worst = max(worst, float(np.linalg.norm(f.grad(x) - f.grad(y))) / d)
    return worst
