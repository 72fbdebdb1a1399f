"""Optimized approximation curve for weakly DR maximization.

The solver's output value is certified by mixing two lower bounds: the
Frank-Wolfe-guided greedy certificate, whose coefficients in front of
the optimum / restricted / expanded comparator values are
``coeff_a / coeff_b / coeff_c`` (functions of gamma and the schedule
switch time t_s), and the box-restricted double-greedy certificate with
coefficients ``coeff_d / coeff_e`` (functions of gamma and a free ratio
r).  Choosing a mixing weight alpha so that the comparator coefficients

    (1-alpha) * b + alpha * d   and   (1-alpha) * c + alpha * e

are both nonnegative lets those terms be dropped, leaving the pure
factor ``(1-alpha) * coeff_a(gamma, t_s)`` in front of the optimum.
``optimize_phi`` maximizes that factor over (alpha, r, t_s) by grid
search with a closed-form optimal alpha per grid point, one local
refinement pass, and deterministic first-best tie-breaking.

Near gamma = 1 the a/c coefficients are 0/0 forms; ``coeff_a`` switches
to its analytic limit and ``coeff_c`` to Richardson extrapolation from
three near-1 evaluations, with a convergence assertion that would
expose any transcription error as a non-cancelling pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO, Union

import numpy as np

from .errors import InternalInvariantError, ParameterError

GAMMA_LIMIT_BAND = 1e-6  # |1 - gamma| below this uses the limit path
RICHARDSON_OFFSETS = (1e-3, 1e-4, 1e-5)
RICHARDSON_TOL = 1e-7
FEAS_TOL = 1e-12

Scalar = Union[float, np.ndarray]


def _as_result(value: np.ndarray, like) -> Scalar:
    return float(value) if np.isscalar(like) or np.ndim(like) == 0 else value


def _check_gamma(gamma: float) -> float:
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must be in (0,1], got {gamma}")
    return float(gamma)


def coeff_a(gamma: float, t_s: Scalar) -> Scalar:
    """Optimum-value coefficient of the greedy certificate (epsilon term
    dropped: the theoretical curve takes the accuracy parameter to 0)."""
    gamma = _check_gamma(gamma)
    t = np.asarray(t_s, dtype=np.float64)
    if 1.0 - gamma < GAMMA_LIMIT_BAND:
        out = (2.0 - t) * np.exp(t - 1.0) - math.exp(-1.0)
        return _as_result(out, t_s)
    out = -np.exp(gamma * t - gamma) / (1.0 - gamma) + math.exp(-gamma * gamma) * (
        np.exp(gamma * gamma * t) - (1.0 - gamma)
    ) / (gamma * (1.0 - gamma))
    return _as_result(out, t_s)


def coeff_b(gamma: float, t_s: Scalar) -> Scalar:
    """Restricted-comparator coefficient; nonpositive, zero at t_s = 0."""
    gamma = _check_gamma(gamma)
    t = np.asarray(t_s, dtype=np.float64)
    out = (math.exp(-gamma) - np.exp(gamma * t - gamma)) / gamma
    return _as_result(out, t_s)


def _coeff_c_direct(gamma: float, t: np.ndarray) -> np.ndarray:
    """Three-term certificate coefficient, written with expm1 so every
    1/(1-gamma) pole multiplies a factor vanishing like (1-gamma)."""
    g = gamma
    omg = 1.0 - g  # one minus gamma
    w = g * omg * (1.0 - t)
    ew = np.exp(w)
    # exp(-g(1-t) - g^2 t) - exp(-g^2) == exp(-g^2) * expm1(-w)
    t1 = np.expm1(g * g * t) * math.exp(-g * g) * np.expm1(-w) / (g * omg)
    t2 = (
        np.exp(-g * (1.0 - t))
        / g
        * (np.expm1(-g * t) + np.exp(-g * t) * np.expm1(g * t * omg) / omg)
    )
    # bracket = g^2 (1-t) e^w / (1-g) + g (1 - e^w) / (1-g)^2
    #         = g (w e^w - expm1(w)) / (1-g)^2        [w = g (1-g)(1-t)]
    t3 = np.exp(-g * (1.0 - t) - g * g * t) * g * (w * ew - np.expm1(w)) / (omg * omg)
    return t1 + t2 + t3


def coeff_c(gamma: float, t_s: Scalar) -> Scalar:
    """Expanded-comparator coefficient of the greedy certificate.

    At gamma = 1 the (1-gamma) poles cancel; the limit is evaluated by
    Richardson extrapolation from gamma = 1 - {1e-3, 1e-4, 1e-5} and the
    extrapolation tableau is asserted to converge (a non-cancelling pole
    would mean the formula was transcribed wrong).
    """
    gamma = _check_gamma(gamma)
    t = np.asarray(t_s, dtype=np.float64)
    if 1.0 - gamma < GAMMA_LIMIT_BAND:
        h0, h1, h2 = RICHARDSON_OFFSETS
        f0 = _coeff_c_direct(1.0 - h0, t)
        f1 = _coeff_c_direct(1.0 - h1, t)
        f2 = _coeff_c_direct(1.0 - h2, t)
        r01 = (10.0 * f1 - f0) / 9.0  # kills the O(h) term (step ratio 10)
        r12 = (10.0 * f2 - f1) / 9.0
        limit = (100.0 * r12 - r01) / 99.0
        if np.max(np.abs(limit - r12)) > RICHARDSON_TOL:
            raise InternalInvariantError(
                "coefficient limit at gamma=1 did not converge; pole fails to cancel"
            )
        return _as_result(limit, t_s)
    return _as_result(_coeff_c_direct(gamma, t), t_s)


def coeff_d(gamma: float, r: Scalar) -> Scalar:
    """Restricted-comparator coefficient of the box double-greedy certificate."""
    gamma = _check_gamma(gamma)
    rr = np.asarray(r, dtype=np.float64)
    q = rr * rr + 2.0 * gamma**1.5 * rr + 1.0
    out = (2.0 * gamma**1.5 * rr + gamma / (1.0 + gamma * gamma) * rr * rr) / q
    return _as_result(out, r)


def coeff_e(gamma: float, r: Scalar) -> Scalar:
    """Expanded-comparator coefficient of the box double-greedy certificate."""
    gamma = _check_gamma(gamma)
    rr = np.asarray(r, dtype=np.float64)
    q = rr * rr + 2.0 * gamma**1.5 * rr + 1.0
    out = (gamma * gamma / (1.0 + gamma * gamma)) * rr * rr / q
    return _as_result(out, r)


def baseline_kappa(gamma: float) -> float:
    """Prior guarantee envelope gamma * exp(-gamma) for this problem class."""
    gamma = _check_gamma(gamma)
    return gamma * math.exp(-gamma)


@dataclass(frozen=True)
class PhiResult:
    gamma: float
    phi: float
    alpha: float
    r: float
    t_s: float
    baseline: float
    feasible: bool


def _alpha_interval(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Feasible alpha range in [0,1] for (1-alpha) p + alpha q >= 0.

    The constraint is linear in alpha with endpoint values p (alpha=0)
    and q (alpha=1); infeasible cells get lo=+inf / hi=-inf.
    """
    slope = q - p
    with np.errstate(divide="ignore", invalid="ignore"):
        crossing = -p / slope
    lo = np.where(p >= 0.0, 0.0, np.where(slope > 0.0, crossing, np.inf))
    hi = np.where(q >= 0.0, 1.0, np.where(slope < 0.0, crossing, -np.inf))
    return lo, hi


def _grid_best(
    gamma: float, r_grid: np.ndarray, t_grid: np.ndarray, shards: int = 1
) -> tuple[float, float, float, float, bool]:
    """Best (phi, alpha, r, t_s) over the grid; first-best tie-breaking in
    row-major (r outer, t_s inner) order, independent of sharding."""
    a_t = np.asarray(coeff_a(gamma, t_grid))
    b_t = np.asarray(coeff_b(gamma, t_grid))
    c_t = np.asarray(coeff_c(gamma, t_grid))
    d_r = np.asarray(coeff_d(gamma, r_grid))
    e_r = np.asarray(coeff_e(gamma, r_grid))

    nt = t_grid.size
    best = (-np.inf, 0.0, 0.0, 0.0, -1)  # phi, alpha, r, t, flat index
    shards = max(1, int(shards))
    bounds = np.linspace(0, r_grid.size, shards + 1, dtype=int)
    for s in range(shards):
        sl = slice(bounds[s], bounds[s + 1])
        if sl.start == sl.stop:
            continue
        lo1, hi1 = _alpha_interval(b_t[None, :], d_r[sl, None])
        lo2, hi2 = _alpha_interval(c_t[None, :], e_r[sl, None])
        lo = np.maximum(lo1, lo2)
        hi = np.minimum(hi1, hi2)
        feasible = lo <= hi
        if not feasible.any():
            continue
        phi_lo = (1.0 - lo) * a_t[None, :]
        phi_hi = (1.0 - hi) * a_t[None, :]
        use_lo = phi_lo >= phi_hi
        phi = np.where(use_lo, phi_lo, phi_hi)
        phi = np.where(feasible, phi, -np.inf)
        k = int(np.argmax(phi))
        val = float(phi.flat[k])
        if not math.isfinite(val):
            continue
        i, j = divmod(k, nt)
        flat = (sl.start + i) * nt + j
        alpha = float((lo if use_lo.flat[k] else hi)[i, j])
        if val > best[0] or (val == best[0] and flat < best[4]):
            best = (val, alpha, float(r_grid[sl.start + i]), float(t_grid[j]), flat)
    if not math.isfinite(best[0]):
        return 0.0, 0.0, 0.0, 0.0, False
    return best[0], best[1], best[2], best[3], True


def optimize_phi(
    gamma: float,
    r_max: float = 10.0,
    grid_r: int = 1000,
    grid_t: int = 999,
    shards: int = 1,
) -> PhiResult:
    """Maximize (1-alpha) * coeff_a(gamma, t_s) over the feasible region.

    Grid search over (r, t_s) with closed-form optimal alpha per point,
    then one refinement pass at a tenth of the grid step around the
    incumbent (never decreasing the result).  The refinement admits the
    closed t_s in [0,1]: the coefficients extend continuously to the
    boundary and the optimum often sits at t_s = 0.
    """
    gamma = _check_gamma(gamma)
    if grid_r < 100 or grid_t < 100:
        raise ParameterError("grids must have at least 100 points each")
    r_grid = np.linspace(0.0, r_max, grid_r)
    t_grid = np.linspace(0.001, 0.999, grid_t)
    phi, alpha, r, t, feasible = _grid_best(gamma, r_grid, t_grid, shards)
    if not feasible:
        return PhiResult(gamma, 0.0, 0.0, 0.0, 0.0, baseline_kappa(gamma), False)

    step_r = r_grid[1] - r_grid[0]
    step_t = t_grid[1] - t_grid[0]
    fine_r = np.clip(np.linspace(r - step_r, r + step_r, 21), 0.0, r_max)
    fine_t = np.clip(np.linspace(t - step_t, t + step_t, 21), 0.0, 1.0)
    phi2, alpha2, r2, t2, feasible2 = _grid_best(gamma, fine_r, fine_t)
    if feasible2 and phi2 > phi:
        phi, alpha, r, t = phi2, alpha2, r2, t2

    _assert_feasible(gamma, alpha, r, t)
    return PhiResult(gamma, phi, alpha, r, t, baseline_kappa(gamma), True)


def _assert_feasible(gamma: float, alpha: float, r: float, t_s: float) -> None:
    mix1 = (1.0 - alpha) * coeff_b(gamma, t_s) + alpha * coeff_d(gamma, r)
    mix2 = (1.0 - alpha) * coeff_c(gamma, t_s) + alpha * coeff_e(gamma, r)
    if mix1 < -FEAS_TOL or mix2 < -FEAS_TOL:
        raise InternalInvariantError(
            f"optimizer returned an infeasible triple: mixes ({mix1!r}, {mix2!r})"
        )


def emit_curve(gammas: Sequence[float], out: TextIO, **grid_kwargs) -> list[PhiResult]:
    """Write the guarantee curve as CSV rows (gamma, phi, kappa, alpha, r, t_s).

    ``gammas`` must be sorted and each in (0,1].  Values print with six
    decimal places and LF line endings.
    """
    gammas = list(gammas)
    if any(not 0.0 < g <= 1.0 for g in gammas):
        raise ParameterError("every gamma must lie in (0,1]")
    if gammas != sorted(gammas):
        raise ParameterError("gammas must be sorted ascending")
    out.write("gamma,phi,kappa,alpha,r,t_s\n")
    results = []
    for g in gammas:
        res = optimize_phi(g, **grid_kwargs)
        results.append(res)
        out.write(
            f"{res.gamma:.6f},{res.phi:.6f},{res.baseline:.6f},"
            f"{res.alpha:.6f},{res.r:.6f},{res.t_s:.6f}\n"
        )
    return results
