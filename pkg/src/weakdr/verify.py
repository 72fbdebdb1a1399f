"""Property suites: the package's inequalities checked on fresh samples.

Each suite draws randomized certified instances (quadratics with
nonpositive curvature carry the exact certificate gamma = 1, separable
exponentials carry exp(-max a), mixed quadratics get an empirical
certificate with a 0.02 safety slack) and asserts the weak-DR
inequalities at a 1e-6 tolerance.  A failure returns the offending
instance as a serializable dict so the CLI can write a replay file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bodies import AnyBody, Box, Knapsack, lp_maximize
from .double_greedy import double_greedy, unbalanced_bound
from .errors import WeakDRError
from .fwg import FwgConfig, GuessTriple, closed_form_iterate, run_fwg
from .local_search import fw_local_max, lattice_bound_check
from .objectives import (
    Objective,
    QuadraticObjective,
    SeparableExponential,
    estimate_gamma,
    make_rng,
    monotone_quadratic_gamma,
    restrict_to_box,
    shift_by_prob_sum,
)

LEMMA_TOL = 1e-6
GAMMA_SLACK = 0.02  # empirical certificates are tested with this much headroom

SUITE_NAMES = ("lemmas", "double-greedy", "fwg-consistency", "all")


@dataclass
class Failure:
    suite: str
    check: str
    detail: str
    instance: Optional[dict] = None


@dataclass
class VerifyResult:
    suite: str
    trials: int
    checks_run: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class GammaBand:
    """Certified range for the true weak-DR parameter.

    Exact families pin lo == hi.  Empirical certificates get a symmetric
    sampling slack; inequality checks are evaluated against the weaker
    of the two endpoints, which is sound whenever the true parameter
    lies inside the band.
    """

    lo: float
    hi: float

    @classmethod
    def exact(cls, gamma: float) -> "GammaBand":
        return cls(gamma, gamma)

    @classmethod
    def sampled(cls, gamma_hat: float) -> "GammaBand":
        return cls(max(1e-9, gamma_hat - GAMMA_SLACK), min(1.0, gamma_hat + GAMMA_SLACK))

    def weakest(self, rhs_of_gamma, kind: str) -> float:
        """Weaker requirement over the band: min of the RHS for >= checks,
        max for <= checks."""
        lo, hi = rhs_of_gamma(self.lo), rhs_of_gamma(self.hi)
        return min(lo, hi) if kind == "ge" else max(lo, hi)


def _random_quadratic(rng: np.random.Generator, n: int, mixed: bool) -> tuple[Objective, GammaBand, dict]:
    """A certified quadratic instance.

    ``mixed=False`` draws nonpositive curvature: gamma = 1 exactly.
    ``mixed=True`` adds positive off-diagonal curvature but keeps the
    gradient positive on the whole cube, so the function is genuinely
    weakly DR and its exact gamma < 1 comes from corner-pair enumeration
    (arbitrary sign patterns need not be weakly DR for any gamma).
    """
    M = -rng.random((n, n))
    H = (M + M.T) / 2.0
    if mixed:
        lift = 0.3 * rng.random((n, n))
        lift = (lift + lift.T) / 2.0
        np.fill_diagonal(lift, 0.0)  # keep per-coordinate concavity
        H = H + lift
        h = np.maximum(0.0, -H).sum(axis=1) + 0.1 + 0.7 * rng.random(n)
        gamma = monotone_quadratic_gamma(H, h)
    else:
        h = rng.random(n) + 0.5
        gamma = 1.0
    quad = QuadraticObjective(H, h, c=None, gamma=1.0)
    spec = {
        "type": "quadratic",
        "H": H.tolist(),
        "h": h.tolist(),
        "c": quad.c,
        "gamma_certified": gamma,
    }
    return quad.with_gamma(gamma), GammaBand.exact(gamma), spec


def _random_exponential(rng: np.random.Generator, n: int) -> tuple[Objective, GammaBand, dict]:
    a = 0.2 + 1.3 * rng.random(n)
    b = 0.2 + rng.random(n)
    f = SeparableExponential(a, b)
    spec = {"type": "separable_exponential", "a": a.tolist(), "b": b.tolist()}
    return f, GammaBand.exact(f.gamma), spec


def _random_certified(rng: np.random.Generator, n: int) -> tuple[Objective, GammaBand, dict]:
    kind = int(rng.integers(3))
    if kind == 0:
        return _random_quadratic(rng, n, mixed=False)
    if kind == 1:
        return _random_exponential(rng, n)
    return _random_quadratic(rng, n, mixed=True)


def _random_body(rng: np.random.Generator, n: int) -> AnyBody:
    if rng.integers(2) == 0:
        return Box(0.4 + 0.6 * rng.random(n))
    a = 0.3 + rng.random(n)
    return Knapsack(a, float(0.4 * a.sum()))


def _random_feasible(rng: np.random.Generator, body: AnyBody) -> np.ndarray:
    vertex = lp_maximize(body, rng.random(body.dimension) - 0.3)[0].coords
    return rng.random(body.dimension) * vertex  # down-closedness keeps it inside


def suite_lemmas(trials: int, seed: int) -> VerifyResult:
    """Weak-DR inequalities: convex-combination and increment bounds,
    the two gradient pairings, closure under composition, and the
    local-max lattice bound after Frank-Wolfe search."""
    rng = make_rng(seed)
    result = VerifyResult("lemmas", trials)
    for trial in range(trials):
        n = int(rng.integers(1, 7))
        f, band, spec = _random_certified(rng, n)

        for rep in range(200):
            x = rng.random(n)
            y = rng.random(n)
            lam = float(rng.random())
            result.checks_run += 4
            _check_convex_combo(result, f, band, x, y, lam, spec)
            _check_increment(result, f, band, x, y, lam, spec)
            _check_gradient_pairings(result, f, band, x, y, spec)
            if result.failures:
                return result

        result.checks_run += 1
        _check_composition_closure(result, f, band, rng, spec)

        result.checks_run += 1
        _check_local_max_bound(result, f, band, rng, spec)
        if result.failures:
            return result
    return result


def _check_convex_combo(result, f, band, x, y, lam, spec):
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    mid = lam * lo + (1.0 - lam) * hi
    f_lo, f_hi = f.value(lo), f.value(hi)

    def rhs(g):
        g2 = g * g
        return (lam * f_lo + g2 * (1.0 - lam) * f_hi) / (lam + g2 * (1.0 - lam))

    need = band.weakest(rhs, "ge")
    if f.value(mid) < need - LEMMA_TOL:
        result.failures.append(
            Failure("lemmas", "convex-combination bound",
                    f"F(mix)={f.value(mid)!r} < rhs={need!r}", spec)
        )


def _check_increment(result, f, band, x, y, lam, spec):
    y = y * (1.0 - x)  # ensures x + y stays inside the cube
    lhs = f.value(x + lam * y) - f.value(x)
    full_gain = f.value(x + y) - f.value(x)

    def rhs(g):
        g2 = g * g
        return g2 * lam / (1.0 - lam + g2 * lam) * full_gain if lam > 0 else 0.0

    need = band.weakest(rhs, "ge")
    if lhs < need - LEMMA_TOL:
        result.failures.append(
            Failure("lemmas", "increment bound", f"lhs={lhs!r} < rhs={need!r}", spec)
        )


def _check_gradient_pairings(result, f, band, x, y, spec):
    up = y * (1.0 - x)  # x + up <= 1
    inner_up = float(f.grad(x) @ up)
    gain = f.value(x + up) - f.value(x)
    need_up = band.weakest(lambda g: g * gain, "ge")
    if inner_up < need_up - LEMMA_TOL:
        result.failures.append(
            Failure("lemmas", "gradient lower pairing",
                    f"<grad,y>={inner_up!r} < gamma*gain={need_up!r}", spec)
        )
    down = y * x  # x - down >= 0
    inner_down = float(f.grad(x) @ down)
    loss = f.value(x) - f.value(x - down)
    allow_down = band.weakest(lambda g: loss / g, "le")
    if inner_down > allow_down + LEMMA_TOL:
        result.failures.append(
            Failure("lemmas", "gradient upper pairing",
                    f"<grad,y>={inner_down!r} > loss/gamma={allow_down!r}", spec)
        )


def _check_composition_closure(result, f, band, rng, spec):
    """Composing with a fixed base under product or probabilistic sum
    keeps the certificate.  The composed estimate samples different
    regions than the base one, so it is compared against the *certified*
    lower edge of the base's band, not against the raw point estimate."""
    base = rng.random(f.dimension)
    seed = int(rng.integers(2**31))
    for name, composed in (
        ("product", restrict_to_box(f, base)),
        ("prob-sum", shift_by_prob_sum(f, base)),
    ):
        g_c = estimate_gamma(composed, samples=300, seed=seed + 1)
        if g_c < band.lo - GAMMA_SLACK:
            result.failures.append(
                Failure("lemmas", f"closure under {name} composition",
                        f"composed certificate {g_c!r} below certified {band.lo!r} - {GAMMA_SLACK}", spec)
            )


def _check_local_max_bound(result, f, band, rng, spec):
    body = _random_body(rng, f.dimension)
    res = fw_local_max(f, body, delta=0.2)
    for _ in range(50):
        y = _random_feasible(rng, body)
        gap = float(f.grad(res.point) @ (y - res.point.coords))
        if gap > res.min_fw_gap + 1e-7:
            result.failures.append(
                Failure("lemmas", "uniform first-order certificate",
                        f"gap {gap!r} exceeds certified {res.min_fw_gap!r}", spec)
            )
            return
        ok = lattice_bound_check(f, res.point, y, band.lo, res.min_fw_gap) or (
            band.hi != band.lo
            and lattice_bound_check(f, res.point, y, band.hi, res.min_fw_gap)
        )
        if not ok:
            result.failures.append(
                Failure("lemmas", "local-max lattice bound",
                        f"failed against comparator {y.tolist()!r}", spec)
            )
            return


def suite_double_greedy(trials: int, seed: int) -> VerifyResult:
    """Output value dominates the unbalanced guarantee computed from a
    brute-force grid optimum."""
    rng = make_rng(seed)
    result = VerifyResult("double-greedy", trials)
    for trial in range(trials):
        n = int(rng.integers(1, 4))
        f, band, spec = _random_quadratic(rng, n, mixed=False)
        gamma = band.lo  # exact for these instances
        eps = float(rng.choice([0.25, 0.5]))
        trace = double_greedy(f, gamma, eps)
        f_opt = grid_maximum(f, 10)
        _, bound = unbalanced_bound(
            f_opt, f.value(np.zeros(n)), f.value(np.ones(n)), gamma, trace.epsilon_used
        )
        result.checks_run += 1
        got = f.value(trace.final)
        if got < bound - 1e-7:
            result.failures.append(
                Failure("double-greedy", "unbalanced guarantee",
                        f"value {got!r} < bound {bound!r}", spec)
            )
            return result
    return result


def suite_fwg_consistency(trials: int, seed: int) -> VerifyResult:
    """Measured update equals its closed form, the terminal iterate is
    feasible, and each nonempty step makes the certified progress."""
    rng = make_rng(seed)
    result = VerifyResult("fwg-consistency", trials)
    for trial in range(trials):
        n = int(rng.integers(1, 5))
        f, _band, spec = _random_certified(rng, n)
        body = _random_body(rng, n)
        z = _random_feasible(rng, body)
        gamma = f.gamma  # consistency checks hold for whatever gamma drives the run
        cfg = FwgConfig(
            t_s=float(rng.uniform(0.2, 0.8)),
            epsilon=float(rng.uniform(0.26, 0.45)),
            delta=0.25,
            gamma=gamma,
        ).normalized()
        scale = max(f.value(np.ones(n)), f.value(np.zeros(n)), 1.0)
        triple = GuessTriple(
            float(rng.random()) * scale,
            float(rng.random()) * scale,
            float(rng.random()) * scale,
        )
        out = run_fwg(f, body, z, triple, cfg)
        result.checks_run += 3
        for i in range(cfg.steps + 1):
            ref = closed_form_iterate(out.x_sequence, z, i, cfg.switch_index, cfg.delta)
            if np.max(np.abs(out.y_trace[i] - ref)) > 1e-9:
                result.failures.append(
                    Failure("fwg-consistency", "closed-form agreement",
                            f"step {i} deviates by {np.max(np.abs(out.y_trace[i] - ref))!r}", spec)
                )
                return result
        if not body.is_feasible(out.y_final, 1e-7):
            result.failures.append(
                Failure("fwg-consistency", "terminal feasibility",
                        f"y={out.y_final.coords.tolist()!r}", spec)
            )
            return result
        slack = cfg.delta**2 * f.smoothness * body.diameter**2 / 2.0
        for i in range(1, cfg.steps + 1):
            if i in out.q_empty_steps:
                continue
            gain = f.value(out.y_trace[i]) - f.value(out.y_trace[i - 1])
            need = cfg.delta * gamma * (out.thresholds[i - 1] - f.value(out.y_trace[i - 1]))
            if gain < need - slack - LEMMA_TOL:
                result.failures.append(
                    Failure("fwg-consistency", "per-step progress",
                            f"step {i}: gain {gain!r} < {need!r} - {slack!r}", spec)
                )
                return result
    return result


def grid_maximum(f: Objective, k: int, body: Optional[AnyBody] = None) -> float:
    """Brute-force maximum of f over the {0, 1/k, ..., 1}^n grid,
    optionally filtered to a body.  Exponential in n; test-scale only."""
    n = f.dimension
    axes = np.linspace(0.0, 1.0, k + 1)
    best = -math.inf
    for idx in np.ndindex(*([k + 1] * n)):
        x = axes[list(idx)]
        if body is not None and not body.is_feasible(x):
            continue
        best = max(best, f.value(x))
    return best


SUITES: dict[str, Callable[[int, int], VerifyResult]] = {
    "lemmas": suite_lemmas,
    "double-greedy": suite_double_greedy,
    "fwg-consistency": suite_fwg_consistency,
}


def run_suite(name: str, trials: int, seed: int) -> list[VerifyResult]:
    if name == "all":
        return [fn(trials, seed) for fn in SUITES.values()]
    if name not in SUITES:
        raise WeakDRError(f"unknown suite {name!r}; choose from {SUITE_NAMES}")
    return [SUITES[name](trials, seed)]
