"""Frank-Wolfe-guided measured continuous greedy.

The run grows a solution y from the origin by measured steps
``y <- y + delta (1 - y - z_sched) * x``, where each step's direction x
is an approximate local maximum of the objective's linearization over
the body cut by a value-target halfspace.  The targets come from a
two-phase schedule: before the switch index the schedule leans on a
seed vector z (whose coordinates are held out of the measured residual),
after it the seed is dropped and the schedule decays geometrically.

The targets depend on three surrogate values (for the unknown optimum,
its product with the seed, and its probabilistic sum with the seed).
``guess_triples`` enumerates a constant-size family guaranteed to
contain surrogates sandwiching the true values, given any constant-
factor estimate of the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .bodies import AnyBody, Halfspace, lp_maximize
from .errors import ParameterError
from .lattice import ArrayLike, Point, as_array
from .local_search import fw_local_max
from .objectives import Objective

EMPTY_REGION_TOL = 1e-9  # the cut region is empty iff the LP optimum is below
                         # the threshold by more than this


def _int_if_close(x: float) -> float:
    r = round(x)
    return float(r) if abs(x - r) < 1e-9 else x


@dataclass(frozen=True)
class FwgConfig:
    """Run parameters; ``normalized()`` snaps delta so 1/delta is an
    integer no larger than 1/epsilon."""

    t_s: float
    epsilon: float
    delta: float
    gamma: float
    use_late_threshold_at_switch: bool = False  # the two schedules overlap at
    # the switch index; the early one applies there unless this is set

    def __post_init__(self):
        if not 0.0 < self.t_s < 1.0:
            raise ParameterError(f"t_s must be in (0,1), got {self.t_s}")
        if not 0.0 < self.epsilon < 0.5:
            raise ParameterError(f"epsilon must be in (0,0.5), got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ParameterError(f"delta must be in (0,1), got {self.delta}")
        if not 0.0 < self.gamma <= 1.0:
            raise ParameterError(f"gamma must be in (0,1], got {self.gamma}")

    def normalized(self) -> "FwgConfig":
        steps = math.ceil(_int_if_close(1.0 / min(self.delta, self.epsilon)))
        return replace(self, delta=1.0 / steps)

    @property
    def steps(self) -> int:
        inv = _int_if_close(1.0 / self.delta)
        if inv != int(inv):
            raise ParameterError("config is not normalized: 1/delta is not an integer")
        return int(inv)

    @property
    def switch_index(self) -> int:
        return math.ceil(_int_if_close(self.t_s * self.steps))

    @property
    def beta(self) -> float:
        """Per-step decay rate of the residual toward the target."""
        g2d = self.gamma * self.gamma * self.delta
        return g2d / (1.0 - self.delta + g2d)


@dataclass(frozen=True)
class GuessTriple:
    """Surrogates for the optimum value and its seed-product / seed-sum values."""

    g: float
    g_odot: float
    g_oplus: float

    def __post_init__(self):
        if min(self.g, self.g_odot, self.g_oplus) < 0:
            raise ParameterError("surrogate values must be nonnegative")


def threshold_before_switch(i: int, triple: GuessTriple, cfg: FwgConfig) -> float:
    """Value target while the seed is still held out (0 <= i <= switch)."""
    beta, gamma, eps = cfg.beta, cfg.gamma, cfg.epsilon
    decay = (1.0 - beta) ** i
    return (
        (decay + (1.0 - decay - 2.0 * eps) / gamma) * triple.g
        - triple.g_odot / gamma
        - (1.0 - decay) / gamma * triple.g_oplus
    )


def threshold_after_switch(i: int, triple: GuessTriple, cfg: FwgConfig) -> float:
    """Value target once the seed is dropped (i >= switch)."""
    beta, gamma, eps = cfg.beta, cfg.gamma, cfg.epsilon
    i_s = cfg.switch_index
    lift = (1.0 - beta) ** (-i_s)
    coeff_g = lift / gamma - (1.0 + 3.0 / gamma) * eps + 1.0 - 1.0 / gamma
    coeff_sum = lift / gamma - 1.0 / gamma - beta * (i - i_s)
    return (1.0 - beta) ** i * (coeff_g * triple.g - coeff_sum * triple.g_oplus)


def threshold_schedule(triple: GuessTriple, cfg: FwgConfig) -> list[float]:
    """Targets v(0..steps-1); the early schedule applies at the switch
    index unless the config says otherwise."""
    i_s = cfg.switch_index
    out = []
    for i in range(cfg.steps):
        early = i < i_s or (i == i_s and not cfg.use_late_threshold_at_switch)
        out.append(
            threshold_before_switch(i, triple, cfg)
            if early
            else threshold_after_switch(i, triple, cfg)
        )
    return out


def guess_triples(v: float, c: float, gamma: float, epsilon: float) -> list[GuessTriple]:
    """Constant-size surrogate family bracketing the unknown values.

    ``v`` is a constant-factor estimate of the optimum: c*OPT <= v <= OPT.
    The optimum surrogate runs down a geometric grid from v/c; the other
    two run up arithmetic grids in units of epsilon times the optimum
    surrogate, wide enough to cover [0, OPT] and [0, (1+1/gamma) OPT].
    """
    if not 0.0 < c <= 1.0:
        raise ParameterError(f"c must be in (0,1], got {c}")
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must be in (0,1], got {gamma}")
    if not 0.0 < epsilon < 1.0:  # wider than the run config allows; the grids stay valid
        raise ParameterError(f"epsilon must be in (0,1), got {epsilon}")
    if v < 0:
        raise ParameterError(f"estimate v must be nonnegative, got {v}")
    if v == 0.0:
        return [GuessTriple(0.0, 0.0, 0.0)]

    levels = max(0, math.ceil(math.log(c) / math.log(1.0 - epsilon)))
    while (1.0 - epsilon) ** levels > c:  # guard against float rounding in the ceil
        levels += 1
    k_odot = math.ceil(1.0 / (epsilon * (1.0 - epsilon)))
    k_oplus = math.ceil((1.0 + 1.0 / gamma) / (epsilon * (1.0 - epsilon)))

    triples = []
    for i in range(levels + 1):
        g = (1.0 - epsilon) ** i * v / c
        for j in range(k_odot + 1):
            for k in range(k_oplus + 1):
                triples.append(GuessTriple(g, epsilon * j * g, epsilon * k * g))
    return triples


@dataclass(frozen=True)
class FwgOutput:
    y_final: Point
    x_sequence: tuple[Point, ...]
    q_empty_steps: tuple[int, ...]  # 1-based steps whose cut region was empty
    triple_used: GuessTriple
    config: FwgConfig
    y_trace: tuple[np.ndarray, ...] = field(repr=False)  # y(0..steps), raw iterates
    thresholds: tuple[float, ...] = field(repr=False)  # v(0..steps-1)

    @property
    def q_empty_at(self) -> Optional[int]:
        return self.q_empty_steps[0] if self.q_empty_steps else None


def run_fwg(
    f: Objective, body: AnyBody, z: ArrayLike, triple: GuessTriple, cfg: FwgConfig
) -> FwgOutput:
    """One full measured-greedy run for a fixed surrogate triple.

    Deterministic: identical inputs produce bit-identical traces.  When a
    step's cut region is empty the step direction falls back to the
    origin (neutral for the measured update) and the step is recorded.
    """
    cfg = cfg.normalized()
    z = as_array(z)
    if not body.is_feasible(z, 1e-7):
        raise ParameterError("seed vector must be feasible in the body")
    gamma = cfg.gamma
    delta = cfg.delta
    m = cfg.steps
    i_s = cfg.switch_index
    targets = threshold_schedule(triple, cfg)
    zero = np.zeros(f.dimension)

    y = np.zeros(f.dimension)
    y_trace = [y.copy()]
    xs: list[Point] = []
    empty_steps: list[int] = []
    for i in range(1, m + 1):
        z_prev = z if (i - 1) < i_s else zero
        residual = 1.0 - y - z_prev
        w = residual * f.grad(y)
        thr = gamma * (targets[i - 1] - f.value(y))
        probe = lp_maximize(body, w)
        assert probe is not None  # the body always contains the origin
        witness, opt = probe
        if opt < thr - EMPTY_REGION_TOL:
            empty_steps.append(i)
            x = zero
        else:
            cut = Halfspace(w, thr)
            x = fw_local_max(f, body, extra=cut, delta=delta, start=witness).point.coords
        xs.append(Point(x))
        y = y + delta * residual * x
        y_trace.append(y.copy())

    return FwgOutput(
        y_final=Point(y),
        x_sequence=tuple(xs),
        q_empty_steps=tuple(empty_steps),
        triple_used=triple,
        config=cfg,
        y_trace=tuple(y_trace),
        thresholds=tuple(targets),
    )


def closed_form_iterate(
    x_sequence: tuple[Point, ...], z: ArrayLike, i: int, switch_index: int, delta: float
) -> np.ndarray:
    """Direct (non-recursive) expression for y(i).

    Before the switch, y(i) is the seed complement times the running
    probabilistic sum of the scaled directions; after it, the seed's
    share accumulates its own probabilistic sum of post-switch
    directions.  Agreement with the recursive update is the strongest
    internal consistency check of the measured step.
    """
    z = as_array(z)
    acc_all = np.zeros_like(z)
    acc_late = np.zeros_like(z)
    for j in range(1, i + 1):
        step = delta * x_sequence[j - 1].coords
        acc_all = 1.0 - (1.0 - acc_all) * (1.0 - step)
        if j >= switch_index + 1:
            acc_late = 1.0 - (1.0 - acc_late) * (1.0 - step)
    if i <= switch_index:
        return (1.0 - z) * acc_all
    return (1.0 - z) * acc_all + z * acc_late
