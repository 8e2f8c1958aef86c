"""Rate-weighted maximal functions, critical times, and local maximal bounds.

The central quantity is the grid statistic

    sup over a time grid of |U f(x, t) - f(x)| / t^delta,

a certified lower bound for the true supremum (a grid max never exceeds
the sup). Critical-time injection puts each counterexample family's
stationary time into the grid, which is exactly the evaluation the
lower-bound arguments use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from .curves import CurveSpec, MINUS_SHIFT, PLUS_SHIFT
from .errors import (
    DomainValidationError,
    ResolutionError,
    UnsupportedRegimeError,
    WindowError,
)
from .exponents import Regime, law_for
from .initial_data import (
    BOURGAIN,
    BUMP_DILATED,
    BUMP_MODULATED,
    BUMP_TENSOR,
    INDICATOR_BAND,
    FrequencyProfile,
    annulus_bump,
    decay_threshold,
)
from .propagator import DEFAULT_QUAD, QuadratureSpec, batch_values, certified_value, evaluate

_GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0
GOLDEN_ITERATIONS = 24


@dataclass(frozen=True)
class TimeGrid:
    """Dyadic-octave time grid t = 2^{-j}, optionally with injected times.

    j_min/j_max bound the octave range (j_min = None gives an
    injected-times-only grid). Injected times outside (0, 1] raise unless
    allow_outside is set, in which case they are dropped.
    """

    j_min: Optional[float] = None
    j_max: Optional[float] = None
    points_per_octave: int = 8
    injected: tuple = ()
    local_refinement: bool = True
    allow_outside: bool = False

    def __post_init__(self):
        if (self.j_min is None) != (self.j_max is None):
            raise DomainValidationError("j_min and j_max must be given together")
        if self.j_min is not None:
            if self.j_min < 0 or self.j_max < self.j_min:
                raise DomainValidationError("need 0 <= j_min <= j_max")
            if self.points_per_octave < 1:
                raise DomainValidationError("points_per_octave must be >= 1")
        for t in self.injected:
            if not 0.0 < t <= 1.0 and not self.allow_outside:
                raise DomainValidationError(
                    f"injected time {t} outside (0, 1]; set allow_outside to drop it"
                )

    def times(self) -> np.ndarray:
        """All grid times, increasing, injected merged in."""
        ts = []
        if self.j_min is not None:
            n = max(1, int(round((self.j_max - self.j_min) * self.points_per_octave)))
            js = np.linspace(self.j_min, self.j_max, n + 1)
            ts.extend(2.0 ** (-js))
        ts.extend(t for t in self.injected if 0.0 < t <= 1.0)
        if not ts:
            raise DomainValidationError("empty time grid")
        return np.unique(np.asarray(ts, dtype=float))


@dataclass(frozen=True)
class MaximalField:
    """Per-x rate-weighted sup values with their argmax times."""

    xs: np.ndarray
    sup_values: np.ndarray
    argmax_times: np.ndarray
    delta: float
    ball: tuple
    node_count_max: int = 0

    def to_dict(self):
        return {
            "xs": [float(v) for v in self.xs],
            "sup_values": [float(v) for v in self.sup_values],
            "argmax_times": [float(v) for v in self.argmax_times],
            "delta": self.delta,
            "ball": list(self.ball),
            "node_count_max": int(self.node_count_max),
        }


# ---------------------------------------------------------------------------
# admissible windows and the window constant


#: descending ladder of candidate window constants
WINDOW_LADDER = (3.2, 1.6, 0.9, 0.8, 0.64, 0.4, 0.32, 0.2, 0.16, 0.08, 0.04, 0.02, 0.01, 0.005)

_FAMILY_CURVE = {
    BUMP_DILATED: MINUS_SHIFT,
    BUMP_MODULATED: MINUS_SHIFT,
    BUMP_TENSOR: MINUS_SHIFT,
    BOURGAIN: MINUS_SHIFT,
    INDICATOR_BAND: PLUS_SHIFT,
}


def family_curve_kind(family: str) -> str:
    try:
        return _FAMILY_CURVE[family]
    except KeyError:
        raise DomainValidationError(f"{family!r} is not a counterexample family") from None


def admissible_window(family: str, R: float, alpha: float, epsilon: float, c: float):
    """Spatial window (lo, hi) on which the family's lower bound operates."""

    if family == BUMP_DILATED:
        return (0.5 * c * R ** (-2.0 * alpha), c * R ** (-2.0 * alpha))
    if family == BUMP_MODULATED:
        return (0.5 * c, c)
    if family == BUMP_TENSOR:
        return (0.5 * c * R ** (epsilon - 1.0), c * R ** (epsilon - 1.0))
    if family == INDICATOR_BAND:
        return (-c, c)
    if family == BOURGAIN:
        return (-c, -0.5 * c)
    raise DomainValidationError(f"{family!r} has no admissible window")


def calibrate_window_constant(
    family: str,
    alpha: float,
    R_min: float = 64.0,
    R_max: float = 1024.0,
) -> float:
    """Deterministic window constant per family.

    Walks the descending ladder and returns the first (largest) constant
    whose family-specific predicate holds. The predicates encode the
    pointwise inequalities the lower-bound arguments need, restated at
    desk scale:

    bump-modulated: the window must clear the bump transform's decay
      threshold at the smallest R (|f| <= 1/(8*pi) there) while the
      critical phase t_x R^2 xi^2 <= c/4 stays small.
    bump-dilated: window inside the unit ball at the smallest R, critical
      phase budget c^{1/alpha}/4 <= 100 (the stationary-phase value is
      R-free either way), and |f| decayed at the largest R.
    bump-tensor: residual critical phase sqrt(c) <= 1/4.
    indicator-band: first-order band phase c^alpha + c <= 0.35 so the
      linearization dominates the Taylor tail with a factor-2 cushion.
    bourgain: window inside the unit ball.
    """

    X0 = decay_threshold()
    for c in WINDOW_LADDER:
        if family == BUMP_MODULATED:
            if c <= 0.9 and 0.5 * c * R_min >= X0:
                return c
        elif family == BUMP_DILATED:
            ok_ball = c * R_min ** (-2.0 * alpha) <= 0.9
            ok_phase = c ** (1.0 / alpha) / 4.0 <= 100.0
            ok_decay = 0.5 * c * R_max ** (1.0 - 2.0 * alpha) >= X0
            if ok_ball and ok_phase and ok_decay:
                return c
        elif family == BUMP_TENSOR:
            if math.sqrt(c) <= 0.25:
                return c
        elif family == INDICATOR_BAND:
            if c ** alpha + c <= 0.35:
                return c
        elif family == BOURGAIN:
            if c <= 0.9:
                return c
        else:
            raise DomainValidationError(f"{family!r} has no window constant")
    raise WindowError(f"no ladder constant satisfies the {family} calibration predicate")


# ---------------------------------------------------------------------------
# critical times


def _bisect_root(h, lo: float, hi: float, iterations: int = 100) -> float:
    flo, fhi = h(lo), h(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise WindowError(
            f"no sign change on ({lo}, {hi}); the point lies outside the admissible window"
        )
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fm = h(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_time(
    family: str,
    curve: CurveSpec,
    R: float,
    epsilon: float,
    x,
    window_constant: Optional[float] = None,
) -> float:
    """Per-x time at which the family's oscillatory phase is stationary.

    bump-dilated: x^{1/alpha}.  bump-tensor: x_1 / R^{1+eps}.
    bump-modulated: the unique root of x - t^alpha - 2 R^2 t (bisection to
    relative 1e-12). indicator-band: c * R^{-1/alpha}, x-free.
    bourgain: the root of x - t^alpha + 2 R t (x < 0).
    """

    alpha = curve.alpha
    expected = family_curve_kind(family)
    if curve.kind != expected:
        raise DomainValidationError(
            f"{family} uses the {expected} curve, got {curve.kind}"
        )
    x1 = float(np.atleast_1d(np.asarray(x, dtype=float))[0])

    if family == BUMP_DILATED:
        if x1 <= 0:
            raise WindowError("bump-dilated critical time needs x > 0")
        return x1 ** (1.0 / alpha)

    if family == BUMP_TENSOR:
        if x1 <= 0:
            raise WindowError("bump-tensor critical time needs x_1 > 0")
        return x1 / R ** (1.0 + epsilon)

    if family == BUMP_MODULATED:
        if x1 <= 0:
            raise WindowError("bump-modulated critical time needs x > 0")
        h = lambda t: x1 - t ** alpha - 2.0 * R * R * t
        return _bisect_root(h, 0.0, min(1.0, x1))

    if family == INDICATOR_BAND:
        c = 0.01 if window_constant is None else window_constant
        return c * R ** (-1.0 / alpha)

    if family == BOURGAIN:
        if x1 >= 0:
            raise WindowError("bourgain critical time needs x_1 < 0")
        h = lambda t: x1 - t ** alpha + 2.0 * R * t
        return _bisect_root(h, 0.0, min(1.0, (abs(x1) + 1.0) / (2.0 * R)))

    raise DomainValidationError(f"{family!r} has no critical time")


# ---------------------------------------------------------------------------
# rate-weighted suprema


def _golden_refine(score, lo: float, hi: float, iterations: int = GOLDEN_ITERATIONS):
    """Deterministic golden-section maximization of score on [lo, hi]."""

    a, b = lo, hi
    c = b - (b - a) / _GOLDEN_RATIO
    d = a + (b - a) / _GOLDEN_RATIO
    fc, fd = score(c), score(d)
    for _ in range(iterations):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - (b - a) / _GOLDEN_RATIO
            fc = score(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) / _GOLDEN_RATIO
            fd = score(d)
    t_best = c if fc > fd else d
    return t_best, max(fc, fd)


def rate_weighted_sup(
    profile: FrequencyProfile,
    curve: CurveSpec,
    m: float,
    delta: float,
    x,
    grid: TimeGrid,
    quad: Optional[QuadratureSpec] = None,
):
    """Grid statistic sup_t |U f(x,t) - f(x)| / t^delta at a single x.

    Returns (sup, argmax_t). This is a certified lower bound for the true
    supremum; enlarging the grid can only increase it.
    """

    quad = quad or DEFAULT_QUAD
    if not 0.0 <= delta < 1.0:
        raise DomainValidationError("delta must lie in [0, 1)")
    ts = grid.times()

    if profile.d == 1 and curve.is_shift:
        values, initial, _ = batch_values(profile, curve, m, np.atleast_1d(float(x)), ts, quad)
        scores = np.abs(values[0] - initial[0]) / ts ** delta
        f0 = complex(initial[0])
    else:
        samples = [evaluate(profile, curve, m, x, float(t), quad) for t in ts]
        f0 = samples[0].initial
        scores = np.array([abs(s.value - s.initial) for s in samples]) / ts ** delta

    best = int(np.argmax(scores))
    sup, arg = float(scores[best]), float(ts[best])

    if grid.local_refinement and len(ts) >= 3:
        lo = float(ts[max(0, best - 1)])
        hi = float(ts[min(len(ts) - 1, best + 1)])
        if hi > lo:
            def score(t):
                value, _ = certified_value(profile, curve, m, x, float(t), quad)
                return abs(value - f0) / t ** delta

            t_ref, s_ref = _golden_refine(score, lo, hi)
            if s_ref > sup:
                sup, arg = float(s_ref), float(t_ref)
    return sup, arg


def maximal_field(
    profile: FrequencyProfile,
    curve: CurveSpec,
    m: float,
    delta: float,
    xs: np.ndarray,
    grid: TimeGrid,
    quad: Optional[QuadratureSpec] = None,
    critical_times: Optional[np.ndarray] = None,
    ball: Optional[tuple] = None,
) -> MaximalField:
    """Rate-weighted sup over a whole spatial window (vectorized).

    critical_times, when given, injects one extra per-x time into each
    point's grid (the counterexample families' stationary times).
    """

    quad = quad or DEFAULT_QUAD
    if not 0.0 <= delta < 1.0:
        raise DomainValidationError("delta must lie in [0, 1)")
    xs = np.asarray(xs, dtype=float)
    if ball is None:
        # midpoint grids: the covered interval extends half a cell past the
        # extreme points on each side
        h = float(xs[1] - xs[0]) if len(xs) > 1 else 0.0
        ball = (float(0.5 * (xs.min() + xs.max())), float(0.5 * (xs.max() - xs.min() + h)))

    sup = np.zeros(len(xs))
    arg = np.zeros(len(xs))
    node_max = 0

    has_octaves = grid.j_min is not None or len(grid.injected) > 0
    initial = None
    if has_octaves:
        ts = grid.times()
        values, initial, node_counts = batch_values(profile, curve, m, xs, ts, quad)
        scores = np.abs(values - initial[:, None]) / ts[None, :] ** delta
        idx = np.argmax(scores, axis=1)
        sup = scores[np.arange(len(xs)), idx]
        arg = ts[idx]
        node_max = int(node_counts.max())

    if critical_times is not None:
        critical_times = np.asarray(critical_times, dtype=float)
        if critical_times.shape != xs.shape:
            raise DomainValidationError("critical_times must match the x grid")
        for tc in np.unique(critical_times):
            mask = critical_times == tc
            vals, init, counts = batch_values(profile, curve, m, xs[mask], [float(tc)], quad)
            sc = np.abs(vals[:, 0] - init) / tc ** delta
            better = sc > sup[mask]
            sup_mask = sup[mask]
            arg_mask = arg[mask]
            sup_mask[better] = sc[better]
            arg_mask[better] = tc
            sup[mask] = sup_mask
            arg[mask] = arg_mask
            node_max = max(node_max, int(counts.max()))

    if grid.local_refinement and has_octaves and len(ts := grid.times()) >= 3:
        f_all = initial if initial is not None else None
        for i, x in enumerate(xs):
            pos = int(np.searchsorted(ts, arg[i]))
            lo = float(ts[max(0, pos - 1)])
            hi = float(ts[min(len(ts) - 1, pos + 1)])
            if hi <= lo:
                continue
            f0 = complex(f_all[i])

            def score(t, _x=float(x), _f0=f0):
                value, _ = certified_value(profile, curve, m, _x, float(t), quad)
                return abs(value - _f0) / t ** delta

            t_ref, s_ref = _golden_refine(score, lo, hi)
            if s_ref > sup[i]:
                sup[i], arg[i] = float(s_ref), float(t_ref)

    return MaximalField(
        xs=xs,
        sup_values=sup,
        argmax_times=arg,
        delta=delta,
        ball=ball,
        node_count_max=node_max,
    )


def l2_over_ball(fld: MaximalField) -> float:
    """Midpoint-rule L^2 norm of the sup values over the field's ball."""

    center, radius = fld.ball
    xs = np.asarray(fld.xs, dtype=float)
    if len(xs) < 2:
        raise ResolutionError("need at least 2 grid points")
    h = (2.0 * radius) / len(xs)
    if h > radius / 64.0 + 1e-15:
        raise ResolutionError(
            f"x spacing {h} too coarse for ball radius {radius} (need <= radius/64)"
        )
    diffs = np.diff(xs)
    if not np.allclose(diffs, h, rtol=1e-6, atol=1e-12 * max(1.0, radius)):
        raise ResolutionError("x grid must be uniform midpoints over the ball")
    return float(math.sqrt(np.sum(fld.sup_values ** 2) * h))


def window_grid(lo: float, hi: float, n: int = 129) -> np.ndarray:
    """n midpoints of equal cells tiling [lo, hi]."""
    return lo + (np.arange(n) + 0.5) * (hi - lo) / n


# ---------------------------------------------------------------------------
# local-in-time maximal bounds (single dyadic frequency block)


def _lemma_selector(regime: Regime) -> str:
    rid = law_for(regime).regime_id
    if rid not in ("lipschitz", "holder-high-alpha", "holder-low-alpha", "holder-mid-alpha"):
        raise UnsupportedRegimeError(
            "local maximal bounds are available for the m = 2 regimes only"
        )
    return rid


def lemma_bound(regime: Regime, k: int, j: float) -> float:
    """Theoretical single-block bound 2^{e(k,j)} for sup over (0, 2^{-j}).

    The epsilon loss in the Lipschitz-regime exponent is reported at 0;
    all comparisons downstream are slope/trend based.
    """

    rid = _lemma_selector(regime)
    alpha = float(regime.alpha)
    if k < 1:
        raise DomainValidationError("need k >= 1")

    if rid == "lipschitz":
        if not k <= j <= 2 * k:
            raise DomainValidationError(f"j={j} outside [k, 2k] = [{k}, {2 * k}]")
        d = regime.d
        return 2.0 ** ((2 * k - j) * d / (2.0 * (d + 1)))

    if rid == "holder-high-alpha":
        if not k <= j <= 2 * k:
            raise DomainValidationError(f"j={j} outside [k, 2k] = [{k}, {2 * k}]")
        return 2.0 ** ((2 * k - j) / 4.0)

    if rid == "holder-low-alpha":
        if not 2 * k <= j <= k / alpha:
            raise DomainValidationError(f"j={j} outside [2k, k/alpha] = [{2 * k}, {k / alpha}]")
        return 2.0 ** ((k - alpha * j) / 2.0)

    # mid-alpha: three sub-ranges on [k, k/alpha]
    if not k <= j <= k / alpha:
        raise DomainValidationError(f"j={j} outside [k, k/alpha] = [{k}, {k / alpha}]")
    if j <= 4.0 * alpha * k:
        return 2.0 ** ((2 * k - j) / 4.0)
    if j <= 2 * k:
        return 2.0 ** ((0.5 - alpha) * k)
    return 2.0 ** ((k - alpha * j) / 2.0)


def lemma_profile(
    regime: Regime,
    k: int,
    js: Sequence[float],
    curve: CurveSpec,
    quad: Optional[QuadratureSpec] = None,
    points_per_octave: int = 5,
    pad_octaves: float = 5.0,
) -> Dict[float, float]:
    """Empirical ||sup_{t in (0, 2^{-j})} |U f_k| ||_{L^2([-1,1])} for several j.

    Uses the unit-L^2 annulus bump at scale k and one shared master time
    grid, accumulating prefix suprema from the smallest times upward, so
    the nesting monotonicity (larger j, smaller value) holds exactly.
    """

    quad = quad or DEFAULT_QUAD
    if regime.d != 1:
        raise DomainValidationError("empirical local-bound checks run at desk scale d = 1")
    for j in js:
        lemma_bound(regime, k, j)  # validates the (k, j) range
    profile = annulus_bump(k)
    targets = sorted(set(float(j) for j in js))
    j_lo, j_hi = targets[0], targets[-1] + pad_octaves
    n = int(round((j_hi - j_lo) * points_per_octave))
    master = np.unique(np.concatenate([np.linspace(j_lo, j_hi, n + 1), np.asarray(targets)]))
    ts = 2.0 ** (-master)  # decreasing in j, i.e. ts[0] is the largest time

    nx = 2 ** (k + 2)
    xs = window_grid(-1.0, 1.0, nx)
    values, _, _ = batch_values(profile, curve, 2.0, xs, list(ts), quad)
    mags = np.abs(values)

    h = 2.0 / nx
    out = {}
    sup = np.zeros(nx)
    for col in range(len(master) - 1, -1, -1):  # largest j (smallest t) first
        np.maximum(sup, mags[:, col], out=sup)
        jv = master[col]
        if any(abs(jv - tj) < 1e-9 for tj in targets):
            out[float(jv)] = float(math.sqrt(np.sum(sup ** 2) * h))
    return {float(j): out[float(j)] for j in js}


def lemma_empirical(
    regime: Regime,
    k: int,
    j: float,
    curve: CurveSpec,
    quad: Optional[QuadratureSpec] = None,
    **kwargs,
) -> float:
    """Single-(k, j) empirical local maximal norm (see lemma_profile)."""

    return lemma_profile(regime, k, [j], curve, quad, **kwargs)[float(j)]


# ---------------------------------------------------------------------------
# rate-ceiling demonstration


def rate_ceiling_demo(
    profile: FrequencyProfile,
    curve: CurveSpec,
    quad: Optional[QuadratureSpec] = None,
    x_star: float = 0.3,
    j_lo: int = 4,
    j_hi: int = 20,
):
    """Ratios |U f(x*, t) - f(x*)| / t^alpha along t = 2^{-j}.

    delta equals the curve's Hölder exponent exactly (the rate ceiling);
    returns (pairs, running_infimum) where pairs is a list of (t, ratio).
    """

    quad = quad or DEFAULT_QUAD
    if curve.kind not in (MINUS_SHIFT, PLUS_SHIFT):
        raise DomainValidationError("the rate ceiling concerns genuinely shifted curves")
    alpha = curve.alpha
    ts = 2.0 ** (-np.arange(j_lo, j_hi + 1, dtype=float))
    values, initial, _ = batch_values(profile, curve, 2.0, np.atleast_1d(float(x_star)), list(ts), quad)
    ratios = np.abs(values[0] - initial[0]) / ts ** alpha
    running = np.minimum.accumulate(ratios)
    pairs = [(float(t), float(r)) for t, r in zip(ts, ratios)]
    return pairs, [float(v) for v in running]
