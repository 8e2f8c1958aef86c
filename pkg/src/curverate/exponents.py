"""Sharp Sobolev-threshold atlas s(delta) for rate-weighted convergence.

Each supported regime (dimension, Hölder exponent alpha of the curve in
time, dispersion power m, Lipschitz vs Hölder smoothness) carries a
piecewise-affine threshold law: initial data in H^s converge at rate delta
when s > s(delta) and a counterexample curve exists when s < s(delta).
The pieces tile [0, delta_max) exactly and agree at the breakpoints.

All piece coefficients are built from the regime parameters with exact
rational constants, so calling with `fractions.Fraction` inputs yields
exact rational thresholds (used by the region-curve acceptance checks);
float inputs yield floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DeltaRangeError, DomainValidationError, UnsupportedRegimeError

LIPSCHITZ = "lipschitz"
HOLDER = "holder"

ABOVE = "above-threshold"
BELOW = "below-threshold"
BOUNDARY = "on-boundary"

BOUNDARY_TOL = 1e-12

_ONE = Fraction(1)
_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class Regime:
    """A convergence-rate regime: dimension, curve smoothness, dispersion power.

    `smoothness` is an explicit enum rather than being inferred from
    alpha == 1, because the fractional high-alpha laws also admit alpha = 1
    with m != 2 and dispatch must stay unambiguous.
    """

    d: int
    alpha: object = 1
    m: object = 2
    smoothness: str = HOLDER

    def __post_init__(self):
        if self.d < 1 or int(self.d) != self.d:
            raise DomainValidationError(f"dimension d={self.d} must be a positive integer")
        if not 0 < self.alpha <= 1:
            raise DomainValidationError(f"alpha={self.alpha} must lie in (0, 1]")
        if not self.m > 0:
            raise DomainValidationError(f"dispersion power m={self.m} must be positive")
        if self.smoothness not in (LIPSCHITZ, HOLDER):
            raise DomainValidationError(f"unknown smoothness {self.smoothness!r}")
        if self.smoothness == LIPSCHITZ and self.alpha != 1:
            raise DomainValidationError("Lipschitz-in-t regimes require alpha = 1")
        if self.m != 2 and self.d != 1:
            raise DomainValidationError("fractional regimes (m != 2) are one-dimensional")


@dataclass(frozen=True)
class RatePoint:
    """A (Sobolev regularity, convergence rate) pair."""

    s: float
    delta: float

    def __post_init__(self):
        if not (self.s >= 0 and self.delta >= 0):
            raise DomainValidationError("RatePoint needs s >= 0 and delta >= 0")


@dataclass(frozen=True)
class Piece:
    """Affine threshold piece s = slope*delta + intercept on [lo, hi)."""

    lo: object
    hi: object
    slope: object
    intercept: object

    def __call__(self, delta):
        return self.slope * delta + self.intercept


@dataclass(frozen=True)
class RegimeLaw:
    """A full threshold law: ordered pieces tiling [0, delta_max)."""

    regime_id: str
    pieces: tuple
    delta_max: object

    @property
    def breakpoints(self):
        return tuple(p.hi for p in self.pieces[:-1])

    def piece_index(self, delta):
        if not 0 <= delta < self.delta_max:
            raise DeltaRangeError(delta, self.delta_max)
        for i, p in enumerate(self.pieces):
            if delta < p.hi:
                return i
        return len(self.pieces) - 1

    def __call__(self, delta):
        return self.pieces[self.piece_index(delta)](delta)


def _pieces(*rows):
    return tuple(Piece(lo, hi, a, b) for (lo, hi, a, b) in rows)


def _upper_envelope(lines, delta_max):
    """Pieces of max over affine lines [(slope, intercept), ...] on [0, delta_max).

    Slopes must be strictly increasing. Lines that never lead inside the
    window are dropped (this resolves parameter corners where a nominal
    middle piece degenerates to an empty interval). All arithmetic stays
    exact for Fraction inputs.
    """

    hull = []  # [(slope, intercept, start)], start = where the line takes over

    def crossing(l1, l2):
        return (l1[1] - l2[1]) / (l2[0] - l1[0])

    for line in lines:
        if hull and line[0] <= hull[-1][0]:
            raise DomainValidationError("envelope lines need strictly increasing slopes")
        while hull:
            x = crossing(hull[-1][:2], line)
            if x <= hull[-1][2]:
                hull.pop()
            else:
                break
        start = crossing(hull[-1][:2], line) if hull else 0 * delta_max
        hull.append((line[0], line[1], start))

    pieces = []
    for i, (slope, intercept, start) in enumerate(hull):
        lo = start if i > 0 else 0 * delta_max
        hi = hull[i + 1][2] if i + 1 < len(hull) else delta_max
        if lo < delta_max and hi > 0:
            pieces.append(Piece(max(lo, 0 * delta_max), min(hi, delta_max), slope, intercept))
    return tuple(pieces)


def _law_lipschitz(d: int) -> RegimeLaw:
    q = Fraction(d, 2 * (d + 1))
    return RegimeLaw(
        "lipschitz",
        _pieces((0, q, 1, q), (q, 1, 2, 0)),
        Fraction(1),
    )


def _law_holder_high(alpha) -> RegimeLaw:
    return RegimeLaw(
        "holder-high-alpha",
        _pieces((0, _QUARTER, 1, _QUARTER), (_QUARTER, alpha, 2, 0)),
        alpha,
    )


def _law_holder_low(alpha) -> RegimeLaw:
    # First piece extended to delta = 0 by continuity.
    half_a = alpha / 2
    return RegimeLaw(
        "holder-low-alpha",
        _pieces((0, half_a, 2, _HALF - alpha), (half_a, alpha, _ONE / alpha, 0)),
        alpha,
    )


def _law_holder_mid(alpha) -> RegimeLaw:
    half_a = alpha / 2
    return RegimeLaw(
        "holder-mid-alpha",
        _pieces(
            (0, alpha - _QUARTER, 1, _QUARTER),
            (alpha - _QUARTER, half_a, 2, _HALF - alpha),
            (half_a, alpha, _ONE / alpha, 0),
        ),
        alpha,
    )


def _law_subunit_high(alpha, m) -> RegimeLaw:
    b1 = (2 * alpha - 1) / 4
    return RegimeLaw(
        "subunit-m-high-alpha",
        _pieces(
            (0, b1, 0, (2 - m) / 4),
            (b1, alpha / 2, m, (1 - m * alpha) / 2),
            (alpha / 2, alpha, _ONE / alpha, 0),
        ),
        alpha,
    )


def _law_subunit_low(alpha, m) -> RegimeLaw:
    return RegimeLaw(
        "subunit-m-low-alpha",
        _pieces(
            (0, alpha / 2, m, (1 - m * alpha) / 2),
            (alpha / 2, alpha, _ONE / alpha, 0),
        ),
        alpha,
    )


def _law_superunit_high(alpha, m) -> RegimeLaw:
    # breakpoint 1/4; for very large m the second piece can fall outside
    # [0, alpha), so the law is built as an exact upper envelope
    return RegimeLaw(
        "superunit-m-high-alpha",
        _upper_envelope([(m - 1, _QUARTER), (m, 0 * _QUARTER)], alpha),
        alpha,
    )


def _law_superunit_low(alpha, m) -> RegimeLaw:
    # Second piece is delta/alpha, fixed from the adjacent laws by
    # continuity at delta = alpha/2 (both sides equal 1/2 there).
    return RegimeLaw(
        "superunit-m-low-alpha",
        _pieces(
            (0, alpha / 2, m, (1 - m * alpha) / 2),
            (alpha / 2, alpha, _ONE / alpha, 0),
        ),
        alpha,
    )


def _superunit_envelope_pieces(alpha, m):
    # nominal breakpoints (2*m*alpha - 1)/4 and alpha/2; at parameter
    # corners (e.g. alpha = 1/(2(m-1))) the middle piece degenerates, so
    # the law is built as an exact upper envelope of its affine bounds
    return _upper_envelope(
        [(m - 1, _QUARTER), (m, (1 - m * alpha) / 2), (_ONE / alpha, 0 * _QUARTER)],
        alpha,
    )


def _law_superunit_mid(alpha, m) -> RegimeLaw:
    return RegimeLaw("superunit-m-mid-alpha", _superunit_envelope_pieces(alpha, m), alpha)


def _law_superunit_near_half(alpha, m) -> RegimeLaw:
    # m in (1,2), alpha in [1/2, 1/m). The threshold is the upper envelope
    # of the competing affine bounds; same piece formulas as the mid-alpha
    # law, with breakpoints (2*m*alpha-1)/4 and alpha/2. This matches the
    # mid-alpha law continuously at alpha = 1/2 and the high-alpha law at
    # alpha = 1/m.
    return RegimeLaw(
        "superunit-m-near-half-alpha", _superunit_envelope_pieces(alpha, m), alpha
    )


def law_for(regime: Regime) -> RegimeLaw:
    """Resolve the unique threshold law applicable to a regime."""

    alpha, m, d = regime.alpha, regime.m, regime.d

    if regime.smoothness == LIPSCHITZ:
        if m == 2:
            return _law_lipschitz(d)
        if 0 < m < 1:
            return _law_subunit_high(alpha, m)
        if m > 1:
            return _law_superunit_high(alpha, m)
        raise UnsupportedRegimeError(f"no law for Lipschitz regime with m={m}")

    if d != 1:
        raise UnsupportedRegimeError(
            "Hölder-in-t regimes are supported in dimension 1 only "
            "(higher dimensions need the Lipschitz law)"
        )

    if m == 2:
        if alpha == 1:
            return _law_superunit_high(alpha, m)
        if _HALF <= alpha:
            return _law_holder_high(alpha)
        if alpha <= _QUARTER:
            return _law_holder_low(alpha)
        return _law_holder_mid(alpha)

    if 0 < m < 1:
        if alpha > _HALF:
            return _law_subunit_high(alpha, m)
        return _law_subunit_low(alpha, m)

    if m > 1:
        inv_m = _ONE / m
        if alpha >= inv_m:
            return _law_superunit_high(alpha, m)
        if alpha <= inv_m / 2:
            return _law_superunit_low(alpha, m)
        if alpha < _HALF:
            return _law_superunit_mid(alpha, m)
        if m < 2:
            return _law_superunit_near_half(alpha, m)
        raise UnsupportedRegimeError(
            f"(alpha={alpha}, m={m}) is covered by no threshold law "
            "(the near-half-alpha band is empty for m >= 2)"
        )

    raise UnsupportedRegimeError(f"no threshold law covers m={m}")


def threshold(regime: Regime, delta):
    """Sharp Sobolev threshold s(delta) for the given regime."""

    return law_for(regime)(delta)


def classify(regime: Regime, point: RatePoint) -> str:
    """Place an (s, delta) pair relative to the sharp threshold.

    The threshold laws are open conditions, so points within BOUNDARY_TOL of the
    threshold are reported as on-boundary rather than claimed convergent
    or divergent.
    """

    s0 = threshold(regime, point.delta)
    if abs(point.s - s0) <= BOUNDARY_TOL:
        return BOUNDARY
    return ABOVE if point.s > s0 else BELOW


def region_curve(regime: Regime, delta_samples: Iterable):
    """Sample the threshold law and annotate the graph landmarks.

    Returns (samples, annotations): samples are (delta, s, piece_index)
    triples; annotations carry the onset point (delta=0), every interior
    corner, and the open right endpoint at delta_max with its limiting s.
    """

    law = law_for(regime)
    samples = []
    for delta in delta_samples:
        idx = law.piece_index(delta)
        samples.append((delta, law.pieces[idx](delta), idx))

    annotations = [{"kind": "onset", "delta": 0 * law.delta_max, "s": law.pieces[0](0)}]
    for bp in law.breakpoints:
        annotations.append({"kind": "corner", "delta": bp, "s": law(bp)})
    annotations.append(
        {"kind": "ceiling", "delta": law.delta_max, "s": law.pieces[-1](law.delta_max)}
    )
    return samples, annotations


def delta_grid(regime: Regime, n: int, delta_min=0.0, delta_max=None) -> Sequence:
    """Uniform grid of n deltas in [delta_min, delta_max) for a regime."""

    law = law_for(regime)
    hi = float(law.delta_max) if delta_max is None else float(delta_max)
    lo = float(delta_min)
    if not 0 <= lo <= hi <= float(law.delta_max):
        raise DeltaRangeError(delta_max if delta_max is not None else delta_min, law.delta_max)
    if n <= 0:
        return []
    if n == 1:
        return [lo]
    # half-open on the right: never emit delta_max itself
    step = (hi - lo) / n
    return [lo + i * step for i in range(n)]
