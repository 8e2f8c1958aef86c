"""Counterexample initial-data families on the Fourier side.

Every built-in profile is a product of one-dimensional coordinate factors
with compactly supported, explicitly known Fourier transforms, so all
downstream quadrature can truncate to the support box with zero
truncation error. The families:

  bump-dilated      f^(eta) = (1/R) g(eta/R)
  bump-modulated    f^(eta) = (1/R) g((eta + R^2)/R)
  bump-tensor       f^(eta) = (1/R) g((eta_1 + R^{1+eps})/R) g(eta_2)...g(eta_d)
  indicator-band    f^ = indicator of [R, R+1]
  bourgain          physical-space product e^{iRx_1} phi(sqrt(R) x_1) Phi(x')
                    times a lattice trigonometric sum (d in {1, 2})
  annulus-bump      smooth bump filling [2^{k-1}, 2^{k+1}], unit L^2 mass
  gaussian-like     truncated Gaussian on the Fourier side (validation data)

The base bump g is the standard mollifier c*exp(-1/(1/4 - xi^2)) on
(-1/2, 1/2), normalized to unit mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import AccuracyError, DomainValidationError
from .quadrature import fixed_rule

TWO_PI = 2.0 * math.pi

# 1 / integral of exp(-1/(1/4 - xi^2)) over (-1/2, 1/2); frozen from a
# 30-digit quadrature oracle (see tests/test_initial_data.py).
BUMP_NORMALIZATION = 142.2503757770958681


@dataclass(frozen=True)
class BumpFunction:
    """The normalized mollifier: smooth, >= 0, supported in [-1/2, 1/2], mass 1."""

    normalization: float = BUMP_NORMALIZATION
    support: tuple = (-0.5, 0.5)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.zeros_like(xi)
        inside = np.abs(xi) < 0.5
        x2 = xi[inside] ** 2
        out[inside] = self.normalization * np.exp(-1.0 / (0.25 - x2))
        return out if out.ndim else float(out)


BUMP = BumpFunction()


def bump_eval(xi):
    """g(xi): zero outside [-1/2, 1/2], c*exp(-1/(1/4 - xi^2)) inside."""
    return BUMP(xi)


@lru_cache(maxsize=1)
def _bump_rule():
    xs, ws = fixed_rule(-0.5, 0.5, panels=96)
    return xs, ws, BUMP(xs)


@lru_cache(maxsize=1)
def bump_l2_squared() -> float:
    xs, ws, gv = _bump_rule()
    return float(np.sum(ws * gv * gv))


def bump_transform(u):
    """ghat(u) = integral of e^{-i u xi} g(xi) dxi (real and even)."""
    xs, ws, gv = _bump_rule()
    u = np.atleast_1d(np.asarray(u, dtype=float))
    vals = np.cos(np.multiply.outer(u, xs)) @ (ws * gv)
    return vals if vals.shape != (1,) else float(vals[0])


def window_transform_direct(u):
    """phihat(u) = 2*pi*(g*g)(u) by direct convolution quadrature."""
    xs, ws, gv = _bump_rule()
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.zeros_like(u)
    mask = np.abs(u) < 1.0
    if mask.any():
        shifted = BUMP(u[mask][:, None] - xs[None, :])
        out[mask] = TWO_PI * (shifted @ (ws * gv))
    return out if out.shape != (1,) else float(out[0])


@lru_cache(maxsize=1)
def _window_transform_cheb():
    # phihat is C^inf with compact support, so Chebyshev interpolation on
    # [-1, 1] converges super-algebraically; degree 400 reaches rounding.
    return np.polynomial.chebyshev.chebinterpolate(window_transform_direct, 400)


def window_transform(u):
    """phihat(u) = 2*pi*(g*g)(u): smooth, supported in [-1, 1].

    Its inverse transform phi = (ghat)^2 is nonnegative with phi(0) = 1,
    which is what the lattice construction needs from its window function.
    Evaluated through a cached machine-precision Chebyshev interpolant.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.zeros_like(u)
    mask = np.abs(u) < 1.0
    if mask.any():
        out[mask] = np.polynomial.chebyshev.chebval(u[mask], _window_transform_cheb())
    return out if out.shape != (1,) else float(out[0])


def window_physical(u):
    """phi(u) = ghat(u)^2, the physical-space window (>= 0, phi(0) = 1)."""
    g0 = bump_transform(0.0)
    gh = np.atleast_1d(np.asarray(bump_transform(u), dtype=float)) / g0
    out = gh * gh
    return out if out.shape != (1,) else float(out[0])


@lru_cache(maxsize=1)
def decay_threshold() -> float:
    """Smallest u0 with |ghat| <= 1/4 on [u0, 600] (calibrated once).

    Beyond this threshold the bump families obey |f_R(x)| <= 1/(8*pi)
    whenever |x * R| >= u0.
    """
    us = np.linspace(0.0, 600.0, 24001)
    vals = np.abs(np.atleast_1d(bump_transform(us)))
    running = np.maximum.accumulate(vals[::-1])[::-1]
    idx = int(np.argmax(running <= 0.25))
    return float(us[idx])


BUMP_DILATED = "bump-dilated"
BUMP_MODULATED = "bump-modulated"
BUMP_TENSOR = "bump-tensor"
INDICATOR_BAND = "indicator-band"
BOURGAIN = "bourgain"
ANNULUS_BUMP = "annulus-bump"
GAUSSIAN_LIKE = "gaussian-like"
LOCALIZED = "localized"

_KINDS = (
    BUMP_DILATED,
    BUMP_MODULATED,
    BUMP_TENSOR,
    INDICATOR_BAND,
    BOURGAIN,
    ANNULUS_BUMP,
    GAUSSIAN_LIKE,
    LOCALIZED,
)


@dataclass(frozen=True)
class FrequencyProfile:
    """Closed-form Fourier-side description of an initial datum."""

    kind: str
    d: int = 1
    R: float = 1.0
    epsilon: float = 0.0
    scale_index: int = 0          # annulus-bump / localized dyadic index
    center: float = 0.0           # gaussian-like center
    halfwidth: float = 8.0        # gaussian-like truncation
    amplitude: float = 1.0        # gaussian-like amplitude (0 gives the zero datum)
    base: Optional["FrequencyProfile"] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainValidationError(f"unknown profile kind {self.kind!r}")
        if self.kind in (BUMP_DILATED, BUMP_MODULATED, BUMP_TENSOR, INDICATOR_BAND, BOURGAIN):
            if self.R < 1:
                raise DomainValidationError("frequency scale R must be >= 1")
        if self.kind == BUMP_TENSOR and self.epsilon < 0:
            raise DomainValidationError("epsilon must be >= 0")
        if self.kind == BOURGAIN and self.d not in (1, 2):
            raise DomainValidationError("bourgain profiles are built for d in {1, 2} only")
        if self.kind not in (BUMP_TENSOR, BOURGAIN) and self.d != 1:
            raise DomainValidationError(f"{self.kind} is one-dimensional")
        if self.kind == ANNULUS_BUMP and self.scale_index < 1:
            raise DomainValidationError("annulus-bump needs scale index k >= 1")
        if self.kind == LOCALIZED and self.base is None:
            raise DomainValidationError("localized profiles wrap a base profile")

    @property
    def support_box(self):
        """Product of closed intervals containing supp(f^)."""
        return tuple((seg[0][0], seg[-1][1]) for seg in _segments(self))


def bump_dilated(R: float) -> FrequencyProfile:
    return FrequencyProfile(BUMP_DILATED, R=float(R))


def bump_modulated(R: float) -> FrequencyProfile:
    return FrequencyProfile(BUMP_MODULATED, R=float(R))


def bump_tensor(R: float, epsilon: float, d: int = 1) -> FrequencyProfile:
    return FrequencyProfile(BUMP_TENSOR, d=d, R=float(R), epsilon=float(epsilon))


def indicator_band(R: float) -> FrequencyProfile:
    return FrequencyProfile(INDICATOR_BAND, R=float(R))


def bourgain_profile(R: float, d: int = 1) -> FrequencyProfile:
    return FrequencyProfile(BOURGAIN, d=d, R=float(R))


def annulus_bump(k: int) -> FrequencyProfile:
    return FrequencyProfile(ANNULUS_BUMP, scale_index=int(k))


def gaussian_like(center: float = 0.0, halfwidth: float = 8.0, amplitude: float = 1.0) -> FrequencyProfile:
    return FrequencyProfile(GAUSSIAN_LIKE, center=float(center), halfwidth=float(halfwidth),
                            amplitude=float(amplitude))


def zero_profile() -> FrequencyProfile:
    return gaussian_like(amplitude=0.0)


def lattice_scale(R: float, d: int) -> float:
    """The lattice spacing D = R^{(d+2)/(2(d+1))}."""
    return float(R) ** ((d + 2) / (2.0 * (d + 1)))


def lattice_points(R: float, d: int):
    """Integers l with R/(2D) < l < R/D (per transverse coordinate)."""
    D = lattice_scale(R, d)
    lo, hi = R / (2.0 * D), R / D
    first = int(math.floor(lo)) + 1
    last = int(math.ceil(hi)) - 1
    return list(range(first, last + 1))


@dataclass(frozen=True)
class CoordinateFactor:
    """One coordinate of a product profile.

    segments: disjoint closed intervals whose union contains the factor's
    support (quadrature integrates each separately, so endpoint
    discontinuities such as the indicator band stay exact).
    func: vectorized Fourier-side factor, exactly 0 outside the segments.
    """

    segments: tuple
    func: Callable[[np.ndarray], np.ndarray]


def _split_at_zero(lo, hi):
    if lo < 0.0 < hi:
        return ((lo, 0.0), (0.0, hi))
    return ((lo, hi),)


def _segments(profile):
    return tuple(f.segments for f in coordinate_factors(profile))


def coordinate_factors(profile: FrequencyProfile):
    """Per-coordinate factors of the profile's Fourier transform.

    The scalar prefactor (e.g. 1/R) is folded into the first coordinate.
    """

    kind = profile.kind
    R = profile.R

    if kind == BUMP_DILATED:
        func = lambda eta: BUMP(np.asarray(eta) / R) / R
        return (CoordinateFactor(_split_at_zero(-R / 2.0, R / 2.0), func),)

    if kind == BUMP_MODULATED:
        c = -R * R
        func = lambda eta: BUMP((np.asarray(eta) - c) / R) / R
        return (CoordinateFactor(((c - R / 2.0, c + R / 2.0),), func),)

    if kind == BUMP_TENSOR:
        c = -R ** (1.0 + profile.epsilon)
        first = CoordinateFactor(
            ((c - R / 2.0, c + R / 2.0),),
            lambda eta: BUMP((np.asarray(eta) - c) / R) / R,
        )
        rest = tuple(
            CoordinateFactor(((-0.5, 0.5),), lambda eta: BUMP(np.asarray(eta)))
            for _ in range(profile.d - 1)
        )
        return (first,) + rest

    if kind == INDICATOR_BAND:
        func = lambda eta: np.where(
            (np.asarray(eta) >= R) & (np.asarray(eta) <= R + 1.0), 1.0, 0.0
        )
        return (CoordinateFactor(((R, R + 1.0),), func),)

    if kind == BOURGAIN:
        sq = math.sqrt(R)
        first = CoordinateFactor(
            ((R - sq, R + sq),),
            lambda eta: window_transform((np.asarray(eta) - R) / sq) / sq,
        )
        if profile.d == 1:
            return (first,)
        D = lattice_scale(R, profile.d)
        ells = lattice_points(R, profile.d)
        segs = tuple((D * ell - 1.0, D * ell + 1.0) for ell in ells)

        def lattice_factor(eta, _D=D, _ells=tuple(ells)):
            eta = np.asarray(eta, dtype=float)
            out = np.zeros_like(eta)
            for ell in _ells:
                out = out + np.atleast_1d(window_transform(eta - _D * ell))
            return out

        return (first, CoordinateFactor(segs, lattice_factor))

    if kind == ANNULUS_BUMP:
        k = profile.scale_index
        width = 1.5 * 2.0 ** k
        centre = 1.25 * 2.0 ** k
        norm = math.sqrt(TWO_PI / (width * bump_l2_squared()))
        func = lambda eta: norm * BUMP((np.asarray(eta) - centre) / width)
        return (CoordinateFactor(((2.0 ** (k - 1), 2.0 ** (k + 1)),), func),)

    if kind == GAUSSIAN_LIKE:
        c, h, a = profile.center, profile.halfwidth, profile.amplitude
        func = lambda eta: np.where(
            np.abs(np.asarray(eta) - c) <= h,
            a * np.exp(-((np.asarray(eta) - c) ** 2)),
            0.0,
        )
        return (CoordinateFactor(_split_at_zero(c - h, c + h), func),)

    if kind == LOCALIZED:
        if profile.base.d != 1:
            raise DomainValidationError("dyadic localization is one-dimensional")
        (base_factor,) = coordinate_factors(profile.base)
        k = profile.scale_index
        lo_ann, hi_ann = 2.0 ** (k - 1), 2.0 ** (k + 1)
        segs = []
        for lo, hi in base_factor.segments:
            for a, b in ((max(lo, -hi_ann), min(hi, -lo_ann)), (max(lo, lo_ann), min(hi, hi_ann))):
                if b > a:
                    segs.append((a, b))

        def localized(eta, _bf=base_factor.func, _k=k):
            return _bf(eta) * dyadic_cutoff(_k, eta)

        return (CoordinateFactor(tuple(segs), localized),)

    raise DomainValidationError(f"unknown profile kind {kind!r}")


def fourier_eval(profile: FrequencyProfile, eta):
    """f^(eta). Exactly zero outside the support box.

    The bourgain family is defined in physical space; its Fourier side is
    not exposed here (use physical_eval / the propagator, which work from
    the tensor factors directly).
    """

    if profile.kind == BOURGAIN:
        raise DomainValidationError(
            "fourier_eval is unsupported for the bourgain family (physical-space construction)"
        )
    factors = coordinate_factors(profile)
    if profile.d == 1:
        vals = factors[0].func(np.asarray(eta, dtype=float))
        return vals if np.ndim(eta) else complex(np.asarray(vals).ravel()[0])
    pt = np.asarray(eta, dtype=float)
    if pt.shape != (profile.d,):
        raise DomainValidationError(f"eta must be a point in R^{profile.d}")
    out = 1.0
    for j, f in enumerate(factors):
        out *= float(np.atleast_1d(f.func(pt[j]))[0])
    return complex(out)


def physical_eval(profile: FrequencyProfile, x, quad=None):
    """f(x) = (2*pi)^{-d} * integral of e^{i x.xi} f^(xi) dxi.

    Fourier-side kinds integrate over the support box; the bourgain kind
    uses its closed physical-space product formula.
    """

    if profile.kind == BOURGAIN:
        return bourgain_physical(profile, x)
    from .propagator import evaluate  # local import avoids a module cycle
    from .curves import CurveSpec, STRAIGHT

    curve = CurveSpec(STRAIGHT, alpha=1.0, d=profile.d)
    sample = evaluate(profile, curve, 2.0, x, 0.0, quad)
    return sample.value


def bourgain_physical(profile: FrequencyProfile, x):
    """Closed product formula for the bourgain family in physical space."""

    if profile.kind != BOURGAIN:
        raise DomainValidationError("bourgain_physical needs a bourgain profile")
    R = profile.R
    if profile.d == 1:
        x1 = float(x) if np.isscalar(x) else float(np.asarray(x).ravel()[0])
        return complex(np.exp(1j * R * x1) * window_physical(math.sqrt(R) * x1))
    x = np.asarray(x, dtype=float)
    x1, x2 = float(x[0]), float(x[1])
    D = lattice_scale(R, profile.d)
    ells = np.array(lattice_points(R, profile.d), dtype=float)
    lattice = np.sum(np.exp(1j * D * ells * x2)) if len(ells) else 0.0 + 0.0j
    return complex(
        np.exp(1j * R * x1)
        * window_physical(math.sqrt(R) * x1)
        * window_physical(x2)
        * lattice
    )


def sobolev_norm(profile: FrequencyProfile, s: float, rel_tol: float = 1e-9) -> float:
    """H^s norm on the Fourier side: sqrt( integral (1+|xi|^2)^s |f^|^2 ).

    The (2*pi)^{-d} Plancherel prefactor is dropped by convention;
    constants never enter the power-law acceptance criteria. Convergence
    is certified by panel doubling (AccuracyError on failure).
    """

    if s < 0:
        raise DomainValidationError("sobolev_norm needs s >= 0")
    factors = coordinate_factors(profile)

    def integral(panels):
        if profile.d == 1:
            total = 0.0
            for lo, hi in factors[0].segments:
                xs, ws = fixed_rule(lo, hi, panels)
                fv = np.abs(np.atleast_1d(factors[0].func(xs))) ** 2
                total += float(np.sum(ws * (1.0 + xs * xs) ** s * fv))
            return total
        # tensor grid with the full (1 + |xi|^2)^s coupling (d = 2 in practice)
        grids = []
        for f in factors:
            xs_all, ws_all, fv_all = [], [], []
            for lo, hi in f.segments:
                xs, ws = fixed_rule(lo, hi, panels)
                xs_all.append(xs)
                ws_all.append(ws)
                fv_all.append(np.abs(np.atleast_1d(f.func(xs))))
            grids.append(
                (np.concatenate(xs_all), np.concatenate(ws_all), np.concatenate(fv_all))
            )
        if profile.d != 2:
            raise DomainValidationError("sobolev_norm supports d in {1, 2}")
        (x1, w1, f1), (x2, w2, f2) = grids
        weight = (1.0 + x1[:, None] ** 2 + x2[None, :] ** 2) ** s
        return float(((w1 * f1 * f1) @ weight) @ (w2 * f2 * f2))

    coarse = integral(64)
    fine = integral(128)
    scale = max(abs(coarse), abs(fine), 1e-300)
    if abs(fine - coarse) > rel_tol * scale:
        raise AccuracyError(
            "sobolev_norm quadrature did not converge under panel doubling",
            coarse=math.sqrt(max(coarse, 0.0)),
            fine=math.sqrt(max(fine, 0.0)),
            context=f"kind={profile.kind}, s={s}",
        )
    return math.sqrt(max(fine, 0.0))


# ---------------------------------------------------------------------------
# dyadic (Littlewood-Paley style) localization


def _smoothstep(u):
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    out = np.zeros_like(u)
    interior = (u > 0.0) & (u < 1.0)
    ui = u[interior]
    a = np.exp(-1.0 / ui)
    b = np.exp(-1.0 / (1.0 - ui))
    out[interior] = a / (a + b)
    out[u >= 1.0] = 1.0
    return out


def low_cutoff(xi):
    """Smooth Theta: 1 on |xi| <= 1, 0 on |xi| >= 2."""
    axi = np.abs(np.asarray(xi, dtype=float))
    out = np.ones_like(axi)
    band = (axi > 1.0) & (axi < 2.0)
    out[band] = 1.0 - _smoothstep(np.log2(axi[band]))
    out[axi >= 2.0] = 0.0
    return out if out.ndim else float(out)


def dyadic_cutoff(k: int, xi):
    """psi_k = Theta(xi/2^k) - Theta(xi/2^{k-1}), supported in the k-th annulus.

    Together with the low piece these telescope to 1 exactly:
    Theta + sum_{k=1}^K psi_k = Theta(. / 2^K).
    """
    xi = np.asarray(xi, dtype=float)
    return low_cutoff(xi / 2.0 ** k) - low_cutoff(xi / 2.0 ** (k - 1))


def dyadic_localize(profile: FrequencyProfile, k: int) -> FrequencyProfile:
    """Multiply the profile by the smooth dyadic cutoff at scale k."""

    if k < 1:
        raise DomainValidationError("dyadic index k must be >= 1")
    if profile.d != 1:
        raise DomainValidationError("dyadic localization is one-dimensional")
    base = profile.base if profile.kind == LOCALIZED else profile
    if profile.kind == LOCALIZED:
        raise DomainValidationError("profile is already localized; localize the base instead")
    return FrequencyProfile(LOCALIZED, d=1, scale_index=int(k), base=base)
