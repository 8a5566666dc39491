"""Level geometry of |Gamma| on the working quadrant Q = {Re > alpha, Im > 0}.

Two orthogonal families of curves organize everything here:

* constant-modulus curves, the loci |Gamma(z)| = r, which are increasing
  graphs y_r(x) with positive slope, and
* constant-argument curves, the loci arg Gamma(z) = theta, decreasing
  graphs along which |Gamma| grows monotonically.

Both are traced with a predictor-corrector walker: an Euler step along the
unit tangent of the implicit field, then Newton correction along the field
gradient.  The continuous argument comes for free from the analytic branch
of log Gamma on the right half-plane (its imaginary part is single-valued
there), so walkers never unwrap principal values across samples.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import gamma_core
from .errors import DomainError, TraceDivergence

__all__ = [
    "CompanionPoint",
    "LevelCurve",
    "arg_rate",
    "argument_arc_to_distance",
    "argument_arc_to_log_modulus",
    "modulus_arc_to_arg",
    "modulus_slope",
    "point_on_modulus_arc",
    "reflect_to_lower_quadrant",
    "trace_argument_curve",
    "trace_modulus_curve",
    "z_star",
]

TWO_PI = 2.0 * math.pi

_H_MAX = 0.1
_H_MIN = 1e-6
_CORRECTOR_TOL = 1e-11
_MAX_STEPS = 400_000

MODULUS = "constant_modulus"
ARGUMENT = "constant_argument"


@dataclass(frozen=True)
class LevelCurve:
    """Sampled curve on which |Gamma| (or the continuous arg Gamma) is
    constant to ``tol``.  ``level`` is r for modulus curves and theta for
    argument curves; ``terminus`` records which boundary the left end met."""

    kind: str
    level: float
    samples: np.ndarray
    log_abs: np.ndarray
    arg: np.ndarray
    tol: float
    terminus: str | None = None

    def __len__(self):
        return len(self.samples)

    def to_csv(self, path):
        fmt = lambda x: format(float(x), ".17g")
        with open(path, "w") as fh:
            fh.write(f"# kind={self.kind},level={fmt(self.level)},tol={fmt(self.tol)}\n")
            fh.write("re,im,log_abs_gamma,arg_unwrapped\n")
            for z, la, ar in zip(self.samples, self.log_abs, self.arg):
                fh.write(f"{fmt(z.real)},{fmt(z.imag)},{fmt(la)},{fmt(ar)}\n")


@dataclass(frozen=True)
class CompanionPoint:
    """A point and the next point of larger modulus with the same Gamma value."""

    origin: complex
    star: complex


def _require_quadrant(z, x_min=None):
    x_min = gamma_core.alpha() if x_min is None else x_min
    if not (z.real > x_min and z.imag > 0.0):
        raise DomainError(f"z={z} outside the working quadrant")


def _lg(z):
    return gamma_core.log_gamma(z)


def _gradient(kind, psi):
    """Field gradient as a complex vector (Fx + i Fy)."""
    if kind == MODULUS:
        return psi.conjugate()          # (Re psi, -Im psi)
    return 1j * psi.conjugate()         # (Im psi,  Re psi)


def _tangent(kind, psi):
    g = _gradient(kind, psi)
    if kind == MODULUS:
        t = 1j * g                      # (-Fy, Fx): positive-slope direction
    else:
        t = -1j * g                     # (Fy, -Fx): negative-slope direction
    return t / abs(t)


def _field_value(kind, level, lg):
    if kind == MODULUS:
        return lg.real - level          # level carries log r
    return lg.imag - level              # level carries theta (unwrapped)


def _correct(kind, level, z, max_iter=10):
    """Newton steps along the field gradient back onto the curve.

    Returns (z, lg, moved) or None if the correction did not converge.
    """
    moved = 0.0
    for _ in range(max_iter):
        if z.imag < 0.0 or z.real <= 0.0:
            return None
        lg = _lg(z)
        f = _field_value(kind, level, lg)
        if abs(f) <= _CORRECTOR_TOL:
            return z, lg, moved
        g = _gradient(kind, gamma_core.digamma(z))
        step = f * g / (abs(g) ** 2)
        z -= step
        moved += abs(step)
    lg = _lg(z)
    if abs(_field_value(kind, level, lg)) <= _CORRECTOR_TOL:
        return z, lg, moved
    return None


def _walk(kind, level, z0, direction, done, h0=0.02, h_max=_H_MAX, max_dphase=0.35):
    """March along the curve from z0 until ``done(z, lg)`` is true.

    Returns (samples, lgs); the predicate is guaranteed true at the last
    sample and false at the one before it.
    """
    seeded = _correct(kind, level, z0)
    if seeded is None:
        raise TraceDivergence(f"seed {z0} does not converge onto the curve")
    z, lg, _ = seeded
    samples, lgs = [z], [lg]
    if done(z, lg):
        return samples, lgs
    h = h0
    for _ in range(_MAX_STEPS):
        psi = gamma_core.digamma(z)
        t = _tangent(kind, psi) * direction
        trial = _correct(kind, level, z + h * t)
        ok = trial is not None
        if ok:
            z_new, lg_new, moved = trial
            ok = (
                moved <= 0.5 * h + 1e-12
                and abs(lg_new.imag - lg.imag) <= max_dphase
                and abs(lg_new.real - lg.real) <= 0.75
                and z_new.imag > -1e-15
            )
        if not ok:
            h *= 0.5
            if h < _H_MIN:
                raise TraceDivergence(f"step collapsed below {_H_MIN} near {z}")
            continue
        z, lg = z_new, lg_new
        samples.append(z)
        lgs.append(lg)
        if done(z, lg):
            return samples, lgs
        h = min(h * 1.4, h_max)
    raise TraceDivergence("walk exceeded the step budget")


def _bisect_between(kind, level, za, zb, scalar, target, tol=1e-12):
    """Bisection along the curve between two nearby samples.

    ``scalar(z, lg)`` must be monotone along the curve; returns the point
    where it equals ``target``.
    """
    lo, hi = 0.0, 1.0
    va = scalar(*_correct_pair(kind, level, za))
    vb = scalar(*_correct_pair(kind, level, zb))
    if not (min(va, vb) <= target <= max(va, vb)):
        raise TraceDivergence("bisection target not bracketed along the curve")
    increasing = vb > va
    point, lg = za, _lg(za)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        zm = za + (zb - za) * mid
        corr = _correct(kind, level, zm)
        if corr is None:
            raise TraceDivergence("corrector failed during on-curve bisection")
        point, lg, _ = corr
        v = scalar(point, lg)
        if abs(v - target) <= tol:
            break
        if (v < target) == increasing:
            lo = mid
        else:
            hi = mid
    return point, lg


def _correct_pair(kind, level, z):
    corr = _correct(kind, level, z)
    if corr is None:
        raise TraceDivergence(f"point {z} failed to settle on the curve")
    return corr[0], corr[1]


# ---------------------------------------------------------------------------
# pointwise fields

def modulus_slope(z: complex) -> float:
    """Slope dy/dx of the constant-modulus curve through z (positive)."""
    gx, gy = gamma_core.grad_log_abs_gamma(z)
    return -gx / gy


def arg_rate(z: complex) -> float:
    """Rate d(arg Gamma)/dx along the constant-modulus curve through z."""
    gx, gy = gamma_core.grad_log_abs_gamma(z)
    return (gx * gx + gy * gy) / (-gy)


# ---------------------------------------------------------------------------
# tracing

def _real_axis_abscissa(r):
    """x > alpha with Gamma(x) = r, for r >= Gamma(alpha)."""
    a = gamma_core.alpha()
    lo, hi = a, a + 1.0
    target = math.log(r)
    while gamma_core.log_gamma(hi).real < target:
        hi += max(1.0, 0.5 * hi)
        if hi > 1e6:
            raise TraceDivergence("level not reached on the real axis")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gamma_core.log_gamma(mid).real < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def _alpha_line_ordinate(r):
    """y > 0 with |Gamma(alpha + i y)| = r, for r < Gamma(alpha)."""
    a = gamma_core.alpha()
    target = math.log(r)
    lo, hi = 1e-9, 1.0
    while gamma_core.log_gamma(complex(a, hi)).real > target:
        hi *= 2.0
        if hi > 1e6:
            raise TraceDivergence("level not reached on the quadrant edge")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gamma_core.log_gamma(complex(a, mid)).real > target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def trace_modulus_curve(r: float, x_end: float, tol: float = 1e-9) -> LevelCurve:
    """Trace the constant-modulus curve |Gamma| = r rightward to Re = x_end.

    The left terminus is the real axis when r >= Gamma(alpha) and the
    vertical edge Re = alpha otherwise.
    """
    if r <= 0.0:
        raise DomainError("level r must be positive")
    a = gamma_core.alpha()
    if x_end <= a:
        raise DomainError(f"x_end must exceed alpha={a:.6f}")
    g_alpha = math.exp(gamma_core.log_gamma(a).real)
    level = math.log(r)
    if r >= g_alpha:
        x0 = _real_axis_abscissa(r)
        seed = complex(x0, 0.0)
        terminus = "real_axis"
        # leave the axis explicitly: the tangent is vertical at y = 0
        psi0 = gamma_core.digamma(x0).real
        y1 = min(1e-4, 0.01 / max(psi0, 1e-3))
        start = _correct(MODULUS, level, complex(x0, y1))
        if start is None:
            raise TraceDivergence("failed to leave the real axis")
        first, lg_first, _ = start
        prefix, prefix_lg = [seed], [gamma_core.log_gamma(seed)]
    else:
        y0 = _alpha_line_ordinate(r)
        first = complex(a + 1e-12, y0)
        lg_first = _lg(first)
        terminus = "alpha_line"
        prefix, prefix_lg = [], []

    samples, lgs = _walk(MODULUS, level, first, +1.0, lambda z, lg: z.real >= x_end)
    if samples[-1].real > x_end:
        zt, lgt = _bisect_between(MODULUS, level, samples[-2], samples[-1], lambda z, lg: z.real, x_end)
        samples[-1], lgs[-1] = zt, lgt
    samples = prefix + samples
    lgs = prefix_lg + lgs
    arr = np.asarray(samples, dtype=complex)
    lga = np.asarray(lgs, dtype=complex)
    return LevelCurve(MODULUS, r, arr, lga.real, lga.imag, tol, terminus)


def trace_argument_curve(theta: float, seed: complex, x_end: float, tol: float = 1e-9) -> LevelCurve:
    """Trace the constant-argument component through ``seed`` between the
    quadrant edge Re = alpha and Re = x_end.

    ``theta`` is the continuous (not principal) argument at the seed.  A
    real seed with theta = 0 returns the real segment itself.
    """
    seed = complex(seed)
    a = gamma_core.alpha()
    if seed.imag == 0.0 and abs(theta) <= 1e-9:
        if seed.real <= a:
            raise DomainError("real seed must lie right of alpha")
        xs = np.linspace(a + 1e-9, max(x_end, seed.real), 256)
        lgs = np.array([_lg(complex(x, 0.0)) for x in xs])
        return LevelCurve(ARGUMENT, theta, xs.astype(complex), lgs.real, lgs.imag, tol, "alpha_line")
    _require_quadrant(seed)
    if abs(_lg(seed).imag - theta) > 1e-9:
        raise DomainError("seed does not lie on the requested argument curve")
    left, left_lg = _walk(ARGUMENT, theta, seed, -1.0, lambda z, lg: z.real <= a + 1e-9)
    right, right_lg = _walk(ARGUMENT, theta, seed, +1.0, lambda z, lg: z.real >= x_end)
    if right[-1].real > x_end:
        zt, lgt = _bisect_between(ARGUMENT, theta, right[-2], right[-1], lambda z, lg: z.real, x_end)
        right[-1], right_lg[-1] = zt, lgt
    samples = list(reversed(left[1:])) + right
    lgs = list(reversed(left_lg[1:])) + right_lg
    arr = np.asarray(samples, dtype=complex)
    lga = np.asarray(lgs, dtype=complex)
    return LevelCurve(ARGUMENT, theta, arr, lga.real, lga.imag, tol, "alpha_line")


# ---------------------------------------------------------------------------
# arcs used by the contour builder and the solvers

def modulus_arc_to_arg(z: complex, target_arg: float):
    """Walk the constant-modulus curve rightward from z until the continuous
    argument reaches ``target_arg``; returns (samples, lgs) ending there."""
    lg0 = _lg(z)
    level = lg0.real
    if target_arg < lg0.imag - 1e-12:
        raise DomainError("target argument lies behind the starting point")
    samples, lgs = _walk(MODULUS, level, z, +1.0, lambda zz, lg: lg.imag >= target_arg)
    if len(samples) >= 2:
        zt, lgt = _bisect_between(MODULUS, level, samples[-2], samples[-1], lambda zz, lg: lg.imag, target_arg)
        samples[-1], lgs[-1] = zt, lgt
    return samples, lgs


def argument_arc_to_log_modulus(z: complex, target_log_mod: float):
    """Walk the constant-argument curve rightward from z until log|Gamma|
    reaches ``target_log_mod``; returns (samples, lgs) ending there."""
    lg0 = _lg(z)
    theta = lg0.imag
    if target_log_mod < lg0.real - 1e-12:
        raise DomainError("target modulus lies behind the starting point")
    samples, lgs = _walk(ARGUMENT, theta, z, +1.0, lambda zz, lg: lg.real >= target_log_mod)
    if len(samples) >= 2:
        zt, lgt = _bisect_between(ARGUMENT, theta, samples[-2], samples[-1], lambda zz, lg: lg.real, target_log_mod)
        samples[-1], lgs[-1] = zt, lgt
    return samples, lgs


def argument_arc_to_distance(z: complex, center: complex, dist: float, direction: float):
    """Walk the constant-argument curve from z until |w - center| >= dist;
    direction +1 walks rightward, -1 leftward.  Returns the end point."""
    theta = _lg(z).imag
    samples, lgs = _walk(ARGUMENT, theta, z, direction, lambda zz, lg: abs(zz - center) >= dist)
    if len(samples) >= 2:
        zt, _ = _bisect_between(
            ARGUMENT, theta, samples[-2], samples[-1], lambda zz, lg: abs(zz - center), dist
        )
        return zt
    return samples[-1]


def z_star(z: complex) -> CompanionPoint:
    """The next point of modulus larger than |z| on the same constant-modulus
    curve with the same Gamma value (continuous argument advanced by 2 pi)."""
    z = complex(z)
    _require_quadrant(z)
    if z.real < 4.0:
        raise DomainError("companion point requires Re(z) >= 4")
    target = _lg(z).imag + TWO_PI
    samples, _ = modulus_arc_to_arg(z, target)
    return CompanionPoint(origin=z, star=samples[-1])


def point_on_modulus_arc(z: complex, target_arg: float) -> complex:
    """The unique point on the arc from z to its companion where the
    continuous argument of Gamma is congruent to ``target_arg`` mod 2 pi.

    Passing exactly arg(z) returns z; passing arg(z) + 2 pi returns the
    companion point itself.
    """
    z = complex(z)
    _require_quadrant(z)
    if z.real < 4.0:
        raise DomainError("modulus-arc search requires Re(z) >= 4")
    arg0 = _lg(z).imag
    delta = target_arg - arg0
    if abs(delta) <= 1e-12:
        return z
    if not (0.0 < delta <= TWO_PI + 1e-9):
        delta = delta - TWO_PI * math.floor(delta / TWO_PI)
        if delta <= 1e-12:
            return z
    samples, _ = modulus_arc_to_arg(z, arg0 + delta)
    return samples[-1]


def reflect_to_lower_quadrant(curve: LevelCurve) -> LevelCurve:
    """Mirror a traced curve through the real axis (conjugation symmetry)."""
    return LevelCurve(
        curve.kind,
        -curve.level if curve.kind == ARGUMENT else curve.level,
        np.conj(curve.samples),
        curve.log_abs.copy(),
        -curve.arg,
        curve.tol,
        curve.terminus,
    )
