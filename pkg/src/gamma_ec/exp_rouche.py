"""Certified zeros of exp(z) - A(z) on 2 x 2*pi rectangles.

The periodic analogue of the gamma solver: pick xi with exp(Re xi) =
|A(xi)|/4, slide up the left edge to beta where arg(exp) matches
arg(-A(xi)), and verify the four edge inequalities that force
|exp(z) - A(xi)| > |A(xi)|/4 >= |A(z) - A(xi)| on the whole rectangle
boundary, so the zero count transfers from z -> exp(z) - A(xi) (exactly
one zero per rectangle).  Advancing xi upward by 2*pi per iteration yields
a ladder of distinct certified zeros.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import contour as contour_mod
from . import gamma_core
from .algebraic_fn import AlgebraicFunction, perturbation_radius, zero_pole_disc_radius
from .errors import DomainError, NewtonDivergence, NoCrossing, SeparationFailure
from .solver_1d import CertifiedZero

__all__ = [
    "ExpSearchState",
    "PERTURBATION_BUDGET",
    "solve_exp_equation",
    "solve_exp_equation_detailed",
]

TWO_PI = 2.0 * math.pi

# every point of the rectangle through beta is within this distance of xi
PERTURBATION_BUDGET = math.sqrt(16.0 * math.pi**2 + 4.0)  # < 13

_EDGE_SAMPLES = 256


@dataclass(frozen=True)
class ExpSearchState:
    """One rung of the ladder: xi with exp(Re xi) = |A(xi)|/4 and the
    rectangle corner beta directly above it (same Re, arg(exp(beta)) =
    arg(-A(xi)), at most 2*pi higher)."""

    xi: complex
    beta: complex

    def __post_init__(self):
        a = abs(self.beta.imag - self.xi.imag)
        if self.beta.real != self.xi.real or not (-1e-12 <= a <= TWO_PI + 1e-12):
            raise ValueError("beta must sit on the vertical through xi, within 2*pi")


class _ExpQuadrantLike:
    """Sampling helper so the perturbation-radius scan can range over the
    annulus-like band where the exponential ladder lives."""

    def sample_tuples(self, rng, lo, hi, count):
        out = []
        for _ in range(count):
            u = math.exp(rng.uniform(math.log(lo), math.log(hi)))
            phi = rng.uniform(0.05, math.pi - 0.05)
            out.append((u * cmath.exp(1j * phi),))
        return out


def _solve_x1(A, y1):
    """Re-part x1 with exp(x1) = |A(x1 + i y1)|/4, by bracketed bisection."""
    x = 0.0
    for _ in range(8):  # fixed-point warm start
        a = abs(A.evaluate(complex(x, y1)))
        if a == 0.0:
            raise DomainError("A vanishes on the search line")
        x = math.log(0.25 * a)
    lo, hi = x - 2.0, x + 2.0
    g = lambda t: t - math.log(0.25 * abs(A.evaluate(complex(t, y1))))
    glo, ghi = g(lo), g(hi)
    spread = 2.0
    while glo > 0.0 or ghi < 0.0:
        spread *= 2.0
        if spread > 64.0:
            raise NoCrossing(f"no solution of exp(x) = |A|/4 on the line Im = {y1}")
        lo, hi = x - spread, x + spread
        glo, ghi = g(lo), g(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


def _check_edges(A, rect, xi, a_xi):
    """Edge inequalities for the zero-count transfer, on all edge samples."""
    mod_a = abs(a_xi)
    x1 = xi.real
    for seg in rect.segments:
        for z in seg.samples:
            if not abs(z - xi) < PERTURBATION_BUDGET:
                raise SeparationFailure("rectangle sample too far from xi",
                                        label=seg.label, sample=z)
            az = A.evaluate(z)
            if not abs(az - a_xi) < 0.25 * mod_a:
                raise SeparationFailure(
                    f"|A(z)-A(xi)| = {abs(az - a_xi):.4e} >= |A(xi)|/4 on {seg.label}",
                    label="perturbation", sample=z)
            if not abs(az) < 1.25 * mod_a:
                raise SeparationFailure("|A(z)| >= (5/4)|A(xi)|", label=seg.label, sample=z)
            ez = cmath.exp(z)
            if seg.label == "rect_left":
                ok = abs(ez - a_xi) >= 0.75 * mod_a * (1.0 - 1e-9)
            elif seg.label in ("rect_top", "rect_bottom"):
                ok = abs(ez - a_xi) > mod_a * (1.0 - 1e-12)
            elif seg.label == "rect_right":
                ok = abs(ez) > 4.0 * math.exp(x1) * (1.0 - 1e-12)
            else:
                ok = True
            if not ok or not abs(ez - a_xi) > 0.25 * mod_a:
                raise SeparationFailure(f"edge inequality failed on {seg.label}",
                                        label=seg.label, sample=z)


def _refine(A, rect, z0, tol=1e-12, max_iter=60):
    z = complex(z0)
    fz = cmath.exp(z) - A.evaluate(z)
    for _ in range(max_iter):
        scale = abs(A.evaluate(z))
        if abs(fz) <= tol * max(scale, 1e-300):
            return z, abs(fz) / scale
        h = 1e-7 * (1.0 + abs(z))
        d = cmath.exp(z) - (A.evaluate(z + h) - A.evaluate(z - h)) / (2.0 * h)
        if d == 0:
            break
        step = fz / d
        t = 1.0
        while t >= 1.0 / 1024.0:
            zn = z - t * step
            if rect.contains(zn):
                fn = cmath.exp(zn) - A.evaluate(zn)
                if abs(fn) < abs(fz):
                    z, fz = zn, fn
                    break
            t *= 0.5
        else:
            break
    raise NewtonDivergence("refinement stalled inside the rectangle")


def solve_exp_equation(A: AlgebraicFunction, count: int, rng=None,
                       y_start: float | None = None):
    """Certify ``count`` zeros of exp(z) - A(z), one per rectangle, climbing
    the imaginary axis in steps of 2*pi."""
    return [zero for zero, _ in solve_exp_equation_detailed(A, count, rng=rng,
                                                            y_start=y_start)]


def solve_exp_equation_detailed(A: AlgebraicFunction, count: int, rng=None,
                                y_start: float | None = None):
    """Like solve_exp_equation but pairs every zero with its search state
    (the xi/beta rung it was certified from)."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(2) if rng is None else rng
    if y_start is None:
        N = perturbation_radius(A, PERTURBATION_BUDGET, _ExpQuadrantLike(), rng=rng)
        D = zero_pole_disc_radius(A)
        y_start = max(N, D) + 1.0
    zeros = []
    y1 = y_start
    while len(zeros) < count:
        x1 = _solve_x1(A, y1)
        xi = complex(x1, y1)
        a_xi = A.evaluate(xi)
        if abs(math.exp(x1) - 0.25 * abs(a_xi)) > 1e-8 * abs(a_xi):
            raise DomainError("exp(Re xi) = |A(xi)|/4 failed to converge")
        # left-edge corner where the image argument matches arg(-A(xi))
        y2 = y1 + (cmath.phase(-a_xi) - y1) % TWO_PI
        beta = complex(x1, y2)
        state = ExpSearchState(xi=xi, beta=beta)
        rect = contour_mod.build_rectangle(beta, samples_per_edge=_EDGE_SAMPLES)
        _check_edges(A, rect, state.xi, a_xi)
        w = contour_mod.winding_number(lambda z: cmath.exp(z) - A.evaluate(z), rect)
        if w.winding != 1:
            raise SeparationFailure(f"winding {w.winding} != 1 on the rectangle")
        # seed at the zero of exp(z) - A(xi) inside the rectangle
        y_seed = cmath.phase(a_xi) + TWO_PI * math.ceil((y2 - cmath.phase(a_xi)) / TWO_PI)
        if not (y2 < y_seed < y2 + TWO_PI):
            y_seed = y2 + math.pi
        root, residual = _refine(A, rect, complex(math.log(abs(a_xi)), y_seed))
        zeros.append(
            (CertifiedZero(region=rect, winding=w.winding, root=root, residual=residual),
             state)
        )
        y1 += TWO_PI
    return zeros
