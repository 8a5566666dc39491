"""Closed certification contours and winding numbers.

The quadrilateral contour around a prospective zero of Gamma - A is built
from four traced arcs: two constant-modulus arcs (inner level r and outer
level R) and the two constant-argument arcs joining them.  Rectangles with
width 2 and height 2*pi serve the exponential solver.  Winding numbers of
function images around 0 are computed from summed argument increments with
adaptive edge bisection, never from derivatives.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import gamma_core, level_curves
from .errors import DomainError, GeometryError, NonConvergence, ZeroOnContour

__all__ = [
    "Contour",
    "ContourSegment",
    "WindingResult",
    "build_K",
    "build_rectangle",
    "rho",
    "winding_number",
]

CLOSURE_TOL = 1e-7
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ContourSegment:
    label: str
    samples: np.ndarray  # complex, ordered along the traversal

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class WindingResult:
    winding: int
    min_image_modulus: float
    samples_used: int


class Contour:
    """Closed, simple, positively oriented polyline with labeled segments."""

    def __init__(self, segments, closure_tol=CLOSURE_TOL, check_simple=True):
        stitched = []
        prev_end = None
        for label, samples in segments:
            pts = np.asarray(samples, dtype=complex).copy()
            if len(pts) < 2:
                raise GeometryError(f"segment {label} has fewer than 2 samples")
            if prev_end is not None:
                gap = abs(pts[0] - prev_end)
                if gap > closure_tol:
                    raise GeometryError(f"segment {label} starts {gap:.3e} away from the previous end")
                pts[0] = prev_end
            stitched.append(ContourSegment(label, pts))
            prev_end = pts[-1]
        first = stitched[0].samples[0]
        gap = abs(prev_end - first)
        if gap > closure_tol:
            raise GeometryError(f"contour fails to close by {gap:.3e}")
        self.segments = tuple(stitched)
        pts = [self.segments[0].samples]
        for seg in self.segments[1:]:
            pts.append(seg.samples[1:])
        closed = np.concatenate(pts)
        closed[-1] = first if gap > 0.0 else closed[-1]
        if abs(closed[-1] - closed[0]) > 0.0:
            closed = np.append(closed, closed[0])
        self._points = closed
        if self.signed_area() <= 0.0:
            raise GeometryError("contour is not positively oriented")
        if check_simple and self._self_intersects():
            raise GeometryError("contour intersects itself")

    @property
    def orientation(self):
        return "positive"

    def points(self):
        """Closed sample array (last point equals the first)."""
        return self._points

    def segment(self, label):
        for seg in self.segments:
            if seg.label == label:
                return seg
        raise KeyError(label)

    def signed_area(self):
        p = self._points
        x, y = p.real, p.imag
        return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))

    def centroid(self):
        p = self._points
        x0, y0 = p.real[:-1], p.imag[:-1]
        x1, y1 = p.real[1:], p.imag[1:]
        cross = x0 * y1 - x1 * y0
        area = 0.5 * float(np.sum(cross))
        cx = float(np.sum((x0 + x1) * cross)) / (6.0 * area)
        cy = float(np.sum((y0 + y1) * cross)) / (6.0 * area)
        return complex(cx, cy)

    def diameter(self):
        p = self._points[:-1]
        step = max(1, len(p) // 256)
        q = p[::step]
        return float(np.max(np.abs(q[:, None] - q[None, :])))

    def bbox(self):
        p = self._points
        return (
            float(p.real.min()),
            float(p.real.max()),
            float(p.imag.min()),
            float(p.imag.max()),
        )

    def contains(self, z):
        """Ray-casting point-in-polygon test on the sampled boundary."""
        z = complex(z)
        p = self._points
        x0, y0 = p.real[:-1], p.imag[:-1]
        x1, y1 = p.real[1:], p.imag[1:]
        cond = (y0 > z.imag) != (y1 > z.imag)
        with np.errstate(divide="ignore", invalid="ignore"):
            xs = x0 + (z.imag - y0) * (x1 - x0) / (y1 - y0)
        hits = cond & (xs > z.real)
        return bool(np.count_nonzero(hits) % 2 == 1)

    def interior_points(self, count, max_tries=20000):
        """Deterministic low-discrepancy interior points (Halton in the bbox,
        filtered by containment)."""
        xmin, xmax, ymin, ymax = self.bbox()
        out = []
        i = 1
        while len(out) < count and i < max_tries:
            u, v = _halton(i, 2), _halton(i, 3)
            z = complex(xmin + u * (xmax - xmin), ymin + v * (ymax - ymin))
            if self.contains(z):
                out.append(z)
            i += 1
        if len(out) < count:
            raise GeometryError("could not place interior sample points")
        return out

    def densify(self, factor=2):
        """Insert factor-1 midpoints per edge; same geometry, finer sampling."""
        segs = []
        for seg in self.segments:
            pts = seg.samples
            new = [pts[0]]
            for a, b in zip(pts, pts[1:]):
                for k in range(1, factor):
                    new.append(a + (b - a) * (k / factor))
                new.append(b)
            segs.append((seg.label, np.asarray(new)))
        return Contour(segs, check_simple=False)

    def conjugate(self):
        """Mirror through the real axis, re-reversed to stay positively oriented."""
        segs = [
            (seg.label, np.conj(seg.samples[::-1]))
            for seg in reversed(self.segments)
        ]
        return Contour(segs, check_simple=False)

    def to_json_dict(self):
        return {
            "orientation": self.orientation,
            "segments": [
                {
                    "label": seg.label,
                    "samples": [[float(z.real), float(z.imag)] for z in seg.samples],
                }
                for seg in self.segments
            ],
        }

    def _self_intersects(self):
        p = self._points[:-1]
        step = max(1, len(p) // 512)
        q = np.append(p[::step], p[:1])
        a, b = q[:-1], q[1:]
        n = len(a)
        if n < 4:
            return False
        d = b - a
        # proper-crossing test for every non-adjacent pair
        def cross(u, v):
            return u.real * v.imag - u.imag * v.real

        A = a[:, None]
        D = d[:, None]
        d1 = cross(D, a[None, :] - A)
        d2 = cross(D, b[None, :] - A)
        d3 = cross(d[None, :], a[:, None] - a[None, :])
        d4 = cross(d[None, :], b[:, None] - a[None, :])
        hit = (d1 * d2 < 0) & (d3 * d4 < 0)
        idx = np.arange(n)
        adj = np.abs(idx[:, None] - idx[None, :])
        adj = np.minimum(adj, n - adj)
        hit &= adj > 1
        return bool(np.any(hit))


def _halton(i, base):
    f, r = 1.0, 0.0
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


# ---------------------------------------------------------------------------
# construction

def rho(beta: complex, R: float) -> complex:
    """Point on the constant-argument curve through ``beta`` (same component,
    larger modulus) where |Gamma| = R."""
    beta = complex(beta)
    lgb = gamma_core.log_gamma(beta)
    if not (beta.real > gamma_core.alpha() and beta.imag > 0.0):
        raise DomainError(f"beta={beta} outside the working quadrant")
    if math.log(R) <= lgb.real:
        raise DomainError("target modulus must exceed |Gamma(beta)|")
    samples, _ = level_curves.argument_arc_to_log_modulus(beta, math.log(R))
    return samples[-1]


def build_K(beta: complex, R: float) -> Contour:
    """Closed contour through ``beta`` bounded by the modulus levels
    |Gamma(beta)| and R and by two constant-argument arcs.

    Traversal is counterclockwise.  Labels: S_bottom is the inner-modulus
    arc through beta (where |Gamma| = |Gamma(beta)|), S_top the outer arc
    at |Gamma| = R, T_left/T_right the argument arcs through beta and its
    companion respectively.
    """
    beta = complex(beta)
    if not (beta.real >= 4.0 and beta.imag > 0.0 and beta.real > gamma_core.alpha()):
        raise DomainError(f"beta={beta} must lie in the quadrant with Re >= 4")
    lgb = gamma_core.log_gamma(beta)
    log_R = math.log(R)
    if log_R <= lgb.real + 1e-12:
        raise DomainError("R must exceed |Gamma(beta)|")
    theta = lgb.imag

    s_low, _ = level_curves.modulus_arc_to_arg(beta, theta + TWO_PI)       # beta -> beta*
    beta_star = s_low[-1]
    t_left, _ = level_curves.argument_arc_to_log_modulus(beta, log_R)      # beta -> rho(beta, R)
    rho_beta = t_left[-1]
    t_right, _ = level_curves.argument_arc_to_log_modulus(beta_star, log_R)
    rho_star = t_right[-1]
    s_top, _ = level_curves.modulus_arc_to_arg(rho_beta, theta + TWO_PI)   # rho(beta,R) -> rho(beta*,R)
    if abs(s_top[-1] - rho_star) > CLOSURE_TOL:
        raise GeometryError(
            f"outer arc misses the companion corner by {abs(s_top[-1] - rho_star):.3e}"
        )
    segments = [
        ("S_bottom", np.asarray(s_low[::-1])),   # beta* -> beta along |Gamma| = r
        ("T_left", np.asarray(t_left)),          # beta -> rho(beta, R)
        ("S_top", np.asarray(s_top)),            # rho(beta, R) -> rho(beta*, R)
        ("T_right", np.asarray(t_right[::-1])),  # rho(beta*, R) -> beta*
    ]
    return Contour(segments)


def build_rectangle(beta: complex, samples_per_edge: int = 64) -> Contour:
    """Positively oriented rectangle with corners beta, beta+2,
    beta+2+2*pi*i, beta+2*pi*i."""
    beta = complex(beta)
    c0 = beta
    c1 = beta + 2.0
    c2 = beta + 2.0 + TWO_PI * 1j
    c3 = beta + TWO_PI * 1j
    t = np.linspace(0.0, 1.0, samples_per_edge + 1)
    edge = lambda a, b: a + (b - a) * t
    return Contour(
        [
            ("rect_bottom", edge(c0, c1)),
            ("rect_right", edge(c1, c2)),
            ("rect_top", edge(c2, c3)),
            ("rect_left", edge(c3, c0)),
        ],
        check_simple=False,
    )


# ---------------------------------------------------------------------------
# winding numbers

class _WindingState:
    __slots__ = ("samples", "budget", "min_mod")

    def __init__(self, samples, budget):
        self.samples = samples
        self.budget = budget
        self.min_mod = math.inf


def winding_number(f, contour: Contour, max_samples: int = 1_000_000) -> WindingResult:
    """Winding of the image f(contour) around 0.

    Sums principal argument increments along edges, bisecting any edge whose
    image turns by more than pi/2; the final sum must land within 0.01 of an
    integer multiple of 2*pi.
    """
    pts = contour.points()
    vals = np.array([f(z) for z in pts])
    if np.any(~np.isfinite(vals)):
        raise ZeroOnContour("function not finite on a contour sample")
    mods = np.abs(vals)
    local = np.maximum(np.roll(mods[:-1], 1), np.roll(mods[:-1], -1))
    local = np.append(local, local[0])
    if np.any(mods < 1e-12 * np.maximum(local, 1e-300)):
        i = int(np.argmin(mods / np.maximum(local, 1e-300)))
        raise ZeroOnContour(f"|f| ~ {mods[i]:.3e} at contour sample {pts[i]}")
    state = _WindingState(samples=len(pts), budget=max_samples)
    state.min_mod = float(np.min(mods))
    total = 0.0
    for i in range(len(pts) - 1):
        total += _arg_increment(f, pts[i], vals[i], pts[i + 1], vals[i + 1], state, 0)
    turns = total / TWO_PI
    winding = round(turns)
    if abs(turns - winding) > 0.01:
        raise NonConvergence(f"argument sum {turns:.6f} turns is not near an integer")
    return WindingResult(winding=int(winding), min_image_modulus=state.min_mod, samples_used=state.samples)


def _arg_increment(f, za, va, zb, vb, state, depth):
    d = cmath.phase(vb / va)
    if abs(d) <= 0.5 * math.pi:
        return d
    if state.samples >= state.budget or depth > 48:
        raise NonConvergence("edge refinement exceeded the sample budget")
    zm = 0.5 * (za + zb)
    vm = f(zm)
    state.samples += 1
    am = abs(vm)
    scale = max(abs(va), abs(vb), 1e-300)
    if not (math.isfinite(am)) or am < 1e-12 * scale:
        raise ZeroOnContour(f"|f| ~ {am:.3e} near contour point {zm}")
    state.min_mod = min(state.min_mod, am)
    return _arg_increment(f, za, va, zm, vm, state, depth + 1) + _arg_increment(
        f, zm, vm, zb, vb, state, depth + 1
    )
