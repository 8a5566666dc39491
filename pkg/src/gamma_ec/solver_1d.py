"""Certified zeros of Gamma(z) - A(z) for one complex variable.

The pipeline: locate a crossing point xi with |Gamma(xi)| = |A(xi)|/4 in
the admissible region (right of the perturbation radius, outside the disc
holding A's zeros and poles), pick the corner beta on the modulus arc where
arg Gamma matches arg(-A(xi)), trap one zero inside the traced contour
through beta via a winding-number certificate, refine it by damped Newton,
and march outward along the argument curve to enumerate a zero family with
a measured distribution offset.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import contour as contour_mod
from . import gamma_core, level_curves
from .algebraic_fn import AlgebraicFunction, perturbation_radius, zero_pole_disc_radius
from .errors import (
    DomainError,
    NewtonDivergence,
    NoCrossing,
    SeparationFailure,
    TraceDivergence,
)

__all__ = [
    "CertifiedZero",
    "SearchSetup",
    "SearchState",
    "certify_one_zero",
    "conjugation_commutes",
    "count_zeros_by_radius",
    "distribution_offset",
    "enumerate_zeros",
    "find_xi",
    "search_setup",
    "solve_plane_curve",
]

TWO_PI = 2.0 * math.pi

RESIDUAL_BOUND = 1e-9
XI_REL_TOL = 1e-8
SLACK = 0.05


@dataclass(frozen=True)
class CertifiedZero:
    """A zero with its certificate: the contour, the winding number that
    proves existence inside it, and the refined root with residual
    |Gamma(root) - A(root)| / |A(root)|."""

    region: contour_mod.Contour
    winding: int
    root: complex
    residual: float

    def __post_init__(self):
        if self.winding < 1:
            raise ValueError("certificate requires winding >= 1")
        if not self.region.contains(self.root):
            raise ValueError("root is not strictly inside its region")
        if not self.residual < RESIDUAL_BOUND:
            raise ValueError(f"residual {self.residual:.3e} exceeds {RESIDUAL_BOUND}")

    def bbox(self):
        return self.region.bbox()


@dataclass
class SearchState:
    """Rolling state of the outward enumeration."""

    xi: complex
    beta: complex
    R: float
    exclusion: list = field(default_factory=list)
    beta_star: complex | None = None


@dataclass(frozen=True)
class SearchSetup:
    """Admissible-region data for a right-hand side A."""

    perturbation_N: float
    disc_radius: float
    corner_x: float
    b: complex
    c: float


def _log_abs_gamma(z):
    return gamma_core.log_gamma(z).real


def _log_ratio(A, z):
    """log |Gamma(z)| - log(|A(z)|/4); positive where Gamma dominates."""
    a = A.evaluate(z)
    if a == 0:
        raise DomainError(f"A vanishes at {z}; point lies inside the excluded disc")
    return _log_abs_gamma(z) - math.log(0.25 * abs(a))


def find_xi(A: AlgebraicFunction, start: complex, ray_cap: float = 1e4) -> complex:
    """Crossing point of |Gamma| = |A|/4 from ``start``.

    Where Gamma dominates, walk up (|Gamma| decays); where A dominates,
    walk right (|Gamma| grows).  Bracketing is by step doubling, then
    bisection to 1e-10 in position.
    """
    start = complex(start)
    if not (start.real > gamma_core.alpha() and start.imag > 0.0):
        raise DomainError(f"start {start} outside the working quadrant")
    h0 = _log_ratio(A, start)
    if h0 == 0.0:
        return start
    direction = 1j if h0 > 0.0 else 1.0
    step = 1.0
    t_prev, h_prev = 0.0, h0
    t = step
    while t <= ray_cap:
        h = _log_ratio(A, start + direction * t)
        if (h > 0.0) != (h_prev > 0.0):
            break
        t_prev, h_prev = t, h
        step *= 2.0
        t += step
    else:
        raise NoCrossing(f"no sign change within ray length {ray_cap:g} from {start}")
    lo, hi = t_prev, t
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        h = _log_ratio(A, start + direction * mid)
        if (h > 0.0) == (h0 > 0.0):
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-10:
            break
    xi = start + direction * 0.5 * (lo + hi)
    _check_xi(A, xi)
    return xi


def _check_xi(A, xi):
    a = abs(A.evaluate(xi))
    g = math.exp(_log_abs_gamma(xi))
    if abs(g - 0.25 * a) > XI_REL_TOL * a:
        raise DomainError(f"xi={xi} violates |Gamma| = |A|/4 to {XI_REL_TOL} relative")


def _decimate(samples, cap):
    if len(samples) <= cap:
        return samples
    idx = np.linspace(0, len(samples) - 1, cap).round().astype(int)
    return samples[idx]


def _check_separation(A, K, a_xi, slack=SLACK, per_segment_cap=220):
    """The boundary inequalities behind the winding certificate.

    On every sampled boundary point the perturbation bound
    |A(z) - A(xi)| < |A(xi)|/4 must hold strictly; segment-specific lower
    bounds on |Gamma - A(xi)| (inner arc, argument arcs) and |Gamma| (outer
    arc) are checked with the given slack.
    """
    mod_a = abs(a_xi)
    for seg in K.segments:
        for z in _decimate(seg.samples, per_segment_cap):
            az = A.evaluate(z)
            if not abs(az - a_xi) < 0.25 * mod_a:
                raise SeparationFailure(
                    f"|A(z)-A(xi)| = {abs(az - a_xi):.4e} >= |A(xi)|/4 on {seg.label}",
                    label="perturbation",
                    sample=z,
                )
            gv = gamma_core.gamma(z).value
            if seg.label == "S_bottom":
                ok = abs(gv - a_xi) >= 0.75 * (1.0 - slack) * mod_a
            elif seg.label in ("T_left", "T_right"):
                ok = abs(gv - a_xi) >= (1.0 - slack) * mod_a
            elif seg.label == "S_top":
                ok = abs(gv) >= 1.25 * (1.0 - slack) * mod_a
            else:
                ok = True
            if not ok:
                raise SeparationFailure(
                    f"separation inequality failed on {seg.label}", label=seg.label, sample=z
                )


def _derivative_A(A, z, h_scale=1e-7):
    h = h_scale * (1.0 + abs(z))
    return (A.evaluate(z + h) - A.evaluate(z - h)) / (2.0 * h)


def _refine_newton(A, K, seeds, tol=1e-12, max_iter=60):
    last_err = None
    for z0 in seeds:
        z = complex(z0)
        try:
            fz = gamma_core.gamma(z).value - A.evaluate(z)
        except Exception as exc:  # seed outside domain; try the next one
            last_err = exc
            continue
        for _ in range(max_iter):
            scale = abs(A.evaluate(z))
            if abs(fz) <= tol * max(scale, 1e-300):
                return z, abs(fz) / scale
            g = gamma_core.gamma(z)
            d = g.value * gamma_core.digamma(z) - _derivative_A(A, z)
            if d == 0:
                break
            step = fz / d
            t = 1.0
            while t >= 1.0 / 1024.0:
                zn = z - t * step
                if K.contains(zn):
                    fn = gamma_core.gamma(zn).value - A.evaluate(zn)
                    if abs(fn) < abs(fz):
                        z, fz = zn, fn
                        break
                t *= 0.5
            else:
                break
        # a stall at the evaluation noise floor still certifies when the
        # relative residual is safely below the contract bound
        scale = abs(A.evaluate(z))
        if abs(fz) <= 0.5 * RESIDUAL_BOUND * scale:
            return z, abs(fz) / scale
    raise NewtonDivergence("Newton refinement stalled inside the certified region",
                           diagnostic=last_err)


def _certify(A, xi, slack=SLACK):
    """One certification attempt at a fixed xi; returns (zero, state)."""
    _check_xi(A, xi)
    if xi.real < 16.0:
        raise DomainError("certification requires Re(xi) >= 16")
    a_xi = A.evaluate(xi)
    theta = cmath.phase(-a_xi)
    beta = level_curves.point_on_modulus_arc(xi, theta)
    R = math.exp(gamma_core.log_gamma(xi + 1.0).real)
    K = contour_mod.build_K(beta, R)
    _check_separation(A, K, a_xi, slack=slack)
    w = contour_mod.winding_number(lambda z: gamma_core.gamma(z).value - A.evaluate(z), K)
    if w.winding < 1:
        raise SeparationFailure(f"winding {w.winding} < 1 on the certified contour")
    # seed Newton at the centroid; fall back to the preimage of A(xi)
    lg_beta = gamma_core.log_gamma(beta)
    mid, _ = level_curves.modulus_arc_to_arg(beta, lg_beta.imag + math.pi)
    chi_samples, _ = level_curves.argument_arc_to_log_modulus(mid[-1], math.log(abs(a_xi)))
    root, residual = _refine_newton(A, K, [K.centroid(), chi_samples[-1]])
    zero = CertifiedZero(region=K, winding=w.winding, root=root, residual=residual)
    state = SearchState(xi=xi, beta=beta, R=R, beta_star=K.segment("S_bottom").samples[0])
    return zero, state


def certify_one_zero(A: AlgebraicFunction, xi: complex, max_attempts: int = 3) -> CertifiedZero:
    """Certify one zero of Gamma - A near xi.

    A separation failure restarts from a new crossing point with doubled
    real part, up to ``max_attempts`` attempts.
    """
    xi = complex(xi)
    attempt = 0
    while True:
        try:
            zero, _ = _certify(A, xi)
            return zero
        except (SeparationFailure, TraceDivergence):
            attempt += 1
            if attempt >= max_attempts:
                raise
            xi = find_xi(A, complex(2.0 * xi.real, max(xi.imag, 0.5)))


def search_setup(A: AlgebraicFunction, rng=None) -> SearchSetup:
    """Admissible-region data: perturbation radius N, excluded-disc radius,
    the corner abscissa max(16, N, disc), the first crossing point b reached
    from the corner, and the distribution offset c = 2|b| / (1 + 2 pi /
    (log floor(Re b) - 1)^2)."""
    rng = np.random.default_rng(0) if rng is None else rng
    region = gamma_core.QuadrantRegion()
    N = perturbation_radius(A, 3.0, region, rng=rng)
    D = zero_pole_disc_radius(A)
    corner = max(16.0, N, D)
    b = find_xi(A, complex(corner, 0.5))
    c = 2.0 * abs(b) / (1.0 + TWO_PI / (math.log(math.floor(b.real)) - 1.0) ** 2)
    return SearchSetup(perturbation_N=N, disc_radius=D, corner_x=corner, b=b, c=c)


def distribution_offset(A: AlgebraicFunction, rng=None):
    """(b, c) of the zero-count lower bound count(R) >= 2R/(1+2 eps) - c."""
    setup = search_setup(A, rng=rng)
    return setup.b, setup.c


def conjugation_commutes(A: AlgebraicFunction, rng=None, points: int = 10) -> bool:
    """Whether A(conj z) = conj A(z) at random sample points (then zeros
    mirror into the conjugate quadrant)."""
    rng = np.random.default_rng(1) if rng is None else rng
    for _ in range(points):
        z = complex(rng.uniform(5.0, 50.0), rng.uniform(1.0, 40.0))
        try:
            v1 = A.evaluate(z.conjugate())
            v2 = A.evaluate(z)
        except Exception:
            return False
        if abs(v1 - v2.conjugate()) > 1e-8 * (1.0 + abs(v2)):
            return False
    return True


def _successor_xi(A, state):
    """Next crossing point along the argument curve through the companion
    corner, per the outward enumeration rule."""
    anchor = state.beta_star
    for dist in (1.0, 1.5, 2.25, 3.4):
        try:
            w1 = level_curves.argument_arc_to_distance(anchor, anchor, dist, -1.0)
            w2 = level_curves.argument_arc_to_distance(anchor, anchor, dist, +1.0)
        except TraceDivergence:
            break
        try:
            h1, h2 = _log_ratio(A, w1), _log_ratio(A, w2)
        except DomainError:
            continue
        if h1 < 0.0 < h2:
            theta = gamma_core.log_gamma(anchor).imag
            xi = _bisect_sign_on_argument_curve(A, theta, w1, w2)
            if xi is not None:
                return xi
    # fall back to a fresh crossing farther out
    return find_xi(A, complex(state.xi.real + 2.0, max(state.xi.imag, 0.5)))


def _bisect_sign_on_argument_curve(A, theta, w1, w2, iters=90):
    za, zb = w1, w2
    for _ in range(iters):
        zm = 0.5 * (za + zb)
        corr = level_curves._correct(level_curves.ARGUMENT, theta, zm)
        if corr is None:
            return None
        zm = corr[0]
        h = _log_ratio(A, zm)
        if abs(h) < 1e-12:
            break
        if h < 0.0:
            za = zm
        else:
            zb = zm
        if abs(zb - za) < 1e-13 * max(1.0, abs(zb)):
            break
    try:
        _check_xi(A, zm)
    except DomainError:
        return None
    return zm


def enumerate_zeros(A: AlgebraicFunction, R_ball: float, epsilon: float,
                    rng=None, max_zeros: int = 200):
    """Certified zeros of Gamma - A reached by marching outward until the
    crossing points leave the ball of radius R_ball.

    When A commutes with conjugation every zero is mirrored into the lower
    quadrant as well.  Regions of distinct zeros are pairwise disjoint.
    """
    if epsilon <= 0.0:
        raise DomainError("epsilon must be positive")
    setup = search_setup(A, rng=rng)
    if R_ball <= setup.corner_x:
        return []
    mirror = conjugation_commutes(A, rng=rng)
    zeros = []
    xi = setup.b
    escalations = 0
    while len(zeros) < max_zeros and abs(xi) <= R_ball:
        zero, state = _certify(A, xi)
        state.exclusion = [z.region for z in zeros]
        if any(abs(zero.root - prev.root) < 1e-6 for prev in zeros):
            # successor landed back in an already-certified region; push out
            escalations += 1
            if escalations > 3:
                break
            xi = find_xi(A, complex(state.xi.real + 2.0 * escalations, max(state.xi.imag, 0.5)))
            continue
        zeros.append(zero)
        xi = _successor_xi(A, state)
    if mirror:
        mirrored = [
            CertifiedZero(
                region=z.region.conjugate(),
                winding=z.winding,
                root=z.root.conjugate(),
                residual=z.residual,
            )
            for z in zeros
        ]
        zeros = zeros + mirrored
    return zeros


def count_zeros_by_radius(A: AlgebraicFunction, radii, epsilon: float, rng=None):
    """Zero counts |root| <= R for each R in ``radii`` from one enumeration
    out to max(radii), with the measured offset c."""
    radii = sorted(float(r) for r in radii)
    setup = search_setup(A, rng=rng)
    zeros = enumerate_zeros(A, radii[-1] + 3.0, epsilon, rng=rng)
    counts = {R: sum(1 for z in zeros if abs(z.root) <= R) for R in radii}
    return counts, setup, zeros


def solve_plane_curve(p_coeffs, r_ball: float | None = None, max_attempts: int = 3,
                      rng=None):
    """Certified solutions of p(z, Gamma(z)) = 0 for a bivariate polynomial
    given as a dense coefficient grid (p_coeffs[i][j] multiplies X^i Y^j).

    Each branch of Y over a real base point right of the excluded disc is
    continued as a right-hand side; branch-point trouble shifts the base
    outward and retries.
    """
    p = np.asarray(p_coeffs, dtype=complex)
    if p.ndim != 2 or p.shape[1] < 2 or not np.any(np.abs(p[:, 1:]) > 0):
        raise DomainError("polynomial must depend on Y")
    nz = np.argwhere(np.abs(p) > 0)
    if len(nz) == 1 and tuple(nz[0]) == (0, 1):
        raise DomainError("p in C*Y is excluded (its only solution set is a pole locus)")
    scale = float(np.abs(p).max())
    base_x = max(20.0, 2.0 * _coeff_radius(p))
    last_exc = None
    for _ in range(max_attempts):
        try:
            branches = _branches_at(p, base_x)
            out = []
            for A in branches:
                ball = r_ball if r_ball is not None else base_x + 45.0
                out.extend(enumerate_zeros(A, ball, 1.0, rng=rng))
            return out
        except Exception as exc:  # branch points or continuation trouble: move outward
            last_exc = exc
            base_x *= 2.0
    raise last_exc


def _coeff_radius(p):
    mags = np.abs(p)
    lead = mags.max()
    return 1.0 + float(mags.sum() / lead)


def _branches_at(p, base_x):
    cy = np.atleast_1d(np.polynomial.polynomial.polyval(base_x, p))
    roots = np.roots(cy[::-1])
    branches = []
    for y0 in roots:
        if any(abs(y0 - b.implicit.base_value) < 1e-8 * (1.0 + abs(y0)) for b in branches):
            raise DomainError(f"coincident branch values at X={base_x}; base point too special")
        branches.append(AlgebraicFunction.from_implicit(p, base_x, complex(y0)))
    return branches
