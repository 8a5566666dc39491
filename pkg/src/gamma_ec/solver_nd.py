"""Systems Gamma(z_k) = A_k(z_1..z_n) on polydisk domains at infinity.

The driver mirrors the one-variable pipeline per coordinate: a tuple xi is
selected so that every |Gamma(xi_k)| equals a quarter of the slowest-growing
right-hand side, a product of traced contours is built around it, the
boundary domination |Gamma(z_k) - A_k(xi)| > |A_k(z) - A_k(xi)| is verified
on a sampled product boundary, and a damped multivariate Newton run from a
constructed preimage lands the solution.  Because the true product boundary
has too many real dimensions to exhaust, every result is tagged
certification_level = "sampled".

Holomorphic right-hand sides with finite nonzero limits are solved by the
same machinery through declared limit targets (constant-target contours).
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import contour as contour_mod
from . import gamma_core, level_curves
from .algebraic_fn import AlgebraicFunction, AsymptoticData, estimate_asymptotics, perturbation_radius
from .errors import (
    DomainError,
    NewtonDivergence,
    PoleError,
    SelectionFailure,
    SeparationFailure,
    TraceDivergence,
)

__all__ = [
    "PolydiskDomain",
    "ProductRegion",
    "RoucheReport",
    "SystemSolution",
    "SystemSpec",
    "build_product_region",
    "growth_index",
    "make_system_spec",
    "periodic_points",
    "select_xi",
    "solve_system",
    "verify_rouche_boundary",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PolydiskDomain:
    """Neighborhood of a projective direction at infinity.

    Membership: |z_n| > 1/epsilon, |z_k / z_n - c_k| < epsilon for every k,
    and theta < arg(z_n) < eta.  The anchor coordinate is the last one
    (c_n = 1); the remaining direction entries must be >= 1.
    """

    c: tuple
    epsilon: float
    theta: float = -0.75 * math.pi
    eta: float = 0.75 * math.pi

    def __post_init__(self):
        c = tuple(float(x) for x in self.c)
        object.__setattr__(self, "c", c)
        if not c or abs(c[-1] - 1.0) > 1e-12:
            raise DomainError("direction must be normalized with last coordinate 1")
        if any(x < 1.0 for x in c):
            raise DomainError("direction coordinates must be >= 1")
        if not (0.0 < self.epsilon < 0.5):
            raise DomainError("epsilon must lie in (0, 1/2)")
        if not (self.theta < self.eta <= self.theta + TWO_PI):
            raise DomainError("need theta < eta <= theta + 2*pi")

    @property
    def n(self):
        return len(self.c)

    def contains(self, zs) -> bool:
        zs = tuple(complex(z) for z in zs)
        zn = zs[-1]
        if abs(zn) <= 1.0 / self.epsilon:
            return False
        if not (self.theta < cmath.phase(zn) < self.eta):
            return False
        return all(abs(zs[k] / zn - self.c[k]) < self.epsilon for k in range(self.n))

    def sample_tuples(self, rng, lo, hi, count):
        """Tuples with euclidean norm in [lo, hi], used by the perturbation
        radius scan."""
        norm_c = math.sqrt(sum(x * x for x in self.c))
        out = []
        tries = 0
        while len(out) < count and tries < 50 * count:
            tries += 1
            t = math.exp(rng.uniform(math.log(lo / norm_c), math.log(hi / norm_c)))
            phi = rng.uniform(max(self.theta, 0.05), min(self.eta, 0.5 * math.pi - 0.05))
            zn = t * cmath.exp(1j * phi)
            pt = []
            for k in range(self.n - 1):
                shift = 0.9 * self.epsilon * t * _unit_disc(rng)
                pt.append(self.c[k] * zn + shift)
            pt.append(zn)
            norm = math.sqrt(sum(abs(z) ** 2 for z in pt))
            if lo * 0.999 <= norm <= hi * 1.001:
                out.append(tuple(pt))
        return out


def _unit_disc(rng):
    r = math.sqrt(rng.uniform(0.0, 1.0))
    return r * cmath.exp(1j * rng.uniform(0.0, TWO_PI))


@dataclass(frozen=True)
class SystemSpec:
    """A system Gamma(z_k) = A_k(z), its domain, and growth data.

    ``limits`` is set for holomorphic right-hand sides with finite nonzero
    limits at infinity; it switches the solver to constant-target contours.
    """

    n: int
    A: tuple
    domain: PolydiskDomain
    asym: tuple
    limits: tuple | None = None


def make_system_spec(functions, c=None, epsilon=0.25, theta=None, eta=None,
                     limits=None, rng=None) -> SystemSpec:
    """Assemble and validate a SystemSpec from right-hand sides.

    ``functions`` are AlgebraicFunction values or expression strings of a
    common arity n; ``c`` defaults to all ones.
    """
    fns = []
    for f in functions:
        if isinstance(f, AlgebraicFunction):
            fns.append(f)
        else:
            fns.append(AlgebraicFunction.from_expression(f, arity=len(functions)))
    n = len(fns)
    if n == 0:
        raise DomainError("empty system")
    for f in fns:
        if f.arity != n:
            raise DomainError(f"function {f!r} has arity {f.arity}, expected {n}")
    c = tuple([1.0] * n) if c is None else tuple(float(x) for x in c)
    kwargs = {}
    if theta is not None:
        kwargs["theta"] = float(theta)
    if eta is not None:
        kwargs["eta"] = float(eta)
    domain = PolydiskDomain(c=c, epsilon=float(epsilon), **kwargs)
    rng = np.random.default_rng(3) if rng is None else rng
    asym = tuple(estimate_asymptotics(f, c, epsilon, rng=rng) for f in fns)
    spec = SystemSpec(n=n, A=tuple(fns), domain=domain, asym=asym,
                      limits=None if limits is None else tuple(complex(w) for w in limits))
    _validate_spec(spec, rng)
    return spec


def _validate_spec(spec, rng, probes=12):
    """Growth bounds must hold on fresh samples and no A_k may vanish."""
    for t in (2e2, 2e4):
        pts = spec.domain.sample_tuples(rng, t, 2.0 * t, probes)
        for zs in pts:
            tn = abs(zs[-1])
            for f, asym in zip(spec.A, spec.asym):
                v = abs(f.evaluate(zs))
                if v == 0.0:
                    raise DomainError(f"right-hand side {f!r} vanishes at {zs}")
                if tn > asym.validity_radius:
                    if not (asym.a * tn ** (asym.d - 1) < v <= asym.b * tn ** asym.d):
                        raise DomainError(
                            f"growth bound fails for {f!r} at |z_n|={tn:.3g}: |A|={v:.3g}"
                        )


def growth_index(spec: SystemSpec) -> int:
    """Index of the slowest-growing right-hand side, from sampled moduli at
    |z_n| = 1e3, 1e4, 1e5 (ties to the smaller index)."""
    phases = 0.85
    scores = []
    for i, f in enumerate(spec.A):
        logs = []
        for t in (1e3, 1e4, 1e5):
            zs = tuple(ck * t * cmath.exp(1j * phases) for ck in spec.domain.c)
            logs.append(math.log(abs(f.evaluate(zs))))
        scores.append(sum(logs))
    best = min(scores)
    for i, s in enumerate(scores):
        if s <= best + 1e-12:
            return i
    return 0


def _angle_solve(radius, target_log_mod, lo, hi):
    """Angle phi in (lo, hi) with log|Gamma(radius e^{i phi})| = target.

    log|Gamma| is strictly decreasing in the angle here; returns None when
    the target is not bracketed.
    """
    lo = max(lo, 1e-4)
    hi = min(hi, 0.5 * math.pi - 1e-9)
    f = lambda p: gamma_core.log_gamma(radius * cmath.exp(1j * p)).real - target_log_mod
    flo, fhi = f(lo), f(hi)
    if not (flo > 0.0 > fhi):
        return None
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) < 1e-11:
            return mid
        if fm > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _initial_scale(spec, j, rng):
    d = [a.d for a in spec.asym]
    dj = d[j]
    dom = spec.domain
    r_floor = max(16.0, max(di - dj + 3 for di in d))
    t = max(2.0 * 1.05 / dom.epsilon, max(a.validity_radius for a in spec.asym) * 1.05)
    # geometric floor: the quadrant corner Q_{r,r} must be reachable at the
    # angle where |Gamma| matches the quarter-target
    for _ in range(200):
        phi = math.acos(min(0.95, 0.5 * math.pi / math.log(max(t, 3.0))))
        if t * math.cos(phi) >= 1.1 * r_floor and t * math.sin(phi) >= 1.1 * r_floor:
            break
        t *= 1.15
    # perturbation radii for the shifted-ball condition
    N = 0.0
    for i, f in enumerate(spec.A):
        N = max(N, perturbation_radius(f, d[i] - dj + 3.0, dom, rng=rng))
    norm_c = math.sqrt(sum(x * x for x in dom.c))
    t = max(t, 1.1 * N / norm_c)
    # growth lower bounds of the selection
    a_j = spec.asym[j].a
    for i, asym in enumerate(spec.asym):
        L = 5.0 * asym.b / (a_j * (dom.c[i] - dom.epsilon) ** (d[i] - dj + 1))
        t = max(t, 1.1 * L / dom.c[i])
    return t, r_floor


def select_xi(spec: SystemSpec, scale=None, rng=None):
    """Starting tuple with (i) moduli above the growth thresholds,
    (ii) right-hand sides stable on the shifted balls, and
    (iii) |Gamma(xi_k)| = |A_j(xi)|/4 for every k."""
    rng = np.random.default_rng(4) if rng is None else rng
    j = growth_index(spec)
    t0, r_floor = _initial_scale(spec, j, rng)
    t = max(t0, float(scale)) if scale is not None else t0
    last = None
    for _ in range(5):
        try:
            return _select_at_scale(spec, j, t, r_floor, rng)
        except SelectionFailure as exc:
            last = exc
            t *= 1.5
    raise last


def _select_at_scale(spec, j, t, r_floor, rng):
    dom = spec.domain
    n = spec.n
    d = [a.d for a in spec.asym]
    dj = d[j]
    phi = math.acos(min(0.95, 0.5 * math.pi / math.log(max(t, 3.0))))
    xi = [dom.c[k] * t * cmath.exp(1j * phi) for k in range(n)]
    m_log = math.log(0.25 * abs(spec.A[j].evaluate(tuple(xi))))
    for _ in range(80):
        phi_new = _angle_solve(t, m_log, 0.05, 0.5 * math.pi - 1e-6)
        if phi_new is None:
            raise SelectionFailure("no anchor angle matches the quarter-target modulus",
                                   condition="(iii)")
        phi = phi_new
        xi[n - 1] = t * cmath.exp(1j * phi)
        for k in range(n - 1):
            delta = 0.9 * dom.epsilon / dom.c[k]
            psi = _angle_solve(dom.c[k] * t, m_log, phi - delta, phi + delta)
            if psi is None:
                raise SelectionFailure(
                    f"coordinate {k + 1} cannot reach the quarter-target inside its ball",
                    condition="(iii)")
            xi[k] = dom.c[k] * t * cmath.exp(1j * psi)
        m_new = math.log(0.25 * abs(spec.A[j].evaluate(tuple(xi))))
        if abs(m_new - m_log) < 1e-10:
            m_log = m_new
            break
        m_log = m_new
    xi = tuple(xi)
    _check_conditions(spec, j, xi, r_floor, rng)
    return xi


def _check_conditions(spec, j, xi, r_floor, rng, probes=24):
    dom = spec.domain
    d = [a.d for a in spec.asym]
    dj = d[j]
    a_j = spec.asym[j].a
    m = 0.25 * abs(spec.A[j].evaluate(xi))
    for k, z in enumerate(xi):
        if not (z.real > r_floor and z.imag > r_floor):
            raise SelectionFailure(f"coordinate {k + 1} outside Q_{{{r_floor},{r_floor}}}",
                                   condition="quadrant")
        L = 5.0 * spec.asym[k].b / (a_j * (dom.c[k] - dom.epsilon) ** (d[k] - dj + 1))
        if abs(z) < L:
            raise SelectionFailure(f"|xi_{k + 1}| below the growth threshold {L:.3g}",
                                   condition="(i)")
        g = math.exp(gamma_core.log_gamma(z).real)
        if abs(g - m) > 1e-8 * 4.0 * m:
            raise SelectionFailure(f"|Gamma(xi_{k + 1})| misses the quarter-target",
                                   condition="(iii)")
    if not dom.contains(xi):
        raise SelectionFailure("tuple left the polydisk", condition="membership")
    radii = [d[i] - dj + 3.0 for i in range(spec.n)]
    for _ in range(probes):
        w = tuple(r * _unit_disc(rng) for r in radii)
        shifted = tuple(z + dw for z, dw in zip(xi, w))
        for i, f in enumerate(spec.A):
            base = f.evaluate(xi)
            if not abs(f.evaluate(shifted) - base) < 0.25 * abs(base):
                raise SelectionFailure(
                    f"A_{i + 1} moves more than a quarter on the shifted ball",
                    condition="(ii)")


@dataclass(frozen=True)
class ProductRegion:
    """Product of per-coordinate contours around xi; j is the index of the
    slowest-growing right-hand side used for the radii."""

    factors: tuple
    xi: tuple
    j: int
    betas: tuple = ()

    def contains(self, zs) -> bool:
        return all(f.contains(z) for f, z in zip(self.factors, zs))


def build_product_region(spec: SystemSpec, xi) -> ProductRegion:
    """Per-coordinate contours K(beta_k, R_k) with beta_k on the modulus arc
    of xi_k at the argument of -A_k(xi) and R_k grown through the recurrence
    |Gamma(beta + m + 1)| = |beta + m| |Gamma(beta + m)|."""
    j = growth_index(spec)
    d = [a.d for a in spec.asym]
    factors, betas = [], []
    for k, z in enumerate(xi):
        a_k = spec.A[k].evaluate(xi)
        beta = level_curves.point_on_modulus_arc(z, cmath.phase(-a_k))
        steps = d[k] - d[j] + 2
        log_R = gamma_core.log_gamma(beta).real
        for mstep in range(steps):
            log_R += math.log(abs(beta + mstep))
        factors.append(contour_mod.build_K(beta, math.exp(log_R)))
        betas.append(beta)
    return ProductRegion(factors=tuple(factors), xi=tuple(xi), j=j, betas=tuple(betas))


@dataclass(frozen=True)
class RoucheReport:
    passed: bool
    margin: float
    factor: int | None = None
    sample: tuple | None = None


def verify_rouche_boundary(spec: SystemSpec, region: ProductRegion,
                           samples_per_factor: int = 48,
                           interior_per_factor: int = 8) -> RoucheReport:
    """Sampled check of the boundary domination.

    For each k, points z_k on factor k's contour are crossed with
    low-discrepancy interior points of the other factors; the margin is the
    worst value of (|Gamma(z_k) - A_k(xi)| - |A_k(z) - A_k(xi)|)/|A_k(xi)|.
    """
    targets = spec.limits if spec.limits is not None else tuple(
        f.evaluate(region.xi) for f in spec.A
    )
    worst = math.inf
    worst_k, worst_sample = None, None
    n = spec.n
    interiors = [f.interior_points(interior_per_factor) for f in region.factors]
    for k in range(n):
        pts = region.factors[k].points()[:-1]
        step = max(1, len(pts) // samples_per_factor)
        boundary = pts[::step]
        others = [interiors[i] for i in range(n) if i != k]
        combos = list(itertools.product(*others)) if others else [()]
        for zk in boundary:
            lhs = abs(gamma_core.gamma(zk).value - targets[k])
            for combo in combos:
                zs = list(combo[:k]) + [zk] + list(combo[k:])
                rhs = abs(spec.A[k].evaluate(tuple(zs)) - targets[k])
                margin = (lhs - rhs) / abs(targets[k])
                if margin < worst:
                    worst, worst_k, worst_sample = margin, k, tuple(zs)
    return RoucheReport(passed=worst > 0.0, margin=worst, factor=worst_k, sample=worst_sample)


@dataclass(frozen=True)
class SystemSolution:
    """A solved tuple with per-equation relative residuals and the sampled
    Rouché certificate it came from."""

    point: tuple
    residuals: tuple
    region: ProductRegion
    rouche_margin: float
    certification_level: str = "sampled"


def _seed_chi(spec, region, targets):
    """Preimage tuple with Gamma(chi_k) = targets[k], built by walking the
    modulus arc from beta_k to the target argument, then out the argument
    curve to the target modulus."""
    chi = []
    for k, beta in enumerate(region.betas):
        lg_b = gamma_core.log_gamma(beta)
        arc, _ = level_curves.modulus_arc_to_arg(beta, lg_b.imag + math.pi)
        ray, _ = level_curves.argument_arc_to_log_modulus(arc[-1], math.log(abs(targets[k])))
        chi.append(ray[-1])
    return tuple(chi)


def _system_values(spec, zs):
    return [gamma_core.gamma(z).value - f.evaluate(zs) for z, f in zip(zs, spec.A)]


def _newton_nd(spec, region, seed, tol=1e-12, max_iter=80):
    n = spec.n
    zs = list(seed)
    F = _system_values(spec, tuple(zs))
    for _ in range(max_iter):
        scales = [max(abs(f.evaluate(tuple(zs))), 1e-300) for f in spec.A]
        err = max(abs(F[k]) / scales[k] for k in range(n))
        if err <= tol:
            return (
                tuple(complex(z) for z in zs),
                tuple(float(abs(F[k]) / scales[k]) for k in range(n)),
            )
        J = np.zeros((n, n), dtype=complex)
        for k in range(n):
            gk = gamma_core.gamma(zs[k])
            J[k, k] += gk.value * gamma_core.digamma(zs[k])
            for l in range(n):
                h = 1e-7 * (1.0 + abs(zs[l]))
                zp = list(zs)
                zm = list(zs)
                zp[l] += h
                zm[l] -= h
                J[k, l] -= (spec.A[k].evaluate(tuple(zp)) - spec.A[k].evaluate(tuple(zm))) / (2.0 * h)
        try:
            step = np.linalg.solve(J, np.asarray(F))
        except np.linalg.LinAlgError:
            break
        norm0 = max(abs(F[k]) / scales[k] for k in range(n))
        t = 1.0
        while t >= 1.0 / 1024.0:
            trial = [zs[k] - t * step[k] for k in range(n)]
            if all(f.contains(z) for f, z in zip(region.factors, trial)):
                Ft = _system_values(spec, tuple(trial))
                if max(abs(Ft[k]) / scales[k] for k in range(n)) < norm0:
                    zs, F = trial, Ft
                    break
            t *= 0.5
        else:
            break
    # accept a stall at the evaluation noise floor if well below contract
    scales = [max(abs(f.evaluate(tuple(zs))), 1e-300) for f in spec.A]
    if max(abs(F[k]) / scales[k] for k in range(n)) <= 1e-9:
        return (
            tuple(complex(z) for z in zs),
            tuple(float(abs(F[k]) / scales[k]) for k in range(n)),
        )
    raise NewtonDivergence("multivariate refinement stalled inside the product region")


def _verify_solution(spec, region, point, oracle_terms=400_000):
    if not region.contains(point):
        raise DomainError("solution left its product region")
    if spec.limits is None and not spec.domain.contains(point):
        raise DomainError("solution left the polydisk domain")
    for k, (z, f) in enumerate(zip(point, spec.A)):
        target = f.evaluate(point)
        w = gamma_core.gamma_weierstrass_oracle(z, oracle_terms, tail_correction=True)
        if abs(w - target) > 1e-4 * abs(target):
            raise DomainError(f"oracle disagreement on equation {k + 1}")


def solve_system(spec: SystemSpec, count: int = 1, max_modulus: float | None = None,
                 rng=None, samples_per_factor: int = 48):
    """Solve the system repeatedly from outward-marching starting tuples.

    Returns up to ``count`` SystemSolution values whose anchor coordinates
    stay below ``max_modulus`` (when given).  Regions that fail the sampled
    boundary check raise SeparationFailure after internal retries.
    """
    rng = np.random.default_rng(5) if rng is None else rng
    sols = []
    scale = None
    failures = 0
    attempts = 0
    while len(sols) < count:
        attempts += 1
        if attempts > 4 * count + 8:
            break
        if spec.limits is not None:
            region, targets = _target_region(spec, scale, rng)
        else:
            xi = select_xi(spec, scale=scale, rng=rng)
            region = build_product_region(spec, xi)
            targets = tuple(f.evaluate(xi) for f in spec.A)
        anchor = abs(region.xi[-1])
        if max_modulus is not None and anchor > max_modulus:
            break
        report = verify_rouche_boundary(spec, region, samples_per_factor=samples_per_factor)
        if not report.passed:
            failures += 1
            if failures > 3:
                raise SeparationFailure(
                    f"boundary margin {report.margin:.3e} at factor {report.factor}",
                    label=f"factor {report.factor}", sample=report.sample)
            scale = anchor * 1.7 + 5.0
            continue
        seeds = [_seed_chi(spec, region, targets)]
        point = None
        for attempt in range(5):
            try:
                point, residuals = _newton_nd(spec, region, seeds[-1])
                break
            except NewtonDivergence:
                jig = tuple(
                    f.interior_points(attempt + 2)[-1] for f in region.factors
                )
                seeds.append(jig)
        if point is None:
            raise NewtonDivergence("all seeds stalled", diagnostic=report)
        _verify_solution(spec, region, point)
        if all(max(abs(a - b) for a, b in zip(point, s.point)) > 1e-6 for s in sols):
            sols.append(SystemSolution(point=point, residuals=residuals, region=region,
                                       rouche_margin=report.margin))
        scale = anchor * 1.6 + 4.0
        if max_modulus is not None and scale > max_modulus:
            break
    return sols


def _target_region(spec, scale, rng):
    """Constant-target contours for declared limits: factor k traps the
    annulus r_k < |w| < R_k around |limit_k|."""
    targets = spec.limits
    rs = [0.5 * abs(w) for w in targets]
    Rs = [2.0 * abs(w) for w in targets]
    delta = min(min(abs(w) - r, R - abs(w)) for w, r, R in zip(targets, rs, Rs))
    # find a scale beyond which every |f_k - w_k| < delta on samples
    t = 22.0 if scale is None else max(scale, 22.0)
    for _ in range(60):
        pts = spec.domain.sample_tuples(rng, t, 2.0 * t, 16)
        ok = all(
            abs(f.evaluate(zs) - w) < 0.9 * delta
            for zs in pts
            for f, w in zip(spec.A, targets)
        )
        if ok:
            break
        t *= 1.4
    else:
        raise SelectionFailure("right-hand sides do not settle near their limits")
    betas, factors, xi = [], [], []
    for k, w in enumerate(targets):
        x_line = max(16.0, t * spec.domain.c[k] / math.sqrt(2.0))
        y = _vertical_log_mod(x_line, math.log(rs[k]))
        p0 = complex(x_line, y)
        beta = level_curves.point_on_modulus_arc(p0, cmath.phase(-w))
        betas.append(beta)
        factors.append(contour_mod.build_K(beta, Rs[k]))
        xi.append(beta)
    return ProductRegion(factors=tuple(factors), xi=tuple(xi), j=0, betas=tuple(betas)), targets


def _vertical_log_mod(x, target):
    """Height y with log|Gamma(x + i y)| = target on a vertical line."""
    lo, hi = 1e-6, 1.0
    f = lambda y: gamma_core.log_gamma(complex(x, y)).real - target
    if f(lo) < 0.0:
        raise TraceDivergence(f"modulus already below target on Re = {x}")
    while f(hi) > 0.0:
        hi *= 2.0
        if hi > 1e5:
            raise TraceDivergence("vertical bisection found no crossing")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# periodic points

def _gamma_or_none(z):
    try:
        v = gamma_core.gamma(z).value
    except PoleError:
        return None
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        return None
    return v


def _iterate(z, m, bound=400.0):
    for _ in range(m):
        if z is None or abs(z) > bound:
            return None
        z = _gamma_or_none(z)
    return z


def _newton_composed(z, m, tol=1e-13, iters=80):
    for _ in range(iters):
        g = _iterate(z, m)
        if g is None:
            return None
        f = g - z
        h = 1e-7 * (1.0 + abs(z))
        gp, gm = _iterate(z + h, m), _iterate(z - h, m)
        if gp is None or gm is None:
            return None
        dd = (gp - gm) / (2.0 * h) - 1.0
        if abs(dd) < 1e-14:
            return None
        step = f / dd
        z = z - step
        if abs(step) < tol * (1.0 + abs(z)):
            return z
    return None


def _is_minimal_cycle(z, period, margin=1e-4):
    for m in range(1, period):
        g = _iterate(z, m)
        if g is None or abs(g - z) < margin:
            return False
    return True


def _local_cycles(period, want, residual_tol=1e-9):
    """Low-lying periodic points found by Newton on the composed map from a
    grid of seeds; these carry small cycle multipliers, so the composed
    residual is far below what the far-out family can reach in double
    precision."""
    sols = []
    for xr in np.linspace(0.2, 5.5, 18):
        for yi in np.linspace(0.05, 3.0, 11):
            z = _newton_composed(complex(xr, yi), period)
            if z is None:
                continue
            g = _iterate(z, period)
            if g is None or abs(g - z) > residual_tol:
                continue
            if not _is_minimal_cycle(z, period):
                continue
            if any(abs(z - s) < 1e-6 for s in sols):
                continue
            sols.append(z)
            if len(sols) >= want:
                return sols
    return sols


def _real_fixed_points(x_max=60.0):
    """Fixed points of Gamma on the real interval (alpha, x_max)."""
    a = gamma_core.alpha()
    f = lambda x: gamma_core.gamma(complex(x, 0.0)).value.real - x
    xs = np.linspace(a + 1e-3, x_max, 400)
    out = []
    for x0, x1 in zip(xs, xs[1:]):
        if (f(x0) > 0) != (f(x1) > 0):
            lo, hi = x0, x1
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if (f(mid) > 0) == (f(lo) > 0):
                    lo = mid
                else:
                    hi = mid
            out.append(complex(0.5 * (lo + hi), 0.0))
    return out


def _cyclic_spec(period, rng=None):
    names = [f"z{(i % period) + 1}" for i in range(1, period + 1)]
    c = tuple(1.0 + 0.25 * (period - 1 - i) for i in range(period))
    return make_system_spec(names, c=c, rng=rng)


def periodic_points(period: int, count: int = 1, rng=None, max_modulus: float = 1e4):
    """Points of exact period ``period`` under iteration of Gamma.

    Combines the real-axis fixed point (period 1), low-lying cycles from a
    composed-map Newton search, and the far-out family from solving the
    cyclic system on a polydisk.  Minimality |Gamma^m(z) - z| > 1e-4 for
    0 < m < period is enforced on every returned point.
    """
    if period < 1:
        raise DomainError("period must be a positive integer")
    rng = np.random.default_rng(6) if rng is None else rng
    points = []
    if period == 1:
        points.extend(_real_fixed_points())
    else:
        points.extend(_local_cycles(period, count))
    if len(points) < count:
        spec = _cyclic_spec(period, rng=rng)
        try:
            sols = solve_system(spec, count=count - len(points), max_modulus=max_modulus, rng=rng)
        except (SelectionFailure, SeparationFailure, NewtonDivergence, TraceDivergence):
            sols = []
        for s in sols:
            z = s.point[0]
            if _is_minimal_cycle(z, period) and all(abs(z - p) > 1e-6 for p in points):
                points.append(z)
    return points[:count] if count is not None else points
