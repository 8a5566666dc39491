"""Complex gamma evaluation, independent oracles, and identity checks.

Points of the complex plane are plain ``complex`` values throughout the
package.  The production evaluator is a Lanczos approximation (g = 607/128,
15 terms, Godfrey's published coefficient set) on the right half-plane,
extended left by the reflection formula.  ``log_gamma`` returns the analytic
branch of log Gamma on ``Re(z) > 0`` (real on the positive reals), so its
imaginary part is the standard continuous argument used by the curve-tracing
modules.

Two deliberately slow evaluators are kept as independent cross-checking
oracles and share no code with the Lanczos path: the Weierstrass product
(``gamma_weierstrass_oracle``) and the Gauss limit (``gamma_gauss_oracle``).
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PoleError

__all__ = [
    "EULER_GAMMA",
    "GammaValue",
    "QuadrantRegion",
    "alpha",
    "digamma",
    "gamma",
    "gamma_gauss_oracle",
    "gamma_weierstrass_oracle",
    "grad_log_abs_gamma",
    "log_gamma",
    "log_sin_pi",
    "stirling_bounds_check",
    "stirling_mu",
    "stirling_mu_radius",
    "verify_gamma_algebraic_identity",
    "verify_identities",
]

EULER_GAMMA = 0.5772156649015328606065120900824024
LOG_2PI = 1.8378770664093454835606594728112353
_LOG_SQRT_2PI = 0.5 * LOG_2PI
_SQRT_2PI = math.sqrt(2.0 * math.pi)

POLE_GUARD = 1e-12
_OVERFLOW_LOG = 709.0

# Lanczos, g = 607/128, 15 terms (Godfrey's set, as used in NR3's gammln).
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C0 = 0.99999999999999709182
_LANCZOS_C = (
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)

# Asymptotic digamma: psi(z) ~ log z - 1/(2z) - sum B_{2k}/(2k z^{2k}).
_PSI_COEFFS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


@dataclass(frozen=True)
class GammaValue:
    """Value of Gamma at one point.

    ``log_modulus`` is log|Gamma(z)| and ``arg`` the principal argument of
    Gamma(z) in (-pi, pi]; ``value`` is Gamma(z) itself and may overflow to
    a flagged complex infinity for large inputs while the logarithmic
    fields stay finite.
    """

    log_modulus: float
    arg: float
    value: complex

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value.real) and math.isfinite(self.value.imag)


@dataclass(frozen=True)
class QuadrantRegion:
    """Open quadrant {Re(z) > x_min, Im(z) > y_min}.

    Defaults to the working quadrant whose left edge is the positive zero
    of Gamma' (x_min = alpha ~ 1.4616).
    """

    x_min: float = field(default=None)  # type: ignore[assignment]
    y_min: float = 0.0

    def __post_init__(self):
        if self.x_min is None:
            object.__setattr__(self, "x_min", alpha())
        if self.x_min < alpha() - 1e-12:
            raise DomainError(f"x_min={self.x_min} below the gradient-sign threshold {alpha():.6f}")

    def contains(self, z: complex) -> bool:
        return z.real > self.x_min and z.imag > self.y_min

    def sample_tuples(self, rng, radius_lo, radius_hi, count):
        """Log-uniform moduli in [radius_lo, radius_hi], uniform quadrant angles.

        Returns 1-tuples so the perturbation-radius sampler can treat the
        quadrant like a one-dimensional product domain.
        """
        out = []
        while len(out) < count:
            u = math.exp(rng.uniform(math.log(radius_lo), math.log(radius_hi)))
            phi = rng.uniform(0.02, 0.5 * math.pi - 0.02)
            z = u * cmath.exp(1j * phi)
            if self.contains(z):
                out.append((z,))
        return out


def _check_pole(z: complex):
    n = round(z.real)
    if n <= 0 and abs(z - n) <= POLE_GUARD:
        raise PoleError(f"z={z} is within {POLE_GUARD} of the pole at {n}")


def log_gamma(z: complex) -> complex:
    """Analytic branch of log Gamma on Re(z) > 0 (real on the positive reals).

    The imaginary part is continuous on the whole right half-plane, not
    reduced mod 2*pi.
    """
    z = complex(z)
    if z.real <= 0.0:
        raise DomainError(f"log_gamma requires Re(z) > 0, got {z}")
    shift = 0.0 + 0.0j
    while z.real < 0.5:
        shift -= cmath.log(z)
        z += 1.0
    t = z + _LANCZOS_G + 0.5
    ser = _LANCZOS_C0
    for k, c in enumerate(_LANCZOS_C, start=1):
        ser += c / (z + k)
    return (z + 0.5) * cmath.log(t) - t + cmath.log(_SQRT_2PI * ser) - cmath.log(z) + shift


def digamma(z: complex) -> complex:
    """Logarithmic derivative of Gamma for Re(z) > 0."""
    z = complex(z)
    if z.real <= 0.0:
        raise DomainError(f"digamma requires Re(z) > 0, got {z}")
    acc = 0.0 + 0.0j
    while z.real < 12.0:
        acc -= 1.0 / z
        z += 1.0
    w = 1.0 / (z * z)
    s = 0.0 + 0.0j
    for c in reversed(_PSI_COEFFS):
        s = (s + c) * w
    return acc + cmath.log(z) - 0.5 / z - s


def log_sin_pi(z: complex) -> complex:
    """A branch of log sin(pi z), overflow-safe for large |Im z|."""
    z = complex(z)
    y = z.imag
    if y == 0.0:
        return cmath.log(cmath.sin(math.pi * z))
    if y < 0.0:
        return log_sin_pi(z.conjugate()).conjugate()
    # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}), |e^{2 i pi z}| < 1 here
    w = cmath.exp(2j * math.pi * z)
    return complex(-math.log(2.0), 0.5 * math.pi) - 1j * math.pi * z + cmath.log(1.0 - w)


def _safe_exp(lg: complex) -> complex:
    if lg.real > _OVERFLOW_LOG:
        return complex(math.inf * math.cos(lg.imag), math.inf * math.sin(lg.imag))
    return cmath.exp(lg)


def gamma(z: complex) -> GammaValue:
    """Evaluate Gamma(z) away from its poles.

    On the right half-plane ``log_modulus``/``arg`` come from the analytic
    log_gamma branch (arg reduced to the principal interval); on the left
    half-plane the value is obtained from the reflection through sin(pi z)
    and the logarithmic fields describe that value.
    """
    z = complex(z)
    _check_pole(z)
    if z.real > 0.0:
        lg = log_gamma(z)
    else:
        # Gamma(z) = pi / (sin(pi z) Gamma(1 - z))
        lg = complex(math.log(math.pi), 0.0) - log_sin_pi(z) - log_gamma(1.0 - z)
    value = _safe_exp(lg)
    arg = math.remainder(lg.imag, 2.0 * math.pi)
    if arg <= -math.pi:
        arg += 2.0 * math.pi
    return GammaValue(log_modulus=lg.real, arg=arg, value=value)


def _chunked_sum(total_terms, term_fn, chunk=200_000):
    """Sum term_fn(k) for k = 1..total_terms over numpy chunks."""
    acc = 0.0 + 0.0j
    k0 = 1
    while k0 <= total_terms:
        k1 = min(k0 + chunk - 1, total_terms)
        ks = np.arange(k0, k1 + 1, dtype=np.float64)
        acc += complex(term_fn(ks).sum())
        k0 = k1 + 1
    return acc


def gamma_weierstrass_oracle(z: complex, terms: int, tail_correction: bool = False) -> complex:
    """Truncated Weierstrass product  e^{-g z}/z * prod_k (1+z/k)^{-1} e^{z/k}.

    Truncation error is O(|z|^2 / terms).  With ``tail_correction`` the
    Euler-Maclaurin estimate of the omitted tail is added, improving the
    error to O(|z|^5 / terms^4 + |z|^2 / terms^3); this makes 10^6 terms
    enough for ~1e-10 accuracy at moderate |z|.
    """
    z = complex(z)
    _check_pole(z)
    if terms < 1:
        raise ValueError("terms must be a positive integer")
    lg = -EULER_GAMMA * z - cmath.log(z)
    lg += _chunked_sum(terms, lambda ks: z / ks - np.log(1.0 + z / ks))
    if tail_correction:
        K = float(terms)
        s2 = 1.0 / K - 1.0 / (2.0 * K**2) + 1.0 / (6.0 * K**3)
        s3 = 1.0 / (2.0 * K**2) - 1.0 / (2.0 * K**3) + 1.0 / (4.0 * K**4)
        s4 = 1.0 / (3.0 * K**3) - 1.0 / (2.0 * K**4)
        s5 = 1.0 / (4.0 * K**4)
        lg += (z**2 / 2.0) * s2 - (z**3 / 3.0) * s3 + (z**4 / 4.0) * s4 - (z**5 / 5.0) * s5
    return _safe_exp(lg)


def gamma_gauss_oracle(z: complex, n: int) -> complex:
    """Gauss approximant  n! n^z / (z (z+1) ... (z+n)); converges as n grows.

    Relative error is about |z| |z+1| / (2n) for n well beyond |z|^2.
    """
    z = complex(z)
    _check_pole(z)
    if n < 1:
        raise ValueError("n must be a positive integer")
    lg = math.lgamma(n + 1) + z * math.log(n) - cmath.log(z)
    lg -= _chunked_sum(n, lambda ks: np.log(z + ks))
    return _safe_exp(lg)


def verify_identities(z: complex, n: int = 2):
    """Residuals |LHS/RHS - 1| of the three difference equations at z.

    Returns (recurrence, reflection, multiplication) residuals, the last
    one for the given order n >= 2.  Branch choices cancel because the
    comparison happens through exp of the log difference.
    """
    z = complex(z)
    if n < 2:
        raise ValueError("multiplication order n must be >= 2")
    _check_pole(z)
    _check_pole(z + 1.0)
    if z.real <= 0.0 and abs(z.imag) <= POLE_GUARD:
        raise PoleError(f"multiplication identity needs z off the negative reals, got {z}")

    lg_z = _lg_any(z)
    r1 = abs(cmath.exp(_lg_any(z + 1.0) - lg_z - cmath.log(z)) - 1.0)
    if abs(z - round(z.real)) <= POLE_GUARD:
        # reflection degenerates at the integers (0 * inf); the other two
        # identities are still meaningful there
        r2 = math.nan
    else:
        r2 = abs(cmath.exp(lg_z + _lg_any(1.0 - z) + log_sin_pi(z) - math.log(math.pi)) - 1.0)
    lhs = sum(_lg_any(z + k / n) for k in range(n))
    rhs = 0.5 * (n - 1) * LOG_2PI + (0.5 - n * z) * math.log(n) + _lg_any(n * z)
    r3 = abs(cmath.exp(lhs - rhs) - 1.0)
    return r1, r2, r3


def _lg_any(z: complex) -> complex:
    """Some branch of log Gamma for any non-pole z; continuous per half-plane."""
    z = complex(z)
    _check_pole(z)
    if z.real > 0.0:
        return log_gamma(z)
    shift = 0.0 + 0.0j
    while z.real <= 0.5:
        shift -= cmath.log(z)
        z += 1.0
    return log_gamma(z) + shift


def verify_gamma_algebraic_identity(radical_degrees=(6, 4, 2, 20)) -> float:
    """Residual of the multiplicative identity between Gamma values at
    1/5, 4/15, 1/3, 2/15 and four positive-real radicals.

    ``radical_degrees`` are the root indices of the four radicals in order
    (5^(1/6), (...)^(1/4), 2^(1/2), 3^(1/20)); perturbing one of them is a
    sanity check that the comparison can fail.
    """
    d1, d2, d3, d4 = radical_degrees
    inner = 5.0 - 7.0 / math.sqrt(5.0) + math.sqrt(6.0 - 6.0 / math.sqrt(5.0))
    lhs = (
        gamma(1.0 / 5.0).value.real
        * gamma(4.0 / 15.0).value.real
        * 5.0 ** (1.0 / d1)
        * inner ** (1.0 / d2)
    )
    rhs = (
        gamma(1.0 / 3.0).value.real
        * gamma(2.0 / 15.0).value.real
        * 2.0 ** (1.0 / d3)
        * 3.0 ** (1.0 / d4)
    )
    return abs(lhs / rhs - 1.0)


def stirling_mu(z: complex) -> complex:
    """Correction term mu(z) = log Gamma(z) - (log sqrt(2 pi) + (z - 1/2) log z - z)."""
    z = complex(z)
    return log_gamma(z) - (_LOG_SQRT_2PI + (z - 0.5) * cmath.log(z) - z)


_lock = threading.Lock()
_cache: dict = {}


def alpha() -> float:
    """Positive real zero of Gamma' (Newton on digamma, seeded at 1.46)."""
    with _lock:
        if "alpha" not in _cache:
            x = 1.46
            for _ in range(40):
                f = digamma(x).real
                h = 1e-6
                df = (digamma(x + h).real - digamma(x - h).real) / (2.0 * h)
                step = f / df
                x -= step
                if abs(step) < 1e-14:
                    break
            if abs(x - 1.4616) > 5e-5:
                raise RuntimeError(f"computed alpha={x} disagrees with 1.4616")
            _cache["alpha"] = x
        return _cache["alpha"]


def stirling_mu_radius() -> float:
    """Calibrated radius beyond which |mu(z)| < 1 holds on the open quadrant.

    Scans |mu| on a log grid of radii and quadrant angles; the value is the
    smallest sampled radius from which outward every sample satisfies
    |mu| < 1, padded by 5 percent.
    """
    with _lock:
        if "mu_radius" not in _cache:
            radii = np.geomspace(1.0 / 64.0, 64.0, 120)
            angles = np.linspace(0.02, 0.5 * math.pi - 0.02, 48)
            bad = 0.0
            for r in radii:
                if any(abs(stirling_mu(r * cmath.exp(1j * a))) >= 1.0 for a in angles):
                    bad = r
            _cache["mu_radius"] = 1.05 * bad if bad > 0.0 else float(radii[0])
        return _cache["mu_radius"]


def stirling_bounds_check(z: complex) -> bool:
    """Whether |Gamma(z)| lies between the two-sided Stirling estimates
    sqrt(2 pi)/e * |z|^(x-1/2) e^(-y arg z - x)  and  e times the same."""
    z = complex(z)
    if not (z.real > 0.0 and z.imag > 0.0 and abs(z) > stirling_mu_radius()):
        raise DomainError(f"z={z} outside the calibrated Stirling region")
    x, y = z.real, z.imag
    log_core = _LOG_SQRT_2PI + (x - 0.5) * math.log(abs(z)) - y * cmath.phase(z) - x
    log_mod = log_gamma(z).real
    return log_core - 1.0 <= log_mod <= log_core + 1.0


def grad_log_abs_gamma(z: complex):
    """Gradient (d/dx, d/dy) of log|Gamma| inside the working quadrant."""
    z = complex(z)
    if not (z.real > alpha() and z.imag > 0.0):
        raise DomainError(f"z={z} outside the quadrant Re > alpha, Im > 0")
    psi = digamma(z)
    return psi.real, -psi.imag
