"""Right-hand-side functions A(z_1, ..., z_n).

An ``AlgebraicFunction`` is either an explicit expression tree (rational
operations, integer powers, k-th roots, exp) or one branch of an implicit
plane curve p(X, Y) = 0 selected by a base point and base value.  Branches
are never switched silently: multivalued nodes are continued along paths
with adaptive step bisection, and ``evaluate`` on an implicit form continues
from the base point along a straight segment.

Expression grammar (infix)::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' integer)?          # integer exponent, may be negative
    atom   := number | 'i' | 'pi' | var | '(' expr ')'
            | 'exp(' expr ')' | 'sqrt(' expr ')' | 'root(' expr ',' integer ')'
    var    := 'z' (arity 1) | 'z1' ... 'zN'

``sqrt(w)`` is ``root(w, 2)``.  Root nodes take the principal branch at a
single-point evaluation; ``continue_along`` keeps them on the branch that
varies continuously from the start of the path.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (
    BranchPointError,
    DegenerateDirectionError,
    DomainError,
    NoRadiusFound,
    PoleError,
)

__all__ = [
    "AlgebraicFunction",
    "AsymptoticData",
    "estimate_asymptotics",
    "perturbation_radius",
    "zero_pole_disc_radius",
]

_POLE_EPS = 1e-12
_MIN_STEP = 1e-9


# ---------------------------------------------------------------------------
# expression trees

class _Node:
    __slots__ = ()


class _Const(_Node):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = complex(value)


class _Var(_Node):
    __slots__ = ("index",)

    def __init__(self, index):
        self.index = index


class _Bin(_Node):
    __slots__ = ("op", "left", "right")

    def __init__(self, op, left, right):
        self.op = op
        self.left = left
        self.right = right


class _Pow(_Node):
    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent):
        self.base = base
        self.exponent = int(exponent)


class _Exp(_Node):
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg


class _Root(_Node):
    # identity (id()) keys the branch state during continuation
    __slots__ = ("arg", "k")

    def __init__(self, arg, k):
        if k < 2:
            raise ValueError("root index must be >= 2")
        self.arg = arg
        self.k = int(k)


class _StepReject(Exception):
    """Internal: continuation step too large to keep the branch unambiguous."""


def _eval_node(node, zs, state):
    if isinstance(node, _Const):
        return node.value
    if isinstance(node, _Var):
        return zs[node.index]
    if isinstance(node, _Bin):
        a = _eval_node(node.left, zs, state)
        b = _eval_node(node.right, zs, state)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if abs(b) < _POLE_EPS:
            raise PoleError(f"division by {b} during evaluation")
        return a / b
    if isinstance(node, _Pow):
        a = _eval_node(node.base, zs, state)
        if node.exponent < 0 and abs(a) < _POLE_EPS:
            raise PoleError(f"negative power of {a}")
        return a ** node.exponent
    if isinstance(node, _Exp):
        return cmath.exp(_eval_node(node.arg, zs, state))
    if isinstance(node, _Root):
        v = _eval_node(node.arg, zs, state)
        if abs(v) < _POLE_EPS:
            raise BranchPointError(f"{node.k}-th root evaluated at {v}")
        principal = cmath.exp(cmath.log(v) / node.k)
        if state is None:
            return principal
        prev = state.get(id(node))
        if prev is None:
            state[id(node)] = principal
            return principal
        omega = cmath.exp(2j * math.pi / node.k)
        candidates = [principal * omega**j for j in range(node.k)]
        dists = [abs(c - prev) for c in candidates]
        best = min(range(node.k), key=dists.__getitem__)
        # adjacent branch values sit 2|c| sin(pi/k) apart; stay well inside
        sep = 2.0 * abs(principal) * math.sin(math.pi / node.k)
        if dists[best] > 0.45 * sep:
            raise _StepReject
        state[id(node)] = candidates[best]
        return candidates[best]
    raise TypeError(f"unknown node {node!r}")


def _has_multivalued(node):
    if isinstance(node, _Root):
        return True
    if isinstance(node, _Bin):
        return _has_multivalued(node.left) or _has_multivalued(node.right)
    if isinstance(node, _Pow):
        return _has_multivalued(node.base)
    if isinstance(node, _Exp):
        return _has_multivalued(node.arg)
    return False


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot tokenize expression at: {text[pos:]!r}")
        pos = m.end()
        if m.group("num") is not None:
            out.append(("num", float(m.group("num"))))
        elif m.group("name") is not None:
            out.append(("name", m.group("name")))
        else:
            out.append(("op", m.group("op")))
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0
        self.max_var = -1

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, op):
        kind, val = self.next()
        if kind != "op" or val != op:
            raise ValueError(f"expected {op!r}, got {val!r}")

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            raise ValueError(f"trailing input at token {self.peek()!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.next()[1]
            node = _Bin(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            op = self.next()[1]
            node = _Bin(op, node, self.unary())
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.next()
            return _Bin("-", _Const(0.0), self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek() == ("op", "^"):
            self.next()
            return _Pow(node, self.integer())
        return node

    def integer(self):
        sign = 1
        if self.peek() == ("op", "-"):
            self.next()
            sign = -1
        kind, val = self.next()
        if kind != "num" or val != int(val):
            raise ValueError("exponents and root indices must be integers")
        return sign * int(val)

    def atom(self):
        kind, val = self.next()
        if kind == "num":
            return _Const(val)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if val in ("i", "I", "j"):
                return _Const(1j)
            if val == "pi":
                return _Const(math.pi)
            if val == "exp":
                self.expect("(")
                node = _Exp(self.expr())
                self.expect(")")
                return node
            if val == "sqrt":
                self.expect("(")
                node = _Root(self.expr(), 2)
                self.expect(")")
                return node
            if val == "root":
                self.expect("(")
                arg = self.expr()
                self.expect(",")
                k = self.integer()
                self.expect(")")
                return _Root(arg, k)
            if val == "z":
                self.max_var = max(self.max_var, 0)
                return _Var(0)
            m = re.fullmatch(r"z(\d+)", val)
            if m:
                idx = int(m.group(1)) - 1
                if idx < 0:
                    raise ValueError("variables are z1, z2, ...")
                self.max_var = max(self.max_var, idx)
                return _Var(idx)
            raise ValueError(f"unknown name {val!r}")
        raise ValueError(f"unexpected token {val!r}")


# ---------------------------------------------------------------------------
# implicit branches

@dataclass(frozen=True)
class _ImplicitBranch:
    coeffs: np.ndarray      # coeffs[i, j] multiplies X^i Y^j
    coeffs_dy: np.ndarray
    base_point: complex
    base_value: complex

    def p(self, x, y):
        return complex(npoly.polyval2d(x, y, self.coeffs))

    def p_y(self, x, y):
        return complex(npoly.polyval2d(x, y, self.coeffs_dy))

    def y_roots(self, x):
        cy = np.atleast_1d(npoly.polyval(x, self.coeffs))  # Y-coefficients at fixed X
        return np.roots(cy[::-1])

    def refine(self, x, y, *, require_monotone=True):
        """Newton in Y from ``y`` at abscissa ``x``."""
        prev = math.inf
        for _ in range(12):
            py = self.p_y(x, y)
            if abs(py) < _POLE_EPS:
                raise _StepReject
            delta = self.p(x, y) / py
            y -= delta
            step = abs(delta)
            if step < 1e-13 * (1.0 + abs(y)):
                return y
            if require_monotone and step > prev:
                raise _StepReject
            prev = step
        raise _StepReject


class AlgebraicFunction:
    """Evaluable right-hand side, explicit or implicit, immutable."""

    def __init__(self, *, arity, body=None, implicit=None, source=""):
        if (body is None) == (implicit is None):
            raise ValueError("exactly one of body/implicit must be given")
        self.arity = int(arity)
        self.body = body
        self.implicit = implicit
        self.source = source

    @classmethod
    def from_expression(cls, text, arity=None):
        parser = _Parser(_tokenize(text))
        body = parser.parse()
        inferred = parser.max_var + 1
        if arity is None:
            arity = max(inferred, 1)
        elif inferred > arity:
            raise ValueError(f"expression uses z{inferred} but arity={arity}")
        return cls(arity=arity, body=body, source=text)

    @classmethod
    def from_implicit(cls, coeffs, base_point, base_value):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 2:
            raise ValueError("implicit coefficients must be a 2-D grid")
        j = np.arange(coeffs.shape[1])
        coeffs_dy = (coeffs * j)[:, 1:] if coeffs.shape[1] > 1 else np.zeros((coeffs.shape[0], 1), dtype=complex)
        branch = _ImplicitBranch(coeffs, coeffs_dy, complex(base_point), complex(base_value))
        residual = abs(branch.p(branch.base_point, branch.base_value))
        scale = max(1.0, float(np.abs(coeffs).max()))
        if residual > 1e-10 * scale * max(1.0, abs(base_value)) ** (coeffs.shape[1] - 1):
            raise ValueError(f"base value does not lie on the curve (residual {residual:.3e})")
        src = f"branch of p(X,Y)=0 through ({base_point}, {base_value})"
        return cls(arity=1, body=None, implicit=branch, source=src)

    @classmethod
    def from_job_dict(cls, spec, arity=None):
        """Build from the JSON job-file form: an expression string or
        {"implicit": {"coeffs": ..., "base_point": [re, im], "base_value": [re, im]}}."""
        if isinstance(spec, str):
            return cls.from_expression(spec, arity=arity)
        if isinstance(spec, dict) and "implicit" in spec:
            imp = spec["implicit"]
            coeffs = [[_job_scalar(c) for c in row] for row in imp["coeffs"]]
            return cls.from_implicit(coeffs, _job_scalar(imp["base_point"]), _job_scalar(imp["base_value"]))
        raise ValueError(f"unrecognized function spec: {spec!r}")

    def __repr__(self):
        return f"AlgebraicFunction({self.source!r}, arity={self.arity})"

    # -- evaluation ---------------------------------------------------------

    def _coerce(self, z):
        if isinstance(z, (tuple, list, np.ndarray)):
            zs = tuple(complex(w) for w in z)
        else:
            zs = (complex(z),)
        if len(zs) != self.arity:
            raise ValueError(f"expected {self.arity} coordinates, got {len(zs)}")
        return zs

    def evaluate(self, z):
        """Value at z; implicit forms are continued from their base point
        along a straight segment, explicit roots take principal values."""
        zs = self._coerce(z)
        if self.body is not None:
            return _eval_node(self.body, zs, None)
        return self.continue_along([ (self.implicit.base_point,), zs ])

    __call__ = evaluate

    def continue_along(self, path):
        """Analytic continuation along a polyline of coordinate tuples.

        Returns the branch value at the end of the path.  Steps are
        bisected adaptively; running below the 1e-9 step floor raises
        BranchPointError.
        """
        pts = [self._coerce(p) for p in path]
        if len(pts) < 1:
            raise ValueError("empty path")
        if self.body is not None and not _has_multivalued(self.body):
            return _eval_node(self.body, pts[-1], None)
        if self.body is not None:
            return self._continue_tree(pts)
        return self._continue_implicit(pts)

    def _continue_tree(self, pts):
        state = {}
        value = _eval_node(self.body, pts[0], state)
        for a, b in zip(pts, pts[1:]):
            t, dt = 0.0, 1.0
            while t < 1.0:
                trial_t = min(1.0, t + dt)
                zs = tuple(za + (zb - za) * trial_t for za, zb in zip(a, b))
                trial_state = dict(state)
                try:
                    value = _eval_node(self.body, zs, trial_state)
                except _StepReject:
                    dt *= 0.5
                    if dt < _MIN_STEP:
                        raise BranchPointError(f"branch tracking stalled near {zs}")
                    continue
                state = trial_state
                t = trial_t
                dt = min(1.0, dt * 1.5)
        return value

    def _continue_implicit(self, pts):
        branch = self.implicit
        xs = [p[0] for p in pts]
        x, y = branch.base_point, branch.base_value
        if abs(xs[0] - x) > 1e-12:
            xs = [x] + xs
        for a, b in zip(xs, xs[1:]):
            t, dt = 0.0, 1.0
            while t < 1.0:
                trial_t = min(1.0, t + dt)
                xt = a + (b - a) * trial_t
                try:
                    y_new = branch.refine(xt, y)
                except _StepReject:
                    dt *= 0.5
                    if dt < _MIN_STEP:
                        raise BranchPointError(f"implicit continuation stalled near X={xt}")
                    continue
                y = y_new
                t = trial_t
                dt = min(1.0, dt * 1.5)
        return y


def _job_scalar(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    raise ValueError(f"scalars must be numbers or [re, im] pairs, got {v!r}")


# ---------------------------------------------------------------------------
# asymptotics and perturbation radii

@dataclass(frozen=True)
class AsymptoticData:
    """Growth data:  a |z_n|^(d-1) < |A(z)| <= b |z_n|^d  for |z_n| > M."""

    d: int
    a: float
    b: float
    direction: tuple
    validity_radius: float


def _ray_point(direction, t, phase):
    w = t * cmath.exp(1j * phase)
    return tuple(c * w for c in direction)


def estimate_asymptotics(A, direction, epsilon, rng=None, phase=0.85):
    """Fit AsymptoticData by sampling along the ray through ``direction``.

    The degree comes from a log-log slope over |z_n| in [1e2, 1e6]; the
    constants a, b are set with 10 percent slack over jittered samples in
    the polydisk section, and M is the smallest grid radius (at least
    1/epsilon) where the two-sided bound held.
    """
    direction = tuple(complex(c) for c in direction)
    if len(direction) != A.arity:
        raise ValueError("direction length must match arity")
    if abs(direction[-1] - 1.0) > 1e-12:
        raise ValueError("projective direction must be normalized with last coordinate 1")
    rng = np.random.default_rng(0) if rng is None else rng

    ts = np.geomspace(1e2, 1e6, 25)
    ray_mod = []
    for t in ts:
        try:
            v = A.evaluate(_ray_point(direction, t, phase))
        except (PoleError, BranchPointError):
            raise DegenerateDirectionError(f"evaluation failed on the ray at |z_n|={t:.3g}")
        ray_mod.append(abs(v))
    ray_mod = np.asarray(ray_mod)
    if np.all(ray_mod < 1e-280):
        raise DegenerateDirectionError("function vanishes identically along the ray")
    if not np.all(np.isfinite(ray_mod)):
        raise DegenerateDirectionError("function is unbounded along the ray")

    half = len(ts) // 2
    slope = np.polyfit(np.log(ts[half:]), np.log(np.maximum(ray_mod[half:], 1e-290)), 1)[0]
    d = int(round(slope))

    # jittered samples inside the polydisk section at each radius
    samples = [(t, m) for t, m in zip(ts, ray_mod)]
    for t in ts:
        for _ in range(3):
            zn = t * cmath.exp(1j * phase)
            pt = tuple(
                c * zn + 0.9 * epsilon * t * _unit_disc(rng) if k < A.arity - 1 else zn
                for k, c in enumerate(direction)
            )
            try:
                samples.append((t, abs(A.evaluate(pt))))
            except (PoleError, BranchPointError):
                continue
    ts_s = np.array([s[0] for s in samples])
    ms = np.array([s[1] for s in samples])
    a = 0.9 * float(np.min(ms / ts_s ** (d - 1)))
    b = 1.1 * float(np.max(ms / ts_s ** d))
    if a <= 0.0 or not math.isfinite(b):
        raise DegenerateDirectionError("could not bound the modulus along the ray")

    ok = (a * ts_s ** (d - 1) < ms) & (ms <= b * ts_s ** d)
    valid_from = ts[0]
    for t in ts:
        if bool(np.all(ok[ts_s >= t * 0.999])):
            valid_from = t
            break
    M = max(float(valid_from), 1.0001 / epsilon)
    return AsymptoticData(d=d, a=a, b=b, direction=direction, validity_radius=M)


def _unit_disc(rng):
    r = math.sqrt(rng.uniform(0.0, 1.0))
    t = rng.uniform(0.0, 2.0 * math.pi)
    return r * cmath.exp(1j * t)


def perturbation_radius(A, d, region, rng=None, samples=48, cap=1e8):
    """Smallest sampled N with  max |A(z+w)-A(z)| / |A(z)| < 1/4  (with 10%
    margin) over region points of norm in [N, 2N] and shifts of norm <= d."""
    rng = np.random.default_rng(0) if rng is None else rng
    N = 8.0
    while N <= cap:
        worst = 0.0
        pts = region.sample_tuples(rng, N, 2.0 * N, samples)
        if not pts:
            N *= 1.25
            continue
        for zs in pts:
            try:
                base = A.evaluate(zs)
            except (PoleError, BranchPointError):
                worst = math.inf
                break
            if abs(base) < 1e-300:
                worst = math.inf
                break
            for _ in range(6):
                w = _ball_shift(rng, len(zs), d)
                shifted = tuple(z + dw for z, dw in zip(zs, w))
                try:
                    moved = A.evaluate(shifted)
                except (PoleError, BranchPointError):
                    worst = math.inf
                    break
                worst = max(worst, abs(moved - base) / abs(base))
            if worst == math.inf:
                break
        if worst < 0.25 * 0.9:
            return N
        N *= 1.25
    raise NoRadiusFound(f"no radius below {cap:g} achieves the 1/4 bound")


def _ball_shift(rng, n, d):
    # uniform direction, radius biased toward the boundary where the
    # perturbation is largest
    raw = np.array([complex(rng.normal(), rng.normal()) for _ in range(n)])
    norm = float(np.sqrt(np.sum(np.abs(raw) ** 2)))
    if norm == 0.0:
        return tuple(0.0 for _ in range(n))
    r = d * rng.uniform(0.5, 1.0)
    return tuple(r * w / norm for w in raw)


def zero_pole_disc_radius(A):
    """Radius of a disc around 0 containing the zeros and poles of A
    (2x safety factor), from coefficient bounds when polynomial data is
    available and from a growth scan otherwise."""
    if A.implicit is not None:
        c = A.implicit.coeffs
        bounds = []
        # zeros of the branch lie where p(X, 0) = 0
        col0 = c[:, 0]
        bounds.append(_cauchy_bound(col0))
        # poles where the leading Y-coefficient row vanishes
        lead = c[:, c.shape[1] - 1]
        bounds.append(_cauchy_bound(lead))
        return 2.0 * max(1.0, *bounds)
    coeffs = _poly_coefficients(A)
    if coeffs is not None:
        return 2.0 * max(1.0, _cauchy_bound(np.asarray(coeffs)))
    return 2.0 * _growth_scan_radius(A)


def _cauchy_bound(coeffs):
    coeffs = np.asarray(coeffs, dtype=complex)
    nz = np.nonzero(np.abs(coeffs) > 0)[0]
    if len(nz) == 0:
        return 1.0
    lead = coeffs[nz[-1]]
    rest = coeffs[: nz[-1]]
    if len(rest) == 0:
        return 1.0
    return 1.0 + float(np.max(np.abs(rest)) / abs(lead))


def _poly_degree(node):
    if isinstance(node, _Const):
        return 0
    if isinstance(node, _Var):
        return 1
    if isinstance(node, _Bin):
        l, r = _poly_degree(node.left), _poly_degree(node.right)
        if l is None or r is None:
            return None
        if node.op in "+-":
            return max(l, r)
        if node.op == "*":
            return l + r
        return None  # division is not polynomial
    if isinstance(node, _Pow):
        b = _poly_degree(node.base)
        if b is None or node.exponent < 0:
            return None
        return b * node.exponent
    return None


def _poly_coefficients(A):
    """Dense coefficients when the single-variable body is polynomial."""
    if A.body is None or A.arity != 1:
        return None
    deg = _poly_degree(A.body)
    if deg is None:
        return None
    m = deg + 1
    xs = np.exp(2j * math.pi * np.arange(m) / m)
    vals = np.array([_eval_node(A.body, (x,), None) for x in xs])
    return np.fft.fft(vals) / m  # c_k = mean over unit roots of vals * x^{-k}


def _growth_scan_radius(A):
    phases = np.linspace(0.05, 0.5 * math.pi - 0.05, 24)
    R = 4.0
    streak = 0
    while R <= 4096.0:
        mods = []
        ok = True
        for ph in phases:
            try:
                mods.append(abs(A.evaluate(_ray_point((1.0,) * A.arity, R, ph))))
            except (PoleError, BranchPointError):
                ok = False
                break
        if ok and min(mods) > 1e-8 * max(mods) and max(mods) < 1e200:
            streak += 1
            if streak >= 3:
                return R / 4.0 * 2.0
        else:
            streak = 0
        R *= 2.0
    raise DomainError("could not locate a clean region free of zeros and poles")
