import math

import numpy as np
import pytest

from gamma_ec import contour as ct
from gamma_ec import gamma_core as gc
from gamma_ec import solver_1d as s1
from gamma_ec.algebraic_fn import AlgebraicFunction
from gamma_ec.errors import DomainError, NoCrossing

A_IDENTITY = AlgebraicFunction.from_expression("z")


def test_find_xi_identity():
    xi = s1.find_xi(A_IDENTITY, 16 + 16j)
    g = math.exp(gc.log_gamma(xi).real)
    assert abs(g - abs(xi) / 4.0) < 1e-9 * abs(xi)
    # Gamma dominates at the start, so the walk is vertical
    assert abs(xi.real - 16.0) < 1e-12
    assert xi.imag > 16.0


def test_find_xi_constant_crosses_horizontally():
    A = AlgebraicFunction.from_expression("5")
    start = complex(16.0, 40.0)  # high up: Gamma is tiny, A dominates
    xi = s1.find_xi(A, start)
    assert abs(xi.imag - 40.0) < 1e-12
    assert xi.real > 16.0
    assert abs(math.exp(gc.log_gamma(xi).real) - 1.25) < 1e-8


def test_find_xi_no_crossing():
    A = AlgebraicFunction.from_expression("5")
    with pytest.raises(NoCrossing):
        s1.find_xi(A, complex(16.0, 40.0), ray_cap=1.0)


def test_certify_identity():
    xi = s1.find_xi(A_IDENTITY, complex(16.0, 0.5))
    zero = s1.certify_one_zero(A_IDENTITY, xi)
    assert zero.winding == 1
    assert zero.residual < 1e-10
    assert zero.region.contains(zero.root)
    g = gc.gamma(zero.root).value
    assert abs(g - zero.root) < 1e-9 * abs(zero.root)


def test_certify_rejects_bad_xi():
    with pytest.raises(DomainError):
        s1.certify_one_zero(A_IDENTITY, 20 + 20j)  # not a quarter-crossing point


def test_certify_exp_of_reciprocal():
    A = AlgebraicFunction.from_expression("exp(1/z)")
    xi = s1.find_xi(A, complex(16.0, 0.5))
    zero = s1.certify_one_zero(A, xi)
    assert zero.winding == 1
    assert zero.residual < 1e-9


def test_certify_quadratic():
    A = AlgebraicFunction.from_expression("z^2+1")
    setup = s1.search_setup(A)
    zero = s1.certify_one_zero(A, setup.b)
    assert zero.winding == 1
    assert zero.residual < 1e-9


def test_boundary_cases_hold_on_certified_region():
    xi = s1.find_xi(A_IDENTITY, complex(16.0, 0.5))
    zero, state = s1._certify(A_IDENTITY, xi)
    a_xi = A_IDENTITY.evaluate(state.xi)
    K = zero.region
    slack = s1.SLACK
    for seg in K.segments:
        for z in seg.samples[:: 4]:
            gv = gc.gamma(z).value
            assert abs(A_IDENTITY.evaluate(z) - a_xi) < 0.25 * abs(a_xi)
            if seg.label == "S_bottom":
                assert abs(gv - a_xi) >= 0.75 * abs(a_xi) * (1 - slack)
            elif seg.label in ("T_left", "T_right"):
                assert abs(gv - a_xi) >= abs(a_xi) * (1 - slack)
            elif seg.label == "S_top":
                assert abs(gv) >= 1.25 * abs(a_xi) * (1 - slack)


def test_winding_certificate_stable_at_double_sampling():
    xi = s1.find_xi(A_IDENTITY, complex(16.0, 0.5))
    zero, _ = s1._certify(A_IDENTITY, xi)
    f = lambda z: gc.gamma(z).value - z
    again = ct.winding_number(f, zero.region.densify(2))
    assert again.winding == zero.winding == 1


def test_enumerate_counts_and_bound():
    counts, setup, zeros = s1.count_zeros_by_radius(A_IDENTITY, [20, 30, 40], 1.0)
    assert counts[20.0] <= counts[30.0] <= counts[40.0]
    for R in (20.0, 30.0, 40.0):
        assert counts[R] >= 2.0 * R / 3.0 - setup.c
    assert counts[40.0] >= 2  # the first crossing and its mirror land inside
    roots = [z.root for z in zeros]
    for i, a in enumerate(roots):
        for b in roots[:i]:
            assert abs(a - b) > 1e-6


def test_enumerate_residuals_and_disjoint_regions():
    zeros = s1.enumerate_zeros(A_IDENTITY, 45.0, 1.0)
    assert len(zeros) >= 4
    for z in zeros:
        assert z.residual < 1e-9
    upper = [z for z in zeros if z.root.imag > 0]
    for i, a in enumerate(upper):
        for b in upper[:i]:
            assert not a.region.contains(b.root)
            assert not b.region.contains(a.root)


def test_enumerate_mirrors_only_conjugation_symmetric_functions():
    assert s1.conjugation_commutes(A_IDENTITY)
    skew = AlgebraicFunction.from_expression("z + i")
    assert not s1.conjugation_commutes(skew)
    zeros = s1.enumerate_zeros(skew, 42.0, 1.0)
    assert zeros
    assert all(z.root.imag > 0 for z in zeros)


def test_successor_spacing_far_out():
    # the crossing ladder advances by less than 1 + 2*eps once the modulus
    # arcs are short, which needs log x >= 2*pi/eps (eps = 1)
    x0 = math.exp(2 * math.pi) + 2.0
    xi = s1.find_xi(A_IDENTITY, complex(x0, 0.5))
    _, state = s1._certify(A_IDENTITY, xi)
    for _ in range(2):
        nxt = s1._successor_xi(A_IDENTITY, state)
        assert abs(nxt - state.xi) < 3.0
        assert abs(nxt) > abs(state.xi)
        _, state = s1._certify(A_IDENTITY, nxt)


def test_solve_plane_curve_identity_line():
    out = s1.solve_plane_curve([[0, -1], [1, 0]], r_ball=44.0)  # X - Y
    assert out
    for z in out:
        assert abs(gc.gamma(z.root).value - z.root) < 1e-8 * abs(z.root)


def test_solve_plane_curve_square_root():
    out = s1.solve_plane_curve([[0, 0, 1], [-1, 0, 0]], r_ball=50.0)  # Y^2 - X
    assert len(out) >= 4
    for z in out:
        g = gc.gamma(z.root).value
        assert abs(g * g - z.root) < 1e-8 * abs(z.root)


def test_solve_plane_curve_rejects_pure_Y():
    with pytest.raises(DomainError):
        s1.solve_plane_curve([[0, 1]])
    with pytest.raises(DomainError):
        s1.solve_plane_curve([[1], [2], [1]])  # independent of Y
