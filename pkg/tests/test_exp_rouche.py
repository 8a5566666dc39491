import cmath
import math

import numpy as np
import pytest

from gamma_ec import contour as ct
from gamma_ec import exp_rouche as er
from gamma_ec.algebraic_fn import AlgebraicFunction

TWO_PI = 2.0 * math.pi

A_IDENTITY = AlgebraicFunction.from_expression("z")


def newton_oracle(seed_box, f=lambda z: cmath.exp(z) - z, df=lambda z: cmath.exp(z) - 1.0,
                  grid=30):
    """Independent root finder: coarse grid scan of |f| over a box, then
    plain Newton."""
    (x0, x1, y0, y1) = seed_box
    best = None
    for i in range(grid):
        for j in range(grid):
            z = complex(x0 + (x1 - x0) * i / (grid - 1), y0 + (y1 - y0) * j / (grid - 1))
            v = abs(f(z))
            if best is None or v < best[0]:
                best = (v, z)
    z = best[1]
    for _ in range(80):
        step = f(z) / df(z)
        z -= step
        if abs(step) < 1e-15 * (1.0 + abs(z)):
            break
    return z


@pytest.fixture(scope="module")
def identity_ladder():
    return er.solve_exp_equation(A_IDENTITY, 5)


def test_first_root_of_exp_equals_z_matches_known_seed_box():
    # the equation's first root, from the independent oracle alone
    root = newton_oracle((0.0, 1.0, 1.0, 2.0))
    assert abs(root - complex(0.3181315052047641, 1.3372357014306895)) < 1e-12


def test_ladder_count_and_residuals(identity_ladder):
    zeros = identity_ladder
    assert len(zeros) == 5
    for z in zeros:
        assert z.winding == 1
        assert z.residual < 1e-10
        assert abs(cmath.exp(z.root) - z.root) < 1e-9 * abs(z.root)


def test_ladder_smallest_matches_local_oracle(identity_ladder):
    smallest = min(identity_ladder, key=lambda z: abs(z.root))
    oracle = newton_oracle(smallest.region.bbox())
    assert abs(oracle - smallest.root) < 1e-9 * (1.0 + abs(oracle))


def test_rectangles_exact_dimensions_and_disjoint(identity_ladder):
    spans = []
    for z in identity_ladder:
        x0, x1, y0, y1 = z.region.bbox()
        assert abs((x1 - x0) - 2.0) < 1e-12
        assert abs((y1 - y0) - TWO_PI) < 1e-12
        spans.append((y0, y1))
    spans.sort()
    for (a0, a1), (b0, b1) in zip(spans, spans[1:]):
        assert b0 >= a1 - 1e-9  # vertically stacked, no overlap


def test_each_rectangle_contains_one_zero_of_constant_target(identity_ladder):
    for z in identity_ladder:
        target = A_IDENTITY.evaluate(z.root)
        w = ct.winding_number(lambda u: cmath.exp(u) - target, z.region)
        assert w.winding == 1


def test_perturbation_budget_constant():
    assert er.PERTURBATION_BUDGET < 13.0
    assert er.PERTURBATION_BUDGET == math.sqrt(16.0 * math.pi**2 + 4.0)


def test_right_edge_inequality(identity_ladder):
    # |exp| on the right edge is e^2 times the left-edge modulus, which
    # exceeds 4 |exp(xi)| = |A(xi)|
    for z in identity_ladder:
        x0, x1, _, _ = z.region.bbox()
        right = z.region.segment("rect_right").samples
        for u in right[:: 16]:
            assert abs(cmath.exp(u)) > 4.0 * math.exp(x0) * (1.0 - 1e-12)
            assert abs(abs(cmath.exp(u)) - math.exp(x0 + 2.0)) < 1e-9 * math.exp(x0 + 2.0)


def test_quadratic_target():
    A = AlgebraicFunction.from_expression("z^2")
    zeros = er.solve_exp_equation(A, 2)
    assert len(zeros) == 2
    for z in zeros:
        assert z.residual < 1e-10
        assert abs(cmath.exp(z.root) - z.root**2) < 1e-9 * abs(z.root) ** 2


def test_count_validation():
    with pytest.raises(ValueError):
        er.solve_exp_equation(A_IDENTITY, 0)
