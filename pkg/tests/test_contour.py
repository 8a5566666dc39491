import cmath
import math

import numpy as np
import pytest

from gamma_ec import contour as ct
from gamma_ec import gamma_core as gc
from gamma_ec import level_curves as lc
from gamma_ec.errors import DomainError, GeometryError, ZeroOnContour

TWO_PI = 2.0 * math.pi


def unit_square(n=9, center=0.0):
    c = complex(center)
    return ct.Contour(
        [
            ("b", np.linspace(c - 0.5 - 0.5j, c + 0.5 - 0.5j, n)),
            ("r", np.linspace(c + 0.5 - 0.5j, c + 0.5 + 0.5j, n)),
            ("t", np.linspace(c + 0.5 + 0.5j, c - 0.5 + 0.5j, n)),
            ("l", np.linspace(c - 0.5 + 0.5j, c - 0.5 - 0.5j, n)),
        ]
    )


def make_K(xi=16 + 35.5j, offset=1.0):
    beta = lc.point_on_modulus_arc(xi, gc.log_gamma(xi).imag + offset)
    R = math.exp(gc.log_gamma(xi + 1).real)
    return beta, R, ct.build_K(beta, R)


def test_winding_basics():
    sq = unit_square()
    assert ct.winding_number(lambda z: z, sq).winding == 1
    assert ct.winding_number(lambda z: z * z, sq).winding == 2
    assert ct.winding_number(lambda z: z - 10.0, sq).winding == 0
    assert ct.winding_number(cmath.exp, sq).winding == 0


def test_winding_stable_under_refinement():
    sq = unit_square(n=4)
    for f, expect in ((lambda z: z**3, 3), (lambda z: z - 10, 0)):
        w1 = ct.winding_number(f, sq)
        w2 = ct.winding_number(f, sq.densify(2))
        assert w1.winding == w2.winding == expect


def test_zero_on_contour_detected():
    sq = unit_square()
    with pytest.raises(ZeroOnContour):
        ct.winding_number(lambda z: z - 0.5, sq)  # zero sits on the right edge


def test_min_image_modulus_positive():
    w = ct.winding_number(lambda z: z, unit_square())
    assert w.min_image_modulus > 0.0


def test_contour_requires_closure():
    with pytest.raises(GeometryError):
        ct.Contour([("a", np.linspace(0, 1, 5)), ("b", np.linspace(1, 2j, 5))])


def test_contour_rejects_self_intersection():
    with pytest.raises(GeometryError):
        ct.Contour(
            [
                ("a", np.linspace(0j, 1 + 1j, 5)),
                ("b", np.linspace(1 + 1j, 1 + 0j, 5)),
                ("c", np.linspace(1 + 0j, 0 + 1j, 5)),
                ("d", np.linspace(0 + 1j, 0j, 5)),
            ]
        )


def test_contour_rejects_clockwise():
    with pytest.raises(GeometryError):
        ct.Contour(
            [
                ("t", np.linspace(0.5 + 0.5j, -0.5 + 0.5j, 5)[::-1]),
                ("r", np.linspace(0.5 - 0.5j, 0.5 + 0.5j, 5)[::-1]),
                ("b", np.linspace(-0.5 - 0.5j, 0.5 - 0.5j, 5)[::-1]),
                ("l", np.linspace(-0.5 + 0.5j, -0.5 - 0.5j, 5)[::-1]),
            ]
        )


def test_rho_defining_properties():
    beta = lc.point_on_modulus_arc(16 + 35.5j, gc.log_gamma(16 + 35.5j).imag + 1.0)
    lgb = gc.log_gamma(beta)
    R = 20.0 * math.exp(lgb.real)
    p = ct.rho(beta, R)
    assert abs(gc.log_gamma(p).imag - lgb.imag) < 1e-8
    assert abs(gc.log_gamma(p).real - math.log(R)) < 1e-8
    # near-degenerate target stays near beta
    p2 = ct.rho(beta, math.exp(lgb.real) * (1.0 + 1e-9))
    assert abs(p2 - beta) < 1e-6
    with pytest.raises(DomainError):
        ct.rho(beta, math.exp(lgb.real))


def test_build_K_geometry():
    beta, R, K = make_K()
    labels = [s.label for s in K.segments]
    assert labels == ["S_bottom", "T_left", "S_top", "T_right"]
    assert K.signed_area() > 0.0
    assert K.orientation == "positive"
    # inner arc at |Gamma(beta)|, outer at R
    r = math.exp(gc.log_gamma(beta).real)
    for z in K.segment("S_bottom").samples[:: 8]:
        assert abs(math.exp(gc.log_gamma(z).real) - r) < 1e-8 * r
    for z in K.segment("S_top").samples[:: 8]:
        assert abs(math.exp(gc.log_gamma(z).real) - R) < 1e-8 * R


def test_build_K_outer_arc_spans_full_turn():
    _, _, K = make_K()
    arc = K.segment("S_top").samples
    span = gc.log_gamma(arc[-1]).imag - gc.log_gamma(arc[0]).imag
    assert abs(span - TWO_PI) < 1e-8


def test_build_K_diameter():
    # the observed spans: each modulus arc is ~2*pi/log|beta| long and the
    # argument arcs add about log|xi|/log|beta|
    beta, R, K = make_K()
    limit = 2.0 * TWO_PI / math.log(abs(beta)) + 1.5
    assert K.diameter() < limit


def test_region_modulus_coverage():
    beta, R, K = make_K()
    r = math.exp(gc.log_gamma(beta).real)
    mods = [math.exp(gc.log_gamma(z).real) for z in K.interior_points(400)]
    hist, _ = np.histogram(np.log(mods), bins=10, range=(math.log(r), math.log(R)))
    assert np.all(hist > 0)
    assert min(mods) < 1.2 * r and max(mods) > 0.8 * R


def test_winding_of_gamma_minus_identity_on_K():
    _, _, K = make_K()
    f = lambda z: gc.gamma(z).value - z
    w = ct.winding_number(f, K)
    assert w.winding == 1
    assert ct.winding_number(f, K.densify(2)).winding == 1


def test_conjugate_contour_stays_positive():
    _, _, K = make_K()
    Kc = K.conjugate()
    assert Kc.signed_area() > 0.0
    assert Kc.contains(K.centroid().conjugate())


def test_contains_and_centroid():
    _, _, K = make_K()
    assert K.contains(K.centroid())
    assert not K.contains(0.0)


def test_contour_json_roundtrip():
    _, _, K = make_K()
    d = K.to_json_dict()
    assert d["orientation"] == "positive"
    assert [s["label"] for s in d["segments"]] == ["S_bottom", "T_left", "S_top", "T_right"]
    flat = [tuple(p) for s in d["segments"] for p in s["samples"]]
    assert len(flat) == sum(len(s.samples) for s in K.segments)


def test_rectangle_exact_geometry():
    beta = 1.25 + 2.5j
    rect = ct.build_rectangle(beta)
    pts = rect.points()
    assert pts[0] == beta
    xmin, xmax, ymin, ymax = rect.bbox()
    assert abs((xmax - xmin) - 2.0) < 1e-15
    assert abs((ymax - ymin) - TWO_PI) < 1e-12
    corners = {beta, beta + 2, beta + 2 + TWO_PI * 1j, beta + TWO_PI * 1j}
    sampled = set(pts)
    assert corners <= sampled
    # exp maps vertical edges onto circles
    for label, radius in (("rect_left", math.exp(beta.real)), ("rect_right", math.exp(beta.real + 2.0))):
        mods = [abs(cmath.exp(z)) for z in rect.segment(label).samples]
        assert max(abs(m - radius) for m in mods) < 1e-12 * radius
