import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from quadradyn.classify import (
    CriticalLine,
    Label,
    approximate_manifold,
    classify_family,
    classify_field_point,
    classify_hyperbolic,
    classify_nonhyperbolic,
    classify_v_point,
    eigen_data,
    find_finite_critical_points,
    normalize_frame,
    transform_field,
)
from quadradyn.families import FamilySpec, build_family
from quadradyn.poly import Poly2, VectorField2


def test_critical_point_locations():
    assert find_finite_critical_points(FamilySpec("IV", a=1.0, c=1.0, p=1)) == [(0.0, 0.0), (-1.5, 0.0)]
    assert isinstance(find_finite_critical_points(FamilySpec("II", b=2.0)), CriticalLine)
    assert find_finite_critical_points(FamilySpec("V", b=1.0, c=0.0, s=0)) == [(0.0, 0.0)]


def test_family_v_hyperbolic_examples():
    eigen, cls = classify_v_point(1.0, 1.0, 6.0, (0.0, 0.0))
    roots = sorted([(6 + math.sqrt(12)) / 4, (6 - math.sqrt(12)) / 4])
    assert sorted([eigen.lambda1.real, eigen.lambda2.real]) == pytest.approx(roots, rel=1e-14)
    assert cls.label is Label.UnstableNode
    eigen, cls = classify_v_point(1.0, 1.0, 6.0, (-1.5, 0.0))
    assert eigen.det == pytest.approx(-1.5) and cls.label is Label.Saddle
    _, cls = classify_v_point(-1.0, 1.0, 1.0, (0.0, 0.0))
    assert cls.label is Label.Saddle
    _, cls = classify_v_point(1.0, 1.0, 2.0, (0.0, 0.0))
    assert cls.label in (Label.UnstableFocus, Label.StableFocus)


def test_family_iv_focus_eigenvalues():
    a = 1.0
    eigen, cls = classify_field_point(build_family(FamilySpec("IV", a=a, c=1.0, p=0)), (0.0, 0.0))
    expected = sorted([(a / 2) * (2 + 1j * math.sqrt(2)), (a / 2) * (2 - 1j * math.sqrt(2))], key=lambda z: z.imag)
    got = sorted([eigen.lambda1, eigen.lambda2], key=lambda z: z.imag)
    assert np.allclose(got, expected, atol=1e-14)
    assert cls.label is Label.UnstableFocus


def test_family_i_cusp():
    reports = classify_family(FamilySpec("I", c=1.0))
    assert [r.label for r in reports] == [Label.Cusp]
    assert reports[0].classification.parameters_at_decision["m"] == 2


def test_chart_origin_series_examples():
    c, b = 1.5, 2.0
    # family I chart U2 (regenerated sign): u' = v + c u^3, v' = c u^2 v
    cls = classify_nonhyperbolic(VectorField2(Poly2({(0, 1): 1, (3, 0): c}), Poly2({(2, 1): c})))
    data = cls.parameters_at_decision
    assert (data["m"], data["n"], data["a"], data["b"]) == (5, 2, -c * c, 4 * c)
    assert cls.label is Label.NonHypUnstableNode
    cls = classify_nonhyperbolic(VectorField2(Poly2({(0, 1): 1, (2, 0): -2 * b}), Poly2({(1, 1): -2 * b})))
    data = cls.parameters_at_decision
    assert (data["m"], data["n"], data["a"], data["b"]) == (3, 1, -4 * b * b, -6 * b)
    assert cls.label is Label.EllipticHyperbolicSector


@pytest.mark.parametrize(
    "matrix, expected",
    [
        (((2.0, 0.0), (0.0, -3.0)), Label.Saddle),
        (((1.0, 0.0), (0.0, 2.0)), Label.UnstableNode),
        (((-1.0, 0.0), (0.0, -2.0)), Label.StableNode),
        (((0.5, 1.0), (-1.0, 0.5)), Label.UnstableFocus),
        (((-0.5, 1.0), (-1.0, -0.5)), Label.StableFocus),
        (((0.0, 1.0), (-1.0, 0.0)), Label.LinearCenterOrFocusOrCenter),
    ],
)
def test_hyperbolic_table(matrix, expected):
    assert classify_hyperbolic(eigen_data(np.array(matrix))).label is expected


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_eigen_data_matches_numpy(a, b, c, d):
    m = np.array([[a, b], [c, d]])
    e = eigen_data(m)
    want = np.sort_complex(np.linalg.eigvals(m))
    got = np.sort_complex(np.array([e.lambda1, e.lambda2]))
    # a discriminant below tau0 * scale^2 is snapped to zero, which moves the
    # roots by at most sqrt(tau0) * scale
    scale = 1 + abs(a + d) + math.sqrt(abs(a * d - b * c))
    assert np.allclose(got, want, rtol=0, atol=2e-6 * scale)
    assert e.trace == pytest.approx(a + d) and e.det == pytest.approx(a * d - b * c, abs=1e-9)


def test_normal_frame_identity_cases():
    family_i = build_family(FamilySpec("I", c=1.0))
    normal, frame = normalize_frame(family_i, (0.0, 0.0))
    assert frame.is_identity and normal == family_i
    u2 = VectorField2(Poly2({(0, 1): 1, (2, 0): -4.0}), Poly2({(1, 1): -4.0}))
    _, frame = normalize_frame(u2, (0.0, 0.0))
    assert frame.is_identity


def test_normal_frame_undoes_a_known_linear_map():
    c = 1.0
    family_i = build_family(FamilySpec("I", c=c))
    # rotate: x = -Y, y = X; the rotated field has linear part [[0, 0], [-1, 0]]
    rotated = transform_field(family_i, (0.0, 0.0), ((0.0, -1.0), (1.0, 0.0)))
    normal, frame = normalize_frame(rotated, (0.0, 0.0))
    back = transform_field(rotated, frame.point, frame.matrix)
    assert back.p.allclose(normal.p) and back.q.allclose(normal.q)
    assert classify_nonhyperbolic(normal).label is Label.Cusp


def test_manifold_coefficient_against_series_matching():
    """Independent oracle: match the s^2 coefficient of the invariance equation."""
    a, c, p = 1.0, 1.0, 0
    spec = FamilySpec("IV", a=a, c=c, p=p)
    d = spec.damping
    x0 = -1.5 * a * a / c
    m = approximate_manifold(spec, (x0, 0.0))
    w = (d + math.sqrt(d * d + 24 * a * a)) / 4
    v = (d - math.sqrt(d * d + 24 * a * a)) / 4
    assert (m.w, m.v) == pytest.approx((w, v), rel=1e-15)

    s, h = sp.symbols("s h")
    W = (d + sp.sqrt(sp.Integer(int(d * d + 24 * a * a)))) / 4
    V = (d - sp.sqrt(sp.Integer(int(d * d + 24 * a * a)))) / 4
    t = h * s**2
    X = s + t
    Y = W * s + V * t
    x = sp.Rational(x0).limit_denominator() + X
    xdot = Y
    ydot = sp.Rational(d, 2) * Y - sp.Rational(3, 2) * a**2 * x - c * x**2
    # invert C = [[1, 1], [W, V]] to get (s', t')
    det = V - W
    sdot = (V * xdot - ydot) / det
    tdot = (-W * xdot + ydot) / det
    inv = sp.expand(sp.diff(t, s) * sdot - tdot)
    h_val = sp.solve(sp.Eq(inv.coeff(s, 2), 0), h)[0]
    assert float(h_val) == pytest.approx(m.stable_coeff, rel=1e-12)
    assert m.stable_coeff * (m.v - m.w) * (m.v - 2 * m.w) == pytest.approx(c, rel=1e-15)


def test_manifold_residual_is_cubic():
    spec = FamilySpec("IV", a=1.0, c=1.0, p=0)
    m = approximate_manifold(spec, (-1.5, 0.0))
    f = build_family(spec)
    r = [abs(m.residual(f, s)) for s in (1e-1, 1e-2, 1e-3)]
    assert min(math.log10(r[0] / r[1]), math.log10(r[1] / r[2])) >= 2.9


def test_manifold_guard_rejects_non_saddle():
    with pytest.raises(ValueError):
        approximate_manifold(FamilySpec("V", b=1.0, c=1.0, s=2), (0.0, 0.0))


def test_reference_notes_for_known_discrepancies():
    reports = classify_family(FamilySpec("IV", a=1.0, c=1.0, p=0))
    assert any("DISC-IV-P0" in n for n in reports[0].notes)
    reports = classify_family(FamilySpec("V", b=1.0, c=1.0, d=2.0))
    assert any("DISC-R3-FOCUS" in n for n in reports[0].notes)


@given(st.floats(0.05, 5), st.integers(0, 6), st.floats(0.1, 5), st.booleans())
@settings(max_examples=100)
def test_region_r1_positive_b_gives_node_and_saddle(b, s, c_abs, negative_c):
    c = -c_abs if negative_c else c_abs
    spec = FamilySpec("V", b=b, c=c, s=s)
    d = spec.damping
    assume(d * d - 24 * b > 1e-9)
    assert [r.label for r in classify_family(spec)] == [Label.UnstableNode, Label.Saddle]
