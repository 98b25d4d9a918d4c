import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadradyn.classify import Label
from quadradyn.compactify import (
    antipodal_label,
    chart_notes,
    chart_to_disk,
    infinite_singular_points,
    pushforward,
    to_chart,
    to_disk,
)
from quadradyn.families import FamilySpec, build_family
from quadradyn.poly import Poly2, poly_eval
from quadradyn.verify import CHART_DEVIATIONS, printed_chart_systems

SPECS = [
    FamilySpec("I", c=1.0),
    FamilySpec("I", c=-2.5),
    FamilySpec("II", b=1.5),
    FamilySpec("III", a=-2.0),
    FamilySpec("IV", a=1.0, c=-1.0, p=1),
    FamilySpec("V", b=-1.0, c=2.0, s=3),
]


def test_family_i_chart_examples():
    c = 1.0
    f = build_family(FamilySpec("I", c=c))
    u1 = to_chart(f, "U1").field
    assert u1.p == Poly2({(2, 1): -1.0, (0, 0): -c}) and u1.q == Poly2({(1, 2): -1.0})
    u2 = to_chart(f, "U2").field
    assert u2.p == Poly2({(0, 1): 1.0, (3, 0): c}) and u2.q == Poly2({(2, 1): c})


def test_family_v_u2_matches_printed_system():
    spec = FamilySpec("V", b=1.5, c=-1.0, s=2)
    b, c, d = spec.b, spec.c, spec.damping
    u2 = to_chart(build_family(spec), "U2").field
    assert u2.p.allclose(Poly2({(0, 1): 1, (1, 1): -d / 2, (2, 1): 1.5 * b, (3, 0): c}))
    assert u2.q.allclose(Poly2({(0, 2): -d / 2, (1, 2): 1.5 * b, (2, 1): c}))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.tag)
def test_printed_fixtures_up_to_documented_deviations(spec):
    printed = printed_chart_systems(spec)
    for chart in ("U1", "U2"):
        got = to_chart(build_family(spec), chart).field
        same = got.p.allclose(printed[chart][0]) and got.q.allclose(printed[chart][1])
        tag = CHART_DEVIATIONS.get((spec.tag, chart))
        assert same == (tag is None)
        if tag:
            assert any(tag in n for n in chart_notes(spec, chart))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.tag)
@given(u=st.floats(-3, 3), v=st.floats(0.05, 2).flatmap(lambda m: st.sampled_from([m, -m])))
@settings(max_examples=40)
def test_chart_field_is_rescaled_pushforward(spec, u, v):
    field = build_family(spec)
    for chart in ("U1", "U2"):
        system = to_chart(field, chart)
        true = pushforward(field, chart, u, v)
        got = (poly_eval(system.field.p, u, v), poly_eval(system.field.q, u, v))
        k = system.time_rescaling_exponent
        scale = 1.0 + math.hypot(*got)
        assert got[0] == pytest.approx(v**k * true[0], abs=1e-9 * scale)
        assert got[1] == pytest.approx(v**k * true[1], abs=1e-9 * scale)


def test_u2_map_is_an_involution_up_to_time_rescaling():
    f = build_family(FamilySpec("I", c=2.0))
    twice = to_chart(to_chart(f, "U2").field, "U2").field
    y = Poly2.y()
    assert twice.p == y * f.p and twice.q == y * f.q


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.tag)
def test_only_the_u2_origin_is_singular(spec):
    points = infinite_singular_points(spec)
    assert [(r.chart, r.location) for r in points] == [("U2", (0.0, 0.0))]
    system = to_chart(build_family(spec), "U2").field
    assert abs(system.p(0.0, 0.0)) <= 1e-10 and abs(system.q(0.0, 0.0)) <= 1e-10


@pytest.mark.parametrize(
    "spec, label",
    [
        (FamilySpec("I", c=1.0), Label.NonHypUnstableNode),
        (FamilySpec("III", a=2.0), Label.EllipticHyperbolicSector),
        (FamilySpec("IV", a=1.0, c=-1.0, p=1), Label.NonHypStableNode),
    ],
)
def test_infinite_point_labels(spec, label):
    (report,) = infinite_singular_points(spec)
    assert report.label is label


def test_antipode_swaps_stability_for_even_degree():
    assert antipodal_label(Label.NonHypStableNode, 2) is Label.NonHypUnstableNode
    assert antipodal_label(Label.Saddle, 2) is Label.Saddle
    assert antipodal_label(Label.StableNode, 3) is Label.StableNode


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_disk_projection_stays_inside(x, y):
    px, py = to_disk(x, y)
    assert px * px + py * py < 1.0


def test_chart_to_disk_agrees_with_finite_projection():
    x, y = 3.0, -2.0
    assert chart_to_disk("U1", y / x, 1 / x) == pytest.approx(to_disk(x, y))
    assert chart_to_disk("U2", x / y, 1 / y) == pytest.approx(to_disk(x, y))
    assert math.hypot(*chart_to_disk("U1", 0.5, 0.0)) == pytest.approx(1.0)
