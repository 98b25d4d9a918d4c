from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadradyn.bifurcate import (
    BifurcationEvent,
    SweepPath,
    SweepTemplate,
    detect_events,
    region_of,
    row_record,
    satisfied_r_sets,
    sweep,
)


def test_region_examples():
    assert region_of(1, 1, 10).r_label == "R1"
    r = region_of(1, 1, 2)
    assert r.r_label == "R3" and "E1" in r.e_labels
    assert region_of(0, 2, 0).r_label == "R7"


def test_region_precedence_and_overlap_note():
    r = region_of(1.0, -1.0, 10.0)
    assert r.r_label == "R8" and set(r.satisfied) >= {"R1", "R8"}
    assert any("REGION-OVERLAP" in n for n in r.notes)
    assert region_of(1.0, 0.0, 10.0).r_label == "R4"


def test_region_partition_on_random_triples():
    rng = np.random.default_rng(20261016)
    triples = rng.uniform(-5, 5, size=(10_000, 3))
    # include exact boundary cases
    triples[:50, 1] = 0.0
    triples[50:100, 2] = np.sqrt(24 * np.abs(triples[50:100, 0]))
    triples[50:100, 0] = np.abs(triples[50:100, 0])
    labels = Counter()
    for b, c, d in triples:
        r = region_of(float(b), float(c), float(d))
        assert r.r_label in {f"R{i}" for i in range(1, 9)}
        assert r.r_label in satisfied_r_sets(float(b), float(c), float(d))
        labels[r.r_label] += 1
    assert labels["R1"] and labels["R8"] and labels["R4"]


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_membership_recomputable_from_witness(b, c, d):
    r = region_of(b, c, d)
    assert r.witness == (b, c, d)
    assert region_of(*r.witness) == r
    dist = r.boundary_distances["d2-24b"]
    assert np.sign(dist) == np.sign(d * d - 24 * b)
    assert (r.boundary_distances["b"], r.boundary_distances["c"]) == (b, c)


def test_sweep_needs_two_steps():
    with pytest.raises(ValueError):
        SweepPath("b", -1.0, 1.0, 1)


def test_strict_family_forbids_sweeping_d():
    with pytest.raises(ValueError):
        SweepTemplate(b=1.0, c=1.0, strict_s=0).at("d", 1.0)
    assert SweepTemplate(c=1.0, strict_s=2).at("b", 0.5) == (0.5, 1.0, 3.0)


def test_eleven_step_b_sweep_rows():
    rows = sweep(SweepTemplate(c=1.0, d=1.0), SweepPath("b", -0.5, 0.5, 11))
    assert [r.value for r in rows] == sorted(r.value for r in rows)
    for r in rows:
        if r.value < 0:
            assert r.p1.label_text == "Saddle"
        elif r.value > 0:
            assert r.p1.label_text in ("UnstableNode", "UnstableFocus")
    (collision,) = [r for r in rows if r.flag]
    assert collision.value == 0.0 and collision.flag == "Collision"


def test_c_sweep_marks_escape_to_infinity():
    rows = sweep(SweepTemplate(b=1.0, d=2.0), SweepPath("c", -1.0, 1.0, 41))
    (row,) = [r for r in rows if r.c == 0.0]
    assert row.flag == "CollisionAtInfinity" and row.p2 is None
    assert row_record(row)[7] == "EscapedToInfinity"
    near = [abs(r.p2_x) for r in rows if r.p2 is not None and abs(r.c) <= 0.1]
    assert max(near) >= 15.0  # -3b/(2c) diverges as c -> 0


def test_transcritical_event_and_exchange():
    template = SweepTemplate(c=1.0, d=1.0)
    (event,) = detect_events(sweep(template, SweepPath("b", -0.5, 0.5, 41)), template)
    assert event.kind == "Transcritical" and abs(event.parameter_value) <= 1e-8
    assert Counter(event.before_labels) == Counter(event.after_labels)
    assert tuple(event.before_labels) == tuple(reversed(event.after_labels))


@pytest.mark.parametrize("param, template", [
    ("b", SweepTemplate(c=1.0, d=1.0)),
    ("c", SweepTemplate(b=1.0, d=2.0)),
    ("d", SweepTemplate(b=1.0, c=1.0)),
])
def test_event_location_independent_of_step(param, template):
    # an off-grid path: zero is never a sample
    lo, hi = (-6.013, 5.987) if param == "d" else (-0.5037, 0.4963)
    found = []
    for step in (1e-2, 1e-3):
        n = int(round((hi - lo) / step)) + 1
        (event,) = detect_events(sweep(template, SweepPath(param, lo, hi, n)), template)
        found.append(event.parameter_value)
    assert abs(found[0] - found[1]) <= 1e-8 and abs(found[0]) <= 1e-8


def test_saddle_focus_saddle_event():
    template = SweepTemplate(b=1.0, d=2.0)
    (event,) = detect_events(sweep(template, SweepPath("c", -1.0, 1.0, 41)), template)
    assert event.kind == "SaddleFocusSaddle" and abs(event.parameter_value) <= 1e-8
    assert set(event.before_labels) == set(event.after_labels) == {"Saddle", "UnstableFocus"}


def test_d_segments_carry_e9_and_e10():
    template = SweepTemplate(b=1.0, c=1.0)
    low = sweep(template, SweepPath("d", -6.0, -5.0, 5))
    high = sweep(template, SweepPath("d", 5.0, 6.0, 5))
    assert all(r.region.e_labels == ("E10",) for r in low)
    assert all(r.region.e_labels == ("E9",) for r in high)
    assert not [e for e in detect_events(low, template) if e.kind == "LocalStabilityChange"]
    (event,) = detect_events(sweep(template, SweepPath("d", -6.0, 6.0, 41)), template)
    assert event.kind == "LocalStabilityChange" and abs(event.parameter_value) <= 1e-8
    assert event.evidence["path_start"]["e_labels"] == ["E10"]
    assert event.evidence["path_end"]["e_labels"] == ["E9"]


def test_event_must_change_labels():
    with pytest.raises(ValueError):
        BifurcationEvent("Transcritical", 0.0, ("Saddle",), ("Saddle",))
