"""Parameter regions of family V and bifurcation events along parameter paths.

Family V is treated with ``(b, c, d)`` as free coordinates:
``x' = y, y' = -3/2 b x - c x^2 + d/2 y``. The two tracked points are the
origin ``P1`` and ``P2 = (-3b/(2c), 0)``, which escapes to infinity at c = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from scipy.optimize import brentq

from ._parallel import ordered_map
from .classify import (
    STABLE,
    UNSTABLE,
    ClassificationError,
    EigenData,
    Label,
    classify_v_point,
)

R_LABELS = tuple(f"R{i}" for i in range(1, 9))
E_LABELS = tuple(f"E{i}" for i in range(1, 13))
PARAMS = ("b", "c", "d")
COLLISION_DISTANCE = 1e-9
EVENT_XTOL = 1e-12
EVENT_KINDS = ("Transcritical", "SaddleFocusSaddle", "LocalStabilityChange", "CollisionAtInfinity")

# Neutral labels a point may pass through while its stability flips.
_CENTRE_LIKE = {Label.LinearCenterOrFocusOrCenter, Label.CenterOrFocus}


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------


def satisfied_r_sets(b: float, c: float, d: float) -> list[str]:
    """Every R set whose printed inequalities hold, in index order."""
    disc = d * d - 24.0 * b
    hits = []
    if disc > 0:
        hits.append("R1")
    if disc == 0:
        hits.append("R2")
    if disc < 0 and c > 0:
        hits.append("R3")
    if c == 0 and disc > 0:
        hits.append("R4")
    if c == 0 and disc == 0:
        hits.append("R5")
    if c == 0 and disc < 0:
        hits.append("R6")
    if b == 0 and d == 0 and c > 0:
        hits.append("R7")
    if c < 0:
        hits.append("R8")
    return hits


def satisfied_e_sets(b: float, c: float, d: float) -> list[str]:
    """E sets exactly as printed (E2 and E4 coincide; E3 and E7 use d^2+24b)."""
    minus = d * d - 24.0 * b
    plus = d * d + 24.0 * b
    table = {
        "E1": minus < 0 and d > 0 and c > 0,
        "E2": minus < 0 and d < 0 and c > 0,
        "E3": plus < 0 and d > 0 and c > 0,
        "E4": minus < 0 and d < 0 and c > 0,
        "E5": minus < 0 and d > 0 and c < 0,
        "E6": minus < 0 and d < 0 and c < 0,
        "E7": plus < 0 and d > 0 and c < 0,
        "E8": minus < 0 and d < 0 and c < 0,
        "E9": minus > 0 and d > 0 and c > 0,
        "E10": minus > 0 and d < 0 and c > 0,
        "E11": minus > 0 and d < 0 and c < 0,
        "E12": minus > 0 and d > 0 and c < 0,
    }
    return [k for k in E_LABELS if table[k]]


def _pick_region(hits: Sequence[str]) -> str:
    for group in (("R7",), ("R8",), ("R4", "R5", "R6"), ("R1", "R2", "R3")):
        for label in group:
            if label in hits:
                return label
    return "none"


@dataclass(frozen=True)
class ParameterRegion:
    r_label: str
    e_labels: tuple[str, ...]
    witness: tuple[float, float, float]
    boundary_distances: dict[str, float]
    satisfied: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def to_json_obj(self) -> dict:
        return {
            "r_label": self.r_label,
            "e_labels": list(self.e_labels),
            "witness": list(self.witness),
            "boundary_distances": dict(self.boundary_distances),
            "satisfied_r_sets": list(self.satisfied),
            "notes": list(self.notes),
        }


def region_of(b: float, c: float, d: float) -> ParameterRegion:
    """Region label by precedence R7, R8, then R4-R6, then R1-R3.

    Boundary distances are signed Euclidean distances to the linearized
    surfaces: ``g / |grad g|`` for ``g = d^2 - 24b`` and plain values for the
    coordinate planes.
    """
    b, c, d = float(b), float(c), float(d)
    hits = satisfied_r_sets(b, c, d)
    label = _pick_region(hits)
    disc = d * d - 24.0 * b
    distances = {
        "d2-24b": disc / math.sqrt(576.0 + 4.0 * d * d),
        "c": c,
        "b": b,
        "d": d,
    }
    notes = ()
    if len(hits) > 1:
        notes = (
            f"REGION-OVERLAP: the printed sets {', '.join(hits)} all contain this triple; "
            f"{label} chosen by precedence R7, R8, R4-R6, R1-R3",
        )
    return ParameterRegion(
        label, tuple(satisfied_e_sets(b, c, d)), (b, c, d), distances, tuple(hits), notes
    )


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointState:
    """Classification of one tracked point at one parameter value."""

    location: tuple[float, float]
    label: Label | None
    eigen: EigenData | None
    error: str | None = None

    @property
    def label_text(self) -> str:
        return self.label.value if self.label is not None else "Undecided"

    def stability(self) -> int:
        """+1 unstable, -1 stable, 0 otherwise."""
        if self.label in UNSTABLE:
            return 1
        if self.label in STABLE:
            return -1
        return 0


@dataclass(frozen=True)
class SweepRow:
    param: str
    value: float
    b: float
    c: float
    d: float
    region: ParameterRegion
    p1: PointState
    p2: PointState | None
    flag: str = ""

    @property
    def p2_x(self) -> float | None:
        return None if self.p2 is None else self.p2.location[0]

    def labels_by_x(self) -> list[str]:
        pts = [self.p1] + ([self.p2] if self.p2 is not None else [])
        return [p.label_text for p in sorted(pts, key=lambda p: p.location[0])]


@dataclass(frozen=True)
class SweepPath:
    param: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.param not in PARAMS:
            raise ValueError(f"sweep parameter must be one of {PARAMS}, got {self.param!r}")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValueError(f"a sweep needs at least 2 steps, got {self.steps}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("sweep bounds must be finite")

    def values(self) -> list[float]:
        n = int(self.steps)
        span = self.stop - self.start
        vals = [self.start + span * i / (n - 1) for i in range(n)]
        vals[-1] = float(self.stop)
        # snap tiny round-off near zero so that sign tests see the crossing row
        return [0.0 if abs(v) <= 1e-15 * max(1.0, abs(span)) else v for v in vals]


@dataclass(frozen=True)
class SweepTemplate:
    """Fixed coordinates of the sweep; ``strict_s`` ties ``d = b(s+4)``."""

    b: float = 0.0
    c: float = 0.0
    d: float = 0.0
    strict_s: int | None = None

    def at(self, param: str, value: float) -> tuple[float, float, float]:
        vals = {"b": self.b, "c": self.c, "d": self.d}
        vals[param] = float(value)
        if self.strict_s is not None:
            if param == "d":
                raise ValueError("with the family constraint d = b(s+4), sweep b or c instead of d")
            vals["d"] = vals["b"] * (self.strict_s + 4)
        return vals["b"], vals["c"], vals["d"]


def _state(b: float, c: float, d: float, point) -> PointState:
    try:
        eigen, cls = classify_v_point(b, c, d, point)
    except (ClassificationError, ValueError) as exc:
        return PointState((float(point[0]), float(point[1])), None, None, str(exc))
    return PointState((float(point[0]), float(point[1])), cls.label, eigen)


def _row(template: SweepTemplate, param: str, value: float) -> SweepRow:
    b, c, d = template.at(param, value)
    region = region_of(b, c, d)
    p1 = _state(b, c, d, (0.0, 0.0))
    flag = ""
    if c == 0.0:
        p2 = None
        flag = "CollisionAtInfinity"
    else:
        x2 = -3.0 * b / (2.0 * c) + 0.0
        if abs(x2) <= COLLISION_DISTANCE:
            p2 = PointState((x2, 0.0), p1.label, p1.eigen, p1.error)
            flag = "Collision"
        else:
            p2 = _state(b, c, d, (x2, 0.0))
    return SweepRow(param, float(value), b, c, d, region, p1, p2, flag)


def sweep(template: SweepTemplate, path: SweepPath) -> list[SweepRow]:
    """Classify both tracked points at every step; rows are ordered by the parameter."""
    values = path.values()
    if values[0] > values[-1]:
        values = values[::-1]
    return ordered_map(lambda v: _row(template, path.param, v), values)


# ---------------------------------------------------------------------------
# Events
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BifurcationEvent:
    kind: str
    parameter_value: float
    before_labels: tuple[str, ...]
    after_labels: tuple[str, ...]
    evidence: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if tuple(self.before_labels) == tuple(self.after_labels):
            raise ValueError("an event must change the tracked labels")

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "parameter_value": self.parameter_value,
            "before_labels": list(self.before_labels),
            "after_labels": list(self.after_labels),
            "evidence": self.evidence,
            "notes": list(self.notes),
        }


def _eig_trace(state: PointState | None) -> list[dict] | None:
    if state is None or state.eigen is None:
        return None
    return state.eigen.to_json_obj()


def _root(fn, lo: float, hi: float) -> float:
    """Bracketed root of ``fn`` on ``[lo, hi]``; exact zeros at an end are returned as is."""
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    return float(brentq(fn, lo, hi, xtol=EVENT_XTOL, rtol=4.0 * 2.0**-52))


def _regular_pairs(rows: Sequence[SweepRow], ok) -> list[tuple[int, int]]:
    """Consecutive indices among rows accepted by ``ok``."""
    idx = [i for i, r in enumerate(rows) if ok(r)]
    return list(zip(idx, idx[1:]))


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def _transcritical(rows, template: SweepTemplate) -> list[BifurcationEvent]:
    out = []
    param = rows[0].param
    for i, j in _regular_pairs(rows, lambda r: r.flag == "" and r.p2 is not None):
        a, z = rows[i], rows[j]
        if _sign(a.c) != _sign(z.c):
            continue
        if _sign(a.p2_x) == _sign(z.p2_x):
            continue
        before = (a.p1.label_text, a.p2.label_text)
        after = (z.p1.label_text, z.p2.label_text)
        exchanged = before[0] == after[1] and before[1] == after[0] and before[0] != before[1]
        if not exchanged:
            continue

        def p2x(value: float) -> float:
            b, c, _ = template.at(param, value)
            return -3.0 * b / (2.0 * c)

        where = _root(p2x, a.value, z.value)
        out.append(
            BifurcationEvent(
                "Transcritical",
                where,
                before,
                after,
                {
                    "bracket": [a.value, z.value],
                    "p2_x": [a.p2_x, z.p2_x],
                    "p1_eigenvalues": [_eig_trace(a.p1), _eig_trace(z.p1)],
                    "p2_eigenvalues": [_eig_trace(a.p2), _eig_trace(z.p2)],
                    "label_multiset": sorted(before),
                },
                (
                    "P1 and P2 collide where b=0; the reference proposition names the sets "
                    "R7 and R8 for this event",
                ),
            )
        )
    return out


def _c_crossings(rows, template: SweepTemplate) -> list[BifurcationEvent]:
    out = []
    param = rows[0].param
    for i, j in _regular_pairs(rows, lambda r: r.flag != "CollisionAtInfinity"):
        a, z = rows[i], rows[j]
        if _sign(a.c) == _sign(z.c):
            continue
        where = _root(lambda v: template.at(param, v)[1], a.value, z.value)
        b, _, d = template.at(param, where)
        before, after = tuple(a.labels_by_x()), tuple(z.labels_by_x())
        foci = {Label.StableFocus.value, Label.UnstableFocus.value}
        pair_ok = (
            len(before) == 2
            and sorted(before) == sorted(after)
            and Label.Saddle.value in before
            and any(lbl in foci for lbl in before)
            and before != after
        )
        evidence = {
            "bracket": [a.value, z.value],
            "discriminant_at_event": d * d - 24.0 * b,
            "p2_x": [a.p2_x, z.p2_x],
            "p1_eigenvalues": [_eig_trace(a.p1), _eig_trace(z.p1)],
            "p2_eigenvalues": [_eig_trace(a.p2), _eig_trace(z.p2)],
            "labels_ordered_by": "x",
        }
        if d * d - 24.0 * b < 0 and pair_ok:
            out.append(
                BifurcationEvent(
                    "SaddleFocusSaddle", where, before, after, evidence,
                    (
                        "the saddle escapes through infinity at c=0 and returns on the "
                        "other side of the focus; focus stability follows sign(d)",
                    ),
                )
            )
        elif before != after:
            out.append(BifurcationEvent("CollisionAtInfinity", where, before, after, evidence))
    return out


def _stability_changes(rows, template: SweepTemplate) -> list[BifurcationEvent]:
    out = []
    param = rows[0].param
    first, last = rows[0], rows[-1]
    for name in ("P1", "P2"):
        pick = (lambda r: r.p1) if name == "P1" else (lambda r: r.p2)
        prev = None
        for r in rows:
            state = pick(r)
            if state is None or r.flag:
                prev = None
                continue
            s = state.stability()
            if s == 0:
                if state.label not in _CENTRE_LIKE:
                    prev = None
                continue
            if prev is not None and pick(prev).stability() == -s:
                a, z = prev, r

                # Both tracked points have Jacobian [[0, 1], [q_x, d/2]].
                where = _root(lambda v: template.at(param, v)[2] / 2.0, a.value, z.value)
                out.append(
                    BifurcationEvent(
                        "LocalStabilityChange",
                        where,
                        (pick(a).label_text,),
                        (pick(z).label_text,),
                        {
                            "point": name,
                            "bracket": [a.value, z.value],
                            "trace": [pick(a).eigen.trace, pick(z).eigen.trace],
                            "eigenvalues": [_eig_trace(pick(a)), _eig_trace(pick(z))],
                            "path_start": {
                                "value": first.value,
                                "e_labels": list(first.region.e_labels),
                                "label": pick(first).label_text if pick(first) else None,
                            },
                            "path_end": {
                                "value": last.value,
                                "e_labels": list(last.region.e_labels),
                                "label": pick(last).label_text if pick(last) else None,
                            },
                        },
                        (
                            "E9/E10 (P1) and E11/E12 (P2) wording in the reference propositions "
                            "is reversed relative to the eigenvalues: trace d/2 > 0 is unstable",
                        ),
                    )
                )
            prev = r
    return out


def detect_events(rows: Sequence[SweepRow], template: SweepTemplate) -> list[BifurcationEvent]:
    """Events between consecutive rows, each refined to ``|dparam| <= 1e-12`` by root bracketing."""
    rows = list(rows)
    if len(rows) < 2:
        return []
    events = _transcritical(rows, template) + _c_crossings(rows, template)
    events += _stability_changes(rows, template)
    return sorted(events, key=lambda e: (e.parameter_value, EVENT_KINDS.index(e.kind)))


SWEEP_COLUMNS = (
    "param", "b", "c", "d", "region", "e_labels", "p1_label", "p2_label", "p2_x",
    "p1_lambda1_re", "p1_lambda1_im", "p1_lambda2_re", "p1_lambda2_im",
    "p2_lambda1_re", "p2_lambda1_im", "p2_lambda2_re", "p2_lambda2_im", "flag",
)


def row_record(row: SweepRow) -> list:
    """One CSV record in ``SWEEP_COLUMNS`` order (None for absent values)."""

    def lams(state):
        if state is None or state.eigen is None:
            return [None] * 4
        e = state.eigen
        return [e.lambda1.real, e.lambda1.imag, e.lambda2.real, e.lambda2.imag]

    return [
        row.value, row.b, row.c, row.d, row.region.r_label, ";".join(row.region.e_labels),
        row.p1.label_text, row.p2.label_text if row.p2 is not None else "EscapedToInfinity",
        row.p2_x, *lams(row.p1), *lams(row.p2), row.flag,
    ]


__all__ = [
    "BifurcationEvent",
    "ParameterRegion",
    "PointState",
    "SWEEP_COLUMNS",
    "SweepPath",
    "SweepRow",
    "SweepTemplate",
    "detect_events",
    "region_of",
    "row_record",
    "satisfied_e_sets",
    "satisfied_r_sets",
    "sweep",
]
