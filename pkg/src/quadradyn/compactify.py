"""Poincaré compactification charts and singular points at infinity.

Chart U1 uses ``x = 1/v, y = u/v``; chart U2 uses ``x = u/v, y = 1/v``; U3 is
the finite plane. With ``n`` the degree of the field, the chart systems are

    U1:  u' = v^n [-u P + Q],  v' = -v^(n+1) P     (P, Q at (1/v, u/v))
    U2:  u' = v^n [P - u Q],   v' = -v^(n+1) Q     (P, Q at (u/v, 1/v))

which equals ``v^(n-1)`` times the true pushforward of the flow. For even
``n`` the orientation is therefore reversed where ``v < 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classify import (
    STABLE,
    UNSTABLE,
    Classification,
    ClassificationError,
    EigenData,
    Label,
    classify_field_point,
)
from .families import FamilySpec, build_family
from .poly import DEFAULT_ORDER, ZERO_THRESHOLD, Poly2, VectorField2

CHARTS = ("U1", "U2", "U3")


@dataclass(frozen=True)
class ChartSystem:
    chart: str
    field: VectorField2
    source_degree: int

    @property
    def time_rescaling_exponent(self) -> int:
        """Chart field = ``v**k`` times the pushforward of the finite flow."""
        return self.source_degree - 1 if self.chart != "U3" else 0

    def orientation(self, v: float) -> int:
        """+1 where the chart field follows the flow direction, -1 where reversed."""
        k = self.time_rescaling_exponent
        return -1 if (v < 0 and k % 2 == 1) else 1


def to_chart(field: VectorField2, chart: str) -> ChartSystem:
    """Exact chart rewrite of a polynomial field (negative powers cancel)."""
    n = field.degree
    if chart == "U3":
        return ChartSystem("U3", field, n)
    du: dict[tuple[int, int], float] = {}
    dv: dict[tuple[int, int], float] = {}

    def put(target, i, j, c):
        if j < 0:
            raise ArithmeticError(f"negative power of v survived in chart {chart}")
        target[(i, j)] = target.get((i, j), 0.0) + c

    if chart == "U1":
        # x^i y^j -> u^j v^-(i+j)
        for (i, j), c in field.p.terms.items():
            put(du, j + 1, n - i - j, -c)
            put(dv, j, n + 1 - i - j, -c)
        for (i, j), c in field.q.terms.items():
            put(du, j, n - i - j, c)
    elif chart == "U2":
        # x^i y^j -> u^i v^-(i+j)
        for (i, j), c in field.p.terms.items():
            put(du, i, n - i - j, c)
        for (i, j), c in field.q.terms.items():
            put(du, i + 1, n - i - j, -c)
            put(dv, i, n + 1 - i - j, -c)
    else:
        raise ValueError(f"unknown chart {chart!r}")
    return ChartSystem(chart, VectorField2(Poly2(du), Poly2(dv)), n)


def pushforward(field: VectorField2, chart: str, u: float, v: float) -> tuple[float, float]:
    """True time derivative of the chart coordinates along the finite flow."""
    if chart == "U1":
        x, y = 1.0 / v, u / v
        p, q = field(x, y)
        return v * (q - u * p), -v * v * p
    if chart == "U2":
        x, y = u / v, 1.0 / v
        p, q = field(x, y)
        return v * (p - u * q), -v * v * q
    if chart == "U3":
        return field(u, v)
    raise ValueError(f"unknown chart {chart!r}")


def common_u_power(field: VectorField2) -> int:
    """Largest k with u^k dividing both chart components."""
    exps = [i for poly in (field.p, field.q) for (i, _) in poly.terms]
    return min(exps) if exps else 0


def reduce_common_u(field: VectorField2) -> tuple[VectorField2, int]:
    k = common_u_power(field)
    if k == 0:
        return field, 0
    shift = lambda poly: Poly2({(i - k, j): c for (i, j), c in poly.terms.items()})  # noqa: E731
    return VectorField2(shift(field.p), shift(field.q)), k


def equator_polynomial(field: VectorField2) -> np.ndarray:
    """Coefficients (lowest degree first) of ``u'(u, 0)``."""
    terms = {i: c for (i, j), c in field.p.terms.items() if j == 0}
    if not terms:
        return np.zeros(1)
    out = np.zeros(max(terms) + 1)
    for i, c in terms.items():
        out[i] = c
    return out


def real_roots(coeffs: np.ndarray, tol: float = 1e-9) -> list[float]:
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size <= 1:
        return []
    roots = np.polynomial.polynomial.polyroots(c)
    scale = 1.0 + float(np.max(np.abs(roots))) if roots.size else 1.0
    found = sorted(float(r.real) for r in roots if abs(r.imag) <= tol * scale)
    out: list[float] = []
    for r in found:
        r = 0.0 if abs(r) <= tol else r
        if not out or abs(r - out[-1]) > tol * scale:
            out.append(r)
    return out


@dataclass(frozen=True)
class InfinitePointReport:
    chart: str
    location: tuple[float, float]
    classification: Classification
    eigen: EigenData | None
    corresponds_to_direction: float
    removed_u_power: int = 0
    notes: tuple[str, ...] = ()
    source_degree: int = 2

    @property
    def label(self):
        return self.classification.label

    @property
    def antipode_label(self) -> Label:
        return antipodal_label(self.label, self.source_degree)

    @property
    def antipode_direction(self) -> float:
        return math.remainder(self.corresponds_to_direction + math.pi, 2.0 * math.pi)

    def to_json_obj(self) -> dict:
        return {
            "chart": self.chart,
            "location": list(self.location),
            "label": self.classification.label.value,
            "trace": self.classification.trace_text,
            "eigenvalues": self.eigen.to_json_obj() if self.eigen else None,
            "series_data": (
                dict(self.classification.parameters_at_decision)
                if self.classification.parameters_at_decision
                else None
            ),
            "direction": self.corresponds_to_direction,
            "antipode_direction": self.antipode_direction,
            "antipode_label": self.antipode_label.value,
            "removed_common_factor_u_power": self.removed_u_power,
            "notes": list(self.notes),
        }


_SWAP = {
    Label.StableNode: Label.UnstableNode,
    Label.StableFocus: Label.UnstableFocus,
    Label.NonHypStableNode: Label.NonHypUnstableNode,
}
_SWAP.update({v: k for k, v in _SWAP.items()})


def antipodal_label(label: Label, degree: int) -> Label:
    """Label seen at the antipodal equator point.

    The antipodal chart carries the factor ``(-1)^(degree-1)``, which reverses
    time for even degree and so exchanges stable and unstable.
    """
    if (degree - 1) % 2 == 1 and (label in STABLE or label in UNSTABLE):
        return _SWAP[label]
    return label


def chart_direction(chart: str, u: float) -> float:
    if chart == "U1":
        return math.atan2(u, 1.0)
    if chart == "U2":
        return math.atan2(1.0, u)
    raise ValueError(chart)


def chart_notes(spec: FamilySpec, chart: str) -> tuple[str, ...]:
    """Deviations between the regenerated chart systems and the reference listing."""
    if spec.tag == "I" and chart == "U2":
        return (
            "CHART-U2-I-SIGN: regenerated v' = +c u^2 v; the reference listing prints "
            "-c u^2 v, which contradicts its own series data F = -c^2 u^5, G = 4c u^2",
        )
    if spec.tag in ("II", "III") and chart == "U1":
        k = "b" if spec.tag == "II" else "a"
        return (
            f"CHART-U1-{spec.tag}-FACTOR: regenerated u' = -u^2 v + 2{k} u; the reference "
            f"listing prints the constant 2{k}. The factor u is the image of the finite "
            "critical line y=0, whose endpoints sit at the U1 origin; equator points are "
            "computed after removing the common factor u",
        )
    return ()


def infinite_singular_points_of_field(
    field: VectorField2, order: int = DEFAULT_ORDER, tol: float = ZERO_THRESHOLD,
    extra_notes: dict[str, tuple[str, ...]] | None = None,
) -> list[InfinitePointReport]:
    """Equator singularities: all of U1 at v=0, plus the U2 origin."""
    out: list[InfinitePointReport] = []
    for chart in ("U1", "U2"):
        system = to_chart(field, chart)
        reduced, k = reduce_common_u(system.field)
        notes = tuple((extra_notes or {}).get(chart, ()))
        if k:
            notes += (
                f"common factor u^{k} removed before locating equator points "
                "(non-isolated singular set u=0 in this chart)",
            )
        eq = equator_polynomial(reduced)
        if not np.any(eq):
            raise ClassificationError(f"equator is entirely singular in chart {chart}")
        candidates = real_roots(eq) if chart == "U1" else ([0.0] if abs(eq[0]) <= tol else [])
        for u in candidates:
            eigen, cls = classify_field_point(reduced, (u, 0.0), order, tol)
            out.append(
                InfinitePointReport(
                    chart, (u, 0.0), cls, eigen, chart_direction(chart, u), k, notes,
                    system.source_degree,
                )
            )
    return out


def infinite_singular_points(
    spec: FamilySpec, order: int = DEFAULT_ORDER, tol: float = ZERO_THRESHOLD
) -> list[InfinitePointReport]:
    field = build_family(spec)
    extra = {chart: chart_notes(spec, chart) for chart in ("U1", "U2")}
    return infinite_singular_points_of_field(field, order, tol, extra)


def to_disk(x: float, y: float) -> tuple[float, float]:
    """Central projection to the sphere followed by orthogonal projection to the disk."""
    r = math.sqrt(1.0 + x * x + y * y)
    return x / r, y / r


def chart_to_disk(chart: str, u: float, v: float) -> tuple[float, float]:
    """Disk point of chart coordinates; valid on the equator ``v = 0`` too."""
    r = math.sqrt(1.0 + u * u + v * v)
    sign = -1.0 if v < 0 else 1.0
    if chart == "U1":
        return sign / r, sign * u / r
    if chart == "U2":
        return sign * u / r, sign / r
    if chart == "U3":
        return to_disk(u, v)
    raise ValueError(chart)
