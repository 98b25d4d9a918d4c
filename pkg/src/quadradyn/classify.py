"""Finite critical points: location, linearization and local phase portrait.

Hyperbolic points are read off the eigenvalues. Points with a nilpotent
linear part go through the series test on ``x' = y + A, y' = B`` after a
linear change of frame. Points with exactly one zero eigenvalue
(semi-hyperbolic) use the analogous centre-curve test; they only occur at
parameter values where two critical points collide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .families import FamilySpec, build_family, family_v_field
from .poly import (
    DEFAULT_ORDER,
    ZERO_THRESHOLD,
    Poly2,
    VectorField2,
    compose_series,
    leading_term,
    poly_eval,
    series_solve_implicit,
)


class Label(str, Enum):
    Saddle = "Saddle"
    StableNode = "StableNode"
    UnstableNode = "UnstableNode"
    StableFocus = "StableFocus"
    UnstableFocus = "UnstableFocus"
    LinearCenterOrFocusOrCenter = "LinearCenterOrFocusOrCenter"
    Cusp = "Cusp"
    SaddleNode = "SaddleNode"
    CenterOrFocus = "CenterOrFocus"
    EllipticHyperbolicSector = "EllipticHyperbolicSector"
    NonHypStableNode = "NonHypStableNode"
    NonHypUnstableNode = "NonHypUnstableNode"
    CriticalLine = "CriticalLine"

    def __str__(self) -> str:
        return self.value


STABLE = {Label.StableNode, Label.StableFocus, Label.NonHypStableNode}
UNSTABLE = {Label.UnstableNode, Label.UnstableFocus, Label.NonHypUnstableNode}
FOCI = {Label.StableFocus, Label.UnstableFocus}
NODES = {Label.StableNode, Label.UnstableNode, Label.NonHypStableNode, Label.NonHypUnstableNode}


class ClassificationError(ArithmeticError):
    """The local portrait could not be decided."""


class NonHyperbolic(ClassificationError):
    """Both eigenvalues vanish; the point needs the series test."""


class DegenerateError(ClassificationError):
    """Series data vanish through the truncation order."""


# ---------------------------------------------------------------------------
# Eigen data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EigenData:
    trace: float
    det: float
    discriminant: float
    lambda1: complex
    lambda2: complex
    eigvec1: tuple[float, float] | None = None
    eigvec2: tuple[float, float] | None = None

    @property
    def is_real(self) -> bool:
        return self.lambda1.imag == 0.0 and self.lambda2.imag == 0.0

    @property
    def scale(self) -> float:
        return 1.0 + abs(self.trace) + math.sqrt(abs(self.det))

    def to_json_obj(self) -> list[dict]:
        return [
            {"re": lam.real, "im": lam.imag} for lam in (self.lambda1, self.lambda2)
        ]


def _unit(vx: float, vy: float) -> tuple[float, float]:
    n = math.hypot(vx, vy)
    vx, vy = vx / n, vy / n
    # first nonzero component positive
    if vx < 0 or (vx == 0 and vy < 0):
        vx, vy = -vx, -vy
    return vx + 0.0, vy + 0.0


def _eigvec(m: np.ndarray, lam: float) -> tuple[float, float]:
    (p, q), (r, s) = m
    c1 = (q, lam - p)
    c2 = (lam - s, r)
    n1, n2 = math.hypot(*c1), math.hypot(*c2)
    if max(n1, n2) == 0.0:
        return (1.0, 0.0)
    return _unit(*(c1 if n1 >= n2 else c2))


def eigen_data(m, tol: float = ZERO_THRESHOLD) -> EigenData:
    """Closed-form eigen decomposition of a real 2x2 matrix."""
    m = np.asarray(m, dtype=float)
    tr = float(m[0, 0] + m[1, 1])
    det = float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    disc = tr * tr - 4.0 * det
    scale = 1.0 + abs(tr) + math.sqrt(abs(det))
    if abs(disc) <= tol * scale * scale:
        disc = 0.0
    if disc >= 0.0:
        root = math.sqrt(disc)
        # avoid cancellation: larger-magnitude root first, other from det
        big = (tr + math.copysign(root, tr)) / 2.0 if tr != 0.0 else root / 2.0
        if disc == 0.0:
            # snapped discriminant: det/big would mix a rounded pair, use the double root
            small = big = tr / 2.0
        elif big != 0.0:
            small = det / big
        else:
            small = 0.0
        l1, l2 = (big, small) if big >= small else (small, big)
        return EigenData(
            tr, det, disc, complex(l1), complex(l2), _eigvec(m, l1), _eigvec(m, l2)
        )
    root = math.sqrt(-disc)
    l1 = complex(tr / 2.0, root / 2.0)
    return EigenData(tr, det, disc, l1, l1.conjugate())


# ---------------------------------------------------------------------------
# Classification records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    label: Label
    theorem_trace: tuple[str, ...]
    parameters_at_decision: dict | None = None
    threshold: float = ZERO_THRESHOLD

    @property
    def trace_text(self) -> str:
        return " → ".join(self.theorem_trace)


@dataclass(frozen=True)
class CriticalLine:
    """Non-isolated critical set ``{(x, 0)}``."""

    equation: str = "y=0"

    def to_json_obj(self) -> dict:
        return {"kind": "CriticalLine", "line": self.equation, "label": Label.CriticalLine.value}


def classify_hyperbolic(eigen: EigenData, tol: float = ZERO_THRESHOLD) -> Classification:
    """Linearization test for points with at least one nonzero eigenvalue pair."""
    scale = eigen.scale
    small = tol * scale
    l1, l2 = eigen.lambda1, eigen.lambda2
    if abs(l1) < small and abs(l2) < small:
        raise NonHyperbolic("both eigenvalues vanish")
    if eigen.discriminant >= 0.0:
        r1, r2 = l1.real, l2.real
        if abs(r1) < small or abs(r2) < small:
            raise ClassificationError("one zero eigenvalue: semi-hyperbolic point")
        if r1 * r2 < 0:
            return Classification(Label.Saddle, ("Hyp(a)",), threshold=tol)
        label = Label.UnstableNode if r1 > 0 else Label.StableNode
        return Classification(label, ("Hyp(b)",), threshold=tol)
    alpha = l1.real
    if abs(alpha) <= small:
        return Classification(Label.LinearCenterOrFocusOrCenter, ("Hyp(d)",), threshold=tol)
    label = Label.UnstableFocus if alpha > 0 else Label.StableFocus
    return Classification(label, ("Hyp(c)",), threshold=tol)


# ---------------------------------------------------------------------------
# Frame change to x' = y + A, y' = B
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrameTransform:
    """Original coordinates = ``point + matrix @ new``."""

    point: tuple[float, float]
    matrix: tuple[tuple[float, float], tuple[float, float]]

    def to_original(self, s: float, t: float) -> tuple[float, float]:
        (m00, m01), (m10, m11) = self.matrix
        return (self.point[0] + m00 * s + m01 * t, self.point[1] + m10 * s + m11 * t)

    @property
    def is_identity(self) -> bool:
        return self.point == (0.0, 0.0) and self.matrix == ((1.0, 0.0), (0.0, 1.0))


def transform_field(v: VectorField2, point, matrix) -> VectorField2:
    """Field in coordinates ``z`` where ``original = point + matrix @ z``."""
    t = np.asarray(matrix, dtype=float)
    tinv = np.linalg.inv(t)
    pt = v.p.compose_affine(point, t)
    qt = v.q.compose_affine(point, t)
    (i00, i01), (i10, i11) = (tuple(float(x) for x in row) for row in tinv)
    return VectorField2(pt * i00 + qt * i01, pt * i10 + qt * i11)


def _linear_part(p: Poly2) -> tuple[float, float, float]:
    return p.coeff(0, 0), p.coeff(1, 0), p.coeff(0, 1)


def normalize_frame(
    v: VectorField2, point, tol: float = ZERO_THRESHOLD
) -> tuple[VectorField2, FrameTransform]:
    """Move ``point`` to the origin with linear part ``[[0, 1], [0, 0]]``.

    Requires a nilpotent, nonzero linearization. With ``J`` the Jacobian we
    pick ``e2`` among the unit vectors maximising ``|J e2|`` and set
    ``e1 = J e2``; then ``J [e1 e2] = [e1 e2] [[0, 1], [0, 0]]``.
    """
    point = (float(point[0]), float(point[1]))
    jm = v.jacobian_at(*point)
    scale = 1.0 + float(np.abs(jm).max())
    if float(np.abs(jm).max()) <= tol:
        raise ClassificationError("linear part vanishes; outside the nilpotent case")
    if float(np.abs(jm @ jm).max()) > tol * scale * scale * 1e3:
        raise ValueError("linear part is not nilpotent")
    cols = [jm[:, 0], jm[:, 1]]
    k = 0 if np.linalg.norm(cols[0]) >= np.linalg.norm(cols[1]) else 1
    e2 = np.zeros(2)
    e2[k] = 1.0
    e1 = jm @ e2
    t = np.column_stack([e1, e2])
    matrix = ((float(t[0, 0]), float(t[0, 1])), (float(t[1, 0]), float(t[1, 1])))
    out = transform_field(v, point, matrix)
    # clamp round-off in the constant and linear parts to the exact normal form
    chop = tol * scale
    p_terms = {e: c for e, c in out.p.terms.items() if sum(e) >= 2}
    q_terms = {e: c for e, c in out.q.terms.items() if sum(e) >= 2}
    for poly, want in ((out.p, (0.0, 0.0, 1.0)), (out.q, (0.0, 0.0, 0.0))):
        got = _linear_part(poly)
        if any(abs(g - w) > chop * 1e3 for g, w in zip(got, want)):
            raise ValueError(f"frame change failed to reach normal form: {got}")
    p_terms[(0, 1)] = 1.0
    normal = VectorField2(
        Poly2(p_terms).chop(chop * 1e-3), Poly2(q_terms).chop(chop * 1e-3)
    )
    return normal, FrameTransform(point, matrix)


def _check_normal_form(v: VectorField2) -> tuple[Poly2, Poly2]:
    a = v.p - Poly2.y()
    b = v.q
    for name, poly in (("A", a), ("B", b)):
        low = {e: c for e, c in poly.terms.items() if sum(e) < 2}
        if low:
            raise ValueError(f"field is not in normal form: {name} has low-order terms {low}")
    return a, b


def classify_nonhyperbolic(
    v: VectorField2, order: int = DEFAULT_ORDER, tol: float = ZERO_THRESHOLD
) -> Classification:
    """Series test for ``x' = y + A(x, y), y' = B(x, y)`` at the origin.

    ``f`` solves ``y + A(x, f) = 0``; ``F = B(x, f)`` and
    ``G = (A_x + B_y)(x, f)`` have leading terms ``a x^m`` and ``b x^n``.
    """
    a_poly, b_poly = _check_normal_form(v)
    f = series_solve_implicit(a_poly, order)
    big_f = compose_series(b_poly, f)
    big_g = compose_series(a_poly.diff("x") + b_poly.diff("y"), f)
    lf = leading_term(big_f, tol)
    if lf is None:
        raise DegenerateError(f"F vanishes through order {order}; degenerate beyond the series test")
    a, m = lf
    lg = leading_term(big_g, tol)
    params = {"m": m, "n": None, "a": a, "b": None}
    if lg is None:
        if m % 2 == 0:
            return Classification(Label.Cusp, ("NonHyp", "1", "ii"), params, tol)
        if a > 0:
            return Classification(Label.Saddle, ("NonHyp", "1", "i", "a>0"), params, tol)
        return Classification(Label.CenterOrFocus, ("NonHyp", "1", "i", "a<0"), params, tol)
    b, n = lg
    params.update(n=n, b=b)
    crit = 2 * n + 1
    if m % 2 == 0:
        if m < crit:
            return Classification(Label.Cusp, ("NonHyp", "2", "i", "a"), params, tol)
        return Classification(Label.SaddleNode, ("NonHyp", "2", "i", "b"), params, tol)
    if a > 0:
        return Classification(Label.Saddle, ("NonHyp", "2", "ii"), params, tol)
    disc = b * b + 4.0 * a * (n + 1)
    params["sector_discriminant"] = disc
    if m < crit or (m == crit and disc < 0):
        return Classification(Label.CenterOrFocus, ("NonHyp", "2", "iii", "a"), params, tol)
    if n % 2 == 1:
        return Classification(
            Label.EllipticHyperbolicSector, ("NonHyp", "2", "iii", "b"), params, tol
        )
    label = Label.NonHypStableNode if b < 0 else Label.NonHypUnstableNode
    return Classification(label, ("NonHyp", "2", "iii", "c"), params, tol)


def classify_semihyperbolic(
    v: VectorField2, point, eigen: EigenData, order: int = DEFAULT_ORDER,
    tol: float = ZERO_THRESHOLD,
) -> Classification:
    """One zero eigenvalue: diagonalize to ``x' = A, y' = lam*y + B`` and test
    ``g(x) = A(x, f(x))`` on the curve ``lam*y + B(x, f(x)) = 0``."""
    small = tol * eigen.scale
    if abs(eigen.lambda1) <= small:
        lam, zero_vec, lam_vec = eigen.lambda2.real, eigen.eigvec1, eigen.eigvec2
    else:
        lam, zero_vec, lam_vec = eigen.lambda1.real, eigen.eigvec2, eigen.eigvec1
    matrix = ((zero_vec[0], lam_vec[0]), (zero_vec[1], lam_vec[1]))
    w = transform_field(v, point, matrix)
    a_poly = w.p.truncate_below(2).chop(small * 1e-3)
    b_poly = w.q.truncate_below(2).chop(small * 1e-3)
    f = series_solve_implicit(b_poly * (1.0 / lam), order)
    g = compose_series(a_poly, f)
    lg = leading_term(g, tol)
    if lg is None:
        raise DegenerateError("centre curve is a curve of critical points")
    a, m = lg
    params = {"m": m, "a": a, "lambda": lam}
    if m % 2 == 0:
        return Classification(Label.SaddleNode, ("SemiHyp", "m even"), params, tol)
    if a * lam > 0:
        label = Label.NonHypUnstableNode if lam > 0 else Label.NonHypStableNode
        return Classification(label, ("SemiHyp", "m odd", "a·λ>0"), params, tol)
    return Classification(Label.Saddle, ("SemiHyp", "m odd", "a·λ<0"), params, tol)


# ---------------------------------------------------------------------------
# Manifold approximation at saddles of families IV and V
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ManifoldApprox:
    """Quadratic invariant curves through a saddle, in eigen-coordinates.

    With ``original = point + C @ (s, t)`` and ``C = [[1, 1], [w, v]]`` the
    curve ``t = stable_coeff * s**2`` is invariant to second order; it is
    tangent to the w-eigendirection. ``v_branch_coeff`` gives the companion
    curve ``s = v_branch_coeff * t**2`` tangent to the v-eigendirection, and
    ``unstable_coeff_printed`` keeps the reference-table value
    ``2c/((v-w)(v-2w))`` for comparison.
    """

    point: tuple[float, float]
    w: float
    v: float
    c: float
    change_of_basis: tuple[tuple[float, float], tuple[float, float]]
    stable_coeff: float
    unstable_coeff_printed: float
    v_branch_coeff: float
    notes: tuple[str, ...] = ()

    def curve(self, s: float) -> tuple[float, float]:
        """Point of the w-tangent curve at eigen-coordinate ``s``, original frame."""
        (c00, c01), (c10, c11) = self.change_of_basis
        t = self.stable_coeff * s * s
        return self.point[0] + c00 * s + c01 * t, self.point[1] + c10 * s + c11 * t

    def eigen_field(self, field: VectorField2) -> VectorField2:
        return transform_field(field, self.point, self.change_of_basis)

    def residual(self, field: VectorField2, s: float) -> float:
        """``h'(s) * s' - t'`` on the curve ``t = h(s)``; vanishes to O(s^3)."""
        w = self.eigen_field(field)
        t = self.stable_coeff * s * s
        ds = poly_eval(w.p, s, t)
        dt = poly_eval(w.q, s, t)
        return 2.0 * self.stable_coeff * s * ds - dt

    def to_json_obj(self) -> dict:
        return {
            "point": list(self.point),
            "w": self.w,
            "v": self.v,
            "change_of_basis": [list(r) for r in self.change_of_basis],
            "eigen_frame": {
                "curve": "t = stable_coeff * s^2",
                "stable_coeff": self.stable_coeff,
                "v_branch_curve": "s = v_branch_coeff * t^2",
                "v_branch_coeff": self.v_branch_coeff,
            },
            "mixed_frame_as_printed": {
                "S": f"y = {self.stable_coeff!r} * (x - {self.point[0]!r})^2",
                "U": f"x - {self.point[0]!r} = {self.unstable_coeff_printed!r} * y^2",
            },
            "notes": list(self.notes),
        }


def _damping_and_c(spec: FamilySpec) -> tuple[float, float]:
    if spec.tag not in ("IV", "V"):
        raise ValueError(f"manifold approximation covers families IV and V, not {spec.tag}")
    return spec.damping, spec.c


def approximate_manifold(spec: FamilySpec, saddle) -> ManifoldApprox:
    """Second-order invariant curve through a saddle of family IV or V.

    In the shifted frame the only nonlinearity is ``(0, -c X^2)``, so after
    diagonalizing with ``C = [[1, 1], [w, v]]`` the system reads
    ``s' = w s + k (s+t)^2``, ``t' = v t - k (s+t)^2`` with ``k = c/(v-w)``;
    matching the ``s^2`` coefficient gives ``c/((v-w)(v-2w))``.
    """
    d, c = _damping_and_c(spec)
    field = build_family(spec)
    x0, y0 = float(saddle[0]), float(saddle[1])
    if abs(field.p(x0, y0)) > 1e-10 or abs(field.q(x0, y0)) > 1e-10:
        raise ValueError(f"({x0}, {y0}) is not a critical point")
    jm = field.jacobian_at(x0, y0)
    q_x = float(jm[1, 0])
    radicand = d * d + 16.0 * q_x
    if radicand <= 0 or q_x <= 0:
        raise ValueError(f"({x0}, {y0}) is not a saddle: det = {-q_x}")
    root = math.sqrt(radicand)
    w = (d + root) / 4.0
    v = (d - root) / 4.0
    if not (w > 0 > v):
        raise ValueError(f"({x0}, {y0}) is not a saddle: eigenvalues {w}, {v}")
    denom = (v - w) * (v - 2.0 * w)
    notes = (
        "MANIFOLD-FRAME: coefficients are in eigen-coordinates; the mixed-frame "
        "formula is printed for comparison only",
        "MANIFOLD-BRANCH: t = stable_coeff*s^2 is tangent to the w>0 eigendirection; "
        "the branch tangent to v<0 is s = v_branch_coeff*t^2",
    )
    return ManifoldApprox(
        point=(x0, y0),
        w=w,
        v=v,
        c=c,
        change_of_basis=((1.0, 1.0), (w, v)),
        stable_coeff=c / denom,
        unstable_coeff_printed=2.0 * c / denom,
        v_branch_coeff=c / ((v - w) * (2.0 * v - w)),
        notes=notes,
    )


# ---------------------------------------------------------------------------
# Critical points and reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalPointReport:
    location: tuple[float, float]
    eigen: EigenData | None
    classification: Classification
    manifold: ManifoldApprox | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def label(self) -> Label:
        return self.classification.label

    def to_json_obj(self) -> dict:
        out = {
            "location": list(self.location),
            "eigenvalues": self.eigen.to_json_obj() if self.eigen else None,
            "label": self.classification.label.value,
            "trace": self.classification.trace_text,
            "threshold": self.classification.threshold,
        }
        if self.eigen is not None and self.eigen.eigvec1 is not None:
            out["eigenvectors"] = [list(self.eigen.eigvec1), list(self.eigen.eigvec2)]
        if self.classification.parameters_at_decision is not None:
            out["series_data"] = dict(self.classification.parameters_at_decision)
        if self.manifold is not None:
            out["manifold"] = self.manifold.to_json_obj()
        out["notes"] = list(self.notes)
        return out


def find_finite_critical_points(spec: FamilySpec) -> list[tuple[float, float]] | CriticalLine:
    if spec.tag == "I":
        return [(0.0, 0.0)]
    if spec.tag in ("II", "III"):
        return CriticalLine()
    if spec.tag == "IV":
        return [(0.0, 0.0), (-3.0 * spec.a**2 / (2.0 * spec.c), 0.0)]
    if spec.c == 0:
        return [(0.0, 0.0)]
    return [(0.0, 0.0), (-3.0 * spec.b / (2.0 * spec.c), 0.0)]


def classify_field_point(
    v: VectorField2, point, order: int = DEFAULT_ORDER, tol: float = ZERO_THRESHOLD
) -> tuple[EigenData, Classification]:
    """Classify an isolated critical point of an arbitrary polynomial field."""
    x0, y0 = float(point[0]), float(point[1])
    jm = v.jacobian_at(x0, y0)
    eigen = eigen_data(jm, tol)
    try:
        return eigen, classify_hyperbolic(eigen, tol)
    except NonHyperbolic:
        normal, _ = normalize_frame(v, (x0, y0), tol)
        return eigen, classify_nonhyperbolic(normal, order, tol)
    except ClassificationError:
        return eigen, classify_semihyperbolic(v, (x0, y0), eigen, order, tol)


def reference_notes(spec: FamilySpec, point, label: Label) -> tuple[str, ...]:
    """Notes where the label departs from, or qualifies, the reference table."""
    notes = []
    x0 = float(point[0])
    if spec.tag == "IV" and x0 == 0.0 and spec.p == 0 and spec.d is None:
        notes.append(
            "DISC-IV-P0: the reference table lists the family IV origin as a node for "
            "every p, but with p=0 the radicand d^2-24a^2 = -8a^2 is negative and the "
            f"origin is a focus; label follows the eigenvalues ({label.value})"
        )
    if spec.tag == "V":
        b, c, d = spec.b, spec.c, spec.damping
        r_disc = d * d - 24.0 * b
        if x0 == 0.0 and c > 0 and r_disc < 0:
            notes.append(
                "DISC-R3-FOCUS: in R3 the reference statement says 'stable focus' while "
                "its derivation says 'focus unstable'; the real part of the eigenvalues "
                f"is d/4, so stability follows sign(d) (d={d!r}, label {label.value})"
            )
        if x0 == 0.0 and c == 0 and r_disc > 0:
            notes.append(
                "DISC-R4-SWAP: for c=0 and d^2-24b>0 the reference table calls the origin "
                "a saddle when b>0 and a stable node when b<0, but det = 3b/2, so b>0 "
                f"gives a node and b<0 a saddle; label follows the eigenvalues ({label.value})"
            )
        if x0 == 0.0 and c == 0 and r_disc == 0 and d < 0:
            notes.append(
                "DISC-R5-SIGN: the reference table calls the origin an unstable node on "
                f"d^2=24b, but the double eigenvalue d/4 is negative here ({label.value})"
            )
        if x0 != 0.0 and r_disc > 0 and b < 0 and label is not Label.StableNode:
            notes.append(
                "DISC-R1-P2: for b<0 the reference table lists the second point as a "
                "stable node; its trace is d/2 and its radicand d^2+24b, so the label "
                f"here is {label.value}"
            )
    return tuple(notes)


def classify_point(
    spec: FamilySpec, point, order: int = DEFAULT_ORDER, tol: float = ZERO_THRESHOLD
) -> CriticalPointReport:
    """Full report for a finite critical point of ``spec``."""
    field_ = build_family(spec)
    x0, y0 = float(point[0]), float(point[1])
    if abs(field_.p(x0, y0)) > 1e-10 or abs(field_.q(x0, y0)) > 1e-10:
        raise ValueError(f"({x0}, {y0}) is not a critical point of family {spec.tag}")
    if spec.tag in ("II", "III"):
        return CriticalPointReport(
            (x0, y0), None, Classification(Label.CriticalLine, ("CriticalLine",), threshold=tol),
            notes=("point lies on the line of critical points y=0",),
        )
    eigen, cls = classify_field_point(field_, (x0, y0), order, tol)
    manifold = None
    if cls.label is Label.Saddle and spec.tag in ("IV", "V") and eigen.is_real:
        manifold = approximate_manifold(spec, (x0, y0))
    return CriticalPointReport(
        (x0, y0), eigen, cls, manifold, reference_notes(spec, (x0, y0), cls.label)
    )


def classify_family(spec: FamilySpec, **kw) -> list[CriticalPointReport] | CriticalLine:
    points = find_finite_critical_points(spec)
    if isinstance(points, CriticalLine):
        return points
    return [classify_point(spec, p, **kw) for p in points]


def classify_v_point(b: float, c: float, d: float, point, tol: float = ZERO_THRESHOLD):
    """Classify a point of family V with free ``(b, c, d)``; no admissibility checks."""
    return classify_field_point(family_v_field(b, c, d), point, tol=tol)


def eigen_residual(eigen: EigenData) -> float:
    """Largest characteristic-polynomial residual at the two eigenvalues, scaled."""
    scale = max(1.0, abs(eigen.trace), abs(eigen.det))
    vals = [
        abs(lam * lam - eigen.trace * lam + eigen.det) for lam in (eigen.lambda1, eigen.lambda2)
    ]
    return max(vals) / scale


__all__ = [
    "Label",
    "EigenData",
    "Classification",
    "CriticalLine",
    "CriticalPointReport",
    "ManifoldApprox",
    "FrameTransform",
    "ClassificationError",
    "NonHyperbolic",
    "DegenerateError",
    "eigen_data",
    "classify_hyperbolic",
    "classify_nonhyperbolic",
    "classify_semihyperbolic",
    "normalize_frame",
    "transform_field",
    "classify_field_point",
    "classify_point",
    "classify_family",
    "classify_v_point",
    "approximate_manifold",
    "find_finite_critical_points",
    "reference_notes",
    "eigen_residual",
]
