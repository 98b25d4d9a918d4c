"""Trajectory integration and SVG phase portraits (finite window or Poincaré disk)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from . import kernels
from ._parallel import ordered_map
from .classify import (
    CriticalLine,
    Label,
    classify_family,
)
from .compactify import chart_to_disk, infinite_singular_points, to_chart, to_disk
from .families import FamilySpec, build_family
from .poly import VectorField2

BLOWUP = 1e6
DEFAULT_STEP = 1e-3
RK45_RTOL = 1e-9
CHART_SWITCH = 1e3
CHART_TIME_SCALE = 50.0
SEPARATRIX_OFFSET = 1e-4
SEED_EXCLUSION = 1e-3


class Termination(str, Enum):
    TimeLimit = "TimeLimit"
    BlowUp = "BlowUp"
    PoleGuard = "PoleGuard"
    LeftWindow = "LeftWindow"

    def __str__(self) -> str:
        return self.value


_STATUS = {0: Termination.TimeLimit, 1: Termination.BlowUp, 2: Termination.LeftWindow}


@dataclass(frozen=True)
class Trajectory:
    """Samples ``(t, x, y)`` with strictly increasing ``t``.

    ``direction`` is -1 for a backward run; its samples are still indexed by
    the (increasing) elapsed time along the reversed field.
    """

    samples: np.ndarray
    termination: Termination
    step: float | None = None
    direction: int = 1

    @property
    def t(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def xy(self) -> np.ndarray:
        return self.samples[:, 1:]

    def to_csv(self) -> str:
        lines = ["t,x,y"]
        for t, x, y in self.samples:
            lines.append(f"{t:.17g},{x:.17g},{y:.17g}")
        return "\n".join(lines) + "\n"


def integrate(
    field: VectorField2,
    start,
    t_max: float,
    mode: str = "rk4",
    h: float = DEFAULT_STEP,
    window=None,
    direction: int = 1,
    blowup: float = BLOWUP,
    backend: str | None = None,
) -> Trajectory:
    """Integrate ``field`` from ``start`` for elapsed time ``t_max``.

    ``mode="rk4"`` takes ``floor(t_max/h)`` fixed steps (sample times ``i*h``);
    ``mode="rk45"`` uses an adaptive Dormand-Prince pair at relative tolerance
    1e-9. Leaving the box ``window = (xmin, xmax, ymin, ymax)`` ends the run
    with LeftWindow; ``|state| > blowup`` or non-finite values end it with BlowUp.
    """
    x0, y0 = float(start[0]), float(start[1])
    if not (math.isfinite(x0) and math.isfinite(y0)):
        raise ValueError("start must be finite")
    if t_max < 0:
        raise ValueError("t_max must be non-negative")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    f = field if direction == 1 else field.reversed()
    if mode == "rk4":
        if h <= 0:
            raise ValueError("step must be positive")
        n = int(math.floor(t_max / h + 1e-9))
        states, status = kernels.rk4_poly(f, (x0, y0), h, n, blowup, window, backend)
        t = np.arange(states.shape[0], dtype=np.float64) * h
        return Trajectory(np.column_stack([t, states]), _STATUS[status], h, direction)
    if mode == "rk45":
        return _integrate_rk45(f, (x0, y0), t_max, window, direction, blowup)
    raise ValueError(f"unknown mode {mode!r}")


def _integrate_rk45(f, start, t_max, window, direction, blowup) -> Trajectory:
    if t_max == 0:
        return Trajectory(np.array([[0.0, *start]]), Termination.TimeLimit, None, direction)

    def rhs(_t, u):
        with np.errstate(all="ignore"):
            return np.array(f(u[0], u[1]), dtype=float)

    def too_big(_t, u):
        return blowup - max(abs(u[0]), abs(u[1]))

    too_big.terminal = True
    events = [too_big]
    if window is not None:
        x0w, x1w, y0w, y1w = window

        def outside(_t, u):
            return min(u[0] - x0w, x1w - u[0], u[1] - y0w, y1w - u[1])

        outside.terminal = True
        events.append(outside)
    with np.errstate(all="ignore"):
        sol = solve_ivp(rhs, (0.0, t_max), np.asarray(start, dtype=float), method="RK45",
                        rtol=RK45_RTOL, atol=1e-12, events=events)
    samples = np.column_stack([sol.t, sol.y.T])
    finite = np.all(np.isfinite(samples), axis=1)
    if not finite.all():
        samples = samples[: int(np.argmin(finite))]
        return Trajectory(samples, Termination.BlowUp, None, direction)
    if sol.status == 1:
        hit_blowup = len(sol.t_events[0]) > 0
        term = Termination.BlowUp if hit_blowup else Termination.LeftWindow
        return Trajectory(samples, term, None, direction)
    if sol.status < 0:
        return Trajectory(samples, Termination.BlowUp, None, direction)
    return Trajectory(samples, Termination.TimeLimit, None, direction)


# ---------------------------------------------------------------------------
# Portraits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PortraitSpec:
    """What to draw. ``window=None`` selects the Poincaré disk."""

    window: tuple[float, float, float, float] | None = None
    seeds: int = 12
    separatrices: bool = True
    glyphs: bool = True
    t_max: float = 8.0
    step: float = 1e-2
    size: int = 480

    def __post_init__(self):
        if self.window is not None:
            x0, x1, y0, y1 = self.window
            if not (x1 > x0 and y1 > y0):
                raise ValueError(f"degenerate window {self.window}")
        if self.seeds < 0:
            raise ValueError("seed count must be non-negative")

    @property
    def disk(self) -> bool:
        return self.window is None


GLYPH_SHAPES = {
    Label.Saddle: "saddle",
    Label.StableNode: "node",
    Label.UnstableNode: "node",
    Label.NonHypStableNode: "node",
    Label.NonHypUnstableNode: "node",
    Label.StableFocus: "focus",
    Label.UnstableFocus: "focus",
    Label.LinearCenterOrFocusOrCenter: "center",
    Label.CenterOrFocus: "center",
    Label.Cusp: "cusp",
    Label.SaddleNode: "sector",
    Label.EllipticHyperbolicSector: "sector",
}


@dataclass(frozen=True)
class Glyph:
    x: float
    y: float
    label: Label
    where: str  # "finite" or "infinite"


@dataclass(frozen=True)
class Curve:
    points: tuple[tuple[float, float], ...]
    kind: str  # "trajectory" or "separatrix"
    index: int


@dataclass
class Portrait:
    spec: PortraitSpec
    glyphs: list[Glyph] = field(default_factory=list)
    curves: list[Curve] = field(default_factory=list)
    critical_line: bool = False
    arrows_reversed_lower: bool = False


def _disk_inverse(px: float, py: float) -> tuple[float, float]:
    r2 = px * px + py * py
    s = math.sqrt(1.0 - r2)
    return px / s, py / s


def seed_grid(spec: PortraitSpec, avoid: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Regular seed grid in the plane, dropping seeds near critical points."""
    n = spec.seeds
    if n == 0:
        return []
    if spec.disk:
        ticks = [-0.9 + 1.8 * (i + 0.5) / n for i in range(n)]
        raw = [(px, py) for py in ticks for px in ticks if px * px + py * py < 0.95**2]
        pts = [_disk_inverse(px, py) for px, py in raw]
    else:
        x0, x1, y0, y1 = spec.window
        pts = [
            (x0 + (x1 - x0) * (i + 0.5) / n, y0 + (y1 - y0) * (j + 0.5) / n)
            for j in range(n)
            for i in range(n)
        ]
    return [p for p in pts if all(math.hypot(p[0] - a, p[1] - b) > SEED_EXCLUSION for a, b in avoid)]


def _finite_path(field_, start, spec: PortraitSpec, direction: int) -> list[tuple[float, float]]:
    traj = integrate(field_, start, spec.t_max, h=spec.step, window=spec.window,
                     direction=direction)
    return [tuple(p) for p in traj.xy]


def _chart_for(x: float, y: float) -> tuple[str, float, float]:
    if abs(x) >= abs(y):
        return "U1", y / x, 1.0 / x
    return "U2", x / y, 1.0 / y


def _disk_path(field_, start, spec: PortraitSpec, direction: int) -> list[tuple[float, float]]:
    """Disk-projected path; beyond ``|state| > 1e3`` the run continues in a chart."""
    degree = field_.degree
    pts: list[tuple[float, float]] = []
    budget = spec.t_max
    state = ("U3", float(start[0]), float(start[1]))
    for _ in range(6):
        coords, a, b = state
        if coords == "U3":
            traj = integrate(field_, (a, b), budget, h=spec.step, direction=direction,
                             blowup=CHART_SWITCH)
            pts.extend(to_disk(x, y) for x, y in traj.xy)
            budget -= traj.t[-1]
            if traj.termination is not Termination.BlowUp or budget <= 0:
                break
            x, y = traj.xy[-1]
            if not (math.isfinite(x) and math.isfinite(y)):
                break
            state = (*_chart_for(x, y),)
            continue
        system = to_chart(field_, coords)
        # chart time is rescaled by v^(degree-1); keep the flow direction
        sign = direction * (-1 if (b < 0 and (degree - 1) % 2 == 1) else 1)
        # chart time runs slowly near the equator, so it gets a coarser clock
        scale = CHART_TIME_SCALE
        traj = integrate(system.field, (a, b), budget * scale, h=spec.step * scale,
                         direction=sign, window=(-2.0, 2.0, -1e-2, 1e-2))
        pts.extend(chart_to_disk(coords, u, v) for u, v in traj.xy)
        budget -= traj.t[-1] / scale
        if traj.termination is not Termination.LeftWindow or budget <= 0:
            break
        u, v = traj.xy[-1]
        if abs(v) >= 1e-2 and abs(u) <= 2.0:
            # back towards the finite plane
            x, y = (1.0 / v, u / v) if coords == "U1" else (u / v, 1.0 / v)
            state = ("U3", x, y)
        elif abs(u) > 2.0:
            # swap charts: U1 (u, v) <-> U2 (1/u, v/u)
            state = ("U2" if coords == "U1" else "U1", 1.0 / u, v / u)
        else:
            break
    return pts


def _trajectory_curves(field_, seeds, spec: PortraitSpec) -> list[Curve]:
    tasks = [(i, s, d) for i, s in enumerate(seeds) for d in (1, -1)]
    path_fn = _disk_path if spec.disk else _finite_path

    def run(task):
        i, s, d = task
        return path_fn(field_, s, spec, d)

    paths = ordered_map(run, tasks)
    curves = []
    for (i, _s, d), path in zip(tasks, paths):
        if len(path) >= 2:
            curves.append(Curve(tuple(path), "trajectory", 2 * i + (0 if d == 1 else 1)))
    return curves


def _separatrix_curves(field_, reports, spec: PortraitSpec) -> list[Curve]:
    tasks = []
    for r in reports:
        if r.label is not Label.Saddle or r.eigen is None or not r.eigen.is_real:
            continue
        (x0, y0) = r.location
        for lam, vec in ((r.eigen.lambda1.real, r.eigen.eigvec1), (r.eigen.lambda2.real, r.eigen.eigvec2)):
            direction = 1 if lam > 0 else -1
            for sgn in (1.0, -1.0):
                start = (x0 + sgn * SEPARATRIX_OFFSET * vec[0], y0 + sgn * SEPARATRIX_OFFSET * vec[1])
                tasks.append((start, direction))
    path_fn = _disk_path if spec.disk else _finite_path
    paths = ordered_map(lambda t: path_fn(field_, t[0], spec, t[1]), tasks)
    return [Curve(tuple(p), "separatrix", i) for i, p in enumerate(paths)]


def build_portrait(spec: FamilySpec, portrait: PortraitSpec) -> Portrait:
    field_ = build_family(spec)
    out = Portrait(portrait)
    reports = classify_family(spec)
    avoid: list[tuple[float, float]] = []
    if isinstance(reports, CriticalLine):
        out.critical_line = True
        reports = []
    else:
        avoid = [r.location for r in reports]
    if portrait.glyphs:
        for r in reports:
            out.glyphs.append(Glyph(r.location[0], r.location[1], r.label, "finite"))
        if portrait.disk:
            for p in infinite_singular_points(spec):
                for theta, label in ((p.corresponds_to_direction, p.label),
                                     (p.antipode_direction, p.antipode_label)):
                    out.glyphs.append(Glyph(math.cos(theta), math.sin(theta), label, "infinite"))
    out.arrows_reversed_lower = portrait.disk and (field_.degree - 1) % 2 == 1
    out.curves.extend(_trajectory_curves(field_, seed_grid(portrait, avoid), portrait))
    if portrait.separatrices:
        out.curves.extend(_separatrix_curves(field_, reports, portrait))
    return out


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def _glyph_svg(shape: str, px: float, py: float, label: Label, where: str) -> str:
    filled = label in (Label.StableNode, Label.StableFocus, Label.NonHypStableNode)
    fill = "black" if filled else "white"
    r = 5.0
    if shape == "saddle":
        d = (f"M{_fmt(px - r)},{_fmt(py - r)}L{_fmt(px + r)},{_fmt(py + r)}"
             f"M{_fmt(px - r)},{_fmt(py + r)}L{_fmt(px + r)},{_fmt(py - r)}")
        mark = f'<path d="{d}" stroke="black" stroke-width="2" fill="none"/>'
    elif shape == "node":
        mark = f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{_fmt(r)}" stroke="black" fill="{fill}"/>'
    elif shape == "focus":
        mark = (f'<rect x="{_fmt(px - r)}" y="{_fmt(py - r)}" width="{_fmt(2 * r)}" '
                f'height="{_fmt(2 * r)}" stroke="black" fill="{fill}"/>')
    elif shape == "cusp":
        mark = (f'<polygon points="{_fmt(px)},{_fmt(py - r)} {_fmt(px + r)},{_fmt(py + r)} '
                f'{_fmt(px - r)},{_fmt(py + r)}" stroke="black" fill="gray"/>')
    elif shape == "sector":
        mark = (f'<polygon points="{_fmt(px)},{_fmt(py - r)} {_fmt(px + r)},{_fmt(py)} '
                f'{_fmt(px)},{_fmt(py + r)} {_fmt(px - r)},{_fmt(py)}" stroke="black" fill="{fill}"/>')
    else:
        mark = f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{_fmt(r / 2)}" stroke="black" fill="gray"/>'
    return (f'<g class="glyph glyph-{shape} glyph-{where}" data-label="{label.value}">'
            f"{mark}</g>")


def _thin(coords, min_px: float = 1.5):
    """Drop points closer than ``min_px`` to the last kept one (endpoints kept)."""
    if len(coords) <= 2:
        return coords
    kept = [coords[0]]
    for a, b in coords[1:-1]:
        la, lb = kept[-1]
        if abs(a - la) + abs(b - lb) >= min_px:
            kept.append((a, b))
    kept.append(coords[-1])
    return kept


def render_svg(p: Portrait) -> str:
    """SVG 1.1 text: one ``path`` per curve, one ``g.glyph`` per critical point."""
    spec = p.spec
    size = spec.size
    margin = 10.0
    span = size - 2 * margin
    if spec.disk:
        def to_px(x, y):
            return margin + (x + 1.0) / 2.0 * span, margin + (1.0 - y) / 2.0 * span
    else:
        x0, x1, y0, y1 = spec.window

        def to_px(x, y):
            return margin + (x - x0) / (x1 - x0) * span, margin + (y1 - y) / (y1 - y0) * span

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if spec.disk:
        cx, cy = to_px(0.0, 0.0)
        out.append(f'<circle class="equator" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(span / 2)}" '
                   'stroke="black" fill="none"/>')
        if p.arrows_reversed_lower:
            out.append("<!-- chart orientation: time reversed in the v<0 hemisphere of U1/U2 -->")
    if p.critical_line:
        if spec.disk:
            (ax, ay), (bx, by) = to_px(-1.0, 0.0), to_px(1.0, 0.0)
        else:
            (ax, ay), (bx, by) = to_px(spec.window[0], 0.0), to_px(spec.window[1], 0.0)
        out.append(f'<line class="critical-line" x1="{_fmt(ax)}" y1="{_fmt(ay)}" x2="{_fmt(bx)}" '
                   f'y2="{_fmt(by)}" stroke="black" stroke-width="2" stroke-dasharray="4,2"/>')
    for c in p.curves:
        coords = _thin([to_px(x, y) for x, y in c.points])
        d = "M" + "L".join(f"{_fmt(a)},{_fmt(b)}" for a, b in coords)
        colour = "#c03030" if c.kind == "separatrix" else "#3060a0"
        out.append(f'<path class="{c.kind}" data-index="{c.index}" d="{d}" stroke="{colour}" '
                   'stroke-width="1" fill="none"/>')
    for g in p.glyphs:
        if not spec.disk and g.where == "finite":
            x0, x1, y0, y1 = spec.window
            if not (x0 <= g.x <= x1 and y0 <= g.y <= y1):
                continue
        gx, gy = (to_disk(g.x, g.y) if spec.disk and g.where == "finite" else (g.x, g.y))
        px, py = to_px(gx, gy)
        out.append(_glyph_svg(GLYPH_SHAPES.get(g.label, "other"), px, py, g.label, g.where))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_portrait(spec: FamilySpec, portrait: PortraitSpec) -> str:
    return render_svg(build_portrait(spec, portrait))


__all__ = [
    "Curve",
    "Glyph",
    "Portrait",
    "PortraitSpec",
    "Termination",
    "Trajectory",
    "build_portrait",
    "integrate",
    "render_portrait",
    "render_svg",
    "seed_grid",
]
