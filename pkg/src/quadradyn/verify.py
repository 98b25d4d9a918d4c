"""Acceptance checks shared by ``quadradyn verify`` and the test-suite.

Each check returns a :class:`CheckResult`; ``run_checks`` runs a subset.
Expected labels and printed coefficients are transcribed from the published
statements; the numerical oracles (closed forms, Jacobian eigenvalues,
invariant relations along trajectories) are computed independently here.
"""

from __future__ import annotations

import math
import os
import subprocess
import sys
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebraic import first_integral, integral_curve, wp_eval
from .bifurcate import SweepPath, SweepTemplate, detect_events, sweep
from .classify import CriticalLine, Label, classify_family
from .compactify import (
    chart_notes,
    equator_polynomial,
    infinite_singular_points,
    real_roots,
    reduce_common_u,
    to_chart,
)
from .dynamics import PortraitSpec, integrate, render_portrait
from .families import FamilySpec, build_family
from .kernels import rk4_poly
from .poly import Poly2


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] criterion {self.number:2d} {self.name}: {self.detail}"
        for f in self.failures:
            text += f"\n         - {f}"
        return text


# ---------------------------------------------------------------------------
# 1. Finite-plane label table
# ---------------------------------------------------------------------------

S, UN, SN, UF, SF = Label.Saddle, Label.UnstableNode, Label.StableNode, Label.UnstableFocus, Label.StableFocus

# (spec, printed labels by point, discrepancy tag or None).  A tagged row must
# carry a note citing the tag and its labels must follow the eigenvalues.
def label_fixtures() -> list[tuple[str, FamilySpec, tuple[Label, ...] | Label, str | None]]:
    rows: list = []
    for c in (1.0, -1.0):
        rows.append((f"I c={c:+g}", FamilySpec("I", c=c), (Label.Cusp,), None))
    for k in (1.0, -1.0):
        rows.append((f"II b={k:+g}", FamilySpec("II", b=k), Label.CriticalLine, None))
        rows.append((f"III a={k:+g}", FamilySpec("III", a=k), Label.CriticalLine, None))
    for a in (1.0, -1.0):
        for c in (1.0, -1.0):
            for p in (0, 1, 2):
                spec = FamilySpec("IV", a=a, c=c, p=p)
                if p == 0:
                    origin, tag = (UF if a > 0 else SF), "DISC-IV-P0"
                else:
                    origin, tag = (UN if a > 0 else SN), None
                rows.append((f"IV a={a:+g} c={c:+g} p={p}", spec, (origin, S), tag))
    v = [
        ("V R1 b>0", (1.0, 1.0, 6.0), (UN, S), None),
        ("V R1 b<0", (-1.0, 1.0, -6.0), (S, SN), None),
        ("V R2", (1.5, 1.0, 6.0), (UN, S), None),
        ("V R3", (1.0, 1.0, 2.0), (UF, S), "DISC-R3-FOCUS"),
        # printed: saddle for b>0; the eigenvalues give a node (det = 3b/2 > 0)
        ("V R4", (1.0, 0.0, 6.0), (S,), None),
        ("V R5", (1.5, 0.0, 6.0), (UN,), None),
        ("V R6", (1.0, 0.0, 2.0), (UF,), None),
    ]
    for name, (b, c, d), labels, tag in v:
        rows.append((f"{name} (b,c,d)=({b:g},{c:g},{d:g})", FamilySpec("V", b=b, c=c, d=d), labels, tag))
    return rows


def check_label_table() -> CheckResult:
    t0 = time.perf_counter()
    failures = []
    rows = label_fixtures()
    for name, spec, expected, tag in rows:
        reports = classify_family(spec)
        if isinstance(reports, CriticalLine):
            if expected is not Label.CriticalLine:
                failures.append(f"{name}: got a critical line, expected {expected}")
            continue
        got = tuple(r.label for r in reports)
        if got != expected:
            cited = sorted({n.split(":")[0] for r in reports for n in r.notes if n.startswith("DISC-")})
            failures.append(
                f"{name}: got {[g.value for g in got]}, printed {[e.value for e in expected]}"
                + (f" (report cites {', '.join(cited)})" if cited else "")
            )
        if tag is not None and not any(tag in n for r in reports for n in r.notes):
            failures.append(f"{name}: notes do not cite {tag}")
    elapsed = time.perf_counter() - t0
    if elapsed >= 5.0:
        failures.append(f"runtime {elapsed:.2f}s exceeds 5s")
    return CheckResult(1, "finite-plane label table", not failures,
                       f"{len(rows) - len(failures)}/{len(rows)} rows match in {elapsed * 1e3:.0f} ms",
                       failures, elapsed)


# ---------------------------------------------------------------------------
# 2. Series data at infinity
# ---------------------------------------------------------------------------


def series_fixtures():
    """(spec, printed (m, n, a, b), printed label) at the U2 origin."""
    rows = []
    for c in (1.0, -1.0):
        node = Label.NonHypStableNode if c < 0 else Label.NonHypUnstableNode
        rows.append((FamilySpec("I", c=c), (5, 2, -c * c, 4 * c), node))
        rows.append((FamilySpec("IV", a=1.0, c=c, p=1), (5, 2, -c * c, 4 * c), node))
        rows.append((FamilySpec("V", b=1.0, c=c, s=2), (5, 2, -c * c, 4 * c), node))
    for k in (1.0, -1.0, 2.0):
        sector = Label.EllipticHyperbolicSector
        rows.append((FamilySpec("II", b=k), (3, 1, -4 * k * k, -6 * k), sector))
        rows.append((FamilySpec("III", a=k), (3, 1, -4 * k * k, -6 * k), sector))
    return rows


def _rel_close(x: float, y: float, tol: float = 1e-12) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(y))


def check_series_data() -> CheckResult:
    failures = []
    rows = series_fixtures()
    for spec, (m, n, a, b), label in rows:
        name = f"{spec.tag} {spec.to_json_obj()}"
        u2 = [r for r in infinite_singular_points(spec) if r.chart == "U2"]
        if len(u2) != 1:
            failures.append(f"{name}: {len(u2)} points at the U2 origin")
            continue
        r = u2[0]
        data = r.classification.parameters_at_decision or {}
        if data.get("m") != m or data.get("n") != n:
            failures.append(f"{name}: (m, n) = ({data.get('m')}, {data.get('n')}), printed ({m}, {n})")
        if not (_rel_close(data.get("a", math.nan), a) and _rel_close(data.get("b", math.nan), b)):
            failures.append(f"{name}: (a, b) = ({data.get('a')}, {data.get('b')}), printed ({a}, {b})")
        if r.label is not label:
            failures.append(f"{name}: label {r.label.value}, printed {label.value}")
    return CheckResult(2, "series data at infinity", not failures,
                       f"{len(rows) - len(failures)}/{len(rows)} quadruples and labels match", failures)


# ---------------------------------------------------------------------------
# 3. Chart systems
# ---------------------------------------------------------------------------


def printed_chart_systems(spec: FamilySpec) -> dict[str, tuple[Poly2, Poly2]]:
    """Chart systems as printed, with ``k`` the linear restoring coefficient."""
    c = spec.c
    if spec.tag == "I":
        out = {"U1": ({(2, 1): -1, (0, 0): -c}, {(1, 2): -1}),
               "U2": ({(0, 1): 1, (3, 0): c}, {(2, 1): -c})}
    elif spec.tag in ("II", "III"):
        k = spec.b if spec.tag == "II" else spec.a
        out = {"U1": ({(2, 1): -1, (0, 0): 2 * k}, {(1, 2): -1}),
               "U2": ({(0, 1): 1, (2, 0): -2 * k}, {(1, 1): -2 * k})}
    else:
        k = spec.a**2 if spec.tag == "IV" else spec.b
        d = spec.damping
        out = {"U1": ({(2, 1): -1, (1, 1): d / 2, (0, 1): -1.5 * k, (0, 0): -c}, {(1, 2): -1}),
               "U2": ({(0, 1): 1, (1, 1): -d / 2, (2, 1): 1.5 * k, (3, 0): c},
                      {(0, 2): -d / 2, (1, 2): 1.5 * k, (2, 1): c})}
    return {ch: (Poly2({e: float(v) for e, v in p.items()}), Poly2({e: float(v) for e, v in q.items()}))
            for ch, (p, q) in out.items()}


# documented deviations: (family, chart) -> note tag
CHART_DEVIATIONS = {("I", "U2"): "CHART-U2-I-SIGN", ("II", "U1"): "CHART-U1-II-FACTOR",
                    ("III", "U1"): "CHART-U1-III-FACTOR"}


def chart_fixtures():
    return [FamilySpec("I", c=1.0), FamilySpec("I", c=-2.0), FamilySpec("II", b=1.5),
            FamilySpec("III", a=-1.0), FamilySpec("IV", a=2.0, c=1.0, p=1),
            FamilySpec("IV", a=-1.0, c=-1.0, p=0), FamilySpec("V", b=1.5, c=-1.0, s=2),
            FamilySpec("V", b=-1.0, c=2.0, s=0)]


def check_chart_systems() -> CheckResult:
    failures = []
    exact = deviating = 0
    for spec in chart_fixtures():
        printed = printed_chart_systems(spec)
        field_ = build_family(spec)
        for ch in ("U1", "U2"):
            system = to_chart(field_, ch).field
            pp, pq = printed[ch]
            same = system.p.allclose(pp, atol=1e-12) and system.q.allclose(pq, atol=1e-12)
            tag = CHART_DEVIATIONS.get((spec.tag, ch))
            if tag is None:
                exact += same
                if not same:
                    failures.append(f"{spec.tag} {ch}: regenerated system differs from the printed one")
            else:
                deviating += 1
                if same:
                    failures.append(f"{spec.tag} {ch}: expected deviation {tag} did not occur")
                if not any(tag in n for n in chart_notes(spec, ch)):
                    failures.append(f"{spec.tag} {ch}: notes do not cite {tag}")
        # no equator zeros in U1 once the common factor is removed
        reduced, _ = reduce_common_u(to_chart(field_, "U1").field)
        eq = equator_polynomial(reduced)
        roots = real_roots(eq)
        if roots:
            failures.append(f"{spec.tag} U1: equator points at u = {roots}")
    return CheckResult(3, "chart systems", not failures,
                       f"{exact} systems exact, {deviating} documented deviations flagged", failures)


# ---------------------------------------------------------------------------
# 4. Conservation
# ---------------------------------------------------------------------------


def _drift(spec: FamilySpec, start, t_max: float, h: float) -> tuple[float, float]:
    fi = first_integral(spec)
    traj = integrate(build_family(spec), start, t_max, h=h)
    i0 = fi(*start)
    return i0, max(abs(fi(x, y) - i0) for x, y in traj.xy)


def check_conservation() -> CheckResult:
    failures = []
    h0, d1 = _drift(FamilySpec("I", c=1.0), (1.0, 0.0), 0.5, 1e-4)
    rel1 = d1 / abs(h0)
    if not rel1 <= 1e-8:
        failures.append(f"family I relative drift {rel1:.3e} > 1e-8")
    i0, d2 = _drift(FamilySpec("II", b=1.0), (0.0, 1.0), 1.0, 1e-4)
    if i0 != 1.0 or not d2 <= 1e-8:
        failures.append(f"family II |I - 1| = {d2:.3e} (I0 = {i0})")
    return CheckResult(4, "conservation", not failures,
                       f"family I rel drift {rel1:.2e}, family II max |I-1| {d2:.2e}", failures)


# ---------------------------------------------------------------------------
# 5. Closed forms against the integrator
# ---------------------------------------------------------------------------


def check_closed_forms() -> CheckResult:
    failures = []
    # family II, start (0, 1): x = tan t
    traj = integrate(build_family(FamilySpec("II", b=1.0)), (0.0, 1.0), 1.0, h=1e-3)
    tan_err = float(np.max(np.abs(traj.xy[:, 0] - np.tan(traj.t))))
    if not tan_err <= 1e-6:
        failures.append(f"family II sup|x - tan t| = {tan_err:.3e}")

    # family I, c=1, start (1, 0): Weierstrass curve
    spec = FamilySpec("I", c=1.0)
    start = (1.0, 0.0)
    curve = integral_curve(spec, start)
    h_val = first_integral(spec)(*start)
    g3_expected = -spec.c**2 * h_val / 18.0
    traj = integrate(build_family(spec), start, 0.5, h=1e-4)
    # invariant relation along the numerical trajectory: X = -c x / 6, Y = -c y / 6
    xs, ys = traj.xy[:, 0], traj.xy[:, 1]
    g3_along = 4 * (-spec.c * xs / 6) ** 3 - (-spec.c * ys / 6) ** 2
    g3_spread = float(np.max(np.abs(g3_along - g3_expected)))
    if not _rel_close(curve.invariants.g3, g3_expected) or curve.invariants.g2 != 0.0:
        failures.append(f"curve invariants {curve.invariants} differ from g2=0, g3={g3_expected!r}")
    if g3_spread > 1e-9:
        failures.append(f"g3 relation drifts by {g3_spread:.3e} along the trajectory")
    closed = np.array([curve(float(t)) for t in traj.t])
    wp_err = float(np.max(np.hypot(closed[:, 0] - xs, closed[:, 1] - ys)))
    if not wp_err <= 1e-6:
        failures.append(f"family I sup-error vs Weierstrass curve {wp_err:.3e} on [0, 0.5]")

    # the curve relation at every wp_eval output used above, plus a spread of invariants
    worst = 0.0
    cases = [(curve.invariants, np.linspace(0.05, 4.0, 200))]
    from .algebraic import WeierstrassInvariants

    for g2, g3 in [(0.0, 1.0), (1.0, 0.0), (3.0, -1.0), (-2.0, 0.5), (12.0, 8.0), (0.1, -0.05)]:
        cases.append((WeierstrassInvariants(g2, g3), np.linspace(-6.0, 6.0, 241)))
    count = 0
    for inv, ts in cases:
        for t in ts:
            try:
                wp, dwp = wp_eval(float(t), inv)
            except ArithmeticError:
                continue
            count += 1
            worst = max(worst, inv.curve_residual(wp, dwp))
    if not worst <= 1e-9:
        failures.append(f"worst curve residual {worst:.3e} over {count} evaluations")
    return CheckResult(
        5, "closed forms vs integrator", not failures,
        f"tan err {tan_err:.2e}, wp-curve err {wp_err:.2e}, curve residual {worst:.2e} ({count} evals)",
        failures,
    )


# ---------------------------------------------------------------------------
# 6. Manifold residual
# ---------------------------------------------------------------------------


def check_manifold() -> CheckResult:
    from .classify import approximate_manifold

    failures = []
    spec = FamilySpec("IV", a=1.0, c=1.0, p=0)
    saddle = (-1.5 * spec.a**2 / spec.c, 0.0)
    m = approximate_manifold(spec, saddle)
    jac = build_family(spec).jacobian_at(*saddle)
    lam = np.sort(np.linalg.eigvals(jac).real)
    v, w = float(lam[0]), float(lam[1])  # w is the positive eigenvalue in the printed formula
    expected = spec.c / ((v - w) * (v - 2 * w))
    if not _rel_close(m.stable_coeff, expected):
        failures.append(f"coefficient {m.stable_coeff!r} vs c/((v-w)(v-2w)) = {expected!r}")
    field_ = build_family(spec)
    offsets = [1e-1, 1e-2, 1e-3]
    res = [abs(m.residual(field_, s)) for s in offsets]
    slopes = [math.log10(res[i] / res[i + 1]) for i in range(2)]
    if min(slopes) < 2.9:
        failures.append(f"log-log slopes {slopes}")
    return CheckResult(6, "stable-manifold residual", not failures,
                       f"slopes {slopes[0]:.3f}, {slopes[1]:.3f}; coefficient {m.stable_coeff:.15g}", failures)


# ---------------------------------------------------------------------------
# 7. Bifurcation events
# ---------------------------------------------------------------------------


def check_events() -> CheckResult:
    failures = []
    details = []

    def run(template, path):
        return detect_events(sweep(template, path), template)

    ev = run(SweepTemplate(c=1.0, d=1.0), SweepPath("b", -0.5, 0.5, 41))
    if len(ev) != 1 or ev[0].kind != "Transcritical" or abs(ev[0].parameter_value) > 1e-8:
        failures.append(f"b sweep: {[(e.kind, e.parameter_value) for e in ev]}")
    else:
        before, after = ev[0].before_labels, ev[0].after_labels
        if tuple(before) != tuple(reversed(after)):
            failures.append(f"b sweep: labels {before} -> {after} are not exchanged")
        details.append(f"Transcritical at b={ev[0].parameter_value:.1e}")

    ev = run(SweepTemplate(b=1.0, d=2.0), SweepPath("c", -1.0, 1.0, 41))
    if len(ev) != 1 or ev[0].kind != "SaddleFocusSaddle" or abs(ev[0].parameter_value) > 1e-8:
        failures.append(f"c sweep: {[(e.kind, e.parameter_value) for e in ev]}")
    else:
        details.append(f"SaddleFocusSaddle at c={ev[0].parameter_value:.1e}")

    ev = run(SweepTemplate(b=1.0, c=1.0), SweepPath("d", -6.0, 6.0, 41))
    stab = [e for e in ev if e.kind == "LocalStabilityChange"]
    if len(stab) != 1 or abs(stab[0].parameter_value) > 1e-8:
        failures.append(f"d sweep: {[(e.kind, e.parameter_value) for e in ev]}")
    else:
        e = stab[0]
        if not (e.before_labels[0].startswith("Stable") and e.after_labels[0].startswith("Unstable")):
            failures.append(f"d sweep: origin {e.before_labels[0]} -> {e.after_labels[0]}")
        details.append(f"LocalStabilityChange at d={e.parameter_value:.1e} "
                       f"({e.before_labels[0]} -> {e.after_labels[0]})")
    return CheckResult(7, "bifurcation events", not failures, "; ".join(details), failures)


# ---------------------------------------------------------------------------
# 8. RK4 order
# ---------------------------------------------------------------------------


def rk4_error_ratio(h: float = 0.02, t_end: float = 1.0, backend: str | None = None) -> float:
    field_ = build_family(FamilySpec("II", b=1.0))
    errs = []
    for step in (h, h / 2):
        n = int(round(t_end / step))
        out, _ = rk4_poly(field_, (0.0, 1.0), step, n, backend=backend)
        errs.append(abs(out[-1, 0] - math.tan(n * step)))
    return errs[0] / errs[1]


def check_rk4_order() -> CheckResult:
    ratio = rk4_error_ratio()
    ok = 14.0 <= ratio <= 18.0
    return CheckResult(8, "RK4 order", ok, f"error ratio {ratio:.3f}",
                       [] if ok else [f"ratio {ratio} outside [14, 18]"])


# ---------------------------------------------------------------------------
# 9. Determinism of the CLI
# ---------------------------------------------------------------------------

DETERMINISM_COMMANDS = [
    ["classify", "--family", "V", "--b", "1", "--c", "1", "--s", "2", "--infinity"],
    ["sweep", "--family", "V", "--b", "1", "--d", "2", "--param", "c", "--from", "-1", "--to", "1", "--steps", "41"],
    ["events", "--family", "V", "--c", "1", "--d", "1", "--param", "b", "--from", "-0.5", "--to", "0.5", "--steps", "41"],
    ["solve", "--family", "II", "--b", "1", "--start", "0,1", "--t-max", "1", "--step", "0.01", "--closed-form"],
    ["portrait", "--family", "V", "--b", "1", "--c", "1", "--s", "2", "--disk", "--seeds", "6"],
]


def _cli(args: list[str], threads: str) -> bytes:
    env = dict(os.environ, QUADRADYN_THREADS=threads)
    proc = subprocess.run([sys.executable, "-m", "quadradyn", *args], capture_output=True, env=env, check=False)
    if proc.returncode != 0:
        raise RuntimeError(f"{args[0]} exited {proc.returncode}: {proc.stderr.decode()[:200]}")
    return proc.stdout


def check_determinism() -> CheckResult:
    failures = []
    for args in DETERMINISM_COMMANDS:
        outputs = [_cli(args, t) for t in ("1", "1", "4", "4")]
        if len(set(outputs)) != 1:
            failures.append(f"{args[0]}: outputs differ across runs or thread counts")
    return CheckResult(9, "CLI determinism", not failures,
                       f"{len(DETERMINISM_COMMANDS)} commands x 4 runs (threads 1 and 4)", failures)


# ---------------------------------------------------------------------------
# 10. Portrait inventory
# ---------------------------------------------------------------------------

SVG_NS = "{http://www.w3.org/2000/svg}"


def portrait_inventory(svg: str) -> dict:
    root = ET.fromstring(svg)
    glyphs = {"finite": [], "infinite": []}
    counts = {"separatrix": 0, "trajectory": 0, "critical-line": 0, "equator": 0}
    for el in root.iter():
        cls = el.get("class", "").split()
        if "glyph" in cls:
            where = "finite" if "glyph-finite" in cls else "infinite"
            glyphs[where].append(el.get("data-label"))
        for key in counts:
            if key in cls:
                counts[key] += 1
    return {"finite": sorted(glyphs["finite"]), "infinite": sorted(glyphs["infinite"]), **counts}


def portrait_fixtures():
    """(caption, spec, finite glyph labels, infinite glyph labels, separatrices, critical line)."""
    node_pair = sorted(["NonHypStableNode", "NonHypUnstableNode"])
    sectors = ["EllipticHyperbolicSector"] * 2
    return [
        ("Family I", FamilySpec("I", c=1.0), ["Cusp"], node_pair, 0, False),
        ("Family II", FamilySpec("II", b=1.0), [], sectors, 0, True),
        ("Family III", FamilySpec("III", a=1.0), [], sectors, 0, True),
        ("Family IV", FamilySpec("IV", a=1.0, c=1.0, p=0), sorted(["Saddle", "UnstableFocus"]), node_pair, 4, False),
        ("Family V b<0", FamilySpec("V", b=-1.0, c=1.0, s=1), sorted(["Saddle", "StableNode"]), node_pair, 4, False),
        ("Family V b>0", FamilySpec("V", b=1.0, c=1.0, s=2), sorted(["Saddle", "UnstableNode"]), node_pair, 4, False),
    ]


def check_portraits() -> CheckResult:
    failures = []
    for caption, spec, finite, infinite, seps, line in portrait_fixtures():
        inv = portrait_inventory(render_portrait(spec, PortraitSpec(seeds=6)))
        if inv["finite"] != finite:
            failures.append(f"{caption}: finite glyphs {inv['finite']}, expected {finite}")
        if inv["infinite"] != infinite:
            failures.append(f"{caption}: infinite glyphs {inv['infinite']}, expected {infinite}")
        if inv["separatrix"] != seps:
            failures.append(f"{caption}: {inv['separatrix']} separatrices, expected {seps}")
        if (inv["critical-line"] > 0) != line:
            failures.append(f"{caption}: critical line drawn = {inv['critical-line'] > 0}")
        if inv["equator"] != 1:
            failures.append(f"{caption}: {inv['equator']} equator circles")
    n = len(portrait_fixtures())
    return CheckResult(10, "disk portrait inventory", not failures, f"{n} configurations checked", failures)


CHECKS: dict[int, Callable[[], CheckResult]] = {
    1: check_label_table,
    2: check_series_data,
    3: check_chart_systems,
    4: check_conservation,
    5: check_closed_forms,
    6: check_manifold,
    7: check_events,
    8: check_rk4_order,
    9: check_determinism,
    10: check_portraits,
}


def run_checks(only=None) -> list[CheckResult]:
    out = []
    for number in sorted(only or CHECKS):
        if number not in CHECKS:
            raise ValueError(f"no acceptance criterion {number}")
        t0 = time.perf_counter()
        try:
            result = CHECKS[number]()
        except Exception as exc:  # a crash is a failure, reported like one
            result = CheckResult(number, CHECKS[number].__name__, False, f"raised {type(exc).__name__}: {exc}")
        result.seconds = time.perf_counter() - t0
        out.append(result)
    return out
