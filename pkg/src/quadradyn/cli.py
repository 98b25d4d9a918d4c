"""Command-line entry point: ``quadradyn <command> [options]``.

Exit codes: 0 success, 2 invalid spec or input, 3 numerical failure,
64 usage error (unknown flag, missing argument).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

from . import __version__
from .algebraic import (
    BranchNotCovered,
    PoleProximityError,
    first_integral,
    integral_curve,
)
from .bifurcate import (
    SWEEP_COLUMNS,
    SweepPath,
    SweepTemplate,
    detect_events,
    region_of,
    row_record,
    sweep,
)
from .classify import (
    ClassificationError,
    CriticalLine,
    classify_family,
    classify_field_point,
    eigen_data,
)
from .compactify import (
    chart_notes,
    infinite_singular_points,
    infinite_singular_points_of_field,
    to_chart,
)
from .dynamics import PortraitSpec, integrate, render_portrait
from .families import FamilySpec, SpecError, build_family, derived_params
from .poly import DEFAULT_ORDER, ZERO_THRESHOLD, field_from_json

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 64

TOOL = "quadradyn"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 by default; usage errors get 64
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


# ---------------------------------------------------------------------------
# Deterministic output
# ---------------------------------------------------------------------------


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float printed to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return fmt_float(v)
    if hasattr(v, "item"):
        return csv_cell(v.item())
    return str(v)


def envelope(command: str, input_echo, options: dict, result, notes: Sequence[str]) -> dict:
    return {
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "input": input_echo,
        "options": options,
        "thresholds": {
            "tau0": ZERO_THRESHOLD,
            "series_order": DEFAULT_ORDER,
            "collision_distance": 1e-9,
            "blowup": 1e6,
        },
        "result": result,
        "notes": _dedupe(notes),
    }


def _dedupe(notes: Sequence[str]) -> list[str]:
    seen, out = set(), []
    for n in notes:
        if n not in seen:
            seen.add(n)
            out.append(n)
    return out


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y got {text!r}")
    return float(parts[0]), float(parts[1])


def _window(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"expected x0,x1,y0,y1 got {text!r}")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def _add_family_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("family")
    g.add_argument("--family", choices=["I", "II", "III", "IV", "V"])
    for name in ("a", "b", "c"):
        g.add_argument(f"--{name}", type=float)
    # parsed as float so that a non-integer exponent is reported as an invalid spec (exit 2)
    g.add_argument("--p", type=float)
    g.add_argument("--s", type=float)
    g.add_argument("--d", type=float, help="free damping override (IV, V)")
    g.add_argument("--spec-json", metavar="FILE",
                   help="FamilySpec JSON, or a report whose 'input' holds one")


def _spec_from_args(args, algebraic: bool = False) -> FamilySpec:
    if args.spec_json:
        try:
            with open(args.spec_json, encoding="utf-8") as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read spec JSON: {exc}") from exc
        if isinstance(obj, dict) and "input" in obj and isinstance(obj["input"], dict):
            obj = obj["input"]
        if not isinstance(obj, dict):
            raise SpecError("spec JSON must be an object")
        return FamilySpec.from_json_obj(obj, algebraic=algebraic)
    if not args.family:
        raise SpecError("give --family or --spec-json")
    kw = {k: getattr(args, k) for k in ("a", "b", "c", "p", "s", "d") if getattr(args, k) is not None}
    obj = {"family": args.family, **kw}
    return FamilySpec.from_json_obj(obj, algebraic=algebraic)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=TOOL, description="Qualitative analysis of five quadratic planar families")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("classify", help="finite (and infinite) critical points, JSON")
    _add_family_args(p)
    p.add_argument("--infinity", action="store_true", help="include points at infinity")
    p.add_argument("--field-json", metavar="FILE", help="classify an arbitrary polynomial field")
    p.add_argument("--at", type=_pair, action="append", default=[], metavar="X,Y",
                   help="critical point of --field-json to classify (repeatable)")
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)

    for name, helptext in (("sweep", "parameter sweep of family V, CSV"),
                           ("events", "bifurcation events along a sweep, JSON")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--family", choices=["V"], default="V")
        p.add_argument("--b", type=float, default=0.0)
        p.add_argument("--c", type=float, default=0.0)
        p.add_argument("--d", type=float, default=0.0)
        p.add_argument("--param", choices=["b", "c", "d"], required=True)
        p.add_argument("--from", dest="start", type=float, required=True)
        p.add_argument("--to", dest="stop", type=float, required=True)
        p.add_argument("--steps", type=int, required=True)
        p.add_argument("--strict-family", action="store_true",
                       help="tie d = b(s+4) instead of treating d as free")
        p.add_argument("--s", type=int, default=0)
        p.add_argument("--out", metavar="FILE")

    p = sub.add_parser("portrait", help="phase portrait, SVG")
    _add_family_args(p)
    where = p.add_mutually_exclusive_group()
    where.add_argument("--window", type=_window, metavar="X0,X1,Y0,Y1")
    where.add_argument("--disk", action="store_true")
    p.add_argument("--seeds", type=int, default=12)
    p.add_argument("--t-max", type=float, default=8.0)
    p.add_argument("--step", type=float, default=1e-2)
    p.add_argument("--no-separatrices", action="store_true")
    p.add_argument("--out", metavar="FILE")

    p = sub.add_parser("solve", help="integrate one trajectory, CSV")
    _add_family_args(p)
    p.add_argument("--start", type=_pair, required=True, metavar="X,Y")
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--mode", choices=["rk4", "rk45"], default="rk4")
    p.add_argument("--backward", action="store_true")
    p.add_argument("--closed-form", action="store_true",
                   help="add the closed-form solution and its distance to RK4")
    p.add_argument("--out", metavar="FILE")

    p = sub.add_parser("integrals", help="first integral with conservation check, JSON")
    _add_family_args(p)
    p.add_argument("--start", type=_pair, default=None, metavar="X,Y")
    p.add_argument("--t-max", type=float, default=0.5)
    p.add_argument("--step", type=float, default=1e-4)

    p = sub.add_parser("verify", help="run the acceptance checks; exit 0 iff all pass")
    p.add_argument("--only", type=lambda s: [int(x) for x in s.split(",")], default=None,
                   metavar="N[,N...]")
    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _emit(text: str, out_path: str | None, stdout) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def cmd_classify(args, stdout) -> int:
    if args.field_json:
        with open(args.field_json, encoding="utf-8") as fh:
            text = fh.read()
        try:
            field_ = field_from_json(text)
        except (ValueError, KeyError, TypeError) as exc:
            raise SpecError(f"invalid field JSON: {exc}") from exc
        if not args.at:
            raise SpecError("--field-json needs at least one --at X,Y")
        points = []
        for x, y in args.at:
            p_val, q_val = field_(x, y)
            if abs(p_val) > 1e-10 or abs(q_val) > 1e-10:
                raise SpecError(f"({x!r}, {y!r}) is not a critical point of the field")
            eigen, cls = classify_field_point(field_, (x, y), args.order)
            points.append({
                "location": [x, y],
                "eigenvalues": eigen.to_json_obj(),
                "label": cls.label.value,
                "trace": cls.trace_text,
                "series_data": dict(cls.parameters_at_decision) if cls.parameters_at_decision else None,
            })
        result = {"finite": points}
        notes: list[str] = []
        if args.infinity:
            result["infinite_points"] = [r.to_json_obj() for r in infinite_singular_points_of_field(field_, args.order)]
        stdout.write(dumps(envelope("classify", field_.to_json_obj(), {"infinity": args.infinity},
                                    result, notes)) + "\n")
        return EXIT_OK

    spec = _spec_from_args(args)
    notes = []
    result: dict = {}
    if spec.tag in ("IV", "V"):
        result["derived"] = derived_params(spec).to_json_obj()
    if spec.tag == "V":
        region = region_of(spec.b, spec.c, spec.damping)
        result["region"] = region.to_json_obj()
        notes.extend(region.notes)
    reports = classify_family(spec, order=args.order)
    if isinstance(reports, CriticalLine):
        result["finite"] = reports.to_json_obj()
    else:
        result["finite"] = [r.to_json_obj() for r in reports]
        for r in reports:
            notes.extend(r.notes)
            if r.manifold is not None:
                notes.extend(r.manifold.notes)
    if args.infinity:
        result["charts"] = {
            ch: to_chart(build_family(spec), ch).field.to_json_obj() for ch in ("U1", "U2")
        }
        inf = infinite_singular_points(spec, args.order)
        result["infinite_points"] = [r.to_json_obj() for r in inf]
        for ch in ("U1", "U2"):
            notes.extend(chart_notes(spec, ch))
        for r in inf:
            notes.extend(r.notes)
    stdout.write(dumps(envelope("classify", spec.to_json_obj(), {"infinity": args.infinity},
                                result, notes)) + "\n")
    return EXIT_OK


def _sweep_inputs(args):
    template = SweepTemplate(args.b, args.c, args.d, args.s if args.strict_family else None)
    path = SweepPath(args.param, args.start, args.stop, args.steps)
    echo = {"family": "V", "b": args.b, "c": args.c, "d": args.d, "param": args.param,
            "from": args.start, "to": args.stop, "steps": args.steps}
    if args.strict_family:
        echo["strict_family_s"] = args.s
    return template, path, echo


def cmd_sweep(args, stdout) -> int:
    try:
        template, path, _ = _sweep_inputs(args)
        rows = sweep(template, path)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(",".join(csv_cell(v) for v in row_record(row)))
    _emit("\n".join(lines) + "\n", args.out, stdout)
    return EXIT_OK


def cmd_events(args, stdout) -> int:
    try:
        template, path, echo = _sweep_inputs(args)
        rows = sweep(template, path)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    events = detect_events(rows, template)
    notes = [n for e in events for n in e.notes]
    flagged = [r.value for r in rows if r.flag]
    result = {"events": [e.to_json_obj() for e in events], "flagged_rows": flagged}
    _emit(dumps(envelope("events", echo, {}, result, notes)) + "\n", args.out, stdout)
    return EXIT_OK


def cmd_portrait(args, stdout) -> int:
    spec = _spec_from_args(args)
    window = None if (args.disk or args.window is None) else args.window
    try:
        pspec = PortraitSpec(window=window, seeds=args.seeds, separatrices=not args.no_separatrices,
                             t_max=args.t_max, step=args.step)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    _emit(render_portrait(spec, pspec), args.out, stdout)
    return EXIT_OK


def cmd_solve(args, stdout) -> int:
    spec = _spec_from_args(args, algebraic=args.closed_form)
    field_ = build_family(spec)
    traj = integrate(field_, args.start, args.t_max, mode=args.mode, h=args.step,
                     direction=-1 if args.backward else 1)
    if not args.closed_form:
        _emit(traj.to_csv(), args.out, stdout)
        return EXIT_OK
    if args.backward:
        raise SpecError("--closed-form compares forward trajectories only")
    curve = integral_curve(spec, args.start)
    lines = ["t,x_closed,y_closed,x_rk4,y_rk4,abs_err"]
    for t, x, y in traj.samples:
        xc, yc = curve(float(t))
        err = math.hypot(xc - x, yc - y)
        lines.append(",".join(csv_cell(float(v)) for v in (t, xc, yc, x, y, err)))
    _emit("\n".join(lines) + "\n", args.out, stdout)
    return EXIT_OK


def cmd_integrals(args, stdout) -> int:
    spec = _spec_from_args(args, algebraic=True)
    fi = first_integral(spec)
    result = {"first_integral": fi.to_json_obj()}
    notes: list[str] = []
    if args.start is not None:
        traj = integrate(fi.field, args.start, args.t_max, h=args.step)
        i0 = fi(*args.start)
        drift = max(abs(fi(x, y) - i0) for x, y in traj.xy)
        result["conservation"] = {
            "start": list(args.start),
            "t_max": float(traj.t[-1]),
            "step": args.step,
            "initial_value": i0,
            "max_abs_drift": drift,
            "max_rel_drift": drift / max(1.0, abs(i0)),
            "termination": traj.termination.value,
        }
        try:
            curve = integral_curve(spec, args.start)
        except BranchNotCovered as exc:
            notes.append(str(exc))
        else:
            result["integral_curve"] = curve.to_json_obj()
            notes.extend(curve.notes)
    stdout.write(dumps(envelope("integrals", spec.to_json_obj(),
                                {"start": list(args.start) if args.start else None},
                                result, notes)) + "\n")
    return EXIT_OK


def cmd_verify(args, stdout) -> int:
    from .verify import run_checks

    results = run_checks(args.only)
    for r in results:
        stdout.write(r.line() + "\n")
    return EXIT_OK if all(r.passed for r in results) else 1


COMMANDS = {
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "events": cmd_events,
    "portrait": cmd_portrait,
    "solve": cmd_solve,
    "integrals": cmd_integrals,
    "verify": cmd_verify,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except UsageError as exc:
        stderr.write(str(exc))
        return EXIT_USAGE
    if not args.command:
        stderr.write(parser.format_usage())
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, stdout)
    except (SpecError, BranchNotCovered) as exc:
        stderr.write(f"invalid spec: {exc}\n")
        return EXIT_SPEC
    except (PoleProximityError, ClassificationError, ArithmeticError) as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except OSError as exc:
        stderr.write(f"I/O error: {exc}\n")
        return EXIT_SPEC


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
