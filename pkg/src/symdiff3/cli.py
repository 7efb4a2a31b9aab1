"""Test germs of symmetric 3-differentials for closedness.

    symdiff3 check  input.ini
    symdiff3 check  --a "1 + z*w - 0.5*w^2" --b "1 + 0.5*z^2 - z*w"
    symdiff3 web    --c0 1 --c1 0 --c2 0 --c3=-1
    symdiff3 generate --seed 3 --perturb 1 > case.ini

Input files are INI documents with one ``[input]`` section::

    [input]
    mode = adapted          # adapted: a, b | cubic: c0..c3 | frame: omega1..3
    a = 1 + z*w - 0.5*w^2
    b = 1 + 0.5*z^2 - z*w
    order = 12              # optional; flags win

In ``frame`` mode each form is a pair ``omega1 = <dz coeff> ; <dw coeff>``.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import dataclass, field

from . import __version__
from .criteria import (
    RESIDUAL_TOL,
    is_closed,
    oracle_decompose,
    proof_crosschecks,
)
from .errors import (
    Degenerate,
    NotAUnit,
    ParseError,
    SingularJacobian,
    SymDiffError,
)
from .exterior import OneForm, Sym3Diff, is_nondegenerate, sym3_product
from .fixtures import DEFAULT_ORDER, gen_closed, gen_perturbed
from .parser import format_complex, format_series, parse_expression
from .series import Series2
from .web import adapt_coordinates, adapted_data, adapted_frame, build_frame, frame_residuals

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DEGENERATE = 2
EXIT_INTERNAL = 3

MIN_ORDER = 6
MODES = {
    "adapted": ("a", "b"),
    "cubic": ("c0", "c1", "c2", "c3"),
    "frame": ("omega1", "omega2", "omega3"),
}
COMMANDS = ("check", "web", "oracle", "cross-validate", "generate")


class UsageError(Exception):
    pass


@dataclass
class InputSpec:
    mode: str
    fields: dict[str, str]
    order: int = DEFAULT_ORDER
    tolerance: float = RESIDUAL_TOL
    seed: int | None = None
    source: str = "<inline>"
    _parsed: dict = field(default_factory=dict, repr=False)

    def series(self, key: str) -> Series2:
        if key not in self._parsed:
            self._parsed[key] = parse_expression(self.fields[key], self.order)
        return self._parsed[key]

    def form(self, key: str) -> OneForm:
        text = self.fields[key]
        if text.count(";") != 1:
            raise UsageError(f"{key} must be '<dz coefficient> ; <dw coefficient>'")
        p, q = text.split(";")
        return OneForm(parse_expression(p, self.order), parse_expression(q, self.order))

    def eta(self) -> Sym3Diff:
        if self.mode == "adapted":
            return Sym3Diff.from_ab(self.series("a"), self.series("b"))
        if self.mode == "cubic":
            return Sym3Diff(*(self.series(k) for k in MODES["cubic"]))
        return sym3_product(*(self.form(k) for k in MODES["frame"]))

    def echo(self) -> dict:
        if self.mode == "frame":
            norm = {}
            for k in MODES["frame"]:
                u = self.form(k)
                norm[k] = f"{format_series(u.p)} ; {format_series(u.q)}"
        else:
            norm = {k: format_series(self.series(k)) for k in MODES[self.mode]}
        return {
            "mode": self.mode,
            "fields": norm,
            "order": self.order,
            "tolerance": self.tolerance,
            "seed": self.seed,
        }


# ---------------------------------------------------------------- input


def _check_order(order: int) -> int:
    if order < MIN_ORDER:
        raise UsageError(f"order must be at least {MIN_ORDER}, got {order}")
    return order


def load_spec(path: str, args: argparse.Namespace) -> InputSpec:
    cfg = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        with open(path, encoding="utf-8") as fh:
            cfg.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"{path}: {exc}") from exc
    if "input" not in cfg:
        raise UsageError(f"{path}: missing [input] section")
    sec = cfg["input"]
    mode = sec.get("mode", "adapted").strip()
    if mode not in MODES:
        raise UsageError(f"{path}: unknown mode {mode!r}")
    missing = [k for k in MODES[mode] if k not in sec]
    if missing:
        raise UsageError(f"{path}: missing keys {', '.join(missing)}")
    order = args.order if args.order is not None else sec.getint("order", DEFAULT_ORDER)
    tol = args.tol if args.tol is not None else sec.getfloat("tolerance", RESIDUAL_TOL)
    seed = args.seed if args.seed is not None else sec.getint("seed", None)
    return InputSpec(mode, {k: sec[k] for k in MODES[mode]}, _check_order(order), tol, seed,
                     source=path)


def inline_spec(args: argparse.Namespace) -> InputSpec:
    given = {k: getattr(args, k) for k in ("a", "b", "c0", "c1", "c2", "c3")
             if getattr(args, k) is not None}
    if set(given) == {"a", "b"}:
        mode = "adapted"
    elif set(given) == {"c0", "c1", "c2", "c3"}:
        mode = "cubic"
    else:
        raise UsageError("give an input file, --a and --b, or all of --c0..--c3")
    order = args.order if args.order is not None else DEFAULT_ORDER
    tol = args.tol if args.tol is not None else RESIDUAL_TOL
    return InputSpec(mode, given, _check_order(order), tol, args.seed)


# ---------------------------------------------------------------- commands


def _series_dump(s: Series2) -> str:
    return format_series(s, s.valid_order)


def cmd_check(spec: InputSpec) -> dict:
    v = is_closed(spec.eta(), spec.order, spec.tolerance)
    return {
        "verdict": v.kind,
        "criteria": [c.as_dict() for c in v.criteria],
        "preconditions": v.preconditions,
        "orders": {"max_order": spec.order, "checked_order": v.checked_order},
        "agreement": v.agreement,
    }


def cmd_web(spec: InputSpec) -> dict:
    eta = spec.eta()
    if not is_nondegenerate(eta):
        raise Degenerate("discriminant vanishes at the origin")
    frame = build_frame(eta)
    return {
        "frame_residuals": frame_residuals(frame, eta),
        "gamma": {"dz": _series_dump(frame.gamma.p), "dw": _series_dump(frame.gamma.q)},
        "d_gamma": _series_dump(frame.d_gamma.r),
        "blaschke_at_origin": format_complex(frame.d_gamma.r.constant),
        "orders": {"max_order": spec.order, "valid_order": frame.d_gamma.valid_order},
    }


def _adapted_ab(spec: InputSpec) -> tuple[Series2, Series2]:
    if spec.mode == "adapted":
        return spec.series("a"), spec.series("b")
    eta = spec.eta()
    if not is_nondegenerate(eta):
        raise Degenerate("discriminant vanishes at the origin")
    chart = adapt_coordinates(eta, build_frame(eta), spec.tolerance)
    return chart.a, chart.b


def cmd_oracle(spec: InputSpec) -> dict:
    o = oracle_decompose(*_adapted_ab(spec), spec.tolerance)
    out = {
        "status": o.status,
        "obstruction_order": o.obstruction_order,
        "max_abs_residual": o.max_abs_residual,
        "orders": {"max_order": spec.order, "valid_order": o.valid_order},
    }
    if o.closed:
        out["decomposition"] = {k: _series_dump(s) for k, s in
                                (("Z", o.Z), ("W", o.W), ("H", o.H), ("c", o.c), ("d", o.d))}
    return out


def cmd_cross_validate(spec: InputSpec) -> dict:
    out = cmd_check(spec)
    a, b = _adapted_ab(spec)
    frame = adapted_frame(Sym3Diff.from_ab(a, b))
    rep = proof_crosschecks(frame, adapted_data(frame))
    out["crosschecks"] = {
        "entries": {k: {"max_abs_residual": m, "valid_order": v} for k, (m, v) in rep.entries.items()},
        "scale": rep.scale,
        "passed": rep.passed(),
        "failures": rep.failures(),
    }
    return out


def cmd_generate(args: argparse.Namespace) -> str:
    seed = 0 if args.seed is None else args.seed
    order = _check_order(args.order if args.order is not None else DEFAULT_ORDER)
    a, b = gen_closed(seed, order)
    if args.perturb:
        a, b = gen_perturbed(seed, (a, b), args.perturb)
    kind = "perturbed" if args.perturb else "closed"
    lines = [
        f"# generated {kind} case, seed {seed}",
        "[input]",
        "mode = adapted",
        f"a = {format_series(a)}",
        f"b = {format_series(b)}",
        f"order = {order}",
        f"seed = {seed}",
    ]
    return "\n".join(lines) + "\n"


RUNNERS = {
    "check": cmd_check,
    "web": cmd_web,
    "oracle": cmd_oracle,
    "cross-validate": cmd_cross_validate,
}


def run(spec: InputSpec, command: str) -> tuple[dict, int]:
    """Run one command; module errors become report entries plus an exit code."""
    report: dict = {"command": command, "version": __version__}
    try:
        report["input"] = spec.echo()
        report.update(RUNNERS[command](spec))
        code = EXIT_OK
    except (ParseError, UsageError) as exc:
        report["error"] = _error_entry(exc)
        code = EXIT_USAGE
    except (Degenerate, SingularJacobian, NotAUnit) as exc:
        report["error"] = _error_entry(exc)
        code = EXIT_DEGENERATE
    except SymDiffError as exc:  # InternalInconsistency, ShapeViolation, ...
        report["error"] = _error_entry(exc)
        code = EXIT_INTERNAL
    if code != EXIT_OK:
        report.setdefault("verdict", None)
    return report, code


def _error_entry(exc: Exception) -> dict:
    entry = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        entry["position"] = exc.position
        entry["expected"] = sorted(exc.expected)
    return entry


# ---------------------------------------------------------------- output


def render_json(reports: list[dict]) -> str:
    doc = reports[0] if len(reports) == 1 else reports
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _fmt(x) -> str:
    return "-" if x is None else (f"{x:.3e}" if isinstance(x, float) else str(x))


def render_text(reports: list[dict]) -> str:
    lines = []
    for rep in reports:
        src = rep.get("input", {}).get("mode", "?")
        lines.append(f"== {rep['command']} ({src} input)")
        if "error" in rep:
            lines.append(f"error: {rep['error']['type']}: {rep['error']['message']}")
            continue
        if "verdict" in rep:
            lines.append(f"verdict: {rep['verdict']}")
            for c in rep["criteria"]:
                if not c["applicable"]:
                    lines.append(f"  {c['name']:<8} not applicable ({c['note']})")
                    continue
                lines.append(f"  {c['name']:<8} vanishes={c['vanishes']} "
                             f"max_abs={_fmt(c['max_abs_residual'])} "
                             f"first_nonzero_degree={_fmt(c['first_nonzero_degree'])} "
                             f"valid_order={c['valid_order']}")
            flags = ", ".join(f"{k}={v}" for k, v in sorted(rep["preconditions"].items()))
            lines.append(f"  preconditions: {flags}")
        if "status" in rep:
            lines.append(f"oracle: {rep['status']} obstruction_order={_fmt(rep['obstruction_order'])}")
            for k, s in sorted(rep.get("decomposition", {}).items()):
                lines.append(f"  {k} = {s}")
        if "frame_residuals" in rep:
            worst = max(rep["frame_residuals"].values())
            lines.append(f"frame invariants: worst residual {worst:.3e}")
            lines.append(f"  d_gamma(0,0) = {rep['blaschke_at_origin']}")
            lines.append(f"  gamma = ({rep['gamma']['dz']}) dz + ({rep['gamma']['dw']}) dw")
        if "crosschecks" in rep:
            cc = rep["crosschecks"]
            lines.append(f"crosschecks: passed={cc['passed']} scale={cc['scale']:.3g}")
            for k, e in sorted(cc["entries"].items()):
                lines.append(f"  {k:<20} {e['max_abs_residual']:.3e}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symdiff3", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("inputs", nargs="*", help="INI input files")
    ap.add_argument("--order", type=int, help=f"truncation order (default {DEFAULT_ORDER}, min {MIN_ORDER})")
    ap.add_argument("--tol", type=float, help=f"residual tolerance (default {RESIDUAL_TOL})")
    ap.add_argument("--seed", type=int, help="seed for generate")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--perturb", type=float, default=0.0,
                    help="generate: add a random monomial of this magnitude")
    for k in ("a", "b", "c0", "c1", "c2", "c3"):
        ap.add_argument(f"--{k}", metavar="EXPR")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    if args.command == "generate":
        try:
            sys.stdout.write(cmd_generate(args))
        except UsageError as exc:
            print(f"symdiff3: {exc}", file=sys.stderr)
            return EXIT_USAGE
        return EXIT_OK

    try:
        specs = [load_spec(p, args) for p in args.inputs] if args.inputs else [inline_spec(args)]
    except UsageError as exc:
        print(f"symdiff3: {exc}", file=sys.stderr)
        return EXIT_USAGE

    reports, codes = [], []
    for spec in specs:
        rep, code = run(spec, args.command)
        reports.append(rep)
        codes.append(code)
    render = render_json if args.format == "json" else render_text
    sys.stdout.write(render(reports))
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
