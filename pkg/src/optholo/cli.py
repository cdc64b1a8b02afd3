"""Command-line entry point: ``optholo {connection,curvature,holonomy,verify}``.

Every command writes one JSON document (stdout or ``--out``). Exit codes are
0 on success, 1 when a verification check fails and 2 when the input is
rejected; in the last case the document is ``{"error": {"type", "message"}}``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Dict, List, Sequence

import numpy as np

from . import __version__
from .config import DEFAULTS, OpthError, ValidationError, default_cutoff
from .connection import connection_closed, connection_numeric, coordinate_labels, vacuum_frame
from .coords import ParameterPoint
from .curvature import curvature_closed_n1, curvature_numeric
from .fock import make_space
from .holonomy import SOURCES, holonomy, loop_from_spec
from .serialize import dumps, load_json, parse_point_text, point_to_doc
from .verify import GROUPS, TOLERANCES, run_battery

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2
REFINEMENT_TOL = 1e-6


class _Parser(argparse.ArgumentParser):
    """Argument errors become validation errors so they share exit code 2."""

    def error(self, message):
        raise ValidationError(message)


def _defaults_doc(tolerances: Dict[str, float]) -> Dict[str, object]:
    return {
        "cutoff_n1": DEFAULTS.cutoff_n1,
        "cutoff_n2": DEFAULTS.cutoff_n2,
        "cutoff_other": DEFAULTS.cutoff_other,
        "step": DEFAULTS.fd_step,
        "curvature_step": DEFAULTS.curvature_step,
        "squeeze_bound": DEFAULTS.squeeze_bound,
        "holonomy_refinement_tol": REFINEMENT_TOL,
        "tolerances": tolerances,
    }


def _parse_tolerances(items: Sequence[str] | None) -> Dict[str, float]:
    known = dict(TOLERANCES, holonomy_refinement=REFINEMENT_TOL)
    out: Dict[str, float] = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"tolerance override {item!r} must look like KEY=VALUE")
        key = key.strip()
        if key not in known:
            raise ValidationError(f"unknown tolerance {key!r}; expected one of {sorted(known)}")
        try:
            tol = float(value)
        except ValueError:
            raise ValidationError(f"tolerance {key} is not a number: {value!r}") from None
        if not tol > 0:
            raise ValidationError(f"tolerance {key} must be positive")
        out[key] = tol
    return out


def _resolve_point(args) -> ParameterPoint:
    if args.point is None:
        if args.n is None:
            raise ValidationError("give --point or --n")
        return ParameterPoint.zeros(args.n)
    point = parse_point_text(args.point)
    if args.n is not None and point.n != args.n:
        raise ValidationError(f"point dimension mismatch: point has n={point.n}, --n is {args.n}")
    return point


def _resolve_cutoff(args, n: int) -> int:
    cutoff = default_cutoff(n) if args.cutoff is None else args.cutoff
    if cutoff < 2:
        raise ValidationError("cutoff must be at least 2")
    return cutoff


def _matrices(conn) -> Dict[str, np.ndarray]:
    """One matrix per coordinate, antiholomorphic ones included."""
    return {label: conn.component(label) for label in coordinate_labels(conn.point.n)}


def cmd_connection(args, tolerances) -> tuple[dict, int]:
    point = _resolve_point(args)
    cutoff = _resolve_cutoff(args, point.n)
    space = make_space(point.n + 1, cutoff)
    step = DEFAULTS.fd_step if args.step is None else args.step
    numeric = connection_numeric(space, point, vacuum_frame(space), step,
                                 squeeze_bound=args.zeta_max)
    doc = {
        "command": "connection",
        "n": point.n,
        "cutoff": cutoff,
        "step": step,
        "point": point_to_doc(point),
        "coordinates": coordinate_labels(point.n),
        "numeric": _matrices(numeric),
        "numeric_meta": numeric.meta,
    }
    if point.n <= 2:
        closed = connection_closed(point, printed=args.printed)
        doc["closed_form"] = _matrices(closed)
        doc["printed_form"] = bool(args.printed)
        doc["max_deviation"] = closed.max_deviation(numeric)
    return doc, EXIT_OK


def cmd_curvature(args, tolerances) -> tuple[dict, int]:
    point = _resolve_point(args)
    cutoff = _resolve_cutoff(args, point.n)
    space = make_space(point.n + 1, cutoff)
    step = DEFAULTS.curvature_step if args.step is None else args.step
    numeric = curvature_numeric(space, point, step=step)
    doc = {
        "command": "curvature",
        "n": point.n,
        "cutoff": cutoff,
        "step": step,
        "connection_step": DEFAULTS.fd_step,
        "point": point_to_doc(point),
        "numeric": dict(numeric.components),
        "numeric_meta": numeric.meta,
    }
    if point.n == 1:
        closed = curvature_closed_n1(point.xi[0], point.zeta[0], printed=args.printed)
        doc["closed_form"] = dict(closed.components)
        doc["printed_form"] = bool(args.printed)
        doc["max_deviation"] = closed.max_deviation(numeric)
    return doc, EXIT_OK


def cmd_holonomy(args, tolerances) -> tuple[dict, int]:
    if args.loop is None:
        raise ValidationError("holonomy needs --loop <file or inline JSON>")
    text = args.loop.strip()
    if text.startswith("{"):
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed loop JSON: {exc}") from None
    else:
        document = load_json(text)
    loop = loop_from_spec(document)
    if args.n is not None and args.n != loop.n:
        raise ValidationError(f"point dimension mismatch: loop has n={loop.n}, --n is {args.n}")
    source = args.source or ("closed_n1" if loop.n == 1 else "closed_n2" if loop.n == 2 else "numeric")
    space = None
    if source == "numeric":
        space = make_space(loop.n + 1, _resolve_cutoff(args, loop.n))
    refine_tol = tolerances.get("holonomy_refinement", REFINEMENT_TOL)
    step = DEFAULTS.fd_step if args.step is None else args.step
    result = holonomy(loop, source, space, step, refinement_tol=refine_tol)
    doc = {
        "command": "holonomy",
        "n": loop.n,
        "loop": loop.to_dict(),
        "source": source,
        "gamma": result.gamma,
        "unitarity_residual": result.unitarity_residual,
        "refinement_estimate": result.refinement_estimate,
        "step_count": result.step_count,
        "meta": result.meta,
    }
    if space is not None:
        doc["cutoff"] = space.cutoff
    if result.undersampled:
        doc["warning"] = (f"refinement estimate {result.refinement_estimate:.3g} exceeds "
                          f"{refine_tol:.3g}; increase the sample count")
    return doc, EXIT_OK


def cmd_verify(args, tolerances) -> tuple[dict, int]:
    battery_tol = {k: v for k, v in tolerances.items() if k in TOLERANCES}
    cutoff_n1 = cutoff_n2 = args.cutoff
    results = run_battery(args.subset, cutoff_n1, cutoff_n2, args.seed,
                          DEFAULTS.fd_step if args.step is None else args.step,
                          args.zeta_max, battery_tol)
    failing = [r.name for r in results if r.passed is False]
    doc = {
        "command": "verify",
        "subset": args.subset,
        "seed": args.seed,
        "cutoff_override": args.cutoff,
        "zeta_max": args.zeta_max,
        "checks": [r.to_dict() for r in results],
        "failing": failing,
        "passed": not failing,
    }
    for r in results:
        if r.name.startswith("holonomy_algebra"):
            doc.setdefault("holonomy_algebra", {})[r.name] = r.details.get("dimension")
    for r in results:
        print(r.line(), file=sys.stderr)
    return doc, EXIT_FAILED if failing else EXIT_OK


COMMANDS = {
    "connection": cmd_connection,
    "curvature": cmd_curvature,
    "holonomy": cmd_holonomy,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="optholo", description="Holonomy of squeezed vacuum bundles in truncated Fock space.")
    parser.add_argument("--version", action="version", version=f"optholo {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(p):
        p.add_argument("--n", type=int, help="number of control modes")
        p.add_argument("--cutoff", type=int, help="per-mode occupation cutoff (default 24 for n=1, 12 for n=2)")
        p.add_argument("--step", type=float, help="finite-difference step")
        p.add_argument("--out", help="write the JSON document here instead of stdout")
        p.add_argument("--tol", action="append", metavar="KEY=VALUE", help="override a tolerance")

    for name in ("connection", "curvature"):
        p = sub.add_parser(name, help=f"{name} matrices at one point")
        common(p)
        p.add_argument("--point", help="JSON point, 'xi1,..|zeta1,..' shorthand, or a file path")
        p.add_argument("--printed", action="store_true",
                       help="report the published closed form instead of the corrected one")
        p.add_argument("--zeta-max", type=float, help="squeezing bound (connection only)")
    p = sub.add_parser("holonomy", help="holonomy around a loop")
    common(p)
    p.add_argument("--loop", help="loop document: file path or inline JSON")
    p.add_argument("--source", choices=SOURCES, help="connection used for transport")
    p = sub.add_parser("verify", help="run the cross-check battery")
    common(p)
    p.add_argument("--seed", type=int, default=2024, help="seed for random sample points")
    p.add_argument("--subset", choices=GROUPS, default="all", help="which checks to run")
    p.add_argument("--zeta-max", type=float, help="magnitude bound for random points")
    return parser


def _emit(doc: dict, out: str | None) -> None:
    text = dumps(doc) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: List[str] | None = None) -> int:
    parser = build_parser()
    out = None
    try:
        args = parser.parse_args(argv)
        out = args.out
        if args.n is not None and args.n < 1:
            raise ValidationError("--n must be at least 1")
        if args.step is not None and not args.step > 0:
            raise ValidationError("--step must be positive")
        tolerances = _parse_tolerances(args.tol)
        started = time.perf_counter()
        doc, code = COMMANDS[args.command](args, tolerances)
        doc["seconds"] = time.perf_counter() - started
        doc["defaults"] = _defaults_doc(dict(TOLERANCES, **{k: v for k, v in tolerances.items() if k in TOLERANCES}))
        doc["version"] = __version__
    except (OpthError, ValueError) as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}}, out)
        return EXIT_INVALID
    _emit(doc, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
