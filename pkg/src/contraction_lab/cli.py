"""Command line front end.

Commands: validate, classify, iterate, bounds, search.  Inputs are JSON
(space from a file, map inline or from a file, phi/kind inline); reports are
JSON envelopes {command, status, payload} on stdout with deterministic key
order, or CSV tables for iterate/bounds with --format csv.  Exit codes:
0 ok, 1 violation or not-applicable, 2 operational error.

Setting CONTRACTION_LAB_SEED in the environment overrides --seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import solver, trifun
from .contraction import (
    ContractionKind,
    SelfMap,
    applicability,
    step_contraction_factor,
    verify_contraction,
)
from .search import SearchConfig, counterexample_search
from .space import (
    FiniteSemimetricSpace,
    check_generalized_triangle,
    minimal_b_constant,
    space_from_json,
    validate_semimetric,
)
from .trifun import TriangleFunctionSpec

ENV_SEED = "CONTRACTION_LAB_SEED"
EXIT_CODES = {"ok": 0, "violation": 1, "not-applicable": 1, "error": 2}
MAX_LISTED_VIOLATIONS = 5


@dataclasses.dataclass(frozen=True)
class CommandResult:
    command: str
    status: str  # "ok" | "violation" | "not-applicable" | "error"
    payload: dict

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "status": self.status,
            "payload": self.payload,
        }


def _plain(value):
    """Recursively convert reports to JSON-safe plain data."""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value == math.inf else "-inf" if value == -math.inf else "nan"
    return value


def _inline_json(text: str, flag: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{flag} is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ValueError(f"{flag} must be a JSON object")
    return obj


def _load_space(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        obj = json.load(handle)
    if not isinstance(obj, dict):
        raise ValueError("space file must hold a JSON object")
    return space_from_json(obj)


def _load_map(text: str) -> SelfMap:
    if text.lstrip().startswith("{"):
        obj = _inline_json(text, "--map")
    else:
        with open(text, "r", encoding="utf-8") as handle:
            obj = json.load(handle)
        if not isinstance(obj, dict):
            raise ValueError("map file must hold a JSON object")
    return SelfMap.from_json(obj)


def _parse_x0(space, text: str):
    if isinstance(space, FiniteSemimetricSpace):
        if text in space.labels:
            return text
        try:
            return int(text)
        except ValueError:
            raise ValueError(f"--x0 {text!r} is neither a label nor an index") from None
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"--x0 {text!r} is not a number") from None


def _resolve_seed(args) -> int:
    env = os.environ.get(ENV_SEED)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"{ENV_SEED} must be an integer, got {env!r}") from None
    return args.seed if args.seed is not None else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contraction-lab",
        description="Validate semimetric spaces, classify contractions, "
        "iterate maps, audit error bounds, and search for boundary instances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("validate", "check space axioms and the triangle condition for phi"),
        ("classify", "verify a contraction inequality and the matching principle"),
        ("iterate", "run Picard iteration and report the trace"),
        ("bounds", "audit the a-priori error bound along an orbit"),
        ("search", "seeded randomized search for boundary instances"),
    ):
        cmd = sub.add_parser(name, help=blurb)
        cmd.add_argument("--space", metavar="FILE", help="space JSON file")
        cmd.add_argument("--map", metavar="JSON|FILE", help="self-map JSON or file")
        cmd.add_argument("--phi", metavar="JSON", help="triangle function JSON")
        cmd.add_argument("--kind", metavar="JSON", help="contraction kind JSON")
        cmd.add_argument("--x0", metavar="VALUE", help="start point (label, index, or number)")
        cmd.add_argument("--max-iter", type=int, metavar="N", default=None)
        cmd.add_argument("--tol", type=float, metavar="T", default=None)
        cmd.add_argument("--seed", type=int, metavar="S", default=None)
        cmd.add_argument("--budget", type=int, metavar="N", default=None)
        cmd.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def _require(parser, args, names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        parser.error(f"{args.command} requires {', '.join(missing)}")


def _cmd_validate(args, parser):
    _require(parser, args, ("space", "phi"))
    space = _load_space(args.space)
    phi = TriangleFunctionSpec.from_json(_inline_json(args.phi, "--phi"))
    space_report = validate_semimetric(space)
    phi_report = trifun.check_axioms(phi)
    violations = check_generalized_triangle(space, phi)
    payload = {
        "space": _plain(space_report),
        "phi_axioms": _plain(phi_report),
        "triangle": {
            "passed": not violations,
            "violation_count": len(violations),
            "violations": _plain(violations[:MAX_LISTED_VIOLATIONS]),
        },
        "minimal_b": _plain(minimal_b_constant(space))
        if isinstance(space, FiniteSemimetricSpace)
        else None,
    }
    ok = space_report.passed and phi_report.passed and not violations
    return CommandResult("validate", "ok" if ok else "violation", payload), None


def _cmd_classify(args, parser):
    _require(parser, args, ("space", "map", "phi", "kind"))
    space = _load_space(args.space)
    mapping = _load_map(args.map)
    mapping.validate_for(space)
    phi = TriangleFunctionSpec.from_json(_inline_json(args.phi, "--phi"))
    kind = ContractionKind.from_json(_inline_json(args.kind, "--kind"))
    certificate = verify_contraction(space, mapping, kind)
    record = applicability(kind, phi)
    factor = step_contraction_factor(kind, phi)
    payload = {
        "certificate": {
            "kind": kind.to_json(),
            "scope": certificate.scope,
            "passed": certificate.passed,
            "margin": _plain(certificate.margin),
            "witness": _plain(certificate.witness),
            "violation_count": len(certificate.violations),
            "violations": _plain(certificate.violations[:MAX_LISTED_VIOLATIONS]),
        },
        "applicability": _plain(record),
        "step_factor": _plain(factor),
    }
    if not certificate.passed:
        status = "violation"
    elif not record.applicable:
        status = "not-applicable"
    else:
        status = "ok"
    return CommandResult("classify", status, payload), None


def _cmd_iterate(args, parser):
    _require(parser, args, ("space", "map", "x0"))
    space = _load_space(args.space)
    mapping = _load_map(args.map)
    x0 = _parse_x0(space, args.x0)
    trace = solver.picard_iterate(
        space,
        mapping,
        x0,
        max_iter=args.max_iter if args.max_iter is not None else solver.MAX_ITER_DEFAULT,
        tol=args.tol if args.tol is not None else solver.STEP_TOL_DEFAULT,
    )
    status = "ok" if trace.stop_reason == "converged" else "violation"
    csv_text = trace.to_csv() if args.format == "csv" else None
    return CommandResult("iterate", status, _plain(trace.to_json())), csv_text


def _cmd_bounds(args, parser):
    _require(parser, args, ("space", "map", "phi", "kind", "x0"))
    space = _load_space(args.space)
    mapping = _load_map(args.map)
    phi = TriangleFunctionSpec.from_json(_inline_json(args.phi, "--phi"))
    kind = ContractionKind.from_json(_inline_json(args.kind, "--kind"))
    x0 = _parse_x0(space, args.x0)
    factor = step_contraction_factor(kind, phi)
    if not factor.derivable:
        payload = {"reason": factor.reason, "step_factor": _plain(factor)}
        return CommandResult("bounds", "not-applicable", payload), None
    trace = solver.picard_iterate(
        space,
        mapping,
        x0,
        max_iter=args.max_iter if args.max_iter is not None else solver.MAX_ITER_DEFAULT,
        tol=args.tol if args.tol is not None else solver.STEP_TOL_DEFAULT,
    )
    if isinstance(space, FiniteSemimetricSpace):
        fixed = solver.brute_force_fixed_points(space, mapping)
        if len(fixed) != 1:
            payload = {
                "reason": f"oracle found {len(fixed)} fixed points; bound needs exactly one",
                "fixed_points": [space.labels[i] for i in fixed],
            }
            return CommandResult("bounds", "not-applicable", payload), None
        target = fixed[0]
    else:
        if trace.stop_reason != "converged":
            payload = {
                "reason": f"orbit stopped with {trace.stop_reason}; no limit to audit against",
            }
            return CommandResult("bounds", "not-applicable", payload), None
        target = trace.points[-1]
    try:
        report = solver.verify_bound(trace, phi, factor.value, target)
    except solver.BoundUnavailable as exc:
        return CommandResult("bounds", "not-applicable", {"reason": str(exc)}), None
    payload = _plain(report.to_json())
    payload["stop_reason"] = trace.stop_reason
    status = "ok" if report.passed else "violation"
    csv_text = report.to_csv() if args.format == "csv" else None
    return CommandResult("bounds", status, payload), csv_text


def _cmd_search(args, parser):
    _require(parser, args, ("phi", "kind", "budget"))
    phi = TriangleFunctionSpec.from_json(_inline_json(args.phi, "--phi"))
    kind = ContractionKind.from_json(_inline_json(args.kind, "--kind"))
    config = SearchConfig(phi=phi, kind=kind, budget=args.budget, seed=_resolve_seed(args))
    result = counterexample_search(config)
    return CommandResult("search", "ok", _plain(result.to_json())), None


_HANDLERS = {
    "validate": _cmd_validate,
    "classify": _cmd_classify,
    "iterate": _cmd_iterate,
    "bounds": _cmd_bounds,
    "search": _cmd_search,
}


def _execute(argv) -> tuple[CommandResult, str | None]:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format == "csv" and args.command not in ("iterate", "bounds"):
        parser.error("--format csv is only available for iterate and bounds")
    try:
        return _HANDLERS[args.command](args, parser)
    except (ValueError, RuntimeError, OSError) as exc:
        payload = {"error": f"{type(exc).__name__}: {exc}"}
        return CommandResult(args.command, "error", payload), None


def run_command(argv) -> CommandResult:
    """Parse argv and run the named command, returning the result envelope."""
    return _execute(argv)[0]


def main(argv=None) -> int:
    result, csv_text = _execute(argv)
    if result.status == "error":
        print(json.dumps(result.to_json(), indent=2, sort_keys=True), file=sys.stderr)
    elif csv_text is not None:
        print(csv_text)
    else:
        print(json.dumps(result.to_json(), indent=2, sort_keys=True))
    return EXIT_CODES[result.status]


if __name__ == "__main__":
    sys.exit(main())
