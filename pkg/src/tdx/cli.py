"""Command-line front end: file I/O, subcommand dispatch, deterministic output.

Exit codes: 0 success; 1 usage, parse, or validation error; 2 chase failure or
no solution; 3 the equivalence check returned false.  A path of ``-`` reads
stdin or writes stdout.  Setting TDX_COLOR=0 disables ANSI diagnostics.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .chase_abstract import chase_abstract
from .chase_concrete import Failure, chase_concrete
from .errors import InvalidHorizonError, TdxError
from .homomorphism import hom_equivalent
from .mapping_lang import Mapping, parse_mapping
from .model import (
    ABSTRACT,
    CONCRETE,
    Constant,
    Instance,
    IntervalNull,
    Value,
    dumps_instance,
    instance_to_json,
    loads_instance,
    max_finite_endpoint,
    normalize_instance,
    sem_instance,
)
from .query import NoSolution, answers_to_instance, certain_abstract, certain_concrete, naive_eval

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_SOLUTION = 2
EXIT_NOT_EQUIVALENT = 3


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _diag(message: str, *, error: bool = True) -> None:
    prefix = "error: " if error else ""
    if error and os.environ.get("TDX_COLOR", "1") != "0" and sys.stderr.isatty():
        prefix = f"\x1b[31m{prefix}\x1b[0m"
    sys.stderr.write(f"{prefix}{message}\n")


def _load_instance(path: str, kind: str | None = None) -> Instance:
    inst = loads_instance(_read_text(path))
    if kind is not None and inst.kind != kind:
        raise TdxError(f"{path}: expected a {kind} instance, got {inst.kind}")
    return inst


def _load_mapping(path: str) -> Mapping:
    return parse_mapping(_read_text(path))


def _value_doc(v: Value) -> object:
    if isinstance(v, Constant):
        return v.symbol
    if isinstance(v, IntervalNull):
        end = v.context.end if isinstance(v.context.end, int) else "inf"
        return {"null": v.label, "interval": {"start": v.context.start, "end": end}}
    return {"null": v.label, "time": v.context}


def _failure_text(failure: Failure) -> str:
    doc = {"failure": {
        "constants": list(failure.constants),
        "trace": [[_value_doc(x), _value_doc(y)] for x, y in failure.trace],
    }}
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _pick_horizon(given: int | None, *instances: Instance) -> int:
    endpoints = [max_finite_endpoint(inst) for inst in instances if inst.kind == CONCRETE]
    needed = max((e for e in endpoints if e is not None), default=0)
    if given is None:
        return needed + 1
    if given < needed:
        raise InvalidHorizonError(f"horizon {given} is below the largest finite endpoint {needed}")
    return given


def _cmd_normalize(args: argparse.Namespace) -> int:
    inst = _load_instance(args.input, CONCRETE)
    _write_text(args.output, dumps_instance(normalize_instance(inst)))
    return EXIT_OK


def _cmd_sem(args: argparse.Namespace) -> int:
    inst = _load_instance(args.input, CONCRETE)
    horizon = _pick_horizon(args.horizon, inst)
    doc = instance_to_json(sem_instance(inst, horizon))
    doc["horizon"] = horizon
    _write_text(args.output, json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    return EXIT_OK


def _run_chase(args: argparse.Namespace, kind: str) -> int:
    mapping = _load_mapping(args.mapping)
    src = _load_instance(args.input, kind)
    outcome = chase_concrete(src, mapping) if kind == CONCRETE else chase_abstract(src, mapping)
    if isinstance(outcome, Failure):
        _write_text(args.output, _failure_text(outcome))
        _diag(f"chase failed: {outcome.constants[0]} != {outcome.constants[1]}", error=False)
        return EXIT_NO_SOLUTION
    _write_text(args.output, dumps_instance(outcome.instance))
    return EXIT_OK


def _cmd_chase(args: argparse.Namespace) -> int:
    return _run_chase(args, CONCRETE)


def _cmd_achase(args: argparse.Namespace) -> int:
    return _run_chase(args, ABSTRACT)


def _find_query(mapping: Mapping, name: str):
    q = mapping.query(name)
    if q is None:
        known = ", ".join(sorted(u.name for u in mapping.queries)) or "none"
        raise TdxError(f"unknown query {name!r} (known queries: {known})")
    return q


def _cmd_query(args: argparse.Namespace) -> int:
    mapping = _load_mapping(args.mapping)
    inst = _load_instance(args.input)
    answers = naive_eval(_find_query(mapping, args.query), inst)
    _write_text(args.output, dumps_instance(answers_to_instance(answers)))
    return EXIT_OK


def _cmd_certain(args: argparse.Namespace) -> int:
    mapping = _load_mapping(args.mapping)
    src = _load_instance(args.input)
    q = _find_query(mapping, args.query)
    certain = certain_concrete if src.kind == CONCRETE else certain_abstract
    result = certain(q, src, mapping)
    if isinstance(result, NoSolution):
        _write_text(args.output, _failure_text(result.failure))
        _diag(f"no solution: {result.failure.constants[0]} != {result.failure.constants[1]}",
              error=False)
        return EXIT_NO_SOLUTION
    _write_text(args.output, dumps_instance(answers_to_instance(result)))
    return EXIT_OK


def _cmd_equiv(args: argparse.Namespace) -> int:
    a = _load_instance(args.a)
    b = _load_instance(args.b)
    horizon = _pick_horizon(args.horizon, a, b)
    if a.kind == CONCRETE:
        a = sem_instance(a, horizon)
    if b.kind == CONCRETE:
        b = sem_instance(b, horizon)
    if hom_equivalent(a, b):
        sys.stdout.write("equivalent\n")
        return EXIT_OK
    sys.stdout.write("not equivalent\n")
    return EXIT_NOT_EQUIVALENT


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdx",
        description="Temporal data exchange over concrete (interval) and abstract "
                    "(time-point) instances.")
    sub = parser.add_subparsers(dest="command", required=True)

    def io(p: argparse.ArgumentParser, mapping: bool = False, query: bool = False) -> None:
        if mapping:
            p.add_argument("-m", "--mapping", required=True, help="mapping file (.tdx)")
        p.add_argument("-i", "--input", required=True, help="input instance (JSON, '-' for stdin)")
        if query:
            p.add_argument("-q", "--query", required=True, help="query name from the mapping")
        p.add_argument("-o", "--output", required=True, help="output file ('-' for stdout)")

    p = sub.add_parser("normalize", help="split a concrete instance over its endpoint grid")
    io(p)
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("sem", help="expand a concrete instance into its abstract view")
    io(p)
    p.add_argument("--horizon", type=int, help="materialization bound (default: max endpoint + 1)")
    p.set_defaults(func=_cmd_sem)

    p = sub.add_parser("chase", help="chase a complete concrete source instance")
    io(p, mapping=True)
    p.set_defaults(func=_cmd_chase)

    p = sub.add_parser("achase", help="chase a complete abstract source instance")
    io(p, mapping=True)
    p.set_defaults(func=_cmd_achase)

    p = sub.add_parser("query", help="evaluate a named query naively on an instance")
    io(p, mapping=True, query=True)
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("certain", help="certain answers of a named query over a source")
    io(p, mapping=True, query=True)
    p.set_defaults(func=_cmd_certain)

    p = sub.add_parser("equiv", help="check homomorphic equivalence of two instances")
    p.add_argument("-a", required=True, help="first instance")
    p.add_argument("-b", required=True, help="second instance")
    p.add_argument("--horizon", type=int,
                   help="expansion bound for concrete inputs (default: max endpoint + 1)")
    p.set_defaults(func=_cmd_equiv)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    try:
        return args.func(args)
    except (TdxError, json.JSONDecodeError, OSError, ValueError) as exc:
        _diag(str(exc))
        return EXIT_ERROR


def main() -> None:
    raise SystemExit(run_cli())
