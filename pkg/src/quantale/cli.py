"""Command-line front end.

JSON results go to standard out, human-readable diagnostics to standard
error.  Exit codes: 0 success, 1 input diagnostics, 2 evaluation errors.
Identical invocations (including seed) produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import engine as _engine
from . import rsa as _rsa
from .dsl import parse_prop, parse_scenario, parse_world
from .errors import (
    AllFalse,
    DslParseError,
    ExplosionGuard,
    NoViableUtterance,
    PreciseQuantifierInFastPath,
    QuantaleError,
    ValidationFailed,
)
from .model import LiftScheme
from .quant import QuantifierKind, shape_value
from .scope import validate

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_EVALUATION = 2


def _emit(document) -> None:
    sys.stdout.write(json.dumps(document, sort_keys=True) + "\n")


def _diag_json(diagnostics):
    out = []
    for d in diagnostics:
        if isinstance(d, str):
            out.append({"message": d, "severity": "error"})
        else:
            out.append(
                {
                    "severity": d.severity,
                    "message": d.message,
                    "line": d.line,
                    "column": d.column,
                    "snippet": d.snippet,
                }
            )
    return out


def _load_inputs(args):
    world_text = Path(args.world).read_text()
    prop_text = Path(args.prop).read_text()
    model, lexicon = parse_world(world_text)
    graph = parse_prop(prop_text)
    return model, lexicon, graph


def _default_seed(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QUANTALE_SEED")
    return int(env) if env is not None else None


def cmd_eval(args) -> int:
    try:
        model, lexicon, graph = _load_inputs(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except DslParseError as exc:
        for d in exc.diagnostics:
            print(str(d), file=sys.stderr)
        _emit({"diagnostics": _diag_json(exc.diagnostics)})
        return EXIT_DIAGNOSTICS

    limits = _engine.EngineLimits(
        config_cap=args.cap_configs, vague_node_cap=args.cap_vague_nodes
    )
    scheme = LiftScheme(args.scheme)
    if args.engine in ("naive", "generic-fast") and args.scheme_given:
        print(
            f"warning: --scheme is ignored by the {args.engine} engine",
            file=sys.stderr,
        )
    try:
        if args.engine == "naive":
            result = _engine.eval_naive(graph, model, lexicon)
        elif args.engine == "exact":
            result = _engine.eval_exact(graph, model, lexicon, scheme, limits)
        elif args.engine == "generic-fast":
            result = _engine.eval_generic_fast(graph, model, lexicon)
        else:
            seed = _default_seed(args)
            if args.samples is None or seed is None:
                print(
                    "error: the mc engine requires --samples and --seed "
                    "(or QUANTALE_SEED)",
                    file=sys.stderr,
                )
                return EXIT_EVALUATION
            result = _engine.eval_mc(
                graph, model, lexicon, scheme, samples=args.samples, seed=seed,
                limits=limits,
            )
    except ValidationFailed as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        _emit({"diagnostics": _diag_json(exc.diagnostics)})
        return EXIT_DIAGNOSTICS
    except (ExplosionGuard, PreciseQuantifierInFastPath) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EVALUATION

    document = {"probability": result.probability, "engine": result.engine}
    if result.engine in ("exact", "mc"):
        document["scheme"] = scheme.value
    if result.ci is not None:
        document["ci"] = list(result.ci)
    if result.samples is not None:
        document["samples"] = result.samples
    if result.seed is not None:
        document["seed"] = result.seed
    if args.output == "csv":
        keys = sorted(document)
        sys.stdout.write(",".join(keys) + "\n")
        sys.stdout.write(",".join(json.dumps(document[k]) for k in keys) + "\n")
    else:
        _emit(document)
    return EXIT_OK


def cmd_curve(args) -> int:
    try:
        kind = QuantifierKind(args.kind)
    except ValueError:
        print(f"error: unknown quantifier kind {args.kind!r}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    if args.points < 2:
        print("error: --points must be at least 2", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    sys.stdout.write("ratio,value\n")
    for i in range(args.points):
        ratio = i / (args.points - 1)
        sys.stdout.write(f"{ratio!r},{shape_value(kind, ratio)!r}\n")
    return EXIT_OK


def cmd_rsa(args) -> int:
    path = Path(args.scenario)
    try:
        scenario = parse_scenario(path.read_text(), base_dir=path.parent)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except DslParseError as exc:
        for d in exc.diagnostics:
            print(str(d), file=sys.stderr)
        _emit({"diagnostics": _diag_json(exc.diagnostics)})
        return EXIT_DIAGNOSTICS

    try:
        if args.agent == "l0":
            if args.utterance is None:
                print("error: --utterance is required for l0", file=sys.stderr)
                return EXIT_EVALUATION
            dist = _rsa.literal_listener(scenario, args.utterance)
            support = [s.id for s in scenario.states]
        elif args.agent == "s1":
            if args.state is None:
                print("error: --state is required for s1", file=sys.stderr)
                return EXIT_EVALUATION
            dist = _rsa.pragmatic_speaker(scenario, args.state)
            support = [u.id for u in scenario.utterances]
        else:
            if args.utterance is None:
                print("error: --utterance is required for l1", file=sys.stderr)
                return EXIT_EVALUATION
            dist = _rsa.pragmatic_listener(scenario, args.utterance)
            support = [s.id for s in scenario.states]
    except (AllFalse, NoViableUtterance) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EVALUATION
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_DIAGNOSTICS

    document = {"support": support, "probs": [dist.get(s, 0.0) for s in support]}
    if args.verbose:
        document["meanings"] = _rsa.meaning_matrix(scenario)
    _emit(document)
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        model, lexicon, graph = _load_inputs(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except DslParseError as exc:
        for d in exc.diagnostics:
            print(str(d), file=sys.stderr)
        _emit(_diag_json(exc.diagnostics))
        return EXIT_DIAGNOSTICS
    diagnostics = validate(graph, model, lexicon)
    _emit(_diag_json(diagnostics))
    if diagnostics:
        for d in diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantale",
        description="Evaluate probabilistic quantified propositions over "
        "finite pixie-space worlds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a proposition in a world")
    p_eval.add_argument("--world", required=True)
    p_eval.add_argument("--prop", required=True)
    p_eval.add_argument(
        "--engine", choices=["naive", "exact", "mc", "generic-fast"], default="exact"
    )
    p_eval.add_argument(
        "--scheme", choices=["independent", "coupled-threshold"], default=None
    )
    p_eval.add_argument("--samples", type=int, default=None)
    p_eval.add_argument("--seed", type=int, default=None)
    p_eval.add_argument("--output", choices=["json", "csv"], default="json")
    p_eval.add_argument("--cap-configs", type=int, default=_engine.DEFAULT_CONFIG_CAP)
    p_eval.add_argument(
        "--cap-vague-nodes", type=int, default=_engine.DEFAULT_VAGUE_NODE_CAP
    )
    p_eval.set_defaults(func=cmd_eval)

    p_curve = sub.add_parser("curve", help="emit a quantifier shape as CSV")
    p_curve.add_argument("--kind", required=True)
    p_curve.add_argument("--points", type=int, required=True)
    p_curve.set_defaults(func=cmd_curve)

    p_rsa = sub.add_parser("rsa", help="run an RSA agent over a scenario")
    p_rsa.add_argument("--scenario", required=True)
    p_rsa.add_argument("--agent", choices=["l0", "s1", "l1"], required=True)
    p_rsa.add_argument("--utterance", default=None)
    p_rsa.add_argument("--state", default=None)
    p_rsa.add_argument("--verbose", action="store_true")
    p_rsa.set_defaults(func=cmd_rsa)

    p_check = sub.add_parser("check", help="parse and validate inputs")
    p_check.add_argument("--world", required=True)
    p_check.add_argument("--prop", required=True)
    p_check.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "scheme"):
        args.scheme_given = args.scheme is not None
        if args.scheme is None:
            args.scheme = "independent"
    try:
        return args.func(args)
    except QuantaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EVALUATION


if __name__ == "__main__":
    sys.exit(main())
