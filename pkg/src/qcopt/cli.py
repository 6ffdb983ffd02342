"""``qcopt`` command line.

Exit codes: 0 success, 1 infeasible problem, 2 invalid input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import BenchmarkConfig, run_budget_sweep
from .budget import solve_budget_opt
from .core import load_instance
from .costmin import solve_cost_min
from .errors import ConfigurationError, InfeasibleError, PreconditionError, QCOptError, ValidationError
from .quality import load_scores
from .tokenizer import default_vocabulary

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INVALID = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def _emit(payload: dict, report: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if report:
        Path(report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args):
    vocabs = None
    if getattr(args, "vocab", None):
        vocabs = {"cl100k_base": default_vocabulary(args.vocab)}
    try:
        inst = load_instance(args.instance, vocabs)
    except FileNotFoundError:
        raise ValidationError(f"{args.instance}: no such file") from None
    changes = {}
    for flag, key in (("budget", "budget"), ("latency_sla", "latency_sla"), ("quality_floor", "quality_floor")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[key] = value
    if getattr(args, "scores", None):
        changes["scores"] = load_scores(args.scores, inst)
    return inst.replace(**changes) if changes else inst


def _route(args) -> int:
    inst = _load(args)
    if args.problem == "budget-opt":
        if inst.budget is None:
            raise ValidationError("Budget-Opt needs --budget or a budget in the instance file")
        plan = solve_budget_opt(inst, repair=args.repair)
    else:
        if inst.quality_floor is None:
            raise ValidationError("Cost-Min needs --quality-floor or a quality_floor in the instance file")
        plan = solve_cost_min(inst, method=args.method)
    _emit(plan.to_dict(), args.report)
    if not plan.feasible:
        print(f"infeasible: {len(plan.unassigned_sections)} section(s) could not be placed", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _trim(args) -> int:
    from .tokenopt import HEURISTIC_IDS, compress_passage

    if args.input == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(args.input).read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ValidationError(f"{args.input}: no such file") from None
    disabled = {h.strip().upper() for h in args.disable.split(",") if h.strip()} if args.disable else set()
    unknown = disabled - set(HEURISTIC_IDS)
    if unknown:
        raise ValidationError(f"unknown heuristic(s): {', '.join(sorted(unknown))}")
    heuristics = [h for h in HEURISTIC_IDS if h not in disabled]
    if args.loss_budget < 0:
        raise ValidationError("--loss-budget must be >= 0")
    vocab = default_vocabulary(args.vocab)
    out, report = compress_passage(text, args.loss_budget, vocab, heuristics=heuristics)
    sys.stdout.write(out)
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    print(
        f"tokens {report.tokens_before} -> {report.tokens_after} "
        f"({100 * report.compression:.1f}% saved, loss {report.total_loss:.4f})",
        file=sys.stderr,
    )
    return EXIT_OK


def _bench(args) -> int:
    cfg = BenchmarkConfig(
        seed=args.seed,
        n_sections=args.n_sections,
        cascade_threshold=args.cascade_threshold,
        latency_sla=args.latency_sla,
        workers=args.workers,
        **({"budgets": tuple(args.budget)} if args.budget else {}),
    )
    report = run_budget_sweep(cfg)
    text = report.to_json()
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _validate(args) -> int:
    inst = _load(args)
    print(f"ok: {inst.n_sections} section(s), {inst.n_models} model(s)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcopt", description="Quality-aware LLM routing and token trimming.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def instance_flags(sp):
        sp.add_argument("--instance", required=True, help="instance JSON file")
        sp.add_argument("--scores", help="score file (JSON or CSV) overriding the instance scores")
        sp.add_argument("--latency-sla", type=float, dest="latency_sla")
        sp.add_argument("--vocab", help="cl100k-format vocabulary file for sections given as text")

    route = sub.add_parser("route", help="solve a routing problem")
    rsub = route.add_subparsers(dest="problem", required=True, parser_class=_Parser)
    bo = rsub.add_parser("budget-opt", help="maximize predicted quality within a budget")
    instance_flags(bo)
    bo.add_argument("--budget", type=float)
    bo.add_argument("--repair", action="store_true", help="demote sections until the budget holds")
    bo.add_argument("--report", help="write the plan here instead of stdout")
    cm = rsub.add_parser("cost-min", help="minimize cost subject to a quality floor")
    instance_flags(cm)
    cm.add_argument("--quality-floor", type=float, dest="quality_floor")
    cm.add_argument("--method", default="auto", choices=["auto", "greedy", "flow", "oracle", "heuristic"])
    cm.add_argument("--report")

    tr = sub.add_parser("trim", help="compress text with the token heuristics")
    tr.add_argument("--input", default="-", help="text file, or - for stdin")
    tr.add_argument("--loss-budget", type=float, default=0.05, dest="loss_budget")
    tr.add_argument("--disable", help="comma-separated heuristic ids to skip, e.g. RSW,LS")
    tr.add_argument("--vocab")
    tr.add_argument("--report", help="per-sentence JSON report")

    be = sub.add_parser("bench", help="synthetic budget sweep with baselines")
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--n-sections", type=int, default=80, dest="n_sections")
    be.add_argument("--budget", type=float, action="append", help="absolute budget (repeatable)")
    be.add_argument("--cascade-threshold", type=float, default=0.75, dest="cascade_threshold")
    be.add_argument("--latency-sla", type=float, dest="latency_sla")
    be.add_argument("--workers", type=int, default=1)
    be.add_argument("--report")

    va = sub.add_parser("validate", help="check an instance (and optional score file)")
    instance_flags(va)
    va.add_argument("--budget", type=float)
    va.add_argument("--quality-floor", type=float, dest="quality_floor")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"route": _route, "trim": _trim, "bench": _bench, "validate": _validate}[args.command]
    try:
        return handler(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValidationError, ConfigurationError, PreconditionError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except QCOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
