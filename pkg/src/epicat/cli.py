"""Command-line front end: ``epicat <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import canonical, formats, harness, metrics
from .errors import EpicatError
from .relations import compatibility_closure
from .semantics import Evaluator, Model, interpret
from .syntax import Dialect, parse_formula, parse_sequent, parse_sequent_lines, print_formula

log = logging.getLogger("epicat")


def _emit(args, data: dict, text: str) -> None:
    if args.json:
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        print(text)


def _load_model(args) -> Model:
    if not args.relation:
        return formats.load_model(args.model, repair=args.repair_relations)
    # extra agents come from separate files of [object, feature] pairs
    if str(args.model).lower().endswith(".cxt"):
        data = formats.context_to_dict(formats.load_context(args.model))
    else:
        data = formats.load_json(args.model)
    data = dict(data, agents=dict(data.get("agents") or {}))
    for item in args.relation:
        agent, sep, path = item.partition("=")
        if not sep or not agent:
            raise EpicatError(f"--relation expects AGENT=FILE, got {item!r}")
        data["agents"][agent] = formats.load_json(path)
    return formats.model_from_dict(data, repair=args.repair_relations)


def _formula(args, M: Model, text: str):
    return parse_formula(text, args.dialect, agents=M.frame.agents)


def _concept_dict(M: Model, c) -> dict:
    ctx = M.context
    return {"extent": ctx.object_names(c.extent), "intent": ctx.feature_names(c.intent)}


def cmd_concepts(args) -> int:
    ctx = formats.load_context(args.context)
    if args.dot:
        print(formats.concepts_dot(ctx), end="")
        return 0
    rep = formats.concepts_report(ctx)
    lines = [f"{len(rep['concepts'])} concepts"]
    for k, c in enumerate(rep["concepts"]):
        lines.append(f"  c{k}: {{{', '.join(c['extent'])}}} / {{{', '.join(c['intent'])}}}")
    lines.append(f"{len(rep['covers'])} cover edges")
    lines += [f"  c{i} < c{j}" for i, j in rep["covers"]]
    _emit(args, rep, "\n".join(lines))
    return 0


def cmd_eval(args) -> int:
    M = _load_model(args)
    f = _formula(args, M, args.formula)
    d = _concept_dict(M, interpret(M, f))
    d["formula"] = print_formula(f)
    _emit(args, d, f"extent: {{{', '.join(d['extent'])}}}\nintent: {{{', '.join(d['intent'])}}}")
    return 0


def cmd_check(args) -> int:
    M = _load_model(args)
    text = Path(args.sequents).read_text()
    ev = Evaluator(M)
    results = [
        {"line": n, "sequent": str(s), "holds": ev.holds(s)}
        for n, s in parse_sequent_lines(text, args.dialect, agents=M.frame.agents)
    ]
    _emit(args, {"results": results},
          "\n".join(f"{r['line']}: {r['sequent']}: {str(r['holds']).lower()}" for r in results))
    return 0


def cmd_metric(args) -> int:
    M = _load_model(args)
    F = lambda t: _formula(args, M, t)  # noqa: E731
    name, rest = args.metric, args.args
    ctx = M.context
    need = {"typical-members": 1, "rank": 2, "closer": 4, "max-contrast": 1,
            "contrast-geq": 2, "no-leniency": 1, "leniency-geq": 2}
    if name not in need:
        raise EpicatError(f"unknown metric {name!r}; choose from {', '.join(need)}")
    if len(rest) != need[name]:
        raise EpicatError(f"metric {name!r} takes {need[name]} argument(s), got {len(rest)}")
    mode = metrics.DistanceMode(args.mode)
    record: dict = {"metric": name, "inputs": list(rest)}
    if name == "typical-members":
        record["verdict"] = ctx.object_names(metrics.typical_members(M, F(rest[0])))
    elif name == "rank":
        rank = metrics.atypicality_rank(M, rest[0], F(rest[1]), cumulative=not args.exact_length)
        record["verdict"] = metrics.rank_label(rank)
    elif name == "closer":
        record["mode"] = mode.value
        record["verdict"] = metrics.closer(M, *map(F, rest), mode=mode)
    elif name == "max-contrast":
        record["verdict"] = metrics.max_contrast(M, F(rest[0]))
    elif name == "contrast-geq":
        record["mode"] = mode.value
        record["verdict"] = metrics.contrast_geq(M, F(rest[0]), F(rest[1]), mode)
    elif name == "no-leniency":
        w = metrics.no_leniency_witness(M, F(rest[0]))
        record["verdict"] = w is None
        if w is not None:
            record["witness"] = {"psi": _concept_dict(M, w[0]), "chi": _concept_dict(M, w[1])}
    elif name == "leniency-geq":
        w = metrics.leniency_geq_witness(M, F(rest[0]), F(rest[1]))
        record["verdict"] = w is None
        if w is not None:
            record["witness"] = {"object": w}
    print(json.dumps(record, indent=2 if args.json else None, ensure_ascii=False))
    return 0


def cmd_fuzz(args) -> int:
    cfg = harness.FuzzConfig(
        seed=args.seed, num_models=args.num_models, instantiations=args.instantiations,
        max_objects=args.max_objects, max_features=args.max_features, max_agents=args.max_agents,
        formula_depth=args.depth, common=not args.no_common,
    )
    rep = harness.soundness_fuzz(cfg)
    d = rep.to_dict(timing=args.timing)
    checks = sum(rep.checks.values())
    _emit(args, d, f"models: {rep.models}\nchecks: {checks}\nviolations: {len(rep.violations)}")
    return 0


def cmd_search(args) -> int:
    s = parse_sequent(args.sequent, args.dialect)
    bounds = harness.SearchBounds(args.max_objects, args.max_features, args.max_agents, args.max_models)
    rep = harness.countermodel_search(s, bounds, force=args.force)
    d = rep.to_dict(timing=args.timing)
    if args.witness_out and rep.witness is not None:
        Path(args.witness_out).write_text(formats.dumps(d["witness"]) + "\n")
    text = f"{rep.verdict.value} ({rep.models_examined} models, {rep.contexts_examined} contexts)"
    if rep.witness is not None and not args.json:
        text += "\n" + formats.dumps(d["witness"])
    _emit(args, d, text)
    return 0


def cmd_canonical(args) -> int:
    if args.sweep:
        chosen, rep = canonical.select_convention(args.max_size, args.depth, args.atoms)
        text = (f"with improper filters/ideals: {rep['with_improper']['violation_count']} violations\n"
                f"proper only: {rep['proper_only']['violation_count']} violations\n"
                f"selected: {'include' if chosen else 'exclude'} improper")
        _emit(args, rep, text)
        return 0
    L = canonical.FiniteModalLattice.from_dict(formats.load_json(args.lattice))
    include = not args.proper_only
    assignment = {}
    for item in args.assign or []:
        p, _, e = item.partition("=")
        if e not in L.elements:
            raise EpicatError(f"--assign {item!r}: unknown lattice element {e!r}")
        assignment[p] = L.elements.index(e)
    if not assignment:
        assignment = {"p": L.top}
    cf = canonical.canonical_context(L, include)
    rep = canonical.truth_lemma_check(L, assignment, args.depth, cf=cf)
    d = {
        "filters": list(cf.context.objects),
        "ideals": list(cf.context.features),
        "include_improper": include,
        "formulas_checked": rep.formulas_checked,
        "violations": rep.violations,
    }
    _emit(args, d, f"{len(cf.filters)} filters, {len(cf.ideals)} ideals\n"
                   f"truth lemma: {rep.formulas_checked} formulas, {len(rep.violations)} violations")
    return 0


def cmd_closure(args) -> int:
    data = formats.load_json(args.model)
    ctx = formats.context_from_dict(data)
    out = dict(data)
    out["agents"] = {}
    for agent, pairs in (data.get("agents") or {}).items():
        R = formats._relation_from_names(ctx, pairs, f"agents.{agent}")
        out["agents"][agent] = formats._pairs_to_names(ctx, compatibility_closure(ctx, R))
    print(formats.dumps(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--dialect", type=Dialect, choices=list(Dialect), default=Dialect.LCH,
                        metavar="{L,LC,LH,LCH}")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="repair_relations", action="store_false", default=False,
                      help="reject relations that are not I-compatible (default)")
    mode.add_argument("--repair-relations", dest="repair_relations", action="store_true",
                      help="replace incompatible relations by their compatibility closure")
    common.add_argument("--relation", action="append", metavar="AGENT=FILE",
                        help="add an agent relation from a JSON list of [object, feature] pairs")
    common.add_argument("--timing", action="store_true", help="include elapsed times in reports")

    p = argparse.ArgumentParser(prog="epicat", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("concepts", parents=[common], help="list concepts and covers of a context")
    s.add_argument("context")
    s.add_argument("--dot", action="store_true", help="print the concept lattice in DOT")
    s.set_defaults(func=cmd_concepts)

    s = sub.add_parser("eval", parents=[common], help="evaluate a formula to a concept")
    s.add_argument("model")
    s.add_argument("formula")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("check", parents=[common], help="check each sequent of a .seq file")
    s.add_argument("model")
    s.add_argument("sequents")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("metric", parents=[common], help="categorization metrics")
    s.add_argument("model")
    s.add_argument("metric")
    s.add_argument("args", nargs="*")
    s.add_argument("--mode", choices=[m.value for m in metrics.DistanceMode], default="join")
    s.add_argument("--exact-length", action="store_true",
                   help="rank approximants over sequences of one length only")
    s.set_defaults(func=cmd_metric)

    bounds = argparse.ArgumentParser(add_help=False)
    bounds.add_argument("--max-objects", type=int, default=None)
    bounds.add_argument("--max-features", type=int, default=None)
    bounds.add_argument("--max-agents", type=int, default=2)
    bounds.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("fuzz", parents=[common, bounds], help="axiom and rule soundness fuzzing")
    s.add_argument("--num-models", type=int, default=500)
    s.add_argument("--instantiations", type=int, default=50)
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--no-common", action="store_true", help="basic language only")
    s.set_defaults(func=cmd_fuzz, default_size=4)

    s = sub.add_parser("search", parents=[common, bounds], help="bounded countermodel search")
    s.add_argument("sequent")
    s.add_argument("--max-models", type=int, default=harness.SearchBounds.max_models)
    s.add_argument("--force", action="store_true", help="skip the search-size refusal")
    s.add_argument("--witness-out", help="write the countermodel (model JSON) here")
    s.set_defaults(func=cmd_search, default_size=3)

    s = sub.add_parser("canonical", parents=[common], help="canonical context and truth-lemma check")
    s.add_argument("lattice", nargs="?")
    s.add_argument("--assign", action="append", metavar="ATOM=ELEMENT")
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--proper-only", action="store_true", help="exclude improper filters and ideals")
    s.add_argument("--sweep", action="store_true", help="exhaustive sweep over small lattices")
    s.add_argument("--max-size", type=int, default=4)
    s.add_argument("--atoms", type=int, default=2)
    s.set_defaults(func=cmd_canonical)

    s = sub.add_parser("closure", parents=[common], help="replace agent relations by their compatibility closure")
    s.add_argument("model")
    s.set_defaults(func=cmd_closure)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="epicat: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("max_objects", "max_features"):
        if hasattr(args, name) and getattr(args, name) is None:
            setattr(args, name, args.default_size)
    if args.command == "canonical" and not args.sweep and not args.lattice:
        parser.error("canonical needs a lattice file unless --sweep is given")
    try:
        return args.func(args)
    except (EpicatError, ValueError, OSError) as e:
        print(f"epicat: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
