"""Reading and writing contexts (Burmeister CXT, JSON) and models (JSON)."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .context import (
    FormalConcept,
    FormalContext,
    Relation,
    all_concepts,
    concept_covers,
    down,
    extent_closure,
    up,
)
from .errors import ContractError, NotAConceptError, ParseError
from .semantics import EnrichedContext, Model, Valuation


# ------------------------------------------------------------------ CXT

def parse_cxt(text: str) -> FormalContext:
    lines = text.splitlines()
    pos = 0

    def next_line(what: str, skip_blank: bool = True) -> str:
        nonlocal pos
        while skip_blank and pos < len(lines) and not lines[pos].strip():
            pos += 1
        if pos >= len(lines):
            raise ParseError(f"unexpected end of file, expected {what}", line=pos + 1)
        pos += 1
        return lines[pos - 1].strip()

    if not lines or lines[0].strip() != "B":
        raise ParseError("CXT file must start with 'B'", line=1)
    pos = 1
    # optional context name line directly after the header
    if pos < len(lines) and lines[pos].strip() and not lines[pos].strip().isdigit():
        pos += 1
    counts = []
    for what in ("object count", "feature count"):
        s = next_line(what)
        if not s.isdigit():
            raise ParseError(f"expected {what}, found {s!r}", line=pos)
        counts.append(int(s))
    n, m = counts
    objects = [next_line("object name") for _ in range(n)]
    features = [next_line("feature name") for _ in range(m)]
    rows = []
    for a in range(n):
        s = next_line(f"incidence row for {objects[a]!r}")
        if len(s) != m or set(s) - set(".Xx"):
            raise ParseError(f"incidence row must be {m} characters of '.'/'X', found {s!r}", line=pos)
        rows.append([ch in "Xx" for ch in s])
    rest = [i + 1 for i in range(pos, len(lines)) if lines[i].strip()]
    if rest:
        raise ParseError("trailing content after incidence rows", line=rest[0])
    try:
        return FormalContext(tuple(objects), tuple(features), Relation.from_matrix(rows, m))
    except ContractError as e:
        raise ParseError(str(e), line=1) from None


def format_cxt(ctx: FormalContext) -> str:
    out = ["B", "", str(ctx.n_objects), str(ctx.n_features), ""]
    out += list(ctx.objects) + list(ctx.features)
    for r in ctx.incidence.rows:
        out.append("".join("X" if r >> x & 1 else "." for x in range(ctx.n_features)))
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------- JSON

def _pairs_to_names(ctx: FormalContext, R: Relation) -> list[list[str]]:
    return [[ctx.objects[a], ctx.features[x]] for a, x in R.pairs()]


def _relation_from_names(ctx: FormalContext, pairs: Any, where: str) -> Relation:
    if not isinstance(pairs, list):
        raise ParseError(f"{where} must be a list of [object, feature] pairs")
    out = []
    for p in pairs:
        if not (isinstance(p, list) and len(p) == 2):
            raise ParseError(f"{where}: malformed pair {p!r}")
        out.append((ctx.object_index(p[0]), ctx.feature_index(p[1])))
    return Relation.from_pairs(ctx.n_objects, ctx.n_features, out)


def context_from_dict(data: dict) -> FormalContext:
    try:
        objects = data["objects"]
        features = data["features"]
    except (KeyError, TypeError):
        raise ParseError("context JSON needs 'objects' and 'features'") from None
    ctx = FormalContext(tuple(objects), tuple(features), Relation.empty(len(objects), len(features)))
    R = _relation_from_names(ctx, data.get("incidence", []), "incidence")
    return FormalContext(ctx.objects, ctx.features, R)


def context_to_dict(ctx: FormalContext) -> dict:
    return {
        "objects": list(ctx.objects),
        "features": list(ctx.features),
        "incidence": _pairs_to_names(ctx, ctx.incidence),
    }


def model_from_dict(data: dict, repair: bool = False) -> Model:
    """Load a model document; see the README for the schema.

    Atom extents that are not Galois-stable are rejected with the closure
    suggested; relation compatibility follows ``repair``.
    """
    ctx = context_from_dict(data)
    rels = {
        agent: _relation_from_names(ctx, pairs, f"agents.{agent}")
        for agent, pairs in (data.get("agents") or {}).items()
    }
    frame = EnrichedContext.repaired(ctx, rels) if repair else EnrichedContext(ctx, rels)
    val = data.get("valuation") or {}
    atoms = {}
    for p, spec in (val.get("atoms") or {}).items():
        if isinstance(spec, dict) and "extent" in spec:
            B = ctx.object_set(spec["extent"])
        elif isinstance(spec, dict) and "intent" in spec:
            B = down(ctx, ctx.feature_set(spec["intent"]))
        else:
            raise ParseError(f"atom {p!r} needs an 'extent' (or 'intent') list")
        closed = extent_closure(ctx, B)
        if closed != B:
            raise NotAConceptError(
                f"extent of atom {p!r} is not Galois-stable; its closure is {ctx.object_names(closed)}"
            )
        atoms[p] = FormalConcept(B, up(ctx, B))
    return Model(frame, Valuation(atoms, dict(val.get("nominals") or {}), dict(val.get("conominals") or {})))


def model_to_dict(M: Model) -> dict:
    ctx = M.context
    d = context_to_dict(ctx)
    d["agents"] = {i: _pairs_to_names(ctx, M.frame.relations[i]) for i in sorted(M.frame.relations)}
    d["valuation"] = {
        "atoms": {p: {"extent": ctx.object_names(c.extent)} for p, c in sorted(M.valuation.atoms.items())},
        "nominals": dict(sorted(M.valuation.nominals.items())),
        "conominals": dict(sorted(M.valuation.conominals.items())),
    }
    return d


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=False, ensure_ascii=False)


def load_json(path: str | Path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e.msg}", position=e.colno, line=e.lineno) from None


def load_context(path: str | Path) -> FormalContext:
    """Load a context from a ``.cxt`` or JSON file (models are accepted too)."""
    text = Path(path).read_text()
    if str(path).lower().endswith(".cxt") or text.lstrip().startswith("B"):
        return parse_cxt(text)
    return context_from_dict(load_json(path))


def load_model(path: str | Path, repair: bool = False) -> Model:
    if str(path).lower().endswith(".cxt"):
        return Model(EnrichedContext(parse_cxt(Path(path).read_text()), {}))
    return model_from_dict(load_json(path), repair=repair)


def concepts_report(ctx: FormalContext) -> dict:
    concepts = all_concepts(ctx)
    return {
        "concepts": [
            {"extent": ctx.object_names(c.extent), "intent": ctx.feature_names(c.intent)} for c in concepts
        ],
        "covers": [list(p) for p in concept_covers(concepts)],
    }


def concepts_dot(ctx: FormalContext) -> str:
    concepts = all_concepts(ctx)
    lines = ["digraph concepts {", "  rankdir=BT;"]
    for k, c in enumerate(concepts):
        label = "{%s} / {%s}" % (", ".join(ctx.object_names(c.extent)), ", ".join(ctx.feature_names(c.intent)))
        lines.append(f'  c{k} [label="{label}"];')
    for i, j in concept_covers(concepts):
        lines.append(f"  c{i} -> c{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"

