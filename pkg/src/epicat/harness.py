"""Random model generation, soundness fuzzing and bounded countermodel search."""

from __future__ import annotations

import enum
import itertools
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from .bits import full_mask
from .context import FormalConcept, FormalContext, Relation, all_concepts, concept_covers, is_stable_extent, is_stable_intent
from .errors import SearchBoundError
from .relations import compatibility_closure, is_compatible
from .semantics import EnrichedContext, Evaluator, Model, Valuation
from .syntax import (
    BOT,
    TOP,
    And,
    Atom,
    Box,
    Common,
    Conominal,
    Formula,
    Nominal,
    Or,
    Sequent,
    agents_of,
    atoms_of,
    conj,
    subformulas,
    substitute,
)

AGENT_NAMES = "ijklmnop"
ATOM_NAMES = "pqrstuvw"


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    num_models: int = 500
    instantiations: int = 50
    min_objects: int = 1
    max_objects: int = 4
    min_features: int = 1
    max_features: int = 4
    max_agents: int = 2
    formula_depth: int = 2
    num_atoms: int = 3
    common: bool = True

    def __post_init__(self):
        for name in ("num_models", "instantiations", "max_objects", "max_features",
                     "max_agents", "formula_depth", "num_atoms", "min_objects", "min_features"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.min_objects > self.max_objects or self.min_features > self.max_features:
            raise ValueError("minimum size exceeds maximum size")


# ------------------------------------------------------------- generators

def random_context(rng: random.Random, n_objects: int, n_features: int,
                   density: float | None = None) -> FormalContext:
    if density is None:
        density = rng.random()
    rows = tuple(
        sum(1 << x for x in range(n_features) if rng.random() < density) for _ in range(n_objects)
    )
    return FormalContext(
        tuple(f"a{k + 1}" for k in range(n_objects)),
        tuple(f"x{k + 1}" for k in range(n_features)),
        Relation(n_objects, n_features, rows),
    )


def random_compatible_relation(rng: random.Random, ctx: FormalContext,
                               density: float | None = None) -> Relation:
    """Compatibility closure of a random relation (sparse by default, as closure only adds pairs)."""
    if density is None:
        density = rng.random() * 0.5
    raw = random_context(rng, ctx.n_objects, ctx.n_features, density).incidence
    return compatibility_closure(ctx, raw)


def random_model(cfg: FuzzConfig, rng: random.Random) -> Model:
    n = rng.randint(cfg.min_objects, cfg.max_objects)
    m = rng.randint(cfg.min_features, cfg.max_features)
    ctx = random_context(rng, n, m)
    k = rng.randint(1, cfg.max_agents)
    rels = {AGENT_NAMES[j]: random_compatible_relation(rng, ctx) for j in range(k)}
    concepts = all_concepts(ctx)
    atoms = {ATOM_NAMES[j]: rng.choice(concepts) for j in range(cfg.num_atoms)}
    return Model(EnrichedContext(ctx, rels), Valuation(atoms))


def random_formula(rng: random.Random, depth: int, atoms: Sequence[str], agents: Sequence[str],
                   common: bool = True, nominals: Sequence[str] = (),
                   conominals: Sequence[str] = ()) -> Formula:
    leaves: list[Callable[[], Formula]] = [lambda: TOP, lambda: BOT]
    leaves += [lambda p=p: Atom(p) for p in atoms] * 2
    leaves += [lambda n=n: Nominal(n) for n in nominals]
    leaves += [lambda n=n: Conominal(n) for n in conominals]
    if depth <= 0 or rng.random() < 0.25:
        return rng.choice(leaves)()
    ops = ["and", "or", "box"] + (["common"] if common else [])
    op = rng.choice(ops)
    if op == "box" and not agents:
        op = "and"
    sub = lambda: random_formula(rng, depth - 1, atoms, agents, common, nominals, conominals)  # noqa: E731
    if op == "and":
        return And(sub(), sub())
    if op == "or":
        return Or(sub(), sub())
    if op == "box":
        return Box(rng.choice(list(agents)), sub())
    return Common(sub())


def lattice_shape(ctx: FormalContext) -> tuple:
    """Isomorphism-invariant fingerprint of the concept lattice."""
    concepts = all_concepts(ctx)
    covers = concept_covers(concepts)
    up_deg = Counter(i for i, _ in covers)
    down_deg = Counter(j for _, j in covers)
    return len(concepts), len(covers), tuple(sorted((up_deg[k], down_deg[k]) for k in range(len(concepts))))


# ------------------------------------------------------------------ fuzz

def axiom_instances(agents: Sequence[str], phi: Formula, psi: Formula, common: bool) -> list[tuple[str, Sequent]]:
    """Axioms of the basic logic (and of the common-knowledge logic) under p := phi, q := psi."""
    sub = {"p": phi, "q": psi}
    p, q = Atom("p"), Atom("q")
    out = [
        ("p|-p", Sequent(p, p)),
        ("bot|-p", Sequent(BOT, p)),
        ("p|-top", Sequent(p, TOP)),
        ("p|-p|q", Sequent(p, Or(p, q))),
        ("q|-p|q", Sequent(q, Or(p, q))),
        ("p&q|-p", Sequent(And(p, q), p)),
        ("p&q|-q", Sequent(And(p, q), q)),
    ]
    for i in agents:
        out.append((f"top|-[{i}]top", Sequent(TOP, Box(i, TOP))))
        out.append((f"[{i}]p&[{i}]q|-[{i}](p&q)", Sequent(And(Box(i, p), Box(i, q)), Box(i, And(p, q)))))
    if common:
        out.append(("top|-C(top)", Sequent(TOP, Common(TOP))))
        out.append(("C(p)&C(q)|-C(p&q)", Sequent(And(Common(p), Common(q)), Common(And(p, q)))))
        out.append(("C(p)|-/\\([i]p&[i]C(p))",
                    Sequent(Common(p), conj(And(Box(i, p), Box(i, Common(p))) for i in agents))))
    return [(name, Sequent(substitute(s.lhs, sub), substitute(s.rhs, sub))) for name, s in out]


@dataclass
class FuzzReport:
    config: FuzzConfig
    models: int = 0
    checks: Counter = field(default_factory=Counter)
    nonvacuous_rules: Counter = field(default_factory=Counter)
    violations: list[dict] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "seed": self.config.seed,
            "models": self.models,
            "instantiations": self.config.instantiations,
            "checks": dict(sorted(self.checks.items())),
            "nonvacuous_rule_applications": dict(sorted(self.nonvacuous_rules.items())),
            "violations": len(self.violations),
            "violation_samples": self.violations[:10],
        }
        if timing:
            d["elapsed"] = round(self.elapsed, 3)
        return d


def soundness_fuzz(cfg: FuzzConfig = FuzzConfig()) -> FuzzReport:
    """Check every axiom and rule of the logics on random compositional models."""
    from .formats import model_to_dict
    from .syntax import print_formula

    t0 = time.perf_counter()
    rng = random.Random(cfg.seed)
    report = FuzzReport(cfg)
    atoms = ATOM_NAMES[: cfg.num_atoms]

    for _ in range(cfg.num_models):
        M = random_model(cfg, rng)
        report.models += 1
        agents = M.frame.agents
        ev = Evaluator(M)
        concepts = None

        def violation(kind: str, *sequents: Sequent):
            report.violations.append({
                "schema": kind,
                "sequents": [f"{print_formula(s.lhs)} |- {print_formula(s.rhs)}" for s in sequents],
                "model": model_to_dict(M),
            })

        def rule(name: str, premises: Sequence[Sequent], conclusion: Sequent):
            report.checks[name] += 1
            if all(ev.holds(s) for s in premises):
                report.nonvacuous_rules[name] += 1
                if not ev.holds(conclusion):
                    violation(name, *premises, conclusion)

        for _ in range(cfg.instantiations):
            rf = lambda: random_formula(rng, cfg.formula_depth, atoms, agents, cfg.common)  # noqa: E731
            phi, psi, chi = rf(), rf(), rf()
            for name, s in axiom_instances(agents, phi, psi, cfg.common):
                report.checks[name] += 1
                if not ev.holds(s):
                    violation(name, s)
            i = rng.choice(agents)
            # mix random premises with premises that hold by construction
            weaker = Or(phi, chi) if rng.random() < 0.5 else psi
            stronger = And(phi, chi) if rng.random() < 0.5 else psi
            rule("cut", [Sequent(phi, chi), Sequent(chi, weaker)], Sequent(phi, weaker))
            rule("cut", [Sequent(stronger, phi), Sequent(phi, weaker)], Sequent(stronger, weaker))
            rule("meet-intro", [Sequent(chi, phi), Sequent(chi, psi)], Sequent(chi, And(phi, psi)))
            rule("meet-intro", [Sequent(stronger, phi), Sequent(stronger, chi)], Sequent(stronger, And(phi, chi)))
            rule("join-elim", [Sequent(phi, chi), Sequent(psi, chi)], Sequent(Or(phi, psi), chi))
            rule("join-elim", [Sequent(phi, weaker), Sequent(chi, weaker)], Sequent(Or(phi, chi), weaker))
            rule("box-mono", [Sequent(phi, weaker)], Sequent(Box(i, phi), Box(i, weaker)))
            rule("box-mono", [Sequent(stronger, psi)], Sequent(Box(i, stronger), Box(i, psi)))
            if cfg.common:
                rule("C-mono", [Sequent(phi, weaker)], Sequent(Common(phi), Common(weaker)))
                rule("C-mono", [Sequent(stronger, psi)], Sequent(Common(stronger), Common(psi)))
                # induction: chi ranges over every concept, named by a fresh atom
                if concepts is None:
                    concepts = all_concepts(M.context)
                hyp = Atom("_chi")
                for c in concepts:
                    ev_c = Evaluator(M.with_atom("_chi", c))
                    report.checks["C-induction"] += 1
                    if ev_c.holds(Sequent(hyp, conj(Box(j, phi) for j in agents))) and \
                            ev_c.holds(Sequent(hyp, conj(Box(j, hyp) for j in agents))):
                        report.nonvacuous_rules["C-induction"] += 1
                        if not ev_c.holds(Sequent(hyp, Common(phi))):
                            violation("C-induction", Sequent(hyp, Common(phi)))
    report.elapsed = time.perf_counter() - t0
    return report


# --------------------------------------------------------------- search

class Verdict(enum.Enum):
    VALID_UP_TO_BOUND = "VALID_UP_TO_BOUND"
    COUNTERMODEL = "COUNTERMODEL"


@dataclass(frozen=True)
class SearchBounds:
    max_objects: int = 3
    max_features: int = 3
    max_agents: int = 2
    max_models: int = 3_000_000

    def __post_init__(self):
        if min(self.max_objects, self.max_features, self.max_agents) < 1:
            raise ValueError("search bounds must be >= 1")


@dataclass
class SearchReport:
    sequent: Sequent
    verdict: Verdict
    witness: Model | None = None
    contexts_examined: int = 0
    models_examined: int = 0
    elapsed: float = 0.0

    def to_dict(self, timing: bool = False) -> dict:
        from .formats import model_to_dict

        d = {
            "sequent": str(self.sequent),
            "verdict": self.verdict.value,
            "witness": model_to_dict(self.witness) if self.witness is not None else None,
            "contexts_examined": self.contexts_examined,
            "models_examined": self.models_examined,
        }
        if timing:
            d["elapsed"] = round(self.elapsed, 3)
        return d


def _canonical_rows(rows: tuple[int, ...], m: int) -> tuple[int, ...]:
    """Lexicographically least row tuple under feature and object permutations."""
    best = None
    for perm in itertools.permutations(range(m)):
        permuted = tuple(sorted(sum(((r >> perm[x]) & 1) << x for x in range(m)) for r in rows))
        if best is None or permuted < best:
            best = permuted
    return best


def _make_context(rows: Sequence[int], n: int, m: int) -> FormalContext:
    return FormalContext(
        tuple(f"a{k + 1}" for k in range(n)),
        tuple(f"x{k + 1}" for k in range(m)),
        Relation(n, m, tuple(rows)),
    )


def enumerate_contexts(n: int, m: int, canonical: bool = True) -> Iterator[FormalContext]:
    """Contexts with n objects and m features; one per isomorphism class if ``canonical``."""
    if canonical:
        for rows in itertools.combinations_with_replacement(range(1 << m), n):
            if _canonical_rows(rows, m) == rows:
                yield _make_context(rows, n, m)
    else:
        for rows in itertools.product(range(1 << m), repeat=n):
            yield _make_context(rows, n, m)


def compatible_relations(ctx: FormalContext) -> list[Relation]:
    """All I-compatible relations: stable extents per column, then a row filter."""
    stable = [B for B in range(1 << ctx.n_objects) if is_stable_extent(ctx, B)]
    out = []
    for cols in itertools.product(stable, repeat=ctx.n_features):
        R = Relation.from_columns(ctx.n_objects, ctx.n_features, cols)
        if all(is_stable_intent(ctx, r) for r in R.rows):
            out.append(R)
    return out


def _all_compatible_naive(ctx: FormalContext) -> list[Relation]:
    out = []
    for rows in itertools.product(range(1 << ctx.n_features), repeat=ctx.n_objects):
        R = Relation(ctx.n_objects, ctx.n_features, rows)
        if is_compatible(ctx, R):
            out.append(R)
    return out


def _signature(s: Sequent, max_agents: int) -> tuple[list[list[str]], list[str], list[str], list[str]]:
    nodes = list(subformulas(s.lhs)) + list(subformulas(s.rhs))
    mentioned = sorted(agents_of(s.lhs) | agents_of(s.rhs))
    atoms = sorted(atoms_of(s.lhs) | atoms_of(s.rhs))
    noms = sorted({g.name for g in nodes if isinstance(g, Nominal)})
    conoms = sorted({g.name for g in nodes if isinstance(g, Conominal)})
    has_c = any(isinstance(g, Common) for g in nodes)
    fresh = [a for a in AGENT_NAMES if a not in mentioned]
    if has_c:
        lo = max(1, len(mentioned))
        hi = max(lo, max_agents)
        agent_sets = [mentioned + fresh[: k - len(mentioned)] for k in range(lo, hi + 1)]
    else:
        agent_sets = [mentioned]
    return agent_sets, atoms, noms, conoms


def enumerate_models(bounds: SearchBounds, agent_sets: Sequence[Sequence[str]], atoms: Sequence[str],
                     nominals: Sequence[str] = (), conominals: Sequence[str] = (),
                     canonical: bool = True, stats: dict | None = None) -> Iterator[Model]:
    """Every model within ``bounds``, in a fixed deterministic order."""
    stats = stats if stats is not None else {}
    stats.setdefault("contexts", 0)
    for n in range(1, bounds.max_objects + 1):
        for m in range(1, bounds.max_features + 1):
            for ctx in enumerate_contexts(n, m, canonical):
                stats["contexts"] += 1
                concepts = all_concepts(ctx)
                rels = compatible_relations(ctx) if canonical else _all_compatible_naive(ctx)
                for agents in agent_sets:
                    for choice in itertools.product(rels, repeat=len(agents)):
                        frame = EnrichedContext.trusted(ctx, dict(zip(agents, choice)))
                        for vals in itertools.product(concepts, repeat=len(atoms)):
                            for nv in itertools.product(ctx.objects, repeat=len(nominals)):
                                for cv in itertools.product(ctx.features, repeat=len(conominals)):
                                    yield Model(frame, Valuation(dict(zip(atoms, vals)),
                                                                 dict(zip(nominals, nv)),
                                                                 dict(zip(conominals, cv))))


def estimate_models(bounds: SearchBounds, agent_sets: Sequence[Sequence[str]], n_atoms: int,
                    n_nominals: int = 0, n_conominals: int = 0) -> int:
    """Upper bound on the number of models :func:`enumerate_models` yields.

    Compatible relations are over-counted as all choices of a stable extent
    per column.
    """
    total = 0
    for n in range(1, bounds.max_objects + 1):
        for m in range(1, bounds.max_features + 1):
            for ctx in enumerate_contexts(n, m):
                concepts = all_concepts(ctx)
                rels = len(concepts) ** m
                per_val = len(concepts) ** n_atoms * n ** n_nominals * m ** n_conominals
                total += sum(rels ** len(a) for a in agent_sets) * per_val
    return total


def countermodel_search(s: Sequent, bounds: SearchBounds = SearchBounds(), canonical: bool = True,
                        force: bool = False) -> SearchReport:
    """Look for a model falsifying ``s`` within ``bounds``.

    Models are enumerated in a fixed order, so the reported witness is the
    first one in that order. VALID_UP_TO_BOUND is not a validity claim.
    The upfront size estimate is an upper bound; ``force`` skips the check.
    """
    t0 = time.perf_counter()
    agent_sets, atoms, noms, conoms = _signature(s, bounds.max_agents)
    if not force:
        est = estimate_models(bounds, agent_sets, len(atoms), len(noms), len(conoms))
        if est > bounds.max_models:
            raise SearchBoundError(
                f"search space estimate {est:.3g} models exceeds max_models={bounds.max_models}; "
                "lower the bounds or raise max_models",
                est,
            )
    stats: dict = {}
    examined = 0
    for M in enumerate_models(bounds, agent_sets, atoms, noms, conoms, canonical, stats):
        examined += 1
        if not Evaluator(M).holds(s):
            return SearchReport(s, Verdict.COUNTERMODEL, M, stats["contexts"], examined,
                                time.perf_counter() - t0)
    return SearchReport(s, Verdict.VALID_UP_TO_BOUND, None, stats.get("contexts", 0), examined,
                        time.perf_counter() - t0)


def find_model(predicate: Callable[[Model], bool], bounds: SearchBounds, agents: Sequence[str],
               atoms: Sequence[str]) -> Model | None:
    """First model within ``bounds`` satisfying ``predicate`` (fixture discovery)."""
    for M in enumerate_models(bounds, [list(agents)], atoms):
        if predicate(M):
            return M
    return None
