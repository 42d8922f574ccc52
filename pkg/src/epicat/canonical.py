"""Canonical enriched contexts of finite lattices with normal box operators.

Objects of the canonical context are the lattice filters, features the
lattice ideals; a filter and an ideal are incident when they intersect,
and filter ``a`` is R_i-related to ideal ``x`` when ``box_i(u)`` lies in
``a`` for some ``u`` in ``x``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .bits import is_subset, iter_bits, mask_of
from .context import FormalConcept, FormalContext, Relation, down, up
from .errors import ContractError, EnumerationLimitError, UnknownNameError
from .relations import sequence_relation
from .semantics import EnrichedContext, Evaluator, Model, Valuation
from .syntax import And, Atom, Bot, Box, Formula, Or, Top, TOP, BOT, print_formula

DEFAULT_LATTICE_BOUND = 8


@dataclass(frozen=True, eq=False)
class FiniteModalLattice:
    """A finite lattice given by its order matrix, plus unary box tables.

    ``leq[u][v]`` is true iff ``u <= v``; ``boxes[i][u]`` is the index of
    ``box_i(u)``. Meet and join tables are derived and the whole structure
    is validated on construction.
    """

    elements: tuple[str, ...]
    leq: tuple[tuple[bool, ...], ...]
    boxes: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    meet: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    join: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    top: int = field(init=False)
    bottom: int = field(init=False)

    def __post_init__(self):
        n = len(self.elements)
        if n == 0:
            raise ContractError("a lattice needs at least one element")
        if len(set(self.elements)) != n:
            raise ContractError("duplicate lattice element name")
        leq = tuple(tuple(bool(v) for v in row) for row in self.leq)
        if len(leq) != n or any(len(r) != n for r in leq):
            raise ContractError("order matrix must be n x n")
        for u in range(n):
            if not leq[u][u]:
                raise ContractError("order is not reflexive")
            for v in range(n):
                if u != v and leq[u][v] and leq[v][u]:
                    raise ContractError("order is not antisymmetric")
                for w in range(n):
                    if leq[u][v] and leq[v][w] and not leq[u][w]:
                        raise ContractError("order is not transitive")
        meet = [[0] * n for _ in range(n)]
        join = [[0] * n for _ in range(n)]
        for u in range(n):
            for v in range(n):
                lower = [w for w in range(n) if leq[w][u] and leq[w][v]]
                upper = [w for w in range(n) if leq[u][w] and leq[v][w]]
                glb = [w for w in lower if all(leq[z][w] for z in lower)]
                lub = [w for w in upper if all(leq[w][z] for z in upper)]
                if len(glb) != 1 or len(lub) != 1:
                    raise ContractError(
                        f"{self.elements[u]!r} and {self.elements[v]!r} lack a meet or join: not a lattice"
                    )
                meet[u][v] = glb[0]
                join[u][v] = lub[0]
        top = next(u for u in range(n) if all(leq[v][u] for v in range(n)))
        bottom = next(u for u in range(n) if all(leq[u][v] for v in range(n)))
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "leq", leq)
        object.__setattr__(self, "meet", tuple(map(tuple, meet)))
        object.__setattr__(self, "join", tuple(map(tuple, join)))
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "bottom", bottom)
        boxes = {i: tuple(t) for i, t in self.boxes.items()}
        object.__setattr__(self, "boxes", boxes)
        for i, t in boxes.items():
            if len(t) != n or any(not 0 <= v < n for v in t):
                raise ContractError(f"box table of agent {i!r} is malformed")
            if not is_normal(self, t):
                raise ContractError(f"box of agent {i!r} is not normal (must preserve top and binary meets)")

    @property
    def size(self) -> int:
        return len(self.elements)

    @classmethod
    def from_covers(cls, elements: Sequence[str], covers: Iterable[tuple[str, str]],
                    boxes: Mapping[str, Mapping[str, str]] | None = None) -> FiniteModalLattice:
        idx = {e: k for k, e in enumerate(elements)}
        n = len(elements)
        leq = [[u == v for v in range(n)] for u in range(n)]
        for lo, hi in covers:
            if lo not in idx or hi not in idx:
                raise UnknownNameError(f"cover ({lo!r}, {hi!r}) names an unknown element")
            leq[idx[lo]][idx[hi]] = True
        for w in range(n):
            for u in range(n):
                if leq[u][w]:
                    for v in range(n):
                        if leq[w][v]:
                            leq[u][v] = True
        tables = {}
        for agent, table in (boxes or {}).items():
            missing = [e for e in elements if e not in table]
            if missing:
                raise ContractError(f"box table of agent {agent!r} misses {missing}")
            try:
                tables[agent] = tuple(idx[table[e]] for e in elements)
            except KeyError as e:
                raise UnknownNameError(f"box table of agent {agent!r} names unknown element {e}") from None
        return cls(tuple(elements), tuple(map(tuple, leq)), tables)

    @classmethod
    def from_dict(cls, data: dict) -> FiniteModalLattice:
        return cls.from_covers(data["elements"], [tuple(c) for c in data.get("covers", [])], data.get("boxes"))

    def to_dict(self) -> dict:
        n = self.size
        covers = [
            [self.elements[u], self.elements[v]]
            for u in range(n) for v in range(n)
            if u != v and self.leq[u][v]
            and not any(w not in (u, v) and self.leq[u][w] and self.leq[w][v] for w in range(n))
        ]
        return {
            "elements": list(self.elements),
            "covers": covers,
            "boxes": {i: {self.elements[u]: self.elements[t[u]] for u in range(n)} for i, t in self.boxes.items()},
        }

    def with_boxes(self, boxes: Mapping[str, Sequence[int]]) -> FiniteModalLattice:
        return FiniteModalLattice(self.elements, self.leq, {i: tuple(t) for i, t in boxes.items()})

    def up_set(self, u: int) -> int:
        return mask_of(v for v in range(self.size) if self.leq[u][v])

    def down_set(self, u: int) -> int:
        return mask_of(v for v in range(self.size) if self.leq[v][u])


def is_normal(L: FiniteModalLattice, box: Sequence[int]) -> bool:
    if box[L.top] != L.top:
        return False
    return all(box[L.meet[u][v]] == L.meet[box[u]][box[v]] for u in range(L.size) for v in range(L.size))


def is_monotone(L: FiniteModalLattice, box: Sequence[int]) -> bool:
    return all(L.leq[box[u]][box[v]] for u in range(L.size) for v in range(L.size) if L.leq[u][v])


def _check_bound(L: FiniteModalLattice, bound: int | None) -> None:
    bound = DEFAULT_LATTICE_BOUND if bound is None else bound
    if L.size > bound:
        raise EnumerationLimitError(f"lattice has {L.size} elements; bound is {bound}", bound)


def enumerate_filters(L: FiniteModalLattice, include_improper: bool = True,
                      bound: int | None = None) -> list[int]:
    """All lattice filters as element bitmasks, ordered by generator index.

    In a finite lattice every (nonempty) filter is principal; the improper
    filter is the one generated by the bottom element.
    """
    _check_bound(L, bound)
    out = []
    for u in range(L.size):
        if u == L.bottom and not include_improper and L.size > 1:
            continue
        out.append(L.up_set(u))
    return out


def enumerate_ideals(L: FiniteModalLattice, include_improper: bool = True,
                     bound: int | None = None) -> list[int]:
    _check_bound(L, bound)
    out = []
    for u in range(L.size):
        if u == L.top and not include_improper and L.size > 1:
            continue
        out.append(L.down_set(u))
    return out


def is_filter(L: FiniteModalLattice, S: int) -> bool:
    if S == 0:
        return False
    members = list(iter_bits(S))
    up_closed = all(S >> v & 1 for u in members for v in range(L.size) if L.leq[u][v])
    return up_closed and all(S >> L.meet[u][v] & 1 for u in members for v in members)


def is_ideal(L: FiniteModalLattice, S: int) -> bool:
    if S == 0:
        return False
    members = list(iter_bits(S))
    down_closed = all(S >> v & 1 for u in members for v in range(L.size) if L.leq[v][u])
    return down_closed and all(S >> L.join[u][v] & 1 for u in members for v in members)


@dataclass(frozen=True, eq=False)
class CanonicalFrame:
    lattice: FiniteModalLattice
    filters: list[int]
    ideals: list[int]
    frame: EnrichedContext

    @property
    def context(self) -> FormalContext:
        return self.frame.context

    def filters_containing(self, u: int) -> int:
        return mask_of(k for k, a in enumerate(self.filters) if a >> u & 1)

    def ideals_containing(self, u: int) -> int:
        return mask_of(k for k, x in enumerate(self.ideals) if x >> u & 1)


def _set_name(L: FiniteModalLattice, S: int) -> str:
    return "{" + ",".join(L.elements[u] for u in iter_bits(S)) + "}"


def canonical_context(L: FiniteModalLattice, include_improper: bool = True,
                      bound: int | None = None) -> CanonicalFrame:
    """The canonical enriched context of ``L``; compatibility of every R_i is checked."""
    filters = enumerate_filters(L, include_improper, bound)
    ideals = enumerate_ideals(L, include_improper, bound)
    nA, nX = len(filters), len(ideals)
    incidence = Relation.from_pairs(
        nA, nX, [(a, x) for a, fa in enumerate(filters) for x, ix in enumerate(ideals) if fa & ix]
    )
    rels = {}
    for agent, box in L.boxes.items():
        rels[agent] = Relation.from_pairs(
            nA, nX,
            [(a, x) for a, fa in enumerate(filters) for x, ix in enumerate(ideals)
             if any(fa >> box[u] & 1 for u in iter_bits(ix))],
        )
    ctx = FormalContext(
        tuple("F" + _set_name(L, a) for a in filters),
        tuple("I" + _set_name(L, x) for x in ideals),
        incidence,
    )
    # EnrichedContext rejects incompatible relations, so this asserts compositionality
    return CanonicalFrame(L, filters, ideals, EnrichedContext(ctx, rels))


def canonical_model(cf: CanonicalFrame, assignment: Mapping[str, int]) -> Model:
    """Valuation sending each atom to the filters and ideals containing its element."""
    atoms = {}
    for p, u in assignment.items():
        if not 0 <= u < cf.lattice.size:
            raise UnknownNameError(f"atom {p!r} assigned to unknown element {u}")
        atoms[p] = FormalConcept(cf.filters_containing(u), cf.ideals_containing(u))
    return Model(cf.frame, Valuation(atoms))


def lattice_value(L: FiniteModalLattice, f: Formula, assignment: Mapping[str, int]) -> int:
    """Value of an L-formula inside the lattice itself."""
    if isinstance(f, Top):
        return L.top
    if isinstance(f, Bot):
        return L.bottom
    if isinstance(f, Atom):
        try:
            return assignment[f.name]
        except KeyError:
            raise UnknownNameError(f"atom {f.name!r} is not assigned") from None
    if isinstance(f, And):
        return L.meet[lattice_value(L, f.left, assignment)][lattice_value(L, f.right, assignment)]
    if isinstance(f, Or):
        return L.join[lattice_value(L, f.left, assignment)][lattice_value(L, f.right, assignment)]
    if isinstance(f, Box):
        if f.agent not in L.boxes:
            raise UnknownNameError(f"unknown agent {f.agent!r}")
        return L.boxes[f.agent][lattice_value(L, f.sub, assignment)]
    raise ContractError(f"{print_formula(f)!r} is not a formula of the basic language")


def enumerate_formulas(atoms: Sequence[str], agents: Sequence[str], depth: int) -> list[Formula]:
    """All formulas over ``atoms``, top and bot with nesting depth <= ``depth``, deduplicated."""
    seen: dict[Formula, None] = dict.fromkeys([Atom(p) for p in atoms] + [TOP, BOT])
    for _ in range(depth):
        prev = list(seen)
        new = [Box(i, f) for i in agents for f in prev]
        new += [op(f, g) for op in (And, Or) for f in prev for g in prev]
        for f in new:
            seen.setdefault(f, None)
    return list(seen)


@dataclass
class TruthLemmaReport:
    formulas_checked: int = 0
    checks: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def truth_lemma_check(L: FiniteModalLattice, assignment: Mapping[str, int], depth: int,
                      include_improper: bool = True, cf: CanonicalFrame | None = None,
                      formulas: Sequence[Formula] | None = None) -> TruthLemmaReport:
    """Check ``a |= f  iff  value(f) in a`` for filters, and the dual for ideals."""
    if cf is None:
        cf = canonical_context(L, include_improper)
    M = canonical_model(cf, assignment)
    ev = Evaluator(M)
    if formulas is None:
        formulas = enumerate_formulas(sorted(assignment), sorted(L.boxes), depth)
    report = TruthLemmaReport()
    for f in formulas:
        u = lattice_value(L, f, assignment)
        c = ev(f)
        want_ext = cf.filters_containing(u)
        want_int = cf.ideals_containing(u)
        report.formulas_checked += 1
        report.checks += len(cf.filters) + len(cf.ideals)
        if c.extent != want_ext or c.intent != want_int:
            report.violations.append({
                "formula": print_formula(f),
                "value": L.elements[u],
                "filters": [cf.context.objects[k] for k in iter_bits(c.extent ^ want_ext)],
                "ideals": [cf.context.features[k] for k in iter_bits(c.intent ^ want_int)],
            })
    return report


def box_sequence_value(L: FiniteModalLattice, s: Sequence[str], u: int) -> int:
    for i in reversed(s):
        u = L.boxes[i][u]
    return u


def sequence_filter_lemma_check(L: FiniteModalLattice, u: int, s: Sequence[str],
                                include_improper: bool = True, cf: CanonicalFrame | None = None) -> bool:
    """Compare column ``R_s^down[x]`` for the principal ideal x of ``u`` with the filters containing ``box_s u``."""
    if cf is None:
        cf = canonical_context(L, include_improper)
    x = L.down_set(u)
    if x not in cf.ideals:
        raise ContractError("principal ideal of u is excluded under this convention")
    col = cf.ideals.index(x)
    Rs = sequence_relation(cf.context, cf.frame.relations, list(s), check=False)
    return Rs.cols[col] == cf.filters_containing(box_sequence_value(L, s, u))


def prelim_identity_failures(cf: CanonicalFrame) -> list[str]:
    """Check the four set identities relating R_i, I and box images on ``cf``."""
    L, ctx = cf.lattice, cf.context
    failures = []
    for agent, box in L.boxes.items():
        R = cf.frame.relations[agent]
        for xk, x in enumerate(cf.ideals):
            boxed = mask_of(box[u] for u in iter_bits(x))
            lhs = up(ctx, R.cols[xk])
            rhs = mask_of(k for k, y in enumerate(cf.ideals) if is_subset(boxed, y))
            if lhs != rhs:
                failures.append(f"item 1, agent {agent}, ideal {xk}")
            meets = mask_of(k for k, b in enumerate(cf.filters) if b & boxed)
            if down(ctx, lhs) != meets or meets != R.cols[xk]:
                failures.append(f"item 3, agent {agent}, ideal {xk}")
        for ak, a in enumerate(cf.filters):
            pre = mask_of(u for u in range(L.size) if a >> box[u] & 1)
            lhs = down(ctx, R.rows[ak])
            rhs = mask_of(k for k, b in enumerate(cf.filters) if is_subset(pre, b))
            if lhs != rhs:
                failures.append(f"item 2, agent {agent}, filter {ak}")
            meets = mask_of(k for k, y in enumerate(cf.ideals) if y & pre)
            if up(ctx, lhs) != meets or meets != R.rows[ak]:
                failures.append(f"item 4, agent {agent}, filter {ak}")
    return failures


# ------------------------------------------------- small-lattice enumeration

def _canonical_order(n: int, leq: Sequence[Sequence[bool]]) -> tuple:
    return min(
        tuple(leq[p[u]][p[v]] for u in range(n) for v in range(n))
        for p in itertools.permutations(range(n))
    )


def small_lattices(n: int) -> list[FiniteModalLattice]:
    """All lattices with exactly ``n`` elements, one per isomorphism class."""
    if n < 1:
        return []
    names = [str(k) for k in range(n)]
    if n == 1:
        return [FiniteModalLattice(("0",), ((True,),))]
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    seen = set()
    out = []
    for chosen in range(1 << len(pairs)):
        leq = [[u == v for v in range(n)] for u in range(n)]
        for k, (u, v) in enumerate(pairs):
            if chosen >> k & 1:
                leq[u][v] = True
        # labels are a linear extension, so transitivity must already hold
        if any(leq[u][w] and leq[w][v] and not leq[u][v]
               for u in range(n) for w in range(n) for v in range(n)):
            continue
        if not all(leq[0][v] and leq[v][n - 1] for v in range(n)):
            continue
        try:
            L = FiniteModalLattice(tuple(names), tuple(map(tuple, leq)))
        except ContractError:
            continue
        key = _canonical_order(n, leq)
        if key in seen:
            continue
        seen.add(key)
        out.append(L)
    return out


def normal_operators(L: FiniteModalLattice) -> list[tuple[int, ...]]:
    """Every normal unary operation on ``L`` (all maps, filtered)."""
    n = L.size
    return [t for t in itertools.product(range(n), repeat=n) if is_normal(L, t)]


@dataclass
class SweepReport:
    include_improper: bool
    lattices: int = 0
    operators: int = 0
    assignments: int = 0
    formulas_checked: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "include_improper": self.include_improper,
            "lattices": self.lattices,
            "operators": self.operators,
            "assignments": self.assignments,
            "formulas_checked": self.formulas_checked,
            "violations": self.violations[:20],
            "violation_count": len(self.violations),
        }


def truth_lemma_sweep(max_size: int = 4, depth: int = 2, n_atoms: int = 2,
                      include_improper: bool = True) -> SweepReport:
    """Exhaustive Truth-Lemma check over small lattices with one normal box."""
    report = SweepReport(include_improper)
    atoms = ["p", "q", "r", "s"][:n_atoms]
    for n in range(1, max_size + 1):
        for base in small_lattices(n):
            report.lattices += 1
            formulas = None
            for box in normal_operators(base):
                report.operators += 1
                L = base.with_boxes({"i": box})
                cf = canonical_context(L, include_improper)
                if formulas is None:
                    formulas = enumerate_formulas(atoms, ["i"], depth)
                for values in itertools.product(range(n), repeat=len(atoms)):
                    report.assignments += 1
                    r = truth_lemma_check(L, dict(zip(atoms, values)), depth, cf=cf, formulas=formulas)
                    report.formulas_checked += r.formulas_checked
                    for v in r.violations:
                        v = dict(v, lattice=L.to_dict(), assignment=dict(zip(atoms, values)))
                        report.violations.append(v)
    return report


def select_convention(max_size: int = 4, depth: int = 2, n_atoms: int = 2) -> tuple[bool, dict]:
    """Run the sweep under both filter conventions; prefer including improper filters on a tie."""
    reports = {flag: truth_lemma_sweep(max_size, depth, n_atoms, flag) for flag in (True, False)}
    chosen = True if reports[True].ok or not reports[False].ok else False
    return chosen, {
        "selected_include_improper": chosen,
        "with_improper": reports[True].to_dict(),
        "proper_only": reports[False].to_dict(),
    }
