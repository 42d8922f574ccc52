"""Formal contexts, derivation operators and concept enumeration.

Object and feature sets are int bitmasks over the context's index order:
bit ``a`` of an extent is object ``ctx.objects[a]``, bit ``x`` of an
intent is feature ``ctx.features[x]``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .bits import full_mask, is_subset, iter_bits, mask_of
from .errors import ContractError, EnumerationLimitError, NotAConceptError, UnknownNameError

DEFAULT_ENUMERATION_BOUND = 24
# above this, all_concepts switches from powerset closure to NextClosure
POWERSET_THRESHOLD = 15


@dataclass(frozen=True)
class Relation:
    """A relation between ``n_objects`` objects and ``n_features`` features.

    ``rows[a]`` is the feature mask of object ``a``; ``cols[x]`` (derived)
    is the object mask of feature ``x``.
    """

    n_objects: int
    n_features: int
    rows: tuple[int, ...]
    cols: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.rows) != self.n_objects:
            raise ContractError(f"expected {self.n_objects} rows, got {len(self.rows)}")
        fm = full_mask(self.n_features)
        for r in self.rows:
            if r < 0 or r & ~fm:
                raise ContractError("row mask exceeds feature range")
        cols = [0] * self.n_features
        for a, r in enumerate(self.rows):
            for x in iter_bits(r):
                cols[x] |= 1 << a
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(cols))

    @classmethod
    def from_pairs(cls, n_objects: int, n_features: int, pairs: Iterable[tuple[int, int]]) -> Relation:
        rows = [0] * n_objects
        for a, x in pairs:
            if not (0 <= a < n_objects and 0 <= x < n_features):
                raise ContractError(f"pair ({a}, {x}) out of range")
            rows[a] |= 1 << x
        return cls(n_objects, n_features, tuple(rows))

    @classmethod
    def from_columns(cls, n_objects: int, n_features: int, cols: Sequence[int]) -> Relation:
        rows = [0] * n_objects
        for x, c in enumerate(cols):
            for a in iter_bits(c):
                rows[a] |= 1 << x
        return cls(n_objects, n_features, tuple(rows))

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[bool]], n_features: int | None = None) -> Relation:
        if n_features is None:
            n_features = len(matrix[0]) if matrix else 0
        for row in matrix:
            if len(row) != n_features:
                raise ContractError("ragged incidence matrix")
        rows = tuple(mask_of(x for x, v in enumerate(row) if v) for row in matrix)
        return cls(len(matrix), n_features, rows)

    @classmethod
    def full(cls, n_objects: int, n_features: int) -> Relation:
        return cls(n_objects, n_features, (full_mask(n_features),) * n_objects)

    @classmethod
    def empty(cls, n_objects: int, n_features: int) -> Relation:
        return cls(n_objects, n_features, (0,) * n_objects)

    def holds(self, a: int, x: int) -> bool:
        return bool(self.rows[a] >> x & 1)

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, x) for a, r in enumerate(self.rows) for x in iter_bits(r)]

    def to_matrix(self) -> list[list[bool]]:
        return [[bool(r >> x & 1) for x in range(self.n_features)] for r in self.rows]

    def toggled(self, a: int, x: int) -> Relation:
        rows = list(self.rows)
        rows[a] ^= 1 << x
        return Relation(self.n_objects, self.n_features, tuple(rows))

    def transpose(self) -> Relation:
        return Relation(self.n_features, self.n_objects, self.cols)

    def issubset(self, other: Relation) -> bool:
        return all(is_subset(r, s) for r, s in zip(self.rows, other.rows))

    def __and__(self, other: Relation) -> Relation:
        _same_shape(self, other)
        return Relation(self.n_objects, self.n_features, tuple(r & s for r, s in zip(self.rows, other.rows)))

    def __or__(self, other: Relation) -> Relation:
        _same_shape(self, other)
        return Relation(self.n_objects, self.n_features, tuple(r | s for r, s in zip(self.rows, other.rows)))


def _same_shape(r: Relation, s: Relation) -> None:
    if (r.n_objects, r.n_features) != (s.n_objects, s.n_features):
        raise ContractError(
            f"relation shapes differ: {r.n_objects}x{r.n_features} vs {s.n_objects}x{s.n_features}"
        )


@dataclass(frozen=True)
class FormalContext:
    objects: tuple[str, ...]
    features: tuple[str, ...]
    incidence: Relation
    all_objects: int = field(init=False, repr=False, compare=False)
    all_features: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "all_objects", full_mask(len(self.objects)))
        object.__setattr__(self, "all_features", full_mask(len(self.features)))
        if len(set(self.objects)) != len(self.objects):
            raise ContractError("duplicate object identifier")
        if len(set(self.features)) != len(self.features):
            raise ContractError("duplicate feature identifier")
        if (self.incidence.n_objects, self.incidence.n_features) != (len(self.objects), len(self.features)):
            raise ContractError(
                f"incidence is {self.incidence.n_objects}x{self.incidence.n_features}, "
                f"context is {len(self.objects)}x{len(self.features)}"
            )

    @classmethod
    def from_pairs(cls, objects: Sequence[str], features: Sequence[str],
                   pairs: Iterable[tuple[str, str]]) -> FormalContext:
        oi = {o: k for k, o in enumerate(objects)}
        fi = {f: k for k, f in enumerate(features)}
        idx = []
        for o, f in pairs:
            if o not in oi:
                raise UnknownNameError(f"unknown object {o!r}")
            if f not in fi:
                raise UnknownNameError(f"unknown feature {f!r}")
            idx.append((oi[o], fi[f]))
        return cls(tuple(objects), tuple(features), Relation.from_pairs(len(objects), len(features), idx))

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_features(self) -> int:
        return len(self.features)

    def object_index(self, name: str) -> int:
        try:
            return self.objects.index(name)
        except ValueError:
            raise UnknownNameError(f"unknown object {name!r}") from None

    def feature_index(self, name: str) -> int:
        try:
            return self.features.index(name)
        except ValueError:
            raise UnknownNameError(f"unknown feature {name!r}") from None

    def object_set(self, names: Iterable[str]) -> int:
        return mask_of(self.object_index(n) for n in names)

    def feature_set(self, names: Iterable[str]) -> int:
        return mask_of(self.feature_index(n) for n in names)

    def object_names(self, mask: int) -> list[str]:
        return [self.objects[a] for a in iter_bits(mask)]

    def feature_names(self, mask: int) -> list[str]:
        return [self.features[x] for x in iter_bits(mask)]

    def relation(self, pairs: Iterable[tuple[str, str]]) -> Relation:
        """Build a relation on this context's index space from name pairs."""
        return FormalContext.from_pairs(self.objects, self.features, pairs).incidence


@dataclass(frozen=True, order=True)
class FormalConcept:
    extent: int
    intent: int


def _check_rel(ctx: FormalContext, rel: Relation | None) -> Relation:
    if rel is None:
        return ctx.incidence
    if (rel.n_objects, rel.n_features) != (ctx.n_objects, ctx.n_features):
        raise ContractError(
            f"relation is {rel.n_objects}x{rel.n_features}, context is {ctx.n_objects}x{ctx.n_features}"
        )
    return rel


def _check_objects(ctx: FormalContext, B: int) -> None:
    if B < 0 or B & ~ctx.all_objects:
        raise ContractError("object set exceeds object index range")


def _check_features(ctx: FormalContext, Y: int) -> None:
    if Y < 0 or Y & ~ctx.all_features:
        raise ContractError("feature set exceeds feature index range")


def up(ctx: FormalContext, B: int, rel: Relation | None = None) -> int:
    """Features shared by every object of ``B`` under ``rel`` (default: I)."""
    rel = _check_rel(ctx, rel)
    _check_objects(ctx, B)
    out = ctx.all_features
    rows = rel.rows
    for a in iter_bits(B):
        out &= rows[a]
    return out


def down(ctx: FormalContext, Y: int, rel: Relation | None = None) -> int:
    """Objects having every feature of ``Y`` under ``rel`` (default: I)."""
    rel = _check_rel(ctx, rel)
    _check_features(ctx, Y)
    out = ctx.all_objects
    cols = rel.cols
    for x in iter_bits(Y):
        out &= cols[x]
    return out


def extent_closure(ctx: FormalContext, B: int) -> int:
    return down(ctx, up(ctx, B))


def intent_closure(ctx: FormalContext, Y: int) -> int:
    return up(ctx, down(ctx, Y))


def is_stable_extent(ctx: FormalContext, B: int) -> bool:
    return extent_closure(ctx, B) == B


def is_stable_intent(ctx: FormalContext, Y: int) -> bool:
    return intent_closure(ctx, Y) == Y


def concept_of_objects(ctx: FormalContext, B: int) -> FormalConcept:
    Y = up(ctx, B)
    return FormalConcept(down(ctx, Y), Y)


def concept_of_features(ctx: FormalContext, Y: int) -> FormalConcept:
    B = down(ctx, Y)
    return FormalConcept(B, up(ctx, B))


def is_concept(ctx: FormalContext, c: FormalConcept) -> bool:
    return up(ctx, c.extent) == c.intent and down(ctx, c.intent) == c.extent


def top_concept(ctx: FormalContext) -> FormalConcept:
    return concept_of_objects(ctx, ctx.all_objects)


def bottom_concept(ctx: FormalContext) -> FormalConcept:
    return concept_of_features(ctx, ctx.all_features)


def concept_meet(ctx: FormalContext, c1: FormalConcept, c2: FormalConcept) -> FormalConcept:
    for c in (c1, c2):
        if not is_concept(ctx, c):
            raise NotAConceptError(f"{c} is not a formal concept of the context")
    B = c1.extent & c2.extent
    return FormalConcept(B, up(ctx, B))


def concept_join(ctx: FormalContext, c1: FormalConcept, c2: FormalConcept) -> FormalConcept:
    for c in (c1, c2):
        if not is_concept(ctx, c):
            raise NotAConceptError(f"{c} is not a formal concept of the context")
    Y = c1.intent & c2.intent
    return FormalConcept(down(ctx, Y), Y)


def enumeration_bound() -> int:
    env = os.environ.get("EPICAT_MAX_CONCEPTS")
    return int(env) if env else DEFAULT_ENUMERATION_BOUND


def _closed_sets_powerset(n: int, closure) -> set[int]:
    return {closure(S) for S in range(1 << n)}


def _closed_sets_next_closure(n: int, closure) -> Iterator[int]:
    """Ganter's NextClosure over ``n`` items, index 0 most significant in lectic order."""
    current = closure(0)
    yield current
    top = full_mask(n)
    while current != top:
        for i in reversed(range(n)):
            bit = 1 << i
            if current & bit:
                continue
            below = bit - 1
            candidate = closure((current & below) | bit)
            if (candidate & ~current) & below == 0:
                current = candidate
                break
        else:  # pragma: no cover - unreachable for a closure operator
            return
        yield current


def all_concepts(ctx: FormalContext, bound: int | None = None,
                 method: str = "auto") -> list[FormalConcept]:
    """Every formal concept of ``ctx``, sorted by extent bitmask value.

    ``method`` is ``"powerset"``, ``"next_closure"`` or ``"auto"`` (powerset
    up to ``POWERSET_THRESHOLD`` on the smaller side).
    """
    if bound is None:
        bound = enumeration_bound()
    small = min(ctx.n_objects, ctx.n_features)
    if small > bound:
        raise EnumerationLimitError(
            f"context is {ctx.n_objects}x{ctx.n_features}; min side {small} exceeds "
            f"enumeration bound {bound} (set EPICAT_MAX_CONCEPTS to raise it)",
            bound,
        )
    if method == "auto":
        method = "powerset" if small <= POWERSET_THRESHOLD else "next_closure"
    by_objects = ctx.n_objects <= ctx.n_features
    if by_objects:
        n, closure = ctx.n_objects, lambda B: extent_closure(ctx, B)
    else:
        n, closure = ctx.n_features, lambda Y: intent_closure(ctx, Y)
    if method == "powerset":
        closed = _closed_sets_powerset(n, closure)
    elif method == "next_closure":
        closed = set(_closed_sets_next_closure(n, closure))
    else:
        raise ValueError(f"unknown enumeration method {method!r}")
    if by_objects:
        concepts = [FormalConcept(B, up(ctx, B)) for B in closed]
    else:
        concepts = [FormalConcept(down(ctx, Y), Y) for Y in closed]
    concepts.sort(key=lambda c: c.extent)
    return concepts


def concept_covers(concepts: Sequence[FormalConcept]) -> list[tuple[int, int]]:
    """Cover pairs ``(i, j)`` of the subconcept order: concept i is directly below j."""
    below = {
        (i, j)
        for i, c in enumerate(concepts)
        for j, d in enumerate(concepts)
        if i != j and is_subset(c.extent, d.extent)
    }
    return sorted(
        (i, j) for (i, j) in below
        if not any((i, k) in below and (k, j) in below for k in range(len(concepts)))
    )
