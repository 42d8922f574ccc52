"""I-compatible agent relations, I-products and the common-knowledge relation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .bits import full_mask, iter_bits
from .context import (
    FormalContext,
    Relation,
    _check_rel,
    extent_closure,
    intent_closure,
    is_stable_extent,
    is_stable_intent,
)
from .errors import ContractError, IncompatibleRelationError, UnknownNameError

AgentSequence = Sequence[str]


def _meet_cols(cols: Sequence[int], Y: int, full: int) -> int:
    out = full
    for x in iter_bits(Y):
        out &= cols[x]
    return out


def is_compatible(ctx: FormalContext, R: Relation) -> bool:
    """Every column ``R^down[x]`` is a stable extent and every row ``R^up[a]`` a stable intent."""
    R = _check_rel(ctx, R)
    return all(is_stable_extent(ctx, c) for c in R.cols) and all(
        is_stable_intent(ctx, r) for r in R.rows
    )


def require_compatible(ctx: FormalContext, R: Relation, what: str = "relation") -> None:
    if not is_compatible(ctx, R):
        raise IncompatibleRelationError(f"{what} is not I-compatible")


def compatibility_closure(ctx: FormalContext, R: Relation) -> Relation:
    """Least I-compatible relation containing ``R``.

    Columns are replaced by their extent closures and rows by their intent
    closures until nothing changes; each step only adds pairs that every
    compatible superset must contain.
    """
    R = _check_rel(ctx, R)
    while True:
        cols = [extent_closure(ctx, c) for c in R.cols]
        R2 = Relation.from_columns(ctx.n_objects, ctx.n_features, cols)
        R2 = Relation(ctx.n_objects, ctx.n_features, tuple(intent_closure(ctx, r) for r in R2.rows))
        if R2 == R:
            return R
        R = R2


def box_preimage(ctx: FormalContext, R: Relation, Y: int, strict: bool = False) -> int:
    """``R^down[Y]``: objects related by ``R`` to every feature in ``Y``."""
    R = _check_rel(ctx, R)
    if Y < 0 or Y & ~ctx.all_features:
        raise ContractError("feature set exceeds feature index range")
    if strict:
        require_compatible(ctx, R)
    return _meet_cols(R.cols, Y, ctx.all_objects)


def _feature_closures(ctx: FormalContext) -> list[int]:
    return [intent_closure(ctx, 1 << x) for x in range(ctx.n_features)]


def _i_product(ctx: FormalContext, Rs: Relation, Rt: Relation, feature_closures: Sequence[int]) -> Relation:
    full_a = ctx.all_objects
    full_x = ctx.all_features
    I_rows = ctx.incidence.rows
    cols = []
    for xc in feature_closures:
        inner = _meet_cols(Rt.cols, xc, full_a)
        desc = full_x
        for a in iter_bits(inner):
            desc &= I_rows[a]
        cols.append(_meet_cols(Rs.cols, desc, full_a))
    return Relation.from_columns(ctx.n_objects, ctx.n_features, cols)


def i_product(ctx: FormalContext, Rs: Relation, Rt: Relation, check: bool = True) -> Relation:
    """The I-product ``R_st``: column x is ``Rs^down[I^up[Rt^down[x^down-up]]]``."""
    Rs = _check_rel(ctx, Rs)
    Rt = _check_rel(ctx, Rt)
    if check:
        require_compatible(ctx, Rs, "left factor")
        require_compatible(ctx, Rt, "right factor")
    return _i_product(ctx, Rs, Rt, _feature_closures(ctx))


def sequence_relation(ctx: FormalContext, rels: Mapping[str, Relation], s: AgentSequence,
                      check: bool = True) -> Relation:
    """``R_s`` for a nonempty agent sequence, folded from the right."""
    if len(s) == 0:
        raise ContractError("agent sequence must be nonempty")
    for i in s:
        if i not in rels:
            raise UnknownNameError(f"unknown agent {i!r}")
    if check:
        for i in set(s):
            require_compatible(ctx, rels[i], f"relation of agent {i!r}")
    closures = _feature_closures(ctx)
    acc = rels[s[-1]]
    for i in reversed(s[:-1]):
        acc = _i_product(ctx, rels[i], acc, closures)
    return acc


@dataclass(frozen=True)
class CommonTrace:
    """Result of the reachable-relation worklist behind ``R_C``.

    ``reachable`` maps every distinct ``R_s`` to a shortest sequence
    producing it; ``depth`` is the longest of those witnesses, so every
    distinct ``R_s`` already occurs among sequences of length <= depth.
    """

    relation: Relation
    reachable: dict[Relation, tuple[str, ...]]
    depth: int
    steps: int


def common_relation_trace(ctx: FormalContext, rels: Mapping[str, Relation], check: bool = True) -> CommonTrace:
    if not rels:
        raise ContractError("common relation needs a nonempty agent set")
    agents = sorted(rels)
    if check:
        for i in agents:
            require_compatible(ctx, rels[i], f"relation of agent {i!r}")
    closures = _feature_closures(ctx)
    reachable: dict[Relation, tuple[str, ...]] = {}
    frontier = []
    for i in agents:
        if rels[i] not in reachable:
            reachable[rels[i]] = (i,)
            frontier.append(rels[i])
    depth = 1
    steps = 0
    while frontier:
        fresh = []
        for R in frontier:
            for i in agents:
                steps += 1
                P = _i_product(ctx, rels[i], R, closures)
                if P not in reachable:
                    reachable[P] = (i,) + reachable[R]
                    fresh.append(P)
        if fresh:
            depth += 1
        frontier = fresh
    rows = [full_mask(ctx.n_features)] * ctx.n_objects
    for R in reachable:
        rows = [r & s for r, s in zip(rows, R.rows)]
    RC = Relation(ctx.n_objects, ctx.n_features, tuple(rows))
    return CommonTrace(RC, reachable, depth, steps)


def common_relation(ctx: FormalContext, rels: Mapping[str, Relation], check: bool = True) -> Relation:
    """``R_C``: the intersection of ``R_s`` over all nonempty agent sequences."""
    return common_relation_trace(ctx, rels, check).relation


def sequence_levels(ctx: FormalContext, rels: Mapping[str, Relation]):
    """Yield, for k = 1, 2, ..., the set of distinct ``R_s`` with ``|s| = k``.

    The sequence of level sets is eventually periodic; callers decide when
    to stop.
    """
    agents = sorted(rels)
    closures = _feature_closures(ctx)
    level = frozenset(rels[i] for i in agents)
    while True:
        yield level
        level = frozenset(_i_product(ctx, rels[i], R, closures) for R in level for i in agents)
