"""Qualitative categorization metrics: typicality, distance, contrast, leniency.

"Any category" in the leniency notions ranges over the formal concepts of
the model's context.
"""

from __future__ import annotations

import enum
import math
from typing import Optional

from .bits import is_subset
from .context import FormalConcept, all_concepts
from .relations import box_preimage, sequence_levels
from .semantics import Evaluator, Model, interpret
from .syntax import And, Common, Formula, Or, Sequent

# atypicality rank of a typical member; compares above every finite rank
TYPICAL = math.inf


class DistanceMode(enum.Enum):
    JOIN = "join"
    MEET = "meet"
    BOTH = "both"


def typical_members(M: Model, f: Formula) -> int:
    return interpret(M, Common(f)).extent


def approximants(M: Model, f: Formula, cumulative: bool = True):
    """Yield ``(k, T_k)`` for k = 1, 2, ... until the sequence is stationary.

    With ``cumulative`` set, ``T_k`` intersects the members of ``[s]f`` over
    all sequences with ``1 <= |s| <= k``; otherwise over ``|s| = k`` only.
    The last yielded approximant repeats forever.
    """
    ctx = M.context
    desc = interpret(M, f).intent
    T = ctx.all_objects
    seen_levels = set()
    seen_rels = set()
    for k, level in enumerate(sequence_levels(ctx, M.frame.relations), start=1):
        if cumulative:
            if level <= seen_rels:
                return
            seen_rels |= level
            for R in level:
                T &= box_preimage(ctx, R, desc)
        else:
            if level in seen_levels:
                return
            seen_levels.add(level)
            T = ctx.all_objects
            for R in level:
                T &= box_preimage(ctx, R, desc)
        yield k, T


def atypicality_rank(M: Model, a: str, f: Formula, cumulative: bool = True) -> float:
    """Least k with ``a`` outside ``T_k``, or ``TYPICAL`` if there is none."""
    bit = 1 << M.context.object_index(a)
    for k, T in approximants(M, f, cumulative):
        if not T & bit:
            return k
    return TYPICAL


def more_atypical(rank_b: float, rank_a: float) -> bool:
    """``b`` is more atypical than ``a`` when its typicality test fails sooner."""
    return rank_b < rank_a


def _holds(ev: Evaluator, lhs: Formula, rhs: Formula) -> bool:
    return ev.holds(Sequent(lhs, rhs))


def closer(M: Model, f1: Formula, f2: Formula, f3: Formula, f4: Formula,
           mode: DistanceMode = DistanceMode.BOTH) -> bool:
    """Whether f1 is closer to f2 than f3 is to f4.

    JOIN: ``f1 | f2 |- f4 | f3`` (f1, f2 share more features);
    MEET: ``f4 & f3 |- f1 & f2`` (f1, f2 share more members).
    """
    ev = Evaluator(M)
    join_ok = meet_ok = True
    if mode in (DistanceMode.JOIN, DistanceMode.BOTH):
        join_ok = _holds(ev, Or(f1, f2), Or(f4, f3))
    if mode in (DistanceMode.MEET, DistanceMode.BOTH):
        meet_ok = _holds(ev, And(f4, f3), And(f1, f2))
    return join_ok and meet_ok


def max_contrast(M: Model, f: Formula) -> bool:
    return _holds(Evaluator(M), f, Common(f))


def contrast_geq(M: Model, f: Formula, g: Formula, mode: DistanceMode = DistanceMode.JOIN) -> bool:
    """f has equal or higher contrast than g: f is closer to C(f) than g is to C(g)."""
    return closer(M, f, Common(f), g, Common(g), mode)


def no_leniency_witness(M: Model, f: Formula,
                        concepts: list[FormalConcept] | None = None) -> Optional[tuple[FormalConcept, FormalConcept]]:
    """First pair (psi, chi) violating no-leniency of ``f``, or None."""
    ext = interpret(M, f).extent
    if concepts is None:
        concepts = all_concepts(M.context)
    for psi in concepts:
        if not is_subset(psi.extent, ext):
            continue
        for chi in concepts:
            if not is_subset(psi.extent, chi.extent):
                continue
            if not (is_subset(ext, chi.extent) or is_subset(chi.extent, ext)):
                return psi, chi
    return None


def no_leniency(M: Model, f: Formula) -> bool:
    return no_leniency_witness(M, f) is None


def _incomparable(e1: int, e2: int) -> bool:
    return not is_subset(e1, e2) and not is_subset(e2, e1)


def leniency_geq_witness(M: Model, f: Formula, g: Formula,
                         concepts: list[FormalConcept] | None = None) -> Optional[str]:
    """Object refuting "f has greater or equal leniency than g", or None."""
    ctx = M.context
    ev = Evaluator(M)
    ext_f = ev(f).extent
    ext_g = ev(g).extent
    if concepts is None:
        concepts = all_concepts(ctx)
    for a in range(ctx.n_objects):
        bit = 1 << a
        # the nominal of a entails a category iff a is among its members
        premise = ext_g & bit and any(c.extent & bit and _incomparable(c.extent, ext_g) for c in concepts)
        if not premise:
            continue
        conclusion = ext_f & bit and any(c.extent & bit and _incomparable(c.extent, ext_f) for c in concepts)
        if not conclusion:
            return ctx.objects[a]
    return None


def leniency_geq(M: Model, f: Formula, g: Formula) -> bool:
    return leniency_geq_witness(M, f, g) is None


def rank_label(rank: float) -> int | str:
    return "TYPICAL" if rank == TYPICAL else int(rank)

