"""Enriched formal contexts, models, and evaluation of formulas to concepts."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .bits import is_subset
from .context import (
    FormalConcept,
    FormalContext,
    Relation,
    concept_of_features,
    concept_of_objects,
    is_concept,
    up,
)
from .errors import ContractError, IncompatibleRelationError, NotAConceptError, UnknownNameError
from .relations import (
    CommonTrace,
    box_preimage,
    common_relation_trace,
    compatibility_closure,
    is_compatible,
    sequence_relation,
)
from .syntax import And, Atom, Bot, Box, Common, Conominal, Formula, Nominal, Or, Sequent, Top

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EnrichedContext:
    """A formal context with one I-compatible relation per agent.

    Construction fails on an incompatible relation; use :meth:`repaired`
    to replace each relation by its compatibility closure instead.
    """

    context: FormalContext
    relations: Mapping[str, Relation] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "relations", dict(self.relations))
        for agent, R in self.relations.items():
            if (R.n_objects, R.n_features) != (self.context.n_objects, self.context.n_features):
                raise ContractError(f"relation of agent {agent!r} has wrong dimensions")
            if not is_compatible(self.context, R):
                raise IncompatibleRelationError(
                    f"relation of agent {agent!r} is not I-compatible "
                    "(use repair mode to replace it by its compatibility closure)"
                )

    @classmethod
    def repaired(cls, context: FormalContext, relations: Mapping[str, Relation]) -> EnrichedContext:
        fixed = {}
        for agent, R in relations.items():
            closed = compatibility_closure(context, R)
            if closed != R:
                log.warning("relation of agent %r was not I-compatible; replaced by its closure "
                            "(%d pairs added)", agent, len(closed.pairs()) - len(R.pairs()))
            fixed[agent] = closed
        return cls(context, fixed)

    @classmethod
    def trusted(cls, context: FormalContext, relations: Mapping[str, Relation]) -> EnrichedContext:
        """Skip the compatibility check; only for relations known to be compatible."""
        obj = cls.__new__(cls)
        object.__setattr__(obj, "context", context)
        object.__setattr__(obj, "relations", dict(relations))
        return obj

    @property
    def agents(self) -> list[str]:
        return sorted(self.relations)

    @cached_property
    def common_trace(self) -> CommonTrace:
        if not self.relations:
            raise ContractError("C needs at least one agent")
        return common_relation_trace(self.context, self.relations, check=False)

    @property
    def common_relation(self) -> Relation:
        return self.common_trace.relation


@dataclass(frozen=True, eq=False)
class Valuation:
    atoms: Mapping[str, FormalConcept] = field(default_factory=dict)
    nominals: Mapping[str, str] = field(default_factory=dict)
    conominals: Mapping[str, str] = field(default_factory=dict)

    def with_atom(self, name: str, c: FormalConcept) -> Valuation:
        return Valuation({**self.atoms, name: c}, self.nominals, self.conominals)


@dataclass(frozen=True, eq=False)
class Model:
    frame: EnrichedContext
    valuation: Valuation = field(default_factory=Valuation)

    def __post_init__(self):
        ctx = self.frame.context
        for p, c in self.valuation.atoms.items():
            if c.extent & ~ctx.all_objects or c.intent & ~ctx.all_features or not is_concept(ctx, c):
                raise NotAConceptError(f"valuation of atom {p!r} is not a formal concept")
        for n, obj in self.valuation.nominals.items():
            ctx.object_index(obj)
        for n, feat in self.valuation.conominals.items():
            ctx.feature_index(feat)

    @property
    def context(self) -> FormalContext:
        return self.frame.context

    def with_atom(self, name: str, c: FormalConcept) -> Model:
        return Model(self.frame, self.valuation.with_atom(name, c))


class Evaluator:
    """Interprets formulas in one model, memoising subformula results.

    The memo is private to the evaluator and keyed by node identity (formula
    hashing is structural and would cost a full traversal per lookup); it
    holds a reference to each node so identities stay valid.
    """

    def __init__(self, model: Model):
        self.model = model
        self.ctx = model.frame.context
        self.memo: dict[int, tuple[Formula, FormalConcept]] = {}
        self._rows = self.ctx.incidence.rows

    def __call__(self, f: Formula) -> FormalConcept:
        hit = self.memo.get(id(f))
        if hit is not None:
            return hit[1]
        c = self._eval(f)
        self.memo[id(f)] = (f, c)
        return c

    def _from_extent(self, B: int) -> FormalConcept:
        Y = self.ctx.all_features
        rows = self._rows
        rest = B
        while rest:
            low = rest & -rest
            Y &= rows[low.bit_length() - 1]
            rest ^= low
        return FormalConcept(B, Y)

    def _eval(self, f: Formula) -> FormalConcept:
        ctx = self.ctx
        if isinstance(f, Top):
            return concept_of_objects(ctx, ctx.all_objects)
        if isinstance(f, Bot):
            return concept_of_features(ctx, ctx.all_features)
        if isinstance(f, Atom):
            try:
                return self.model.valuation.atoms[f.name]
            except KeyError:
                raise UnknownNameError(f"atom {f.name!r} has no valuation") from None
        if isinstance(f, And):
            return self._from_extent(self(f.left).extent & self(f.right).extent)
        if isinstance(f, Or):
            return concept_of_features(ctx, self(f.left).intent & self(f.right).intent)
        if isinstance(f, Box):
            R = self.model.frame.relations.get(f.agent)
            if R is None:
                raise UnknownNameError(f"unknown agent {f.agent!r}")
            return self._from_extent(box_preimage(ctx, R, self(f.sub).intent))
        if isinstance(f, Common):
            RC = self.model.frame.common_relation
            return self._from_extent(box_preimage(ctx, RC, self(f.sub).intent))
        if isinstance(f, Nominal):
            return concept_of_objects(ctx, 1 << self._nominal_object(f.name))
        if isinstance(f, Conominal):
            return concept_of_features(ctx, 1 << self._conominal_feature(f.name))
        raise TypeError(f"not a formula: {f!r}")

    def _nominal_object(self, name: str) -> int:
        target = self.model.valuation.nominals.get(name)
        if target is None:
            if name in self.ctx.objects:
                return self.ctx.object_index(name)
            raise UnknownNameError(f"nominal {name!r} has no valuation")
        return self.ctx.object_index(target)

    def _conominal_feature(self, name: str) -> int:
        target = self.model.valuation.conominals.get(name)
        if target is None:
            if name in self.ctx.features:
                return self.ctx.feature_index(name)
            raise UnknownNameError(f"conominal {name!r} has no valuation")
        return self.ctx.feature_index(target)

    def holds(self, s: Sequent) -> bool:
        return is_subset(self(s.lhs).extent, self(s.rhs).extent)


def interpret(M: Model, f: Formula) -> FormalConcept:
    """The concept ``(members, description)`` denoted by ``f`` in ``M``."""
    return Evaluator(M)(f)


def member(M: Model, a: str, f: Formula) -> bool:
    """Whether object ``a`` is a member of ``f``."""
    return bool(interpret(M, f).extent >> M.context.object_index(a) & 1)


def describes(M: Model, x: str, f: Formula) -> bool:
    """Whether feature ``x`` describes ``f``."""
    return bool(interpret(M, f).intent >> M.context.feature_index(x) & 1)


def check_sequent(M: Model, s: Sequent) -> bool:
    return Evaluator(M).holds(s)


def box_sequence_extension(M: Model, s: Sequence[str], f: Formula) -> int:
    """Members of ``[i1]...[in] f``, computed as ``R_s^down`` of the description of ``f``."""
    if len(s) == 0:
        raise ContractError("agent sequence must be nonempty")
    R = sequence_relation(M.context, M.frame.relations, s, check=False)
    return box_preimage(M.context, R, interpret(M, f).intent)
