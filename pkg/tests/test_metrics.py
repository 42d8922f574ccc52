import random

import pytest

from epicat import formats
from epicat.context import Relation, all_concepts
from epicat.errors import UnknownNameError
from epicat.harness import FuzzConfig, random_formula, random_model
from epicat.metrics import (
    TYPICAL,
    DistanceMode,
    approximants,
    atypicality_rank,
    closer,
    contrast_geq,
    leniency_geq,
    leniency_geq_witness,
    max_contrast,
    more_atypical,
    no_leniency,
    no_leniency_witness,
    rank_label,
    typical_members,
)
from epicat.semantics import EnrichedContext, Model, Valuation, check_sequent, interpret
from epicat.syntax import Atom, Common, Or, Sequent, parse_formula

from conftest import FIXTURES
from oracles import no_leniency_reverse

P, Q, R = Atom("p"), Atom("q"), Atom("r")
TOP, BOT = parse_formula("top"), parse_formula("bot")
JOIN, MEET, BOTH = DistanceMode.JOIN, DistanceMode.MEET, DistanceMode.BOTH


def fixture(name):
    return formats.load_model(FIXTURES / name)


def random_models(seed, count, **kw):
    cfg = FuzzConfig(max_objects=4, max_features=4, **kw)
    rng = random.Random(seed)
    for _ in range(count):
        yield rng, random_model(cfg, rng)


def with_incidence_relations(M):
    ctx = M.context
    return Model(EnrichedContext(ctx, {i: ctx.incidence for i in M.frame.agents}), M.valuation)


# -- typicality ----------------------------------------------------------

def test_typical_members_on_k2(k2m):
    assert k2m.context.object_names(typical_members(k2m, P)) == ["a1"]


def test_typical_members_collapse_when_relations_are_incidence():
    for rng, M in random_models(1, 60):
        M = with_incidence_relations(M)
        f = random_formula(rng, 2, list(M.valuation.atoms), M.frame.agents)
        assert typical_members(M, f) == interpret(M, f).extent


def test_typical_members_of_top_with_full_relations(k2):
    full = Relation.full(2, 2)
    M = Model(EnrichedContext(k2, {"1": full, "2": full}), Valuation())
    assert typical_members(M, TOP) == k2.all_objects


def test_rank_on_k2(k2m):
    assert atypicality_rank(k2m, "a2", P) == 1
    assert atypicality_rank(k2m, "a1", P) == TYPICAL
    assert rank_label(TYPICAL) == "TYPICAL" and rank_label(1) == 1
    with pytest.raises(UnknownNameError):
        atypicality_rank(k2m, "zz", P)


def test_more_atypical_ordering():
    assert more_atypical(1, 2)
    assert more_atypical(3, TYPICAL)
    assert not more_atypical(TYPICAL, TYPICAL)
    assert not more_atypical(2, 2)


def test_approximants_decrease_and_rank_agrees_with_common():
    for rng, M in random_models(2, 80):
        f = random_formula(rng, 2, list(M.valuation.atoms), M.frame.agents)
        prev = M.context.all_objects
        last = None
        for _, T in approximants(M, f):
            assert T & ~prev == 0
            prev = last = T
        typical = typical_members(M, f)
        assert last == typical
        for a, name in enumerate(M.context.objects):
            rank = atypicality_rank(M, name, f)
            assert (rank == TYPICAL) == bool(typical >> a & 1)


def test_exact_length_variant_runs_and_never_ranks_later():
    for rng, M in random_models(3, 40):
        f = random_formula(rng, 2, list(M.valuation.atoms), M.frame.agents)
        for name in M.context.objects:
            cum = atypicality_rank(M, name, f)
            exact = atypicality_rank(M, name, f, cumulative=False)
            assert exact >= cum


# -- distance and contrast -----------------------------------------------

def test_closer_is_reflexive_and_both_implies_each():
    for rng, M in random_models(4, 40):
        atoms, agents = list(M.valuation.atoms), M.frame.agents
        fs = [random_formula(rng, 2, atoms, agents) for _ in range(4)]
        assert closer(M, fs[0], fs[1], fs[0], fs[1], BOTH)
        if closer(M, *fs, mode=BOTH):
            assert closer(M, *fs, mode=JOIN) and closer(M, *fs, mode=MEET)


def test_meet_mode_with_top_reduces_to_entailment():
    for rng, M in random_models(5, 40):
        atoms, agents = list(M.valuation.atoms), M.frame.agents
        f2, f4 = random_formula(rng, 2, atoms, agents), random_formula(rng, 2, atoms, agents)
        assert closer(M, TOP, f2, TOP, f4, MEET) == check_sequent(M, Sequent(f4, f2))


def test_join_and_meet_can_disagree():
    M = fixture("closer_join_meet_differ.json")
    assert closer(M, P, Q, R, Q, JOIN) != closer(M, P, Q, R, Q, MEET)


def test_max_contrast_examples(k2m):
    assert max_contrast(k2m, P)
    assert not max_contrast(fixture("max_contrast_failure.json"), P)


def test_max_contrast_when_relations_are_incidence():
    for rng, M in random_models(6, 40):
        M = with_incidence_relations(M)
        f = random_formula(rng, 2, list(M.valuation.atoms), M.frame.agents)
        assert max_contrast(M, f)


def test_max_contrast_makes_every_member_typical():
    hits = 0
    for rng, M in random_models(7, 150):
        f = random_formula(rng, 2, list(M.valuation.atoms), M.frame.agents)
        if max_contrast(M, f):
            hits += 1
            ext = interpret(M, f).extent
            for a, name in enumerate(M.context.objects):
                if ext >> a & 1:
                    assert atypicality_rank(M, name, f) == TYPICAL
    assert hits > 20


def test_contrast_geq():
    for rng, M in random_models(8, 40):
        atoms, agents = list(M.valuation.atoms), M.frame.agents
        f, g = random_formula(rng, 2, atoms, agents), random_formula(rng, 2, atoms, agents)
        for mode in DistanceMode:
            assert contrast_geq(M, f, f, mode)
        direct = check_sequent(M, Sequent(Or(f, Common(f)), Or(g, Common(g))))
        assert contrast_geq(M, f, g, JOIN) == direct


def test_contrast_is_not_antisymmetric():
    M = fixture("contrast_antisymmetry_failure.json")
    assert interpret(M, P) != interpret(M, Q)
    assert contrast_geq(M, P, Q) and contrast_geq(M, Q, P)


# -- leniency ------------------------------------------------------------

def test_no_leniency_on_chain_lattice(k2m):
    for c in all_concepts(k2m.context):
        assert no_leniency(k2m.with_atom("p", c), P)


def test_no_leniency_of_top():
    for _, M in random_models(9, 30):
        assert no_leniency(M, TOP)


def test_no_leniency_fails_on_antichain_fixture():
    M = fixture("leniency_3x3.json")
    psi, chi = no_leniency_witness(M, P)
    assert psi.extent == 0b001  # the shared member concept {a1}
    assert not no_leniency(M, Q)


def test_no_leniency_matches_reverse_order_oracle():
    for rng, M in random_models(10, 120):
        exts = [c.extent for c in all_concepts(M.context)]
        f = random_formula(rng, 2, list(M.valuation.atoms), M.frame.agents)
        assert no_leniency(M, f) == no_leniency_reverse(interpret(M, f).extent, exts)


def test_leniency_geq_basics():
    empty_seen = 0
    for rng, M in random_models(11, 60):
        f = random_formula(rng, 2, list(M.valuation.atoms), M.frame.agents)
        assert leniency_geq(M, f, f)
        if interpret(M, BOT).extent == 0:
            empty_seen += 1
            assert leniency_geq(M, f, BOT)
    assert empty_seen > 5


def test_leniency_geq_asymmetric_pair():
    M = fixture("leniency_3x3.json")
    assert leniency_geq(M, P, TOP)
    assert not leniency_geq(M, TOP, P)
    assert leniency_geq_witness(M, TOP, P) == "a1"
