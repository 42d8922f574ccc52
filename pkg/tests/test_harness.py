import itertools
import random

import pytest

from epicat import formats
from epicat.context import Relation
from epicat.errors import SearchBoundError
from epicat.harness import (
    FuzzConfig,
    SearchBounds,
    Verdict,
    compatible_relations,
    countermodel_search,
    enumerate_contexts,
    enumerate_models,
    estimate_models,
    find_model,
    lattice_shape,
    random_context,
    random_model,
    soundness_fuzz,
    _all_compatible_naive,
)
from epicat.relations import is_compatible
from epicat.semantics import check_sequent
from epicat.syntax import parse_sequent

from conftest import FIXTURES

# distinct concept-lattice shapes among 1000 random 3x3 contexts at seed 0
SHAPES_3X3_SEED0 = 11


def iso_classes(n, m):
    """Isomorphism classes of n x m contexts by brute force over all permutations."""
    seen = set()
    for rows in itertools.product(range(1 << m), repeat=n):
        key = min(
            tuple(sorted(sum((r >> fp[x] & 1) << x for x in range(m)) for r in (rows[op[a]] for a in range(n))))
            for op in itertools.permutations(range(n))
            for fp in itertools.permutations(range(m))
        )
        seen.add(key)
    return seen


# -- generators ----------------------------------------------------------

def test_random_model_is_deterministic():
    cfg = FuzzConfig(seed=9)
    a = [formats.model_to_dict(random_model(cfg, random.Random(5))) for _ in range(3)]
    b = [formats.model_to_dict(random_model(cfg, random.Random(5))) for _ in range(3)]
    assert a == b


def test_random_models_are_compatible():
    cfg = FuzzConfig()
    rng = random.Random(0)
    for _ in range(200):
        M = random_model(cfg, rng)
        for R in M.frame.relations.values():
            assert is_compatible(M.context, R)


def test_lattice_shape_variety():
    rng = random.Random(0)
    shapes = {lattice_shape(random_context(rng, 3, 3)) for _ in range(1000)}
    assert len(shapes) >= 2
    assert len(shapes) == SHAPES_3X3_SEED0


def test_config_validation():
    with pytest.raises(ValueError):
        FuzzConfig(max_objects=0)
    with pytest.raises(ValueError):
        FuzzConfig(min_objects=3, max_objects=2)
    with pytest.raises(ValueError):
        SearchBounds(max_agents=0)


# -- fuzzing -------------------------------------------------------------

def test_fuzz_small_run_is_clean_and_replayable():
    cfg = FuzzConfig(seed=42, num_models=30, instantiations=10)
    r1, r2 = soundness_fuzz(cfg), soundness_fuzz(cfg)
    assert r1.ok
    assert r1.to_dict() == r2.to_dict()
    assert r1.checks["C-induction"] > 0
    assert r1.nonvacuous_rules["C-induction"] > 0
    assert r1.nonvacuous_rules["box-mono"] > 0


def test_fuzz_degenerate_single_agent():
    cfg = FuzzConfig(seed=1, num_models=20, instantiations=10, max_objects=1, max_features=1, max_agents=1)
    assert soundness_fuzz(cfg).ok


def test_fuzz_basic_language_only():
    cfg = FuzzConfig(seed=2, num_models=30, instantiations=10, common=False)
    rep = soundness_fuzz(cfg)
    assert rep.ok
    assert "C-induction" not in rep.checks


# -- enumeration ---------------------------------------------------------

@pytest.mark.parametrize("n,m", [(1, 1), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3)])
def test_canonical_contexts_one_per_isomorphism_class(n, m):
    got = list(enumerate_contexts(n, m))
    assert len(got) == len(iso_classes(n, m))


def test_compatible_relations_match_naive_filter():
    rng = random.Random(3)
    for _ in range(60):
        ctx = random_context(rng, rng.randint(1, 3), rng.randint(1, 3))
        fast = compatible_relations(ctx)
        assert set(fast) == set(_all_compatible_naive(ctx))
        assert len(fast) == len(set(fast))


# -- countermodel search -------------------------------------------------

def test_axioms_are_valid_up_to_bound():
    for text in ["p |- top", "[i]p & [i]q |- [i](p & q)", "top |- [i]top"]:
        rep = countermodel_search(parse_sequent(text))
        assert rep.verdict is Verdict.VALID_UP_TO_BOUND and rep.witness is None


def test_box_is_not_extensive():
    rep = countermodel_search(parse_sequent("p |- [i]p"))
    assert rep.verdict is Verdict.COUNTERMODEL
    reloaded = formats.model_from_dict(rep.to_dict()["witness"])
    assert not check_sequent(reloaded, rep.sequent)
    stored = formats.load_model(FIXTURES / "p_box_p_countermodel.json")
    assert formats.model_to_dict(stored) == formats.model_to_dict(rep.witness)


def test_common_axiom_at_small_bounds():
    rep = countermodel_search(parse_sequent("C(p) |- [i]p & [i]C(p)"), SearchBounds(2, 2, 2))
    assert rep.verdict is Verdict.VALID_UP_TO_BOUND
    rep = countermodel_search(parse_sequent("[i]p |- C(p)"), SearchBounds(2, 2, 2))
    assert rep.verdict is Verdict.COUNTERMODEL


def test_search_refuses_oversized_space():
    s = parse_sequent("C(p) & C(q) |- C(p & q)")
    with pytest.raises(SearchBoundError) as e:
        countermodel_search(s, SearchBounds(3, 3, 2, max_models=1000))
    assert e.value.estimate > 1000
    # the estimate bounds the true count from above
    for b in [SearchBounds(1, 1, 1), SearchBounds(2, 2, 1), SearchBounds(2, 3, 2)]:
        actual = sum(1 for _ in enumerate_models(b, [["i"]], ["p"]))
        assert actual <= estimate_models(b, [["i"]], 1)
    assert estimate_models(SearchBounds(1, 1, 1), [["i"]], 1) == 2 * 2 + 1 * 1


@pytest.mark.parametrize("text", [
    "p |- [i]p",
    "[i]p |- p",
    "p & q |- p",
    "[i](p | q) |- [i]p | [i]q",
    "C(p) |- [i]p & [i]C(p)",
    "[i][j]p |- [j][i]p",
    "#a |- p",
])
def test_naive_enumerator_agrees_at_two_by_two(text):
    s = parse_sequent(text)
    bounds = SearchBounds(2, 2, 2)
    fast = countermodel_search(s, bounds)
    naive = countermodel_search(s, bounds, canonical=False)
    assert fast.verdict is naive.verdict
    assert naive.models_examined >= fast.models_examined or fast.verdict is Verdict.COUNTERMODEL


def test_find_model_returns_first_match():
    M = find_model(lambda M: len(M.frame.relations["i"].pairs()) == 0, SearchBounds(2, 2, 1), ["i"], [])
    assert M is not None
    assert M.frame.relations["i"] == Relation.empty(M.context.n_objects, M.context.n_features)
    assert find_model(lambda M: False, SearchBounds(1, 1, 1), ["i"], []) is None
