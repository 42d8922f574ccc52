import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from epicat import formats
from epicat.context import all_concepts
from epicat.errors import IncompatibleRelationError, NotAConceptError, ParseError, UnknownNameError
from epicat.harness import FuzzConfig, random_context, random_model

from conftest import FIXTURES, k2_context


def test_parse_cxt_k2():
    ctx = formats.parse_cxt((FIXTURES / "k2.cxt").read_text())
    assert ctx == k2_context()


def test_cxt_with_name_line_and_lowercase_marks():
    text = "B\nmy context\n\n2\n1\n\nfoo\nbar\nattr\nx\n.\n"
    ctx = formats.parse_cxt(text)
    assert ctx.objects == ("foo", "bar") and ctx.features == ("attr",)
    assert ctx.incidence.rows == (1, 0)


@pytest.mark.parametrize("text,line", [
    ("A\n\n1\n1\na\nx\nX\n", 1),
    ("B\n\n1\nq\na\nx\nX\n", 4),
    ("B\n\n1\n1\na\nx\nXX\n", 7),
    ("B\n\n1\n1\na\nx\nX\nextra\n", 8),
    ("B\n\n2\n1\na\n", 6),
    ("B\n\n2\n1\na\na\nx\nX\nX\n", 1),
])
def test_cxt_errors_name_lines(text, line):
    with pytest.raises(ParseError) as e:
        formats.parse_cxt(text)
    assert e.value.line == line


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000))
def test_cxt_and_json_round_trips(seed):
    rng = random.Random(seed)
    ctx = random_context(rng, rng.randint(1, 6), rng.randint(1, 6))
    text = formats.format_cxt(ctx)
    again = formats.parse_cxt(text)
    assert again == ctx
    assert formats.format_cxt(again) == text
    d = formats.context_to_dict(ctx)
    assert formats.context_from_dict(json.loads(json.dumps(d))) == ctx


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000))
def test_model_json_round_trip(seed):
    M = random_model(FuzzConfig(), random.Random(seed))
    d = formats.model_to_dict(M)
    d2 = formats.model_to_dict(formats.model_from_dict(json.loads(formats.dumps(d))))
    assert d == d2


def test_atom_given_by_intent(k2):
    data = formats.context_to_dict(k2)
    data["valuation"] = {"atoms": {"p": {"intent": ["x1"]}}}
    M = formats.model_from_dict(data)
    assert M.valuation.atoms["p"].extent == 0b01


def test_unstable_atom_extent_suggests_closure(k2):
    data = formats.context_to_dict(k2)
    data["valuation"] = {"atoms": {"p": {"extent": ["a2"]}}}
    with pytest.raises(NotAConceptError, match=r"\['a1', 'a2'\]"):
        formats.model_from_dict(data)


def test_incompatible_relation_strict_and_repair(k2):
    data = formats.context_to_dict(k2)
    data["agents"] = {"i": [["a2", "x2"]]}
    with pytest.raises(IncompatibleRelationError):
        formats.model_from_dict(data)
    M = formats.model_from_dict(data, repair=True)
    assert M.frame.relations["i"] == k2.incidence


def test_bad_documents():
    with pytest.raises(ParseError):
        formats.context_from_dict({"objects": ["a"]})
    with pytest.raises(ParseError):
        formats.context_from_dict({"objects": ["a"], "features": ["x"], "incidence": [["a"]]})
    with pytest.raises(UnknownNameError):
        formats.context_from_dict({"objects": ["a"], "features": ["x"], "incidence": [["a", "y"]]})
    with pytest.raises(ParseError):
        formats.model_from_dict({"objects": ["a"], "features": ["x"], "valuation": {"atoms": {"p": 3}}})


def test_malformed_json_has_position():
    with pytest.raises(ParseError) as e:
        formats.load_json(FIXTURES / "malformed.json")
    assert e.value.line == 2


def test_load_context_accepts_cxt_json_and_models():
    a = formats.load_context(FIXTURES / "k2.cxt")
    b = formats.load_context(FIXTURES / "k2.json")
    c = formats.load_context(FIXTURES / "k2_two_agents.json")
    assert a == b == c


def test_cxt_model_has_no_agents():
    M = formats.load_model(FIXTURES / "k2.cxt")
    assert M.frame.relations == {}


def test_concepts_report_and_dot(k2):
    rep = formats.concepts_report(k2)
    assert rep == {
        "concepts": [{"extent": ["a1"], "intent": ["x1", "x2"]}, {"extent": ["a1", "a2"], "intent": ["x2"]}],
        "covers": [[0, 1]],
    }
    dot = formats.concepts_dot(k2)
    assert dot.startswith("digraph concepts {") and "c0 -> c1;" in dot
    assert dot.count("label=") == len(all_concepts(k2))
