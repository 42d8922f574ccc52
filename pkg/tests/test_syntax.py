import pytest
from hypothesis import given, settings, strategies as st

from epicat.errors import DialectError, ParseError
from epicat.syntax import (
    BOT,
    TOP,
    And,
    Atom,
    Box,
    Common,
    Conominal,
    Dialect,
    Nominal,
    Or,
    Sequent,
    atoms_of,
    depth,
    parse_formula,
    parse_sequent,
    parse_sequent_lines,
    print_formula,
    required_dialect,
    substitute,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")

names = st.sampled_from(["p", "q", "r", "p1", "long_name", "x'"])
leaves = st.one_of(
    st.just(TOP), st.just(BOT), names.map(Atom),
    names.map(Nominal), names.map(Conominal),
)


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: And(*t)),
        st.tuples(children, children).map(lambda t: Or(*t)),
        st.tuples(st.sampled_from(["i", "j", "agent2", "1"]), children).map(lambda t: Box(*t)),
        children.map(Common),
    )


formulas = st.recursive(leaves, _extend, max_leaves=24)


# -- parsing -------------------------------------------------------------

def test_grammar_examples():
    assert parse_formula("[i](p & q) | bot") == Or(Box("i", And(p, q)), BOT)
    assert parse_formula("#a & @x", Dialect.LH) == And(Nominal("a"), Conominal("x"))
    assert parse_formula("p & q | r") == Or(And(p, q), r)
    assert parse_formula("p | q & r") == Or(p, And(q, r))
    assert parse_formula("p & q & r") == And(And(p, q), r)
    assert parse_formula("[i][j]p") == Box("i", Box("j", p))
    assert parse_formula("[ i ] p") == Box("i", p)
    assert parse_formula("[1][2]p") == Box("1", Box("2", p))
    assert parse_formula("C([i]p)") == Common(Box("i", p))


def test_dialect_gates():
    with pytest.raises(DialectError) as e:
        parse_formula("C([i]p)", Dialect.L)
    assert e.value.position == 0
    with pytest.raises(DialectError):
        parse_formula("p & #a", Dialect.LC)
    with pytest.raises(DialectError):
        parse_formula("@x", "L")
    assert parse_formula("C(#a)", "lch") == Common(Nominal("a"))


@pytest.mark.parametrize("text,pos", [
    ("(p & q", 0),
    ("p & q)", 5),
    ("p & ", 4),
    ("p $ q", 2),
    ("C p", 2),
    ("p q", 2),
])
def test_errors_carry_positions(text, pos):
    with pytest.raises(ParseError) as e:
        parse_formula(text)
    assert e.value.position == pos


def test_unknown_agent_and_namespace_clash():
    with pytest.raises(ParseError, match="unknown agent"):
        parse_formula("[k]p", agents=["i", "j"])
    with pytest.raises(ParseError, match="agent name"):
        parse_formula("[i]i", agents=["i"])
    assert parse_formula("[i]p", agents=["i"]) == Box("i", p)


def test_sequents():
    assert parse_sequent("p |- top") == Sequent(p, TOP)
    s = parse_sequent("C(p) |- [i]p & [i]C(p)")
    assert s == Sequent(Common(p), And(Box("i", p), Box("i", Common(p))))
    assert str(s) == "C(p) |- [i]p & [i]C(p)"
    with pytest.raises(ParseError, match="right-hand side"):
        parse_sequent("p |-")
    with pytest.raises(ParseError):
        parse_sequent("p")
    with pytest.raises(ParseError):
        parse_sequent("p |- q |- r")


def test_sequent_lines_skip_comments_and_blanks():
    text = "# header\n\np |- top\n  #a |- top\n\n[i]p |- [i]p\n"
    got = parse_sequent_lines(text)
    assert [n for n, _ in got] == [3, 4, 6]
    assert got[1][1] == Sequent(Nominal("a"), TOP)
    assert parse_sequent_lines("") == []


def test_sequent_lines_report_line_numbers():
    with pytest.raises(ParseError) as e:
        parse_sequent_lines("p |- q\n\np |-\n")
    assert e.value.line == 3
    assert "line 3" in str(e.value)


# -- printing ------------------------------------------------------------

def test_printer_examples():
    assert print_formula(And(p, Or(q, r))) == "p & (q | r)"
    assert print_formula(Box("i", TOP)) == "[i]top"
    assert print_formula(Or(p, Or(q, r))) == "p | (q | r)"
    assert print_formula(Or(Or(p, q), r)) == "p | q | r"
    assert print_formula(Box("i", And(p, q))) == "[i](p & q)"
    assert print_formula(Common(Or(p, q))) == "C(p | q)"
    assert print_formula(And(Nominal("a"), Conominal("x"))) == "#a & @x"


@settings(max_examples=1000, deadline=None)
@given(formulas)
def test_round_trip(f):
    assert parse_formula(print_formula(f)) == f


# -- helpers -------------------------------------------------------------

def test_helpers():
    f = parse_formula("[i](p & C(q)) | #a")
    assert atoms_of(f) == {"p", "q"}
    assert depth(f) == 4
    assert required_dialect(f) == Dialect.LCH
    assert required_dialect(parse_formula("[i]p")) == Dialect.L
    assert substitute(parse_formula("p & [i]p"), {"p": q}) == parse_formula("q & [i]q")
