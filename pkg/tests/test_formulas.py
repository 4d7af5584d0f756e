import threading

import pytest
from hypothesis import given, settings, strategies as st

from potsys.formulas import (And, BigAnd, Box, Dia, Eq, Exists, FALSE, Forall, Formula, Not, Or,
                             ParseError, Rel, TRUE, box_to_dia, mqrank, parse, parse_many, pretty,
                             random_formula, substitute, to_sexpr)
from potsys.structures import parse_signature

from helpers import SIG_R

GOLDEN = [
    "(rel R x y)",
    "(= x y)",
    "(not (rel R x x))",
    "(and)",
    "(or)",
    "(and (rel R x y) (= y z) (not (= x z)))",
    "(exists x (forall y (or (rel R x y) (= x y))))",
    "(dia (exists x (rel R x x)))",
    "(box (not (exists x (rel R x x))))",
    "(rel R @c x)",
]


def test_mqrank_examples():
    assert mqrank(Rel("R", "x", "y")) == 0
    assert mqrank(Dia(Exists("x", Rel("R", "x", "x")))) == 2
    f1 = Exists("x", Rel("R", "x", "x"))
    f3 = Dia(Dia(f1))
    assert mqrank(f1) == 1 and mqrank(f3) == 3
    assert mqrank(And(f1, f3)) == 3
    assert mqrank(Not(f3)) == 3
    assert mqrank(TRUE) == mqrank(FALSE) == 0


def test_hash_consing():
    assert Rel("R", "x", "y") is Rel("R", "x", "y")
    assert And(Eq("x", "y"), Dia(TRUE)) is parse("(and (= x y) (dia (and)))")
    assert Rel("R", "x", "y") is not Rel("R", "y", "x")
    assert BigAnd([Eq("x", "x"), Eq("x", "x")]) is And(Eq("x", "x"))


def test_hash_consing_across_threads():
    out = []

    def build():
        out.append(Forall("q", Exists("w", Rel("Q7", "q", "w"))))

    ts = [threading.Thread(target=build) for _ in range(8)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert all(f is out[0] for f in out)


def test_parse_example():
    assert parse("(dia (exists x (rel R x x)))") is Dia(Exists("x", Rel("R", "x", "x")))


def test_parse_errors():
    with pytest.raises(ParseError, match="end of input"):
        parse("(box f")
    with pytest.raises(ParseError, match="unbalanced"):
        parse("(rel R x))")
    with pytest.raises(ParseError, match="unknown relation"):
        parse("(rel S x)", SIG_R)
    with pytest.raises(ParseError, match="arity"):
        parse("(rel R x)", SIG_R)
    with pytest.raises(ParseError, match="unknown constant"):
        parse("(= x @c)", SIG_R)
    with pytest.raises(ParseError, match="constant"):
        parse("(exists @c (= @c @c))", parse_signature("c"))
    with pytest.raises(ParseError, match="unknown operator"):
        parse("(implies x y)")
    with pytest.raises(ParseError):
        parse("")
    with pytest.raises(ParseError, match="trailing"):
        parse("(and) (or)")


def test_parse_error_position():
    try:
        parse("(and (rel R x y) (foo))")
    except ParseError as e:
        assert e.pos == 18
    else:
        raise AssertionError("no error")


@pytest.mark.parametrize("text", GOLDEN)
def test_print_parse_round_trip(text):
    f = parse(text)
    assert to_sexpr(f) == text
    assert parse(to_sexpr(f)) is f


def test_parse_many_with_comments():
    text = "; theory\n(forall x (not (rel R x x)))  ; irreflexive\n(exists x (= x x))\n"
    fs = parse_many(text, SIG_R)
    assert [to_sexpr(f) for f in fs] == ["(forall x (not (rel R x x)))", "(exists x (= x x))"]


def test_canonical_whitespace():
    assert to_sexpr(parse("  (exists   x\n (rel R x\tx) )")) == "(exists x (rel R x x))"


def test_box_to_dia():
    p = Rel("R", "x", "x")
    assert box_to_dia(Box(p)) is Not(Dia(Not(p)))
    f = Dia(Exists("y", And(p, Rel("R", "x", "y"))))
    assert box_to_dia(f) is f
    g = Forall("x", Box(Or(p, Box(p))))
    assert mqrank(box_to_dia(g)) == mqrank(g)
    assert "box" not in to_sexpr(box_to_dia(g))


def test_substitute_avoids_capture():
    f = Exists("y", Rel("R", "x", "y"))
    g = substitute(f, {"x": "y"})
    assert g.free_vars == {"y"}
    v, body = g.args
    assert v != "y" and body is Rel("R", "y", v)
    assert substitute(f, {"y": "z"}) is f


def test_pretty_reparses():
    f = parse("(and " + " ".join(f"(exists x{i} (rel R x{i} x{i}))" for i in range(6)) + ")")
    text = pretty(f, width=30)
    assert "\n" in text
    assert parse(text) is f


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(0, 3), st.integers(1, 25))
def test_random_formula_contract(seed, rank, size):
    f = random_formula(SIG_R, rank, size, seed, free_vars=("x0",))
    assert mqrank(f) <= rank
    assert f.size <= size
    assert f.free_vars <= {"x0"}
    assert random_formula(SIG_R, rank, size, seed, free_vars=("x0",)) is f
    assert parse(to_sexpr(f)) is f


def test_random_formula_rank_zero_is_quantifier_free():
    for seed in range(100):
        f = random_formula(SIG_R, 0, 12, seed, free_vars=("x0", "x1"))
        assert not f.is_modal and "exists" not in to_sexpr(f) and "forall" not in to_sexpr(f)


def test_random_formula_many_at_rank_three():
    fs = [random_formula(SIG_R, 3, 20, s) for s in range(200)]
    assert all(mqrank(f) <= 3 for f in fs)
    assert max(mqrank(f) for f in fs) == 3
    assert all(not f.free_vars for f in fs)
