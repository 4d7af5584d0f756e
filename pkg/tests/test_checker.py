import random

import pytest
from hypothesis import given, settings, strategies as st

from potsys.checker import CheckError, Checker, satisfies, satisfies_fo
from potsys.formulas import Box, Dia, Not, box_to_dia, parse, random_formula
from potsys.structures import ElementMap, Structure, atomic_type, parse_signature
from potsys.systems import Arrow, PotentialistSystem, validate_or_close

from helpers import SIG_R, identity_system, random_structure, random_system

A = Structure(SIG_R, [0], {"R": []})
L = Structure(SIG_R, [0], {"R": [(0, 0)]})
B = Structure(SIG_R, [0, 1], {"R": [(0, 1)]})
AB = validate_or_close({"A": A, "B": B}, [Arrow("A", "B", ElementMap({0: 0}))], "close")


def test_examples():
    assert satisfies(identity_system(L=L), "L", {}, parse("(dia (exists x (rel R x x)))"))
    assert satisfies(identity_system(A=A), "A", {}, parse("(box (not (exists x (rel R x x))))"))
    assert satisfies(AB, "A", {"x": 0}, parse("(dia (exists y (rel R x y)))"))
    assert not satisfies(AB, "A", {"x": 0}, parse("(exists y (rel R x y))"))


def test_fo_examples():
    assert satisfies_fo(B, {}, parse("(exists x (exists y (rel R x y)))"))
    assert satisfies_fo(A, {}, parse("(forall x (not (rel R x x)))"))
    with pytest.raises(CheckError):
        satisfies_fo(A, {}, parse("(dia (and))"))


def test_errors():
    sys = identity_system(A=A)
    with pytest.raises(CheckError, match="unbound"):
        satisfies(sys, "A", {}, parse("(rel R x x)"))
    with pytest.raises(CheckError, match="arity"):
        satisfies(sys, "A", {"x": 0}, parse("(rel R x)"))
    with pytest.raises(CheckError, match="unknown relation"):
        satisfies(sys, "A", {"x": 0}, parse("(rel S x)"))
    with pytest.raises(CheckError, match="not an element"):
        satisfies(sys, "A", {"x": 3}, parse("(rel R x x)"))
    with pytest.raises(CheckError, match="different system"):
        satisfies(sys, "A", {}, parse("(and)"), checker=Checker(identity_system(L=L)))


def test_constants():
    sig = parse_signature("R:2,c")
    s = Structure(sig, [0, 1], {"R": [(0, 1)]}, {"c": 1})
    t = Structure(sig, [0, 1, 2], {"R": [(0, 1), (2, 1)]}, {"c": 1})
    sys = validate_or_close({"s": s, "t": t}, [Arrow("s", "t", ElementMap({0: 0, 1: 1}))], "close")
    f = parse("(forall x (or (= x @c) (rel R x @c)))", sig)
    assert satisfies(sys, "s", {}, f) and satisfies(sys, "s", {}, Box(f))
    two = parse("(exists x (exists y (and (not (= x y)) (rel R x @c) (rel R y @c))))", sig)
    assert not satisfies(sys, "s", {}, two)
    assert satisfies(sys, "s", {}, Dia(two))
    with pytest.raises(CheckError, match="unknown constant"):
        satisfies(sys, "s", {}, parse("(= @d @d)"))


def _sample(seed):
    rng = random.Random(seed)
    sys = random_system(rng)
    w = rng.choice(list(sys.worlds))
    elems = sys.structure(w).elements
    asg = {"x0": rng.choice(elems), "x1": rng.choice(elems)}
    f = random_formula(SIG_R, 3, 14, seed, free_vars=("x0", "x1"))
    return sys, w, asg, f


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_box_dia_duality_and_reflexivity(seed):
    sys, w, asg, f = _sample(seed)
    c = Checker(sys)
    assert c.satisfies(w, asg, Box(f)) == c.satisfies(w, asg, Not(Dia(Not(f))))
    assert c.satisfies(w, asg, f) == c.satisfies(w, asg, box_to_dia(f))
    if c.satisfies(w, asg, f):
        assert c.satisfies(w, asg, Dia(f))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_fo_agrees_with_modal_checker_on_identity_systems(seed):
    rng = random.Random(seed)
    s = random_structure(rng, rng.randint(1, 3))
    f = random_formula(SIG_R, 3, 16, seed, free_vars=("x0",))
    if f.is_modal:
        # strip modalities by reading them in the identity-only system: both sides agree there
        assert satisfies(identity_system(S=s), "S", {"x0": 0}, f) == \
            satisfies(identity_system(S=s), "S", {"x0": 0}, Dia(f))
        return
    assert satisfies_fo(s, {"x0": 0}, f) == satisfies(identity_system(S=s), "S", {"x0": 0}, f)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_identity_only_world_ignores_dia(seed):
    rng = random.Random(seed)
    s = random_structure(rng, rng.randint(1, 3))
    sys = identity_system(S=s)
    f = random_formula(SIG_R, 3, 16, seed)
    assert satisfies(sys, "S", {}, f) == satisfies(sys, "S", {}, Dia(f))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_arrows_preserve_atomic_literals(seed):
    rng = random.Random(seed)
    sys = random_system(rng)
    for a in sys.arrows:
        s = sys.structure(a.src)
        t = tuple(rng.choice(s.elements) for _ in range(2))
        assert atomic_type(s, t) == atomic_type(sys.structure(a.dst), a.map(t))


def test_memo_reuse():
    c = Checker(AB)
    f = parse("(dia (exists y (rel R x y)))")
    assert c.satisfies("A", {"x": 0}, f)
    n = len(c.memo)
    assert c.satisfies("A", {"x": 0, "z": 0}, f)
    assert len(c.memo) == n
