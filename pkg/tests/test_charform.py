import random

import pytest
from hypothesis import given, settings, strategies as st

from potsys.charform import (CapExceeded, button_system, button_theta, nu, ordinal_graph, theta, xi)
from potsys.checker import Checker, satisfies_fo
from potsys.formulas import (And, Dia, Exists, FALSE, Forall, Implies, Not, Rel, TRUE, mqrank, parse,
                             random_formula, to_sexpr)
from potsys.games import rank_table
from potsys.refine import Refinement
from potsys.structures import ElementMap, Structure
from potsys.systems import PointedSystem, is_closed

from helpers import SIG_R, identity_system, random_system, relabeled_copy

A = Structure(SIG_R, [0], {"R": []})


def test_theta_examples():
    sa = identity_system(A=A)
    assert theta(PointedSystem(sa, "A", (0,)), 0) is parse("(and (= x0 x0) (not (rel R x0 x0)))")
    assert theta(PointedSystem(sa, "A"), 0) is TRUE
    f = theta(PointedSystem(sa, "A"), 2)
    assert mqrank(f) == 2 and f.free_vars == frozenset()
    assert theta(PointedSystem(sa, "A"), 2) is f


def test_theta_cap():
    p = PointedSystem(identity_system(A=A), "A")
    with pytest.raises(CapExceeded):
        theta(p, 5)
    assert mqrank(theta(p, 5, cap=5)) == 5


def test_theta_cap_from_environment(monkeypatch):
    monkeypatch.setenv("POTSYS_MAX_ALPHA", "1")
    with pytest.raises(CapExceeded):
        theta(PointedSystem(identity_system(A=A), "A"), 2)


def test_theta_phi_dedup():
    # two arrows A -> B with different maps but isomorphic images share one diamond
    from potsys.systems import Arrow, validate_or_close
    B2 = Structure(SIG_R, [0, 1], {"R": []})
    sys = validate_or_close({"A": A, "B": B2}, [Arrow("A", "B", ElementMap({0: 0})),
                                                Arrow("A", "B", ElementMap({0: 1}))], "close")
    f = theta(PointedSystem(sys, "A"), 1)
    # phi over empty tuples: theta_0 of every world is verum, so one diamond only
    dias = [g for g in f.args[2].args]
    assert dias == [Dia(TRUE)]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_theta_tfae(seed):
    rng = random.Random(seed)
    a = random_system(rng)
    b = relabeled_copy(a, rng) if seed % 3 == 0 else random_system(rng, prefix="v")
    t, ref, chk = rank_table(a, b), Refinement(a, b), Checker(b)
    for p, r in t.items():
        x, y = p.tuples()
        for alpha in range(4):
            f = theta(PointedSystem(a, p.left, x), alpha)
            assert mqrank(f) == alpha
            asg = {f"x{i}": e for i, e in enumerate(y)}
            assert chk.satisfies(p.right, asg, f) == (r >= alpha) == (ref.rank(p.left, x, p.right, y) >= alpha)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_theta_self_satisfaction(seed):
    a = random_system(random.Random(seed))
    chk = Checker(a)
    for w, s in a.worlds.items():
        for n in range(3):
            t = tuple(random.Random(seed + n).choice(s.elements) for _ in range(n))
            f = theta(PointedSystem(a, w, t), 3)
            assert chk.satisfies(w, {f"x{i}": e for i, e in enumerate(t)}, f)


def test_xi_examples():
    f = xi(0)
    assert f is And(TRUE, Forall("y", Implies(Rel("R", "y", "x"), FALSE)))
    assert to_sexpr(f) == "(and (and) (forall y (or (not (rel R y x)) (or))))"
    assert xi(3).free_vars == {"x"} and xi(2, var="y").free_vars == {"y"}
    assert nu(3).free_vars == frozenset()
    g = ordinal_graph(2)
    assert satisfies_fo(g, {}, nu(2)) and not satisfies_fo(g, {}, nu(1))
    with pytest.raises(CapExceeded):
        nu(5)


def test_ordinal_graph_examples():
    g0 = ordinal_graph(0)
    assert g0.universe == {0} and not g0.interp["R"]
    g2 = ordinal_graph(2)
    assert g2.interp["R"] == {(0, 1), (0, 2), (1, 2)}


def test_nu_distinguishes_ordinals():
    for a in range(6):
        for b in range(6):
            assert satisfies_fo(ordinal_graph(a, cap=5), {}, nu(b, cap=5)) == (a == b)


def test_xi_heights():
    g = ordinal_graph(4)
    for e in range(5):
        for h in range(5):
            assert satisfies_fo(g, {"x": e}, xi(h)) == (e == h)


def test_button_system_shapes():
    s0, r0 = button_system(0, 0, 1)
    assert list(s0.worlds) == ["r"] and len(s0.arrows) == 1
    s1, r1 = button_system(1, 1, 1)
    assert len(s1.worlds) == 2
    child = s1.structure("r.0")
    assert (1, 2) in child.interp["E"] and (2, 1) in child.interp["E"]
    s3, r3 = button_system(3, 3, 1)
    assert len(s3.worlds) == 8
    assert [w for w in s3.worlds if w.count(".") == 1] == ["r.0", "r.1", "r.2"]
    assert is_closed(s3)
    # every world is an equivalence relation
    for s in s3.worlds.values():
        E = s.interp["E"]
        assert all((x, x) in E for x in s.universe)
        assert all((y, x) in E for x, y in E)
        assert all((x, z) in E for x, y in E for y2, z in E if y == y2)
    with pytest.raises(ValueError):
        button_system(3, 2, 1)


def test_button_theta_shape():
    t0 = button_theta(0)
    assert mqrank(t0) == 3
    assert t0.args[0].args[1].args[1] is TRUE


def test_button_distinguishability():
    roots = [button_system(b, 4, 2) for b in range(4)]
    for b, (s, r) in enumerate(roots):
        chk = Checker(s)
        assert [chk.satisfies(r, {}, button_theta(a)) for a in range(4)] == [a == b for a in range(4)]


def test_button_roots_pairwise_not_bisimilar():
    from potsys.games import is_bisimilar
    roots = [button_system(b, 2, 1) for b in range(3)]
    for i in range(3):
        for j in range(i + 1, 3):
            (si, ri), (sj, rj) = roots[i], roots[j]
            assert not is_bisimilar(PointedSystem(si, ri), PointedSystem(sj, rj), method="refine")
