"""Characteristic formulas and the ordinal and button families.

``theta(p, a)`` is satisfied by a pointed system exactly when the game position
against ``p`` has rank at least ``a``. ``xi``/``nu`` pin down finite ordinals
(as strict orders) first-order; ``button_system``/``button_theta`` build a tree
of worlds whose roots are separated by modal sentences of increasing rank.
"""

from __future__ import annotations

import os
import threading
import weakref

from .formulas import (And, BigAnd, BigOr, Box, Dia, Eq, Exists, Forall, Formula,
                       Implies, Neq, Not, Rel)
from .structures import ElementMap, Signature, Structure, atomic_type
from .systems import Arrow, PointedSystem, PotentialistSystem, validate_or_close


class CapExceeded(ValueError):
    pass


def default_cap() -> int:
    return int(os.environ.get("POTSYS_MAX_ALPHA", "4"))


def _check_cap(alpha: int, cap: int | None):
    cap = default_cap() if cap is None else cap
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha > cap:
        raise CapExceeded(f"alpha {alpha} exceeds cap {cap}")


def _var(i: int) -> str:
    return f"x{i}"


def literal_formula(lit) -> Formula:
    atom = Eq(*lit.terms) if lit.symbol == "=" else Rel(lit.symbol, *lit.terms)
    return atom if lit.positive else Not(atom)


# characteristic formulas ----------------------------------------------------

_memos: "weakref.WeakKeyDictionary[PotentialistSystem, dict]" = weakref.WeakKeyDictionary()
_memo_lock = threading.Lock()


def _memo_for(system) -> dict:
    with _memo_lock:
        memo = _memos.get(system)
        if memo is None:
            memo = _memos[system] = {}
        return memo


def theta(p: PointedSystem, alpha: int, cap: int | None = None) -> Formula:
    """Characteristic formula of rank ``alpha`` with free variables x0..x(n-1)."""
    _check_cap(alpha, cap)
    return _theta(p.system, _memo_for(p.system), p.world, tuple(p.params), alpha)


def _theta(sys, memo, world, t, alpha) -> Formula:
    key = (world, t, alpha)
    f = memo.get(key)
    if f is not None:
        return f
    s = sys.structure(world)
    if alpha == 0:
        f = BigAnd(literal_formula(lit) for lit in atomic_type(s, t))
    else:
        n = len(t)
        y = _var(n)
        ext = [_theta(sys, memo, world, t + (u,), alpha - 1) for u in s.elements]
        # distinct arrows often give the same formula; keep one copy of each
        phi = list(dict.fromkeys(_theta(sys, memo, a.dst, a.map(t), alpha - 1)
                                 for a in sys.arrows_from(world)))
        f = And(BigAnd(Exists(y, g) for g in ext),
                Forall(y, BigOr(ext)),
                BigAnd(Dia(g) for g in phi),
                Box(BigOr(phi)))
    memo[key] = f
    return f


# ordinals -------------------------------------------------------------------

ORDER_SIG = Signature((("R", 2),), ())


def xi(alpha: int, var: str = "x", cap: int | None = None) -> Formula:
    """``var`` sits at height exactly ``alpha`` in a well-founded R-order."""
    _check_cap(alpha, cap)
    return _xi(alpha, var)


def _xi(alpha: int, var: str) -> Formula:
    other = "y" if var == "x" else "x"
    below = [_xi(b, other) for b in range(alpha)]
    return And(BigAnd(Exists(other, And(Rel("R", other, var), g)) for g in below),
               Forall(other, Implies(Rel("R", other, var), BigOr(below))))


def nu(alpha: int, cap: int | None = None) -> Formula:
    """Some R-maximal element has height ``alpha``."""
    _check_cap(alpha, cap)
    return Exists("x", And(Forall("y", Not(Rel("R", "x", "y"))), _xi(alpha, "x")))


def ordinal_graph(alpha: int, cap: int | None = None) -> Structure:
    """{0..alpha} under the strict order."""
    _check_cap(alpha, cap)
    u = range(alpha + 1)
    s = Structure(ORDER_SIG, u, {"R": {(i, j) for i in u for j in u if i < j}})
    tops = [x for x in u if not any((x, y) in s.interp["R"] for y in u)]
    assert tops == [alpha]
    return s


# buttons --------------------------------------------------------------------

BUTTON_SIG = Signature((("E", 2),), ())


def button_structure(k: int, base: int, pushed: int) -> Structure:
    """Base singletons 0..base-1, buttons u_i = base+i (i<k); pushed buttons gain
    a partner v_i = base+k+i in their class."""
    u = list(range(base + k + pushed))
    E = {(x, x) for x in u}
    for i in range(pushed):
        a, b = base + i, base + k + i
        E |= {(a, b), (b, a)}
    return Structure(BUTTON_SIG, u, {"E": E})


def _tree(alpha: int, path: tuple = ()):
    """Nodes of the tree whose root has one child subtree for each beta < alpha."""
    yield path
    for b in range(alpha):
        yield from _tree(b, path + (b,))


def node_name(path: tuple) -> str:
    return "r" + "".join(f".{b}" for b in path)


def button_system(alpha: int, k: int, base: int = 1, cap: int | None = None):
    """Worlds indexed by tree nodes; a node at depth d has its first d buttons pushed.
    Returns ``(system, root world id)``."""
    _check_cap(alpha, cap)
    if k < alpha:
        raise ValueError(f"need at least {alpha} buttons, got {k}")
    if base < 0:
        raise ValueError("base size must be >= 0")
    worlds, arrows = {}, []
    for path in _tree(alpha):
        w = node_name(path)
        worlds[w] = button_structure(k, base, len(path))
        arrows.append(Arrow(w, w, ElementMap.identity(worlds[w].universe)))
        if path:
            parent = node_name(path[:-1])
            arrows.append(Arrow(parent, w, ElementMap.identity(worlds[parent].universe)))
    sys = validate_or_close(worlds, arrows, mode="close", name=f"buttons{alpha}")
    return sys, node_name(())


def _single(x: str) -> Formula:
    return Not(Exists("y", And(Neq(x, "y"), Rel("E", x, "y"))))


def _paired(x: str) -> Formula:
    return Exists("y", And(Neq(x, "y"), Rel("E", x, "y")))


def button_theta(alpha: int, cap: int | None = None) -> Formula:
    """Sentence true at the root of ``button_system(beta, ...)`` exactly when beta = alpha."""
    _check_cap(alpha, cap)
    return _button_theta(alpha)


def _button_theta(alpha: int) -> Formula:
    lower = [_button_theta(b) for b in range(alpha)]
    return And(Exists("x", And(_single("x"), BigAnd(Dia(And(_paired("x"), g)) for g in lower))),
               Forall("x", Implies(_single("x"), Box(Implies(_paired("x"), BigOr(lower))))))


__all__ = ["CapExceeded", "theta", "xi", "nu", "ordinal_graph", "button_system",
           "button_structure", "button_theta", "literal_formula", "ORDER_SIG", "BUTTON_SIG"]
