"""Satisfaction of modal formulas at worlds of a potentialist system."""

from __future__ import annotations

from typing import Mapping

from .formulas import Formula, FormulaError, is_constant
from .structures import Structure


class CheckError(FormulaError):
    pass


class Checker:
    """Memoizing evaluator bound to one system.

    Memo keys are ``(world, formula, values of the formula's free variables)``;
    formulas are hash-consed so identity keys are sound.
    """

    def __init__(self, system):
        self.system = system
        self.memo: dict = {}
        self._validated: set = set()

    def _validate(self, f: Formula):
        if f in self._validated:
            return
        sig = self.system.signature
        arity = sig.arity
        stack = [f]
        seen = set()
        while stack:
            g = stack.pop()
            if g in seen or g in self._validated:
                continue
            seen.add(g)
            terms = ()
            if g.kind == "rel":
                name, terms = g.args
                if name not in arity:
                    raise CheckError(f"unknown relation symbol {name!r}")
                if arity[name] != len(terms):
                    raise CheckError(f"arity mismatch for {name}")
            elif g.kind == "=":
                terms = g.args
            for t in terms:
                if is_constant(t) and t[1:] not in sig.constants:
                    raise CheckError(f"unknown constant {t[1:]!r}")
            stack.extend(g.children)
        self._validated |= seen

    def satisfies(self, world, asg: Mapping, f: Formula) -> bool:
        self._validate(f)
        missing = f.free_vars - set(asg)
        if missing:
            raise CheckError(f"unbound free variables: {sorted(missing)}")
        s = self.system.structure(world)
        for v in f.free_vars:
            if asg[v] not in s.universe:
                raise CheckError(f"{v} = {asg[v]!r} is not an element of world {world!r}")
        return self._sat(world, asg, f)

    def _sat(self, world, asg, f: Formula) -> bool:
        fv = f.free_vars_sorted
        key = (world, f, tuple(asg[v] for v in fv))
        memo = self.memo
        hit = memo.get(key)
        if hit is not None:
            return hit
        k = f.kind
        s: Structure = self.system.structure(world)
        if k == "rel":
            name, terms = f.args
            val = tuple(_term(s, asg, t) for t in terms) in s.interp[name]
        elif k == "=":
            val = _term(s, asg, f.args[0]) == _term(s, asg, f.args[1])
        elif k == "not":
            val = not self._sat(world, asg, f.args[0])
        elif k == "and":
            val = all(self._sat(world, asg, g) for g in f.args)
        elif k == "or":
            val = any(self._sat(world, asg, g) for g in f.args)
        elif k == "exists" or k == "forall":
            v, body = f.args
            base = {x: asg[x] for x in body.free_vars if x != v}
            results = (self._sat(world, {**base, v: e}, body) for e in s.elements)
            val = any(results) if k == "exists" else all(results)
        else:
            g = f.args[0]
            gfv = g.free_vars
            results = (self._sat(a.dst, {x: a.map[asg[x]] for x in gfv}, g)
                       for a in self.system.arrows_from(world))
            val = any(results) if k == "dia" else all(results)
        memo[key] = val
        return val


def _term(s: Structure, asg, t):
    if is_constant(t):
        return s.constant_vals[t[1:]]
    return asg[t]


def satisfies(system, world, asg: Mapping, f: Formula, checker: Checker | None = None) -> bool:
    """``system, world ⊨ f[asg]``. Pass a ``checker`` to share memo tables across calls."""
    if checker is None:
        checker = Checker(system)
    elif checker.system is not system:
        raise CheckError("checker is bound to a different system")
    return checker.satisfies(world, asg, f)


def satisfies_fo(s: Structure, asg: Mapping, f: Formula) -> bool:
    """First-order satisfaction in a single structure; modal operators are rejected."""
    if f.is_modal:
        raise CheckError("modal operator in a first-order formula")
    missing = f.free_vars - set(asg)
    if missing:
        raise CheckError(f"unbound free variables: {sorted(missing)}")
    return _fo(s, dict(asg), f)


def _fo(s: Structure, asg: dict, f: Formula) -> bool:
    k = f.kind
    if k == "rel":
        name, terms = f.args
        if name not in s.interp:
            raise CheckError(f"unknown relation symbol {name!r}")
        return tuple(_term(s, asg, t) for t in terms) in s.interp[name]
    if k == "=":
        return _term(s, asg, f.args[0]) == _term(s, asg, f.args[1])
    if k == "not":
        return not _fo(s, asg, f.args[0])
    if k == "and":
        return all(_fo(s, asg, g) for g in f.args)
    if k == "or":
        return any(_fo(s, asg, g) for g in f.args)
    v, body = f.args
    results = (_fo(s, {**asg, v: e}, body) for e in s.elements)
    return any(results) if k == "exists" else all(results)
