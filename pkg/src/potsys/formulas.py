"""Hash-consed formulas of the finitary modal language, with an s-expression front end.

Terms are variable names; a term spelled ``@c`` denotes the constant ``c``.
Structurally equal formulas are the same object, so identity comparison and
identity-keyed memo tables are sound.
"""

from __future__ import annotations

import random
import threading
from typing import Iterable

KINDS = ("rel", "=", "not", "and", "or", "exists", "forall", "dia", "box")
_UNARY = ("not", "dia", "box")
_QUANT = ("exists", "forall")


class FormulaError(ValueError):
    pass


class ParseError(FormulaError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


def is_constant(term: str) -> bool:
    return term.startswith("@")


class Formula:
    __slots__ = ("kind", "args", "_fv", "_rank", "_size", "_modal", "__weakref__")

    _table: dict = {}
    _lock = threading.Lock()

    def __new__(cls, kind: str, args: tuple):
        key = (kind, args)
        f = cls._table.get(key)
        if f is not None:
            return f
        with cls._lock:
            f = cls._table.get(key)
            if f is None:
                f = object.__new__(cls)
                f.kind = kind
                f.args = args
                f._fv = f._rank = f._size = f._modal = None
                cls._table[key] = f
        return f

    def __reduce__(self):
        return (Formula, (self.kind, self.args))

    @property
    def children(self) -> tuple["Formula", ...]:
        k = self.kind
        if k in _UNARY:
            return self.args
        if k in ("and", "or"):
            return self.args
        if k in _QUANT:
            return (self.args[1],)
        return ()

    @property
    def free_vars(self) -> frozenset:
        if self._fv is None:
            k = self.kind
            if k == "rel":
                fv = frozenset(t for t in self.args[1] if not is_constant(t))
            elif k == "=":
                fv = frozenset(t for t in self.args if not is_constant(t))
            elif k in _QUANT:
                fv = self.args[1].free_vars - {self.args[0]}
            else:
                fv = frozenset().union(*(c.free_vars for c in self.children))
            self._fv = fv
        return self._fv

    @property
    def free_vars_sorted(self) -> tuple:
        return tuple(sorted(self.free_vars))

    @property
    def size(self) -> int:
        """Node count of the formula read as a tree."""
        if self._size is None:
            self._size = 1 + sum(c.size for c in self.children)
        return self._size

    @property
    def is_modal(self) -> bool:
        if self._modal is None:
            self._modal = self.kind in ("dia", "box") or any(c.is_modal for c in self.children)
        return self._modal

    def __repr__(self):
        s = to_sexpr(self)
        return f"<Formula {s if len(s) < 80 else s[:77] + '...'}>"

    def __str__(self):
        return to_sexpr(self)


# constructors -------------------------------------------------------------

def Rel(name: str, *terms: str) -> Formula:
    return Formula("rel", (name, tuple(terms)))


def Eq(a: str, b: str) -> Formula:
    return Formula("=", (a, b))


def Not(f: Formula) -> Formula:
    return Formula("not", (f,))


def _dedup(fs: Iterable[Formula]) -> tuple:
    seen = {}
    for f in fs:
        seen.setdefault(f, None)
    return tuple(seen)


def And(*fs: Formula) -> Formula:
    return Formula("and", tuple(fs))


def Or(*fs: Formula) -> Formula:
    return Formula("or", tuple(fs))


def BigAnd(fs: Iterable[Formula]) -> Formula:
    """Conjunction with duplicate arguments removed (first occurrence kept)."""
    return Formula("and", _dedup(fs))


def BigOr(fs: Iterable[Formula]) -> Formula:
    return Formula("or", _dedup(fs))


def Exists(v: str, f: Formula) -> Formula:
    return Formula("exists", (v, f))


def Forall(v: str, f: Formula) -> Formula:
    return Formula("forall", (v, f))


def Dia(f: Formula) -> Formula:
    return Formula("dia", (f,))


def Box(f: Formula) -> Formula:
    return Formula("box", (f,))


def Implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def Neq(a: str, b: str) -> Formula:
    return Not(Eq(a, b))


TRUE = And()
FALSE = Or()


# rank ---------------------------------------------------------------------

def mqrank(f: Formula) -> int:
    """Modal-quantifier rank: quantifiers and modalities add one, connectives take the max."""
    if f._rank is None:
        k = f.kind
        if k in ("rel", "="):
            r = 0
        elif k in ("not",):
            r = mqrank(f.args[0])
        elif k in ("and", "or"):
            r = max((mqrank(c) for c in f.args), default=0)
        elif k in _QUANT:
            r = mqrank(f.args[1]) + 1
        else:
            r = mqrank(f.args[0]) + 1
        f._rank = r
    return f._rank


def box_to_dia(f: Formula, _memo=None) -> Formula:
    """Rewrite every ``(box g)`` as ``(not (dia (not g)))``."""
    memo = {} if _memo is None else _memo
    if f in memo:
        return memo[f]
    k = f.kind
    if k in ("rel", "="):
        out = f
    elif k in _QUANT:
        out = Formula(k, (f.args[0], box_to_dia(f.args[1], memo)))
    elif k == "box":
        out = Not(Dia(Not(box_to_dia(f.args[0], memo))))
    else:
        out = Formula(k, tuple(box_to_dia(c, memo) for c in f.args))
    memo[f] = out
    return out


def substitute(f: Formula, mapping: dict[str, str]) -> Formula:
    """Capture-avoiding renaming of free variables."""
    mapping = {k: v for k, v in mapping.items() if k in f.free_vars and k != v}
    if not mapping:
        return f
    k = f.kind
    if k == "rel":
        return Rel(f.args[0], *(mapping.get(t, t) for t in f.args[1]))
    if k == "=":
        return Eq(*(mapping.get(t, t) for t in f.args))
    if k in _QUANT:
        v, body = f.args
        inner = {a: b for a, b in mapping.items() if a != v}
        if v in inner.values():
            taken = set(body.free_vars) | set(inner.values()) | set(inner)
            i = 0
            while f"{v}_{i}" in taken:
                i += 1
            fresh = f"{v}_{i}"
            body = substitute(body, {v: fresh})
            v = fresh
        return Formula(k, (v, substitute(body, inner)))
    return Formula(k, tuple(substitute(c, mapping) for c in f.args))


# printing -----------------------------------------------------------------

def to_sexpr(f: Formula) -> str:
    parts: list[str] = []

    def emit(g):
        k = g.kind
        if k == "rel":
            parts.append("(rel " + " ".join((g.args[0],) + g.args[1]) + ")")
        elif k == "=":
            parts.append(f"(= {g.args[0]} {g.args[1]})")
        elif k in _QUANT:
            parts.append(f"({k} {g.args[0]} ")
            emit(g.args[1])
            parts.append(")")
        else:
            parts.append("(" + k)
            for c in g.args:
                parts.append(" ")
                emit(c)
            parts.append(")")

    emit(f)
    return "".join(parts)


def pretty(f: Formula, width: int = 78, indent: int = 0) -> str:
    """Multi-line rendering that breaks lists wider than ``width``."""
    flat = to_sexpr(f)
    if len(flat) + indent <= width or f.kind in ("rel", "="):
        return flat
    pad = " " * (indent + 2)
    if f.kind in _QUANT:
        head = f"({f.kind} {f.args[0]}"
        kids = [f.args[1]]
    else:
        head = f"({f.kind}"
        kids = list(f.args)
    lines = [head] + [pad + pretty(c, width, indent + 2) for c in kids]
    return "\n".join(lines) + ")"


# parsing ------------------------------------------------------------------

def _tokens(text: str):
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c.isspace():
            i += 1
        elif c in "()":
            yield c, i
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            yield text[i:j], i
            i = j


def _read_sexprs(text: str) -> list:
    stack: list[list] = [[]]
    opens: list[int] = []
    for tok, pos in _tokens(text):
        if tok == "(":
            stack.append([])
            opens.append(pos)
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", pos)
            done = stack.pop()
            start = opens.pop()
            stack[-1].append((done, start))
        else:
            stack[-1].append((tok, pos))
    if len(stack) > 1:
        raise ParseError("unexpected end of input (unclosed '(' opened at %d)" % opens[-1], len(text))
    return stack[0]


def _build(node, sig) -> Formula:
    item, pos = node
    if isinstance(item, str):
        raise ParseError(f"expected a formula, got atom {item!r}", pos)
    if not item:
        raise ParseError("empty list", pos)
    head, hpos = item[0]
    if not isinstance(head, str):
        raise ParseError("operator expected", hpos)
    rest = item[1:]

    def atoms(nodes):
        out = []
        for it, p in nodes:
            if not isinstance(it, str):
                raise ParseError("term expected", p)
            out.append(it)
        return out

    if head == "rel":
        if not rest:
            raise ParseError("relation name expected", hpos)
        name, *terms = atoms(rest)
        if sig is not None:
            arity = sig.arity
            if name not in arity:
                raise ParseError(f"unknown relation symbol {name!r}", rest[0][1])
            if arity[name] != len(terms):
                raise ParseError(f"arity mismatch for {name}: expected {arity[name]}, got {len(terms)}", pos)
        if not terms:
            raise ParseError("relation needs at least one term", pos)
        _check_terms(terms, sig, pos)
        return Rel(name, *terms)
    if head == "=":
        terms = atoms(rest)
        if len(terms) != 2:
            raise ParseError("'=' takes two terms", pos)
        _check_terms(terms, sig, pos)
        return Eq(*terms)
    if head in _UNARY:
        if len(rest) != 1:
            raise ParseError(f"'{head}' takes one argument", pos)
        return Formula(head, (_build(rest[0], sig),))
    if head in ("and", "or"):
        return Formula(head, tuple(_build(r, sig) for r in rest))
    if head in _QUANT:
        if len(rest) != 2 or not isinstance(rest[0][0], str):
            raise ParseError(f"'{head}' takes a variable and a formula", pos)
        v = rest[0][0]
        if is_constant(v):
            raise ParseError("cannot quantify over a constant", rest[0][1])
        return Formula(head, (v, _build(rest[1], sig)))
    raise ParseError(f"unknown operator {head!r}", hpos)


def _check_terms(terms, sig, pos):
    for t in terms:
        if is_constant(t) and sig is not None and t[1:] not in sig.constants:
            raise ParseError(f"unknown constant {t[1:]!r}", pos)


def parse(text: str, signature=None) -> Formula:
    """Parse exactly one formula."""
    nodes = _read_sexprs(text)
    if not nodes:
        raise ParseError("empty input", len(text))
    if len(nodes) > 1:
        raise ParseError("trailing input after formula", nodes[1][1])
    return _build(nodes[0], signature)


def parse_many(text: str, signature=None) -> list[Formula]:
    """Parse a ``;``-commented list of formulas (one or more per line)."""
    return [_build(n, signature) for n in _read_sexprs(text)]


# random generation --------------------------------------------------------

def random_formula(signature, rank_bound: int, size_bound: int, seed,
                   free_vars: Iterable[str] = ()) -> Formula:
    """Seeded random formula with mqrank <= rank_bound and tree size <= size_bound.

    Free variables of the result are drawn from ``free_vars`` plus constants.
    """
    if rank_bound < 0 or size_bound < 0:
        raise FormulaError("bounds must be non-negative")
    rng = random.Random(seed)
    consts = ["@" + c for c in signature.constants]
    if size_bound == 0:
        return TRUE  # size_bound 0 cannot hold any node; verum is the degenerate answer
    pool = ["v0", "v1", "v2"]

    def atom(vs):
        terms = list(vs) + consts
        if not terms:
            return rng.choice((TRUE, FALSE))
        rels = signature.relations
        if rels and rng.random() < 0.75:
            name, k = rng.choice(rels)
            return Rel(name, *(rng.choice(terms) for _ in range(k)))
        return Eq(rng.choice(terms), rng.choice(terms))

    def gen(r, budget, vs):
        opts = ["atom"]
        if budget >= 2:
            opts.append("not")
            if r >= 1:
                opts += ["q", "q", "m", "m"]
        if budget >= 3:
            opts += ["and", "or"]
        op = rng.choice(opts)
        if op == "atom":
            return atom(vs)
        if op == "not":
            return Not(gen(r, budget - 1, vs))
        if op == "q":
            v = rng.choice(pool)
            body = gen(r - 1, budget - 1, tuple(dict.fromkeys(vs + (v,))))
            return Formula(rng.choice(_QUANT), (v, body))
        if op == "m":
            return Formula(rng.choice(("dia", "box")), (gen(r - 1, budget - 1, vs),))
        left = rng.randint(1, budget - 2)
        return Formula(op, (gen(r, left, vs), gen(r, budget - 1 - left, vs)))

    return gen(rank_bound, size_bound, tuple(free_vars))
