"""Finite relational structures, atomic types, partial isomorphisms and embeddings."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence

Element = Hashable


class StructureError(ValueError):
    pass


def sort_elements(xs: Iterable) -> list:
    xs = list(xs)
    try:
        return sorted(xs)
    except TypeError:
        return sorted(xs, key=repr)


@dataclass(frozen=True)
class Signature:
    relations: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple((str(n), int(a)) for n, a in self.relations))
        object.__setattr__(self, "constants", tuple(self.constants))
        names = [n for n, _ in self.relations] + list(self.constants)
        if len(set(names)) != len(names):
            raise StructureError(f"duplicate symbol names in signature: {names}")
        for name, arity in self.relations:
            if arity < 1:
                raise StructureError(f"relation {name} has non-positive arity {arity}")

    @property
    def arity(self) -> dict[str, int]:
        return dict(self.relations)

    def __str__(self):
        parts = [f"{n}:{a}" for n, a in self.relations] + list(self.constants)
        return ",".join(parts)


def parse_signature(text: str) -> Signature:
    """Parse ``"R:2,S:1,c"``: ``name:arity`` for relations, bare names for constants."""
    rels, consts = [], []
    for item in filter(None, (p.strip() for p in text.split(","))):
        if ":" in item:
            name, arity = item.split(":", 1)
            rels.append((name.strip(), int(arity)))
        else:
            consts.append(item)
    return Signature(tuple(rels), tuple(consts))


class Structure:
    """A finite structure over a relational signature with constants.

    Instances are immutable and hashable; ``interp`` maps each relation name to
    a frozenset of tuples and ``constant_vals`` maps constants to elements.
    """

    __slots__ = ("signature", "universe", "interp", "constant_vals", "_order", "_hash")

    def __init__(self, signature: Signature, universe: Iterable[Element],
                 interp: Mapping[str, Iterable[Sequence]] | None = None,
                 constant_vals: Mapping[str, Element] | None = None):
        universe = frozenset(universe)
        if not universe:
            raise StructureError("universe must be nonempty")
        interp = dict(interp or {})
        constant_vals = dict(constant_vals or {})
        arity = signature.arity
        unknown = set(interp) - set(arity)
        if unknown:
            raise StructureError(f"relations not in signature: {sorted(unknown)}")
        table = {}
        for name, k in signature.relations:
            tuples = frozenset(tuple(t) for t in interp.get(name, ()))
            for t in tuples:
                if len(t) != k:
                    raise StructureError(f"tuple {t} has wrong arity for {name}/{k}")
                if not all(x in universe for x in t):
                    raise StructureError(f"tuple {t} of {name} leaves the universe")
            table[name] = tuples
        if set(constant_vals) != set(signature.constants):
            raise StructureError("constant assignment does not match signature")
        for c, v in constant_vals.items():
            if v not in universe:
                raise StructureError(f"constant {c} = {v!r} outside universe")
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "interp", table)
        object.__setattr__(self, "constant_vals", constant_vals)
        object.__setattr__(self, "_order", tuple(sort_elements(universe)))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Structure is immutable")

    @property
    def elements(self) -> tuple:
        """Universe in canonical sorted order."""
        return self._order

    def __len__(self):
        return len(self.universe)

    def holds(self, rel: str, args: Sequence) -> bool:
        return tuple(args) in self.interp[rel]

    def _key(self):
        return (self.signature, self.universe,
                tuple(sorted((n, frozenset(ts)) for n, ts in self.interp.items())),
                tuple(sorted(self.constant_vals.items())))

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return self is other or self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self._key()))
        return self._hash

    def __repr__(self):
        rels = "; ".join(f"{n}: {sort_elements(ts)}" for n, ts in self.interp.items())
        return f"Structure({list(self._order)}; {rels})"


class ElementMap:
    """A finite partial function between universes, stored as sorted pairs."""

    __slots__ = ("pairs", "_d")

    def __init__(self, pairs: Mapping | Iterable[tuple]):
        d = dict(pairs.items() if isinstance(pairs, Mapping) else pairs)
        object.__setattr__(self, "_d", d)
        object.__setattr__(self, "pairs", tuple((k, d[k]) for k in sort_elements(d)))

    def __setattr__(self, name, value):
        raise AttributeError("ElementMap is immutable")

    def __getitem__(self, x):
        return self._d[x]

    def __call__(self, xs: Sequence) -> tuple:
        return tuple(self._d[x] for x in xs)

    def __contains__(self, x):
        return x in self._d

    def __len__(self):
        return len(self._d)

    def __iter__(self):
        return iter(self._d)

    def get(self, x, default=None):
        return self._d.get(x, default)

    def items(self):
        return self.pairs

    def domain(self) -> frozenset:
        return frozenset(self._d)

    def image(self) -> frozenset:
        return frozenset(self._d.values())

    def is_injective(self) -> bool:
        return len(set(self._d.values())) == len(self._d)

    def then(self, other: "ElementMap") -> "ElementMap":
        """Composite ``other ∘ self``: apply self first."""
        return ElementMap((k, other[v]) for k, v in self.pairs)

    def inverse(self) -> "ElementMap":
        if not self.is_injective():
            raise StructureError("cannot invert a non-injective map")
        return ElementMap((v, k) for k, v in self.pairs)

    @classmethod
    def identity(cls, universe: Iterable) -> "ElementMap":
        return cls((x, x) for x in universe)

    def __eq__(self, other):
        return isinstance(other, ElementMap) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    def __repr__(self):
        return "{" + ", ".join(f"{k}->{v}" for k, v in self.pairs) + "}"


class Literal(NamedTuple):
    positive: bool
    symbol: str          # relation name, or "=" for equality
    terms: tuple         # "x<i>" for tuple slots, "@c" for constants

    def __str__(self):
        if self.symbol == "=":
            atom = f"{self.terms[0]}={self.terms[1]}"
        else:
            atom = f"{self.symbol}({','.join(self.terms)})"
        return atom if self.positive else "¬" + atom


@dataclass(frozen=True)
class AtomicType:
    """Literal-closed atomic type: every atom over the slots, or its negation."""
    literals: tuple[Literal, ...] = field(default=())

    def __iter__(self):
        return iter(self.literals)

    def __len__(self):
        return len(self.literals)

    def positives(self) -> tuple[Literal, ...]:
        return tuple(lit for lit in self.literals if lit.positive)


def _terms(sig: Signature, t: Sequence) -> tuple[list[str], list]:
    names = [f"x{i}" for i in range(len(t))] + ["@" + c for c in sig.constants]
    return names, list(t)


def _check_tuple(s: Structure, t: Sequence):
    for x in t:
        if x not in s.universe:
            raise StructureError(f"element {x!r} outside universe")


def _diagram(s: Structure, t: Sequence) -> list[tuple[str, tuple, bool]]:
    names, vals = _terms(s.signature, t)
    vals = vals + [s.constant_vals[c] for c in s.signature.constants]
    n = len(names)
    out = []
    for i in range(n):
        for j in range(i, n):
            out.append(("=", (names[i], names[j]), vals[i] == vals[j]))
    idx = range(n)
    for rel, k in s.signature.relations:
        table = s.interp[rel]
        for combo in product(idx, repeat=k):
            out.append((rel, tuple(names[c] for c in combo),
                        tuple(vals[c] for c in combo) in table))
    return out


def atomic_type(s: Structure, t: Sequence) -> AtomicType:
    """Complete set of atomic literals true of ``t`` in ``s``, sorted canonically."""
    _check_tuple(s, t)
    lits = [Literal(v, sym, terms) for sym, terms, v in _diagram(s, t)]
    lits.sort(key=lambda lit: (lit.symbol != "=", lit.symbol, lit.terms))
    return AtomicType(tuple(lits))


def is_partial_isomorphism(s: Structure, a: Sequence, t: Structure, b: Sequence) -> bool:
    if len(a) != len(b):
        raise StructureError(f"tuple length mismatch: {len(a)} vs {len(b)}")
    if s.signature != t.signature:
        raise StructureError("signature mismatch")
    _check_tuple(s, a)
    _check_tuple(t, b)
    return all(x[2] == y[2] for x, y in zip(_diagram(s, a), _diagram(t, b)))


def is_embedding(s: Structure, t: Structure, m: ElementMap | Mapping) -> bool:
    if not isinstance(m, ElementMap):
        m = ElementMap(m)
    if m.domain() != s.universe:
        raise StructureError("map is not total on the source universe")
    if s.signature != t.signature:
        return False
    if not m.is_injective() or not m.image() <= t.universe:
        return False
    for c in s.signature.constants:
        if m[s.constant_vals[c]] != t.constant_vals[c]:
            return False
    img = m.image()
    for rel, _ in s.signature.relations:
        mapped = {m(tup) for tup in s.interp[rel]}
        if not mapped <= t.interp[rel]:
            return False
        if any(all(x in img for x in tup) and tup not in mapped for tup in t.interp[rel]):
            return False
    return True


def enumerate_embeddings(s: Structure, t: Structure) -> list[ElementMap]:
    """All embeddings s -> t, lexicographic in the image sequence of s's sorted universe."""
    if s.signature != t.signature:
        raise StructureError("signature mismatch")
    src = s.elements
    tgt = t.elements
    if len(src) > len(tgt):
        return []
    forced = {}
    for c in s.signature.constants:
        a, b = s.constant_vals[c], t.constant_vals[c]
        if forced.get(a, b) != b:
            return []
        forced[a] = b
    # relation tuples indexed by the latest position (in src order) they mention
    checks: list[list[tuple[str, tuple]]] = [[] for _ in src]
    for rel, k in s.signature.relations:
        for combo in product(range(len(src)), repeat=k):
            checks[max(combo)].append((rel, combo))
    out = []
    assign: list = [None] * len(src)
    used: set = set()

    def consistent(i):
        for rel, combo in checks[i]:
            lhs = tuple(src[c] for c in combo) in s.interp[rel]
            rhs = tuple(assign[c] for c in combo) in t.interp[rel]
            if lhs != rhs:
                return False
        return True

    def search(i):
        if i == len(src):
            out.append(ElementMap(zip(src, assign)))
            return
        cands = [forced[src[i]]] if src[i] in forced else tgt
        for y in cands:
            if y in used:
                continue
            assign[i] = y
            used.add(y)
            if consistent(i):
                search(i + 1)
            used.discard(y)
        assign[i] = None

    search(0)
    return out


def substructure(t: Structure, subset: Iterable[Element]) -> Structure:
    subset = frozenset(subset)
    if not subset:
        raise StructureError("empty substructure")
    if not subset <= t.universe:
        raise StructureError("subset leaves the universe")
    for c, v in t.constant_vals.items():
        if v not in subset:
            raise StructureError(f"constant {c} not in subset")
    interp = {rel: [tup for tup in ts if all(x in subset for x in tup)]
              for rel, ts in t.interp.items()}
    return Structure(t.signature, subset, interp, t.constant_vals)


def relabel(s: Structure, m: ElementMap | Mapping) -> Structure:
    """Isomorphic copy of ``s`` along the bijection ``m``."""
    if not isinstance(m, ElementMap):
        m = ElementMap(m)
    interp = {rel: [m(tup) for tup in ts] for rel, ts in s.interp.items()}
    return Structure(s.signature, [m[x] for x in s.universe], interp,
                     {c: m[v] for c, v in s.constant_vals.items()})


def _serialize(s: Structure, perm: dict) -> tuple:
    rels = tuple(tuple(sorted(tuple(perm[x] for x in tup) for tup in s.interp[rel]))
                 for rel, _ in s.signature.relations)
    consts = tuple(perm[s.constant_vals[c]] for c in s.signature.constants)
    return rels, consts


def canonical_form(s: Structure) -> str:
    """Isomorphism-invariant label: least serialization over all relabelings onto 0..n-1."""
    elems = s.elements
    n = len(elems)
    best = None
    for p in permutations(range(n)):
        key = _serialize(s, dict(zip(elems, p)))
        if best is None or key < best:
            best = key
    rels, consts = best
    parts = [f"n={n}"] + [f"{name}={list(ts)}" for (name, _), ts in zip(s.signature.relations, rels)]
    parts += [f"{c}={v}" for c, v in zip(s.signature.constants, consts)]
    return f"[{s.signature}] " + " ".join(parts)


def find_isomorphism(s: Structure, t: Structure) -> ElementMap | None:
    """Brute-force isomorphism search, least in lexicographic order."""
    if len(s) != len(t):
        return None
    embs = enumerate_embeddings(s, t)
    return embs[0] if embs else None
