"""Potentialist systems: finite categories of structures and embeddings, and the
constructions performed on them (disjointification, unravelling, flattening,
Mod / Mod-embedding systems, skeleton)."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence

from .checker import satisfies_fo
from .formulas import Formula
from .structures import (ElementMap, Signature, Structure, StructureError,
                         enumerate_embeddings, is_embedding, sort_elements,
                         substructure)

log = logging.getLogger(__name__)

DEFAULT_MAX_SIZE = 4


class SystemsError(ValueError):
    pass


class UnravelDepthExceeded(LookupError):
    """Raised when asking for children beyond the exploration cap (not a leaf)."""


class Arrow(NamedTuple):
    src: Hashable
    dst: Hashable
    map: ElementMap

    def then(self, other: "Arrow") -> "Arrow":
        if self.dst != other.src:
            raise SystemsError(f"arrows not composable: {self.dst!r} != {other.src!r}")
        return Arrow(self.src, other.dst, self.map.then(other.map))

    def sort_key(self):
        return (str(self.src), str(self.dst), _pairs_key(self.map))

    def __repr__(self):
        return f"{self.src}->{self.dst}{self.map!r}"


def _pairs_key(m: ElementMap):
    try:
        return tuple(sorted(m.pairs))
    except TypeError:
        return repr(m.pairs)


@dataclass(frozen=True)
class World:
    id: Hashable
    structure: Structure


class PotentialistSystem:
    """Worlds with an identity- and composition-closed set of embeddings."""

    def __init__(self, worlds: Mapping[Hashable, Structure], arrows: Iterable[Arrow], name: str = ""):
        self.name = name
        self.worlds: dict = {w: worlds[w] for w in sorted(worlds, key=str)}
        self.arrows: tuple[Arrow, ...] = tuple(sorted(set(arrows), key=Arrow.sort_key))
        sigs = {s.signature for s in self.worlds.values()}
        if len(sigs) > 1:
            raise SystemsError("worlds do not share a signature")
        if not self.worlds:
            raise SystemsError("a system needs at least one world")
        self.signature: Signature = next(iter(sigs))
        self._out: dict = {w: [] for w in self.worlds}
        self._between: dict = {}
        for a in self.arrows:
            self._out[a.src].append(a)
            self._between.setdefault((a.src, a.dst), []).append(a)
        self._out = {w: tuple(v) for w, v in self._out.items()}
        self._keys = frozenset((a.src, a.dst, a.map) for a in self.arrows)

    @classmethod
    def single(cls, s: Structure, world="_") -> "PotentialistSystem":
        return cls({world: s}, [Arrow(world, world, ElementMap.identity(s.universe))])

    def structure(self, w) -> Structure:
        return self.worlds[w]

    def arrows_from(self, w) -> tuple[Arrow, ...]:
        return self._out[w]

    def arrows_between(self, src, dst) -> list[Arrow]:
        return self._between.get((src, dst), [])

    def has_arrow(self, a: Arrow) -> bool:
        return (a.src, a.dst, a.map) in self._keys

    def identity(self, w) -> Arrow:
        return Arrow(w, w, ElementMap.identity(self.worlds[w].universe))

    def __eq__(self, other):
        return (isinstance(other, PotentialistSystem) and self.worlds == other.worlds
                and self.arrows == other.arrows)

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return f"<PotentialistSystem {self.name or ''} worlds={len(self.worlds)} arrows={len(self.arrows)}>"


@dataclass(frozen=True)
class PointedSystem:
    system: PotentialistSystem
    world: Hashable
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        s = self.system.structure(self.world)
        for x in self.params:
            if x not in s.universe:
                raise SystemsError(f"parameter {x!r} not in world {self.world!r}")


@dataclass
class IsoBisimWitness:
    """World pairs related by the iso-bisimulation, each with its isomorphism."""
    xi: dict = field(default_factory=dict)   # (left world, right world) -> ElementMap

    @property
    def pairs(self):
        return list(self.xi)


# closure ------------------------------------------------------------------

def validate_or_close(worlds: Mapping[Hashable, Structure], arrows: Iterable[Arrow],
                      mode: str = "validate", name: str = "") -> PotentialistSystem:
    """Check (``validate``) or saturate (``close``) identities and composites."""
    if mode not in ("validate", "close"):
        raise SystemsError(f"unknown mode {mode!r}")
    arrows = list(arrows)
    for a in arrows:
        if a.src not in worlds or a.dst not in worlds:
            raise SystemsError(f"dangling world id in arrow {a!r}")
        if not is_embedding(worlds[a.src], worlds[a.dst], a.map):
            raise SystemsError(f"arrow {a!r} is not an embedding")
    keyset = {(a.src, a.dst, a.map) for a in arrows}
    out: dict = {w: [] for w in worlds}
    for a in arrows:
        out[a.src].append(a)
    if mode == "validate":
        for w, s in worlds.items():
            if (w, w, ElementMap.identity(s.universe)) not in keyset:
                raise SystemsError(f"missing identity on world {w!r}")
        for a in arrows:
            for b in out[a.dst]:
                c = a.then(b)
                if (c.src, c.dst, c.map) not in keyset:
                    raise SystemsError(f"missing composite {a!r} ; {b!r}")
        return PotentialistSystem(worlds, arrows, name)
    for w, s in worlds.items():
        ident = Arrow(w, w, ElementMap.identity(s.universe))
        if (w, w, ident.map) not in keyset:
            keyset.add((w, w, ident.map))
            arrows.append(ident)
            out[w].append(ident)
    queue = list(arrows)
    while queue:
        a = queue.pop()
        new = []
        for b in list(out[a.dst]):
            new.append(a.then(b))
        # a as the second factor
        for x in list(arrows):
            if x.dst == a.src:
                new.append(x.then(a))
        for c in new:
            k = (c.src, c.dst, c.map)
            if k not in keyset:
                keyset.add(k)
                arrows.append(c)
                out[c.src].append(c)
                queue.append(c)
    return PotentialistSystem(worlds, arrows, name)


def is_closed(sys: PotentialistSystem) -> bool:
    if any(not sys.has_arrow(sys.identity(w)) for w in sys.worlds):
        return False
    return all(sys.has_arrow(a.then(b)) for a in sys.arrows for b in sys.arrows_from(a.dst))


def is_thin(sys: PotentialistSystem) -> bool:
    return all(len(v) <= 1 for v in sys._between.values())


# disjointification --------------------------------------------------------

def disjointify(sys: PotentialistSystem) -> tuple[PotentialistSystem, IsoBisimWitness]:
    """Tag every element with its world id; returns the copy and the tagging witness."""
    tag = {w: ElementMap((x, (x, w)) for x in s.universe) for w, s in sys.worlds.items()}
    worlds = {}
    for w, s in sys.worlds.items():
        t = tag[w]
        worlds[w] = Structure(s.signature, [t[x] for x in s.universe],
                              {r: [t(tup) for tup in ts] for r, ts in s.interp.items()},
                              {c: t[v] for c, v in s.constant_vals.items()})
    arrows = [Arrow(a.src, a.dst, ElementMap((tag[a.src][x], tag[a.dst][y]) for x, y in a.map.pairs))
              for a in sys.arrows]
    out = PotentialistSystem(worlds, arrows, (sys.name + "•") if sys.name else "")
    return out, IsoBisimWitness({(w, w): tag[w] for w in sys.worlds})


def is_disjoint(sys: PotentialistSystem) -> bool:
    seen: set = set()
    for s in sys.worlds.values():
        if seen & s.universe:
            return False
        seen |= s.universe
    return True


# unravelling --------------------------------------------------------------

@dataclass(frozen=True)
class UnravelNode:
    system: PotentialistSystem = field(compare=False, repr=False)
    root: Hashable
    seq: tuple = ()

    @property
    def world(self):
        return self.seq[-1].dst if self.seq else self.root

    @property
    def depth(self) -> int:
        return len(self.seq)

    @property
    def structure(self) -> Structure:
        return self.system.structure(self.world)


def unravel_root(sys: PotentialistSystem, w) -> UnravelNode:
    if w not in sys.worlds:
        raise SystemsError(f"unknown world {w!r}")
    return UnravelNode(sys, w, ())


def unravel_children(node: UnravelNode, depth_cap: int) -> list[tuple[Arrow, UnravelNode]]:
    """One child per arrow leaving the node's final world."""
    if depth_cap < 0:
        raise ValueError("depth_cap must be >= 0")
    if node.depth >= depth_cap:
        raise UnravelDepthExceeded(f"node at depth {node.depth} reached cap {depth_cap}")
    return [(a, UnravelNode(node.system, node.root, node.seq + (a,)))
            for a in node.system.arrows_from(node.world)]


def iter_unravel(sys: PotentialistSystem, w, depth_cap: int):
    """Depth-first walk over all nodes of depth <= depth_cap rooted at ``w``."""
    stack = [unravel_root(sys, w)]
    while stack:
        node = stack.pop()
        yield node
        if node.depth < depth_cap:
            stack.extend(child for _, child in reversed(unravel_children(node, depth_cap)))


def check_unravel_zigzag(node: UnravelNode, depth_cap: int) -> bool:
    """Arrows from the node's world in the system biject with its child arrows."""
    kids = unravel_children(node, depth_cap)
    sys_arrows = node.system.arrows_from(node.world)
    if len(kids) != len(sys_arrows):
        return False
    for (a, child), b in zip(kids, sys_arrows):
        if a != b or child.world != b.dst or child.seq[:-1] != node.seq:
            return False
    return True


# flattening ---------------------------------------------------------------

def flatten_step(flat: Structure, rename: ElementMap, arrow: Arrow, target: Structure):
    """Extend (Flat, Rename) for a chain by one more arrow."""
    image = {arrow.map[rename[x]]: x for x in flat.universe}
    fresh = [y for y in target.universe if y not in image]
    collide = flat.universe.intersection(fresh)
    assert not collide, f"renamed element collision: {collide}"
    ren = ElementMap([(x, arrow.map[rename[x]]) for x in flat.universe] + [(y, y) for y in fresh])
    back = {**image, **{y: y for y in fresh}}
    interp = {r: [tuple(back[v] for v in tup) for tup in ts] for r, ts in target.interp.items()}
    consts = {c: back[v] for c, v in target.constant_vals.items()}
    return Structure(target.signature, back.values(), interp, consts), ren


def flatten(node: UnravelNode) -> tuple[Structure, ElementMap]:
    """Return Flat of the chain and the renaming isomorphism Flat -> final structure."""
    sys = node.system
    if not is_disjoint(sys):
        raise SystemsError("flatten needs a disjointified system")
    flat = sys.structure(node.root)
    rename = ElementMap.identity(flat.universe)
    for a in node.seq:
        flat, rename = flatten_step(flat, rename, a, sys.structure(a.dst))
    return flat, rename


def iter_flatten(sys: PotentialistSystem, w, depth_cap: int):
    """Yield ``(seq, flat, rename)`` for every chain from ``w`` of length <= depth_cap,
    extending Flat/Rename one arrow at a time."""
    if not is_disjoint(sys):
        raise SystemsError("flatten needs a disjointified system")
    s = sys.structure(w)
    stack = [((), s, ElementMap.identity(s.universe), w)]
    while stack:
        seq, flat, ren, end = stack.pop()
        yield seq, flat, ren
        if len(seq) < depth_cap:
            for a in reversed(sys.arrows_from(end)):
                f2, r2 = flatten_step(flat, ren, a, sys.structure(a.dst))
                stack.append((seq + (a,), f2, r2, a.dst))


def check_flatten_squares(sys: PotentialistSystem, depth_cap: int):
    """For every chain c and arrow a extending it: Flat(c) is a substructure of Flat(c a),
    Rename(c a) is an isomorphism onto the end world, and Rename(c a) restricted to
    Flat(c) equals a after Rename(c). Returns (chains checked, failing chains)."""
    count, bad = 0, []
    for w in sys.worlds:
        prev: dict = {}
        for seq, flat, ren in iter_flatten(sys, w, depth_cap):
            count += 1
            prev[seq] = (flat, ren)
            if not seq:
                continue
            pflat, pren = prev[seq[:-1]]
            a = seq[-1]
            end = sys.structure(a.dst)
            ok = (all(ren[x] == a.map[pren[x]] for x in pflat.universe)
                  and substructure(flat, pflat.universe) == pflat
                  and ren.image() == end.universe
                  and is_embedding(flat, end, ren))
            if not ok:
                bad.append(seq)
    return count, bad


# Mod / Mod-embedding ------------------------------------------------------

def _cap(name: str, default: int) -> int:
    v = os.environ.get(name)
    return int(v) if v else default


def enumerate_models(sig: Signature, theory: Sequence[Formula], max_size: int,
                     cap: int | None = None) -> list[Structure]:
    """All models of ``theory`` whose carrier is a nonempty subset of ``range(max_size)``."""
    cap = _cap("POTSYS_MAX_SIZE", DEFAULT_MAX_SIZE) if cap is None else cap
    if max_size > cap:
        raise SystemsError(f"max_size {max_size} exceeds cap {cap}")
    for phi in theory:
        if phi.is_modal:
            raise SystemsError(f"modal operator in theory sentence {phi}")
        if phi.free_vars:
            raise SystemsError(f"theory formula has free variables {sorted(phi.free_vars)}")
    out = []
    for n in range(1, max_size + 1):
        for carrier in combinations(range(max_size), n):
            spaces = []
            for rel, k in sig.relations:
                tuples = list(product(carrier, repeat=k))
                spaces.append([[t for bit, t in enumerate(tuples) if mask >> bit & 1]
                               for mask in range(1 << len(tuples))])
            for interp_choice in product(*spaces):
                interp = {rel: ts for (rel, _), ts in zip(sig.relations, interp_choice)}
                for cvals in product(carrier, repeat=len(sig.constants)):
                    s = Structure(sig, carrier, interp, dict(zip(sig.constants, cvals)))
                    if all(satisfies_fo(s, {}, phi) for phi in theory):
                        out.append(s)
    return out


def _model_ids(models):
    width = len(str(max(len(models) - 1, 0)))
    return [f"M{i:0{width}d}" for i in range(len(models))]


def build_mod_system(models: Sequence[Structure]) -> PotentialistSystem:
    """Substructure inclusions only."""
    ids = _model_ids(models)
    if len({m.signature for m in models}) > 1:
        raise SystemsError("signature mismatch among models")
    arrows = []
    for (i, m), (j, n) in product(zip(ids, models), repeat=2):
        if m.universe <= n.universe and substructure(n, m.universe) == m:
            arrows.append(Arrow(i, j, ElementMap.identity(m.universe)))
    return validate_or_close(dict(zip(ids, models)), arrows, "validate", "Mod")


def build_mode_system(models: Sequence[Structure]) -> PotentialistSystem:
    """All embeddings between models."""
    ids = _model_ids(models)
    if len({m.signature for m in models}) > 1:
        raise SystemsError("signature mismatch among models")
    arrows = [Arrow(i, j, e) for (i, m), (j, n) in product(zip(ids, models), repeat=2)
              for e in enumerate_embeddings(m, n)]
    return validate_or_close(dict(zip(ids, models)), arrows, "validate", "Mod^e")


# skeleton -----------------------------------------------------------------

def _inverse_pairs(sys: PotentialistSystem):
    """(w, w', f) for arrows f: w -> w' whose inverse is also an arrow of the system."""
    for a in sys.arrows:
        if len(sys.worlds[a.src]) == len(sys.worlds[a.dst]) and a.map.is_injective():
            inv = Arrow(a.dst, a.src, a.map.inverse())
            if a.map.image() == sys.worlds[a.dst].universe and sys.has_arrow(inv):
                yield a


def skeleton(sys: PotentialistSystem) -> tuple[PotentialistSystem, dict]:
    """Quotient by mutually-inverse-arrow equivalence; lowest id represents each class."""
    parent = {w: w for w in sys.worlds}

    def find(w):
        while parent[w] != w:
            parent[w] = parent[parent[w]]
            w = parent[w]
        return w

    for a in _inverse_pairs(sys):
        ra, rb = find(a.src), find(a.dst)
        if ra != rb:
            parent[max(ra, rb, key=str)] = min(ra, rb, key=str)
    classes: dict = {}
    for w in sys.worlds:
        classes.setdefault(find(w), []).append(w)
    quotient = {}
    for members in classes.values():
        rep = min(members, key=str)
        for w in members:
            quotient[w] = rep
    reps = sorted(set(quotient.values()), key=str)
    worlds = {r: sys.worlds[r] for r in reps}
    arrows = [a for a in sys.arrows if a.src in worlds and a.dst in worlds]
    skel = PotentialistSystem(worlds, arrows, (sys.name + "/skel") if sys.name else "")
    return skel, quotient


def skeleton_witness(sys: PotentialistSystem, quotient: Mapping) -> IsoBisimWitness:
    """Pairs (w, rep(w)) with the least connecting isomorphism (identity on representatives)."""
    xi = {}
    for w, rep in quotient.items():
        if w == rep:
            xi[(w, rep)] = ElementMap.identity(sys.worlds[w].universe)
            continue
        cands = [a for a in _inverse_pairs(sys) if a.src == w and a.dst == rep]
        if not cands:
            # same class, but only through a chain; compose along it
            cands = [_connect(sys, w, rep)]
        xi[(w, rep)] = cands[0].map
    return IsoBisimWitness(xi)


def _connect(sys, w, rep) -> Arrow:
    inv = list(_inverse_pairs(sys))
    frontier = [(w, sys.identity(w))]
    seen = {w}
    while frontier:
        x, acc = frontier.pop(0)
        if x == rep:
            return acc
        for a in inv:
            if a.src == x and a.dst not in seen:
                seen.add(a.dst)
                frontier.append((a.dst, acc.then(a)))
    raise SystemsError(f"{w!r} and {rep!r} are not connected by isomorphisms")
