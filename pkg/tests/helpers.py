"""Random corpus and brute-force oracles shared by the tests.

The oracles here deliberately avoid the package's game code: they work on
plain dicts and frozensets and follow the textbook definitions directly.
"""

import random
from itertools import permutations

from potsys.structures import ElementMap, Signature, Structure, enumerate_embeddings
from potsys.systems import Arrow, PotentialistSystem, validate_or_close

SIG_R = Signature((("R", 2),), ())


# corpus -----------------------------------------------------------------

def random_structure(rng, n, p=0.3, sig=SIG_R):
    u = list(range(n))
    return Structure(sig, u, {"R": {(a, b) for a in u for b in u if rng.random() < p}})


def random_system(rng, max_worlds=3, max_size=3, keep=0.5, prefix="w"):
    worlds = {f"{prefix}{i}": random_structure(rng, rng.randint(1, max_size))
              for i in range(rng.randint(1, max_worlds))}
    arrows = [Arrow(a, b, e) for a in worlds for b in worlds
              for e in enumerate_embeddings(worlds[a], worlds[b]) if rng.random() < keep]
    return validate_or_close(worlds, arrows, mode="close")


def relabeled_copy(sys, rng, prefix="c"):
    """Isomorphic copy: worlds renamed, each universe permuted, arrows conjugated."""
    names = {w: f"{prefix}{i}" for i, w in enumerate(sys.worlds)}
    perms = {}
    worlds = {}
    for w, s in sys.worlds.items():
        els = list(s.elements)
        img = els[:]
        rng.shuffle(img)
        perms[w] = ElementMap(zip(els, img))
        worlds[names[w]] = Structure(s.signature, img, {r: [perms[w](t) for t in ts] for r, ts in s.interp.items()})
    arrows = [Arrow(names[a.src], names[a.dst],
                    ElementMap((perms[a.src][x], perms[a.dst][y]) for x, y in a.map.pairs))
              for a in sys.arrows]
    return PotentialistSystem(worlds, arrows)


def corpus(n=56, seed=2024):
    """Seeded system pairs: a third are relabeled copies, so winning positions occur."""
    rng = random.Random(seed)
    out = []
    for i in range(n):
        left = random_system(rng)
        kind = i % 3
        if kind == 0:
            right = relabeled_copy(left, rng)
        elif kind == 1:
            right = random_system(rng, prefix="v")
        else:
            # a copy with one extra world, reachable or not
            base = relabeled_copy(left, rng)
            extra = random_structure(rng, rng.randint(1, 3))
            worlds = dict(base.worlds)
            worlds["x"] = extra
            arrows = list(base.arrows) + [Arrow(w, "x", e) for w in base.worlds
                                          for e in enumerate_embeddings(base.worlds[w], extra)
                                          if rng.random() < 0.5]
            right = validate_or_close(worlds, arrows, mode="close")
        out.append((left, right))
    return out


def identity_system(**structs):
    return PotentialistSystem(structs, [Arrow(w, w, ElementMap.identity(s.universe))
                                        for w, s in structs.items()])


# brute-force embeddings ----------------------------------------------------

def brute_embeddings(s, t):
    src = s.elements
    out = []
    for img in permutations(t.elements, len(src)):
        m = dict(zip(src, img))
        ok = all(((m[a], m[b]) in t.interp["R"]) == ((a, b) in s.interp["R"]) for a in src for b in src)
        if ok:
            out.append(ElementMap(m))
    return out


# naive rank sweep over canonical positions ---------------------------------------

def _positions(sysL, sysR):
    out = []
    for u, s in sysL.worlds.items():
        for v, t in sysR.worlds.items():
            def grow(m, rest):
                out.append((u, v, frozenset(m)))
                for i, a in enumerate(rest):
                    used = {y for _, y in m}
                    for b in t.elements:
                        if b not in used:
                            grow(m | {(a, b)}, rest[i + 1:])
            grow(frozenset(), list(s.elements))
    return out


def _base(sysL, sysR, pos):
    u, v, m = pos
    s, t = sysL.worlds[u], sysR.worlds[v]
    for a, b in m:
        for c, d in m:
            if ((a, c) in s.interp["R"]) != ((b, d) in t.interp["R"]):
                return False
    return True


def naive_ranks(sysL, sysR):
    """Level sweep: L0 = partial isomorphisms, L(k+1) = positions all of whose
    Abelard moves have a reply in Lk. Returns {(u, v, frozenset match): rank}."""
    pos = _positions(sysL, sysR)
    level = {p for p in pos if _base(sysL, sysR, p)}
    rank = {p: -1 for p in pos}
    k = 0

    def successors(p):
        u, v, m = p
        s, t = sysL.worlds[u], sysR.worlds[v]
        dom = {a for a, _ in m}
        ran = {b for _, b in m}
        for a in s.elements:
            if a not in dom:
                yield [(u, v, m | {(a, b)}) for b in t.elements if b not in ran]
        for b in t.elements:
            if b not in ran:
                yield [(u, v, m | {(a, b)}) for a in s.elements if a not in dom]
        for pi in sysL.arrows_from(u):
            yield [(pi.dst, rho.dst, frozenset((pi.map[a], rho.map[b]) for a, b in m))
                   for rho in sysR.arrows_from(v)]
        for rho in sysR.arrows_from(v):
            yield [(pi.dst, rho.dst, frozenset((pi.map[a], rho.map[b]) for a, b in m))
                   for pi in sysL.arrows_from(u)]

    succ = {p: list(successors(p)) for p in level}
    while True:
        for p in level:
            rank[p] = k
        nxt = {p for p in level if all(any(q in level for q in opts) for opts in succ[p])}
        if nxt == level:
            for p in level:
                rank[p] = float("inf")
            return rank
        level = nxt
        k += 1


# tuple-level recursion without canonicalization -------------------------------------

class TupleOracle:
    """rank >= alpha on raw tuple pairs, straight from the recursive definition:
    Eloise must answer every element choice (including repeats) and every arrow."""

    def __init__(self, sysL, sysR):
        self.L, self.R = sysL, sysR
        self.memo = {}

    def _b1(self, u, a, v, b):
        s, t = self.L.worlds[u], self.R.worlds[v]
        n = len(a)
        for i in range(n):
            for j in range(n):
                if (a[i] == a[j]) != (b[i] == b[j]):
                    return False
                if ((a[i], a[j]) in s.interp["R"]) != ((b[i], b[j]) in t.interp["R"]):
                    return False
        return True

    def ge(self, u, a, v, b, alpha):
        key = (u, a, v, b, alpha)
        if key in self.memo:
            return self.memo[key]
        if alpha == 0:
            res = self._b1(u, a, v, b)
        else:
            s, t = self.L.worlds[u], self.R.worlds[v]
            res = (all(any(self.ge(u, a + (x,), v, b + (y,), alpha - 1) for y in t.elements) for x in s.elements)
                   and all(any(self.ge(u, a + (x,), v, b + (y,), alpha - 1) for x in s.elements) for y in t.elements)
                   and all(any(self.ge(pi.dst, pi.map(a), rho.dst, rho.map(b), alpha - 1)
                               for rho in self.R.arrows_from(v)) for pi in self.L.arrows_from(u))
                   and all(any(self.ge(pi.dst, pi.map(a), rho.dst, rho.map(b), alpha - 1)
                               for pi in self.L.arrows_from(u)) for rho in self.R.arrows_from(v)))
        self.memo[key] = res
        return res


# greatest bisimulation inside a given set ----------------------------------------------

def prune_to_bisimulation(sysL, sysR, candidates):
    """Remove positions violating the back-and-forth clauses relative to the
    remaining set until nothing changes (greatest fixpoint below ``candidates``)."""
    from potsys.games import Position

    def push(m, f, g):
        return tuple(sorted((f[a], g[b]) for a, b in m))
    S = {p for p in candidates if _base(sysL, sysR, (p.left, p.right, frozenset(p.match)))}

    def ok(p):
        s, t = sysL.worlds[p.left], sysR.worlds[p.right]
        dom = {a for a, _ in p.match}
        ran = {b for _, b in p.match}

        def ext(a, b):
            return Position(p.left, p.right, tuple(sorted(p.match + ((a, b),))))
        for a in s.elements:
            if a not in dom and not any(ext(a, b) in S for b in t.elements if b not in ran):
                return False
        for b in t.elements:
            if b not in ran and not any(ext(a, b) in S for a in s.elements if a not in dom):
                return False
        for pi in sysL.arrows_from(p.left):
            if not any(Position(pi.dst, r.dst, push(p.match, pi.map, r.map)) in S for r in sysR.arrows_from(p.right)):
                return False
        for r in sysR.arrows_from(p.right):
            if not any(Position(pi.dst, r.dst, push(p.match, pi.map, r.map)) in S for pi in sysL.arrows_from(p.left)):
                return False
        return True

    while True:
        keep = {p for p in S if ok(p)}
        if keep == S:
            return S
        S = keep
