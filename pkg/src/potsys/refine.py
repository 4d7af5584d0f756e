"""Bounded bisimilarity by partition refinement.

Objects are (side, world, injective tuple). Round 0 groups objects by atomic
type; round k+1 splits a class when its members differ in the set of round-k
classes reachable by appending a fresh element or by pushing along an arrow.
Two objects share a round-k class exactly when the corresponding game position
has rank at least k. The board is never materialized, so this handles systems
too large for the full game graph.
"""

from __future__ import annotations

import math
from itertools import permutations

from .structures import _diagram
from .systems import PotentialistSystem

INF = math.inf


def _injective_tuples(elements, max_len=None):
    n = len(elements) if max_len is None else min(max_len, len(elements))
    for k in range(n + 1):
        yield from permutations(elements, k)


class Refinement:
    def __init__(self, sysL: PotentialistSystem, sysR: PotentialistSystem):
        if sysL.signature != sysR.signature:
            raise ValueError("signature mismatch")
        self.systems = (sysL, sysR)
        objs = []
        index = {}
        for side, sys in enumerate(self.systems):
            for w, s in sys.worlds.items():
                for t in _injective_tuples(s.elements):
                    index[(side, w, t)] = len(objs)
                    objs.append((side, w, t))
        self.objects, self.index = objs, index
        ext, pushes = [], []
        for side, w, t in objs:
            sys = self.systems[side]
            s = sys.structure(w)
            used = set(t)
            ext.append([index[(side, w, t + (u,))] for u in s.elements if u not in used])
            pushes.append([index[(side, a.dst, a.map(t))] for a in sys.arrows_from(w)])
        keys = {}
        cls = []
        for side, w, t in objs:
            key = tuple(_diagram(self.systems[side].structure(w), t))
            cls.append(keys.setdefault(key, len(keys)))
        self.history = [cls]
        count = len(keys)
        while True:
            keys = {}
            new = [keys.setdefault((cls[i], frozenset(cls[j] for j in ext[i]),
                                    frozenset(cls[j] for j in pushes[i])), len(keys))
                   for i in range(len(objs))]
            if len(keys) == count:
                break
            count = len(keys)
            cls = new
            self.history.append(cls)
        # history[k] is the round-k partition; the last entry is stable

    @property
    def stable_round(self) -> int:
        return len(self.history) - 1

    def _ids(self, left, a, right, b):
        if len(a) != len(b):
            raise ValueError(f"parameter size mismatch: {len(a)} vs {len(b)}")
        fwd, bwd = {}, {}
        for x, y in zip(a, b):
            if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
                return None
        a2 = tuple(fwd)
        b2 = tuple(fwd[x] for x in a2)
        return self.index[(0, left, a2)], self.index[(1, right, b2)]

    def rank(self, left, a=(), right=None, b=()):
        """Largest k with the two objects in one round-k class; infinity if never split."""
        ids = self._ids(left, tuple(a), right, tuple(b))
        if ids is None:
            return -1
        i, j = ids
        if self.history[-1][i] == self.history[-1][j]:
            return INF
        r = -1
        for k, cls in enumerate(self.history):
            if cls[i] != cls[j]:
                break
            r = k
        return r

    def equivalent(self, left, a, right, b, k) -> bool:
        return self.rank(left, a, right, b) >= k

    def is_bitotal(self) -> bool:
        """Every object on either side shares its final class with one on the other."""
        final = self.history[-1]
        sides = ({final[i] for i, o in enumerate(self.objects) if o[0] == 0},
                 {final[i] for i, o in enumerate(self.objects) if o[0] == 1})
        return sides[0] == sides[1]
