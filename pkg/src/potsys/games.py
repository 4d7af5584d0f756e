"""Modal Ehrenfeucht-Fraisse games on finite systems.

A position is a pair of worlds plus the partial injection induced by the two
parameter tuples. Tuple order and repeats do not affect the atomic-type test
or the available moves, so the canonical position space is finite and the
rank recursion can be solved exactly by backward induction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Hashable, Iterable, NamedTuple, Sequence

from . import kernel
from .structures import ElementMap, is_embedding, is_partial_isomorphism, sort_elements
from .systems import Arrow, IsoBisimWitness, PointedSystem, PotentialistSystem

INF = math.inf


class GameError(ValueError):
    pass


class NoBisimulation(LookupError):
    """No pointed pair of the two systems is bisimilar."""


class NoReply(GameError):
    """Eloise has no reply keeping the required rank."""


class Position(NamedTuple):
    left: Hashable
    right: Hashable
    match: tuple  # sorted (left element, right element) pairs

    def tuples(self) -> tuple[tuple, tuple]:
        return tuple(a for a, _ in self.match), tuple(b for _, b in self.match)

    def __str__(self):
        m = ",".join(f"{a}:{b}" for a, b in self.match)
        return f"({self.left} | {self.right} | {m})"


class Move(NamedTuple):
    kind: str   # "elem" or "arrow"
    side: str   # "L" or "R"
    what: object  # element, or Arrow

    def __str__(self):
        if self.kind == "elem":
            return f"{self.side}:elem {self.what}"
        return f"{self.side}:arrow {self.what!r}"


def _sorted_pairs(pairs) -> tuple:
    try:
        return tuple(sorted(pairs))
    except TypeError:
        return tuple(sorted(pairs, key=repr))


def canonical_position(left, a: Sequence, right, b: Sequence) -> Position | None:
    """Reduce a tuple pair to its induced partial injection; None when inconsistent."""
    if len(a) != len(b):
        raise GameError(f"parameter size mismatch: {len(a)} vs {len(b)}")
    fwd, bwd = {}, {}
    for x, y in zip(a, b):
        if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
            return None
    return Position(left, right, _sorted_pairs(fwd.items()))


def partial_injections(dom: Sequence, cod: Sequence):
    """All partial injections dom -> cod, as sorted pair tuples."""
    dom = sort_elements(dom)
    cod = sort_elements(cod)
    for k in range(min(len(dom), len(cod)) + 1):
        for xs in combinations(dom, k):
            for ys in permutations(cod, k):
                yield tuple(zip(xs, ys))


def position_space(sysL: PotentialistSystem, sysR: PotentialistSystem) -> list[Position]:
    return [Position(u, v, m)
            for u, s in sysL.worlds.items() for v, t in sysR.worlds.items()
            for m in partial_injections(s.elements, t.elements)]


def push(m: tuple, f: ElementMap, g: ElementMap) -> tuple:
    return _sorted_pairs((f[a], g[b]) for a, b in m)


def is_partial_iso_position(sysL, sysR, pos: Position) -> bool:
    a, b = pos.tuples()
    return is_partial_isomorphism(sysL.structure(pos.left), a, sysR.structure(pos.right), b)


def format_rank(r) -> str:
    if r == INF:
        return "inf"
    return str(int(r))


class RankTable:
    """Ranks of every canonical position of the board of two systems."""

    def __init__(self, sysL: PotentialistSystem, sysR: PotentialistSystem, backend=None):
        if sysL.signature != sysR.signature:
            raise GameError("signature mismatch")
        self.sysL, self.sysR = sysL, sysR
        self.positions = position_space(sysL, sysR)
        self.index = {p: i for i, p in enumerate(self.positions)}
        self.moves: list[list[tuple[Move, list[tuple[Move, int]]]]] = []
        base = [1 if is_partial_iso_position(sysL, sysR, p) else 0 for p in self.positions]
        owner, ptr, tgt = [], [0], []
        for i, p in enumerate(self.positions):
            pm = self._moves_of(p)
            self.moves.append(pm)
            for _, replies in pm:
                owner.append(i)
                tgt.extend(sorted({t for _, t in replies}))
                ptr.append(len(tgt))
        solve = backend or kernel.solve_ranks
        levels, self.rounds = solve(len(self.positions), base, owner, ptr, tgt)
        self.ranks = [INF if lv == kernel.INFINITY else lv for lv in levels]
        self.n_moves = len(owner)
        self.n_edges = len(tgt)

    def _moves_of(self, p: Position):
        sL, sR = self.sysL, self.sysR
        U, V = sL.structure(p.left), sR.structure(p.right)
        dom = {a for a, _ in p.match}
        ran = {b for _, b in p.match}
        idx = self.index
        out = []
        for u in U.elements:
            if u in dom:
                continue
            replies = [(Move("elem", "R", v), idx[Position(p.left, p.right, _sorted_pairs(p.match + ((u, v),)))])
                       for v in V.elements if v not in ran]
            out.append((Move("elem", "L", u), replies))
        for v in V.elements:
            if v in ran:
                continue
            replies = [(Move("elem", "L", u), idx[Position(p.left, p.right, _sorted_pairs(p.match + ((u, v),)))])
                       for u in U.elements if u not in dom]
            out.append((Move("elem", "R", v), replies))
        arrowsL, arrowsR = sL.arrows_from(p.left), sR.arrows_from(p.right)
        for pi in arrowsL:
            replies = [(Move("arrow", "R", rho), idx[Position(pi.dst, rho.dst, push(p.match, pi.map, rho.map))])
                       for rho in arrowsR]
            out.append((Move("arrow", "L", pi), replies))
        for rho in arrowsR:
            replies = [(Move("arrow", "L", pi), idx[Position(pi.dst, rho.dst, push(p.match, pi.map, rho.map))])
                       for pi in arrowsL]
            out.append((Move("arrow", "R", rho), replies))
        return out

    def __len__(self):
        return len(self.positions)

    def __getitem__(self, pos: Position):
        return self.ranks[self.index[pos]]

    def rank(self, pos: Position | None):
        if pos is None:
            return -1
        return self.ranks[self.index[pos]]

    def rank_of(self, left, a: Sequence, right, b: Sequence):
        return self.rank(canonical_position(left, a, right, b))

    def items(self):
        return zip(self.positions, self.ranks)

    def max_finite(self) -> int:
        return max((r for r in self.ranks if r != INF), default=-1)

    def legal_moves(self, pos: Position) -> list[Move]:
        """Abelard's options, including element picks already in the match."""
        U = self.sysL.structure(pos.left)
        V = self.sysR.structure(pos.right)
        return ([Move("elem", "L", u) for u in U.elements] + [Move("elem", "R", v) for v in V.elements]
                + [Move("arrow", "L", a) for a in self.sysL.arrows_from(pos.left)]
                + [Move("arrow", "R", a) for a in self.sysR.arrows_from(pos.right)])

    def replies(self, pos: Position, move: Move) -> list[tuple[Move, Position | None]]:
        """Eloise's legal answers to ``move`` and the positions they lead to (None: inconsistent)."""
        p = pos
        if move.kind == "elem":
            lookup = dict(p.match) if move.side == "L" else {b: a for a, b in p.match}
            other = self.sysR.structure(p.right) if move.side == "L" else self.sysL.structure(p.left)
            if move.what not in (self.sysL.structure(p.left) if move.side == "L"
                                 else self.sysR.structure(p.right)).universe:
                raise GameError(f"illegal move {move}")
            out = []
            oside = "R" if move.side == "L" else "L"
            for e in other.elements:
                pair = (move.what, e) if move.side == "L" else (e, move.what)
                if move.what in lookup:
                    nxt = p if lookup[move.what] == e else None
                else:
                    nxt = canonical_position(p.left, [a for a, _ in p.match] + [pair[0]],
                                             p.right, [b for _, b in p.match] + [pair[1]])
                out.append((Move("elem", oside, e), nxt))
            return out
        if move.side == "L":
            if not self.sysL.has_arrow(move.what) or move.what.src != p.left:
                raise GameError(f"illegal move {move}")
            return [(Move("arrow", "R", rho), Position(move.what.dst, rho.dst, push(p.match, move.what.map, rho.map)))
                    for rho in self.sysR.arrows_from(p.right)]
        if not self.sysR.has_arrow(move.what) or move.what.src != p.right:
            raise GameError(f"illegal move {move}")
        return [(Move("arrow", "L", pi), Position(pi.dst, move.what.dst, push(p.match, pi.map, move.what.map)))
                for pi in self.sysL.arrows_from(p.left)]

    def to_tsv(self) -> str:
        rows = ["left\tright\tmatch\trank"]
        order = sorted(range(len(self.positions)),
                       key=lambda i: (str(self.positions[i].left), str(self.positions[i].right),
                                      len(self.positions[i].match), repr(self.positions[i].match)))
        for i in order:
            p = self.positions[i]
            m = ",".join(f"{a}:{b}" for a, b in p.match)
            rows.append(f"{p.left}\t{p.right}\t{m}\t{format_rank(self.ranks[i])}")
        return "\n".join(rows) + "\n"


def rank_table(sysL: PotentialistSystem, sysR: PotentialistSystem, backend=None) -> RankTable:
    return RankTable(sysL, sysR, backend)


# bisimilarity queries -----------------------------------------------------

def _check_pointed(pL: PointedSystem, pR: PointedSystem):
    if len(pL.params) != len(pR.params):
        raise GameError(f"parameter size mismatch: {len(pL.params)} vs {len(pR.params)}")


def pointed_rank(pL: PointedSystem, pR: PointedSystem, table: RankTable | None = None):
    _check_pointed(pL, pR)
    if table is None:
        table = rank_table(pL.system, pR.system)
    return table.rank_of(pL.world, pL.params, pR.world, pR.params)


def is_bisimilar(pL: PointedSystem, pR: PointedSystem, table: RankTable | None = None,
                 method: str = "game") -> bool:
    """Eloise wins from the pointed pair. ``method="refine"`` uses partition refinement,
    which scales to systems whose full board is too large to materialize."""
    _check_pointed(pL, pR)
    if method == "refine":
        from .refine import Refinement
        return Refinement(pL.system, pR.system).rank(pL.world, pL.params, pR.world, pR.params) == INF
    if method != "game":
        raise GameError(f"unknown method {method!r}")
    return pointed_rank(pL, pR, table) == INF


def alpha_bisimilar(pL: PointedSystem, pR: PointedSystem, alpha: int, refinement=None) -> bool:
    """alpha-bisimilarity, computed by partition refinement (independent of the game board)."""
    _check_pointed(pL, pR)
    if alpha < 0:
        raise GameError("alpha must be >= 0")
    if refinement is None:
        from .refine import Refinement
        refinement = Refinement(pL.system, pR.system)
    return refinement.rank(pL.world, pL.params, pR.world, pR.params) >= alpha


# relations ----------------------------------------------------------------

@dataclass(frozen=True)
class BisimulationRelation:
    positions: frozenset
    levels: dict | None = field(default=None, compare=False)

    def __iter__(self):
        return iter(sorted(self.positions, key=lambda p: (str(p.left), str(p.right), repr(p.match))))

    def __len__(self):
        return len(self.positions)

    def __contains__(self, p):
        return p in self.positions


@dataclass(frozen=True)
class Verification:
    ok: bool
    clause: str | None = None
    position: Position | None = None
    move: object = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "ok"
        return f"violates {self.clause} at {self.position} (move {self.move})"


def extract_bisimulation(table: RankTable) -> BisimulationRelation:
    """The winning region (all rank-infinity positions) as a relation."""
    winners = frozenset(p for p, r in table.items() if r == INF)
    if not winners:
        raise NoBisimulation("no bisimulation exists between any pointed pair")
    return BisimulationRelation(winners)


def verify_bisimulation(rel: BisimulationRelation | Iterable[Position],
                        sysL: PotentialistSystem, sysR: PotentialistSystem) -> Verification:
    """Check the partial-isomorphism, element back-and-forth and arrow back-and-forth
    clauses by direct enumeration."""
    if not isinstance(rel, BisimulationRelation):
        rel = BisimulationRelation(frozenset(rel))
    if not rel.positions:
        return Verification(False, "nonempty")
    R = rel.positions
    for p in rel:
        if not is_partial_iso_position(sysL, sysR, p):
            return Verification(False, "B1", p)
        U, V = sysL.structure(p.left), sysR.structure(p.right)
        dom = dict(p.match)
        ran = {b: a for a, b in p.match}
        for u in U.elements:
            if u in dom:
                continue
            if not any(Position(p.left, p.right, _sorted_pairs(p.match + ((u, v),))) in R
                       for v in V.elements if v not in ran):
                return Verification(False, "B2", p, Move("elem", "L", u))
        for v in V.elements:
            if v in ran:
                continue
            if not any(Position(p.left, p.right, _sorted_pairs(p.match + ((u, v),))) in R
                       for u in U.elements if u not in dom):
                return Verification(False, "B2", p, Move("elem", "R", v))
        for pi in sysL.arrows_from(p.left):
            if not any(Position(pi.dst, rho.dst, push(p.match, pi.map, rho.map)) in R
                       for rho in sysR.arrows_from(p.right)):
                return Verification(False, "B3", p, Move("arrow", "L", pi))
        for rho in sysR.arrows_from(p.right):
            if not any(Position(pi.dst, rho.dst, push(p.match, pi.map, rho.map)) in R
                       for pi in sysL.arrows_from(p.left)):
                return Verification(False, "B3", p, Move("arrow", "R", rho))
    return Verification(True)


@dataclass(frozen=True)
class IsoVerification(Verification):
    bitotal: bool = False


def verify_iso_bisimulation(w: IsoBisimWitness, sysL: PotentialistSystem,
                            sysR: PotentialistSystem) -> IsoVerification:
    if not w.xi:
        return IsoVerification(False, "nonempty")
    bitotal = ({m for m, _ in w.xi} == set(sysL.worlds)
               and {n for _, n in w.xi} == set(sysR.worlds))
    for (m, n), xi in w.xi.items():
        M, N = sysL.structure(m), sysR.structure(n)
        if (xi.domain() != M.universe or xi.image() != N.universe
                or not is_embedding(M, N, xi) or not is_embedding(N, M, xi.inverse())):
            return IsoVerification(False, "isomorphism", Position(m, n, xi.pairs), bitotal=bitotal)
    for (m, n), xi in w.xi.items():
        for pi in sysL.arrows_from(m):
            if not any(xi.then(rho.map) == pi.map.then(w.xi[(pi.dst, rho.dst)])
                       for rho in sysR.arrows_from(n) if (pi.dst, rho.dst) in w.xi):
                return IsoVerification(False, "square", Position(m, n, xi.pairs),
                                       Move("arrow", "L", pi), bitotal=bitotal)
        for rho in sysR.arrows_from(n):
            if not any(xi.then(rho.map) == pi.map.then(w.xi[(pi.dst, rho.dst)])
                       for pi in sysL.arrows_from(m) if (pi.dst, rho.dst) in w.xi):
                return IsoVerification(False, "square", Position(m, n, xi.pairs),
                                       Move("arrow", "R", rho), bitotal=bitotal)
    return IsoVerification(True, bitotal=bitotal)


def derived_bisimulation(w: IsoBisimWitness) -> BisimulationRelation:
    """All (M, a) ~ (N, xi(a)): every restriction of every witnessing isomorphism."""
    out = set()
    for (m, n), xi in w.xi.items():
        pairs = xi.pairs
        for k in range(len(pairs) + 1):
            for sub in combinations(pairs, k):
                out.add(Position(m, n, _sorted_pairs(sub)))
    return BisimulationRelation(frozenset(out))


def is_bitotal(rel: BisimulationRelation, sysL: PotentialistSystem, sysR: PotentialistSystem) -> bool:
    """Every canonical pointed pair on either side (world + injective tuple up to order)
    appears in some related position."""
    left = {(p.left, frozenset(a for a, _ in p.match)) for p in rel.positions}
    right = {(p.right, frozenset(b for _, b in p.match)) for p in rel.positions}
    for w, s in sysL.worlds.items():
        for k in range(len(s) + 1):
            for sub in combinations(s.elements, k):
                if (w, frozenset(sub)) not in left:
                    return False
    for w, s in sysR.worlds.items():
        for k in range(len(s) + 1):
            for sub in combinations(s.elements, k):
                if (w, frozenset(sub)) not in right:
                    return False
    return True


# strategies ---------------------------------------------------------------

def eloise_reply(table: RankTable, pos: Position, move: Move) -> tuple[Move, Position]:
    """Lexicographically least reply keeping rank >= rank(pos) - 1 (infinity stays infinity)."""
    r = table.rank(pos)
    if r != INF and r < 1:
        raise NoReply(f"position {pos} has rank {format_rank(r)}; Eloise cannot keep the game going")
    need = INF if r == INF else r - 1
    for reply, nxt in table.replies(pos, move):
        if nxt is not None and table.rank(nxt) >= need:
            return reply, nxt
    raise NoReply(f"no reply to {move} reaching rank {format_rank(need)}")


def eloise_best(table: RankTable, pos: Position, move: Move) -> int | float:
    """Best rank Eloise can reach in reply to ``move`` (-1 if every reply is inconsistent)."""
    return max((table.rank(nxt) for _, nxt in table.replies(pos, move)), default=-1)


def abelard_best(table: RankTable, pos: Position) -> Move:
    """Move minimizing Eloise's best achievable rank; ties broken by move order."""
    best, best_val = None, None
    for mv in table.legal_moves(pos):
        val = eloise_best(table, pos, mv)
        if best_val is None or val < best_val:
            best, best_val = mv, val
    return best
