"""Playing the game: machine strategies, transcripts and a terminal dialogue."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .games import (GameError, Move, NoReply, Position, RankTable, abelard_best, eloise_reply,
                    format_rank, is_partial_iso_position)


@dataclass
class Transcript:
    start: Position
    moves: list = field(default_factory=list)      # (abelard move, eloise move or None)
    positions: list = field(default_factory=list)  # position after each round; None = inconsistent
    winner: str | None = None                      # "abelard", or None while Eloise survives

    @property
    def rounds(self) -> int:
        return len(self.moves)

    def lines(self) -> list[str]:
        out = [f"start {self.start}"]
        for i, ((a, e), p) in enumerate(zip(self.moves, self.positions), 1):
            out.append(f"{i}. Abelard {a}; Eloise {e if e is not None else '-'} -> "
                       f"{p if p is not None else 'inconsistent'}")
        out.append(f"winner: {self.winner or 'eloise (so far)'}")
        return out


def machine_eloise(table: RankTable, pos: Position, move: Move):
    """eloise_reply when the rank allows it; otherwise the least reply of maximal rank."""
    try:
        return eloise_reply(table, pos, move)
    except NoReply:
        opts = table.replies(pos, move)
        if not opts:
            return None, None
        best = max(table.rank(n) for _, n in opts)
        return next((r, n) for r, n in opts if table.rank(n) == best)


def random_abelard(seed) -> Callable:
    rng = random.Random(seed)
    return lambda table, pos: rng.choice(table.legal_moves(pos))


def _survives(table: RankTable, pos: Position | None) -> bool:
    return pos is not None and is_partial_iso_position(table.sysL, table.sysR, pos)


def play(table: RankTable, start: Position, abelard: Callable = abelard_best,
         eloise: Callable = machine_eloise, max_rounds: int = 100) -> Transcript:
    """Run strategies against each other until Abelard wins or ``max_rounds`` pass."""
    tr = Transcript(start)
    if not _survives(table, start):
        tr.winner = "abelard"
        return tr
    pos = start
    for _ in range(max_rounds):
        a = abelard(table, pos)
        e, nxt = eloise(table, pos, a)
        tr.moves.append((a, e))
        tr.positions.append(nxt)
        if not _survives(table, nxt):
            tr.winner = "abelard"
            break
        pos = nxt
    return tr


def replay(table: RankTable, start: Position, moves) -> Transcript:
    """Rebuild a transcript from its move list, checking legality."""
    tr = Transcript(start)
    pos = start
    if not _survives(table, pos):
        tr.winner = "abelard"
    for a, e in moves:
        if tr.winner:
            raise GameError("moves after the game ended")
        opts = dict(table.replies(pos, a))
        if e is not None and e not in opts:
            raise GameError(f"illegal reply {e} to {a}")
        nxt = opts.get(e)
        tr.moves.append((a, e))
        tr.positions.append(nxt)
        if not _survives(table, nxt):
            tr.winner = "abelard"
        pos = nxt
    return tr


def _choose(options, prompt: str, input_fn, output_fn):
    for i, o in enumerate(options):
        output_fn(f"  [{i}] {o}")
    while True:
        raw = input_fn(prompt)
        if raw is None or raw.strip() in ("q", "quit"):
            return None
        try:
            k = int(raw)
            if 0 <= k < len(options):
                return options[k]
        except ValueError:
            pass
        output_fn(f"illegal choice {raw.strip()!r}; pick 0..{len(options) - 1} or q")


def play_interactive(table: RankTable, start: Position, human: str = "abelard",
                     input_fn=input, output_fn=print, max_rounds: int = 100) -> Transcript:
    """Terminal dialogue; the machine takes the other role."""
    if human not in ("abelard", "eloise"):
        raise GameError("human side must be 'abelard' or 'eloise'")
    tr = Transcript(start)
    pos = start
    output_fn(f"start {start}  rank {format_rank(table.rank(start))}")
    if not _survives(table, pos):
        tr.winner = "abelard"
    while not tr.winner and tr.rounds < max_rounds:
        if human == "abelard":
            a = _choose(table.legal_moves(pos), "your move> ", input_fn, output_fn)
            if a is None:
                break
            e, nxt = machine_eloise(table, pos, a)
            output_fn(f"Eloise answers {e}")
        else:
            a = abelard_best(table, pos)
            output_fn(f"Abelard plays {a}")
            opts = table.replies(pos, a)
            if not opts:
                e, nxt = None, None
            else:
                choice = _choose([r for r, _ in opts], "your reply> ", input_fn, output_fn)
                if choice is None:
                    break
                e, nxt = choice, dict(opts)[choice]
        tr.moves.append((a, e))
        tr.positions.append(nxt)
        if not _survives(table, nxt):
            tr.winner = "abelard"
        else:
            pos = nxt
            output_fn(f"now at {pos}  rank {format_rank(table.rank(pos))}")
    output_fn(f"winner: {tr.winner or 'eloise (so far)'}")
    return tr
