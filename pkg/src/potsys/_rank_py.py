"""Pure-Python rank solver; same contract as the compiled ``_rank_c`` module."""

from collections import deque

INFINITY = -2


def solve_ranks(n, base, move_owner, reply_ptr, reply_tgt):
    """Backward induction over the game graph.

    ``base[p]`` is 1 when position p passes the level-0 test. Abelard move ``m``
    belongs to ``move_owner[m]``; its Eloise replies are
    ``reply_tgt[reply_ptr[m]:reply_ptr[m+1]]`` (deduplicated).
    Returns ``(levels, rounds)``: level -1 for failed positions, -2 (INFINITY)
    for the stable residue, otherwise the largest k with rank >= k; ``rounds``
    is the number of refinement rounds before stabilization.
    """
    n_moves = len(move_owner)
    count = [reply_ptr[m + 1] - reply_ptr[m] for m in range(n_moves)]
    # reverse index: position -> moves in which it is a reply
    rev_ptr = [0] * (n + 1)
    for t in reply_tgt:
        rev_ptr[t + 1] += 1
    for i in range(n):
        rev_ptr[i + 1] += rev_ptr[i]
    fill = rev_ptr[:-1]
    rev = [0] * len(reply_tgt)
    for m in range(n_moves):
        for j in range(reply_ptr[m], reply_ptr[m + 1]):
            t = reply_tgt[j]
            rev[fill[t]] = m
            fill[t] += 1

    level = [INFINITY] * n
    queue = deque()
    for p in range(n):
        if not base[p]:
            level[p] = -1
            queue.append(p)
    for m in range(n_moves):
        p = move_owner[m]
        if count[m] == 0 and level[p] == INFINITY:
            level[p] = 0
            queue.append(p)
    top = -1
    while queue:
        r = queue.popleft()
        lr = level[r]
        if lr > top:
            top = lr
        for j in range(rev_ptr[r], rev_ptr[r + 1]):
            m = rev[j]
            count[m] -= 1
            if count[m] == 0:
                p = move_owner[m]
                if level[p] == INFINITY:
                    level[p] = lr + 1
                    queue.append(p)
    return level, top + 2
