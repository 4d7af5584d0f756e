# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled rank solver; mirrors ``_rank_py.solve_ranks``."""

import numpy as np
cimport numpy as cnp

cdef int INFINITY = -2


def solve_ranks(Py_ssize_t n, base, move_owner, reply_ptr, reply_tgt):
    cdef cnp.int32_t[::1] b = np.ascontiguousarray(base, dtype=np.int32)
    cdef cnp.int32_t[::1] owner = np.ascontiguousarray(move_owner, dtype=np.int32)
    cdef cnp.int32_t[::1] ptr = np.ascontiguousarray(reply_ptr, dtype=np.int32)
    cdef cnp.int32_t[::1] tgt = np.ascontiguousarray(reply_tgt, dtype=np.int32)
    cdef Py_ssize_t n_moves = owner.shape[0]
    cdef Py_ssize_t n_edges = tgt.shape[0]
    cdef Py_ssize_t i, j, m, p, r, head = 0, tail = 0
    cdef int lr, top = -1

    count_arr = np.empty(n_moves, dtype=np.int32)
    cdef cnp.int32_t[::1] count = count_arr
    for m in range(n_moves):
        count[m] = ptr[m + 1] - ptr[m]

    rev_ptr_arr = np.zeros(n + 1, dtype=np.int32)
    cdef cnp.int32_t[::1] rev_ptr = rev_ptr_arr
    for j in range(n_edges):
        rev_ptr[tgt[j] + 1] += 1
    for i in range(n):
        rev_ptr[i + 1] += rev_ptr[i]
    fill_arr = np.array(rev_ptr_arr[:n], dtype=np.int32)
    cdef cnp.int32_t[::1] fill = fill_arr
    rev_arr = np.empty(n_edges, dtype=np.int32)
    cdef cnp.int32_t[::1] rev = rev_arr
    for m in range(n_moves):
        for j in range(ptr[m], ptr[m + 1]):
            r = tgt[j]
            rev[fill[r]] = <cnp.int32_t>m
            fill[r] += 1

    level_arr = np.full(n, INFINITY, dtype=np.int32)
    cdef cnp.int32_t[::1] level = level_arr
    queue_arr = np.empty(n, dtype=np.int32)
    cdef cnp.int32_t[::1] queue = queue_arr
    for p in range(n):
        if b[p] == 0:
            level[p] = -1
            queue[tail] = <cnp.int32_t>p
            tail += 1
    for m in range(n_moves):
        p = owner[m]
        if count[m] == 0 and level[p] == INFINITY:
            level[p] = 0
            queue[tail] = <cnp.int32_t>p
            tail += 1
    while head < tail:
        r = queue[head]
        head += 1
        lr = level[r]
        if lr > top:
            top = lr
        for j in range(rev_ptr[r], rev_ptr[r + 1]):
            m = rev[j]
            count[m] -= 1
            if count[m] == 0:
                p = owner[m]
                if level[p] == INFINITY:
                    level[p] = lr + 1
                    queue[tail] = <cnp.int32_t>p
                    tail += 1
    return level_arr.tolist(), top + 2
