"""Pure-Python realisation of the hot kernels.

Mirrors ``_kernels.pyx`` call for call; used when the extension is not built
or when ``MATCHPD_PURE_PYTHON=1``.
"""

import numpy as np

from .slack_queue import EmptyQueue, SlackQueue

L_MATCHED = 0
NEXT_ITERATION = 1
DUAL_UNBOUNDED = 2


def path_search(n_left, n_right, indptr, indices, cost, mate_l, mate_r, pi_l, pi_r):
    """One alternating-forest search with interleaved dual adjustments.

    All numeric arrays hold exact integers.  ``pi_l`` / ``pi_r`` are updated
    in place.  Returns ``(flag, parent_r, even_l, odd_r, end)`` where ``end``
    is the free right vertex closing the augmenting path (or -1).
    """
    parent_r = [-1] * n_right
    even_l = [0] * n_left
    odd_r = [0] * n_right
    roots = [u for u in range(n_left) if mate_l[u] < 0]
    if not roots:
        return L_MATCHED, parent_r, even_l, odd_r, -1

    pi0_l = [int(x) for x in pi_l]
    pi0_r = [int(x) for x in pi_r]
    join_l = [0] * n_left
    join_r = [0] * n_right
    queue = SlackQueue()

    def grow(u):
        even_l[u] = 1
        join_l[u] = queue.offset
        base = pi0_l[u]
        queue.insert_even(u, ((int(indices[k]), int(cost[k]) - base - pi0_r[indices[k]])
                              for k in range(indptr[u], indptr[u + 1])))

    for u in roots:
        grow(u)
    flag, end = DUAL_UNBOUNDED, -1
    while True:
        try:
            v, eps = queue.extract_min()
        except EmptyQueue:
            break
        queue.apply_uniform_shift(eps)
        odd_r[v] = 1
        join_r[v] = queue.offset
        parent_r[v] = queue.witness(v)
        if mate_r[v] < 0:
            flag, end = NEXT_ITERATION, v
            break
        grow(int(mate_r[v]))

    total = queue.offset
    for u in range(n_left):
        if even_l[u]:
            pi_l[u] = pi0_l[u] + (total - join_l[u])
    for v in range(n_right):
        if odd_r[v]:
            pi_r[v] = pi0_r[v] - (total - join_r[v])
    return flag, parent_r, even_l, odd_r, end


def greedy_batch(indptr, indices, keys):
    """Online greedy over many priority draws at once.

    ``keys`` has one row per trial and one column per offline vertex; each
    arrival ``j`` (neighbours ``indices[indptr[j]:indptr[j+1]]``, ascending)
    takes its free neighbour of largest key, ties to the lower index.
    Returns the ``(trials, arrivals)`` array of chosen offline vertices, -1
    for unmatched arrivals.
    """
    keys = np.asarray(keys, dtype=np.float64)
    trials, n_off = keys.shape
    n_on = len(indptr) - 1
    mates = np.full((trials, n_on), -1, dtype=np.int32)
    used = np.zeros((trials, n_off), dtype=bool)
    rows = np.arange(trials)
    for j in range(n_on):
        nb = np.asarray(indices[indptr[j]:indptr[j + 1]], dtype=np.intp)
        if nb.size == 0:
            continue
        masked = np.where(used[:, nb], -np.inf, keys[:, nb])
        pick = nb[np.argmax(masked, axis=1)]
        ok = ~used[rows, pick]
        mates[ok, j] = pick[ok]
        used[rows[ok], pick[ok]] = True
    return mates
