# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Hungarian path search and batched online greedy.

Same contracts as ``_pykernels``; integers are int64 here, so callers must
keep scaled weights and potentials well inside the int64 range.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int32_t, uint8_t

cnp.import_array()

cdef enum:
    C_L_MATCHED = 0
    C_NEXT_ITERATION = 1
    C_DUAL_UNBOUNDED = 2

L_MATCHED = C_L_MATCHED
NEXT_ITERATION = C_NEXT_ITERATION
DUAL_UNBOUNDED = C_DUAL_UNBOUNDED


cdef inline bint _less(int64_t ka, int64_t a, int64_t kb, int64_t b) noexcept nogil:
    return ka < kb or (ka == kb and a < b)


cdef void _sift_up(int64_t[::1] heap, int64_t[::1] pos, int64_t[::1] key, int64_t i) noexcept nogil:
    cdef int64_t v = heap[i]
    cdef int64_t p
    while i > 0:
        p = (i - 1) >> 1
        if not _less(key[v], v, key[heap[p]], heap[p]):
            break
        heap[i] = heap[p]
        pos[heap[i]] = i
        i = p
    heap[i] = v
    pos[v] = i


cdef void _sift_down(int64_t[::1] heap, int64_t[::1] pos, int64_t[::1] key,
                     int64_t i, int64_t size) noexcept nogil:
    cdef int64_t v = heap[i]
    cdef int64_t c
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and _less(key[heap[c + 1]], heap[c + 1], key[heap[c]], heap[c]):
            c += 1
        if not _less(key[heap[c]], heap[c], key[v], v):
            break
        heap[i] = heap[c]
        pos[heap[i]] = i
        i = c
    heap[i] = v
    pos[v] = i


def path_search(int64_t n_left, int64_t n_right,
                const int64_t[::1] indptr, const int64_t[::1] indices, const int64_t[::1] cost,
                const int64_t[::1] mate_l, const int64_t[::1] mate_r,
                int64_t[::1] pi_l, int64_t[::1] pi_r):
    cdef cnp.ndarray[int64_t, ndim=1] parent_np = np.full(n_right, -1, dtype=np.int64)
    cdef cnp.ndarray[uint8_t, ndim=1] even_np = np.zeros(n_left, dtype=np.uint8)
    cdef cnp.ndarray[uint8_t, ndim=1] odd_np = np.zeros(n_right, dtype=np.uint8)
    cdef int64_t[::1] parent_r = parent_np
    cdef uint8_t[::1] even_l = even_np
    cdef uint8_t[::1] odd_r = odd_np
    cdef int64_t[::1] join_l = np.zeros(n_left, dtype=np.int64)
    cdef int64_t[::1] join_r = np.zeros(n_right, dtype=np.int64)
    # indexed binary heap over right vertices (addressable, decrease-key)
    cdef int64_t[::1] heap = np.zeros(max(n_right, 1), dtype=np.int64)
    cdef int64_t[::1] pos = np.full(max(n_right, 1), -1, dtype=np.int64)
    cdef int64_t[::1] key = np.zeros(max(n_right, 1), dtype=np.int64)
    cdef int64_t size = 0
    cdef int64_t offset = 0
    cdef int64_t u, v, k, kk, s, top, last, end = -1
    cdef int flag = C_DUAL_UNBOUNDED
    cdef bint any_root = False

    with nogil:
        for u in range(n_left):
            if mate_l[u] < 0:
                any_root = True
                break
    if not any_root:
        return L_MATCHED, parent_np, even_np, odd_np, -1

    with nogil:
        u = 0
        while u < n_left:
            if mate_l[u] < 0:
                even_l[u] = 1
                join_l[u] = 0
                for k in range(indptr[u], indptr[u + 1]):
                    v = indices[k]
                    kk = cost[k] - pi_l[u] - pi_r[v]
                    if pos[v] < 0:
                        key[v] = kk
                        parent_r[v] = u
                        heap[size] = v
                        size += 1
                        _sift_up(heap, pos, key, size - 1)
                    elif kk < key[v] or (kk == key[v] and u < parent_r[v]):
                        key[v] = kk
                        parent_r[v] = u
                        _sift_up(heap, pos, key, pos[v])
            u += 1

        while size > 0:
            top = heap[0]
            size -= 1
            if size > 0:
                last = heap[size]
                heap[0] = last
                pos[last] = 0
                _sift_down(heap, pos, key, 0, size)
            pos[top] = -2  # settled
            offset = key[top]
            odd_r[top] = 1
            join_r[top] = offset
            if mate_r[top] < 0:
                flag = C_NEXT_ITERATION
                end = top
                break
            u = mate_r[top]
            even_l[u] = 1
            join_l[u] = offset
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if pos[v] == -2:
                    continue
                kk = cost[k] - pi_l[u] - pi_r[v] + offset
                if pos[v] < 0:
                    key[v] = kk
                    parent_r[v] = u
                    heap[size] = v
                    size += 1
                    _sift_up(heap, pos, key, size - 1)
                elif kk < key[v] or (kk == key[v] and u < parent_r[v]):
                    key[v] = kk
                    parent_r[v] = u
                    _sift_up(heap, pos, key, pos[v])

        for u in range(n_left):
            if even_l[u]:
                pi_l[u] = pi_l[u] + offset - join_l[u]
        for v in range(n_right):
            if odd_r[v]:
                pi_r[v] = pi_r[v] - (offset - join_r[v])
        # right vertices left in the heap never joined the forest
        for v in range(n_right):
            if not odd_r[v]:
                parent_r[v] = -1

    return flag, parent_np, even_np, odd_np, end


def greedy_batch(const int64_t[::1] indptr, const int64_t[::1] indices, keys_in):
    cdef const double[:, ::1] keys = np.ascontiguousarray(keys_in, dtype=np.float64)
    cdef Py_ssize_t trials = keys.shape[0]
    cdef Py_ssize_t n_off = keys.shape[1]
    cdef Py_ssize_t n_on = indptr.shape[0] - 1
    cdef cnp.ndarray[int32_t, ndim=2] mates_np = np.full((trials, n_on), -1, dtype=np.int32)
    cdef int32_t[:, ::1] mates = mates_np
    cdef uint8_t[::1] used = np.zeros(max(n_off, 1), dtype=np.uint8)
    cdef Py_ssize_t t, j, k, best
    cdef double bk
    with nogil:
        for t in range(trials):
            used[:] = 0
            for j in range(n_on):
                best = -1
                bk = 0.0
                for k in range(indptr[j], indptr[j + 1]):
                    if used[indices[k]]:
                        continue
                    # indices ascend, so strict > keeps the lower index on ties
                    if best < 0 or keys[t, indices[k]] > bk:
                        best = indices[k]
                        bk = keys[t, best]
                if best >= 0:
                    used[best] = 1
                    mates[t, j] = <int32_t>best
    return mates_np
