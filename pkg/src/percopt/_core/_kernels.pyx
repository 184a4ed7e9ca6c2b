# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled reachability kernel over pre-drawn per-edge coins.

Directed edge (u -> indices[j]) counts as occupied when coins[j] falls
below the source node's threshold.  Returns the 0/1 mask of nodes reachable
from the seed through occupied edges; identical by construction to the
numpy fallback because both consume the same coin array.
"""
import numpy as np

cimport numpy as cnp


def reach_mask(
    cnp.int64_t[::1] indptr,
    cnp.int32_t[::1] indices,
    double[::1] node_threshold,
    double[::1] coins,
    Py_ssize_t seed_node,
):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    if seed_node < 0 or seed_node >= n:
        raise IndexError("seed node out of range")
    out = np.zeros(n, dtype=np.uint8)
    stack_arr = np.empty(n, dtype=np.int64)
    cdef cnp.uint8_t[::1] visited = out
    cdef cnp.int64_t[::1] stack = stack_arr
    cdef Py_ssize_t sp = 0
    cdef Py_ssize_t u, v
    cdef cnp.int64_t j
    cdef double thr

    visited[seed_node] = 1
    stack[sp] = seed_node
    sp += 1
    while sp > 0:
        sp -= 1
        u = stack[sp]
        thr = node_threshold[u]
        if thr <= 0.0:
            continue
        for j in range(indptr[u], indptr[u + 1]):
            if coins[j] < thr:
                v = indices[j]
                if not visited[v]:
                    visited[v] = 1
                    stack[sp] = v
                    sp += 1
    return out
