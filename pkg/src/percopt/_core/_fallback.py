"""Pure-numpy reachability kernel, used when the compiled extension is absent.

Works level by level: first restrict the adjacency structure to occupied
directed edges (coin below the source threshold), then expand a frontier
until no unvisited node is reachable.  Consumes the identical coin array as
the compiled kernel, so both backends return byte-identical masks.
"""
import numpy as np


def reach_mask(indptr, indices, node_threshold, coins, seed_node):
    n = indptr.size - 1
    if not 0 <= seed_node < n:
        raise IndexError("seed node out of range")
    deg = np.diff(indptr)
    src = np.repeat(np.arange(n, dtype=np.int64), deg)
    occupied = coins < node_threshold[src]
    occ_dst = indices[occupied]
    occ_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src[occupied], minlength=n), out=occ_ptr[1:])

    visited = np.zeros(n, dtype=bool)
    visited[seed_node] = True
    frontier = np.array([seed_node], dtype=np.int64)
    while frontier.size:
        starts = occ_ptr[frontier]
        counts = occ_ptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        # gather the concatenated occupied out-neighbors of the whole frontier
        segment_base = np.repeat(np.cumsum(counts) - counts, counts)
        flat = np.repeat(starts, counts) + (np.arange(total) - segment_base)
        neighbors = occ_dst[flat]
        neighbors = neighbors[~visited[neighbors]]
        if neighbors.size == 0:
            break
        frontier = np.unique(neighbors)
        visited[frontier] = True
    return visited.astype(np.uint8)
