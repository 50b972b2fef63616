# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled max-flow kernel: augmenting paths with search-tree reuse
(grow/augment/adopt), the standard approach for vision grid graphs.

Terminal capacities are folded into per-node tr_cap (positive = residual
from source, negative = residual to sink) after pre-pushing the trivial
source->node->sink flow.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef int FREE = 0, SRC = 1, SNK = 2
cdef int P_NONE = -1, P_TERMINAL = -2


cdef class _IntQueue:
    cdef cnp.int64_t[::1] buf
    cdef Py_ssize_t head, tail
    cdef object arr

    def __cinit__(self, Py_ssize_t cap0):
        self.arr = np.empty(max(cap0, 16), dtype=np.int64)
        self.buf = self.arr
        self.head = 0
        self.tail = 0

    cdef inline void push(self, cnp.int64_t v):
        cdef object bigger
        if self.tail == self.buf.shape[0]:
            if self.head > 0:  # compact
                n = self.tail - self.head
                np.asarray(self.arr)[:n] = np.asarray(self.arr)[self.head:self.tail]
                self.head = 0
                self.tail = n
            else:
                bigger = np.empty(self.buf.shape[0] * 2, dtype=np.int64)
                bigger[:self.tail] = self.arr
                self.arr = bigger
                self.buf = self.arr
        self.buf[self.tail] = v
        self.tail += 1

    cdef inline bint empty(self):
        return self.head == self.tail

    cdef inline cnp.int64_t pop(self):
        cdef cnp.int64_t v = self.buf[self.head]
        self.head += 1
        if self.head == self.tail:
            self.head = 0
            self.tail = 0
        return v


def maxflow(num_nodes,
            cnp.ndarray[cnp.float64_t, ndim=1] src_cap,
            cnp.ndarray[cnp.float64_t, ndim=1] snk_cap,
            cnp.ndarray[cnp.int64_t, ndim=2] edges,
            cnp.ndarray[cnp.float64_t, ndim=1] caps):
    """Exact s-t max-flow; returns (flow, fg) with fg = nodes not on the
    sink side of the final residual graph."""
    cdef Py_ssize_t n = num_nodes
    cdef Py_ssize_t m = edges.shape[0]
    cdef Py_ssize_t i, k, u, v, j, a, pa

    # pre-push through each node's two terminal arcs
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tr_cap = src_cap - snk_cap
    cdef double flow = float(np.minimum(src_cap, snk_cap).sum())

    # paired directed arcs: arc 2i = edges[i,0] -> edges[i,1], 2i+1 reverse
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arc_to = np.empty(2 * m, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arc_cap = np.empty(2 * m, dtype=np.float64)
    for i in range(m):
        arc_to[2 * i] = edges[i, 1]
        arc_to[2 * i + 1] = edges[i, 0]
        arc_cap[2 * i] = caps[i]
        arc_cap[2 * i + 1] = caps[i]

    # CSR adjacency of outgoing arcs
    cdef cnp.ndarray[cnp.int64_t, ndim=1] deg = np.zeros(n + 1, dtype=np.int64)
    for i in range(m):
        deg[edges[i, 0] + 1] += 1
        deg[edges[i, 1] + 1] += 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] adj_start = np.cumsum(deg)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] fill = adj_start[:n].copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] adj_arc = np.empty(2 * m, dtype=np.int64)
    for i in range(m):
        u = edges[i, 0]
        v = edges[i, 1]
        adj_arc[fill[u]] = 2 * i
        fill[u] += 1
        adj_arc[fill[v]] = 2 * i + 1
        fill[v] += 1

    cdef cnp.ndarray[cnp.int8_t, ndim=1] tree = np.zeros(n, dtype=np.int8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] parent = np.full(n, P_NONE, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dist = np.zeros(n, dtype=np.int64)

    cdef _IntQueue active = _IntQueue(n)
    cdef _IntQueue orphans = _IntQueue(64)

    for u in range(n):
        if tr_cap[u] > 0:
            tree[u] = SRC
            parent[u] = P_TERMINAL
            dist[u] = 1
            active.push(u)
        elif tr_cap[u] < 0:
            tree[u] = SNK
            parent[u] = P_TERMINAL
            dist[u] = 1
            active.push(u)

    cdef cnp.int64_t meet, tu, best
    cdef double res, bottleneck
    cdef bint valid

    while True:
        # ---- grow ----
        meet = -1
        while not active.empty():
            u = active.buf[active.head]  # peek: stay active while growing
            if tree[u] == FREE:
                active.pop()
                continue
            tu = tree[u]
            for k in range(adj_start[u], adj_start[u + 1]):
                a = adj_arc[k]
                res = arc_cap[a] if tu == SRC else arc_cap[a ^ 1]
                if res <= 0:
                    continue
                v = arc_to[a]
                if tree[v] == FREE:
                    tree[v] = tu
                    parent[v] = a ^ 1
                    dist[v] = dist[u] + 1
                    active.push(v)
                elif tree[v] != tu:
                    meet = a if tu == SRC else (a ^ 1)
                    break
            if meet >= 0:
                break
            active.pop()
        if meet < 0:
            break

        # ---- augment along source-root ... meet ... sink-root ----
        bottleneck = arc_cap[meet]
        u = arc_to[meet ^ 1]  # source-side endpoint
        while parent[u] != P_TERMINAL:
            pa = parent[u]
            if arc_cap[pa ^ 1] < bottleneck:
                bottleneck = arc_cap[pa ^ 1]
            u = arc_to[pa]
        if tr_cap[u] < bottleneck:
            bottleneck = tr_cap[u]
        v = arc_to[meet]  # sink-side endpoint
        while parent[v] != P_TERMINAL:
            pa = parent[v]
            if arc_cap[pa] < bottleneck:
                bottleneck = arc_cap[pa]
            v = arc_to[pa]
        if -tr_cap[v] < bottleneck:
            bottleneck = -tr_cap[v]

        flow += bottleneck
        arc_cap[meet] -= bottleneck
        arc_cap[meet ^ 1] += bottleneck

        u = arc_to[meet ^ 1]
        while parent[u] != P_TERMINAL:
            pa = parent[u]
            arc_cap[pa ^ 1] -= bottleneck
            arc_cap[pa] += bottleneck
            if arc_cap[pa ^ 1] <= 0:
                parent[u] = P_NONE
                orphans.push(u)
            u = arc_to[pa]
        tr_cap[u] -= bottleneck
        if tr_cap[u] <= 0:
            parent[u] = P_NONE
            orphans.push(u)

        v = arc_to[meet]
        while parent[v] != P_TERMINAL:
            pa = parent[v]
            arc_cap[pa] -= bottleneck
            arc_cap[pa ^ 1] += bottleneck
            if arc_cap[pa] <= 0:
                parent[v] = P_NONE
                orphans.push(v)
            v = arc_to[pa]
        tr_cap[v] += bottleneck
        if tr_cap[v] >= 0:
            parent[v] = P_NONE
            orphans.push(v)

        # ---- adopt ----
        while not orphans.empty():
            u = orphans.pop()
            if tree[u] == FREE:
                continue
            tu = tree[u]
            best = -1
            for k in range(adj_start[u], adj_start[u + 1]):
                a = adj_arc[k]
                v = arc_to[a]
                if tree[v] != tu or parent[v] == P_NONE:
                    continue
                res = arc_cap[a ^ 1] if tu == SRC else arc_cap[a]
                if res <= 0:
                    continue
                # valid parents must still root at a terminal
                j = v
                valid = True
                while parent[j] != P_TERMINAL:
                    pa = parent[j]
                    if pa == P_NONE:
                        valid = False
                        break
                    j = arc_to[pa]
                if valid:
                    best = a
                    break
            if best >= 0:
                parent[u] = best
                dist[u] = dist[arc_to[best]] + 1
            else:
                tree[u] = FREE
                for k in range(adj_start[u], adj_start[u + 1]):
                    a = adj_arc[k]
                    v = arc_to[a]
                    if tree[v] != tu:
                        continue
                    res = arc_cap[a ^ 1] if tu == SRC else arc_cap[a]
                    if res > 0:
                        active.push(v)
                    pa = parent[v]
                    if pa >= 0 and arc_to[pa] == u:
                        parent[v] = P_NONE
                        orphans.push(v)

    # ---- labels: reverse residual reachability from the sink ----
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] sink_side = np.zeros(n, dtype=np.uint8)
    cdef _IntQueue bfs = _IntQueue(n)
    for u in range(n):
        if tr_cap[u] < 0:
            sink_side[u] = 1
            bfs.push(u)
    while not bfs.empty():
        u = bfs.pop()
        for k in range(adj_start[u], adj_start[u + 1]):
            a = adj_arc[k]
            v = arc_to[a]
            # v reaches the sink through u iff residual v->u remains
            if arc_cap[a ^ 1] > 0 and not sink_side[v]:
                sink_side[v] = 1
                bfs.push(v)

    return flow, np.asarray(sink_side) == 0
