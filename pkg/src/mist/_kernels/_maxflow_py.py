"""Pure-Python max-flow kernel (fallback backend): Dinic's algorithm.

Deliberately a different algorithm family than the compiled backend's
tree-reuse solver, so the two lanes cross-check each other.
"""

from collections import deque

import numpy as np


def maxflow(num_nodes, src_cap, snk_cap, edges, caps):
    """Exact s-t max-flow on a pixel network.

    src_cap/snk_cap are per-node terminal capacities; `edges` is an (m, 2)
    array of node pairs carrying symmetric capacity caps[i] in each
    direction. Returns (flow, fg) where fg marks nodes NOT on the sink
    side of the final residual graph (source side = foreground).
    """
    n = int(num_nodes)
    s, t = n, n + 1
    total = n + 2

    # arc storage: to[], cap[], paired so arc i ^ 1 is the reverse arc
    to: list[int] = []
    cap: list[float] = []
    head: list[list[int]] = [[] for _ in range(total)]

    def add_arc(a, b, c_ab, c_ba):
        head[a].append(len(to))
        to.append(b)
        cap.append(float(c_ab))
        head[b].append(len(to))
        to.append(a)
        cap.append(float(c_ba))

    for u in range(n):
        if src_cap[u] > 0:
            add_arc(s, u, src_cap[u], 0.0)
        if snk_cap[u] > 0:
            add_arc(u, t, snk_cap[u], 0.0)
    for i in range(edges.shape[0]):
        a, b = int(edges[i, 0]), int(edges[i, 1])
        c = float(caps[i])
        if c > 0:
            add_arc(a, b, c, c)

    level = [0] * total
    it = [0] * total
    flow = 0.0

    def bfs():
        for i in range(total):
            level[i] = -1
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for a in head[u]:
                v = to[a]
                if cap[a] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    q.append(v)
        return level[t] >= 0

    def dfs(u, pushed):
        if u == t:
            return pushed
        while it[u] < len(head[u]):
            a = head[u][it[u]]
            v = to[a]
            if cap[a] > 0 and level[v] == level[u] + 1:
                got = dfs(v, min(pushed, cap[a]))
                if got > 0:
                    cap[a] -= got
                    cap[a ^ 1] += got
                    return got
            it[u] += 1
        return 0.0

    import sys
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, total + 100))
    try:
        while bfs():
            for i in range(total):
                it[i] = 0
            while True:
                pushed = dfs(s, float("inf"))
                if pushed <= 0:
                    break
                flow += pushed
    finally:
        sys.setrecursionlimit(old_limit)

    # sink side = nodes that still reach t in the residual graph
    sink_side = np.zeros(total, dtype=bool)
    sink_side[t] = True
    q = deque([t])
    while q:
        u = q.popleft()
        for a in head[u]:
            v = to[a]
            # arc a is u->v; v reaches t through u iff residual v->u > 0
            if cap[a ^ 1] > 0 and not sink_side[v]:
                sink_side[v] = True
                q.append(v)

    fg = ~sink_side[:n]
    return flow, fg
