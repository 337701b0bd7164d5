"""Slow reference implementations written straight from the definitions.

Nothing here shares code with the fast paths; the verification suites and
the test-suite compare the two.
"""

from __future__ import annotations

import itertools
from collections import deque

import numpy as np


def adjacency_lists(n, edges):
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[int(u)].add(int(v))
        adj[int(v)].add(int(u))
    return adj


def bfs(adj, source, max_depth=None):
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        if max_depth is not None and dist[v] == max_depth:
            continue
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def features(n, edges):
    """Six-vector [mean deg, mean clustering, mean closeness, density, assortativity, transitivity]."""
    adj = adjacency_lists(n, edges)
    deg = [len(a) for a in adj]
    clustering, closeness = [], []
    for v in range(n):
        nb = sorted(adj[v])
        links = sum(1 for a, b in itertools.combinations(nb, 2) if b in adj[a])
        clustering.append(2.0 * links / (deg[v] * (deg[v] - 1)) if deg[v] >= 2 else 0.0)
        dist = bfs(adj, v)
        reach = len(dist) - 1
        total = sum(dist.values())
        closeness.append((reach / total) * (reach / (n - 1)) if total > 0 else 0.0)
    m = sum(deg) / 2
    dens = 2.0 * m / (n * (n - 1)) if n > 1 else 0.0

    closed = open_or_closed = 0
    for v in range(n):
        for a, b in itertools.combinations(sorted(adj[v]), 2):
            open_or_closed += 1
            closed += b in adj[a]
    trans = closed / open_or_closed if open_or_closed else 0.0

    xs, ys = [], []
    for u in range(n):
        for w in adj[u]:
            xs.append(deg[u])
            ys.append(deg[w])
    assort = 0.0
    if xs:
        mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
        cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
        vx = sum((x - mx) ** 2 for x in xs)
        vy = sum((y - my) ** 2 for y in ys)
        if vx > 0 and vy > 0:
            assort = cov / (vx * vy) ** 0.5
    return np.array([sum(deg) / n, sum(clustering) / n, sum(closeness) / n, dens, assort, trans])


def betweenness(n, edges):
    """Normalized betweenness by counting shortest paths through each node."""
    adj = adjacency_lists(n, edges)
    dist = [bfs(adj, s) for s in range(n)]

    def count_paths(s):
        counts = {s: 1}
        for v in sorted(dist[s], key=dist[s].get):
            if v != s:
                counts[v] = sum(counts[u] for u in adj[v] if dist[s].get(u) == dist[s][v] - 1)
        return counts

    sigma = [count_paths(s) for s in range(n)]
    out = np.zeros(n)
    for s, t in itertools.combinations(range(n), 2):
        if t not in dist[s]:
            continue
        for v in range(n):
            if v in (s, t) or v not in dist[s] or t not in dist[v]:
                continue
            if dist[s][v] + dist[v][t] == dist[s][t]:
                out[v] += sigma[s][v] * sigma[v][t] / sigma[s][t]
    return out / ((n - 1) * (n - 2) / 2) if n > 2 else out


def hom_count(motif_nodes, motif_edges, matrix):
    """Sum over every map V(F) -> V(G) of the product of matrix entries on motif edges."""
    a = np.asarray(matrix, dtype=np.float64)
    total = 0.0
    for phi in itertools.product(range(len(a)), repeat=motif_nodes):
        prod = 1.0
        for u, v in motif_edges:
            prod *= a[phi[u], phi[v]]
            if prod == 0:
                break
        total += prod
    return total


def cut_norm(d):
    """max over row and column subsets S, T of |sum_{S x T} d| / r^2."""
    d = np.asarray(d, dtype=np.float64)
    r = len(d)
    subsets = np.array(list(itertools.product([0.0, 1.0], repeat=r)))
    return float(np.abs(subsets @ d @ subsets.T).max()) / (r * r)


def gw_objective(c1, c2, plan):
    """Direct four-index sum of the squared-loss GW objective."""
    total = 0.0
    r1, r2 = plan.shape
    for i, j, k, l in itertools.product(range(r1), range(r2), range(r1), range(r2)):
        total += (c1[i, k] - c2[j, l]) ** 2 * plan[i, j] * plan[k, l]
    return total


def largest_gap_step_function(n, edges, r, k):
    """Per-graph largest-gap estimate on an r x r grid, computed node by node.

    Only positive degree gaps are cut. Every node gets width 1/n; the node-level block-density matrix is
    refined to a common grid of lcm(n, r) cells and averaged down to r.
    """
    adj = adjacency_lists(n, edges)
    deg = [len(a) for a in adj]
    order = sorted(range(n), key=lambda v: (-deg[v], v))
    k = min(n, k)
    gaps = [deg[order[i]] - deg[order[i + 1]] for i in range(n - 1)]
    # stable sort keeps the leftmost position first among equal gaps
    cuts = sorted(i for i in sorted(range(n - 1), key=lambda i: -gaps[i])[:k - 1] if gaps[i] > 0)
    block_of = {}
    start, b = 0, 0
    for end in cuts + [n - 1]:
        for pos in range(start, end + 1):
            block_of[order[pos]] = b
        start, b = end + 1, b + 1
    k = b
    members = [[v for v in range(n) if block_of[v] == a] for a in range(k)]
    dens = np.zeros((k, k))
    for a in range(k):
        for c in range(k):
            links = sum(1 for u in members[a] for v in members[c] if v in adj[u])
            if a == c:
                size = len(members[a])
                dens[a, c] = links / (size * (size - 1)) if size > 1 else 0.0
            else:
                dens[a, c] = links / (len(members[a]) * len(members[c]))
    node_level = np.array([[dens[block_of[order[i]], block_of[order[j]]] for j in range(n)] for i in range(n)])
    fine = int(np.lcm(n, r))
    up = np.repeat(np.repeat(node_level, fine // n, axis=0), fine // n, axis=1)
    return up.reshape(r, fine // r, r, fine // r).mean(axis=(1, 3))
