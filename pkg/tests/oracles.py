"""Independent reference computations used by the tests.

None of these call into the package's metric or optimisation code; they
recompute the same quantities by brute force.
"""
from __future__ import annotations

import heapq
import itertools
import math


def lp(v, p):
    return sum(abs(c) ** p for c in v) ** (1.0 / p)


# -- glued space X_p as an explicit graph ---------------------------------------------


def glued_graph_distance(p, a, b, step=0.25):
    """Shortest path in a discretised X_p.

    Points are ("ray", t) or ("block", n, coords).  The graph has a node per
    query point, per gluing point of the blocks involved, and per multiple of
    ``step`` on the ray up to beyond every node; ray neighbours are joined by
    their gap and nodes inside one block are joined by the l_p length of the
    straight segment.
    """
    pts = [a, b]
    blocks = {q[1] for q in pts if q[0] == "block"}
    top = max([q[1] if q[0] == "ray" else q[1] for q in pts] + [0]) + 2
    ray_ts = {round(k * step, 12) for k in range(int(top / step) + 1)}
    ray_ts |= {float(n) for n in blocks} | {q[1] for q in pts if q[0] == "ray"}
    nodes = [("ray", t) for t in sorted(ray_ts)]
    for q in pts:
        if q[0] == "block" and q not in nodes:
            nodes.append(q)
    index = {q: i for i, q in enumerate(nodes)}
    adj = {i: [] for i in range(len(nodes))}

    def link(u, v, w):
        adj[index[u]].append((index[v], w))
        adj[index[v]].append((index[u], w))

    ray_nodes = [q for q in nodes if q[0] == "ray"]
    for u, v in zip(ray_nodes, ray_nodes[1:]):
        link(u, v, v[1] - u[1])
    for n in blocks:
        members = [("ray", float(n))] + [q for q in nodes if q[0] == "block" and q[1] == n]
        for u, v in itertools.combinations(members, 2):
            cu = (0.0,) * n if u[0] == "ray" else u[2]
            cv = (0.0,) * n if v[0] == "ray" else v[2]
            link(u, v, lp([x - y for x, y in zip(cu, cv)], p))
    dist = {index[a]: 0.0}
    heap = [(0.0, index[a])]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        for v, w in adj[u]:
            if d + w < dist.get(v, math.inf):
                dist[v] = d + w
                heapq.heappush(heap, (d + w, v))
    return dist[index[b]]


# -- barycenter by nested golden-section search ---------------------------------------

_INVPHI = (math.sqrt(5) - 1) / 2


def golden(f, lo, hi, tol=1e-11):
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def lp_barycenter_2d(points, weights, p, tol=1e-10):
    """argmin of sum w_i ||x - v_i||_p^2 over the bounding box, by nested golden section."""
    xs = [v[0] for v in points]
    ys = [v[1] for v in points]

    def F(x, y):
        return sum(w * lp((x - v[0], y - v[1]), p) ** 2 for v, w in zip(points, weights))

    def best_y(x):
        return golden(lambda y: F(x, y), min(ys), max(ys), tol)

    x = golden(lambda x: F(x, best_y(x)), min(xs), max(xs), tol)
    return x, best_y(x)


def barycenter_1d(points, weights, lo=0.0, hi=1.0):
    return golden(lambda x: sum(w * (x - v) ** 2 for v, w in zip(points, weights)), lo, hi, 1e-12)


# -- K-groups of spheres by suspension ------------------------------------------------


def reduced_k_rank_sphere(m, q):
    """Rank of reduced K_q(S^m) from K_0(S^0) = Z, K_1(S^0) = 0 and
    the suspension shift K_q(S^m) = K_{q-1}(S^{m-1}) (degrees mod 2)."""
    if m == 0:
        return 1 if q % 2 == 0 else 0
    return reduced_k_rank_sphere(m - 1, (q - 1) % 2)


# -- lattice points -------------------------------------------------------------------


def lattice_count(p, k, n, R):
    bound = int(R // k)
    rng = range(-bound, bound + 1)
    return sum(1 for m in itertools.product(rng, repeat=n) if lp([k * c for c in m], p) <= R + 1e-12)


def bfs_distance(edges, n, s, t):
    adj = {i: set() for i in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen, frontier, d = {s}, [s], 0
    while frontier:
        if t in frontier:
            return d
        nxt = []
        for u in frontier:
            for v in adj[u] - seen:
                seen.add(v)
                nxt.append(v)
        frontier, d = nxt, d + 1
    return None
