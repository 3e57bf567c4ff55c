"""Brute-force oracle for rank one: the (q+1)-regular tree.

The rank-1 building is a tree in which every vertex has q+1 neighbors and the
radial coordinate is the graph distance to the root.  Everything here is
computed by explicit enumeration so it can serve as an independent check of
the closed-form kernel combinatorics.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from .exactnum import QSqrt


def build_ball(q, depth):
    """Explicit adjacency lists of the radius-`depth` ball around the root (vertex 0)."""
    adj = [[]]
    frontier = [0]
    for level in range(depth):
        nxt = []
        for v in frontier:
            n_children = q + 1 if v == 0 else q
            for _ in range(n_children):
                w = len(adj)
                adj.append([v])
                adj[v].append(w)
                nxt.append(w)
        frontier = nxt
    return adj


def bfs_distances(adj, src):
    dist = [-1] * len(adj)
    dist[src] = 0
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def ball_step_counts(q, depth):
    """K(k, +-1) for k <= depth by BFS on an explicit ball, no tree shortcuts."""
    adj = build_ball(q, depth + 1)
    dist0 = bfs_distances(adj, 0)
    counts = {0: {1: len(adj[0])}}
    for k in range(1, depth + 1):
        x = next(v for v in range(len(adj)) if dist0[v] == k)
        row = {}
        for y in adj[x]:
            row[dist0[y]] = row.get(dist0[y], 0) + 1
        counts[k] = row
    return counts


# ---- word representation, for regimes where the explicit ball is infeasible ----


def _word_neighbors(w, q):
    out = []
    if w:
        out.append(w[:-1])
    first_letters = q + 1 if not w else q
    for c in range(first_letters):
        out.append(w + (c,))
    return out


def _word_distance(u, v):
    k = 0
    for a, b in zip(u, v):
        if a != b:
            break
        k += 1
    return len(u) + len(v) - 2 * k


def word_step_counts(q, depth):
    """Same counts via reduced-word vertices; scales to large q."""
    counts = {}
    for k in range(depth + 1):
        x = (0,) * k
        row = {}
        for y in _word_neighbors(x, q):
            d = _word_distance(y, ())
            row[d] = row.get(d, 0) + 1
        counts[k] = row
    return counts


def vertex_dp_radial_law(q, n, start_radius=0):
    """Exact radial law after n steps of the tree simple random walk.

    Dynamic programming over the explicit vertices of a ball that is large
    enough for no mass to escape; masses are exact rationals.
    """
    depth = start_radius + n + 1
    adj = build_ball(q, depth)
    dist0 = bfs_distances(adj, 0)
    start = 0 if start_radius == 0 else next(
        v for v in range(len(adj)) if dist0[v] == start_radius
    )
    p = Fraction(1, q + 1)
    law = {start: Fraction(1)}
    for _ in range(n):
        nxt = {}
        for v, mass in law.items():
            share = mass * p
            for w in adj[v]:
                nxt[w] = nxt.get(w, Fraction(0)) + share
        law = nxt
    radial = {}
    for v, mass in law.items():
        k = dist0[v]
        radial[k] = radial.get(k, Fraction(0)) + mass
    assert sum(radial.values()) == 1
    return radial


def spherical_values(q, kmax):
    """Bottom-of-spectrum spherical function on the tree, by its exact recursion.

    F(0) = 1 and F(1) = rho (forced by the origin row); deeper values follow
    from the three-term eigenvalue recursion of the radial simple walk.
    Returned as exact elements of Q(sqrt q).
    """
    rho = QSqrt(0, Fraction(2, q + 1), q)
    vals = [QSqrt(1), rho]
    for k in range(1, kmax):
        # (q/(q+1)) F(k+1) + (1/(q+1)) F(k-1) = rho F(k)
        nxt = (rho * vals[k] * (q + 1) - vals[k - 1]) / q
        vals.append(nxt)
    return vals[: kmax + 1]
