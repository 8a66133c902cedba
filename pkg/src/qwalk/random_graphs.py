"""Seeded random graph fixtures for property tests and the CLI."""

from __future__ import annotations

import numpy as np

from .graph import Graph


def random_graph(
    rng: np.random.Generator,
    max_vertices: int = 6,
    max_edges: int = 8,
    max_degree: int = 3,
) -> Graph:
    """Connected random multigraph with default coins everywhere.

    Starts from a random spanning tree and sprinkles extra edges (parallel
    edges allowed) while keeping every internal degree at most
    ``max_degree``; the cap keeps path enumeration affordable when the
    result feeds the brute-force amplitude checks.  Entry and exit are two
    distinct random vertices.
    """
    if max_vertices < 2:
        raise ValueError("need at least two vertices for distinct entry and exit")
    nv = int(rng.integers(2, max_vertices + 1))
    degree = [0] * nv
    edges: list[tuple[int, int, str]] = []

    order = list(rng.permutation(nv))
    for i in range(1, nv):
        anchors = [v for v in order[:i] if degree[v] < max_degree]
        if not anchors:
            anchors = order[:i]
        u = int(anchors[rng.integers(len(anchors))])
        v = int(order[i])
        edges.append((u, v, f"e{len(edges)}"))
        degree[u] += 1
        degree[v] += 1

    budget = max_edges - len(edges)
    for _ in range(int(rng.integers(0, budget + 1)) if budget > 0 else 0):
        pairs = [
            (a, b)
            for a in range(nv)
            for b in range(a + 1, nv)
            if degree[a] < max_degree and degree[b] < max_degree
        ]
        if not pairs:
            break
        a, b = pairs[int(rng.integers(len(pairs)))]
        edges.append((a, b, f"e{len(edges)}"))
        degree[a] += 1
        degree[b] += 1

    entry, exit_ = (int(x) for x in rng.choice(nv, size=2, replace=False))
    return Graph(
        vertices=tuple(range(nv)), edges=tuple(edges), entry=entry, exit=exit_
    )
