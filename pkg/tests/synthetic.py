"""Seeded random graphs shared by the unit and acceptance suites."""

import numpy as np

from mlcent.graphio import Graph


def er_graph(n: int, prob: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p), edges drawn in fixed (i, j) order."""
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < prob:
                edges.append((i, j))
    return Graph(n=n, edges=tuple(edges))


def planted_clique(n: int, prob: float, k: int, seed: int) -> Graph:
    """G(n, p) background with a clique forced on nodes 0..k-1."""
    rng = np.random.default_rng(seed)
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < prob:
                edges.add((i, j))
    for i in range(k):
        for j in range(i + 1, k):
            edges.add((i, j))
    return Graph(n=n, edges=tuple(sorted(edges)))


def distinct_degree_graph() -> Graph:
    """Seven nodes with degree sequence (5, 4, 3, 2, 2, 1, 1).

    The top degrees are pairwise distinct with a unique maximum; a simple
    graph with all degrees distinct does not exist, so ties remain only at
    the bottom.
    """
    edges = (
        (0, 1), (0, 2), (0, 3), (0, 4), (0, 5),
        (1, 2), (1, 3), (1, 6), (2, 4),
    )
    return Graph(n=7, edges=edges)
