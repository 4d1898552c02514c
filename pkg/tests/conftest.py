"""Shared test helpers: seeded random graphs and tiny fixtures."""

import random

from homind.graphs import Graph


def random_graph(rng, n, p=0.5):
    """Erdos-Renyi G(n, p) from a seeded random.Random or Xoshiro generator."""
    if hasattr(rng, "randbelow"):
        threshold = int(p * 1000)
        edges = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if rng.randbelow(1000) < threshold
        ]
    else:
        edges = [
            (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p
        ]
    return Graph.from_edges(n, edges)


def permuted_copy(rng, g):
    """An isomorphic copy of g under a uniformly random relabelling."""
    perm = list(range(g.n))
    rng.shuffle(perm)
    return Graph.from_edges(g.n, [(perm[u], perm[v]) for u, v in g.edges])


def seeded(seed):
    return random.Random(seed)
