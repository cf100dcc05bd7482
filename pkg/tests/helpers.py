"""Shared test fixtures and independent oracles.

Oracles here deliberately avoid the library's own code paths: probabilities
come from exhaustive recursion or enumeration, stationary laws from dense
linear algebra on explicitly constructed kernels.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from hybridsample.geo import Region, VenueIndex
from hybridsample.graphs import BipartiteGraph, Graph, HybridNetwork


def pair_hybrid():
    """Two users joined by one edge, two venues joined by one edge, and a
    single affiliation edge (u0, v0)."""
    target = Graph(2, [(0, 1)])
    aux = Graph(2, [(0, 1)])
    aff = BipartiteGraph(2, 2, [(0, 0)])
    return HybridNetwork(target, aux, aff)


def two_user_hybrid():
    """Users u0,u1; venues v0,v1; edges (u0,v0),(u1,v0),(u1,v1)."""
    target = Graph(2, [(0, 1)])
    aux = Graph(2, [])
    aff = BipartiteGraph(2, 2, [(0, 0), (1, 0), (1, 1)])
    return HybridNetwork(target, aux, aff)


def three_user_hybrid():
    """Users u0..u2, venues v0,v1; every user covered:
    (u0,v0),(u1,v0),(u1,v1),(u2,v1)."""
    target = Graph(3, [(0, 1), (1, 2)])
    aux = Graph(2, [])
    aff = BipartiteGraph(3, 2, [(0, 0), (1, 0), (1, 1), (2, 1)])
    return HybridNetwork(target, aux, aff)


def random_connected_graph(rng: random.Random, n: int, extra_edges: int) -> Graph:
    """Random tree plus extra random edges; always connected."""
    edges = set()
    for u in range(1, n):
        edges.add((rng.randrange(u), u))
    want = min(n - 1 + extra_edges, n * (n - 1) // 2)
    while len(edges) < want:
        a, b = rng.randrange(n), rng.randrange(n)
        if a == b:
            continue
        edges.add((min(a, b), max(a, b)))
    return Graph(n, sorted(edges))


def random_hybrid(
    rng: random.Random,
    n_t: int,
    n_a: int,
    extra_t: int | None = None,
    extra_a: int | None = None,
    aff_per_user: int = 2,
) -> HybridNetwork:
    """Random connected hybrid with full affiliation coverage on both sides."""
    if extra_t is None:
        extra_t = n_t
    if extra_a is None:
        extra_a = n_a
    target = random_connected_graph(rng, n_t, extra_t)
    aux = random_connected_graph(rng, n_a, extra_a)
    pairs = set()
    for u in range(n_t):
        for _ in range(aff_per_user):
            pairs.add((u, rng.randrange(n_a)))
    for v in range(n_a):  # cover every auxiliary node too
        pairs.add((rng.randrange(n_t), v))
    return HybridNetwork(target, aux, BipartiteGraph(n_t, n_a, sorted(pairs)))


def enumerate_bipartite(n_t: int, n_a: int, full_coverage: bool):
    """All bipartite graphs as tuples of per-user venue subsets."""
    subsets = list(itertools.chain.from_iterable(
        itertools.combinations(range(n_a), k) for k in range(0 if not full_coverage else 1, n_a + 1)
    ))
    yield from itertools.product(subsets, repeat=n_t)


def exact_vsa_expectations(aff: BipartiteGraph, probs, labeler, b_prime, estimator):
    """E[estimator] by exhaustive enumeration of all p-weighted draw sequences.

    ``estimator`` maps a list of drawn venues to a number.
    """
    total = 0.0
    for seq in itertools.product(range(aff.n_right), repeat=b_prime):
        weight = 1.0
        for v in seq:
            weight *= probs[v]
        if weight == 0.0:
            continue
        total += weight * estimator(list(seq))
    return total


def rrzi_exact_probabilities(index: VenueIndex, root: Region, k: int) -> dict:
    """Exact draw probability of every venue via recursion over the zoom tree."""
    out: dict = {}

    def descend(region: Region, prob: float, depth: int):
        assert depth <= 80, "runaway recursion"
        hits, truncated = index.query(region, k)
        if not truncated:
            assert hits, "descended into an empty region"
            share = prob / len(hits)
            for v in hits:
                out[v.id] = out.get(v.id, 0.0) + share
            return
        quads = region.quadrants()
        nonempty = [q for q in quads if index.query(q, 1)[0]]
        for q in nonempty:
            descend(q, prob / len(nonempty), depth + 1)

    descend(root, 1.0, 0)
    return out


def left_stationary(P: np.ndarray) -> np.ndarray:
    """Stationary row vector of a stochastic matrix via eigen decomposition."""
    vals, vecs = np.linalg.eig(P.T)
    i = int(np.argmin(np.abs(vals - 1.0)))
    pi = np.real(vecs[:, i])
    pi = np.abs(pi)
    return pi / pi.sum()
