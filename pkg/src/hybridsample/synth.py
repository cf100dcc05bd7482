"""Seeded synthetic network generation.

Builds preferential-attachment graphs and the two-community hybrid network
used by the experiment harness: a target graph made of two attachment
graphs joined by a single bridge edge, a denser auxiliary graph, and an
affiliation graph that links every target node to at least one auxiliary
node plus a batch of extra random pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import BipartiteGraph, Graph, HybridNetwork
from .seeds import spawn_rng


@dataclass(frozen=True)
class SynthConfig:
    n_per_graph: int
    m1: int = 2
    m2: int = 5
    m3: int = 10
    extra_pairs: int = 0
    seed: int = 0

    def __post_init__(self):
        for m in (self.m1, self.m2, self.m3):
            if m < 1:
                raise ValueError("attachment counts must be >= 1")
            if m >= self.n_per_graph:
                raise ValueError(f"attachment count {m} must be < n_per_graph")
        if self.extra_pairs < 0:
            raise ValueError("extra_pairs must be >= 0")


def generate_ba(n: int, m: int, seed) -> Graph:
    """Preferential-attachment graph: clique core of m+1 nodes, then each new
    node attaches to m distinct existing nodes chosen proportionally to
    current degree (repeated draws from the running edge-endpoint list,
    rejecting duplicates within one node's picks).
    """
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = seed if hasattr(seed, "randrange") else spawn_rng(seed)
    edges: list[tuple[int, int]] = []
    endpoints: list[int] = []
    core = m + 1
    for u in range(core):
        for v in range(u + 1, core):
            edges.append((u, v))
            endpoints.append(u)
            endpoints.append(v)
    for new in range(core, n):
        picks: list[int] = []
        while len(picks) < m:
            t = endpoints[rng.randrange(len(endpoints))]
            if t not in picks:
                picks.append(t)
        for t in picks:
            edges.append((new, t))
            endpoints.append(new)
            endpoints.append(t)
    return Graph(n, edges)


def ba_edge_count(n: int, m: int) -> int:
    """Exact edge count of generate_ba(n, m, ...): clique core plus m per node."""
    return m * (m + 1) // 2 + (n - m - 1) * m


def build_synthetic_hybrid(cfg: SynthConfig) -> HybridNetwork:
    """Two attachment graphs bridged by one edge as the target, a third as the
    auxiliary graph, and an affiliation graph built by (1) linking every
    target node to one random auxiliary node and (2) adding extra_pairs
    distinct random pairs on top.
    """
    n = cfg.n_per_graph
    g1 = generate_ba(n, cfg.m1, spawn_rng(cfg.seed, 0))
    aux = generate_ba(n, cfg.m2, spawn_rng(cfg.seed, 1))
    g3 = generate_ba(n, cfg.m3, spawn_rng(cfg.seed, 2))

    target_edges = list(g1.edges())
    target_edges.extend((u + n, v + n) for u, v in g3.edges())
    rng_bridge = spawn_rng(cfg.seed, 3)
    target_edges.append((rng_bridge.randrange(n), n + rng_bridge.randrange(n)))
    target = Graph(2 * n, target_edges)

    rng_aff = spawn_rng(cfg.seed, 4)
    pairs = set()
    for u in range(2 * n):
        pairs.add((u, rng_aff.randrange(n)))
    added = 0
    while added < cfg.extra_pairs:
        pair = (rng_aff.randrange(2 * n), rng_aff.randrange(n))
        if pair not in pairs:
            pairs.add(pair)
            added += 1
    affiliation = BipartiteGraph(2 * n, n, sorted(pairs))
    return HybridNetwork(target, aux, affiliation)


def orient_edges(graph: Graph, seed, p_forward: float = 0.45, p_backward: float = 0.45) -> Graph:
    """Directed version of an undirected graph for follower-style experiments.

    Each edge (u, v) with u < v becomes u->v with probability p_forward,
    v->u with p_backward, and both arcs otherwise.
    """
    if graph.directed:
        raise ValueError("orient_edges expects an undirected graph")
    if p_forward < 0 or p_backward < 0 or p_forward + p_backward > 1:
        raise ValueError("orientation probabilities must be nonnegative and sum <= 1")
    rng = seed if hasattr(seed, "random") else spawn_rng(seed, 5)
    arcs = []
    for u, v in graph.edges():
        r = rng.random()
        if r < p_forward:
            arcs.append((u, v))
        elif r < p_forward + p_backward:
            arcs.append((v, u))
        else:
            arcs.append((u, v))
            arcs.append((v, u))
    return Graph(graph.n, arcs, directed=True, node_names=graph.node_names)
