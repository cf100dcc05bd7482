import pytest

from hybridsample.graphs import undirected_view
from hybridsample.synth import (
    SynthConfig,
    ba_edge_count,
    build_synthetic_hybrid,
    generate_ba,
    orient_edges,
)


def _components(graph):
    seen = [False] * graph.n
    comps = []
    for s in range(graph.n):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        size = 0
        while stack:
            u = stack.pop()
            size += 1
            for v in graph.adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(size)
    return comps


def test_ba_minimal_is_tree():
    g = generate_ba(3, 1, seed=0)
    assert g.num_edges == 2


def test_ba_edge_count_formula_and_mean_degree():
    n, m = 10_000, 2
    g = generate_ba(n, m, seed=4)
    assert g.num_edges == ba_edge_count(n, m) == m * (m + 1) // 2 + (n - m - 1) * m
    mean_deg = g.degree_sum / n
    assert 3.9 <= mean_deg <= 4.0


def test_ba_deterministic_per_seed():
    a = generate_ba(500, 3, seed=11)
    b = generate_ba(500, 3, seed=11)
    c = generate_ba(500, 3, seed=12)
    assert list(a.edges()) == list(b.edges())
    assert list(a.edges()) != list(c.edges())


def test_ba_connected():
    g = generate_ba(300, 2, seed=8)
    assert _components(g) == [300]


def test_ba_rejects_bad_m():
    with pytest.raises(ValueError):
        generate_ba(5, 5, seed=0)
    with pytest.raises(ValueError):
        generate_ba(5, 0, seed=0)


def test_hybrid_construction_arithmetic():
    cfg = SynthConfig(n_per_graph=100, m1=2, m2=5, m3=10, extra_pairs=200, seed=7)
    h = build_synthetic_hybrid(cfg)
    assert h.target.n == 200
    assert h.target.num_edges == ba_edge_count(100, 2) + ba_edge_count(100, 10) + 1
    assert h.auxiliary.num_edges == ba_edge_count(100, 5)
    assert min(len(a) for a in h.affiliation.left_adj) >= 1
    assert h.affiliation.num_edges == 2 * 100 + 200


def test_hybrid_no_extra_pairs_edge_count():
    h = build_synthetic_hybrid(SynthConfig(n_per_graph=50, m1=2, m2=3, m3=4, extra_pairs=0, seed=1))
    assert h.affiliation.num_edges == 2 * 50


def test_hybrid_two_components_bridged():
    cfg = SynthConfig(n_per_graph=80, m1=2, m2=3, m3=5, extra_pairs=10, seed=5)
    h = build_synthetic_hybrid(cfg)
    assert _components(h.target) == [160]
    # removing the bridge edge splits the target into the two halves
    bridge = [(u, v) for u, v in h.target.edges() if u < 80 <= v]
    assert len(bridge) == 1


def test_hybrid_deterministic():
    cfg = SynthConfig(n_per_graph=60, m1=2, m2=3, m3=4, extra_pairs=30, seed=9)
    a = build_synthetic_hybrid(cfg)
    b = build_synthetic_hybrid(cfg)
    assert list(a.target.edges()) == list(b.target.edges())
    assert list(a.auxiliary.edges()) == list(b.auxiliary.edges())
    assert a.affiliation.left_adj == b.affiliation.left_adj


def test_orient_edges_roundtrip():
    g = generate_ba(120, 2, seed=3)
    d = orient_edges(g, 44)
    assert d.directed
    u = undirected_view(d)
    assert list(u.edges()) == list(g.edges())
    # all three arc outcomes occur at this size
    arcs = set(d.edges())
    both = sum(1 for a, b in arcs if (b, a) in arcs) // 2
    assert 0 < both < len(arcs)
