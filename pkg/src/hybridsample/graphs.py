"""Graph containers and label-distribution ground truth.

A hybrid network couples a target graph (the one being measured), an
auxiliary graph (the one that is easy to sample), and a bipartite
affiliation graph that bridges the two node universes.  Nodes are dense
0-based integers on each side; external string ids, when present, map
through an ingest-time dictionary kept on the graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

Labeler = Callable[[int], tuple]


class Graph:
    """Immutable simple graph with sorted, deduplicated adjacency lists.

    Undirected by default.  Directed graphs keep separate out- and
    in-neighbor lists.  Self-loops are rejected; duplicate input edges are
    merged silently.
    """

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]] = (),
        directed: bool = False,
        node_names: Sequence[str] | None = None,
    ):
        if n < 0:
            raise ValueError("node count must be nonnegative")
        if node_names is not None and len(node_names) != n:
            raise ValueError("node_names length must equal n")
        self.n = n
        self.directed = directed
        self.node_names = list(node_names) if node_names is not None else None

        out: list[set[int]] = [set() for _ in range(n)]
        inc: list[set[int]] = [set() for _ in range(n)] if directed else out
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at node {u} not allowed")
            out[u].add(v)
            if directed:
                inc[v].add(u)
            else:
                out[v].add(u)
        self.adj: list[list[int]] = [sorted(s) for s in out]
        self.in_adj: list[list[int]] = [sorted(s) for s in inc] if directed else self.adj
        if directed:
            self.num_edges = sum(len(a) for a in self.adj)
        else:
            self.num_edges = sum(len(a) for a in self.adj) // 2

    @property
    def degree_sum(self) -> int:
        """Sum of degrees; equals 2|E| for undirected graphs."""
        if self.directed:
            raise ValueError("degree_sum is defined for undirected graphs")
        return 2 * self.num_edges

    def degree(self, u: int) -> int:
        if self.directed:
            raise ValueError("use in_degree/out_degree on directed graphs")
        return len(self.adj[u])

    def out_degree(self, u: int) -> int:
        return len(self.adj[u])

    def in_degree(self, u: int) -> int:
        return len(self.in_adj[u])

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each edge once: (u, v) with u < v when undirected, arcs otherwise."""
        for u, nbrs in enumerate(self.adj):
            for v in nbrs:
                if self.directed or u < v:
                    yield (u, v)

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.n}, m={self.num_edges}, {kind})"


class BipartiteGraph:
    """Simple bipartite graph; keeps both per-left and per-right neighbor lists."""

    def __init__(self, n_left: int, n_right: int, pairs: Iterable[tuple[int, int]] = ()):
        if n_left < 0 or n_right < 0:
            raise ValueError("side sizes must be nonnegative")
        self.n_left = n_left
        self.n_right = n_right
        left: list[set[int]] = [set() for _ in range(n_left)]
        right: list[set[int]] = [set() for _ in range(n_right)]
        for u, v in pairs:
            if not (0 <= u < n_left):
                raise ValueError(f"left id {u} out of range")
            if not (0 <= v < n_right):
                raise ValueError(f"right id {v} out of range")
            left[u].add(v)
            right[v].add(u)
        self.left_adj: list[list[int]] = [sorted(s) for s in left]
        self.right_adj: list[list[int]] = [sorted(s) for s in right]
        self.num_edges = sum(len(s) for s in self.left_adj)

    def left_degree(self, u: int) -> int:
        return len(self.left_adj[u])

    def right_degree(self, v: int) -> int:
        return len(self.right_adj[v])

    def __repr__(self) -> str:
        return f"BipartiteGraph({self.n_left}x{self.n_right}, m={self.num_edges})"


@dataclass
class HybridNetwork:
    """Target graph, auxiliary graph and the affiliation graph joining them."""

    target: Graph
    auxiliary: Graph
    affiliation: BipartiteGraph

    def __post_init__(self):
        if self.affiliation.n_left != self.target.n:
            raise ValueError("affiliation left side must match target node count")
        if self.affiliation.n_right != self.auxiliary.n:
            raise ValueError("affiliation right side must match auxiliary node count")

    def covered_targets(self) -> list[int]:
        """Target nodes with at least one affiliation edge."""
        return [u for u in range(self.target.n) if self.affiliation.left_adj[u]]


def bip_neighbors(hybrid: HybridNetwork, side: str, node: int) -> list[int]:
    """Sorted affiliation neighbors of a node on the given side ("left"/"right")."""
    aff = hybrid.affiliation
    if side == "left":
        if not 0 <= node < aff.n_left:
            raise ValueError(f"left id {node} out of range")
        return list(aff.left_adj[node])
    if side == "right":
        if not 0 <= node < aff.n_right:
            raise ValueError(f"right id {node} out of range")
        return list(aff.right_adj[node])
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def undirected_view(graph: Graph) -> Graph:
    """Undirected version of a graph: adj(u) = out(u) | in(u), deduplicated.

    Undirected input is returned unchanged, which makes the operation
    idempotent.  Directional degrees of the original stay queryable through
    labelers built on the original graph.
    """
    if not graph.directed:
        return graph
    edges = set()
    for u in range(graph.n):
        for v in graph.adj[u]:
            edges.add((u, v) if u < v else (v, u))
    return Graph(graph.n, sorted(edges), directed=False, node_names=graph.node_names)


@dataclass
class LabelDistribution:
    """Per-label fractions theta_l over the n nodes of a graph."""

    theta: dict
    n: int

    def __post_init__(self):
        for l, t in self.theta.items():
            if not (0.0 <= t <= 1.0 + 1e-12):
                raise ValueError(f"theta[{l!r}]={t} outside [0,1]")

    def labels(self) -> list:
        return sorted(self.theta)

    def __getitem__(self, label) -> float:
        return self.theta[label]


def ground_truth_theta(graph: Graph, labeler: Labeler) -> LabelDistribution:
    """Exhaustive label fractions: theta_l = (1/n) * #{u : l in L(u)}.

    Labels that no node carries are omitted.
    """
    if graph.n == 0:
        raise ValueError("empty target graph")
    counts: dict = {}
    for u in range(graph.n):
        for l in labeler(u):
            counts[l] = counts.get(l, 0) + 1
    theta = {l: c / graph.n for l, c in counts.items()}
    return LabelDistribution(theta, graph.n)


def degree_labels(graph: Graph) -> Labeler:
    """Single-label labeler: the node's degree in an undirected graph."""
    if graph.directed:
        raise ValueError("degree labels need an undirected graph; see in/out variants")
    adj = graph.adj
    return lambda u: (len(adj[u]),)


def in_degree_labels(graph: Graph) -> Labeler:
    if not graph.directed:
        raise ValueError("in-degree labels need a directed graph")
    in_adj = graph.in_adj
    return lambda u: (len(in_adj[u]),)


def out_degree_labels(graph: Graph) -> Labeler:
    if not graph.directed:
        raise ValueError("out-degree labels need a directed graph")
    adj = graph.adj
    return lambda u: (len(adj[u]),)


def constant_labels(label="a") -> Labeler:
    return lambda u: (label,)
