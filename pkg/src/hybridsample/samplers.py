"""Sampling procedures over hybrid networks.

Three families are implemented:

* auxiliary vertex sampling that harvests affiliation neighbors,
* a target-graph random walk whose jumps route through auxiliary vertex
  sampling plus a uniform affiliation-neighbor step,
* two coupled random walks (target and auxiliary) whose jumps route through
  each other via the affiliation graph, with a Metropolis-Hastings chain
  correcting the jump distribution on the target side.

Jump propensities are expressed as virtual jumper-edge weights omega_u (and
w_v on the auxiliary side).  ``alpha`` and ``beta`` throughout this module
are the *total* jumper masses: with a desired distribution q summing to 1,
omega_u = alpha * q_u and sum(omega) = alpha.  The per-step jump
probability at stationarity is then alpha / (2|E| + alpha), so alpha must
be sized relative to the graph volume.  The experiment harness exposes the
more intuitive per-node units and rescales (see experiment.py).
"""

from __future__ import annotations

import logging
from bisect import bisect_left
from dataclasses import dataclass, field
from itertools import accumulate

import numpy as np

from .graphs import Graph, HybridNetwork
from .seeds import STREAM_AUX, STREAM_MH, STREAM_TARGET, spawn_rng

log = logging.getLogger(__name__)

KERNEL_SIZE_LIMIT = 2000
CLOSED_FORM_CELL_LIMIT = 4_000_000


class AuxDistribution:
    """Sampling distribution over auxiliary nodes.

    Either uniform over all n' nodes or an explicit probability vector.
    """

    def __init__(self, n: int, probs=None):
        if n <= 0:
            raise ValueError("auxiliary graph must be nonempty")
        self.n = n
        if probs is None:
            self.probs = None
            self._cum = None
        else:
            probs = [float(p) for p in probs]
            if len(probs) != n:
                raise ValueError("probability vector length must equal n'")
            if any(p < 0 for p in probs):
                raise ValueError("probabilities must be nonnegative")
            total = sum(probs)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"probabilities not normalized (sum={total!r})")
            self.probs = probs
            self._cum = list(accumulate(probs))
            self._cum[-1] = 1.0

    @classmethod
    def uniform(cls, n: int) -> "AuxDistribution":
        return cls(n)

    @classmethod
    def explicit(cls, probs) -> "AuxDistribution":
        return cls(len(probs), probs)

    @classmethod
    def uniform_over(cls, n: int, support) -> "AuxDistribution":
        """Uniform over a subset of auxiliary nodes, zero elsewhere."""
        support = sorted(set(support))
        if not support:
            raise ValueError("support must be nonempty")
        probs = [0.0] * n
        share = 1.0 / len(support)
        for v in support:
            probs[v] = share
        return cls(n, probs)

    def prob(self, v: int) -> float:
        if self.probs is None:
            return 1.0 / self.n
        return self.probs[v]

    def sample(self, rng) -> int:
        if self.probs is None:
            return rng.randrange(self.n)
        return bisect_left(self._cum, rng.random())

    def support(self):
        if self.probs is None:
            return range(self.n)
        return [v for v, p in enumerate(self.probs) if p > 0]


@dataclass
class VsaDraw:
    venue: int
    p: float
    neighbors: tuple


@dataclass
class VsaSample:
    """Independent auxiliary-node draws with their harvested neighbor lists.

    ``bip_degree`` maps each harvested target node to its affiliation degree
    as recorded at collection time, so estimation does not need the network.
    """

    draws: list
    bip_degree: dict
    query_count: int

    @property
    def b_prime(self) -> int:
        return len(self.draws)

    @property
    def harvested(self) -> int:
        return sum(len(d.neighbors) for d in self.draws)


def vs_a_collect(hybrid: HybridNetwork, p: AuxDistribution, b_prime: int, seed) -> VsaSample:
    """B' i.i.d. auxiliary draws from p; each draw records the drawn node's
    full affiliation neighbor list.  Draws that hit nodes without
    affiliation edges are kept with an empty list (they contribute zero to
    the estimators).
    """
    if b_prime < 1:
        raise ValueError("b_prime must be >= 1")
    if p.n != hybrid.auxiliary.n:
        raise ValueError("distribution size must match auxiliary graph")
    rng = spawn_rng(seed, STREAM_AUX)
    right = hybrid.affiliation.right_adj
    left = hybrid.affiliation.left_adj
    draws = []
    degrees: dict = {}
    for _ in range(b_prime):
        v = p.sample(rng)
        nbrs = tuple(right[v])
        draws.append(VsaDraw(v, p.prob(v), nbrs))
        for u in nbrs:
            if u not in degrees:
                degrees[u] = len(left[u])
    return VsaSample(draws, degrees, query_count=b_prime)


def compute_qu(hybrid: HybridNetwork, p: AuxDistribution) -> np.ndarray:
    """Jump-target distribution induced by auxiliary vertex sampling followed
    by a uniform affiliation-neighbor step:

        q_u = sum over affiliated v of p_v / d_v_bip.

    Sums to 1 whenever every node carrying p-mass has affiliation edges.
    """
    aff = hybrid.affiliation
    q = np.zeros(hybrid.target.n)
    for v in p.support():
        pv = p.prob(v)
        if pv == 0.0:
            continue
        users = aff.right_adj[v]
        if not users:
            raise ValueError(
                f"unreachable probability mass: auxiliary node {v} has p>0 "
                "but no affiliation edges"
            )
        share = pv / len(users)
        for u in users:
            q[u] += share
    return q


@dataclass
class SampleTrace:
    """Ordered node visits of a walk with per-visit estimator weights."""

    nodes: list
    weights: list
    jumped: list
    budget: int
    query_count: int

    def __post_init__(self):
        if not (len(self.nodes) == len(self.weights) == len(self.jumped) == self.budget):
            raise ValueError("trace arrays must all have length budget")

    def __len__(self) -> int:
        return self.budget


def write_trace(trace: SampleTrace, path) -> None:
    """Export a trace as line-oriented records: step,node,weight,jumped."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("step,node,weight,jumped\n")
        for i, (x, w, j) in enumerate(zip(trace.nodes, trace.weights, trace.jumped)):
            fh.write(f"{i},{x},{w!r},{int(j)}\n")


def simple_rw_run(graph: Graph, budget: int, start: int, seed, *, stream: int = STREAM_TARGET) -> SampleTrace:
    """Uniform-neighbor random walk; visit weight is the node degree.

    ``stream`` selects the derived RNG stream so that walks embedded in
    coupled runs can be reproduced exactly.
    """
    if graph.directed:
        raise ValueError("simple_rw_run walks undirected graphs; use undirected_view")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if not 0 <= start < graph.n:
        raise ValueError("start node out of range")
    adj = graph.adj
    if not adj[start]:
        raise RuntimeError(f"absorbing node {start}: walk cannot leave it")
    rng = spawn_rng(seed, stream)
    nodes = []
    weights = []
    x = start
    for i in range(budget):
        d = len(adj[x])
        if d == 0:
            raise RuntimeError(f"absorbing node {x}: walk cannot leave it")
        nodes.append(x)
        weights.append(float(d))
        if i + 1 < budget:
            x = adj[x][rng.randrange(d)]
    return SampleTrace(nodes, weights, [False] * budget, budget, budget)


def rwt_vsa_run(
    hybrid: HybridNetwork,
    p: AuxDistribution,
    alpha: float,
    budget: int,
    start: int,
    seed,
    *,
    jump_always: bool = False,
    qu: np.ndarray | None = None,
) -> SampleTrace:
    """Random walk on the target graph with jumps through auxiliary vertex
    sampling.

    At each step the walker at x jumps with probability
    omega_x / (d_x + omega_x) where omega_x = alpha * q_x; a jump draws an
    auxiliary node from p and lands on a uniform affiliation neighbor of it.
    Otherwise the walker moves to a uniform target-graph neighbor.  Recorded
    visit weights are d_x + omega_x.

    ``jump_always`` implements the infinite-jump-mass limit: every step is a
    jump and weights are q_x itself (the visit law is then exactly q).
    """
    target = hybrid.target
    if target.directed:
        raise ValueError("walks need an undirected target; use undirected_view")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if not 0 <= start < target.n:
        raise ValueError("start node out of range")
    if qu is None:
        qu = compute_qu(hybrid, p)
    omega = alpha * qu

    adj = target.adj
    right = hybrid.affiliation.right_adj
    rng_t = spawn_rng(seed, STREAM_TARGET)
    rng_a = spawn_rng(seed, STREAM_AUX)

    nodes = []
    weights = []
    jumped = [False] * budget
    aux_queries = 0
    x = start
    for i in range(budget):
        d = len(adj[x])
        if jump_always:
            if qu[x] <= 0.0:
                raise RuntimeError(f"node {x} outside the jump distribution support")
            w_visit = float(qu[x])
        else:
            w_visit = d + float(omega[x])
        nodes.append(x)
        weights.append(w_visit)
        if i + 1 == budget:
            break
        ox = float(omega[x])
        if jump_always or (ox > 0.0 and rng_t.random() < ox / (d + ox)):
            v = p.sample(rng_a)
            users = right[v]
            aux_queries += 1
            # compute_qu vetoes p-mass on unaffiliated nodes up front
            x = users[rng_a.randrange(len(users))]
            jumped[i + 1] = True
        else:
            if d == 0:
                raise RuntimeError(
                    f"absorbing node {x}; increase alpha or fix affiliation coverage"
                )
            x = adj[x][rng_t.randrange(d)]
    return SampleTrace(nodes, weights, jumped, budget, budget + aux_queries)


def stationary_rwt_vsa(hybrid: HybridNetwork, p: AuxDistribution, alpha: float) -> np.ndarray:
    """Stationary law of the jump-augmented target walk:
    pi_u = (d_u + alpha*q_u) / (2|E| + alpha)."""
    qu = compute_qu(hybrid, p)
    deg = np.array([len(a) for a in hybrid.target.adj], dtype=float)
    return (deg + alpha * qu) / (hybrid.target.degree_sum + alpha)


def rwt_vsa_transition_matrix(hybrid: HybridNetwork, p: AuxDistribution, alpha: float) -> np.ndarray:
    """Dense one-step kernel of the jump-augmented walk with the virtual
    jumper node marginalized out:

        P[u, u'] = 1{u~u'} / (d_u + omega_u) + omega_u/(d_u+omega_u) * q_{u'}

    Intended for small instances (stationarity and reversibility checks).
    """
    n = hybrid.target.n
    if n > KERNEL_SIZE_LIMIT:
        raise ValueError(f"kernel construction limited to {KERNEL_SIZE_LIMIT} nodes")
    qu = compute_qu(hybrid, p)
    omega = alpha * qu
    P = np.zeros((n, n))
    for u in range(n):
        d = len(hybrid.target.adj[u])
        tot = d + omega[u]
        if tot == 0:
            P[u, u] = 1.0
            continue
        for v in hybrid.target.adj[u]:
            P[u, v] += 1.0 / tot
        if omega[u] > 0:
            P[u, :] += (omega[u] / tot) * qu
    return P


@dataclass
class WeightSystem:
    """Jump weights and distributions for the coupled two-walk sampler.

    q is the desired jump-target distribution on the target side; omega and
    w are jumper-edge weights; q_prime is the distribution the affiliation
    machinery actually proposes, reconciled with q by the MH chain.
    """

    alpha: float
    beta: float
    two_e: float
    two_e_prime: float
    q: np.ndarray
    omega: np.ndarray
    pi_u: np.ndarray
    w: np.ndarray
    pi_v: np.ndarray
    q_prime: np.ndarray


def default_desired_distribution(hybrid: HybridNetwork) -> np.ndarray:
    """Uniform over target nodes that have affiliation edges, renormalized."""
    covered = hybrid.covered_targets()
    if not covered:
        raise ValueError("no target node has affiliation edges")
    q = np.zeros(hybrid.target.n)
    q[covered] = 1.0 / len(covered)
    return q


def fixed_weight_scheme(
    hybrid: HybridNetwork,
    alpha: float,
    beta: float,
    q: np.ndarray | None = None,
    *,
    two_e: float | None = None,
    two_e_prime: float | None = None,
) -> WeightSystem:
    """Derive all coupled-walk quantities from a fixed desired distribution q:

        omega_u = alpha * q_u
        pi_u    = (d_u + omega_u) / (2|E| + alpha)
        w_v     = beta * sum_{u ~b v} pi_u / d_u_bip
        pi_v    = (d_v + w_v) / (2|E'| + beta)
        q'_u    = sum_{v ~b u} pi_v / d_v_bip

    The volume constants 2|E| and 2|E'| are read from the graphs; pass
    ``two_e``/``two_e_prime`` to override them when the graphs at hand are
    partial crawls of something larger.
    """
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be >= 0")
    if q is None:
        q = default_desired_distribution(hybrid)
    q = np.asarray(q, dtype=float)
    if q.shape != (hybrid.target.n,):
        raise ValueError("q must have one entry per target node")
    if abs(float(q.sum()) - 1.0) > 1e-9:
        raise ValueError(f"q not normalized (sum={float(q.sum())!r})")
    aff = hybrid.affiliation
    for u in np.nonzero(q)[0]:
        if not aff.left_adj[u]:
            raise ValueError(
                f"q-mass on target node {u} with no affiliation edges; "
                "jumps cannot reach it"
            )

    deg_t = np.array([len(a) for a in hybrid.target.adj], dtype=float)
    deg_a = np.array([len(a) for a in hybrid.auxiliary.adj], dtype=float)
    if two_e is None:
        two_e = float(hybrid.target.degree_sum)
    if two_e_prime is None:
        two_e_prime = float(hybrid.auxiliary.degree_sum)

    omega = alpha * q
    if two_e + alpha <= 0:
        raise ValueError("target graph has no edges and alpha=0; walk is degenerate")
    pi_u = (deg_t + omega) / (two_e + alpha)

    w = np.zeros(hybrid.auxiliary.n)
    for u in range(hybrid.target.n):
        venues = aff.left_adj[u]
        if venues:
            share = beta * pi_u[u] / len(venues)
            for v in venues:
                w[v] += share

    denom_v = two_e_prime + beta
    pi_v = (deg_a + w) / denom_v if denom_v > 0 else np.zeros(hybrid.auxiliary.n)

    q_prime = np.zeros(hybrid.target.n)
    for v in range(hybrid.auxiliary.n):
        users = aff.right_adj[v]
        if users:
            share = pi_v[v] / len(users)
            for u in users:
                q_prime[u] += share

    return WeightSystem(alpha, beta, two_e, two_e_prime, q, omega, pi_u, w, pi_v, q_prime)


def closed_form_weights(hybrid: HybridNetwork, alpha: float, beta: float):
    """Solve the self-consistent jump-weight system exactly:

        omega = c' (I - c c' A Dv^-1 A^T Du^-1)^-1 A Dv^-1 (d_V + c A^T Du^-1 d_U)
        w     = c  (I - c c' A^T Du^-1 A Dv^-1)^-1 A^T Du^-1 (d_U + c' A Dv^-1 d_V)

    with c = beta/(2|E|+alpha), c' = alpha/(2|E'|+beta).  A is the affiliation
    adjacency matrix; Du, Dv are diagonal affiliation-degree matrices, with
    isolated nodes excluded from the inverses (their weight is zero).  Dense
    solve; intended as an oracle on small instances.
    """
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be >= 0")
    n, npr = hybrid.target.n, hybrid.auxiliary.n
    if n * npr > CLOSED_FORM_CELL_LIMIT:
        raise ValueError("closed-form solver is restricted to small instances")
    aff = hybrid.affiliation
    A = np.zeros((n, npr))
    for u in range(n):
        for v in aff.left_adj[u]:
            A[u, v] = 1.0
    dbu = A.sum(axis=1)
    dbv = A.sum(axis=0)
    inv_u = np.where(dbu > 0, 1.0 / np.where(dbu > 0, dbu, 1.0), 0.0)
    inv_v = np.where(dbv > 0, 1.0 / np.where(dbv > 0, dbv, 1.0), 0.0)

    deg_t = np.array([len(a) for a in hybrid.target.adj], dtype=float)
    deg_a = np.array([len(a) for a in hybrid.auxiliary.adj], dtype=float)
    two_e = float(hybrid.target.degree_sum)
    two_e_prime = float(hybrid.auxiliary.degree_sum)
    c = beta / (two_e + alpha)
    cp = alpha / (two_e_prime + beta)

    B1 = A * inv_v[None, :]          # A Dv^-1       (n x n')
    B2 = A.T * inv_u[None, :]        # A^T Du^-1     (n' x n)

    lhs_u = np.eye(n) - c * cp * (B1 @ B2)
    rhs_u = cp * (B1 @ (deg_a + c * (B2 @ deg_t)))
    lhs_v = np.eye(npr) - c * cp * (B2 @ B1)
    rhs_v = c * (B2 @ (deg_t + cp * (B1 @ deg_a)))
    try:
        omega = np.linalg.solve(lhs_u, rhs_u)
        w = np.linalg.solve(lhs_v, rhs_v)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - cc' < 1 in theory
        raise RuntimeError(
            "singular weight system: cond(target side)="
            f"{np.linalg.cond(lhs_u):.3e}, cond(auxiliary side)={np.linalg.cond(lhs_v):.3e}"
        ) from exc
    return omega, w


def mh_step(current: int, proposal: int, q, q_prime, rng) -> int:
    """One Metropolis-Hastings accept/reject step.

    q is the desired distribution, q_prime the proposal distribution.  The
    acceptance ratio min{1, q[u] q'[cur] / (q[cur] q'[u])} only uses ratios,
    so unnormalized vectors work.
    """
    qc = q[current]
    qpc = q_prime[current]
    if qc <= 0.0 or qpc <= 0.0:
        raise RuntimeError(
            f"chain mis-initialized: state {current} has zero desired or proposal mass"
        )
    qu = q[proposal]
    if qu <= 0.0:
        return current
    qpu = q_prime[proposal]
    if qpu <= 0.0:
        return proposal
    ratio = (qu * qpc) / (qc * qpu)
    if ratio >= 1.0 or rng.random() < ratio:
        return proposal
    return current


def run_mh_chain(q, q_prime, start: int, steps: int, seed) -> list:
    """Standalone MH chain with proposals drawn i.i.d. from q_prime.

    Returns the visited states x_1..x_steps (x_1 = start).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    q = np.asarray(q, dtype=float)
    qp = np.asarray(q_prime, dtype=float)
    total = float(qp.sum())
    if total <= 0:
        raise ValueError("proposal distribution has no mass")
    cum = list(accumulate(float(x) / total for x in qp))
    cum[-1] = 1.0
    rng = spawn_rng(seed, STREAM_MH)
    x = start
    out = [x]
    for _ in range(steps - 1):
        u = bisect_left(cum, rng.random())
        x = mh_step(x, u, q, qp, rng)
        out.append(x)
    return out


@dataclass
class RwtRwaDetail:
    """Side-channel record of a coupled run: companion chain paths and the
    count of auxiliary jumps that fell back to a walking move because the
    target walker had no affiliation edges."""

    aux_nodes: list = field(default_factory=list)
    mh_nodes: list = field(default_factory=list)
    fallback_jumps: int = 0


def rwt_rwa_run(
    hybrid: HybridNetwork,
    alpha: float,
    beta: float,
    q: np.ndarray | None,
    budget: int,
    starts: tuple,
    seed,
    *,
    weights: WeightSystem | None = None,
    detail: RwtRwaDetail | None = None,
    burn_in: int = 0,
) -> SampleTrace:
    """Coupled run of three chains advancing in lockstep.

    Per round, from (x_i, x'_i, y_i):

    1. MH chain: propose a uniform affiliation neighbor of y_i and
       accept/reject against (q, q'), giving x'_{i+1}.
    2. Auxiliary walk: with probability w_y/(d_y + w_y) jump to a uniform
       affiliation neighbor of x_i (falling back to a walking move if x_i
       has none), else move to a uniform auxiliary-graph neighbor.
    3. Target walk: with probability omega_x/(d_x + omega_x) jump to
       x'_{i+1}, else move to a uniform target-graph neighbor.

    The trace records target visits with weights d_x + omega_x.  With
    ``burn_in`` > 0 the first that many rounds run unrecorded.
    """
    target, aux, aff = hybrid.target, hybrid.auxiliary, hybrid.affiliation
    if target.directed or aux.directed:
        raise ValueError("walks need undirected graphs; use undirected_view")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    ws = weights if weights is not None else fixed_weight_scheme(hybrid, alpha, beta, q)
    x, xp, y = starts
    if not (0 <= x < target.n and 0 <= xp < target.n and 0 <= y < aux.n):
        raise ValueError("start nodes out of range")
    if ws.q[xp] <= 0.0 or ws.q_prime[xp] <= 0.0:
        raise RuntimeError(
            f"chain mis-initialized: MH start {xp} has zero desired or proposal mass"
        )

    t_adj = target.adj
    a_adj = aux.adj
    left = aff.left_adj
    right = aff.right_adj
    omega = ws.omega
    w = ws.w
    rng_t = spawn_rng(seed, STREAM_TARGET)
    rng_m = spawn_rng(seed, STREAM_MH)
    rng_a = spawn_rng(seed, STREAM_AUX)

    nodes = []
    weights_out = []
    jumped = [False] * budget
    fallback_logged = 0
    if detail is not None:
        detail.aux_nodes.append(y)
        detail.mh_nodes.append(xp)

    total_rounds = budget + burn_in
    for i in range(total_rounds):
        dx = len(t_adj[x])
        if i >= burn_in:
            nodes.append(x)
            weights_out.append(dx + float(omega[x]))
        if i + 1 == total_rounds:
            break

        # MH chain fed by the auxiliary walker's affiliation neighbors.
        users = right[y]
        if users:
            proposal = users[rng_m.randrange(len(users))]
            xp = mh_step(xp, proposal, ws.q, ws.q_prime, rng_m)

        # Auxiliary walk with jumps through the target walker's affiliations.
        dy = len(a_adj[y])
        wy = float(w[y])
        if dy == 0 and wy == 0.0:
            raise RuntimeError(f"auxiliary chain absorbed at node {y}")
        if wy > 0.0 and rng_a.random() < wy / (dy + wy):
            venues = left[x]
            if venues:
                y = venues[rng_a.randrange(len(venues))]
            elif dy > 0:
                fallback_logged += 1
                if detail is not None:
                    detail.fallback_jumps += 1
                y = a_adj[y][rng_a.randrange(dy)]
            else:
                raise RuntimeError(
                    f"auxiliary chain absorbed: node {y} has no neighbors and the "
                    f"target walker at {x} has no affiliation edges to jump through"
                )
        else:
            y = a_adj[y][rng_a.randrange(dy)]

        # Target walk jumping to the fresh MH sample.
        ox = float(omega[x])
        if dx == 0 and ox == 0.0:
            raise RuntimeError(
                f"absorbing node {x}; increase alpha or fix affiliation coverage"
            )
        if ox > 0.0 and rng_t.random() < ox / (dx + ox):
            x = xp
            if i + 1 >= burn_in:
                jumped[i + 1 - burn_in] = True
        else:
            x = t_adj[x][rng_t.randrange(dx)]

        if detail is not None:
            detail.aux_nodes.append(y)
            detail.mh_nodes.append(xp)

    if fallback_logged:
        log.debug(
            "auxiliary jumps fell back to walking moves %d time(s): target walker "
            "had no affiliation edges when the jump fired",
            fallback_logged,
        )
    return SampleTrace(nodes, weights_out, jumped, budget, 2 * total_rounds)
