"""Dense-model property testers driven by adjacency-matrix queries.

Three testers plus the edge and frustration estimators they build on. The
triangle and balance testers are one-sided: a Reject always carries a witness
that ``exact.verify_witness`` accepts against the backing graph. The
clusterability tester is tolerant and two-sided: it estimates the weak
frustration index and thresholds it, so it returns no witness.

Sampling is with replacement throughout; duplicates are simply kept (they
cost no extra queries for induced-subgraph work since pairs are queried once
per unique node pair).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import exact
from .core import Sign, SignedGraph, Witness, WitnessKind
from .oracles import DenseOracle, RandomSource

# Budget constants. Engineering choices, not theory: defaults are sized so
# that the desk-scale statistical checks pass with margin.
C_TRIANGLE = 10.0   # triple_samples = ceil(C_TRIANGLE / eps^3)
C_BALANCE = 20.0    # node samples   = ceil(C_BALANCE * ln(1/eps) / eps)
C_EDGES = 8.0       # pair samples   = ceil(C_EDGES / eps^2)
C_CLUSTER = 6.0     # subset size    = ceil(C_CLUSTER * k * ln(k) / eps^2)

# Induced subgraphs at or below this size get exact weak frustration;
# larger ones use the local-search overestimate.
_EXACT_INDUCED_CAP = 10

LOCAL_SEARCH_RESTARTS = 10
LOCAL_SEARCH_MOVE_FACTOR = 200


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return RandomSource(int(seed)).generator()


@dataclass(frozen=True)
class DenseParams:
    """Budget knobs for the dense testers; None means "derive from eps"."""

    eps: float
    seed: int = 0
    triple_samples: int | None = None
    node_samples: int | None = None
    subset_size: int | None = None

    def __post_init__(self) -> None:
        if not 0 < self.eps <= 1:
            raise ValueError("eps must be in (0, 1]")
        for name in ("triple_samples", "node_samples", "subset_size"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class Verdict:
    """Tester outcome. One-sided testers attach a witness to every reject;
    exact_fallback marks runs that read the whole graph and answered
    exactly instead of sampling."""

    accept: bool
    witness: Optional[Witness] = None
    queries_used: int = 0
    exact_fallback: bool = False
    details: dict = field(default_factory=dict)

    @property
    def decision(self) -> str:
        return "accept" if self.accept else "reject"


def default_triple_samples(eps: float, c_t: float = C_TRIANGLE) -> int:
    return max(1, math.ceil(c_t / eps**3))


def default_node_samples(eps: float, c_b: float = C_BALANCE) -> int:
    return max(1, math.ceil(c_b * math.log(1.0 / eps) / eps))


def default_pair_samples(eps: float, c_e: float = C_EDGES) -> int:
    return max(1, math.ceil(c_e / eps**2))


def default_subset_size(eps: float, c_c: float = C_CLUSTER) -> int:
    k = math.ceil(8.0 / eps)
    return max(1, math.ceil(c_c * k * math.log(max(k, 2)) / eps**2))


# ---------------------------------------------------------------------------
# triangle tester
# ---------------------------------------------------------------------------

def test_triangle_dense(o: DenseOracle, pattern, p: DenseParams, c_t: float = C_TRIANGLE) -> Verdict:
    """Sample uniform node triples and reject on the first one inducing a
    triangle whose sign multiset matches the pattern."""
    if o.n < 3:
        raise ValueError("triangle testing needs N >= 3")
    pat = exact.triangle_pattern(pattern)
    rng = _as_rng(p.seed)
    samples = p.triple_samples if p.triple_samples is not None else default_triple_samples(p.eps, c_t)
    start = o.query_count
    triples = rng.integers(0, o.n, size=(samples, 3))
    for a, b, c in triples:
        a, b, c = int(a), int(b), int(c)
        if a == b or b == c or a == c:
            continue  # degenerate triple, nothing to query
        s_ab = o.query(a, b)
        if s_ab is None:
            continue
        s_bc = o.query(b, c)
        if s_bc is None:
            continue
        s_ca = o.query(c, a)
        if s_ca is None:
            continue
        if tuple(sorted((s_ab, s_bc, s_ca))) == pat:
            w = Witness(WitnessKind.SIGNED_TRIANGLE, (a, b, c), (s_ab, s_bc, s_ca))
            used = o.query_count - start
            assert used <= 3 * samples
            return Verdict(False, witness=w, queries_used=used)
    used = o.query_count - start
    assert used <= 3 * samples
    return Verdict(True, queries_used=used)


# ---------------------------------------------------------------------------
# induced-subgraph plumbing
# ---------------------------------------------------------------------------

def _query_induced(o: DenseOracle, nodes: list[int]) -> SignedGraph:
    """Query every pair among the (distinct) nodes; return the induced graph
    relabeled to 0..len(nodes)-1."""
    edges = []
    for i, u in enumerate(nodes):
        for j in range(i + 1, len(nodes)):
            s = o.query(u, nodes[j])
            if s is not None:
                edges.append((i, j, s))
    return SignedGraph.from_edges(len(nodes), edges)


def _sample_unique_nodes(rng, n: int, samples: int) -> list[int]:
    if samples >= n:
        return list(range(n))
    drawn = rng.integers(0, n, size=samples)
    return sorted(set(int(v) for v in drawn))


# ---------------------------------------------------------------------------
# balance tester
# ---------------------------------------------------------------------------

def test_balance_dense(
    o: DenseOracle,
    eps: float,
    seed,
    c_b: float = C_BALANCE,
    node_samples: int | None = None,
) -> Verdict:
    """Sample nodes, read the whole induced subgraph, accept iff it is
    balanced. Unbalance witnesses lift back to original node ids."""
    if o.n < 2:
        raise ValueError("balance testing needs N >= 2")
    if not 0 < eps <= 1:
        raise ValueError("eps must be in (0, 1]")
    rng = _as_rng(seed)
    s = node_samples if node_samples is not None else default_node_samples(eps, c_b)
    nodes = _sample_unique_nodes(rng, o.n, s)
    start = o.query_count
    induced = _query_induced(o, nodes)
    used = o.query_count - start
    assert used <= s * s
    res = exact.is_balanced(induced)
    if res.balanced:
        return Verdict(True, queries_used=used)
    w = res.witness
    lifted = Witness(w.kind, tuple(nodes[i] for i in w.nodes), w.signs)
    return Verdict(False, witness=lifted, queries_used=used)


# ---------------------------------------------------------------------------
# edge-count estimator
# ---------------------------------------------------------------------------

def estimate_edge_count(o: DenseOracle, eps: float, seed, c_e: float = C_EDGES) -> float:
    """Estimate |E| to additive error eps*N^2 by sampling off-diagonal
    adjacency entries. If the sample budget already covers every pair, read
    them all once and return the exact count."""
    if not 0 < eps <= 1:
        raise ValueError("eps must be in (0, 1]")
    n = o.n
    if n < 2:
        return 0.0
    q = default_pair_samples(eps, c_e)
    total_pairs = n * (n - 1) // 2
    if q >= total_pairs:
        hits = 0
        for u in range(n):
            for v in range(u + 1, n):
                if o.query(u, v) is not None:
                    hits += 1
        return float(hits)
    rng = _as_rng(seed)
    us = rng.integers(0, n, size=q)
    vs = rng.integers(0, n - 1, size=q)
    vs = vs + (vs >= us)  # uniform off-diagonal ordered pairs
    hits = 0
    for u, v in zip(us, vs):
        if o.query(int(u), int(v)) is not None:
            hits += 1
    return hits / q * total_pairs


# ---------------------------------------------------------------------------
# weak-frustration estimation and the tolerant clusterability tester
# ---------------------------------------------------------------------------

def _fold_labels(labels: list[int], k: int) -> list[int]:
    """Map arbitrary cluster labels onto 0..k-1, folding overflow clusters
    into the last one."""
    remap: dict[int, int] = {}
    out = []
    for lab in labels:
        if lab not in remap:
            remap[lab] = min(len(remap), k - 1)
        out.append(remap[lab])
    return out


def _local_search_k_frustration(g: SignedGraph, k: int, rng) -> int:
    """Greedy local search for a k-clustering with few violated signs.

    Only moves single nodes between clusters, accepting strict improvements.
    The result is the violation count of a concrete assignment, so it can
    only overestimate the true k-frustration index.
    """
    n = g.n
    k = min(k, max(n, 1))
    if n == 0 or k < 1:
        return 0

    def violations_of(assign):
        bad = 0
        for u, v, s in g.edges():
            same = assign[u] == assign[v]
            if (s is Sign.PLUS) != same:
                bad += 1
        return bad

    def delta_for(assign, v, target):
        d = 0
        for u, s in g.adj[v]:
            before = assign[u] == assign[v]
            after = assign[u] == target
            if s is Sign.PLUS:
                d += (not after) - (not before)
            else:
                d += after - before
        return d

    best = None
    move_budget = LOCAL_SEARCH_MOVE_FACTOR * n * k
    for restart in range(LOCAL_SEARCH_RESTARTS):
        if restart == 0:
            base = exact.positive_component_clustering(g)
            assign = _fold_labels(list(base.assignment), k)
        else:
            assign = [int(x) for x in rng.integers(0, k, size=n)]
        sizes = [0] * k
        for c in assign:
            sizes[c] += 1
        # lazy stack of empty cluster ids (entries may go stale after moves)
        empties = [c for c in range(k - 1, -1, -1) if sizes[c] == 0]
        cur = violations_of(assign)
        improved = True
        while improved and move_budget > 0:
            improved = False
            for v in rng.permutation(n):
                v = int(v)
                candidates = {assign[u] for u, _ in g.adj[v]}
                while empties and sizes[empties[-1]] != 0:
                    empties.pop()
                if empties:
                    candidates.add(empties[-1])
                candidates.discard(assign[v])
                for target in candidates:
                    move_budget -= 1
                    d = delta_for(assign, v, target)
                    if d < 0:
                        old = assign[v]
                        assign[v] = target
                        sizes[old] -= 1
                        sizes[target] += 1
                        if sizes[old] == 0:
                            empties.append(old)
                        cur += d
                        improved = True
                        break
                if move_budget <= 0:
                    break
        if best is None or cur < best:
            best = cur
        if best == 0:
            break
    return int(best)


def _induced_k_frustration(g: SignedGraph, k: int, rng) -> int:
    if g.n <= _EXACT_INDUCED_CAP:
        return exact.k_frustration_index(g, min(k, g.n))
    return _local_search_k_frustration(g, k, rng)


def _estimate_weak_frustration(o: DenseOracle, eps: float, seed, c_e: float, c_c: float,
                               subset_size: int | None):
    """Shared core: returns (estimate, queries_used, full_read_flag)."""
    if not 0 < eps <= 1:
        raise ValueError("eps must be in (0, 1]")
    n = o.n
    rng = _as_rng(seed)
    k = math.ceil(8.0 / eps)
    start = o.query_count
    m_hat = estimate_edge_count(o, eps / 8.0, rng, c_e)
    s = subset_size if subset_size is not None else default_subset_size(eps, c_c)
    nodes = _sample_unique_nodes(rng, n, s)
    u = len(nodes)
    full_read = u >= n
    if u < 2:
        return 0.0, o.query_count - start, full_read
    induced = _query_induced(o, nodes)
    frustr = _induced_k_frustration(induced, k, rng)
    satisfied = induced.num_edges - frustr
    # rescale satisfied constraints by the exact pair ratio; the naive
    # (n/s)^2 factor is biased once duplicate draws are discarded
    scale = (n * (n - 1)) / (u * (u - 1))
    s_hat = satisfied * scale
    est = max(0.0, m_hat - s_hat)
    return est, o.query_count - start, full_read


def frustration_estimate_dense(
    o: DenseOracle,
    eps: float,
    seed,
    c_e: float = C_EDGES,
    c_c: float = C_CLUSTER,
    subset_size: int | None = None,
) -> float:
    """Estimate the weak frustration index to additive error eps*N^2."""
    est, _, _ = _estimate_weak_frustration(o, eps, seed, c_e, c_c, subset_size)
    return est


def test_clusterability_dense(
    o: DenseOracle,
    eps: float,
    seed,
    c_e: float = C_EDGES,
    c_c: float = C_CLUSTER,
    subset_size: int | None = None,
) -> Verdict:
    """Tolerant two-sided tester: accept iff the estimated weak frustration
    is at most (eps/2)*N^2. Targets accepting eps/4-close inputs and
    rejecting eps-far ones. No witness (the evidence is an estimate, not a
    forbidden substructure)."""
    if o.n < 2:
        raise ValueError("clusterability testing needs N >= 2")
    if eps >= 1.0:
        # every graph is 1-close to clusterable (delete all edges)
        return Verdict(True, queries_used=0, details={"estimate": 0.0, "threshold": None})
    est, used, full_read = _estimate_weak_frustration(o, eps, seed, c_e, c_c, subset_size)
    threshold = (eps / 2.0) * o.n * o.n
    return Verdict(
        est <= threshold,
        queries_used=used,
        exact_fallback=full_read,
        details={"estimate": est, "threshold": threshold},
    )
