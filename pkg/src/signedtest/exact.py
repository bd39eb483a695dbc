"""Exact decision procedures and brute-force distances for signed graphs.

These run in time polynomial (checkers) or exponential (distances) in the
graph size and serve as ground truth for the sublinear testers: balance,
clusterability, signed-triangle search, frustration indices, the small-cluster
merge step, and witness verification.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import Clustering, Sign, SignedGraph, Witness, WitnessKind

FRUSTRATION_MAX_NODES = 24
K_FRUSTRATION_MAX_NODES = 12
TRIANGLE_DISTANCE_MAX_NODES = 16


def triangle_pattern(spec: Sequence[Sign | str] | str) -> tuple[Sign, Sign, Sign]:
    """Canonicalize a triangle sign multiset, e.g. '++-' -> (PLUS, PLUS, MINUS)."""
    signs = tuple(Sign.from_token(p) if isinstance(p, str) else Sign(p) for p in spec)
    if len(signs) != 3:
        raise ValueError("a triangle pattern is exactly 3 signs")
    return tuple(sorted(signs))  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Balance (every cycle has an even number of negative edges)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BalanceResult:
    balanced: bool
    sides: tuple[int, ...] | None = None     # 2-coloring when balanced
    witness: Witness | None = None           # odd-negative cycle otherwise


def _splice_cycle(
    parent: list[tuple[int, Sign] | None],
    depth: list[int],
    u: int,
    v: int,
    closing: Sign,
    kind: WitnessKind,
) -> Witness:
    """Close the non-tree edge (u, v) through the BFS-tree paths to their
    lowest common ancestor, producing a simple cycle witness."""
    path_u: list[tuple[int, Sign | None]] = [(u, None)]
    path_v: list[tuple[int, Sign | None]] = [(v, None)]
    a, b = u, v
    while depth[a] > depth[b]:
        p, s = parent[a]  # type: ignore[misc]
        path_u.append((p, s))
        a = p
    while depth[b] > depth[a]:
        p, s = parent[b]  # type: ignore[misc]
        path_v.append((p, s))
        b = p
    while a != b:
        p, s = parent[a]  # type: ignore[misc]
        path_u.append((p, s))
        a = p
        p, s = parent[b]  # type: ignore[misc]
        path_v.append((p, s))
        b = p
    # path_u = [(u,·), ..., (lca, sign-into-lca)]; same for path_v
    nodes = [x for x, _ in reversed(path_u)]          # lca ... u
    signs = [s for _, s in reversed(path_u[1:])]      # tree signs lca -> u
    signs.append(closing)                             # edge (u, v)
    nodes.extend(x for x, _ in path_v[:-1])           # v ... child of lca
    signs.extend(s for _, s in path_v[1:])            # tree signs v -> lca
    return Witness(kind, tuple(nodes), tuple(signs))  # type: ignore[arg-type]


def is_balanced(g: SignedGraph) -> BalanceResult:
    """BFS 2-labeling: positive edges keep the label, negative edges flip it.

    A conflicting non-tree edge closes an odd-negative cycle through the tree.
    """
    label = [-1] * g.n
    depth = [0] * g.n
    parent: list[tuple[int, Sign] | None] = [None] * g.n
    for root in range(g.n):
        if label[root] != -1:
            continue
        label[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, s in g.adj[u]:
                want = label[u] ^ (1 if s is Sign.MINUS else 0)
                if label[v] == -1:
                    label[v] = want
                    parent[v] = (u, s)
                    depth[v] = depth[u] + 1
                    queue.append(v)
                elif label[v] != want:
                    w = _splice_cycle(parent, depth, u, v, s, WitnessKind.ODD_NEGATIVE_CYCLE)
                    return BalanceResult(False, None, w)
    return BalanceResult(True, tuple(label), None)


# ---------------------------------------------------------------------------
# Clusterability (no cycle with exactly one negative edge)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClusterabilityResult:
    clusterable: bool
    clustering: Clustering | None = None     # positive components when clusterable
    witness: Witness | None = None           # bad cycle otherwise


def positive_component_clustering(g: SignedGraph) -> Clustering:
    """Connected components of the positive subgraph, ids in discovery order."""
    comp = [-1] * g.n
    cid = 0
    for root in range(g.n):
        if comp[root] != -1:
            continue
        comp[root] = cid
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, s in g.adj[u]:
                if s is Sign.PLUS and comp[v] == -1:
                    comp[v] = cid
                    queue.append(v)
        cid += 1
    return Clustering(tuple(comp), cid)


def is_clusterable(g: SignedGraph) -> ClusterabilityResult:
    """A graph is clusterable iff no negative edge joins two nodes of the same
    positive component; a violating edge closes a cycle with exactly one
    negative edge through the positive BFS tree."""
    comp = [-1] * g.n
    depth = [0] * g.n
    parent: list[tuple[int, Sign] | None] = [None] * g.n
    cid = 0
    for root in range(g.n):
        if comp[root] != -1:
            continue
        comp[root] = cid
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, s in g.adj[u]:
                if s is Sign.PLUS and comp[v] == -1:
                    comp[v] = cid
                    parent[v] = (u, s)
                    depth[v] = depth[u] + 1
                    queue.append(v)
        cid += 1
    for u, v, s in g.edges():
        if s is Sign.MINUS and comp[u] == comp[v]:
            w = _splice_cycle(parent, depth, u, v, s, WitnessKind.BAD_CYCLE)
            return ClusterabilityResult(False, None, w)
    return ClusterabilityResult(True, Clustering(tuple(comp), cid), None)


# ---------------------------------------------------------------------------
# Signed triangles
# ---------------------------------------------------------------------------


def has_signed_triangle(
    g: SignedGraph, pattern: Sequence[Sign | str] | str
) -> Witness | None:
    """First triangle (by lexicographic node order) whose sign multiset equals
    the pattern, or None."""
    want = triangle_pattern(pattern)
    for u, v, s_uv in g.edges():
        for w, s_vw in g.adj[v]:
            if w <= v:
                continue
            s_uw = g.sign_of(u, w)
            if s_uw is None:
                continue
            if tuple(sorted((s_uv, s_vw, s_uw))) == want:
                return Witness(WitnessKind.SIGNED_TRIANGLE, (u, v, w), (s_uv, s_vw, s_uw))
    return None


# ---------------------------------------------------------------------------
# Frustration indices (brute force, hard size caps)
# ---------------------------------------------------------------------------


def frustration_index(g: SignedGraph) -> int:
    """Minimum edge deletions to balance: min over bipartitions of
    (positive edges across) + (negative edges inside). Cap n <= 24."""
    if g.n > FRUSTRATION_MAX_NODES:
        raise ValueError(f"frustration_index caps at n={FRUSTRATION_MAX_NODES}, got {g.n}")
    edges = list(g.edges())
    if not edges or g.n == 1:
        return 0
    masks = np.arange(1 << (g.n - 1), dtype=np.uint32)  # node n-1 pinned to side 0
    viol = np.zeros(masks.shape, dtype=np.int32)
    for u, v, s in edges:
        cross = ((masks >> u) & 1) != ((masks >> v) & 1)
        viol += cross if s is Sign.PLUS else ~cross
    return int(viol.min())


def _clustering_violations(g: SignedGraph, labels: Sequence[int]) -> int:
    bad = 0
    for u, v, s in g.edges():
        if s is Sign.PLUS:
            bad += labels[u] != labels[v]
        else:
            bad += labels[u] == labels[v]
    return bad


def k_frustration_index(g: SignedGraph, k: int) -> int:
    """Minimum edges violating a partition into at most k clusters
    (positive across or negative inside). Exact enumeration over canonical
    cluster labelings with branch-and-bound. Cap n <= 12."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if g.n > K_FRUSTRATION_MAX_NODES:
        raise ValueError(f"k_frustration_index caps at n={K_FRUSTRATION_MAX_NODES}, got {g.n}")
    k = min(k, g.n)
    prev = [[(j, s) for j, s in g.adj[i] if j < i] for i in range(g.n)]
    # positive components, folded into at most k labels, give the starting bound
    comp = positive_component_clustering(g).assignment
    best = _clustering_violations(g, [min(c, k - 1) for c in comp])
    if best == 0:
        return 0
    assign = [0] * g.n
    n = g.n

    def rec(i: int, used: int, viol: int) -> None:
        nonlocal best
        if viol >= best:
            return
        if i == n:
            best = viol
            return
        for c in range(min(used + 1, k)):
            dv = 0
            for j, s in prev[i]:
                if s is Sign.PLUS:
                    dv += assign[j] != c
                else:
                    dv += assign[j] == c
            if dv:
                if viol + dv >= best:
                    continue
            assign[i] = c
            rec(i + 1, used + (c == used), viol + dv)

    rec(0, 0, 0)
    return best


def weak_frustration_index(g: SignedGraph) -> int:
    """Minimum edge deletions to clusterability: k-frustration with unbounded k."""
    return k_frustration_index(g, g.n)


def triangle_free_distance(g: SignedGraph, pattern: Sequence[Sign | str] | str) -> int:
    """Minimum edge deletions removing every pattern triangle (exact hitting
    set by branch and bound). Cap n <= 16."""
    if g.n > TRIANGLE_DISTANCE_MAX_NODES:
        raise ValueError(
            f"triangle_free_distance caps at n={TRIANGLE_DISTANCE_MAX_NODES}, got {g.n}"
        )
    want = triangle_pattern(pattern)
    triangles: list[tuple[tuple[int, int], ...]] = []
    for u, v, s_uv in g.edges():
        for w, s_vw in g.adj[v]:
            if w <= v:
                continue
            s_uw = g.sign_of(u, w)
            if s_uw is None:
                continue
            if tuple(sorted((s_uv, s_vw, s_uw))) == want:
                triangles.append(((u, v), (v, w), (u, w)))
    best = len(triangles)  # deleting one edge per triangle always suffices

    def rec(deleted: frozenset[tuple[int, int]], count: int) -> None:
        nonlocal best
        if count >= best:
            return
        for tri in triangles:
            if not any(e in deleted for e in tri):
                for e in tri:
                    rec(deleted | {e}, count + 1)
                return
        best = count

    rec(frozenset(), 0)
    return best


# ---------------------------------------------------------------------------
# Cluster surgery
# ---------------------------------------------------------------------------


def merge_small_clusters(clustering: Clustering, n: int, eps: float) -> Clustering:
    """Keep clusters of size >= eps*n; greedily merge the rest (first-fit in
    cluster-id order) into groups of size in [eps*n, 2*eps*n), except possibly
    one undersized remainder. The result has at most ceil(1/eps) clusters."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n != len(clustering.assignment):
        raise ValueError("n disagrees with the clustering size")
    threshold = eps * n
    sizes = [0] * clustering.k
    for c in clustering.assignment:
        sizes[c] += 1
    remap: dict[int, int] = {}
    next_id = 0
    for cid in range(clustering.k):
        if sizes[cid] >= threshold:
            remap[cid] = next_id
            next_id += 1
    group_size = 0
    group_open = False
    for cid in range(clustering.k):
        if cid in remap:
            continue
        if not group_open:
            group_open = True
            group_size = 0
        remap[cid] = next_id
        group_size += sizes[cid]
        if group_size >= threshold:
            group_open = False
            next_id += 1
    if group_open:
        next_id += 1  # undersized remainder group
    merged = Clustering(tuple(remap[c] for c in clustering.assignment), next_id)
    # guaranteed by the size accounting; 1e-9 guards float noise in 1/eps
    assert merged.k <= int(np.ceil(1.0 / eps - 1e-9))
    return merged


def is_eps_good_cluster(
    g: SignedGraph, nodes: Iterable[int], eps: float, d: int
) -> tuple[bool, str | None]:
    """Check both half-eps budgets for a candidate cluster S: positive edges
    leaving S and negative edges inside S must each be <= eps*d*|S|/2."""
    s_set = set(nodes)
    if not s_set:
        raise ValueError("cluster must be nonempty")
    bound = eps * d * len(s_set) / 2
    pos_out = 0
    neg_in = 0
    for u in s_set:
        for v, s in g.adj[u]:
            if v in s_set:
                if s is Sign.MINUS and u < v:
                    neg_in += 1
            elif s is Sign.PLUS:
                pos_out += 1
    if pos_out > bound:
        return False, f"positive outgoing {pos_out} > bound {bound:g}"
    if neg_in > bound:
        return False, f"negative internal {neg_in} > bound {bound:g}"
    return True, None


# ---------------------------------------------------------------------------
# Witness verification
# ---------------------------------------------------------------------------


def verify_witness(g: SignedGraph, w: Witness) -> str | None:
    """Re-check every invariant of a witness against g. None means valid."""
    k = len(w.nodes)
    if w.kind is WitnessKind.SIGNED_TRIANGLE and k != 3:
        return f"triangle witness has {k} nodes"
    if k < 3:
        return f"cycle witness has only {k} nodes"
    if len(set(w.nodes)) != k:
        return "repeated node in cycle"
    for u, v, s in w.edge_pairs():
        if not (0 <= u < g.n and 0 <= v < g.n):
            return f"node out of range on edge ({u},{v})"
        actual = g.sign_of(u, v)
        if actual is None:
            return f"missing edge ({u},{v})"
        if actual is not s:
            return f"sign mismatch on edge ({u},{v})"
    negatives = sum(1 for s in w.signs if s is Sign.MINUS)
    if w.kind is WitnessKind.BAD_CYCLE and negatives != 1:
        return f"bad cycle needs exactly one negative edge, found {negatives}"
    if w.kind is WitnessKind.ODD_NEGATIVE_CYCLE and negatives % 2 == 0:
        return f"negative-edge count {negatives} is even"
    return None
