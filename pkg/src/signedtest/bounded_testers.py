"""Bounded-degree-model property testers driven by (node, index) queries.

The balance tester walks lazily on a virtual graph G2 in which every positive
edge of G is subdivided by an extra node; G is balanced exactly when G2 is
bipartite, so a vertex reached by both an even and an odd move-path certifies
an odd cycle, which maps back to a cycle of G carrying an odd number of
negative edges. G2 is never materialized: its nodes are addressed as
``GPrimeNode`` tags and both walking and start-node sampling are implemented
purely through oracle queries.

The clusterability tester searches for a "bad cycle" (exactly one negative
edge): it walks on the positive subgraph only, collects the visited set, and
probes all neighborhoods for a negative edge inside it.

All three testers here are one-sided; every Reject carries a verifiable
witness. When eps >= 1 or the walk budget would exceed the N*d cost of just
reading the whole graph, the balance and clusterability testers read it and
answer exactly instead (flagged in the Verdict; disable via
``BoundedConstants.allow_exact_fallback`` to force the walk path).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import exact
from .core import (
    GPrimeNode,
    Sign,
    SignedGraph,
    Witness,
    WitnessKind,
    original,
    subdivision,
)
from .dense_testers import Verdict, _as_rng
from .oracles import BoundedDegreeOracle

C_TRIANGLE_BD = 10.0


@dataclass(frozen=True)
class BoundedConstants:
    """Hidden-constant knobs for the walk-based testers.

    The asymptotic recipes leave the multipliers and the polylog/poly-eps
    exponents open; these defaults are sized for desk-scale runs and are all
    config so benchmarks can explore other regimes.
    """

    c1: float = 8.0   # balance: start repetitions ~ c1/eps'
    c2: float = 2.0   # balance: walks per start ~ c2*sqrt(N(d+1))*log(N)/eps'^3
    c3: float = 4.0   # balance: walk length ~ c3*log(N)^a/eps'^b
    c4: float = 8.0   # clusterability: start repetitions ~ c4/eps
    c5: float = 2.0   # clusterability: walks per start ~ c5*sqrt(N)*log(N)/eps^2
    c6: float = 4.0   # clusterability: walk length ~ c6*log(N)^a/eps^3
    walk_len_log_exponent: int = 1      # a above (0 makes L N-independent)
    balance_len_eps_exponent: int = 3   # b above (theory says up to 8)
    allow_exact_fallback: bool = True

    def __post_init__(self) -> None:
        for name in ("c1", "c2", "c3", "c4", "c5", "c6"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_CONSTANTS = BoundedConstants()


@dataclass(frozen=True)
class WalkParams:
    """Explicit walk schedule; overrides the eps-derived defaults."""

    starts: int
    walks_per_start: int
    walk_length: int

    def __post_init__(self) -> None:
        if min(self.starts, self.walks_per_start, self.walk_length) < 1:
            raise ValueError("all walk parameters must be >= 1")


class ParityTable:
    """First arrival (walk index, move count) per (G2 node, path parity).

    Holding both parities for one node certifies an odd cycle; the stored
    indices point back into the walks' move paths for witness extraction.
    """

    def __init__(self) -> None:
        self._first: dict[tuple[GPrimeNode, int], tuple[int, int]] = {}

    def record(self, node: GPrimeNode, parity: int, walk_idx: int, pos: int):
        """Record the arrival (first one wins) and return the stored entry of
        the opposite parity if one exists."""
        key = (node, parity)
        if key not in self._first:
            self._first[key] = (walk_idx, pos)
        return self._first.get((node, 1 - parity))

    def __len__(self) -> int:
        return len(self._first)


# ---------------------------------------------------------------------------
# walk primitives
# ---------------------------------------------------------------------------

def lazy_walk_step(o: BoundedDegreeOracle, v: int, restrict_to_positive: bool, rng) -> int:
    """One lazy step: try a uniform neighbor slot, stay on an empty slot (or
    on a negative edge when restricted to the positive subgraph). Exactly one
    oracle query."""
    i = int(rng.integers(1, o.d + 1))
    res = o.query(v, i)
    if res is None:
        return v
    u, sign = res
    if restrict_to_positive and sign is Sign.MINUS:
        return v
    return u


def _gprime_step(o: BoundedDegreeOracle, x: GPrimeNode, slot: int, coin: float) -> GPrimeNode:
    """Decision core for one lazy step on G2, fed pre-drawn randomness.

    Original(u): query slot; empty -> stay; negative edge -> the neighbor;
    positive edge -> its subdivision node. Subdivision nodes have degree 2,
    so under the uniform bound d they move with probability 2/d, splitting
    the coin evenly between the two endpoints. Costs 1 query from an
    original node, 0 from a subdivision node.
    """
    if x.is_original:
        res = o.query(x.u, slot)
        if res is None:
            return x
        v, sign = res
        if sign is Sign.MINUS:
            return original(v)
        return subdivision(x.u, v)
    if coin * o.d < 2.0:
        return original(x.u if coin * o.d < 1.0 else x.v)
    return x


def gprime_walk_step(o: BoundedDegreeOracle, x: GPrimeNode, rng) -> GPrimeNode:
    """One lazy step of the G2 walk (public single-step form)."""
    slot = int(rng.integers(1, o.d + 1))
    coin = float(rng.random())
    return _gprime_step(o, x, slot, coin)


def _probe_degree(o: BoundedDegreeOracle, u: int) -> int:
    """Degree by sequential probing; stops at the first empty slot."""
    for j in range(1, o.d + 1):
        if o.query(u, j) is None:
            return j - 1
    return o.d


def sample_gprime_node(o: BoundedDegreeOracle, rng) -> GPrimeNode | None:
    """One attempt to draw a uniform G2 node; None means abstain.

    Draw (u, i) uniform over [N] x [d] and query it. An empty slot abstains.
    A negative edge returns Original(u) with probability 1/(4 deg(u)). A
    positive edge (u, v) with u < v returns its subdivision node with
    probability 1/4, else falls back to Original(u) with conditional
    probability 1/(3 deg(u)); with u > v it returns Original(u) with
    probability 1/(4 deg(u)). Every non-isolated original node and every
    subdivision node then comes out with probability exactly 1/(4dN) per
    attempt. Isolated nodes are never returned (they cannot host a walk).
    Degree is obtained by probing, adding at most d queries per attempt.
    """
    u = int(rng.integers(o.n))
    i = int(rng.integers(1, o.d + 1))
    res = o.query(u, i)
    if res is None:
        return None
    v, sign = res
    if sign is Sign.MINUS:
        deg = _probe_degree(o, u)
        if rng.random() < 1.0 / (4.0 * deg):
            return original(u)
        return None
    if u < v:
        if rng.random() < 0.25:
            return subdivision(u, v)
        deg = _probe_degree(o, u)
        if rng.random() < 1.0 / (3.0 * deg):
            return original(u)
        return None
    deg = _probe_degree(o, u)
    if rng.random() < 1.0 / (4.0 * deg):
        return original(u)
    return None


# ---------------------------------------------------------------------------
# witness extraction helpers
# ---------------------------------------------------------------------------

def _extract_odd_cycle(closed_walk: list[GPrimeNode]) -> list[GPrimeNode]:
    """Reduce a closed odd walk (first == last) to a simple odd cycle by
    repeatedly splitting at a repeated vertex and keeping the odd half."""
    cyc = closed_walk[:-1]
    assert len(cyc) % 2 == 1
    while True:
        seen: dict[GPrimeNode, int] = {}
        rep = None
        for idx, v in enumerate(cyc):
            if v in seen:
                rep = (seen[v], idx)
                break
            seen[v] = idx
        if rep is None:
            return cyc
        i, j = rep
        inner = cyc[i:j]
        cyc = inner if (j - i) % 2 == 1 else cyc[:i] + cyc[j:]


def _contract_to_g_cycle(cyc: list[GPrimeNode]) -> Witness:
    """Map a simple odd G2 cycle to the corresponding G cycle: direct
    original-original edges are negative, subdivision hops are positive."""
    if not cyc[0].is_original:
        cyc = cyc[1:] + cyc[:1]
    nodes: list[int] = []
    signs: list[Sign] = []
    k = len(cyc)
    i = 0
    while i < k:
        x = cyc[i]
        nodes.append(x.u)
        if cyc[(i + 1) % k].is_original:
            signs.append(Sign.MINUS)
            i += 1
        else:
            signs.append(Sign.PLUS)
            i += 2
    return Witness(WitnessKind.ODD_NEGATIVE_CYCLE, tuple(nodes), tuple(signs))


def _tree_path_to_root(parent: dict[int, int | None], v: int) -> list[int]:
    path = [v]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path


def _splice_tree_paths(parent: dict[int, int | None], u: int, v: int) -> list[int]:
    """Cycle u -> ... -> lca -> ... -> v through the tree, closed by (v,u)."""
    pu = _tree_path_to_root(parent, u)
    pv = _tree_path_to_root(parent, v)
    on_pu = {node: idx for idx, node in enumerate(pu)}
    lca_idx_v = next(i for i, node in enumerate(pv) if node in on_pu)
    lca_idx_u = on_pu[pv[lca_idx_v]]
    return pu[: lca_idx_u + 1] + list(reversed(pv[:lca_idx_v]))


# ---------------------------------------------------------------------------
# whole-graph fallback
# ---------------------------------------------------------------------------

def read_whole_graph(o: BoundedDegreeOracle) -> SignedGraph:
    """Reconstruct the graph by probing every adjacency list (<= N*d queries)."""
    edges = []
    for v in range(o.n):
        for j in range(1, o.d + 1):
            res = o.query(v, j)
            if res is None:
                break
            u, sign = res
            if v < u:
                edges.append((v, u, sign))
    return SignedGraph.from_edges(o.n, edges, degree_bound=o.d)


def _exact_verdict(o: BoundedDegreeOracle, check) -> Verdict:
    start = o.query_count
    g = read_whole_graph(o)
    res = check(g)
    used = o.query_count - start
    ok = res.balanced if hasattr(res, "balanced") else res.clusterable
    return Verdict(ok, witness=None if ok else res.witness,
                   queries_used=used, exact_fallback=True)


# ---------------------------------------------------------------------------
# triangle tester
# ---------------------------------------------------------------------------

def test_triangle_bounded(o: BoundedDegreeOracle, pattern, eps: float, seed,
                          c_t: float = C_TRIANGLE_BD) -> Verdict:
    """Sample nodes and look for a pattern triangle within distance 2 by
    probing each sampled node's neighborhood and its neighbors'."""
    if o.d < 2:
        raise ValueError("triangle testing needs degree bound >= 2")
    if eps <= 0:
        raise ValueError("eps must be positive")
    pat = exact.triangle_pattern(pattern)
    rng = _as_rng(seed)
    samples = max(1, math.ceil(c_t / eps))
    start = o.query_count
    for v in rng.integers(0, o.n, size=samples):
        v = int(v)
        nb_v: list[tuple[int, Sign]] = []
        for j in range(1, o.d + 1):
            res = o.query(v, j)
            if res is None:
                break
            nb_v.append(res)
        rows = {}
        for u, _ in nb_v:
            row = {}
            for j in range(1, o.d + 1):
                res = o.query(u, j)
                if res is None:
                    break
                row[res[0]] = res[1]
            rows[u] = row
        for a in range(len(nb_v)):
            u1, s1 = nb_v[a]
            for b in range(a + 1, len(nb_v)):
                u2, s2 = nb_v[b]
                s12 = rows[u1].get(u2)
                if s12 is None:
                    continue
                if tuple(sorted((s1, s12, s2))) == pat:
                    w = Witness(WitnessKind.SIGNED_TRIANGLE, (v, u1, u2), (s1, s12, s2))
                    used = o.query_count - start
                    assert used <= samples * (o.d + o.d * o.d)
                    return Verdict(False, witness=w, queries_used=used)
    used = o.query_count - start
    assert used <= samples * (o.d + o.d * o.d)
    return Verdict(True, queries_used=used)


# ---------------------------------------------------------------------------
# balance tester
# ---------------------------------------------------------------------------

def balance_walk_schedule(n: int, d: int, eps: float,
                          constants: BoundedConstants = DEFAULT_CONSTANTS) -> WalkParams:
    eps_p = eps / (d + 1)
    starts = max(1, math.ceil(constants.c1 / eps_p))
    logn = max(1.0, math.log(n))
    m = max(1, math.ceil(constants.c2 * math.sqrt(n * (d + 1)) * logn / eps_p**3))
    length = max(1, math.ceil(
        constants.c3 * logn**constants.walk_len_log_exponent
        / eps_p**constants.balance_len_eps_exponent))
    return WalkParams(starts, m, length)


def _draw_start(o: BoundedDegreeOracle, rng) -> GPrimeNode | None:
    for _ in range(16 * o.d):
        x = sample_gprime_node(o, rng)
        if x is not None:
            return x
    return None


def test_balance_bounded(o: BoundedDegreeOracle, eps: float, seed,
                         constants: BoundedConstants = DEFAULT_CONSTANTS,
                         params: WalkParams | None = None) -> Verdict:
    """One-sided balance tester via parity collisions of lazy walks on G2.

    Testing eps-balancedness of G reduces to testing eps/(d+1)-bipartiteness
    of G2. Parity counts actual moves (lazy self-loops leave path length
    unchanged). A (node, parity) collision splices the two move paths into a
    closed odd walk, which is reduced to a simple odd G2 cycle and contracted
    to a G cycle with an odd number of negative edges.
    """
    if o.d < 2 or o.n < 2:
        raise ValueError("needs degree bound >= 2 and N >= 2")
    if eps <= 0:
        raise ValueError("eps must be positive")
    p = params if params is not None else balance_walk_schedule(o.n, o.d, eps, constants)
    sampler_cost = 16 * o.d * (1 + o.d)
    budget = p.starts * (sampler_cost + p.walks_per_start * p.walk_length)
    if constants.allow_exact_fallback and (eps >= 1.0 or budget > o.n * o.d):
        return _exact_verdict(o, exact.is_balanced)
    rng = _as_rng(seed)
    start_count = o.query_count
    for _ in range(p.starts):
        s = _draw_start(o, rng)
        if s is None:
            continue
        table = ParityTable()
        paths: list[list[GPrimeNode]] = []
        for widx in range(p.walks_per_start):
            cur = [s]
            table.record(s, 0, widx, 0)
            slots = rng.integers(1, o.d + 1, size=p.walk_length)
            coins = rng.random(p.walk_length)
            x = s
            hit = None
            for step in range(p.walk_length):
                nxt = _gprime_step(o, x, int(slots[step]), float(coins[step]))
                if nxt == x:
                    continue
                x = nxt
                cur.append(x)
                pos = len(cur) - 1
                other = table.record(x, pos & 1, widx, pos)
                if other is not None:
                    hit = (other, pos)
                    break
            if hit is not None:
                (owidx, opos), pos = hit
                path_a = paths[owidx][: opos + 1] if owidx < widx else cur[: opos + 1]
                path_b = cur[: pos + 1]
                closed = path_a + list(reversed(path_b))[1:]
                cyc = _extract_odd_cycle(closed)
                witness = _contract_to_g_cycle(cyc)
                return Verdict(False, witness=witness,
                               queries_used=o.query_count - start_count)
            paths.append(cur)
    return Verdict(True, queries_used=o.query_count - start_count)


# ---------------------------------------------------------------------------
# clusterability tester
# ---------------------------------------------------------------------------

def cluster_walk_schedule(n: int, d: int, eps: float,
                          constants: BoundedConstants = DEFAULT_CONSTANTS) -> WalkParams:
    starts = max(1, math.ceil(constants.c4 / eps))
    logn = max(1.0, math.log(n))
    m = max(1, math.ceil(constants.c5 * math.sqrt(n) * logn / eps**2))
    length = max(1, math.ceil(
        constants.c6 * logn**constants.walk_len_log_exponent / eps**3))
    return WalkParams(starts, m, length)


def badcycle_search(o: BoundedDegreeOracle, s: int, m: int, length: int, rng) -> Witness | None:
    """Walk the positive subgraph from s, then probe every visited node's
    neighborhood for a negative edge inside the visited set; splicing its
    endpoints' tree paths yields a cycle with exactly one negative edge."""
    parent: dict[int, int | None] = {s: None}
    for _ in range(m):
        x = s
        slots = rng.integers(1, o.d + 1, size=length)
        for step in range(length):
            res = o.query(x, int(slots[step]))
            if res is None:
                continue
            v, sign = res
            if sign is Sign.MINUS:
                continue
            if v not in parent:
                parent[v] = x
            x = v
    for u in sorted(parent):
        for j in range(1, o.d + 1):
            res = o.query(u, j)
            if res is None:
                break
            v, sign = res
            if sign is Sign.MINUS and v in parent:
                # nodes = u -> lca -> v through positive tree edges; the
                # closing (v, u) edge is the single negative one
                nodes = _splice_tree_paths(parent, u, v)
                signs = [Sign.PLUS] * (len(nodes) - 1) + [Sign.MINUS]
                return Witness(WitnessKind.BAD_CYCLE, tuple(nodes), tuple(signs))
    return None


def test_clusterability_bounded(o: BoundedDegreeOracle, eps: float, seed,
                                constants: BoundedConstants = DEFAULT_CONSTANTS,
                                params: WalkParams | None = None) -> Verdict:
    """One-sided clusterability tester: repeated bad-cycle searches from
    uniform start nodes."""
    if o.d < 2 or o.n < 2:
        raise ValueError("needs degree bound >= 2 and N >= 2")
    if eps <= 0:
        raise ValueError("eps must be positive")
    p = params if params is not None else cluster_walk_schedule(o.n, o.d, eps, constants)
    budget = p.starts * (1 + o.d) * p.walks_per_start * p.walk_length
    if constants.allow_exact_fallback and (eps >= 1.0 or budget > o.n * o.d):
        return _exact_verdict(o, exact.is_clusterable)
    rng = _as_rng(seed)
    start_count = o.query_count
    for _ in range(p.starts):
        s = int(rng.integers(o.n))
        w = badcycle_search(o, s, p.walks_per_start, p.walk_length, rng)
        if w is not None:
            return Verdict(False, witness=w, queries_used=o.query_count - start_count)
    return Verdict(True, queries_used=o.query_count - start_count)
