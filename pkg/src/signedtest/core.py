"""Core signed-graph data types, validation, file I/O, and graph transforms.

A signed graph is a simple undirected graph whose edges carry a + or - label.
Everything downstream (exact checkers, testers, generators) works on the
immutable ``SignedGraph`` defined here.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, TextIO


class Sign(IntEnum):
    """Edge sign. PLUS sorts before MINUS; serialized as '+' / '-'."""

    PLUS = 0
    MINUS = 1

    @property
    def token(self) -> str:
        return "+" if self is Sign.PLUS else "-"

    @classmethod
    def from_token(cls, tok: str) -> "Sign":
        if tok == "+":
            return cls.PLUS
        if tok == "-":
            return cls.MINUS
        raise ValueError(f"bad sign token {tok!r}, expected '+' or '-'")


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input or invalid graph construction."""


@dataclass(frozen=True)
class SignedGraph:
    """Immutable signed graph: ``adj[v]`` lists ``(neighbor, sign)`` pairs.

    Neighbor order inside each adjacency list is edge insertion order; the
    bounded-degree oracle exposes exactly this order, so it is part of the
    graph's identity, not an implementation detail.
    """

    n: int
    adj: tuple[tuple[tuple[int, Sign], ...], ...]
    degree_bound: int | None = None

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, Sign | str]],
        degree_bound: int | None = None,
    ) -> "SignedGraph":
        if n < 1:
            raise GraphFormatError("graph needs at least one node")
        if degree_bound is not None and degree_bound < 1:
            raise GraphFormatError("degree bound must be >= 1")
        lists: list[list[tuple[int, Sign]]] = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for u, v, s in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u},{v}) endpoint out of range for n={n}")
            if u == v:
                raise GraphFormatError(f"self-loop at {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphFormatError(f"duplicate edge ({key[0]},{key[1]})")
            seen.add(key)
            sign = Sign.from_token(s) if isinstance(s, str) else Sign(s)
            lists[u].append((v, sign))
            lists[v].append((u, sign))
        if degree_bound is not None:
            for v in range(n):
                if len(lists[v]) > degree_bound:
                    raise GraphFormatError(
                        f"node {v} has degree {len(lists[v])} > bound {degree_bound}"
                    )
        return cls(n, tuple(tuple(l) for l in lists), degree_bound)

    @cached_property
    def _sign_map(self) -> dict[tuple[int, int], Sign]:
        return {(u, v): s for u in range(self.n) for v, s in self.adj[u]}

    def sign_of(self, u: int, v: int) -> Sign | None:
        """Sign of edge (u,v), or None if absent."""
        return self._sign_map.get((u, v))

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> tuple[tuple[int, Sign], ...]:
        return self.adj[v]

    def edges(self) -> Iterator[tuple[int, int, Sign]]:
        """Each edge once, as (u, v, sign) with u < v, sorted."""
        out = [(u, v, s) for u in range(self.n) for v, s in self.adj[u] if u < v]
        out.sort(key=lambda e: (e[0], e[1]))
        return iter(out)

    @cached_property
    def num_edges(self) -> int:
        return sum(len(l) for l in self.adj) // 2

    @cached_property
    def num_positive_edges(self) -> int:
        return sum(1 for _, _, s in self.edges() if s is Sign.PLUS)

    def max_degree(self) -> int:
        return max((len(l) for l in self.adj), default=0)


def validate(g: SignedGraph) -> str | None:
    """Return None if g satisfies every structural invariant, else the first violation."""
    if g.n < 1:
        return "graph needs at least one node"
    if len(g.adj) != g.n:
        return f"adjacency has {len(g.adj)} rows for n={g.n}"
    for u in range(g.n):
        seen: set[int] = set()
        for v, s in g.adj[u]:
            if not 0 <= v < g.n:
                return f"neighbor {v} of {u} out of range"
            if v == u:
                return f"self-loop at {u}"
            if v in seen:
                return f"parallel edge ({u},{v})"
            seen.add(v)
            if not isinstance(s, Sign):
                return f"edge ({u},{v}) has non-sign label {s!r}"
            back = [t for w, t in g.adj[v] if w == u]
            if not back:
                return f"asymmetric edge ({u},{v})"
            if back[0] is not s:
                return f"edge ({u},{v}) sign mismatch across directions"
    if g.degree_bound is not None:
        if g.degree_bound < 1:
            return "degree bound must be >= 1"
        for u in range(g.n):
            if len(g.adj[u]) > g.degree_bound:
                return f"node {u} has degree {len(g.adj[u])} > bound {g.degree_bound}"
    return None


# ---------------------------------------------------------------------------
# Edge-list file format
#
# Header line "n m", then m lines "u v s" with 0 <= u < v < n and s in {+,-}.
# '#' starts a comment, blank lines are ignored, encoding is UTF-8 with LF.
# ---------------------------------------------------------------------------


def _data_lines(stream: TextIO) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def load_edge_list(source: str | Path | TextIO, degree_bound: int | None = None) -> SignedGraph:
    """Parse a .sgl edge list from a path or an open text stream."""
    if hasattr(source, "read"):
        return _parse(source, degree_bound)  # type: ignore[arg-type]
    with open(source, "r", encoding="utf-8") as fh:
        return _parse(fh, degree_bound)


def _parse(stream: TextIO, degree_bound: int | None) -> SignedGraph:
    lines = _data_lines(stream)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise GraphFormatError("line 1: missing 'n m' header") from None
    parts = header.split()
    if len(parts) != 2:
        raise GraphFormatError(f"line {lineno}: header must be 'n m', got {header!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphFormatError(f"line {lineno}: header must be two integers") from None
    if n < 1:
        raise GraphFormatError(f"line {lineno}: n must be >= 1")
    if m < 0:
        raise GraphFormatError(f"line {lineno}: m must be >= 0")

    edges: list[tuple[int, int, Sign]] = []
    for lineno, line in lines:
        if len(edges) == m:
            raise GraphFormatError(f"line {lineno}: more than the declared {m} edges")
        fields = line.split()
        if len(fields) != 3:
            raise GraphFormatError(f"line {lineno}: expected 'u v s', got {line!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: endpoints must be integers") from None
        if not 0 <= u < v < n:
            raise GraphFormatError(f"line {lineno}: endpoints must satisfy 0 <= u < v < n")
        try:
            s = Sign.from_token(fields[2])
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
        edges.append((u, v, s))
    if len(edges) != m:
        raise GraphFormatError(f"declared {m} edges but found {len(edges)}")
    try:
        return SignedGraph.from_edges(n, edges, degree_bound)
    except GraphFormatError as exc:
        raise GraphFormatError(str(exc)) from None


def save_edge_list(g: SignedGraph, dest: str | Path | TextIO) -> None:
    """Write g in canonical form: sorted edges, '+'/'-' tokens, LF endings."""
    if hasattr(dest, "write"):
        _write(g, dest)  # type: ignore[arg-type]
        return
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        _write(g, fh)


def _write(g: SignedGraph, fh: TextIO) -> None:
    fh.write(f"{g.n} {g.num_edges}\n")
    for u, v, s in g.edges():
        fh.write(f"{u} {v} {s.token}\n")


def dumps_edge_list(g: SignedGraph) -> str:
    buf = io.StringIO()
    _write(g, buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Derived graphs
# ---------------------------------------------------------------------------


def positive_subgraph(g: SignedGraph) -> SignedGraph:
    """Subgraph keeping only positive edges; node set and degree bound unchanged."""
    edges = [(u, v, s) for u, v, s in g.edges() if s is Sign.PLUS]
    return SignedGraph.from_edges(g.n, edges, g.degree_bound)


class GPrimeNode(NamedTuple):
    """A node of the subdivision graph: original u (v is None), or the
    midpoint of positive edge (u, v) with u < v."""

    u: int
    v: int | None = None

    @property
    def is_original(self) -> bool:
        return self.v is None


def original(u: int) -> GPrimeNode:
    return GPrimeNode(u, None)


def subdivision(u: int, v: int) -> GPrimeNode:
    if u > v:
        u, v = v, u
    return GPrimeNode(u, v)


@dataclass(frozen=True)
class UnsignedGraph:
    """Plain undirected graph produced by the subdivision transform."""

    n: int
    adj: tuple[tuple[int, ...], ...]
    degree_bound: int | None = None

    def num_edges(self) -> int:
        return sum(len(l) for l in self.adj) // 2


def zaslavsky_transform(g: SignedGraph) -> tuple[UnsignedGraph, tuple[GPrimeNode, ...]]:
    """Subdivide each positive edge with a fresh midpoint; keep negative edges.

    Returns the unsigned result and a provenance map: entry i names the
    source of node i (original vertex or subdivided positive edge).
    The result is bipartite exactly when g is balanced, and its minimum
    edge-deletion distance to bipartiteness equals g's frustration index.
    """
    pos_edges = [(u, v) for u, v, s in g.edges() if s is Sign.PLUS]
    prov = [original(u) for u in range(g.n)] + [subdivision(u, v) for u, v in pos_edges]
    lists: list[list[int]] = [[] for _ in range(len(prov))]
    for idx, (u, v) in enumerate(pos_edges):
        w = g.n + idx
        lists[u].append(w)
        lists[w].append(u)
        lists[v].append(w)
        lists[w].append(v)
    for u, v, s in g.edges():
        if s is Sign.MINUS:
            lists[u].append(v)
            lists[v].append(u)
    bound = None if g.degree_bound is None else max(g.degree_bound, 2)
    gp = UnsignedGraph(len(prov), tuple(tuple(l) for l in lists), bound)
    return gp, tuple(prov)


# ---------------------------------------------------------------------------
# Witnesses and clusterings
# ---------------------------------------------------------------------------


class WitnessKind(IntEnum):
    BAD_CYCLE = 0            # cycle with exactly one negative edge
    ODD_NEGATIVE_CYCLE = 1   # cycle with an odd number of negative edges
    SIGNED_TRIANGLE = 2      # triangle matching a queried sign multiset


@dataclass(frozen=True)
class Witness:
    """A concrete forbidden substructure found in a graph.

    ``signs[i]`` is the sign of edge ``(nodes[i], nodes[(i+1) % len(nodes)])``;
    the closing edge is included, so len(signs) == len(nodes).
    """

    kind: WitnessKind
    nodes: tuple[int, ...]
    signs: tuple[Sign, ...]

    def __post_init__(self) -> None:
        if len(self.nodes) != len(self.signs):
            raise ValueError("witness needs one sign per cycle edge, closing edge included")

    def edge_pairs(self) -> Iterator[tuple[int, int, Sign]]:
        k = len(self.nodes)
        for i in range(k):
            yield self.nodes[i], self.nodes[(i + 1) % k], self.signs[i]


@dataclass(frozen=True)
class Clustering:
    """Partition of nodes into clusters 0..k-1; every id must be used."""

    assignment: tuple[int, ...]
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("clustering needs at least one cluster")
        used = set(self.assignment)
        if used != set(range(self.k)):
            raise ValueError(f"cluster ids must be exactly 0..{self.k - 1}")

    @classmethod
    def from_labels(cls, labels: Iterable[int]) -> "Clustering":
        """Relabel arbitrary hashable labels to 0..k-1 in first-seen order."""
        remap: dict[int, int] = {}
        out = []
        for lab in labels:
            if lab not in remap:
                remap[lab] = len(remap)
            out.append(remap[lab])
        return cls(tuple(out), len(remap))

    def clusters(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.k)]
        for node, c in enumerate(self.assignment):
            groups[c].append(node)
        return groups
