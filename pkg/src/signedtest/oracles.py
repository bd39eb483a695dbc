"""Query oracles over signed graphs, with exact query accounting.

Testers never touch a ``SignedGraph`` directly; they see one of the two query
models here. Every oracle call increments ``query_count`` by one, including
out-of-range adjacency answers. Free metadata is limited to the node count
and (bounded model) the degree bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Sign, SignedGraph


class DenseOracle:
    """Adjacency-matrix access: query(u, v) -> Sign or None (absent).

    Diagonal queries are a caller bug and raise; they are never charged.
    """

    def __init__(self, graph: SignedGraph):
        self._graph = graph
        self.n = graph.n
        self.query_count = 0
        self._signs = graph._sign_map  # shared immutable lookup

    def query(self, u: int, v: int) -> Sign | None:
        if u == v:
            raise ValueError(f"diagonal query ({u},{u})")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"query ({u},{v}) out of range for n={self.n}")
        self.query_count += 1
        return self._signs.get((u, v))

    def reset_count(self) -> None:
        self.query_count = 0


class BoundedDegreeOracle:
    """Adjacency-list access: query(v, i) -> (neighbor, sign) or None when
    node v has fewer than i neighbors. i is 1-based and must stay within the
    degree bound d; the out-of-range answer still costs one query.

    Neighbor order is the graph's edge insertion order and is stable across
    calls.
    """

    def __init__(self, graph: SignedGraph):
        if graph.degree_bound is None:
            raise ValueError("bounded-degree oracle needs a graph with a degree bound")
        self._graph = graph
        self.n = graph.n
        self.d = graph.degree_bound
        self.query_count = 0
        self._adj = graph.adj

    def query(self, v: int, i: int) -> tuple[int, Sign] | None:
        if not 0 <= v < self.n:
            raise ValueError(f"node {v} out of range for n={self.n}")
        if not 1 <= i <= self.d:
            raise ValueError(f"neighbor index {i} outside 1..{self.d}")
        self.query_count += 1
        row = self._adj[v]
        if i <= len(row):
            return row[i - 1]
        return None

    def reset_count(self) -> None:
        self.query_count = 0


@dataclass(frozen=True)
class RandomSource:
    """Seeded randomness with reproducible independent substreams.

    ``stream(*path)`` keys a fresh generator off (seed, path) via NumPy's
    SeedSequence spawn keys, so e.g. per-trial streams are identical whether
    trials run sequentially or in parallel, in any order.
    """

    seed: int

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    def stream(self, *path: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=path))

    def generator(self) -> np.random.Generator:
        return self.stream()
