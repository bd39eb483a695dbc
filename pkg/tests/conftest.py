"""Shared builders for the test suite."""

from __future__ import annotations

import itertools

from signedtest.core import Sign, SignedGraph

_PAIRS = {n: list(itertools.combinations(range(n), 2)) for n in range(1, 6)}


def make_graph(n, edges, d=None):
    return SignedGraph.from_edges(n, edges, degree_bound=d)


def triangle(s01, s12, s02, d=None):
    """Triangle on {0,1,2}; signs given for edges (0,1), (1,2), (0,2)."""
    return make_graph(3, [(0, 1, s01), (1, 2, s12), (0, 2, s02)], d)


def all_signed_graphs(n):
    """Every simple signed graph on n labeled nodes (each pair absent/+/-)."""
    for combo in itertools.product((None, Sign.PLUS, Sign.MINUS), repeat=len(_PAIRS[n])):
        edges = [(u, v, s) for (u, v), s in zip(_PAIRS[n], combo) if s is not None]
        yield SignedGraph.from_edges(n, edges)


def random_signed_graph(rng, n, p_edge=0.5, p_minus=0.5, max_positive=None):
    """Random simple signed graph; optionally cap the positive edge count
    (extra positives are flipped to negative, keeping the edge set)."""
    edges = []
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < p_edge:
            s = Sign.MINUS if rng.random() < p_minus else Sign.PLUS
            edges.append([u, v, s])
    if max_positive is not None:
        pos_idx = [i for i, e in enumerate(edges) if e[2] is Sign.PLUS]
        if len(pos_idx) > max_positive:
            rng.shuffle(pos_idx)
            for i in pos_idx[max_positive:]:
                edges[i][2] = Sign.MINUS
    return SignedGraph.from_edges(n, [tuple(e) for e in edges])
