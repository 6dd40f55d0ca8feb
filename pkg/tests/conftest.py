"""Shared helpers: brute-force oracles and random instance generators."""
from __future__ import annotations

import random
from itertools import combinations
from math import comb

import numpy as np
import pytest

from gallaikit.core import Colouring, DistributionSequence, TargetGraph


def brute_degeneracy(H: TargetGraph) -> int:
    """max over all non-empty vertex subsets of the induced minimum degree."""
    best = 0
    verts = range(1, H.m + 1)
    for r in range(1, H.m + 1):
        for sub in combinations(verts, r):
            inside = set(sub)
            deg = {v: 0 for v in sub}
            for u, v in H.edges:
                if u in inside and v in inside:
                    deg[u] += 1
                    deg[v] += 1
            best = max(best, min(deg.values()))
    return best


def petersen() -> TargetGraph:
    edges = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1),
             (1, 6), (2, 7), (3, 8), (4, 9), (5, 10),
             (6, 8), (8, 10), (10, 7), (7, 9), (9, 6)]
    return TargetGraph.from_edges(10, edges)


def random_graph(rng: random.Random, m: int, p: float = 0.5) -> TargetGraph:
    edges = [(u, v) for u in range(1, m + 1) for v in range(u + 1, m + 1)
             if rng.random() < p]
    return TargetGraph.from_edges(m, edges)


def random_composition(rng: random.Random, total: int, k: int) -> tuple[int, ...]:
    """Uniform composition of total into k non-negative parts."""
    if k == 1:
        return (total,)
    cuts = sorted(rng.randint(0, total) for _ in range(k - 1))
    parts = []
    prev = 0
    for c in cuts:
        parts.append(c - prev)
        prev = c
    parts.append(total - prev)
    return tuple(parts)


def random_sequence(rng: random.Random, n: int, k: int) -> DistributionSequence:
    return DistributionSequence(n, k, random_composition(rng, comb(n, 2), k))


def random_colouring(rng: random.Random, n: int, k: int) -> Colouring:
    m = np.zeros((n, n), dtype=np.int32)
    for u in range(n - 1):
        for v in range(u + 1, n):
            c = rng.randint(1, k)
            m[u, v] = c
            m[v, u] = c
    return Colouring(n, k, m)


def brute_force_rainbow_triangles(col: Colouring) -> list[tuple[int, int, int]]:
    out = []
    for a, b, c in combinations(range(1, col.n + 1), 3):
        cols = {col.colour_of(a, b), col.colour_of(a, c), col.colour_of(b, c)}
        if len(cols) == 3:
            out.append((a, b, c))
    return out


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
