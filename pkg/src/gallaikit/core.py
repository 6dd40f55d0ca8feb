"""Shared domain types: target graphs, distribution sequences, edge colourings.

Vertices and colours are 1-based contiguous integers throughout, so the file
formats and witness lines are unambiguous. All types are immutable after
construction and safe to share across workers.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

Edge = tuple[int, int]


def _normalise_edge(u: int, v: int) -> Edge:
    if u == v:
        raise ValueError(f"loop edge ({u},{v}) not allowed")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class TargetGraph:
    """A simple graph on vertices [1..m], the forbidden pattern of a search.

    Edges are stored normalised as (u, v) with u < v.
    """

    m: int
    edges: frozenset[Edge]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("vertex count must be positive")
        for u, v in self.edges:
            if not (1 <= u < v <= self.m):
                raise ValueError(f"edge ({u},{v}) outside [1..{self.m}] or unnormalised")

    @staticmethod
    def from_edges(m: int, edges) -> "TargetGraph":
        return TargetGraph(m, frozenset(_normalise_edge(u, v) for u, v in edges))

    @staticmethod
    def complete(m: int) -> "TargetGraph":
        return TargetGraph.from_edges(m, [(u, v) for u in range(1, m + 1) for v in range(u + 1, m + 1)])

    @staticmethod
    def cycle(m: int) -> "TargetGraph":
        if m < 3:
            raise ValueError("cycle needs at least 3 vertices")
        return TargetGraph.from_edges(m, [(i, i % m + 1) for i in range(1, m + 1)])

    @staticmethod
    def path(m: int) -> "TargetGraph":
        return TargetGraph.from_edges(m, [(i, i + 1) for i in range(1, m)])

    @staticmethod
    def star(leaves: int) -> "TargetGraph":
        return TargetGraph.from_edges(leaves + 1, [(1, i) for i in range(2, leaves + 2)])

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in range(1, self.m + 1)}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def is_connected(self) -> bool:
        if self.m == 1:
            return True
        adj = self.adjacency()
        seen = {1}
        stack = [1]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.m

    def is_tree(self) -> bool:
        return self.is_connected() and len(self.edges) == self.m - 1


@lru_cache(maxsize=None)
def degeneracy(H: TargetGraph) -> int:
    """Smallest d such that repeated minimum-degree deletion never sees degree > d.

    Edgeless graphs are 0-degenerate by convention; forests are exactly the
    1-degenerate graphs.
    """
    if not H.edges:
        return 0
    adj = {v: set(ns) for v, ns in H.adjacency().items()}
    alive = set(adj)
    worst = 0
    while alive:
        v = min(alive, key=lambda x: (len(adj[x]), x))
        worst = max(worst, len(adj[v]))
        for w in adj[v]:
            adj[w].discard(v)
        alive.discard(v)
        del adj[v]
    return worst


@dataclass(frozen=True)
class DistributionSequence:
    """k per-colour edge budgets for a complete graph on n vertices.

    The shape (k >= 1, n >= 1, all entries >= 0) is enforced here; whether the
    entries actually sum to C(n,2) is the n-good condition, tested separately
    by is_n_good so that defective candidate sequences remain representable.
    """

    n: int
    k: int
    e: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("need n >= 1 and k >= 1")
        if len(self.e) != self.k:
            raise ValueError(f"expected {self.k} budgets, got {len(self.e)}")
        if any(x < 0 for x in self.e):
            raise ValueError("budgets must be non-negative")

    @staticmethod
    def of(n: int, e) -> "DistributionSequence":
        e = tuple(int(x) for x in e)
        return DistributionSequence(n, len(e), e)

    @property
    def total(self) -> int:
        return sum(self.e)


def is_n_good(seq: DistributionSequence) -> bool:
    """True iff the budgets sum to C(n,2)."""
    return seq.total == comb(seq.n, 2)


def balanced_sequence(n: int, k: int) -> DistributionSequence:
    """The near-uniform n-good sequence: with C(n,2) = qk + r, k-r entries of q
    followed by r entries of q+1."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    q, r = divmod(comb(n, 2), k)
    return DistributionSequence(n, k, (q,) * (k - r) + (q + 1,) * r)


class Colouring:
    """A complete-graph edge colouring, edge (u,v) -> colour in [1..k].

    Backed by a read-only symmetric n x n integer matrix (0 diagonal) for O(1)
    edge access and vectorised row scans.
    """

    __slots__ = ("n", "k", "_m")

    def __init__(self, n: int, k: int, matrix: np.ndarray):
        if n < 1 or k < 1:
            raise ValueError("need n >= 1 and k >= 1")
        m = np.asarray(matrix, dtype=np.int32)
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} != ({n},{n})")
        if n > 1:
            off = m[~np.eye(n, dtype=bool)]
            if off.min() < 1 or off.max() > k:
                raise ValueError("edge colours must lie in [1..k]")
        if np.any(np.diag(m) != 0) or not np.array_equal(m, m.T):
            raise ValueError("matrix must be symmetric with zero diagonal")
        m = m.copy()
        m.setflags(write=False)
        self.n = n
        self.k = k
        self._m = m

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    def colour_of(self, u: int, v: int) -> int:
        if u == v or not (1 <= u <= self.n and 1 <= v <= self.n):
            raise ValueError(f"bad edge ({u},{v})")
        return int(self._m[u - 1, v - 1])

    @staticmethod
    def from_edge_colours(n: int, k: int, colours: dict[Edge, int]) -> "Colouring":
        m = np.zeros((n, n), dtype=np.int32)
        seen = 0
        for (u, v), c in colours.items():
            u, v = _normalise_edge(u, v)
            m[u - 1, v - 1] = c
            m[v - 1, u - 1] = c
            seen += 1
        if seen != comb(n, 2):
            raise ValueError(f"expected {comb(n, 2)} edges, got {seen}")
        return Colouring(n, k, m)

    @staticmethod
    def monochromatic(n: int, colour: int = 1, k: int | None = None) -> "Colouring":
        k = colour if k is None else k
        m = np.full((n, n), colour, dtype=np.int32)
        np.fill_diagonal(m, 0)
        return Colouring(n, k, m)

    def induced(self, vertices: list[int]) -> "Colouring":
        """Sub-colouring on the given vertices, relabelled 1..len(vertices)."""
        idx = np.array([v - 1 for v in vertices], dtype=np.intp)
        return Colouring(len(vertices), self.k, self._m[np.ix_(idx, idx)])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Colouring)
            and self.n == other.n
            and self.k == other.k
            and np.array_equal(self._m, other._m)
        )

    def __repr__(self) -> str:
        return f"Colouring(n={self.n}, k={self.k})"


def colour_counts(col: Colouring) -> list[int]:
    """Entry i-1 = number of edges with colour i; entries sum to C(n,2)."""
    iu = np.triu_indices(col.n, k=1)
    counts = np.bincount(col.matrix[iu], minlength=col.k + 1)
    return [int(x) for x in counts[1:col.k + 1]]


# ---------------------------------------------------------------------------
# Text file formats. Lines starting with "#" are comments and ignored by every
# parser; writers emit a canonical form so round-trips are bit-exact.
# ---------------------------------------------------------------------------

def _data_lines(path: str) -> list[str]:
    with open(path, "r", encoding="utf-8") as f:
        return [ln.strip() for ln in f if ln.strip() and not ln.lstrip().startswith("#")]


def write_sequence(seq: DistributionSequence, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{seq.n} {seq.k}\n")
        f.write(" ".join(str(x) for x in seq.e) + "\n")


def read_sequence(path: str) -> DistributionSequence:
    lines = _data_lines(path)
    if len(lines) < 2:
        raise ValueError(f"sequence file {path}: expected 2 data lines")
    n, k = (int(x) for x in lines[0].split())
    e = tuple(int(x) for x in lines[1].split())
    return DistributionSequence(n, k, e)


def write_colouring(col: Colouring, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{col.n} {col.k}\n")
        for u in range(1, col.n):
            row = col.matrix[u - 1, u:]
            f.write(" ".join(str(int(c)) for c in row) + "\n")


def read_colouring(path: str) -> Colouring:
    lines = _data_lines(path)
    if not lines:
        raise ValueError(f"colouring file {path}: empty")
    n, k = (int(x) for x in lines[0].split())
    if len(lines) != n:
        raise ValueError(f"colouring file {path}: expected {n - 1} rows, got {len(lines) - 1}")
    m = np.zeros((n, n), dtype=np.int32)
    for u in range(1, n):
        row = [int(x) for x in lines[u].split()]
        if len(row) != n - u:
            raise ValueError(f"colouring file {path}: row {u} has {len(row)} entries, expected {n - u}")
        m[u - 1, u:] = row
        m[u:, u - 1] = row
    return Colouring(n, k, m)


def write_target(H: TargetGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{H.m}\n")
        for u, v in sorted(H.edges):
            f.write(f"{u} {v}\n")


def read_target(path: str) -> TargetGraph:
    lines = _data_lines(path)
    if not lines:
        raise ValueError(f"target file {path}: empty")
    m = int(lines[0].split()[0])
    edges = []
    for ln in lines[1:]:
        u, v = (int(x) for x in ln.split())
        edges.append((u, v))
    return TargetGraph.from_edges(m, edges)
