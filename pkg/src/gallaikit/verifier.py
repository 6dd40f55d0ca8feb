"""Rainbow-substructure searches, Gallai partitions, certificate replay checks.

All searches are deterministic and return the lexicographically least witness
under vertex order, so test fixtures are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Colouring, DistributionSequence, TargetGraph
from .errors import PreconditionViolation, StructuralMismatch

FOUND = "found"
NONE = "none"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Embedding:
    """Images of the pattern's vertices 1..m, in order, inside K_n."""

    vertices: tuple[int, ...]

    def witness_line(self, tag: str = "WITNESS") -> str:
        return tag + " " + " ".join(str(v) for v in self.vertices)


def embedding_is_rainbow(col: Colouring, H: TargetGraph, emb: Embedding) -> bool:
    """Injectivity plus pairwise-distinct colours on the images of H's edges."""
    img = emb.vertices
    if len(img) != H.m or len(set(img)) != H.m:
        return False
    seen: set[int] = set()
    for u, v in H.edges:
        c = col.colour_of(img[u - 1], img[v - 1])
        if c in seen:
            return False
        seen.add(c)
    return True


@dataclass
class SubgraphSearch:
    """Three-valued search outcome: found / exhaustively none / budget ran out."""

    status: str
    embedding: Embedding | None = None
    nodes_used: int = 0

    @property
    def found(self) -> bool:
        return self.status == FOUND

    @property
    def exhausted(self) -> bool:
        return self.status == NONE


def find_rainbow_triangle(col: Colouring) -> Embedding | None:
    """Lexicographically least triple (u,v,w) with three distinct edge colours,
    or None when the colouring is a Gallai colouring."""
    n = col.n
    M = col.matrix
    for i in range(n - 2):
        row_i = M[i]
        for j in range(i + 1, n - 1):
            c = int(M[i, j])
            a = row_i[j + 1:]
            b = M[j, j + 1:]
            mask = (a != c) & (b != c) & (a != b)
            if mask.any():
                w = int(np.argmax(mask)) + j + 1
                return Embedding((i + 1, j + 1, w + 1))
    return None


class _BudgetExhausted(Exception):
    pass


def find_rainbow_subgraph(col: Colouring, H: TargetGraph,
                          node_budget: int = 1_000_000) -> SubgraphSearch:
    """Backtracking search for a rainbow copy of H.

    Returns found with the lexicographically least embedding, a definite none
    only when the search completed, and inconclusive once node_budget vertex
    assignments have been tried.
    """
    n, m = col.n, H.m
    if m > n:
        return SubgraphSearch(NONE)
    M = col.matrix
    back = {j: [i for i in range(1, j) if (i, j) in H.edges] for j in range(1, m + 1)}
    images = [0] * (m + 1)
    used_v = [False] * (n + 1)
    used_c: set[int] = set()
    nodes = 0

    def place(j: int) -> Embedding | None:
        nonlocal nodes
        if j > m:
            return Embedding(tuple(images[1:]))
        for u in range(1, n + 1):
            if used_v[u]:
                continue
            nodes += 1
            if nodes > node_budget:
                raise _BudgetExhausted
            fresh: list[int] = []
            ok = True
            for i in back[j]:
                c = int(M[images[i] - 1, u - 1])
                if c in used_c or c in fresh:
                    ok = False
                    break
                fresh.append(c)
            if not ok:
                continue
            images[j] = u
            used_v[u] = True
            used_c.update(fresh)
            hit = place(j + 1)
            if hit is not None:
                return hit
            used_c.difference_update(fresh)
            used_v[u] = False
            images[j] = 0
        return None

    try:
        emb = place(1)
    except _BudgetExhausted:
        return SubgraphSearch(INCONCLUSIVE, nodes_used=nodes)
    if emb is None:
        return SubgraphSearch(NONE, nodes_used=nodes)
    return SubgraphSearch(FOUND, emb, nodes)


def find_rainbow_cycle(col: Colouring, max_len: int) -> Embedding | None:
    """Exhaustive search for a rainbow cycle of length 3..max_len.

    Backtracks over vertex sequences with colour-distinctness pruning; meant
    for small n (the certificate replay is the scalable proof of
    cycle-freeness at real sizes). The witness starts at its smallest vertex
    and takes the lexicographically smaller direction.
    """
    n = col.n
    if max_len < 3:
        raise PreconditionViolation("max_len must be at least 3")
    max_len = min(max_len, n)
    M = col.matrix
    path = [0]
    on_path = [False] * (n + 1)
    used_c: set[int] = set()

    def extend(start: int) -> tuple[int, ...] | None:
        v = path[-1]
        if len(path) >= 3:
            c = int(M[v - 1, start - 1])
            if c not in used_c and path[1] < path[-1]:
                return tuple(path)
        if len(path) == max_len:
            return None
        for u in range(start + 1, n + 1):
            if on_path[u]:
                continue
            c = int(M[v - 1, u - 1])
            if c in used_c:
                continue
            path.append(u)
            on_path[u] = True
            used_c.add(c)
            hit = extend(start)
            if hit is not None:
                return hit
            used_c.discard(c)
            on_path[u] = False
            path.pop()
        return None

    for start in range(1, n - 1):
        path[0] = start
        on_path[start] = True
        hit = extend(start)
        on_path[start] = False
        if hit is not None:
            return Embedding(hit)
    return None


def colour_degree(col: Colouring, v: int) -> int:
    """Number of distinct colours on edges incident to v."""
    if not 1 <= v <= col.n:
        raise PreconditionViolation(f"vertex {v} outside [1..{col.n}]")
    if col.n == 1:
        return 0
    row = np.delete(col.matrix[v - 1], v - 1)
    return int(np.unique(row).size)


def _leaf_peel_order(H: TargetGraph) -> tuple[int, list[tuple[int, int]]]:
    """Peel smallest-index leaves one at a time; returns (base vertex, peels).

    peels[i] = (leaf, parent) in peel order, so reversed(peels) is a valid
    insertion order starting from the base vertex.
    """
    adj = {v: set(ns) for v, ns in H.adjacency().items()}
    alive = set(adj)
    peels: list[tuple[int, int]] = []
    while len(alive) > 1:
        leaf = min(v for v in alive if len(adj[v]) <= 1)
        parent = next(iter(adj[leaf])) if adj[leaf] else 0
        for w in adj[leaf]:
            adj[w].discard(leaf)
        alive.discard(leaf)
        del adj[leaf]
        peels.append((leaf, parent))
    return next(iter(alive)), peels


def find_rainbow_tree(col: Colouring, H: TargetGraph,
                      fallback_budget: int = 1_000_000) -> Embedding | None:
    """Greedy leaf-peeling embedder for tree targets.

    Restricts the inner embedding to vertices of colour degree >= 2m+1; when
    fewer than m vertices survive that filter it proceeds on all vertices.
    The outermost leaf may use any vertex whose connecting colour is unused.
    On greedy failure, falls back to the exhaustive backtracking search.
    """
    if not H.is_tree():
        raise PreconditionViolation("target is not a tree")
    if H.m > col.n:
        raise PreconditionViolation(f"m={H.m} exceeds n={col.n}")
    n, m = col.n, H.m
    eligible = [v for v in range(1, n + 1) if colour_degree(col, v) >= 2 * m + 1]
    if len(eligible) < m:
        eligible = list(range(1, n + 1))
    base, peels = _leaf_peel_order(H)
    inserts = [(base, 0)] + list(reversed(peels))

    images = {base: eligible[0]}
    used_v = {eligible[0]}
    used_c: set[int] = set()
    ok = True
    for idx, (v, parent) in enumerate(inserts[1:], start=1):
        outermost = idx == len(inserts) - 1
        pool = range(1, n + 1) if outermost else eligible
        pick = None
        for u in pool:
            if u in used_v:
                continue
            c = col.colour_of(images[parent], u)
            if c in used_c:
                continue
            pick = (u, c)
            break
        if pick is None:
            ok = False
            break
        images[v] = pick[0]
        used_v.add(pick[0])
        used_c.add(pick[1])
    if ok and len(images) == m:
        emb = Embedding(tuple(images[v] for v in range(1, m + 1)))
        if embedding_is_rainbow(col, H, emb):
            return emb
    res = find_rainbow_subgraph(col, H, node_budget=fallback_budget)
    return res.embedding if res.found else None


# ---------------------------------------------------------------------------
# Gallai partitions
# ---------------------------------------------------------------------------

class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass
class GallaiPartition:
    """Vertex partition whose inter-part edges use at most two base colours,
    one colour per part pair."""

    base_colours: frozenset[int]
    parts: tuple[tuple[int, ...], ...]
    between_colour: dict[tuple[int, int], int]
    moreover_holds: bool = False


@dataclass
class GallaiSearch:
    partition: GallaiPartition | None
    rainbow_triangle: Embedding | None = None
    heuristic_failure: bool = False


def _components_avoiding(col: Colouring, base: set[int]) -> list[list[int]]:
    n = col.n
    uf = _UnionFind(n)
    M = col.matrix
    for i in range(n - 1):
        for j in range(i + 1, n):
            if int(M[i, j]) not in base:
                uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(uf.find(v), []).append(v + 1)
    return sorted(groups.values(), key=lambda g: g[0])


def _pair_colours(col: Colouring, a: list[int], b: list[int], cap: int = 2) -> set[int]:
    seen: set[int] = set()
    for u in a:
        for v in b:
            seen.add(col.colour_of(u, v))
            if len(seen) >= cap:
                return seen
    return seen


def _finest_mono_coarsening(col: Colouring, parts: list[list[int]]) -> list[list[int]] | None:
    """Merge any part pair whose crossing edges use >= 2 colours, to fixpoint.

    Every valid coarsening must contain these merges, so the result is the
    unique finest partition with monochromatic part pairs; None when the
    fixpoint collapses to a single part.
    """
    parts = [sorted(p) for p in parts]
    changed = True
    while changed and len(parts) > 1:
        changed = False
        for i in range(len(parts) - 1):
            for j in range(i + 1, len(parts)):
                if len(_pair_colours(col, parts[i], parts[j])) >= 2:
                    merged = sorted(parts[i] + parts[j])
                    parts = [p for idx, p in enumerate(parts) if idx not in (i, j)]
                    parts.append(merged)
                    parts.sort(key=lambda p: p[0])
                    changed = True
                    break
            if changed:
                break
    return parts if len(parts) > 1 else None


def _build_partition(col: Colouring, parts: list[list[int]]) -> GallaiPartition:
    between: dict[tuple[int, int], int] = {}
    colour_use: dict[int, int] = {}
    for i in range(len(parts) - 1):
        for j in range(i + 1, len(parts)):
            c = col.colour_of(parts[i][0], parts[j][0])
            between[(i, j)] = c
            colour_use[c] = colour_use.get(c, 0) + len(parts[i]) * len(parts[j])
    base = frozenset(colour_use)
    moreover = all(cnt >= col.n - 1 for cnt in colour_use.values())
    return GallaiPartition(base, tuple(tuple(p) for p in parts), between, moreover)


def find_gallai_partition(col: Colouring) -> GallaiSearch:
    """Find a Gallai partition of col, preferring one where every base colour
    covers at least n-1 inter-part edges.

    Tries every candidate base set (all singletons of used colours, then all
    pairs); for each, the components of the non-base edges are coarsened to
    the finest partition with monochromatic part pairs. Returns no partition
    only alongside a rainbow-triangle witness, or with heuristic_failure set
    (never observed: the base-set enumeration plus finest coarsening is
    complete whenever a partition exists).
    """
    if col.n < 2:
        raise PreconditionViolation("need n >= 2")
    tri = find_rainbow_triangle(col)
    if tri is not None:
        return GallaiSearch(None, rainbow_triangle=tri)
    used = sorted({int(c) for c in col.matrix[np.triu_indices(col.n, k=1)]})
    candidates: list[set[int]] = [{c} for c in used]
    candidates += [{used[i], used[j]} for i in range(len(used) - 1)
                   for j in range(i + 1, len(used))]
    fallback: GallaiPartition | None = None
    for base in candidates:
        parts = _components_avoiding(col, base)
        if len(parts) < 2:
            continue
        parts2 = _finest_mono_coarsening(col, parts)
        if parts2 is None:
            continue
        partition = _build_partition(col, parts2)
        if partition.moreover_holds:
            return GallaiSearch(partition)
        if fallback is None:
            fallback = partition
    if fallback is not None:
        return GallaiSearch(fallback)
    return GallaiSearch(None, heuristic_failure=True)


def verify_gallai_partition(col: Colouring, p: GallaiPartition) -> bool:
    """Independent re-verification: scans every inter-part edge."""
    flat = [v for part in p.parts for v in part]
    if sorted(flat) != list(range(1, col.n + 1)):
        return False
    if len(p.parts) < 2 or any(not part for part in p.parts):
        return False
    if len(p.base_colours) > 2:
        return False
    for i in range(len(p.parts) - 1):
        for j in range(i + 1, len(p.parts)):
            want = p.between_colour.get((i, j))
            if want is None or want not in p.base_colours:
                return False
            for u in p.parts[i]:
                for v in p.parts[j]:
                    if col.colour_of(u, v) != want:
                        return False
    return True


def partition_lines(p: GallaiPartition) -> list[str]:
    line = "PARTITION base=" + ",".join(str(c) for c in sorted(p.base_colours))
    for part in p.parts:
        line += " part=" + ",".join(str(v) for v in part)
    return [line]


# ---------------------------------------------------------------------------
# Certificate replay
# ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    ok: bool
    failed_step: int | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_certificate(cert, col: Colouring, seq: DistributionSequence) -> VerificationReport:
    """Replay cert from a single block [1..n], checking every step precondition,
    that budgets never go negative, that the realised colouring matches col
    edge-for-edge, and that the final counts equal seq."""
    if not (cert.n == col.n == seq.n):
        raise StructuralMismatch(f"n mismatch: cert={cert.n} colouring={col.n} seq={seq.n}")
    if not (cert.k == col.k == seq.k):
        raise StructuralMismatch(f"k mismatch: cert={cert.k} colouring={col.k} seq={seq.k}")
    n, k = cert.n, cert.k
    budgets = list(seq.e)
    active: dict[int, int] = {1: n} if n >= 2 else {}
    realized = np.zeros((n, n), dtype=np.int32)
    for idx, step in enumerate(cert.steps, start=1):
        lo, hi, t, colour = step.lo, step.hi, step.t, step.colour
        if active.get(lo) != hi:
            return VerificationReport(False, idx, f"no active block [{lo}..{hi}]")
        size = hi - lo + 1
        if size < 2:
            return VerificationReport(False, idx, f"block size {size} < 2")
        if not 1 <= t <= size // 2:
            return VerificationReport(False, idx, f"t={t} outside [1..{size // 2}]")
        if not 1 <= colour <= k:
            return VerificationReport(False, idx, f"colour {colour} outside [1..{k}]")
        need = t * (size - t)
        if budgets[colour - 1] < need:
            return VerificationReport(
                False, idx,
                f"budget violation: colour {colour} has {budgets[colour - 1]} < {need}")
        budgets[colour - 1] -= need
        realized[lo - 1:hi - t, hi - t:hi] = colour
        realized[hi - t:hi, lo - 1:hi - t] = colour
        del active[lo]
        if size - t >= 2:
            active[lo] = hi - t
        if t >= 2:
            active[hi - t + 1] = hi
    if active:
        return VerificationReport(False, None, f"{len(active)} blocks left uncoloured")
    if any(b != 0 for b in budgets):
        return VerificationReport(False, None, f"unconsumed budgets {budgets}")
    if not np.array_equal(realized, col.matrix):
        diff = np.argwhere(realized != col.matrix)
        u, v = int(diff[0][0]) + 1, int(diff[0][1]) + 1
        return VerificationReport(
            False, None,
            f"edge ({min(u, v)},{max(u, v)}): certificate gives "
            f"{int(realized[u - 1, v - 1])}, colouring has {int(col.matrix[u - 1, v - 1])}")
    return VerificationReport(True)
