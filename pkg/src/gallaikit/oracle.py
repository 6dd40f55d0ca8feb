"""Brute-force ground truth at tiny scale: sequence realizability, exhaustive
realizability tables, and the standard-colouring decision procedure.

These searches are deliberately independent of the constructors they
cross-check; "inconclusive" is a first-class result and is never converted
to a definite no.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .core import Colouring, DistributionSequence, TargetGraph, is_n_good
from .errors import PreconditionViolation

REALIZABLE = "realizable"
UNREALIZABLE = "unrealizable"
INCONCLUSIVE = "inconclusive"


@dataclass
class OracleResult:
    status: str
    colouring: Colouring | None = None
    nodes: int = 0


class _OutOfBudget(Exception):
    pass


def _kernel_for(H: TargetGraph) -> str:
    if H.m == 3 and len(H.edges) == 3:
        return "K3"
    if H.m == 4 and len(H.edges) == 6:
        return "K4"
    if H.m == 4 and len(H.edges) == 4:
        degs = [0] * 5
        for u, v in H.edges:
            degs[u] += 1
            degs[v] += 1
        if all(d == 2 for d in degs[1:]):
            return "C4"
    return "general"


def _has_rainbow_partial(M: list[list[int]], H: TargetGraph, n: int) -> bool:
    """Embedding search over assigned (nonzero) edges only."""
    m = H.m
    back = {j: [i for i in range(1, j) if (i, j) in H.edges] for j in range(1, m + 1)}
    images = [0] * (m + 1)
    used_v = [False] * (n + 1)
    used_c: set[int] = set()

    def place(j: int) -> bool:
        if j > m:
            return True
        for u in range(1, n + 1):
            if used_v[u]:
                continue
            fresh: list[int] = []
            ok = True
            for i in back[j]:
                c = M[images[i] - 1][u - 1]
                if c == 0 or c in used_c or c in fresh:
                    ok = False
                    break
                fresh.append(c)
            if not ok:
                continue
            images[j] = u
            used_v[u] = True
            used_c.update(fresh)
            if place(j + 1):
                return True
            used_c.difference_update(fresh)
            used_v[u] = False
        return False

    return place(1)


def is_realizable(seq: DistributionSequence, H: TargetGraph,
                  node_budget: int = 5_000_000,
                  use_symmetry: bool = True) -> OracleResult:
    """Decide by exhaustive backtracking whether some rainbow-H-free colouring
    has exactly the given colour counts.

    Edges are assigned in lexicographic order with budget-feasibility pruning,
    incremental rainbow detection (specialised kernels for K3, C4 and K4), and
    canonical-order pruning of unused colours with equal budgets. The triangle
    kernel additionally propagates per-edge colour domains. A witness
    colouring is returned when realizable; exhausting node_budget yields
    inconclusive, never a definite no.
    """
    if not is_n_good(seq):
        raise PreconditionViolation("sequence is not n-good")
    n, k = seq.n, seq.k
    if H.m > n:
        from .constructor import _arbitrary_colouring
        return OracleResult(REALIZABLE, _arbitrary_colouring(n, seq))
    if not H.edges:
        # every vertex m-subset is a rainbow copy of an edgeless target
        return OracleResult(UNREALIZABLE)
    kernel = _kernel_for(H)
    if kernel == "K3":
        return _search_triangle_domains(seq, node_budget, use_symmetry)
    edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    total = len(edges)
    budgets = list(seq.e)
    usage = [0] * (k + 1)
    M = [[0] * n for _ in range(n)]
    d = len(H.edges)
    nodes = 0

    def clashes(u: int, v: int, c: int) -> bool:
        if kernel == "K4":
            others = [w for w in range(1, n + 1) if w != u and w != v]
            for ai in range(len(others) - 1):
                w1 = others[ai]
                e1 = M[w1 - 1][u - 1]
                e2 = M[w1 - 1][v - 1]
                if not e1 or not e2:
                    continue
                for w2 in others[ai + 1:]:
                    cols = (c, e1, e2, M[w2 - 1][u - 1], M[w2 - 1][v - 1],
                            M[w1 - 1][w2 - 1])
                    if 0 not in cols and len(set(cols)) == 6:
                        return True
            return False
        if kernel == "C4":
            others = [w for w in range(1, n + 1) if w != u and w != v]
            for x in others:
                vx = M[v - 1][x - 1]
                if not vx or vx == c:
                    continue
                for y in others:
                    if y == x:
                        continue
                    cols = (c, vx, M[x - 1][y - 1], M[y - 1][u - 1])
                    if 0 not in cols and len(set(cols)) == 4:
                        return True
            return False
        return False  # general kernel checks in bulk below

    def assign(idx: int) -> bool:
        nonlocal nodes
        if idx == total:
            if kernel == "general" and _has_rainbow_partial(M, H, n):
                return False
            return True
        remaining = total - idx
        for b in budgets:
            if b > remaining:
                return False
        u, v = edges[idx]
        seen_unused: set[int] = set()
        for c in range(1, k + 1):
            b = budgets[c - 1]
            if b == 0:
                continue
            if use_symmetry and usage[c] == 0:
                if b in seen_unused:
                    continue
                seen_unused.add(b)
            nodes += 1
            if nodes > node_budget:
                raise _OutOfBudget
            if clashes(u, v, c):
                continue
            M[u - 1][v - 1] = c
            M[v - 1][u - 1] = c
            budgets[c - 1] -= 1
            usage[c] += 1
            bad = kernel == "general" and (idx + 1) % d == 0 and _has_rainbow_partial(M, H, n)
            if not bad and assign(idx + 1):
                return True
            usage[c] -= 1
            budgets[c - 1] += 1
            M[u - 1][v - 1] = 0
            M[v - 1][u - 1] = 0
        return False

    try:
        hit = assign(0)
    except _OutOfBudget:
        return OracleResult(INCONCLUSIVE, nodes=nodes)
    if not hit:
        return OracleResult(UNREALIZABLE, nodes=nodes)
    return OracleResult(REALIZABLE, Colouring(n, k, np.array(M, dtype=np.int32)), nodes)


def _search_triangle_domains(seq: DistributionSequence, node_budget: int,
                             use_symmetry: bool) -> OracleResult:
    """Rainbow-triangle-free realizability with constraint propagation.

    Each uncoloured edge keeps a bitmask of admissible colours: two assigned
    edges of a triangle with distinct colours force the third into that pair.
    A colour whose remaining budget exceeds the edges still admitting it, or
    that has more forced edges than budget, prunes the branch.
    """
    n, k = seq.n, seq.k
    edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    eidx = {e: i for i, e in enumerate(edges)}
    total = len(edges)
    full = (1 << k) - 1
    domains = [full] * total
    cap = [total] * (k + 1)      # unassigned edges admitting each colour
    forced = [0] * (k + 1)       # unassigned edges whose domain is a singleton
    budgets = list(seq.e)
    usage = [0] * (k + 1)
    M = [[0] * n for _ in range(n)]
    nodes = 0

    for c in range(1, k + 1):
        if budgets[c - 1] > total:
            return OracleResult(UNREALIZABLE)
    if k == 1:
        from .constructor import _arbitrary_colouring
        return OracleResult(REALIZABLE, _arbitrary_colouring(n, seq))

    def shrink(j: int, mask: int, trail: list[tuple[int, int]]) -> bool:
        # cap/forced updates must run to completion even on failure, so that
        # restore() can undo them uniformly
        old = domains[j]
        new = old & mask
        if new == old:
            return True
        trail.append((j, old))
        domains[j] = new
        ok = new != 0
        removed = old & ~new
        while removed:
            low = removed & -removed
            removed ^= low
            c = low.bit_length()
            cap[c] -= 1
            if cap[c] < budgets[c - 1]:
                ok = False
        if new and new & (new - 1) == 0:
            c = new.bit_length()
            forced[c] += 1
            if forced[c] > budgets[c - 1]:
                ok = False
        return ok

    def restore(trail: list[tuple[int, int]]) -> None:
        while trail:
            j, old = trail.pop()
            new = domains[j]
            if new & (new - 1) == 0 and new:
                forced[new.bit_length()] -= 1
            domains[j] = old
            back = old & ~new
            while back:
                low = back & -back
                back ^= low
                cap[low.bit_length()] += 1

    def assign(idx: int) -> bool:
        nonlocal nodes
        if idx == total:
            return True
        u, v = edges[idx]
        dom = domains[idx]
        seen_unused: set[int] = set()
        choices = dom
        while choices:
            low = choices & -choices
            choices ^= low
            c = low.bit_length()
            b = budgets[c - 1]
            if b == 0:
                continue
            if use_symmetry and usage[c] == 0:
                if b in seen_unused:
                    continue
                seen_unused.add(b)
            nodes += 1
            if nodes > node_budget:
                raise _OutOfBudget
            trail: list[tuple[int, int]] = []
            # retire this edge from the unassigned pool
            pool = dom
            ok = True
            while pool:
                lw = pool & -pool
                pool ^= lw
                cc = lw.bit_length()
                cap[cc] -= 1
                if cap[cc] < budgets[cc - 1] - (1 if cc == c else 0):
                    ok = False
            if dom & (dom - 1) == 0:
                forced[c] -= 1
            M[u - 1][v - 1] = c
            M[v - 1][u - 1] = c
            budgets[c - 1] -= 1
            usage[c] += 1
            if ok:
                row_u, row_v = M[u - 1], M[v - 1]
                for w in range(1, n + 1):
                    if w == u or w == v:
                        continue
                    a = row_u[w - 1]
                    bb = row_v[w - 1]
                    if a and not bb and a != c:
                        j = eidx[(v, w) if v < w else (w, v)]
                        if not shrink(j, (1 << (a - 1)) | (1 << (c - 1)), trail):
                            ok = False
                            break
                    elif bb and not a and bb != c:
                        j = eidx[(u, w) if u < w else (w, u)]
                        if not shrink(j, (1 << (bb - 1)) | (1 << (c - 1)), trail):
                            ok = False
                            break
            if ok and assign(idx + 1):
                return True
            restore(trail)
            usage[c] -= 1
            budgets[c - 1] += 1
            M[u - 1][v - 1] = 0
            M[v - 1][u - 1] = 0
            if dom & (dom - 1) == 0:
                forced[c] += 1
            pool = dom
            while pool:
                lw = pool & -pool
                pool ^= lw
                cap[lw.bit_length()] += 1
        return False

    try:
        hit = assign(0)
    except _OutOfBudget:
        return OracleResult(INCONCLUSIVE, nodes=nodes)
    if not hit:
        return OracleResult(UNREALIZABLE, nodes=nodes)
    return OracleResult(REALIZABLE, Colouring(n, k, np.array(M, dtype=np.int32)), nodes)


# ---------------------------------------------------------------------------
# Exhaustive realizability tables
# ---------------------------------------------------------------------------

def n_good_multisets(n: int, k: int):
    """All descending k-tuples of non-negative integers summing to C(n,2)."""
    total = comb(n, 2)

    def parts(left: int, slots: int, cap: int):
        if slots == 1:
            if left <= cap:
                yield (left,)
            return
        for first in range(min(left, cap), (left + slots - 1) // slots - 1, -1):
            for rest in parts(left - first, slots - 1, first):
                yield (first,) + rest

    yield from parts(total, k, total)


@dataclass
class SequenceVerdict:
    e: tuple[int, ...]
    status: str


@dataclass
class ExactGReport:
    target: TargetGraph
    k: int
    n_max: int
    per_n: dict[int, list[SequenceVerdict]] = field(default_factory=dict)
    partial: bool = False

    def all_realizable(self, n: int) -> bool | None:
        rows = self.per_n[n]
        if any(r.status == INCONCLUSIVE for r in rows):
            return None
        return all(r.status == REALIZABLE for r in rows)

    @property
    def least_all_realizable_from(self) -> int | None:
        """Least N with every n-good sequence realizable for all n in
        [N, n_max]. Finite n_max cannot certify behaviour beyond it, so this
        is a computed observation, not a proof about larger n."""
        best = None
        for n in sorted(self.per_n, reverse=True):
            if self.all_realizable(n):
                best = n
            else:
                break
        return best

    def table_lines(self, n: int) -> list[str]:
        out = []
        for row in self.per_n[n]:
            out.append(" ".join(str(x) for x in row.e) + " " + row.status.upper())
        return out


def exact_g(H: TargetGraph, k: int, n_max: int,
            node_budget_per_seq: int = 5_000_000,
            total_node_budget: int = 200_000_000) -> ExactGReport:
    """For each n <= n_max, decide every n-good sequence (as a descending
    multiset; realizability is permutation-invariant). Budget exhaustion
    leaves inconclusive entries and flags the report as partial."""
    report = ExactGReport(H, k, n_max)
    spent = 0
    for n in range(2, n_max + 1):
        rows: list[SequenceVerdict] = []
        for e in n_good_multisets(n, k):
            seq = DistributionSequence(n, k, e)
            if spent >= total_node_budget:
                rows.append(SequenceVerdict(e, INCONCLUSIVE))
                report.partial = True
                continue
            res = is_realizable(seq, H, node_budget=node_budget_per_seq)
            spent += res.nodes
            if res.status == INCONCLUSIVE:
                report.partial = True
            rows.append(SequenceVerdict(e, res.status))
        report.per_n[n] = rows
    return report


# ---------------------------------------------------------------------------
# Standard-colouring realizability
# ---------------------------------------------------------------------------

def is_realizable_standard(seq: DistributionSequence) -> bool:
    """True iff some sequence of standard colouring steps colours all edges.

    Plain memoised recursion over (sorted block-size multiset, sorted budget
    multiset); every block, step size and budget value is tried, so this is a
    ground-truth check for the greedy constructor. Meant for n <= 12, k <= 5.
    """
    if not is_n_good(seq):
        raise PreconditionViolation("sequence is not n-good")
    memo: dict[tuple, bool] = {}

    def solve(sizes: tuple[int, ...], budgets: tuple[int, ...]) -> bool:
        if not sizes:
            return True
        key = (sizes, budgets)
        hit = memo.get(key)
        if hit is not None:
            return hit
        out = False
        for si, size in enumerate(sizes):
            if si > 0 and sizes[si - 1] == size:
                continue
            rest = sizes[:si] + sizes[si + 1:]
            for t in range(1, size // 2 + 1):
                need = t * (size - t)
                for bi, b in enumerate(budgets):
                    if b < need or (bi > 0 and budgets[bi - 1] == b):
                        continue
                    new_budgets = tuple(sorted(budgets[:bi] + budgets[bi + 1:] + (b - need,)))
                    pieces = [p for p in (size - t, t) if p >= 2]
                    new_sizes = tuple(sorted(rest + tuple(pieces)))
                    if solve(new_sizes, new_budgets):
                        out = True
                        break
                if out:
                    break
            if out:
                break
        memo[key] = out
        return out

    first = (seq.n,) if seq.n >= 2 else ()
    return solve(first, tuple(sorted(seq.e)))
