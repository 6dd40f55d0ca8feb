"""Standard-colouring engine: split states, step primitives, and the staged,
greedy and min-degree-3 constructors, all emitting replayable certificates.

A standard colouring step splits an uncoloured block of size m into sizes t
and m-t and paints all t(m-t) crossing edges with one colour. Blocks are
contiguous vertex intervals and a step always splits off the top t vertices,
so a certificate is replayable without a block registry.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import mpmath as mp
import numpy as np

from .core import Colouring, DistributionSequence, TargetGraph, degeneracy, is_n_good
from .errors import (
    BadSize,
    BatchInfeasible,
    BudgetExceeded,
    CushionTooSmall,
    NotConstructed,
    PreconditionViolation,
    StagedInfeasible,
    TooLargeT,
)


@dataclass(frozen=True)
class StepRecord:
    """Split the top t vertices off block [lo..hi]; colour the crossing edges."""

    lo: int
    hi: int
    t: int
    colour: int


@dataclass
class SplitCertificate:
    """Replayable log of standard colouring steps starting from {[1..n]}."""

    n: int
    k: int
    steps: list[StepRecord]
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def edges_coloured(self) -> int:
        return sum(s.t * (s.hi - s.lo + 1 - s.t) for s in self.steps)


class SplitState:
    """Live multiset of uncoloured blocks plus per-colour budgets.

    Maintains sum-of-C(size,2) over blocks and the budget total incrementally
    and asserts their equality after every step (the conservation relation);
    a violation would be an internal bug, not an input error.
    """

    __slots__ = ("n", "k", "budgets", "blocks", "steps",
                 "_pairs_sum", "_budget_sum")

    def __init__(self, n: int, k: int, budgets: list[int], blocks: dict[int, int]):
        self.n = n
        self.k = k
        self.budgets = budgets
        self.blocks = blocks
        self.steps: list[StepRecord] = []
        self._pairs_sum = sum(comb(hi - lo + 1, 2) for lo, hi in blocks.items())
        self._budget_sum = sum(budgets)
        if self._pairs_sum != self._budget_sum:
            raise ValueError(
                f"blocks hold {self._pairs_sum} edges but budgets sum to {self._budget_sum}")

    @staticmethod
    def initial(n: int, e) -> "SplitState":
        budgets = [int(x) for x in e]
        blocks = {1: n} if n >= 2 else {}
        return SplitState(n, len(budgets), budgets, blocks)

    @staticmethod
    def synthetic(block_sizes: list[int], budgets: list[int]) -> "SplitState":
        """State with given block sizes laid out left to right; for fuzzing."""
        blocks: dict[int, int] = {}
        lo = 1
        for size in block_sizes:
            if size >= 2:
                blocks[lo] = lo + size - 1
            lo += size
        return SplitState(lo - 1, len(budgets), list(budgets), blocks)

    def block_size(self, lo: int) -> int:
        return self.blocks[lo] - lo + 1

    def largest_block(self) -> tuple[int, int] | None:
        """Largest active block, ties broken towards the smallest lo."""
        best = None
        best_size = 1
        for lo, hi in self.blocks.items():
            size = hi - lo + 1
            if size > best_size or (size == best_size and best is not None and lo < best[0]):
                best = (lo, hi)
                best_size = size
        return best

    @property
    def done(self) -> bool:
        return not self.blocks

    def conservation_holds(self) -> bool:
        """Recompute both sides of the conservation relation from scratch."""
        pairs = sum(comb(hi - lo + 1, 2) for lo, hi in self.blocks.items())
        return pairs == sum(self.budgets) == self._pairs_sum

    def apply_step(self, lo: int, t: int, colour: int) -> None:
        hi = self.blocks.get(lo)
        if hi is None:
            raise BadSize(f"no active block starting at {lo}")
        size = hi - lo + 1
        if size < 2:
            raise BadSize(f"block [{lo}..{hi}] has size {size} < 2")
        if not 1 <= t <= size // 2:
            raise TooLargeT(f"t={t} violates 1 <= t <= floor({size}/2) = {size // 2}")
        need = t * (size - t)
        if self.budgets[colour - 1] < need:
            raise BudgetExceeded(
                f"colour {colour}: budget {self.budgets[colour - 1]} < t(m-t) = {need}")
        self.budgets[colour - 1] -= need
        self._budget_sum -= need
        self._pairs_sum += comb(size - t, 2) + comb(t, 2) - comb(size, 2)
        del self.blocks[lo]
        if size - t >= 2:
            self.blocks[lo] = hi - t
        if t >= 2:
            self.blocks[hi - t + 1] = hi
        self.steps.append(StepRecord(lo, hi, t, colour))
        assert self._pairs_sum == self._budget_sum, "conservation broken (internal bug)"

    def undo_last_step(self) -> None:
        step = self.steps.pop()
        size = step.hi - step.lo + 1
        need = step.t * (size - step.t)
        self.budgets[step.colour - 1] += need
        self._budget_sum += need
        self._pairs_sum += comb(size, 2) - comb(size - step.t, 2) - comb(step.t, 2)
        self.blocks.pop(step.lo, None)
        self.blocks.pop(step.hi - step.t + 1, None)
        self.blocks[step.lo] = step.hi

    def to_certificate(self, metadata: dict[str, str] | None = None) -> SplitCertificate:
        return SplitCertificate(self.n, self.k, list(self.steps), dict(metadata or {}))


# ---------------------------------------------------------------------------
# Step primitives
# ---------------------------------------------------------------------------

def standard_step(state: SplitState, block_lo: int, t: int, colour: int) -> SplitState:
    """One standard colouring step of size t on the block starting at block_lo."""
    state.apply_step(block_lo, t, colour)
    return state


def simple_step(state: SplitState, block_lo: int, colour: int) -> SplitState:
    """A standard colouring step of size 1."""
    state.apply_step(block_lo, 1, colour)
    return state


def cushion(state: SplitState, block_lo: int) -> int:
    """Spare budget for a block: total budgets minus C(size,2), which equals
    the edges still held by all other blocks. Both formulas are computed and
    must agree."""
    hi = state.blocks.get(block_lo)
    if hi is None:
        raise BadSize(f"no active block starting at {block_lo}")
    size = hi - block_lo + 1
    via_budgets = sum(state.budgets) - comb(size, 2)
    via_blocks = sum(comb(h - l + 1, 2) for l, h in state.blocks.items() if l != block_lo)
    assert via_budgets == via_blocks, "cushion formulas disagree (internal bug)"
    return via_budgets


def _pick_colour(budgets: list[int], need: int, allowed=None) -> int | None:
    """Largest-budget colour with budget >= need, ties to the smallest index."""
    best = None
    best_b = need - 1
    idxs = range(1, len(budgets) + 1) if allowed is None else allowed
    for j in idxs:
        b = budgets[j - 1]
        if b > best_b:
            best = j
            best_b = b
    return best


def reduce_large(state: SplitState, block_lo: int) -> SplitState:
    """Simple steps on the block until its size drops below 2k.

    While size >= 2k some colour holds at least a 1/k share of C(size,2)
    edges, which is >= size-1, so a qualifying colour always exists.
    """
    k = state.k
    while block_lo in state.blocks and state.block_size(block_lo) >= 2 * k:
        size = state.block_size(block_lo)
        colour = _pick_colour(state.budgets, size - 1)
        assert colour is not None, \
            f"no colour with budget >= {size - 1} at size {size} >= 2k (internal bug)"
        state.apply_step(block_lo, 1, colour)
    return state


def drain_with_cushion(state: SplitState, block_lo: int) -> SplitState:
    """Fully colour a block with m-1 consecutive simple steps.

    Requires cushion >= min{(k^2-k)/2, k*m}; under that bound a colour with
    budget >= remaining_size-1 exists at every sub-step.
    """
    hi = state.blocks.get(block_lo)
    if hi is None:
        raise BadSize(f"no active block starting at {block_lo}")
    m = hi - block_lo + 1
    k = state.k
    cush = cushion(state, block_lo)
    need = min((k * k - k) // 2, k * m)
    if cush < need:
        raise CushionTooSmall(f"cushion {cush} < min{{(k^2-k)/2, k*m}} = {need}")
    for _ in range(m - 1):
        size = state.block_size(block_lo)
        colour = _pick_colour(state.budgets, size - 1)
        assert colour is not None, \
            f"drain ran out of colours at size {size} despite cushion (internal bug)"
        state.apply_step(block_lo, 1, colour)
    return state


def batch_steps(state: SplitState, block_lo: int, t: int, count: int,
                allowed_colours) -> list[tuple[int, int]]:
    """count standard steps of size t on the shrinking block, colours drawn
    from allowed_colours. Requires block size > t*count and the strict capacity
    inequality sum(budgets over allowed) > t*size*(count + |allowed|).

    Returns the split-off blocks as (lo, hi) pairs, newest last.
    """
    if count == 0:
        return []
    hi = state.blocks.get(block_lo)
    if hi is None:
        raise BadSize(f"no active block starting at {block_lo}")
    size = hi - block_lo + 1
    allowed = sorted(set(allowed_colours))
    if not (size > t * count):
        raise BatchInfeasible(f"block size {size} <= t*count = {t * count}")
    pool = sum(state.budgets[j - 1] for j in allowed)
    bound = t * size * (count + len(allowed))
    if not (pool > bound):
        raise BatchInfeasible(
            f"sum of allowed budgets {pool} <= t*n'*(count+|allowed|) = {bound}")
    out: list[tuple[int, int]] = []
    for _ in range(count):
        cur = state.block_size(block_lo)
        colour = _pick_colour(state.budgets, t * (cur - t), allowed)
        assert colour is not None, "batch capacity argument failed (internal bug)"
        top = (state.blocks[block_lo] - t + 1, state.blocks[block_lo])
        state.apply_step(block_lo, t, colour)
        out.append(top)
    return out


# ---------------------------------------------------------------------------
# Stage constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StageConstants:
    """Constants of the staged construction and of the hard-sequence bound.

    All logarithms are natural; alpha drives the lower-bound sequence, beta
    the staged split sizes. At desk scale the raw r and c are clamped into
    [1, floor(n/(3k))] and the clamp is recorded in certificate metadata.
    """

    alpha: Fraction = Fraction(1, 10)
    beta: Fraction = Fraction(5_000_000)
    log_base: str = "natural"

    def _floor_scaled(self, coeff: Fraction, k: int, power: Fraction) -> int:
        with mp.workdps(50):
            val = (mp.mpf(coeff.numerator) / coeff.denominator
                   * mp.power(k, mp.mpf(power.numerator) / power.denominator)
                   / mp.sqrt(mp.log(k)))
            return int(mp.floor(val))

    def lower_n(self, k: int) -> int:
        """floor(alpha * k^1.5 / sqrt(log k))"""
        return self._floor_scaled(self.alpha, k, Fraction(3, 2))

    def upper_n(self, k: int) -> int:
        """floor(beta * k^1.5 / sqrt(log k))"""
        return self._floor_scaled(self.beta, k, Fraction(3, 2))

    def derive(self, n: int, k: int) -> "StageDerived":
        if k < 2 or n < 2:
            raise PreconditionViolation("stage constants need n >= 2 and k >= 2")
        with mp.workdps(50):
            beta = mp.mpf(self.beta.numerator) / self.beta.denominator
            logk = mp.log(k)
            r_raw = int(mp.floor(beta * mp.sqrt(k) / (30 * mp.sqrt(logk))))
            c_raw = int(mp.floor(mp.power(k, 0.75) / mp.power(logk, 0.75)))
            cap = n // (3 * k)
            r = max(1, min(r_raw, cap) if cap >= 1 else 1)
            c = max(1, min(c_raw, cap) if cap >= 1 else 1)
            j1_threshold = beta ** 2 * mp.power(k, 2.25) / mp.power(logk, 1.25)
            j2_threshold = beta ** 2 * k * k / (30 * logk)
            stop = beta ** 0.5 * 2 * mp.power(k, 1.25) / mp.power(logk, 0.25)
            count_case1 = int(mp.ceil(mp.power(k, 0.75) * mp.power(logk, 0.25)))
            # integer cutoffs: e >= j1_threshold  <=>  e >= j1_min, etc.
            j1_min = int(mp.floor(j1_threshold)) + 1
            j2_max = int(mp.floor(j2_threshold))
            stop_below = int(mp.ceil(stop))
        return StageDerived(r_raw, c_raw, r, c, r != r_raw, c != c_raw,
                            j1_min, j2_max, stop_below, count_case1)


@dataclass(frozen=True)
class StageDerived:
    r_raw: int
    c_raw: int
    r: int
    c: int
    r_clamped: bool
    c_clamped: bool
    j1_min_budget: int
    j2_max_budget: int
    stop_below: int
    count_case1: int


# ---------------------------------------------------------------------------
# Staged constructor
# ---------------------------------------------------------------------------

def _max_step_size(x: int, budget: int) -> int:
    """Largest c with 1 <= c <= (x-1)//2 and c*(x-c) <= budget; 0 when none."""
    cap = (x - 1) // 2
    if cap < 1 or budget < x - 1:
        return 0
    disc = x * x - 4 * budget
    if disc <= 0:
        return cap
    c = (x - math.isqrt(disc)) // 2
    while c > 0 and c * (x - c) > budget:
        c -= 1
    while c + 1 <= cap and (c + 1) * (x - c - 1) <= budget:
        c += 1
    return min(c, cap)


def construct_staged(n: int, seq: DistributionSequence,
                     constants: StageConstants | None = None) -> SplitCertificate:
    """Three-stage standard colouring: a reservoir of k size-r blocks, a big
    cushion collection, then reduce-and-drain of everything.

    Raises StagedInfeasible naming the stage and inequality whenever a stage
    precondition fails at this scale; callers fall back to construct_greedy.
    """
    if seq.n != n:
        raise PreconditionViolation(f"sequence is for n={seq.n}, not {n}")
    if not is_n_good(seq):
        raise PreconditionViolation("sequence is not n-good")
    constants = constants or StageConstants()
    k = seq.k
    if k < 2:
        raise StagedInfeasible(1, "staged construction needs k >= 2")
    d = constants.derive(n, k)
    e_total = comb(n, 2)
    state = SplitState.initial(n, seq.e)
    meta = {
        "strategy": "staged",
        "alpha": str(constants.alpha),
        "beta": str(constants.beta),
        "log": constants.log_base,
        "r_raw": str(d.r_raw), "r": str(d.r), "r_clamped": str(d.r_clamped),
        "c_raw": str(d.c_raw), "c": str(d.c), "c_clamped": str(d.c_clamped),
    }

    # Stage 1: reservoir of k blocks of size r.
    try:
        reservoir = batch_steps(state, 1, d.r, k, range(1, k + 1))
    except BatchInfeasible as ex:
        raise StagedInfeasible(1, str(ex)) from ex
    meta["stage1_end"] = str(len(state.steps))

    # Stage 2: build the cushion collection.
    j1 = [j for j in range(1, k + 1) if state.budgets[j - 1] >= d.j1_min_budget]
    sum_j1 = sum(state.budgets[j - 1] for j in j1)
    cushion_blocks: list[tuple[int, int]]
    if j1 and 10 * sum_j1 >= e_total:
        meta["case"] = "1"
        try:
            cushion_blocks = batch_steps(state, 1, d.c, d.count_case1, j1)
        except BatchInfeasible as ex:
            raise StagedInfeasible(2, str(ex)) from ex
    else:
        meta["case"] = "2"
        j2 = [j for j in range(1, k + 1)
              if j not in j1 and state.budgets[j - 1] <= d.j2_max_budget]
        j3 = [j for j in range(1, k + 1) if j not in j1 and j not in j2]
        # Exhaust the small and huge colours with simple steps on the largest block.
        for j in sorted(j1 + j2, key=lambda j: (state.budgets[j - 1], j)):
            while True:
                big = state.largest_block()
                if big is None:
                    break
                size = big[1] - big[0] + 1
                if size < 2 or state.budgets[j - 1] < size - 1:
                    break
                state.apply_step(big[0], 1, j)
        # Maximal-size splitting process over the mid-range colours.
        cushion_blocks = []
        for j in j3:
            big = state.largest_block()
            if big is None:
                break
            x = big[1] - big[0] + 1
            if x < d.stop_below:
                break
            cj = _max_step_size(x, state.budgets[j - 1])
            if cj < 1:
                raise StagedInfeasible(
                    2, f"colour {j}: budget {state.budgets[j - 1]} < x-1 = {x - 1}")
            top = (big[1] - cj + 1, big[1])
            state.apply_step(big[0], cj, j)
            cushion_blocks.append(top)
    meta["stage2_end"] = str(len(state.steps))

    # Stage 3: reduce the big block, drain it, drain the cushions, then the
    # reservoir by pigeonhole.
    big = state.largest_block()
    if big is not None and big[1] - big[0] + 1 >= 2 * k:
        reduce_large(state, big[0])
    big = state.largest_block()
    if big is not None and big[0] in state.blocks:
        try:
            drain_with_cushion(state, big[0])
        except CushionTooSmall as ex:
            raise StagedInfeasible(3, f"main block: {ex}") from ex
    for lo, hi in sorted(cushion_blocks, key=lambda b: (b[0] - b[1], b[0])):
        if lo in state.blocks:
            try:
                drain_with_cushion(state, lo)
            except CushionTooSmall as ex:
                raise StagedInfeasible(3, f"cushion block [{lo}..{hi}]: {ex}") from ex
    while True:
        big = state.largest_block()
        if big is None:
            break
        size = big[1] - big[0] + 1
        colour = _pick_colour(state.budgets, size - 1)
        if colour is None:
            raise StagedInfeasible(
                3, f"reservoir pigeonhole: no colour with budget >= {size - 1}")
        state.apply_step(big[0], 1, colour)
    assert state.done and all(b == 0 for b in state.budgets)
    return state.to_certificate(meta)


# ---------------------------------------------------------------------------
# Greedy constructor
# ---------------------------------------------------------------------------

class _GiveUp(Exception):
    pass


def greedy_descent(state: SplitState) -> bool:
    """Straight-line pass: repeatedly steps on the largest block using the
    smallest sufficient budget (best fit), smallest step size first. Never
    backtracks; True when the state is fully coloured."""
    budgets = state.budgets
    k = state.k
    while True:
        big = state.largest_block()
        if big is None:
            return True
        lo, hi = big
        size = hi - lo + 1
        placed = False
        for t in range(1, size // 2 + 1):
            need = t * (size - t)
            best = 0
            best_b = -1
            for j in range(k):
                b = budgets[j]
                if b >= need and (best_b < 0 or b < best_b):
                    best = j + 1
                    best_b = b
            if best:
                state.apply_step(lo, t, best)
                placed = True
                break
        if not placed:
            return False


@dataclass
class GreedyResult:
    status: str  # "certificate" | "infeasible" | "giveup"
    certificate: SplitCertificate | None = None
    nodes: int = 0


def construct_greedy(n: int, seq: DistributionSequence,
                     node_budget: int = 500_000) -> GreedyResult:
    """Depth-first search over standard colouring steps.

    A straight-line best-fit descent is tried first; on failure the search
    backtracks over (t, colour) moves on the largest block, colours in
    decreasing budget order, memoising dead states on the (block sizes,
    budgets) multiset pair. Instances with n <= 12 are always exhausted, so
    "infeasible" is a proof there; larger instances give up past node_budget.
    """
    if seq.n != n:
        raise PreconditionViolation(f"sequence is for n={seq.n}, not {n}")
    if not is_n_good(seq):
        raise PreconditionViolation("sequence is not n-good")
    fast = SplitState.initial(n, seq.e)
    if greedy_descent(fast):
        return GreedyResult("certificate", fast.to_certificate({"strategy": "greedy"}))

    state = SplitState.initial(n, seq.e)
    budgets = state.budgets
    dead: set[tuple] = set()
    exhaustive = n <= 12
    nodes = 0

    def state_key() -> tuple:
        sizes = tuple(sorted(hi - lo + 1 for lo, hi in state.blocks.items()))
        return sizes, tuple(sorted(budgets))

    def dfs() -> bool:
        nonlocal nodes
        big = state.largest_block()
        if big is None:
            return True
        key = state_key()
        if key in dead:
            return False
        lo, hi = big
        size = hi - lo + 1
        for t in range(1, size // 2 + 1):
            need = t * (size - t)
            order = sorted(range(1, state.k + 1), key=lambda j: (-budgets[j - 1], j))
            seen_budgets: set[int] = set()
            for j in order:
                b = budgets[j - 1]
                if b < need:
                    break  # sorted descending: the rest are smaller
                if b in seen_budgets:
                    continue  # equal-budget colours are interchangeable here
                seen_budgets.add(b)
                nodes += 1
                if not exhaustive and nodes > node_budget:
                    raise _GiveUp
                state.apply_step(lo, t, j)
                if dfs():
                    return True
                state.undo_last_step()
        dead.add(key)
        return False

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 4 * n + 1000))
    try:
        found = dfs()
    except _GiveUp:
        return GreedyResult("giveup", nodes=nodes)
    finally:
        sys.setrecursionlimit(old_limit)
    if found:
        return GreedyResult("certificate", state.to_certificate({"strategy": "greedy"}), nodes)
    return GreedyResult("infeasible", nodes=nodes)


# ---------------------------------------------------------------------------
# Min-degree-3 constructor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeelRecord:
    """One peel level: vertices [lo..hi] whose incident edges within the
    surviving graph got bulk_colour except for rare_edges of rare_colour."""

    lo: int
    hi: int
    bulk_colour: int
    rare_colour: int
    rare_edges: int


def construct_mindeg3_trace(n: int, seq: DistributionSequence) -> tuple[Colouring, list[PeelRecord]]:
    """construct_mindeg3 plus the peel log used by structural checks."""
    if seq.n != n:
        raise PreconditionViolation(f"sequence is for n={seq.n}, not {n}")
    if not is_n_good(seq):
        raise PreconditionViolation("sequence is not n-good")
    live = [(e, j + 1) for j, e in enumerate(seq.e) if e > 0]
    k_eff = len(live)
    if n < 2 * k_eff:
        raise PreconditionViolation(
            f"need n >= 2k for the {k_eff} colours with positive budget; n={n}")
    matrix = np.zeros((n, n), dtype=np.int32)

    def paint(u: int, v: int, c: int) -> None:
        matrix[u - 1, v - 1] = c
        matrix[v - 1, u - 1] = c

    budgets = {j: e for e, j in live}
    active = n
    records: list[PeelRecord] = []
    while budgets and active >= 1:
        order = sorted(budgets, key=lambda j: (-budgets[j], j))
        if len(order) == 1:
            c = order[0]
            assert budgets[c] == comb(active, 2), "base fill out of balance (internal bug)"
            for u in range(1, active + 1):
                for v in range(u + 1, active + 1):
                    paint(u, v, c)
            records.append(PeelRecord(1, active, c, c, 0))
            break
        top, bot = order[0], order[-1]
        e_bot = budgets[bot]
        t = 1
        while comb(t, 2) + t * (active - t) < e_bot:
            t += 1
        f = comb(t, 2) + t * (active - t)
        lo = active - t + 1
        left = e_bot
        for u in range(1, active + 1):
            for v in range(max(u + 1, lo), active + 1):
                if left > 0:
                    paint(u, v, bot)
                    left -= 1
                else:
                    paint(u, v, top)
        budgets[top] -= f - e_bot
        assert budgets[top] > 0, "bulk colour exhausted (internal bug)"
        del budgets[bot]
        records.append(PeelRecord(lo, active, top, bot, e_bot))
        active -= t
    return Colouring(n, seq.k, matrix), records


def construct_mindeg3(n: int, seq: DistributionSequence) -> Colouring:
    """Recursive peel construction realising seq exactly; the edges incident
    to each peeled batch use at most two colours inside the graph surviving at
    that level, so no subgraph of minimum degree 3 can be rainbow."""
    return construct_mindeg3_trace(n, seq)[0]


# ---------------------------------------------------------------------------
# Realisation and dispatch
# ---------------------------------------------------------------------------

def realize_certificate(cert: SplitCertificate) -> Colouring:
    """Replay a certificate into the concrete edge colouring it describes."""
    n = cert.n
    matrix = np.zeros((n, n), dtype=np.int32)
    for step in cert.steps:
        cut = step.hi - step.t
        matrix[step.lo - 1:cut, cut:step.hi] = step.colour
        matrix[cut:step.hi, step.lo - 1:cut] = step.colour
    if n > 1 and int(matrix[~np.eye(n, dtype=bool)].min()) == 0:
        raise ValueError("certificate does not colour every edge")
    return Colouring(n, cert.k, matrix)


def _arbitrary_colouring(n: int, seq: DistributionSequence) -> Colouring:
    """Lex-order fill honouring the exact counts; no structure guaranteed."""
    matrix = np.zeros((n, n), dtype=np.int32)
    stock = [(j + 1, e) for j, e in enumerate(seq.e) if e > 0]
    it = iter(stock)
    cur, left = next(it, (0, 0))
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            while left == 0:
                cur, left = next(it)
            matrix[u - 1, v - 1] = cur
            matrix[v - 1, u - 1] = cur
            left -= 1
    return Colouring(n, seq.k, matrix)


@dataclass
class ConstructionResult:
    status: str  # "ok" | "infeasible"
    colouring: Colouring | None = None
    certificate: SplitCertificate | None = None
    strategy: str = ""
    infeasibility: object | None = None
    reasons: list[str] = field(default_factory=list)


def construct(H: TargetGraph, n: int, seq: DistributionSequence,
              strategy: str = "auto",
              constants: StageConstants | None = None,
              node_budget: int = 500_000) -> ConstructionResult:
    """Build a rainbow-H-free colouring realising seq, dispatching on the
    degeneracy of H; raises NotConstructed (with the reason chain) when no
    strategy succeeds and no infeasibility certificate applies.
    """
    from . import bounds
    from .verifier import find_rainbow_subgraph, find_rainbow_tree

    if seq.n != n:
        raise PreconditionViolation(f"sequence is for n={seq.n}, not {n}")
    if not is_n_good(seq):
        raise PreconditionViolation("sequence is not n-good")
    deg = degeneracy(H)
    k_eff = sum(1 for e in seq.e if e > 0)
    reasons: list[str] = []

    if strategy not in ("auto", "staged", "greedy", "mindeg3"):
        raise PreconditionViolation(f"unknown strategy {strategy!r}")

    if H.m > n:
        # No copy of H fits at all; any colouring with the right counts works.
        return ConstructionResult("ok", _arbitrary_colouring(n, seq),
                                  strategy="trivial-fill",
                                  reasons=[f"target has {H.m} > {n} vertices"])

    if strategy == "mindeg3":
        if deg < 3:
            raise PreconditionViolation("mindeg3 strategy needs degeneracy >= 3")
        return ConstructionResult("ok", construct_mindeg3(n, seq), strategy="mindeg3")

    if strategy == "staged":
        try:
            cert = construct_staged(n, seq, constants)
        except StagedInfeasible as ex:
            raise NotConstructed([str(ex)]) from ex
        return ConstructionResult("ok", realize_certificate(cert), cert, "staged")

    if strategy == "greedy":
        res = construct_greedy(n, seq, node_budget)
        if res.status == "certificate":
            return ConstructionResult("ok", realize_certificate(res.certificate),
                                      res.certificate, "greedy")
        reasons.append(f"greedy: {res.status}")
        return _infeasible_or_not_constructed(H, n, seq, deg, reasons, bounds)

    # auto dispatch
    if deg >= 3 and n >= 2 * k_eff:
        return ConstructionResult("ok", construct_mindeg3(n, seq), strategy="mindeg3")
    if deg >= 3:
        reasons.append(f"n={n} < 2k for mindeg3; target contains a cycle, "
                       "falling through to standard colouring")

    if deg >= 2:
        try:
            cert = construct_staged(n, seq, constants)
            return ConstructionResult("ok", realize_certificate(cert), cert, "staged")
        except StagedInfeasible as ex:
            reasons.append(str(ex))
        res = construct_greedy(n, seq, node_budget)
        if res.status == "certificate":
            return ConstructionResult("ok", realize_certificate(res.certificate),
                                      res.certificate, "greedy")
        reasons.append(f"greedy: {res.status}")
        return _infeasible_or_not_constructed(H, n, seq, deg, reasons, bounds)

    # Forests and edgeless targets: realisability is the exception, not the rule.
    tf = bounds.tree_forced_check(seq, H.m) if H.edges else None
    if tf is not None:
        return ConstructionResult("infeasible", infeasibility=tf,
                                  reasons=["every colouring with these counts "
                                           "contains a rainbow copy of the target"])
    if not H.edges:
        raise NotConstructed(
            [f"edgeless target on {H.m} <= {n} vertices is contained rainbow-ly "
             "in every colouring; no sequence is realisable"])
    # Attempt some realisation of the counts and verify it explicitly; a
    # standard colouring carries no guarantee against rainbow trees.
    res = construct_greedy(n, seq, node_budget)
    if res.status == "certificate":
        cert = res.certificate
        col = realize_certificate(cert)
        attempt = "greedy"
    else:
        reasons.append(f"greedy: {res.status}")
        cert = None
        col = _arbitrary_colouring(n, seq)
        attempt = "lex-fill"
    if H.is_tree():
        witness = find_rainbow_tree(col, H)
    else:
        hit = find_rainbow_subgraph(col, H)
        witness = hit.embedding if hit.found else None
    if witness is None:
        return ConstructionResult("ok", col, cert, attempt,
                                  reasons=["verified rainbow-free explicitly"])
    raise NotConstructed(
        reasons + [f"{attempt} colouring contains a rainbow copy of the forest target"],
        witness=witness)


def _infeasible_or_not_constructed(H, n, seq, deg, reasons, bounds) -> ConstructionResult:
    if H.m >= 3 and n >= H.m:
        cert = bounds.clash_bound_check(seq, H.m)
        if cert is not None:
            return ConstructionResult(
                "infeasible", infeasibility=cert,
                reasons=reasons + ["clash bound forces a rainbow complete graph"])
        reasons.append("clash bound inconclusive")
    raise NotConstructed(reasons)


# ---------------------------------------------------------------------------
# Certificate files
# ---------------------------------------------------------------------------

def write_certificate(cert: SplitCertificate, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{cert.n} {cert.k}\n")
        for s in cert.steps:
            f.write(f"{s.lo} {s.hi} {s.t} {s.colour}\n")
        for key in sorted(cert.metadata):
            f.write(f"# {key}={cert.metadata[key]}\n")


def read_certificate(path: str) -> SplitCertificate:
    steps: list[StepRecord] = []
    metadata: dict[str, str] = {}
    header = None
    with open(path, "r", encoding="utf-8") as f:
        for raw in f:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, val = body.split("=", 1)
                    metadata[key.strip()] = val.strip()
                continue
            parts = [int(x) for x in line.split()]
            if header is None:
                if len(parts) != 2:
                    raise ValueError(f"certificate {path}: bad header {line!r}")
                header = (parts[0], parts[1])
            else:
                if len(parts) != 4:
                    raise ValueError(f"certificate {path}: bad step {line!r}")
                steps.append(StepRecord(*parts))
    if header is None:
        raise ValueError(f"certificate {path}: empty")
    return SplitCertificate(header[0], header[1], steps, metadata)
