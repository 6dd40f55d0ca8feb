"""Infeasibility and forcing certificates from exact lower-bound arithmetic.

Every certificate stores the parameters and margin needed to re-evaluate its
inequality from scratch; rational parts are exact, and the one logarithm that
appears is enclosed from above with a recorded error width, so a reported
certificate is rigorous up to that enclosure.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import mpmath as mp

from .core import (
    Colouring,
    DistributionSequence,
    TargetGraph,
    balanced_sequence,
    is_n_good,
)
from .constructor import StageConstants
from .errors import HeuristicFailure, NotGallai, PreconditionViolation, RangeError
from .verifier import Embedding, find_gallai_partition, find_rainbow_triangle

KIND_RAINBOW_KM = "RainbowKmForced"
KIND_TREE = "TreeForced"
KIND_TRIANGLE_HARD = "TriangleHardSequence"

_KIND_TOKENS = {
    KIND_RAINBOW_KM: "RAINBOWKM",
    KIND_TREE: "TREEFORCED",
    KIND_TRIANGLE_HARD: "TRIANGLEHARD",
}
_TOKEN_KINDS = {v: k for k, v in _KIND_TOKENS.items()}

# Log enclosures use a fixed dyadic grid; width 4 ulps at 2^-80 generously
# covers the evaluation error of a 50-digit log.
_LOG_SCALE = 1 << 80
_LOG_SLACK = 4


def _log_upper(num: int, den: int) -> tuple[Fraction, Fraction]:
    """Rational upper bound for log(num/den) plus the enclosure width."""
    with mp.workdps(50):
        val = mp.log(mp.mpf(num)) - mp.log(mp.mpf(den))
        lower = Fraction(int(mp.floor(val * _LOG_SCALE)), _LOG_SCALE)
    width = Fraction(_LOG_SLACK, _LOG_SCALE)
    return lower + width, width


@dataclass
class InfeasibilityCertificate:
    """Machine-checkable arithmetic witness; verify() re-evaluates the stored
    inequality from the stored parameters alone."""

    kind: str
    k: int
    n: int
    m: int
    a: int  # TriangleHard: a; RainbowKm: sum of C(e_i,2); Tree: max budget
    b: int
    c: int
    margin: Fraction
    log_error: Fraction = Fraction(0)

    def verify(self) -> bool:
        if self.margin <= 0 and self.kind != KIND_TREE:
            return False
        if self.kind == KIND_RAINBOW_KM:
            rhs = Fraction(self.n * (self.n - 1) * (self.n - 2),
                           self.m * (self.m - 1) * (self.m - 2))
            return self.a < rhs and self.margin == rhs - self.a
        if self.kind == KIND_TREE:
            d = tree_threshold(self.m)
            want = Fraction(comb(self.n, 2), d) - self.a
            return want >= 0 and self.margin == want
        if self.kind == KIND_TRIANGLE_HARD:
            seq, params = triangle_hard_sequence(self.k)
            if (params.n, params.a, params.b, params.c) != (self.n, self.a, self.b, self.c):
                return False
            fresh = triangle_infeasibility_check(self.k)
            return fresh is not None and fresh.margin == self.margin
        return False

    def inequality_text(self) -> str:
        if self.kind == KIND_RAINBOW_KM:
            return (f"sum C(e_i,2) = {self.a} < n(n-1)(n-2)/(m(m-1)(m-2)) = "
                    f"{self.n * (self.n - 1) * (self.n - 2)}/{self.m * (self.m - 1) * (self.m - 2)}")
        if self.kind == KIND_TREE:
            return (f"max e_i = {self.a} <= C({self.n},2)/(6m)^(6m) with m={self.m}")
        return (f"b^2/3 - 4(a+1)log(n/b) >= {self.margin} > 0 "
                f"with n={self.n} a={self.a} b={self.b} c={self.c}")

    def to_line(self) -> str:
        return " ".join(str(x) for x in (
            _KIND_TOKENS[self.kind], self.k, self.n, self.m, self.a, self.b, self.c,
            self.margin.numerator, self.margin.denominator, self.log_error))

    @staticmethod
    def from_line(line: str) -> "InfeasibilityCertificate":
        parts = line.split()
        if len(parts) != 10 or parts[0] not in _TOKEN_KINDS:
            raise ValueError(f"bad certificate line: {line!r}")
        kind = _TOKEN_KINDS[parts[0]]
        k, n, m, a, b, c = (int(x) for x in parts[1:7])
        margin = Fraction(int(parts[7]), int(parts[8]))
        log_error = Fraction(parts[9])
        return InfeasibilityCertificate(kind, k, n, m, a, b, c, margin, log_error)


def write_infeasibility(cert: InfeasibilityCertificate, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(cert.to_line() + "\n")
        f.write(f"# {cert.inequality_text()}\n")


def read_infeasibility(path: str, reverify: bool = True) -> InfeasibilityCertificate:
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.strip() for ln in f if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError(f"certificate file {path}: empty")
    cert = InfeasibilityCertificate.from_line(lines[0])
    if reverify and not cert.verify():
        raise ValueError(f"certificate file {path}: failed re-verification")
    return cert


# ---------------------------------------------------------------------------
# Clash bound: too few monochromatic edge pairs forces a rainbow K_m.
# ---------------------------------------------------------------------------

def clash_bound_check(seq: DistributionSequence, m: int) -> InfeasibilityCertificate | None:
    """If sum C(e_i,2) < n(n-1)(n-2)/(m(m-1)(m-2)) strictly, every colouring
    with these counts contains a rainbow K_m, so seq is infeasible for any
    target on m vertices. Returns None (no conclusion) otherwise."""
    n = seq.n
    if not (n >= m >= 3):
        raise PreconditionViolation(f"need n >= m >= 3, got n={n}, m={m}")
    lhs = sum(comb(e, 2) for e in seq.e)
    rhs = Fraction(n * (n - 1) * (n - 2), m * (m - 1) * (m - 2))
    if lhs < rhs:
        return InfeasibilityCertificate(KIND_RAINBOW_KM, seq.k, n, m,
                                        lhs, 0, 0, rhs - lhs)
    return None


def sample_rainbow_km(col: Colouring, m: int, trials: int,
                      rng: random.Random | None = None) -> Embedding | None:
    """Uniform random m-subsets; returns the first that induces a rainbow K_m,
    or None after the given trials (inconclusive, not a proof of absence)."""
    if m > col.n:
        raise PreconditionViolation(f"m={m} exceeds n={col.n}")
    rng = rng or random.Random(0)
    M = col.matrix
    pairs = comb(m, 2)
    verts = list(range(col.n))
    for _ in range(trials):
        u = sorted(rng.sample(verts, m))
        seen = set()
        ok = True
        for i in range(m - 1):
            for j in range(i + 1, m):
                c = int(M[u[i], u[j]])
                if c in seen:
                    ok = False
                    break
                seen.add(c)
            if not ok:
                break
        if ok and len(seen) == pairs:
            return Embedding(tuple(v + 1 for v in u))
    return None


# ---------------------------------------------------------------------------
# The hard sequence for triangle targets, and its infeasibility margin.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HardSequenceParams:
    n: int
    a: int
    b: int
    c: int


def triangle_hard_sequence(k: int, constants: StageConstants | None = None
                           ) -> tuple[DistributionSequence, HardSequenceParams]:
    """The skewed distribution on n = floor(alpha k^1.5 / sqrt(log k)) vertices:
    c entries of a+1, then ceil(k/2)-c entries of a, then floor(k/2) entries of b.

    Raises RangeError naming the failing quantity when k is too small for the
    derived a to be non-negative.
    """
    if k < 3:
        raise RangeError("k", k)
    constants = constants or StageConstants()
    n = constants.lower_n(k)
    if n < 2:
        raise RangeError("n", n)
    total = comb(n, 2)
    b = k // 2
    half_up = (k + 1) // 2
    a = (total - b * (k // 2)) // half_up
    if a < 0:
        raise RangeError("a", a)
    c = total - b * (k // 2) - a * half_up
    e = (a + 1,) * c + (a,) * (half_up - c) + (b,) * (k // 2)
    seq = DistributionSequence(n, k, e)
    assert is_n_good(seq), "hard sequence must be n-good by construction"
    return seq, HardSequenceParams(n, a, b, c)


def triangle_infeasibility_check(k: int, constants: StageConstants | None = None
                                 ) -> InfeasibilityCertificate | None:
    """Evaluate the margin b^2/3 - 4(a+1)log(n/b) > 0 together with the side
    conditions (5b^2 >= k^2, 4(a+1) <= 5a, a*ceil(k/2) <= C(n,2), n <= bk) in
    exact arithmetic, rounding the log against the certificate.

    A certificate asserts no Gallai colouring of K_n realises the hard
    sequence, hence forcing a rainbow triangle.
    """
    seq, p = triangle_hard_sequence(k, constants)
    n, a, b, c = p.n, p.a, p.b, p.c
    if not 5 * b * b >= k * k:
        return None
    if not 4 * (a + 1) <= 5 * a:
        return None
    if not a * ((k + 1) // 2) <= comb(n, 2):
        return None
    if not n <= b * k:
        return None
    log_up, width = _log_upper(n, b)
    margin = Fraction(b * b, 3) - 4 * (a + 1) * log_up
    if margin <= 0:
        return None
    return InfeasibilityCertificate(KIND_TRIANGLE_HARD, k, n, 3, a, b, c,
                                    margin, width)


def smallest_certified_k(k_max: int = 1000,
                         constants: StageConstants | None = None) -> int | None:
    """First k whose full side-condition chain verifies; found by scanning."""
    for k in range(3, k_max + 1):
        try:
            if triangle_infeasibility_check(k, constants) is not None:
                return k
        except RangeError:
            continue
    return None


# ---------------------------------------------------------------------------
# Tree forcing
# ---------------------------------------------------------------------------

def tree_threshold(m: int) -> int:
    """Exact (6m)^(6m) as an arbitrary-precision integer."""
    if m < 2:
        raise PreconditionViolation("need m >= 2")
    return (6 * m) ** (6 * m)


def tree_forced_check(seq: DistributionSequence, m: int) -> InfeasibilityCertificate | None:
    """If every colour is used at most C(n,2)/(6m)^(6m) times, every colouring
    with these counts contains a rainbow copy of every m-vertex tree."""
    if m < 2:
        raise PreconditionViolation("need m >= 2")
    max_e = max(seq.e)
    return _tree_forced(seq.n, seq.k, m, max_e)


def balanced_tree_forced_check(n: int, k: int, m: int) -> InfeasibilityCertificate | None:
    """tree_forced_check for the balanced sequence on (n, k), computed from the
    maximum entry alone so that astronomically long sequences need not be
    materialised."""
    if m < 2:
        raise PreconditionViolation("need m >= 2")
    q, r = divmod(comb(n, 2), k)
    max_e = q + (1 if r else 0)
    return _tree_forced(n, k, m, max_e)


def _tree_forced(n: int, k: int, m: int, max_e: int) -> InfeasibilityCertificate | None:
    d = tree_threshold(m)
    bound = Fraction(comb(n, 2), d)
    if max_e <= bound:
        return InfeasibilityCertificate(KIND_TREE, k, n, m, max_e, 0, 0,
                                        bound - max_e)
    return None


# ---------------------------------------------------------------------------
# The balanced sequence that forces a rainbow K_m at n = floor(k/m^3).
# ---------------------------------------------------------------------------

def general_lower_sequence(H: TargetGraph, k: int
                           ) -> tuple[DistributionSequence, int, InfeasibilityCertificate]:
    """Balanced sequence at n = floor(k/m^3) with the clash-bound certificate
    that it forces a rainbow K_m (m = H's vertex count)."""
    m = H.m
    if m < 3:
        raise PreconditionViolation("need a target on at least 3 vertices")
    n = k // m ** 3
    if n < 1 or comb(n, 2) < k:
        raise RangeError("C(n,2)", comb(n, 2) if n >= 1 else 0)
    seq = balanced_sequence(n, k)
    cert = clash_bound_check(seq, m)
    if cert is None:
        raise RangeError("clash bound margin", 0)
    return seq, m, cert


# ---------------------------------------------------------------------------
# Splitting process: iterated Gallai-partition peeling.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeelStep:
    x_before: int
    t: int
    x_after: int
    base_colours: tuple[int, ...]
    base_edges: int   # inter edges coloured by base colours at this peel
    base_freq: int    # total edges of the base colours inside the block


@dataclass
class PeelTrace:
    start_n: int
    stop: int
    steps: list[PeelStep] = field(default_factory=list)

    @property
    def total_base_edges(self) -> int:
        return sum(s.base_edges for s in self.steps)

    def sizes_consistent(self) -> bool:
        x = self.start_n
        for s in self.steps:
            if s.x_before != x or s.x_after != x - s.t or 2 * s.t > s.x_before:
                return False
            x = s.x_after
        return x <= self.stop or not self.steps


def peel_splitting_process(col: Colouring, stop: int,
                           freq_cap: int | None = None) -> PeelTrace:
    """Repeatedly find a Gallai partition of the current block, peel its
    smallest part, and record sizes, base colours, and base-colour counts,
    until at most `stop` vertices remain.

    When freq_cap is given and the base colours' total frequency inside the
    current block is at most freq_cap, the peel size obeys t <= 2*freq_cap/x,
    which is asserted on the trace.
    """
    if stop < 1:
        raise PreconditionViolation("stop must be >= 1")
    tri = find_rainbow_triangle(col)
    if tri is not None:
        raise NotGallai(tri)
    active = list(range(1, col.n + 1))
    trace = PeelTrace(col.n, stop)
    while len(active) > stop:
        sub = col.induced(active)
        out = find_gallai_partition(sub)
        if out.rainbow_triangle is not None:
            w = out.rainbow_triangle
            raise NotGallai(Embedding(tuple(active[v - 1] for v in w.vertices)))
        if out.partition is None:
            raise HeuristicFailure(
                f"no partition found on a {len(active)}-vertex Gallai block")
        p = out.partition
        smallest = min(p.parts, key=lambda part: (len(part), part))
        x = len(active)
        t = len(smallest)
        base = tuple(sorted(p.base_colours))
        base_freq = 0
        M = sub.matrix
        for i in range(x - 1):
            for j in range(i + 1, x):
                if int(M[i, j]) in p.base_colours:
                    base_freq += 1
        step = PeelStep(x, t, x - t, base, t * (x - t), base_freq)
        if freq_cap is not None and base_freq <= freq_cap:
            assert Fraction(t) <= Fraction(2 * freq_cap, x), \
                f"peel size bound violated: t={t} > 2*{freq_cap}/{x}"
        trace.steps.append(step)
        peeled = {active[v - 1] for v in smallest}
        active = [v for v in active if v not in peeled]
    return trace
