import random
from fractions import Fraction
from math import comb

import pytest

from gallaikit.core import (
    DistributionSequence,
    TargetGraph,
    balanced_sequence,
    colour_counts,
)
from gallaikit.constructor import (
    SplitState,
    StageConstants,
    batch_steps,
    construct,
    construct_greedy,
    construct_mindeg3,
    construct_mindeg3_trace,
    construct_staged,
    cushion,
    drain_with_cushion,
    read_certificate,
    realize_certificate,
    reduce_large,
    simple_step,
    standard_step,
    write_certificate,
)
from gallaikit.errors import (
    BatchInfeasible,
    BudgetExceeded,
    CushionTooSmall,
    NotConstructed,
    PreconditionViolation,
    StagedInfeasible,
    TooLargeT,
)
from gallaikit.bounds import triangle_hard_sequence
from gallaikit.oracle import is_realizable_standard
from gallaikit.verifier import (
    find_rainbow_subgraph,
    find_rainbow_triangle,
    verify_certificate,
)

from conftest import random_sequence


class TestStandardStep:
    def test_arithmetic(self):
        st = SplitState.synthetic([6], [9, 6])
        standard_step(st, 1, 2, 1)
        assert st.budgets == [1, 6]
        assert sorted(st.blocks.items()) == [(1, 4), (5, 6)]

    def test_too_large_t(self):
        st = SplitState.synthetic([5], [10])
        with pytest.raises(TooLargeT):
            standard_step(st, 1, 3, 1)

    def test_budget_exceeded(self):
        st = SplitState.synthetic([6], [7, 8])
        with pytest.raises(BudgetExceeded):
            standard_step(st, 1, 2, 1)

    def test_conservation_after_any_legal_step(self, rng):
        # state {K5, K3, K2} with budgets summing to 10+3+1 = 14
        for _ in range(50):
            budgets = [0, 0, 0]
            for _ in range(14):
                budgets[rng.randint(0, 2)] += 1
            st = SplitState.synthetic([5, 3, 2], budgets)
            moves = []
            for lo, hi in st.blocks.items():
                size = hi - lo + 1
                for t in range(1, size // 2 + 1):
                    for c in range(1, 4):
                        if budgets[c - 1] >= t * (size - t):
                            moves.append((lo, t, c))
            if not moves:
                continue
            lo, t, c = rng.choice(moves)
            standard_step(st, lo, t, c)
            assert st.conservation_holds()


class TestSimpleStep:
    def test_colours_m_minus_one(self):
        st = SplitState.synthetic([7], [21])
        simple_step(st, 1, 1)
        assert st.budgets == [15]

    def test_block_of_two_dissolves(self):
        st = SplitState.synthetic([2], [1])
        simple_step(st, 1, 1)
        assert st.done

    def test_budget_short_by_one(self):
        st = SplitState.synthetic([5, 2], [3, 8])
        with pytest.raises(BudgetExceeded):
            simple_step(st, 1, 1)


class TestCushion:
    def test_example(self):
        st = SplitState.synthetic([5, 3, 2], [14])
        assert cushion(st, 1) == comb(3, 2) + comb(2, 2)  # 3 + 1 = 4

    def test_single_block(self):
        st = SplitState.synthetic([6], [15])
        assert cushion(st, 1) == 0

    def test_two_equal_blocks(self):
        st = SplitState.synthetic([4, 4], [12])
        assert cushion(st, 1) == 6
        assert cushion(st, 5) == 6


class TestReduceLarge:
    def test_balanced_example(self):
        st = SplitState.synthetic([12], [22, 22, 22])
        reduce_large(st, 1)
        assert st.block_size(1) == 5  # 2k - 1 for k = 3

    def test_exactly_2k_takes_one_step(self):
        st = SplitState.synthetic([6], [10, 4, 1])
        reduce_large(st, 1)
        assert st.block_size(1) == 5

    def test_below_2k_is_noop(self):
        st = SplitState.synthetic([5], [5, 4, 1])
        reduce_large(st, 1)
        assert st.block_size(1) == 5 and not st.steps


class TestDrainWithCushion:
    def test_k2_example(self):
        st = SplitState.synthetic([4, 2], [6, 1])
        drain_with_cushion(st, 1)
        assert 1 not in st.blocks
        assert len(st.steps) == 3

    def test_k3_all_splits_of_18(self):
        # state {K6, K3}: cushion 3 = min{(9-3)/2, 18}; every budget split works
        for a in range(19):
            for b in range(19 - a):
                c = 18 - a - b
                st = SplitState.synthetic([6, 3], [a, b, c])
                drain_with_cushion(st, 1)
                assert 1 not in st.blocks

    def test_cushion_zero_rejected(self):
        st = SplitState.synthetic([4], [6, 0])
        with pytest.raises(CushionTooSmall):
            drain_with_cushion(st, 1)

    def test_fuzz_never_fails_when_precondition_holds(self, rng):
        # randomized states: a main block plus filler blocks providing cushion
        trials = 100_000
        done = 0
        while done < trials:
            k = rng.randint(2, 8)
            m = rng.randint(2, 20)
            need = min((k * k - k) // 2, k * m)
            filler = []
            pool = 0
            while pool < need:
                s = rng.randint(2, 9)
                filler.append(s)
                pool += comb(s, 2)
            total = comb(m, 2) + pool
            budgets = [0] * k
            for _ in range(total):
                budgets[rng.randint(0, k - 1)] += 1
            st = SplitState.synthetic([m] + filler, budgets)
            drain_with_cushion(st, 1)  # must not raise
            assert 1 not in st.blocks
            done += 1


class TestBatchSteps:
    def test_capacity_example(self):
        st = SplitState.synthetic([20, 4, 4], [100, 60, 42])
        out = batch_steps(st, 1, 1, 5, [1, 2, 3])
        assert len(out) == 5
        assert st.block_size(1) == 15

    def test_boundary_is_infeasible(self):
        # sum of budgets exactly t*n'*(count+k) must be rejected
        st = SplitState.synthetic([20], [100, 40, 20, 30])
        assert sum(st.budgets[j - 1] for j in (1, 2, 3)) == 160 == 1 * 20 * (5 + 3)
        with pytest.raises(BatchInfeasible):
            batch_steps(st, 1, 1, 5, [1, 2, 3])

    def test_count_zero_noop(self):
        st = SplitState.synthetic([20], [190])
        assert batch_steps(st, 1, 2, 0, [1]) == []
        assert not st.steps

    def test_block_too_small(self):
        st = SplitState.synthetic([10], [45])
        with pytest.raises(BatchInfeasible):
            batch_steps(st, 1, 2, 5, [1])


class TestConstructGreedy:
    def test_k3_three_singles_infeasible(self):
        res = construct_greedy(3, DistributionSequence.of(3, (1, 1, 1)))
        assert res.status == "infeasible"

    def test_n4_two_colours(self):
        seq = DistributionSequence.of(4, (3, 3))
        res = construct_greedy(4, seq)
        assert res.status == "certificate"
        assert colour_counts(realize_certificate(res.certificate)) == [3, 3]

    def test_single_colour(self):
        seq = DistributionSequence.of(6, (15,))
        res = construct_greedy(6, seq)
        assert res.status == "certificate"
        assert all(s.colour == 1 for s in res.certificate.steps)

    def test_agrees_with_standard_oracle(self, rng):
        for _ in range(60):
            n = rng.randint(2, 6)
            k = rng.randint(1, 3)
            seq = random_sequence(rng, n, k)
            greedy = construct_greedy(n, seq).status
            assert (greedy == "certificate") == is_realizable_standard(seq)

    def test_certificates_replay(self, rng):
        for _ in range(30):
            n = rng.randint(2, 10)
            k = rng.randint(1, 6)
            seq = random_sequence(rng, n, k)
            res = construct_greedy(n, seq)
            if res.status == "certificate":
                col = realize_certificate(res.certificate)
                assert colour_counts(col) == list(seq.e)
                assert verify_certificate(res.certificate, col, seq).ok


class TestConstructStaged:
    def test_desk_scale_balanced(self):
        sc = StageConstants(beta=Fraction(60))
        k = 10
        n = sc.upper_n(k)
        assert n == 1250
        seq = balanced_sequence(n, k)
        cert = construct_staged(n, seq, sc)
        col = realize_certificate(cert)
        assert colour_counts(col) == list(seq.e)
        assert verify_certificate(cert, col, seq).ok
        assert cert.metadata["case"] == "2"
        assert cert.metadata["r"] == "4"

    def test_case1_path(self):
        # two huge colours concentrate > 0.1 of all edges, so J1 is non-empty
        # and carries enough capacity for the fixed-size cushion steps
        sc = StageConstants(beta=Fraction(60))
        k = 10
        n = sc.upper_n(k)
        total = comb(n, 2)
        big = (total * 2) // 5
        rest = total - 2 * big
        q, r = divmod(rest, 8)
        seq = DistributionSequence.of(n, (big, big) + (q,) * (8 - r) + (q + 1,) * r)
        cert = construct_staged(n, seq, sc)
        assert cert.metadata["case"] == "1"
        col = realize_certificate(cert)
        assert colour_counts(col) == list(seq.e)
        assert verify_certificate(cert, col, seq).ok

    def test_hard_sequence_must_fail(self):
        # the skewed sequence admits no Gallai colouring, so no standard
        # colouring either; both constructors have to refuse
        seq, p = triangle_hard_sequence(1000)
        with pytest.raises(StagedInfeasible):
            construct_staged(p.n, seq, StageConstants())
        assert construct_greedy(p.n, seq).status == "infeasible"

    def test_small_n_infeasible(self):
        seq = balanced_sequence(5, 3)
        with pytest.raises(StagedInfeasible):
            construct_staged(5, seq, StageConstants())

    def test_rejects_bad_sequence(self):
        with pytest.raises(PreconditionViolation):
            construct_staged(5, DistributionSequence.of(5, (9, 0)), StageConstants())


class TestConstructMindeg3:
    def test_single_rare_edge_n4(self):
        seq = DistributionSequence.of(4, (5, 1))
        col, recs = construct_mindeg3_trace(4, seq)
        assert colour_counts(col) == [5, 1]
        assert recs[0].lo == 4 and recs[0].hi == 4
        v4_colours = sorted(col.colour_of(u, 4) for u in (1, 2, 3))
        assert v4_colours == [1, 1, 2]
        res = find_rainbow_subgraph(col, TargetGraph.complete(4))
        assert res.status == "none"

    def test_balanced_2k_no_rainbow_k4(self):
        seq = balanced_sequence(8, 4)
        col = construct_mindeg3(8, seq)
        assert colour_counts(col) == list(seq.e)
        assert find_rainbow_subgraph(col, TargetGraph.complete(4)).status == "none"

    def test_single_colour_monochromatic(self):
        col = construct_mindeg3(5, DistributionSequence.of(5, (10,)))
        assert colour_counts(col) == [10]

    def test_rejects_small_n(self):
        with pytest.raises(PreconditionViolation):
            construct_mindeg3(3, DistributionSequence.of(3, (1, 1, 1)))

    def test_peel_batches_use_two_colours_within_their_level(self, rng):
        # within the graph alive at its peel, a batch's incident edges carry
        # at most the two colours of that level
        for _ in range(25):
            k = rng.randint(1, 4)
            n = rng.randint(2 * k, 2 * k + 4)
            seq = random_sequence(rng, n, k)
            col, recs = construct_mindeg3_trace(n, seq)
            assert colour_counts(col) == list(seq.e)
            for rec in recs:
                allowed = {rec.bulk_colour, rec.rare_colour}
                for v in range(rec.lo, rec.hi + 1):
                    for u in range(1, rec.hi + 1):
                        if u != v:
                            assert col.colour_of(u, v) in allowed


class TestConstructDispatch:
    def test_k4_routes_to_mindeg3(self):
        seq = balanced_sequence(12, 3)
        res = construct(TargetGraph.complete(4), 12, seq)
        assert res.status == "ok" and res.strategy == "mindeg3"
        assert find_rainbow_subgraph(res.colouring, TargetGraph.complete(4)).status == "none"

    def test_k3_routes_to_standard(self):
        seq = DistributionSequence.of(6, (7, 8))
        res = construct(TargetGraph.complete(3), 6, seq)
        assert res.status == "ok"
        assert res.certificate is not None
        assert find_rainbow_triangle(res.colouring) is None
        assert colour_counts(res.colouring) == [7, 8]

    def test_tree_target_all_singletons_not_constructed(self):
        seq = DistributionSequence.of(6, (1,) * 15)
        with pytest.raises(NotConstructed) as exc:
            construct(TargetGraph.path(3), 6, seq)
        assert exc.value.witness is not None

    def test_infeasible_with_clash_certificate(self):
        seq = DistributionSequence.of(3, (1, 1, 1))
        res = construct(TargetGraph.complete(3), 3, seq)
        assert res.status == "infeasible"
        assert res.infeasibility is not None and res.infeasibility.verify()

    def test_pattern_too_large_is_trivial(self):
        seq = DistributionSequence.of(3, (1, 1, 1))
        res = construct(TargetGraph.complete(5), 3, seq)
        assert res.status == "ok"
        assert colour_counts(res.colouring) == [1, 1, 1]

    def test_edgeless_target_unrealisable(self):
        seq = balanced_sequence(5, 2)
        with pytest.raises(NotConstructed):
            construct(TargetGraph(3, frozenset()), 5, seq)


class TestCertificateFiles:
    def test_roundtrip(self, tmp_path):
        seq = DistributionSequence.of(7, (11, 10))
        cert = construct_greedy(7, seq).certificate
        cert.metadata["strategy"] = "greedy"
        p = tmp_path / "c.cert"
        write_certificate(cert, p)
        back = read_certificate(p)
        assert back.n == cert.n and back.k == cert.k
        assert back.steps == cert.steps
        assert back.metadata["strategy"] == "greedy"

    def test_bad_step_line(self, tmp_path):
        p = tmp_path / "c.cert"
        p.write_text("4 2\n1 4 1\n")
        with pytest.raises(ValueError):
            read_certificate(p)
