import random
from math import comb
from pathlib import Path

import pytest

from gallaikit.core import DistributionSequence, TargetGraph, colour_counts
from gallaikit.constructor import construct_greedy
from gallaikit.errors import PreconditionViolation
from gallaikit.oracle import (
    REALIZABLE,
    UNREALIZABLE,
    exact_g,
    is_realizable,
    is_realizable_standard,
    n_good_multisets,
)
from gallaikit.verifier import find_rainbow_subgraph

from conftest import random_sequence

K3 = TargetGraph.complete(3)
FIXTURES = Path(__file__).parent / "fixtures"


class TestIsRealizable:
    def test_three_singletons_k3(self):
        assert is_realizable(DistributionSequence.of(3, (1, 1, 1)), K3).status == UNREALIZABLE

    def test_two_colours_always_triangle_free(self):
        res = is_realizable(DistributionSequence.of(4, (3, 3)), K3)
        assert res.status == REALIZABLE

    def test_n5_witness_verified(self):
        seq = DistributionSequence.of(5, (4, 3, 3))
        res = is_realizable(seq, K3)
        assert res.status == REALIZABLE
        assert colour_counts(res.colouring) == list(seq.e)
        assert find_rainbow_subgraph(res.colouring, K3).status == "none"

    def test_witnesses_always_check_out(self, rng):
        for _ in range(30):
            n = rng.randint(3, 6)
            k = rng.randint(1, 3)
            seq = random_sequence(rng, n, k)
            res = is_realizable(seq, K3)
            if res.status == REALIZABLE:
                assert colour_counts(res.colouring) == list(seq.e)
                assert find_rainbow_subgraph(res.colouring, K3).status == "none"

    def test_single_edge_target_never_realizable(self):
        # one edge is always a rainbow copy of a single-edge target
        K2 = TargetGraph.complete(2)
        assert is_realizable(DistributionSequence.of(3, (2, 1)), K2).status == UNREALIZABLE
        assert is_realizable(DistributionSequence.of(3, (3,)), K2).status == UNREALIZABLE

    def test_general_kernel_matches_specialised(self, rng):
        # a path target exercises the generic re-search path
        P4 = TargetGraph.path(4)
        for _ in range(10):
            seq = random_sequence(rng, 4, 2)
            res = is_realizable(seq, P4)
            assert res.status in (REALIZABLE, UNREALIZABLE)
            if res.status == REALIZABLE:
                assert find_rainbow_subgraph(res.colouring, P4).status == "none"

    def test_budget_yields_inconclusive(self):
        seq = DistributionSequence.of(6, (5, 5, 5))
        res = is_realizable(seq, K3, node_budget=5)
        assert res.status == "inconclusive"

    def test_symmetry_pruning_soundness(self, rng):
        for _ in range(50):
            n = rng.randint(3, 5)
            k = rng.randint(1, 4)
            seq = random_sequence(rng, n, k)
            with_sym = is_realizable(seq, K3, use_symmetry=True).status
            without = is_realizable(seq, K3, use_symmetry=False).status
            assert with_sym == without

    def test_requires_n_good(self):
        with pytest.raises(PreconditionViolation):
            is_realizable(DistributionSequence.of(4, (3, 4)), K3)


class TestExactG:
    def test_two_colours_all_realizable(self):
        rep = exact_g(K3, 2, 6)
        assert not rep.partial
        for n in rep.per_n:
            assert rep.all_realizable(n)
        assert rep.least_all_realizable_from == 2

    def test_k3_table_and_mandatory_entry(self):
        rep = exact_g(K3, 3, 6)
        verdicts = {row.e: row.status for row in rep.per_n[3]}
        assert verdicts[(1, 1, 1)] == UNREALIZABLE
        assert rep.all_realizable(5) and rep.all_realizable(6)
        assert not rep.all_realizable(3) and not rep.all_realizable(4)

    def test_table_matches_committed_fixture(self):
        rep = exact_g(K3, 3, 6)
        lines = ["# target=k3 k=3 n_max=6"]
        for n in sorted(rep.per_n):
            lines.append(f"# n={n}")
            lines.extend(rep.table_lines(n))
        fixture = (FIXTURES / "realizability_k3_k3_n6.txt").read_text().splitlines()
        assert lines == fixture

    def test_multiset_enumeration_counts(self):
        # descending multisets of C(4,2)=6 into at most 3 parts
        assert len(list(n_good_multisets(4, 3))) == 7
        assert len(list(n_good_multisets(4, 1))) == 1


class TestIsRealizableStandard:
    def test_three_singletons(self):
        assert not is_realizable_standard(DistributionSequence.of(3, (1, 1, 1)))

    def test_n4_balanced_three(self):
        # exhaustively false and cross-checked against the greedy constructor
        seq = DistributionSequence.of(4, (2, 2, 2))
        assert not is_realizable_standard(seq)
        assert construct_greedy(4, seq).status == "infeasible"

    def test_single_colour_always(self, rng):
        for n in (2, 5, 9):
            assert is_realizable_standard(DistributionSequence.of(n, (comb(n, 2),)))

    def test_agrees_with_greedy(self, rng):
        for _ in range(80):
            n = rng.randint(2, 8)
            k = rng.randint(1, 4)
            seq = random_sequence(rng, n, k)
            std = is_realizable_standard(seq)
            greedy = construct_greedy(n, seq).status
            assert std == (greedy == "certificate")
