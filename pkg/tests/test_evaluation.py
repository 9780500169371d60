"""Makespan evaluation, incremental state, and insertion scans."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neutralscape import (
    ContractError,
    EvalCounter,
    Instance,
    build_eval_state,
    makespan,
    makespan_lower_bound,
    scan_all_insertions,
    scan_insertions,
    scan_partial_insertions,
)
from neutralscape._kernels import IMPLEMENTATIONS, as_jobseq, as_ptimes

from conftest import (
    canonical_pairs,
    oracle_insert,
    oracle_makespan,
    random_instance,
)


class TestMakespan:
    def test_single_task(self):
        inst = Instance(1, 1, np.array([[5]]))
        assert makespan(inst, [0]) == 5

    def test_two_by_two_forward(self, two_by_two):
        # C00=2, C01=5, C10=6, C11=max(6,5)+1=7
        assert makespan(two_by_two, [0, 1]) == 7

    def test_two_by_two_reversed(self, two_by_two):
        # C10=4, C11=5, C00=6, C01=max(6,5)+3=9
        assert makespan(two_by_two, [1, 0]) == 9
        assert oracle_makespan(two_by_two.processing_times, [1, 0]) == 9

    def test_matches_oracle(self, rng):
        for _ in range(60):
            n = int(rng.integers(1, 8))
            m = int(rng.integers(1, 5))
            inst = random_instance(rng, n, m)
            perm = rng.permutation(n)
            assert makespan(inst, perm) == oracle_makespan(inst.processing_times, perm)

    def test_rejects_non_permutation(self, two_by_two):
        with pytest.raises(ContractError):
            makespan(two_by_two, [0, 0])
        with pytest.raises(ContractError):
            makespan(two_by_two, [0])

    def test_order_matters(self, two_by_two):
        assert makespan(two_by_two, [0, 1]) != makespan(two_by_two, [1, 0])


class TestEvalState:
    def test_fitness_matches_makespan(self, rng):
        for _ in range(30):
            inst = random_instance(rng, int(rng.integers(2, 9)), int(rng.integers(1, 5)))
            perm = rng.permutation(inst.n_jobs)
            state = build_eval_state(inst, perm)
            assert state.fitness == makespan(inst, perm)

    def test_single_cell_heads(self):
        inst = Instance(1, 1, np.array([[5]]))
        state = build_eval_state(inst, [0])
        assert state.heads.tolist() == [[0], [5]]

    def test_split_identity(self, rng):
        # heads of the first k jobs plus tails of the rest meet at the makespan
        for _ in range(20):
            n = int(rng.integers(2, 9))
            inst = random_instance(rng, n, int(rng.integers(1, 5)))
            perm = rng.permutation(n)
            state = build_eval_state(inst, perm)
            for k in range(n + 1):
                assert state.split_bound(k) == state.fitness

    def test_matrix_shapes(self, rng):
        inst = random_instance(rng, 6, 3)
        state = build_eval_state(inst, rng.permutation(6))
        assert state.heads.shape == (7, 3)
        assert state.tails.shape == (7, 3)


class TestScanInsertions:
    def test_identity_at_remove_pos(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 9))
            inst = random_instance(rng, n, int(rng.integers(1, 5)))
            perm = rng.permutation(n)
            pos = int(rng.integers(n))
            scan = scan_insertions(inst, perm, pos)
            assert scan[pos] == makespan(inst, perm)

    def test_matches_neighbor_reevaluation(self, rng):
        # every scan entry equals the naively rebuilt neighbor's makespan
        for _ in range(25):
            n = int(rng.integers(2, 8))
            inst = random_instance(rng, n, int(rng.integers(1, 5)))
            perm = list(rng.permutation(n))
            pos = int(rng.integers(n))
            scan = scan_insertions(inst, perm, pos)
            assert len(scan) == n
            for t in range(n):
                moved = oracle_insert(perm, pos, t)
                assert scan[t] == oracle_makespan(inst.processing_times, moved)

    def test_vector_length(self, rng):
        inst = random_instance(rng, 20, 5)
        scan = scan_insertions(inst, rng.permutation(20), 0)
        assert scan.shape == (20,)

    def test_remove_pos_out_of_range(self, rng):
        inst = random_instance(rng, 4, 2)
        with pytest.raises(ContractError):
            scan_insertions(inst, rng.permutation(4), 4)

    def test_full_scan_matrix(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 8))
            inst = random_instance(rng, n, int(rng.integers(1, 4)))
            perm = list(rng.permutation(n))
            scan = scan_all_insertions(inst, perm)
            assert scan.shape == (n, n)
            for a, b in canonical_pairs(n):
                moved = oracle_insert(perm, a, b)
                assert scan[a, b] == oracle_makespan(inst.processing_times, moved)
            fit = oracle_makespan(inst.processing_times, perm)
            assert all(scan[a, a] == fit for a in range(n))


class TestPartialScan:
    def test_matches_constructed_partial(self, rng):
        # inserting a held-out job anywhere in a partial schedule
        for _ in range(25):
            n = int(rng.integers(2, 8))
            inst = random_instance(rng, n, int(rng.integers(1, 4)))
            perm = list(rng.permutation(n))
            partial, job = perm[:-1], perm[-1]
            scan = scan_partial_insertions(inst, partial, job)
            assert len(scan) == len(partial) + 1
            for t in range(len(partial) + 1):
                seq = partial[:t] + [job] + partial[t:]
                assert scan[t] == oracle_makespan(inst.processing_times, seq)


class TestLowerBound:
    def test_never_exceeds_makespan(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 9))
            inst = random_instance(rng, n, int(rng.integers(1, 5)))
            bound = makespan_lower_bound(inst)
            assert bound <= makespan(inst, rng.permutation(n))

    def test_equals_max_of_load_and_length(self):
        inst = Instance(2, 2, np.array([[9, 1], [9, 1]]))
        # machine 0 load 18 beats both job lengths (10)
        assert makespan_lower_bound(inst) == 18


class TestEvalCounter:
    def test_charges_accumulate(self):
        counter = EvalCounter(budget=10)
        counter.charge(4)
        counter.charge(4)
        assert counter.used == 8
        assert not counter.exhausted()
        counter.charge(4)
        assert counter.exhausted()

    def test_unbounded_never_exhausts(self):
        counter = EvalCounter()
        counter.charge(10**9)
        assert not counter.exhausted()


class TestBackends:
    @pytest.mark.skipif(len(IMPLEMENTATIONS) < 2, reason="single backend available")
    @settings(max_examples=30, deadline=None)
    @given(data=st.data())
    def test_backends_agree(self, data):
        n = data.draw(st.integers(min_value=2, max_value=9), label="n")
        m = data.draw(st.integers(min_value=1, max_value=5), label="m")
        cells = data.draw(
            st.lists(
                st.integers(min_value=0, max_value=99),
                min_size=n * m,
                max_size=n * m,
            ),
            label="cells",
        )
        p = as_ptimes(np.array(cells).reshape(n, m))
        seq = as_jobseq(np.arange(n))
        first = IMPLEMENTATIONS["numpy"]
        second = IMPLEMENTATIONS["numba"]
        assert first["makespan"](p, seq) == second["makespan"](p, seq)
        assert np.array_equal(first["full_scan"](p, seq), second["full_scan"](p, seq))
        assert np.array_equal(
            first["remove_insert_scan"](p, seq, n // 2),
            second["remove_insert_scan"](p, seq, n // 2),
        )
