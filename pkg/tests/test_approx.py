"""Dilation plans, patch strings, randomized and two-stage constructions."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucycle.core import verify_cover, window
from ucycle.approx import (
    janson_bound,
    linear_missing,
    patch_sequence,
    plan_dilation,
    smallest_prime_above,
    type1_construct,
    type2_random,
)


class TestDilationPlan:
    def test_small_pair_s1(self):
        plan = plan_dilation((0, 1), 1)
        assert plan.p == 17  # smallest prime above 2*2*(1+3) = 16
        assert plan.min_gap >= 1

    def test_small_pair_s4(self):
        assert plan_dilation((0, 1), 4).p == 29  # above 2*2*7 = 28

    def test_singleton_degenerate(self):
        plan = plan_dilation((5,), 3)
        assert plan.k == 1 and plan.min_gap == plan.p

    def test_gap_is_attained(self):
        plan = plan_dilation((0, 3, 11), 5)
        residues = sorted(plan.k * i % plan.p for i in (0, 3, 11))
        gaps = [residues[i + 1] - residues[i] for i in range(2)]
        gaps.append(residues[0] + plan.p - residues[-1])
        assert min(gaps) == plan.min_gap >= 5

    def test_primes(self):
        assert smallest_prime_above(16) == 17
        assert smallest_prime_above(1) == 2
        assert smallest_prime_above(2) == 3


class TestPatch:
    def test_single_word(self):
        chi = patch_sequence((0, 1), [(1, 1)], 2)
        assert len(chi) == 17
        assert any(window(chi, (0, 1), t) == (1, 1) for t in range(17))

    def test_all_four_words(self):
        chi = patch_sequence((0, 1), [(0, 0), (0, 1), (1, 0), (1, 1)], 2)
        assert len(chi) == 29
        achieved = {window(chi, (0, 1), t) for t in range(29)}
        assert achieved == {(0, 0), (0, 1), (1, 0), (1, 1)}

    def test_empty_request(self):
        chi = patch_sequence((0, 1), [], 2)
        assert set(chi.symbols) == {0}

    def test_duplicate_words_rejected(self):
        with pytest.raises(ValueError):
            patch_sequence((0, 1), [(1, 1), (1, 1)], 2)

    @settings(max_examples=25, deadline=None)
    @given(st.data())
    def test_every_prescribed_word_appears(self, data):
        q = data.draw(st.sampled_from([2, 3]))
        n = data.draw(st.sampled_from([2, 3]))
        I = tuple(sorted(data.draw(st.sets(
            st.integers(0, 30), min_size=n, max_size=n))))
        count = data.draw(st.integers(1, min(6, q ** n)))
        pool = [tuple((c // q ** j) % q for j in range(n))
                for c in range(q ** n)]
        words = data.draw(st.permutations(pool))[:count]
        chi = patch_sequence(I, words, q)
        achieved = {window(chi, I, t) for t in range(len(chi))}
        assert set(map(tuple, words)) <= achieved


class TestType2:
    def test_deterministic(self):
        a = type2_random(2, 4, (0, 1, 2, 3), 64, seed=9)
        b = type2_random(2, 4, (0, 1, 2, 3), 64, seed=9)
        assert a == b

    def test_pigeonhole_lower_bound(self):
        _, missing = type2_random(2, 4, (0, 1, 2, 3), 8, seed=1)
        assert missing >= 8  # only 8 translates for 16 words

    def test_exact_missing_count(self):
        chi, missing = type2_random(2, 3, (0, 1, 2), 16, seed=3)
        achieved = {window(chi, (0, 1, 2), t) for t in range(16)}
        assert missing == 8 - len(achieved)

    def test_linear_vs_cyclic_coverage(self):
        # wrap-around windows only ever add coverage
        for seed in range(6):
            chi, cyclic_missing = type2_random(2, 4, (0, 1, 2, 3), 40,
                                               seed=seed)
            assert cyclic_missing <= linear_missing(2, 4, (0, 1, 2, 3), chi)

    def test_prefix_coupled_monotonicity(self):
        # interior coverage is non-increasing in m for a fixed seed because
        # the random stream is reused as a prefix
        I = (0, 1, 2, 3)
        seed = 5
        prev = None
        for m in (24, 32, 48, 64, 96):
            chi, _ = type2_random(2, 4, I, m, seed=seed)
            lm = linear_missing(2, 4, I, chi)
            if prev is not None:
                assert lm <= prev
            prev = lm


class TestType1:
    def test_contiguous_window(self):
        result = type1_construct(2, 6, tuple(range(6)), seed=3)
        rep = verify_cover(result.chi, (2, 6), tuple(range(6)))
        assert rep.complete
        assert len(result.chi) <= 16 * 64 * math.log(6)

    def test_noncontiguous_window(self):
        result = type1_construct(2, 4, (0, 1, 3, 9), seed=5)
        rep = verify_cover(result.chi, (2, 4), (0, 1, 3, 9))
        assert rep.complete

    def test_trivial_n1(self):
        result = type1_construct(3, 1, (0,), seed=0)
        assert result.chi.symbols == (0, 1, 2)
        rep = verify_cover(result.chi, (3, 1), (0,))
        assert rep.complete

    def test_length_at_least_word_count(self):
        result = type1_construct(2, 4, (0, 1, 2, 3), seed=2)
        assert len(result.chi) >= 2 ** 4

    def test_log_records_stages(self):
        result = type1_construct(2, 5, (0, 1, 2, 3, 4), seed=7)
        log = result.construction_log
        assert log["seed"] == 7
        assert log["total_length"] == len(result.chi)
        assert log["random_length"] == math.ceil(4 * 32 * math.log(5))


class TestRandomStageShape:
    def test_missing_fraction_tracks_tail_bound(self):
        # mean missing fraction decreases with the length factor c and stays
        # under the crude exp(-c/2) tail plus three sample deviations
        import statistics

        q, n = 2, 6
        I = tuple(range(n))
        words = q ** n
        prev_mean = 1.0
        for c in (2, 4, 8):
            fracs = [type2_random(q, n, I, c * words, seed=s)[1] / words
                     for s in range(30)]
            mean = statistics.mean(fracs)
            sd = statistics.stdev(fracs)
            assert mean <= prev_mean
            assert mean <= math.exp(-c / 2) + 3 * sd, (c, mean, sd)
            prev_mean = mean


class TestJanson:
    def test_direct_substitution(self):
        assert janson_bound(1, 1, 1) == math.exp(-1 / 8)

    def test_zero_mu(self):
        assert janson_bound(0, 1, 1) == 1.0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            janson_bound(1, 0, 1)
        with pytest.raises(ValueError):
            janson_bound(1, 1, -2)

    def test_monotone_in_m(self):
        # the standard parameterization is nonincreasing as length grows
        n, q = 4, 2
        prev = 1.1
        for m in (16, 64, 256, 1024, 4096):
            mu = m * q ** -n
            val = janson_bound(mu, n * n, n * n * q ** -n)
            assert val <= prev
            prev = val
