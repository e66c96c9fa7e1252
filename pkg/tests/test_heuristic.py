import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochinv import (ModifiedSSPolicy, apply_modified_ss, extract_thresholds,
                      modified_ss_from_tables)

TOP_PAIRS = {
    35: ((46, 81), (64, 99), (61, 96), (28, 49)),
    65: ((14, 70), (35, 100), (55, 109), (28, 49)),
    71: ((13, 84), (34, 105), (55, 109), (28, 49)),
    math.inf: ((15, 67), (28, 49), (55, 109), (28, 49)),
}


class TestTopPairSelection:
    @pytest.mark.parametrize("B", sorted(TOP_PAIRS, key=str))
    def test_seasonal(self, seasonal_tables, B):
        policy = modified_ss_from_tables(seasonal_tables[B])
        expected = TOP_PAIRS[B]
        assert policy.s == tuple(s for s, _ in expected)
        assert policy.S == tuple(S for _, S in expected)
        assert policy.cop_violated == ()

    def test_discounted_lumpy(self, lumpy_tables):
        policy = modified_ss_from_tables(lumpy_tables)
        assert policy.s[0] == 5
        assert policy.S[0] == 12
        assert policy.cop_violated == ()


class TestFallbackOnViolation:
    def test_spiky_first_period(self, spiky_tables):
        policy = modified_ss_from_tables(spiky_tables)
        assert policy.cop_violated == (1,)
        # the topmost ordering run wins: its highest state and its target
        assert policy.s[0] == 618
        assert policy.S[0] == 618 + 41
        for period in (2, 3, 4):
            floor = spiky_tables.exact_from(period)
            entry = extract_thresholds(spiky_tables, period, from_state=floor)
            assert policy.s[period - 1] == entry.pairs[-1][0]
            assert policy.S[period - 1] == entry.pairs[-1][1]


class TestApplyRule:
    def test_orders_at_the_reorder_point(self):
        assert apply_modified_ss(5, 5, 20, 100) == 15

    def test_idle_just_above(self):
        assert apply_modified_ss(6, 5, 20, 100) == 0

    def test_capacity_saturates(self):
        assert apply_modified_ss(-30, 5, 20, 40) == 40

    def test_unbounded_capacity(self):
        assert apply_modified_ss(-30, 5, 20, math.inf) == 50

    @given(
        x=st.integers(-200, 200),
        s=st.integers(-50, 50),
        gap=st.integers(1, 80),
        B=st.integers(1, 100),
    )
    @settings(max_examples=200, deadline=None)
    def test_bounds(self, x, s, gap, B):
        S = s + gap
        q = apply_modified_ss(x, s, S, B)
        assert 0 <= q <= B
        assert (q == 0) == (x > s)
        if q:
            assert x + q <= S


class TestPolicyValidation:
    def test_lengths_must_match(self):
        with pytest.raises(ValueError):
            ModifiedSSPolicy(s=(1, 2), S=(5,))

    def test_none_entries_pair_up(self):
        with pytest.raises(ValueError):
            ModifiedSSPolicy(s=(1, None), S=(5, 9))

    def test_reorder_below_target(self):
        with pytest.raises(ValueError):
            ModifiedSSPolicy(s=(7,), S=(7,))

    def test_valid_policy_with_idle_period(self):
        policy = ModifiedSSPolicy(s=(1, None), S=(5, None))
        assert policy.s[1] is None
