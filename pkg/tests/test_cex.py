import json

import numpy as np
import pytest

from conftest import instance_path
from stochinv import (CexSearchParams, check_cop, load_instance, random_instance,
                      search_cop_violations, search_grid, serialize_instance,
                      solve, v_monotonicity_report)

COMMITTED = CexSearchParams(seed=3, budget=1000)


@pytest.fixture(scope="module")
def committed_violations():
    return search_cop_violations(COMMITTED)


class TestCommittedSeed:
    def test_exactly_one_violation(self, committed_violations):
        assert [(v.index, v.period) for v in committed_violations] == [(886, 2)]

    def test_witness_and_ordering_set(self, committed_violations):
        violation = committed_violations[0]
        assert violation.report.violation_witness == (492, 493)
        assert violation.report.ordering_set[-1] == (493, 493)
        assert len(violation.report.ordering_set) == 2

    def test_instance_parameters(self, committed_violations):
        instance = committed_violations[0].instance
        assert instance.B == 88
        assert instance.K == pytest.approx(154.61238528162968, abs=1e-12)
        assert instance.p == pytest.approx(27.404524893212898, abs=1e-12)
        assert instance.v == 0.0
        assert instance.h == 1.0
        supports = [d.support for d in instance.demands]
        assert supports == [
            (71, 125, 215, 245),
            (57, 139, 242, 244),
            (16, 170, 197, 265),
            (13, 137, 247, 250),
        ]

    def test_replay_is_byte_identical(self, committed_violations):
        replay = search_cop_violations(COMMITTED)
        first = json.dumps(serialize_instance(committed_violations[0].instance))
        second = json.dumps(serialize_instance(replay[0].instance))
        assert first == second

    def test_order_advantage_dips_at_the_witness(self, committed_violations):
        violation = committed_violations[0]
        tables = solve(violation.instance, search_grid(violation.instance))
        assert v_monotonicity_report(tables, violation.period) == ((492, 492),)


class TestGeneratorContract:
    def test_draws_respect_the_ranges(self):
        params = CexSearchParams(seed=77, budget=0)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(77)))
        for _ in range(1000):
            instance = random_instance(params, rng)
            assert instance.horizon == 4
            assert instance.v == 0.0
            assert instance.h == 1.0
            assert 1.0 <= instance.K <= 500.0
            assert 1.0 <= instance.p <= 30.0
            assert isinstance(instance.B, int)
            assert 20 <= instance.B <= 200
            for demand in instance.demands:
                values = np.asarray(demand.support)
                assert values.size == 4
                assert len(set(values.tolist())) == 4
                assert (values < instance.B).sum() == 1
                big = values[values > instance.B]
                assert big.size == 3
                assert big.max() <= 300
                assert np.asarray(demand.probs).sum() == pytest.approx(1.0)

    def test_equal_masses_option(self):
        params = CexSearchParams(seed=5, budget=0, equal_masses=True)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(5)))
        instance = random_instance(params, rng)
        for demand in instance.demands:
            np.testing.assert_allclose(demand.probs, 0.25)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            CexSearchParams(seed=0, budget=-1)
        with pytest.raises(ValueError):
            CexSearchParams(seed=0, budget=1, K_range=(10.0, 1.0))
        with pytest.raises(ValueError):
            CexSearchParams(seed=0, budget=1, B_range=(20, 400), support_max=300)
        with pytest.raises(ValueError):
            CexSearchParams(seed=0, budget=1, points_per_pmf=1)


class TestMonotonicityReport:
    def test_single_period_instances_never_dip(self):
        params = CexSearchParams(seed=11, budget=0, horizon=1)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(11)))
        for _ in range(25):
            instance = random_instance(params, rng)
            tables = solve(instance, search_grid(instance))
            assert v_monotonicity_report(tables, 1) == ()


class TestKnownViolatorRegression:
    def test_spiky_instance_is_flagged(self):
        instance = load_instance(instance_path("spiky_nonstationary.json"))
        tables = solve(instance, search_grid(instance))
        report = check_cop(tables, 1, from_state=tables.exact_from(1))
        assert not report.holds
        assert report.violation_witness == (615, 616)
        assert report.ordering_set[-1] == (616, 618)
