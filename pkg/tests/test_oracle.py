import numpy as np
import pytest

from credalfusion import (
    FUSION_OPS,
    IntervalDistribution,
    LikelihoodMatrix,
    MassFunction,
    PointDistribution,
    check_containment,
    contains_point,
    fuse_general_point,
    interval_extreme_points,
    oracle_ds_bounds,
    oracle_interval_bounds,
    sample_member_point,
)
from credalfusion.ds import general_ds_a1_belief
from credalfusion.errors import EmptyCredalSetError, SearchGuardError, StructureError
from credalfusion.oracle import ds_focusings, interval_vertices, likelihood_corners


class TestEnumeration:
    def test_interval_vertices_are_extreme_points(self):
        d = IntervalDistribution([0.1, 0.2, 0.0], [0.5, 0.6, 0.4])
        verts = interval_vertices(d.lower, d.upper)
        expected = interval_extreme_points(d)
        assert sorted(map(tuple, np.round(verts, 12))) == sorted(map(tuple, np.round(expected, 12)))

    def test_grid_adds_interior_points(self):
        d = IntervalDistribution([0.1, 0.2, 0.0], [0.5, 0.6, 0.4])
        verts = interval_vertices(d.lower, d.upper, grid_step=0.05)
        assert len(verts) > len(interval_vertices(d.lower, d.upper))
        assert all(contains_point(d, v) for v in verts)

    def test_ds_focusings_count(self):
        m = MassFunction.from_subsets({(1,): 0.2, (1, 2): 0.3, (1, 2, 3): 0.5}, 3)
        pts = ds_focusings(m)
        assert len(pts) <= 6
        assert all(contains_point(m, p) for p in pts)

    def test_likelihood_corners(self):
        lik = LikelihoodMatrix([[0.1, 0.2], [0.5, 1.0]], [[0.3, 0.2], [0.5, 1.0]])
        corners = likelihood_corners(lik)
        # column products of the endpoint choices, deduplicated
        assert {tuple(np.round(c, 12)) for c in corners} == {(0.05, 0.2), (0.15, 0.2)}


class TestOracleBounds:
    def test_context_interval_example(self, machine_interval):
        o = oracle_interval_bounds("context", machine_interval)
        np.testing.assert_allclose(o.lower, [0.3036, 0.0572], atol=1e-4)
        np.testing.assert_allclose(o.upper, [0.9428, 0.6964], atol=1e-4)
        assert o.corner_count > 0 and o.runtime >= 0

    def test_degenerate_point_inputs(self, sensor_points):
        o = oracle_interval_bounds("general", [IntervalDistribution.from_point(p) for p in sensor_points])
        expected = fuse_general_point(sensor_points).probs
        np.testing.assert_allclose(o.lower, expected)
        np.testing.assert_allclose(o.upper, expected)

    def test_general_ds_matches_a1_belief(self, sensor_masses):
        o = oracle_ds_bounds("general", sensor_masses)
        np.testing.assert_allclose(o.lower[1:], general_ds_a1_belief(sensor_masses)[1:], atol=1e-9)

    def test_vacuous_inputs(self):
        v = MassFunction.vacuous(3)
        o = oracle_ds_bounds("general", [v, v])
        assert np.all(o.lower[1:7] == 0.0)
        assert o.lower[7] == pytest.approx(1.0)

    def test_context_ds_example(self, machine_ds):
        o = oracle_ds_bounds("context", machine_ds)
        assert o.lower[1] == pytest.approx(0.3036, abs=1e-4)

    def test_guards(self):
        d = IntervalDistribution(np.zeros(4), np.ones(4))
        with pytest.raises(SearchGuardError):
            oracle_interval_bounds("general", [d, d])
        with pytest.raises(StructureError):
            oracle_interval_bounds("sideways", [d, d])


class TestSampling:
    def test_deterministic(self):
        d = IntervalDistribution([0.1, 0.2, 0.0], [0.5, 0.6, 0.4])
        np.testing.assert_array_equal(sample_member_point(d, 7).probs, sample_member_point(d, 7).probs)

    def test_point_degenerate(self):
        d = IntervalDistribution([0.3, 0.7], [0.3, 0.7])
        np.testing.assert_allclose(sample_member_point(d, 0).probs, [0.3, 0.7])

    def test_vacuous_ds(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            assert contains_point(MassFunction.vacuous(3), sample_member_point(MassFunction.vacuous(3), rng))

    def test_samples_are_members(self):
        rng = np.random.default_rng(1)
        d = IntervalDistribution([0.05, 0.1, 0.2, 0.0], [0.5, 0.4, 0.6, 0.3])
        m = MassFunction.from_subsets({(1,): 0.2, (2, 3): 0.3, (1, 2, 3, 4): 0.5}, 4)
        for _ in range(1000):
            assert contains_point(d, sample_member_point(d, rng))
            assert contains_point(m, sample_member_point(m, rng))

    def test_point_model(self):
        p = PointDistribution([0.2, 0.8])
        np.testing.assert_allclose(sample_member_point(p, 0).probs, [0.2, 0.8])

    def test_empty_after_tightening(self):
        with pytest.raises(EmptyCredalSetError):
            sample_member_point(IntervalDistribution([0.6, 0.6], [0.7, 0.7]), 0)


class TestCheckContainment:
    def test_dempster_counterexample_found(self, ignorant_pair):
        report = check_containment("dempster", ignorant_pair, trials=1000, seed=1)
        assert not report.passed
        assert report.violation_count > 0
        bad = report.violations[0]
        assert len(bad["members"]["inputs"]) == 2
        assert "violation" in report.summary()
        assert not FUSION_OPS["dempster"].guaranteed

    def test_a2_passes(self, sensor_masses):
        assert check_containment("ds-a2", sensor_masses, trials=300, seed=2).passed

    def test_point_ops(self, machine_point, sensor_points):
        prior, lik = machine_point
        assert check_containment("point-context", (prior, LikelihoodMatrix.from_points(lik)), trials=20).passed
        assert check_containment("point-general", sensor_points, trials=20).passed

    def test_unknown_op(self):
        with pytest.raises(StructureError):
            check_containment("averaging", [], trials=1)
