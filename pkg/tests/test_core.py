import itertools
import math

import numpy as np
import pytest

from credalfusion import (
    IntervalDistribution,
    LikelihoodMatrix,
    MassFunction,
    PointDistribution,
    belief_of,
    contains_point,
    ds_to_interval,
    extreme_point_count_formula,
    interval_extreme_points,
    interval_to_ds,
    mask_of,
    mass_from_belief,
    outcomes_of,
    plausibility_of,
    tighten_interval_distribution,
    validate_interval_distribution,
)
from credalfusion.core import (
    commonality_table,
    full_mask,
    moebius_inverse,
    search_limit,
    subset_sum,
    superset_sum,
)
from credalfusion.errors import (
    EmptyCredalSetError,
    InvalidModelError,
    NotBeliefFunctionError,
    SearchGuardError,
    StructureError,
)


def random_mass(rng, M, k=None):
    full = full_mask(M)
    k = k or int(rng.integers(1, min(6, full) + 1))
    masks = rng.choice(np.arange(1, full + 1), size=k, replace=False)
    return MassFunction(M, dict(zip(masks.tolist(), rng.dirichlet(np.ones(k)))))


class TestSubsets:
    def test_mask_round_trip(self):
        assert mask_of([1, 3], 3) == 0b101
        assert outcomes_of(0b101) == (1, 3)
        assert full_mask(4) == 15

    def test_mask_rejects_bad_outcomes(self):
        with pytest.raises(StructureError):
            mask_of([0], 3)
        with pytest.raises(StructureError):
            mask_of([4], 3)

    def test_transforms_invert(self):
        rng = np.random.default_rng(0)
        t = rng.random(16)
        np.testing.assert_allclose(moebius_inverse(subset_sum(t, 4), 4), t, atol=1e-12)

    def test_superset_sum_matches_definition(self):
        rng = np.random.default_rng(1)
        t = rng.random(8)
        expected = [sum(t[k] for k in range(8) if k & j == j) for j in range(8)]
        np.testing.assert_allclose(superset_sum(t, 3), expected)

    def test_search_limit_env(self, monkeypatch):
        monkeypatch.setenv("FUSE_MAX_SEARCH", "123")
        assert search_limit() == 123
        monkeypatch.setenv("FUSE_MAX_SEARCH", "lots")
        with pytest.raises(StructureError):
            search_limit()


class TestTypes:
    def test_point_requires_unit_sum(self):
        with pytest.raises(InvalidModelError):
            PointDistribution([0.5, 0.6])
        with pytest.raises(StructureError):
            PointDistribution([1.0])

    def test_point_is_immutable(self):
        p = PointDistribution([0.3, 0.7])
        with pytest.raises(ValueError):
            p.probs[0] = 0.5

    def test_interval_structure(self):
        with pytest.raises(StructureError):
            IntervalDistribution([0.1, 0.2], [0.5])
        with pytest.raises(StructureError):
            IntervalDistribution([0.1], [0.5])

    def test_mass_function_sparse_storage(self):
        m = MassFunction.from_subsets([((1,), 0.85), ((2,), 0.03), ((1, 2), 0.1), ((2,), 0.02)], 2)
        assert m.mass((1, 2)) == pytest.approx(0.1)
        assert m.mass((2,)) == pytest.approx(0.05)
        assert m.mass(0b10) == pytest.approx(0.05)
        assert MassFunction(2, {1: 0.5, 2: 0.5, 3: 0.0}).focal_sets() == [(1,), (2,)]

    def test_mass_function_rejects(self):
        with pytest.raises(InvalidModelError):
            MassFunction(2, {1: 0.5})
        with pytest.raises(InvalidModelError):
            MassFunction(2, {1: 1.5, 2: -0.5})
        with pytest.raises(StructureError):
            MassFunction(2, {4: 1.0})
        with pytest.raises(StructureError):
            MassFunction(25, {1: 1.0})

    def test_likelihood_matrix(self):
        lik = LikelihoodMatrix([0.2, 0.3], [0.4, 0.5])
        assert (lik.N, lik.M) == (1, 2)
        # rows are not distributions, so any values in [0, 1] are fine
        LikelihoodMatrix.from_points([[1.0, 1.0], [0.0, 0.0]])
        with pytest.raises(InvalidModelError):
            LikelihoodMatrix([[0.5, 0.5]], [[0.4, 0.6]])


class TestValidate:
    def test_machine_prior_is_valid(self):
        assert validate_interval_distribution(IntervalDistribution([0.85, 0.05], [0.95, 0.15])).ok

    def test_vacuous_is_valid(self):
        assert validate_interval_distribution(IntervalDistribution([0, 0], [1, 1])).ok

    def test_unreachable_lower_bound(self):
        report = validate_interval_distribution(IntervalDistribution([0.5, 0.0], [0.6, 0.3]))
        assert not report.ok
        assert "reachability" in report.families()
        # the upper bounds also sum to 0.9, so mass feasibility fails too
        assert "mass" in report.families()
        assert any("outcome 2" in d for f, d in report.violations if f == "reachability")

    def test_range_family(self):
        report = validate_interval_distribution(IntervalDistribution([0.6, 0.1], [0.5, 0.9]))
        assert "range" in report.families()


class TestTighten:
    def test_infeasible(self):
        with pytest.raises(EmptyCredalSetError, match="empty credal set"):
            tighten_interval_distribution([0.5, 0.0], [0.6, 0.3])
        with pytest.raises(EmptyCredalSetError):
            tighten_interval_distribution([0.6, 0.5], [0.9, 0.9])

    def test_shrinks_upper(self):
        d = tighten_interval_distribution([0.2, 0.2], [0.9, 0.9])
        np.testing.assert_allclose(d.lower, [0.2, 0.2])
        np.testing.assert_allclose(d.upper, [0.8, 0.8])

    def test_idempotent(self):
        d = IntervalDistribution([0.85, 0.05], [0.95, 0.15])
        t = tighten_interval_distribution(d)
        np.testing.assert_array_equal(t.lower, d.lower)
        np.testing.assert_array_equal(t.upper, d.upper)

    def test_member_set_unchanged_on_grid(self):
        rng = np.random.default_rng(2)
        step = 0.05
        for _ in range(20):
            M = int(rng.integers(2, 5))
            p = rng.dirichlet(np.ones(M))
            lo = np.clip(p - rng.random(M) * 0.4, 0, 1)
            up = np.clip(p + rng.random(M) * 0.4, 0, 1)
            t = tighten_interval_distribution(lo, up)
            ticks = int(round(1 / step))
            for combo in itertools.product(range(ticks + 1), repeat=M - 1):
                if sum(combo) > ticks:
                    continue
                q = np.array(list(combo) + [ticks - sum(combo)]) * step
                raw = bool(np.all(lo - 1e-9 <= q) and np.all(q <= up + 1e-9))
                assert raw == contains_point(t, q)


class TestBeliefPlausibility:
    m = MassFunction.from_subsets({(1,): 0.85, (2,): 0.05, (1, 2): 0.1}, 2)

    def test_belief(self):
        assert belief_of(self.m, (1,)) == pytest.approx(0.85)
        assert belief_of(self.m, (1, 2)) == pytest.approx(1.0)
        assert belief_of(MassFunction.vacuous(2), (1,)) == 0.0

    def test_plausibility(self):
        assert plausibility_of(self.m, (1,)) == pytest.approx(0.95)
        assert plausibility_of(self.m, (1, 2)) == pytest.approx(1.0)
        assert plausibility_of(MassFunction(2, {1: 1.0}), (2,)) == 0.0

    def test_duality(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            M = int(rng.integers(2, 6))
            m = random_mass(rng, M)
            full = full_mask(M)
            for J in range(1, full):
                assert plausibility_of(m, J) == pytest.approx(1 - belief_of(m, full ^ J), abs=1e-12)

    def test_commonality(self):
        q = commonality_table(self.m)
        assert q[0b01] == pytest.approx(0.95)
        assert q[0b11] == pytest.approx(0.1)


class TestMassFromBelief:
    def test_dempster_example(self):
        m = mass_from_belief({(1,): 0.1735, (2,): 0.1735, (1, 2): 1.0}, 2)
        assert m.mass((1,)) == pytest.approx(0.1735, abs=1e-4)
        assert m.mass((2,)) == pytest.approx(0.1735, abs=1e-4)
        assert m.mass((1, 2)) == pytest.approx(0.6530, abs=1e-4)

    def test_vacuous(self):
        m = mass_from_belief({(1, 2, 3): 1.0}, 3)
        assert dict(m.masses) == {7: 1.0}

    def test_round_trip(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            M = int(rng.integers(2, 6))
            m = random_mass(rng, M)
            back = mass_from_belief(m.belief_table(), M)
            np.testing.assert_allclose(back.table(), m.table(), atol=1e-9)

    def test_rejects_non_belief(self):
        # Bel({1}) + Bel({2}) > Bel({1,2}) is not superadditive
        with pytest.raises(NotBeliefFunctionError, match="not a belief function"):
            mass_from_belief({(1,): 0.7, (2,): 0.7, (1, 2): 1.0}, 2)
        with pytest.raises(NotBeliefFunctionError):
            mass_from_belief({(1,): 0.2, (1, 2): 0.9}, 2)

    def test_clamps_noise(self):
        m = mass_from_belief({(1,): 0.5, (2,): 0.5 + 5e-10, (1, 2): 1.0}, 2)
        assert m.mass((1, 2)) == 0.0


class TestContains:
    def test_interval(self):
        d = IntervalDistribution([0.85, 0.05], [0.95, 0.15])
        assert contains_point(d, [0.9, 0.1])
        assert not contains_point(d, [0.8, 0.2])

    def test_ds(self):
        m = MassFunction.from_subsets({(1,): 0.1, (2,): 0.1, (1, 2): 0.8}, 2)
        assert contains_point(m, PointDistribution([0.1, 0.9]))
        fused = MassFunction.from_subsets({(1,): 0.1735, (2,): 0.1735, (1, 2): 0.6530}, 2)
        assert not contains_point(fused, [0.0122, 0.9878])

    def test_dimension_mismatch(self):
        with pytest.raises(StructureError):
            contains_point(IntervalDistribution([0, 0], [1, 1]), [0.2, 0.3, 0.5])


class TestConversions:
    def test_ds_to_interval(self):
        d = ds_to_interval(MassFunction.from_subsets({(1,): 0.85, (2,): 0.05, (1, 2): 0.1}, 2))
        np.testing.assert_allclose(d.lower, [0.85, 0.05])
        np.testing.assert_allclose(d.upper, [0.95, 0.15])
        d = ds_to_interval(MassFunction.vacuous(2))
        np.testing.assert_allclose(d.lower, [0, 0])
        np.testing.assert_allclose(d.upper, [1, 1])
        d = ds_to_interval(MassFunction(2, {1: 1.0}))
        np.testing.assert_allclose(d.lower, [1, 0])
        np.testing.assert_allclose(d.upper, [1, 0])

    def test_projection_is_sound(self):
        from credalfusion.oracle import sample_member_point

        rng = np.random.default_rng(5)
        m = random_mass(rng, 4, k=6)
        d = ds_to_interval(m)
        for _ in range(1000):
            p = sample_member_point(m, rng)
            assert contains_point(m, p)
            assert contains_point(d, p)

    def test_interval_to_ds_same_credal_set(self):
        d = IntervalDistribution([0.1, 0.2, 0.3], [0.4, 0.5, 0.6])
        m = interval_to_ds(d)
        back = ds_to_interval(m)
        np.testing.assert_allclose(back.lower, d.lower, atol=1e-12)
        np.testing.assert_allclose(back.upper, d.upper, atol=1e-12)


class TestExtremePoints:
    @pytest.mark.parametrize("M", [2, 4, 6, 8])
    def test_half_width_counts(self, M):
        d = IntervalDistribution(np.zeros(M), np.full(M, 2 / M))
        pts = interval_extreme_points(d)
        assert len(pts) == math.comb(M, M // 2) == extreme_point_count_formula(M)

    def test_four_outcomes_are_indicator_pairs(self):
        pts = interval_extreme_points(IntervalDistribution(np.zeros(4), np.full(4, 0.5)))
        assert sorted(tuple(p) for p in pts) == sorted(
            tuple(0.5 * np.isin(np.arange(4), pair)) for pair in itertools.combinations(range(4), 2)
        )

    def test_large_count_formula(self):
        assert extreme_point_count_formula(20) == 184756

    def test_degenerate(self):
        pts = interval_extreme_points(IntervalDistribution([0.3, 0.7], [0.3, 0.7]))
        assert len(pts) == 1
        np.testing.assert_allclose(pts[0], [0.3, 0.7])

    def test_two_outcomes(self):
        pts = interval_extreme_points(IntervalDistribution([0.85, 0.05], [0.95, 0.15]))
        assert sorted(tuple(np.round(p, 12)) for p in pts) == [(0.85, 0.15), (0.95, 0.05)]

    def test_guard(self):
        with pytest.raises(SearchGuardError):
            interval_extreme_points(IntervalDistribution(np.zeros(11), np.ones(11)))

    def test_ds_uniform_example(self):
        m = MassFunction.from_table(np.r_[0.0, np.full(7, 1 / 7)], 3)
        bel = m.belief_table()
        for perm in itertools.permutations([4 / 7, 2 / 7, 1 / 7]):
            p = np.array(perm)
            assert contains_point(m, p)
            # extreme: prefix sums along increasing p meet the belief bound on a full chain
            order = np.argsort(p)
            mask = 0
            for j in order:
                mask |= 1 << int(j)
                assert p[[k for k in range(3) if mask >> k & 1]].sum() == pytest.approx(bel[mask])
