import math

import numpy as np
import pytest

from diolab.errors import ResourceBudgetError
from diolab.psi import power_log, table_psi
from diolab.regions import RegionSpec, region_measure_1d
from diolab.sampler import (
    GENERATOR_ID,
    ExperimentConfig,
    _membership_bulk,
    estimate_pairwise_intersection,
    estimate_union_measure,
    linear_forms_count,
    membership,
    mix64,
    sample_points,
    solution_count,
    solution_counts,
)


class TestGenerator:
    def test_scalar_vector_agreement(self):
        zs = np.array([0, 1, 12345, 2**63, 2**64 - 1], dtype=np.uint64)
        from diolab.sampler import _mix64_array

        vec = _mix64_array(zs.copy())
        for z, v in zip(zs.tolist(), vec.tolist()):
            assert mix64(int(z)) == int(v)

    def test_partition_invariance(self):
        whole = sample_points(99, 0, 1000, 3)
        parts = np.vstack(
            [sample_points(99, 0, 123, 3), sample_points(99, 123, 777, 3), sample_points(99, 777, 1000, 3)]
        )
        assert np.array_equal(whole, parts)

    def test_unit_interval_and_spread(self):
        pts = sample_points(5, 0, 50_000, 2)
        assert pts.min() >= 0.0 and pts.max() < 1.0
        assert abs(pts.mean() - 0.5) < 0.01

    def test_seed_sensitivity(self):
        assert not np.array_equal(sample_points(1, 0, 10, 2), sample_points(2, 0, 10, 2))

    def test_frozen_stream_head(self):
        # regression pin of the stream: draws 0..2 of seed 0, dim 1
        got = sample_points(0, 0, 3, 1).ravel()
        want = np.array(
            [mix64((k + 1) * 0x9E3779B97F4A7C15 & (2**64 - 1)) >> 11 for k in range(3)]
        ) * 2.0**-53
        assert np.array_equal(got, want)


class TestMembership:
    def test_zero_psi_never_member(self):
        f = power_log(0, 0, 0)
        assert not membership([0.3], 5, f)
        assert not membership([0.5, 0.5], 2, f)

    def test_examples(self):
        assert membership([1 / 3], 3, table_psi([0, 0, 0.1]))
        assert membership([0.5, 0.5], 2, table_psi([0, 1e-6]))

    def test_max_mode(self):
        f = table_psi([0.2])
        # (max dist)**2 < 0.2 needs max < 0.4472
        assert not membership([0.5, 0.1], 1, f, mode="max")
        assert membership([0.42, 0.1], 1, f, mode="max")

    def test_coprime_implies_plain(self):
        rng = np.random.default_rng(21)
        f = power_log(0.5, 0.7, 0)
        for _ in range(300):
            q = int(rng.integers(1, 200))
            x = [float(v) for v in rng.random(2)]
            if membership(x, q, f, coprime=True):
                assert membership(x, q, f, coprime=False)

    def test_bulk_matches_scalar(self):
        rng = np.random.default_rng(22)
        f = power_log(0.5, 0.5, 0)
        xs = rng.random((500, 2))
        for q in (1, 2, 7, 12, 36, 97):
            psi_q = f(q)
            for coprime in (False, True):
                for mode in ("product", "max"):
                    bulk = _membership_bulk(xs, q, psi_q, mode, coprime)
                    for i in range(0, 500, 37):
                        assert bulk[i] == membership(
                            list(xs[i]), q, f, mode=mode, coprime=coprime
                        )

    def test_strictness(self):
        f = table_psi([0.25])
        # dist(1, 0.25) = 0.25 exactly: strict fails, non-strict holds
        assert not membership([0.25], 1, f, strict=True)
        assert membership([0.25], 1, f, strict=False)


class TestEstimateUnion:
    def test_zero_family_exact_zero(self):
        cfg = ExperimentConfig(family=power_log(0, 0, 0), n=1, Q=16, samples=100, seed=1)
        for _, est in estimate_union_measure(cfg):
            assert est.value == 0.0
            assert est.provenance == "exact"
            assert est.ci_width == 0.0

    def test_covering_slice(self):
        cfg = ExperimentConfig(family=table_psi([0.6]), n=1, Q=1, samples=3000, seed=2)
        [(_, est)] = estimate_union_measure(cfg)
        assert est.value == 1.0

    def test_ci_covers_exact_single_slice(self):
        exact = region_measure_1d(RegionSpec(12, 1, 0.1, coprime=True)).value
        f = table_psi([0] * 11 + [0.1])
        cfg = ExperimentConfig(family=f, n=1, coprime=True, Q0=12, Q=12, samples=50_000, seed=3)
        [(_, est)] = estimate_union_measure(cfg)
        assert est.ci_low <= exact <= est.ci_high

    def test_checkpoint_monotone(self):
        cfg = ExperimentConfig(family=power_log(0.25, 1, 0), n=1, coprime=True, Q=128, samples=4000, seed=4)
        vals = [e.value for _, e in estimate_union_measure(cfg)]
        assert vals == sorted(vals)

    def test_worker_count_invariance(self):
        cfg = ExperimentConfig(
            family=power_log(0.25, 1, 0), n=2, coprime=True, Q0=2, Q=64, samples=5000, seed=5
        )
        runs = [estimate_union_measure(cfg, workers=w) for w in (1, 3, 4, 16)]
        for other in runs[1:]:
            assert other == runs[0]

    def test_coverage_of_exact_value(self):
        # 95% CI covers the exact slice measure in >= 90% of seeded trials
        exact = region_measure_1d(RegionSpec(12, 1, 0.1, coprime=True)).value
        f = table_psi([0] * 11 + [0.1])
        covered = 0
        trials = 40
        for seed in range(trials):
            cfg = ExperimentConfig(
                family=f, n=1, coprime=True, Q0=12, Q=12, samples=2500, seed=seed
            )
            [(_, est)] = estimate_union_measure(cfg)
            covered += est.ci_low <= exact <= est.ci_high
        assert covered >= int(0.9 * trials)

    def test_generator_metadata_recorded(self):
        cfg = ExperimentConfig(family=power_log(0.3, 1, 0), n=1, Q=8, samples=200, seed=9)
        _, est = estimate_union_measure(cfg)[-1]
        assert est.generator == GENERATOR_ID
        assert est.seed == 9


class TestPairwise:
    def test_zero_family(self):
        est = estimate_pairwise_intersection(3, 5, power_log(0, 0, 0), 1, samples=500, seed=0)
        assert est.value == 0.0

    def test_q_equals_r_idempotent(self):
        f = power_log(0.5, 0.5, 0)
        single = estimate_pairwise_intersection(7, 7, f, 1, samples=20_000, seed=1)
        cfg = ExperimentConfig(family=f, n=1, Q0=7, Q=7, samples=20_000, seed=1)
        [(_, union)] = estimate_union_measure(cfg)
        assert single.value == union.value

    def test_bounded_by_singles(self):
        f = power_log(0.25, 1, 0)
        est = estimate_pairwise_intersection(4, 9, f, 1, samples=50_000, seed=2)
        m4 = region_measure_1d(RegionSpec(4, 1, f(4))).value
        m9 = region_measure_1d(RegionSpec(9, 1, f(9))).value
        assert est.value <= min(m4, m9) + 3 * est.ci_width

    def test_quasi_independent_neighbours(self):
        # intersection of the q=100 and q=101 slices stays within a bounded
        # multiple of the product of the exact single-slice measures
        from diolab.regions import product_region_measure_coprime

        f = power_log(0.25, 1, 0)
        est = estimate_pairwise_intersection(
            100, 101, f, 2, coprime=True, samples=200_000, seed=7
        )
        m_q = product_region_measure_coprime(100, 2, f(100)).value
        m_r = product_region_measure_coprime(101, 2, f(101)).value
        assert est.value <= 10.0 * m_q * m_r


class TestSolutionCount:
    def test_even_q_example(self):
        assert solution_count([0.5], table_psi([0.3] * 10), 10) == 5

    def test_zero_family(self):
        assert solution_count([0.5], power_log(0, 0, 0), 10) == 0

    def test_rational_point_floor_bound(self):
        # x = p/b hits distance zero at every multiple of b
        f = table_psi([1e-9] * 100)
        for b, num in [(3, 1), (7, 2), (10, 9)]:
            x = num / b
            assert solution_count([x], f, 100) >= 100 // b

    def test_curve_matches_pointwise(self):
        f = power_log(0.4, 0.8, 0)
        x = [0.137, 0.731]
        for Q, c in solution_counts(x, f, [1, 5, 25, 80], coprime=True):
            assert c == solution_count(x, f, Q, coprime=True)

    def test_strict_vs_nonstrict(self):
        f = table_psi([0.5])
        assert solution_count([0.5], f, 1, strict=False) == 1
        assert solution_count([0.5], f, 1, strict=True) == 0


class TestLinearForms:
    def test_zero_psi(self):
        assert linear_forms_count(np.array([[0.5]]), lambda q: 0.0, 10) == 0

    def test_half_point_example(self):
        f = table_psi([0.3] * 10)
        assert linear_forms_count(np.array([[0.5]]), f, 10) == 10

    def test_m1_halving_symmetry(self):
        f = power_log(0.4, 0.7, 0)
        X = np.array([[0.358]])
        for coprime in (False, True):
            lf = linear_forms_count(X, f, 25, coprime=coprime)
            sc = solution_count([0.358], f, 25, coprime=coprime)
            assert lf == 2 * sc

    def test_m2_brute_force(self):
        # independent brute force over both q components and numerators
        X = np.array([[0.3, 0.7], [0.51, 0.12]])
        psi = lambda q: 0.05
        got = linear_forms_count(X, psi, 3)
        count = 0
        for q1 in range(-3, 4):
            for q2 in range(-3, 4):
                if q1 == 0 and q2 == 0:
                    continue
                y = np.array([q1, q2]) @ X
                prod = 1.0
                for yi in y:
                    prod *= min(abs(yi + p) for p in range(-5, 6))
                if prod < 0.05:
                    count += 1
        assert got == count

    def test_budget(self):
        with pytest.raises(ResourceBudgetError):
            linear_forms_count(np.array([[0.5, 0.5]]), lambda q: 1.0, 10**6)


def test_config_round_trip_and_hash():
    cfg = ExperimentConfig(
        family=power_log(0.25, 1, 0), n=2, coprime=True, Q0=3, Q=50, samples=100, seed=17
    )
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg
    assert again.config_hash() == cfg.config_hash()


def test_config_validation():
    f = power_log(1, 1, 0)
    with pytest.raises(ValueError):
        ExperimentConfig(family=f, n=0, Q=10, samples=10, seed=0)
    with pytest.raises(ValueError):
        ExperimentConfig(family=f, n=1, Q0=5, Q=4, samples=10, seed=0)
    with pytest.raises(ValueError):
        ExperimentConfig(family=f, n=1, Q=10, samples=0, seed=0)
    with pytest.raises(ValueError):
        ExperimentConfig(family=f, n=1, Q=10, samples=5, seed=0, q_grid=(4, 2))
    with pytest.raises(ValueError):
        ExperimentConfig(family=f, n=1, Q=10, samples=5, seed=0, q_grid=(2, 20))
