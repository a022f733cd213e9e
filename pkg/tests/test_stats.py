"""Sampling determinism, per-input reports, experiment aggregation."""

from __future__ import annotations

import math

import pytest

from hermite_lab import (
    HERMITE_GROWTH_RATE,
    HERMITE_PROPORTION,
    LEVY_RATE,
    ExperimentConfig,
    HermiteLabError,
    analyze_theta,
    convergence_table,
    parse_real,
    run_experiment,
    sample_thetas,
)
from hermite_lab.stats import auto_precision_bits

GOLDEN = parse_real("(1+1*sqrt(5))/2")
Q21 = parse_real("(-3+1*sqrt(21))/6")


class TestSampler:
    def test_deterministic(self):
        a = sample_thetas(1, 3, 256)
        b = sample_thetas(1, 3, 256)
        assert a == b

    def test_in_unit_interval(self):
        for spec in sample_thetas(9, 20, 256):
            assert 0 < spec.value < 1
            assert spec.declared_bits == 256

    def test_seed_changes_output(self):
        assert sample_thetas(1, 3, 256) != sample_thetas(2, 3, 256)

    def test_text_matches_value(self):
        from fractions import Fraction

        spec = sample_thetas(4, 1, 128)[0]
        digits = spec.text[2:]
        assert spec.value == Fraction(int(digits), 10 ** len(digits))


class TestAnalyze:
    def test_golden(self):
        report = analyze_theta(GOLDEN, 30)
        assert report.proportion == 1.0
        assert abs(report.levy_rate - math.log((1 + math.sqrt(5)) / 2)) < 0.02
        assert report.undecided_count == 0

    def test_alternating_quadratic(self):
        report = analyze_theta(Q21, 41)
        assert report.proportion == 0.5
        assert report.hermite_count == 20

    def test_finite_rational(self):
        report = analyze_theta(parse_real("3/8"), 50)
        assert report.depth == 5
        assert report.n_flags_decided == 4
        assert report.proportion == 1.0
        assert report.terminated

    def test_counts_are_consistent(self):
        for seed in (3, 4, 5):
            spec = sample_thetas(seed, 1, 2048)[0]
            report = analyze_theta(spec, 200)
            assert report.hermite_count <= report.n_flags_decided
            assert report.n_flags_decided + report.undecided_count == report.depth - 1

    def test_proportion_times_growth_is_levy(self):
        spec = sample_thetas(11, 1, 8192)[0]
        report = analyze_theta(spec, 2000)
        # (k/n) * (1/k) ln h_k = (1/n) ln q_{n_k} tracks (1/n) ln q_n
        product = report.proportion * report.hermite_growth
        assert abs(product - report.levy_rate) < 5 / 2000 + 0.02


class TestExperiment:
    def test_reproducible_and_sane(self):
        cfg = ExperimentConfig(sample_count=12, depth_n=150, seed=7)
        first = run_experiment(cfg)
        second = run_experiment(cfg)
        assert first.as_dict() == second.as_dict()
        assert first.rejected_count == 0
        assert abs(first.proportion.mean - HERMITE_PROPORTION) < 0.08
        assert abs(first.levy_rate.mean - LEVY_RATE) < 0.15
        assert abs(first.hermite_growth.mean - HERMITE_GROWTH_RATE) < 0.2

    def test_workers_do_not_change_the_result(self):
        cfg1 = ExperimentConfig(sample_count=6, depth_n=120, seed=3, workers=1)
        cfg2 = ExperimentConfig(sample_count=6, depth_n=120, seed=3, workers=2)
        assert run_experiment(cfg1).as_dict() == run_experiment(cfg2).as_dict()

    def test_stderr_definition(self):
        cfg = ExperimentConfig(sample_count=10, depth_n=120, seed=5)
        report = run_experiment(cfg)
        s = report.proportion
        assert abs(s.stderr - s.stddev / math.sqrt(10)) < 1e-15

    def test_insufficient_precision_rejects(self):
        cfg = ExperimentConfig(sample_count=2, depth_n=500, seed=1, precision_bits=64)
        with pytest.raises(HermiteLabError):
            run_experiment(cfg)

    def test_explicit_theta_list(self):
        cfg = ExperimentConfig(
            sample_count=2,
            depth_n=41,  # 40 decided flags: the period-two input splits evenly
            seed=0,
            theta_source=[GOLDEN, Q21],
        )
        report = run_experiment(cfg)
        assert report.reports[0].proportion == 1.0
        assert report.reports[1].proportion == 0.5

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(sample_count=0)
        with pytest.raises(ValueError):
            ExperimentConfig(sample_count=1, depth_n=5)
        with pytest.raises(ValueError):
            ExperimentConfig(sample_count=1, precision_bits=32)

    def test_auto_precision_covers_depth(self):
        assert auto_precision_bits(5000) > 5000 * 3.43


class TestConvergenceTable:
    def test_golden_all_ones_column(self):
        rows = convergence_table(GOLDEN, [10, 20, 30])
        assert [row["n"] for row in rows] == [10, 20, 30]
        assert all(row["proportion"] == 1.0 for row in rows)

    def test_empty_checkpoints(self):
        assert convergence_table(GOLDEN, []) == []

    def test_single_orbit_approaches_the_constant(self):
        spec = sample_thetas(7, 1, 8192)[0]
        rows = convergence_table(spec, [100, 1000, 2000])
        assert abs(rows[-1]["proportion"] - HERMITE_PROPORTION) < 0.05

    def test_config_mode_averages(self):
        cfg = ExperimentConfig(sample_count=4, depth_n=100, seed=13)
        rows = convergence_table(cfg, [20, 50])
        assert len(rows) == 2
        assert 0 < rows[0]["proportion"] <= 1

    def test_unsorted_checkpoints_rejected(self):
        with pytest.raises(ValueError):
            convergence_table(GOLDEN, [20, 10])
