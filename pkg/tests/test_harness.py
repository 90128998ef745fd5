import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holder_im.gauss import critical_value
from holder_im.harness import (
    Design,
    ExperimentConfig,
    Truth,
    coverage_estimate,
    fit_curve,
    run_n_point,
    run_two_point,
    simulate_dataset,
    standard_normals,
    trial_rng,
)
from holder_im.im_core import one_point_region
from holder_im.model import Dataset, DomainError, HolderConfig
from holder_im.partial_cond import interval_for_point

Z = critical_value(0.05)


class TestConfig:
    def test_enums(self):
        e = ExperimentConfig(truth="zero", design="equispaced")
        assert e.truth is Truth.ZERO and e.design is Design.EQUISPACED

    @pytest.mark.parametrize("kw", [dict(trials=0), dict(n_points=0), dict(seed=-1),
                                    dict(n_points=3, target=3), dict(truth="cubic")])
    def test_invalid(self, kw):
        with pytest.raises((DomainError, ValueError)):
            ExperimentConfig(**kw)


class TestSimulation:
    def test_normals_are_standard(self):
        x = standard_normals(trial_rng(1, 0), 200_000)
        assert abs(x.mean()) < 0.01 and abs(x.std() - 1) < 0.01
        # tails of an inverse-CDF sampler
        assert abs(np.mean(np.abs(x) > Z) - 0.05) < 0.003

    def test_substreams_differ(self):
        a = standard_normals(trial_rng(1, 0), 4)
        b = standard_normals(trial_rng(1, 1), 4)
        assert not np.allclose(a, b)

    def test_equispaced(self):
        d = simulate_dataset(ExperimentConfig(n_points=4, design="equispaced", truth="zero"),
                             trial_rng(0, 0))
        assert d.t == (0.0, 0.25, 0.5, 0.75)

    def test_reproducible(self):
        e = ExperimentConfig(n_points=3, trials=20, seed=99)
        a, b = run_n_point(e), run_n_point(e)
        assert [(r.t, r.bounds, r.widths, r.covered) for r in a] == \
               [(r.t, r.bounds, r.widths, r.covered) for r in b]

    def test_parallel_matches_serial(self):
        e = ExperimentConfig(n_points=4, trials=12, seed=5)
        a, b = run_n_point(e, threads=1), run_n_point(e, threads=2)
        assert [(r.trial, r.point_index, r.widths) for r in a] == \
               [(r.trial, r.point_index, r.widths) for r in b]


class TestTwoPoint:
    def test_properties(self):
        recs = run_two_point(ExperimentConfig(n_points=2, trials=100, seed=1234))
        assert len(recs) == 100
        for r in recs:
            assert r.widths["marginal"] == pytest.approx(3.919928, abs=1e-6)
            assert r.widths["mixture"] <= r.widths["conservative"]
            assert r.widths["mixture"] <= r.widths["marginal"]
            assert r.point_index == 1

    def test_large_bound_branch(self):
        cfg = HolderConfig(M=4.0)
        recs = run_two_point(ExperimentConfig(n_points=2, trials=200, seed=3, cfg=cfg))
        big = [r for r in recs if r.bounds[0] >= Z]
        assert big
        for r in big:
            assert r.widths["mixture"] == r.widths["marginal"]

    def test_requires_two_points(self):
        with pytest.raises(DomainError):
            run_two_point(ExperimentConfig(n_points=3))


class TestNPoint:
    def test_dominance(self):
        recs = run_n_point(ExperimentConfig(n_points=5, trials=40, seed=8))
        assert len(recs) == 200
        for r in recs:
            others = min(r.widths["marginal"], r.widths["cond_1pt"], r.widths["cond_all"])
            assert r.widths["mixture"] <= others + 1e-9
            assert all(w > 0 for w in r.widths.values())

    def test_target(self):
        recs = run_n_point(ExperimentConfig(n_points=3, trials=5, target=1))
        assert [r.point_index for r in recs] == [1] * 5

    def test_baseline_formulas(self):
        recs = run_n_point(ExperimentConfig(n_points=3, trials=30, seed=2, target=1))
        for r in recs:
            b1, b2 = r.bounds
            assert r.widths["cond_1pt"] == pytest.approx(b1 + math.sqrt(2) * Z, abs=1e-12)
            assert r.widths["cond_all"] == pytest.approx(2 * (b1 + b2) / 3 + 2 * Z / math.sqrt(3), abs=1e-12)

    def test_conservative_huge_M(self):
        e = ExperimentConfig(n_points=3, trials=2000, seed=4, design="equispaced",
                             cfg=HolderConfig(M=50.0))
        recs = run_n_point(e)
        for method in ("marginal", "mixture", "cond_1pt", "cond_all"):
            rate = np.mean([r.covered[method] for r in recs])
            se = math.sqrt(0.95 * 0.05 / len(recs))
            assert rate >= 0.95 - 3 * se

    def test_requires_three(self):
        with pytest.raises(DomainError):
            run_n_point(ExperimentConfig(n_points=2))


class TestCoverage:
    def test_single_trial(self):
        rate, se = coverage_estimate(ExperimentConfig(n_points=2, trials=1), "one_point")
        assert rate in (0.0, 1.0) and se == 0.0

    def test_half_alpha(self):
        e = ExperimentConfig(n_points=2, trials=4000, seed=10, cfg=HolderConfig(alpha=0.5))
        rate, se = coverage_estimate(e, "one_point")
        assert abs(rate - 0.5) <= 3 * se

    @pytest.mark.parametrize("method", ["partial", "cond_1pt", "cond_all", "marginal"])
    def test_methods_valid(self, method):
        e = ExperimentConfig(n_points=4, trials=1500, seed=12, cfg=HolderConfig(alpha=0.1))
        rate, se = coverage_estimate(e, method)
        assert rate >= 0.9 - 3 * math.sqrt(0.09 / 1500)

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            coverage_estimate(ExperimentConfig(), "fiducial")


class TestFitCurve:
    cfg = HolderConfig()

    def test_single_point(self):
        d = Dataset([0.5], [1.0])
        base = one_point_region(1.0, self.cfg)
        for t, iv in fit_curve(d, self.cfg, at=[0.0, 0.3, 0.5, 0.9]):
            b = abs(t - 0.5) ** 0.5
            assert iv.lower == pytest.approx(base.lower - b, abs=1e-12)
            assert iv.upper == pytest.approx(base.upper + b, abs=1e-12)

    def test_coincident_query(self):
        d = Dataset([0.2, 0.6], [1.0, 0.0])
        curve = dict(fit_curve(d, self.cfg, at=[0.6]))
        assert curve[0.6] == interval_for_point(d, self.cfg, 1)

    def test_includes_missing_rows(self):
        d = Dataset([0.1, 0.4, 0.9], [0.0, None, 1.0])
        curve = fit_curve(d, self.cfg)
        assert [t for t, _ in curve] == [0.1, 0.4, 0.9]
        left = interval_for_point(d, self.cfg, 0)
        right = interval_for_point(d, self.cfg, 2)
        iv = curve[1][1]
        assert iv.lower == pytest.approx(max(left.lower - 0.3 ** 0.5, right.lower - 0.5 ** 0.5))
        assert iv.upper == pytest.approx(min(left.upper + 0.3 ** 0.5, right.upper + 0.5 ** 0.5))

    def test_empty(self):
        with pytest.raises(DomainError):
            fit_curve(Dataset([0.1], [None]), self.cfg)

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.floats(0.2, 0.8), min_size=1, max_size=6, unique=True),
           st.randoms(use_true_random=False))
    def test_envelope_grows_beyond_outer_points(self, ts, rnd):
        d = Dataset(ts, [rnd.gauss(0, 1) for _ in ts])
        lo, hi = min(ts), max(ts)
        left = list(np.linspace(lo, 0.0, 9)[1:])
        right = list(np.linspace(hi, 1.0, 9)[1:])
        curve = dict(fit_curve(d, self.cfg, at=left + right))
        for qs, edge in ((left, lo), (right, hi)):
            widths = [curve[edge].width] + [curve[q].width for q in qs]
            assert np.all(np.diff(widths) >= -1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.floats(0, 1), min_size=2, max_size=6, unique=True),
           st.randoms(use_true_random=False))
    def test_gap_envelope_inside_nearest_widening(self, ts, rnd):
        d = Dataset(ts, [rnd.gauss(0, 1) for _ in ts])
        obs = sorted(ts)
        fitted = dict(fit_curve(d, self.cfg))
        for a, b in zip(obs, obs[1:]):
            qs = list(np.linspace(a, b, 7)[1:-1])
            curve = dict(fit_curve(d, self.cfg, at=qs))
            for q in qs:
                near = a if q - a <= b - q else b
                rad = abs(q - near) ** 0.5
                assert curve[q].lower >= fitted[near].lower - rad - 1e-12
                assert curve[q].upper <= fitted[near].upper + rad + 1e-12
