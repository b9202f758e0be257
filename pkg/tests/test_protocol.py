"""Protocol engine: ordering, early stopping, bounds bracket, batches."""

import numpy as np
import pytest

from otdetect import (
    Hypothesis,
    ModelConfig,
    RngSpec,
    draw_trial,
    partial_sum_bounds,
    population_moments,
    run_batch,
    stopping_rule,
)
from conftest import random_config


class TestStoppingRule:
    def test_worked_example(self):
        # k=2: sum 9, one silent sensor, 9 - 1*4 = 5 > 0 -> H1.
        assert stopping_rule([5.0, 4.0, 1.0], 0.0) == (2, Hypothesis.H1)

    def test_single_sensor(self):
        assert stopping_rule([5.0], 0.0) == (1, Hypothesis.H1)
        assert stopping_rule([-5.0], 0.0) == (1, Hypothesis.H0)

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError):
            stopping_rule([1.0, 4.0, 2.0], 0.0)
        with pytest.raises(ValueError):
            stopping_rule([], 0.0)

    def test_exact_tie_uses_all_and_decides_h0(self):
        # Full sum equals the threshold: neither strict inequality ever fires.
        assert stopping_rule([2.0, -2.0], 0.0) == (2, Hypothesis.H0)

    def test_always_matches_full_sum_decision(self, rng):
        # Brute-force oracle: the decision the complete sum would produce.
        for _ in range(20_000):
            n = int(rng.integers(1, 12))
            vals = rng.standard_normal(n) * rng.uniform(0.5, 3.0)
            ordered = vals[np.argsort(-np.abs(vals), kind="stable")]
            lam = float(rng.uniform(-1.5, 1.5))
            stop_k, decision = stopping_rule(ordered, lam)
            full = ordered.sum()
            expected = Hypothesis.H1 if full > lam else Hypothesis.H0
            assert decision is expected
            assert 1 <= stop_k <= n

    def test_stop_k_is_minimal(self, rng):
        for _ in range(2000):
            n = int(rng.integers(2, 10))
            vals = rng.standard_normal(n) * 2.0
            ordered = vals[np.argsort(-np.abs(vals), kind="stable")]
            lam = float(rng.uniform(-1.0, 1.0))
            stop_k, _ = stopping_rule(ordered, lam)
            for j in range(1, stop_k):
                assert partial_sum_bounds(ordered[:j], n, lam).can_stop == "continue"


class TestPartialSumBounds:
    def test_single_term(self):
        b = partial_sum_bounds([5.0], 3, 0.0)
        assert (b.z_lower, b.z_upper, b.can_stop) == (-5.0, 15.0, "continue")

    def test_decides_h0(self):
        b = partial_sum_bounds([-6.0, -5.0], 3, 0.0)
        assert b.z_upper == -6.0
        assert b.can_stop == "decide_H0"

    def test_decides_h1(self):
        b = partial_sum_bounds([6.0, 5.0], 3, 0.0)
        assert b.z_lower == 6.0
        assert b.can_stop == "decide_H1"

    def test_empty_prefix_rejected(self):
        with pytest.raises(ValueError):
            partial_sum_bounds([], 3, 0.0)
        with pytest.raises(ValueError):
            partial_sum_bounds([1.0, 0.5], 1, 0.0)

    def test_brackets_every_consistent_completion(self, rng):
        # Sandwich oracle: realized full sums stay inside the bracket at
        # every prefix of the ordered sequence.
        for _ in range(20_000):
            n = int(rng.integers(2, 10))
            vals = rng.standard_normal(n) * rng.uniform(0.5, 4.0)
            ordered = vals[np.argsort(-np.abs(vals), kind="stable")]
            full = ordered.sum()
            for k in range(1, n + 1):
                b = partial_sum_bounds(ordered[:k], n, 0.0)
                assert b.z_lower <= full + 1e-12
                assert full - 1e-12 <= b.z_upper


class TestDrawTrial:
    def test_no_byzantines(self):
        cfg = ModelConfig(n_sensors=50, signal=2.0, byz_frac=0.0, attack_strength=9.0)
        rec = draw_trial(cfg, Hypothesis.H1, RngSpec(1, 0))
        assert not rec.byz_mask.any()
        assert rec.stop_k >= 1
        mags = np.abs(rec.llrs_ordered)
        assert np.all(np.diff(mags) <= 0)

    def test_zero_strength_attack_is_honest(self):
        base = dict(n_sensors=40, signal=2.0, noise_var=1.0)
        honest = ModelConfig(byz_frac=0.0, **base)
        attacked = ModelConfig(byz_frac=1.0, attack_strength=0.0, **base)
        r1 = draw_trial(honest, Hypothesis.H0, RngSpec(3, 5))
        r2 = draw_trial(attacked, Hypothesis.H0, RngSpec(3, 5))
        np.testing.assert_allclose(r1.llrs_ordered, r2.llrs_ordered)
        assert r2.byz_mask.all()

    def test_reproducible_bit_for_bit(self):
        cfg = ModelConfig(n_sensors=20, signal=3.0, byz_frac=0.3, attack_strength=6.0)
        a = draw_trial(cfg, Hypothesis.H1, RngSpec(seed=99, stream=12))
        b = draw_trial(cfg, Hypothesis.H1, RngSpec(seed=99, stream=12))
        assert np.array_equal(a.llrs_ordered, b.llrs_ordered)
        assert np.array_equal(a.byz_mask, b.byz_mask)
        assert (a.stop_k, a.decision, a.full_sum) == (b.stop_k, b.decision, b.full_sum)
        c = draw_trial(cfg, Hypothesis.H1, RngSpec(seed=99, stream=13))
        assert not np.array_equal(a.llrs_ordered, c.llrs_ordered)

    def test_llr_mean_matches_population_moments(self):
        # Oracle: population moments; 2*10^5 sensor draws under H1.
        cfg = ModelConfig(
            n_sensors=20, signal=3.0, noise_var=1.0, byz_frac=0.3, attack_strength=6.0
        )
        mom = population_moments(cfg)
        vals = []
        for i in range(10_000):
            vals.append(draw_trial(cfg, Hypothesis.H1, RngSpec(5, i)).llrs_ordered)
        llrs = np.concatenate(vals)
        se = llrs.std(ddof=1) / np.sqrt(llrs.size)
        assert llrs.mean() == pytest.approx(mom.mean_h1, abs=4 * se)

    def test_byz_mask_rate(self):
        cfg = ModelConfig(n_sensors=100, signal=1.0, byz_frac=0.3, attack_strength=1.0)
        hits = sum(
            draw_trial(cfg, Hypothesis.H0, RngSpec(8, i)).byz_mask.sum() for i in range(2000)
        )
        n = 2000 * 100
        se = np.sqrt(0.3 * 0.7 / n)
        assert hits / n == pytest.approx(0.3, abs=4 * se)


class TestTrialInvariants:
    """Structural guarantees checked on every simulated trial."""

    def _trials(self, rng, n_trials=300):
        for _ in range(n_trials):
            cfg = random_config(rng)
            truth = Hypothesis(int(rng.integers(0, 2)))
            yield cfg, draw_trial(cfg, truth, RngSpec(17, int(rng.integers(0, 2**32))))

    def test_early_decision_equals_full_sum_decision(self, rng):
        for cfg, rec in self._trials(rng):
            expected = Hypothesis.H1 if rec.full_sum > cfg.threshold else Hypothesis.H0
            assert rec.decision is expected

    def test_continue_region_is_monotone(self, rng):
        # Once a prefix cannot decide, no shorter prefix can either.
        for cfg, rec in self._trials(rng, 200):
            n = cfg.n_sensors
            states = [
                partial_sum_bounds(rec.llrs_ordered[:k], n, cfg.threshold).can_stop
                for k in range(1, n + 1)
            ]
            first_stop = next((i for i, s in enumerate(states) if s != "continue"), None)
            if first_stop is not None:
                assert all(s == "continue" for s in states[:first_stop])
                assert first_stop + 1 == rec.stop_k
            else:
                assert rec.stop_k == n

    def test_stop_k_minimality(self, rng):
        for cfg, rec in self._trials(rng, 200):
            if rec.stop_k > 1:
                prev = partial_sum_bounds(
                    rec.llrs_ordered[: rec.stop_k - 1], cfg.n_sensors, cfg.threshold
                )
                assert prev.can_stop == "continue"


class TestRunBatch:
    def test_zero_trials_rejected(self):
        cfg = ModelConfig(n_sensors=3, signal=1.0)
        with pytest.raises(ValueError):
            run_batch(cfg, 0, seed=1)

    def test_deterministic(self):
        cfg = ModelConfig(n_sensors=10, signal=3.0, byz_frac=0.3, attack_strength=6.0)
        a = run_batch(cfg, 3000, seed=42)
        b = run_batch(cfg, 3000, seed=42)
        assert a == b
        c = run_batch(cfg, 3000, seed=43)
        assert c.pe != a.pe or c.mean_stop_k != a.mean_stop_k

    def test_matches_per_trial_draws(self):
        # The batch path must replay exactly the draw_trial streams.
        cfg = ModelConfig(n_sensors=8, signal=2.0, byz_frac=0.5, attack_strength=1.0)
        batch = run_batch(cfg, 500, seed=11)
        truth_gen = np.random.Generator(np.random.Philox(key=11, counter=1 << 255))
        truths = truth_gen.random(500) < cfg.prior_h1
        ks = [
            draw_trial(cfg, Hypothesis.H1 if truths[i] else Hypothesis.H0, RngSpec(11, i)).stop_k
            for i in range(500)
        ]
        assert batch.mean_stop_k.value == pytest.approx(np.mean(ks))
        assert batch.n_h1 == int(truths.sum())

    def test_saved_plus_stop_is_n(self):
        cfg = ModelConfig(n_sensors=25, signal=2.0)
        b = run_batch(cfg, 1000, seed=5)
        assert b.mean_saved.value == pytest.approx(25 - b.mean_stop_k.value)
        assert b.mean_saved.se == b.mean_stop_k.se

    def test_strong_signal_saves_over_half(self):
        # With no attack and s = 4*sigma, most trials stop in the first half.
        cfg = ModelConfig(n_sensors=100, signal=4.0, noise_var=1.0)
        b = run_batch(cfg, 10_000, seed=2)
        assert b.mean_saved.value / 100 >= 0.5

    def test_forced_truth_strong_signal_never_errs(self):
        # Strong-signal regime: per-sensor LLR signs almost surely match the
        # truth, so the decision is almost surely correct.
        cfg = ModelConfig(n_sensors=20, signal=6.0, noise_var=1.0)
        errors = sum(
            draw_trial(cfg, Hypothesis.H1, RngSpec(31, i)).decision is not Hypothesis.H1
            for i in range(5000)
        )
        assert errors == 0

    def test_early_stop_fraction_in_strong_signal_regime(self):
        cfg = ModelConfig(n_sensors=40, signal=4.0, noise_var=1.0)
        half = 0
        trials = 4000
        for i in range(trials):
            rec = draw_trial(cfg, Hypothesis.H0, RngSpec(13, i))
            half += rec.stop_k <= (cfg.n_sensors + 1) // 2
        assert half / trials > 0.5


class TestRngSpec:
    def test_bounds(self):
        with pytest.raises(ValueError):
            RngSpec(seed=-1)
        with pytest.raises(ValueError):
            RngSpec(seed=2**64)
        with pytest.raises(ValueError):
            RngSpec(seed=0, stream=-2)

    def test_streams_differ(self):
        a = RngSpec(0, 0).generator().random(6)
        b = RngSpec(0, 1).generator().random(6)
        assert not np.array_equal(a, b)
