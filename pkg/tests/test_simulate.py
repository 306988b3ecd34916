"""Trajectory simulation, batch means, and cross-validation against exact values."""

import numpy as np
import pytest

from hybridgibbs import (
    batch_means_variance,
    check_reversibility,
    cross_validate_variance,
    mixing_curve,
    simulate,
    stepper_backend,
    write_trajectory,
)
from hybridgibbs.errors import (
    InvalidStart,
    NotAbsolutelyContinuous,
    TooFewBatches,
)
from hybridgibbs.simulate import COMPILED_STEPPER

TWO_STATE = check_reversibility([[0.7, 0.3], [0.3, 0.7]], [0.5, 0.5])
SWAP = check_reversibility([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5])
IDENTITY = check_reversibility(np.eye(3), [0.2, 0.3, 0.5])


class TestSimulate:
    def test_identity_kernel_constant(self):
        traj = simulate(IDENTITY, 1, 50, seed=3)
        assert set(traj.states.tolist()) == {1}

    def test_swap_alternates(self):
        traj = simulate(SWAP, 0, 7, seed=0)
        assert traj.states.tolist() == [0, 1, 0, 1, 0, 1, 0, 1]

    def test_deterministic_given_seed(self):
        a = simulate(TWO_STATE, 0, 1000, seed=42)
        b = simulate(TWO_STATE, 0, 1000, seed=42)
        np.testing.assert_array_equal(a.states, b.states)
        c = simulate(TWO_STATE, 0, 1000, seed=43)
        assert not np.array_equal(a.states, c.states)

    def test_backends_agree_bit_exactly(self):
        if not COMPILED_STEPPER:
            pytest.skip("compiled stepper not built")
        a = simulate(TWO_STATE, 0, 5000, seed=7, backend="compiled")
        b = simulate(TWO_STATE, 0, 5000, seed=7, backend="pure-python")
        np.testing.assert_array_equal(a.states, b.states)

    def test_backend_name(self):
        assert stepper_backend() in ("compiled", "pure-python")

    def test_occupancy_matches_stationary(self):
        traj = simulate(TWO_STATE, 0, 100_000, seed=2)
        freq = float(np.mean(traj.states == 0))
        assert abs(freq - 0.5) < 0.01

    def test_distribution_start(self):
        traj = simulate(TWO_STATE, TWO_STATE.stationary, 10, seed=5)
        assert traj.states[0] in (0, 1)

    def test_invalid_start(self):
        with pytest.raises(InvalidStart):
            simulate(TWO_STATE, 5, 10, seed=0)
        with pytest.raises(InvalidStart):
            simulate(TWO_STATE, [0.5, 0.25, 0.25], 10, seed=0)

    def test_transitions_have_positive_probability(self):
        traj = simulate(TWO_STATE, 0, 2000, seed=9)
        K = TWO_STATE.kernel.matrix
        probs = K[traj.states[:-1], traj.states[1:]]
        assert np.all(probs > 0)


class TestBatchMeans:
    def test_iid_sequence(self):
        # The independence kernel produces iid draws: the asymptotic variance
        # is the plain variance of f.
        w = np.array([0.3, 0.7])
        indep = check_reversibility(np.tile(w, (2, 1)), w)
        f = np.array([1.0, -1.0])
        traj = simulate(indep, 0, 50_000, seed=11)
        est = batch_means_variance(traj, f, batch=100)
        f0 = f - w @ f
        exact = float(w @ (f0 * f0))
        assert abs(est.estimate - exact) <= 3 * est.standard_error

    def test_two_state_benchmark(self):
        traj = simulate(TWO_STATE, 0, 100_000, seed=12)
        est = batch_means_variance(traj, [1.0, -1.0], batch=1000)
        assert abs(est.estimate - 7 / 3) <= 3 * est.standard_error

    def test_constant_function(self):
        traj = simulate(TWO_STATE, 0, 5000, seed=13)
        est = batch_means_variance(traj, [2.0, 2.0], batch=100)
        assert est.estimate == pytest.approx(0.0, abs=1e-20)

    def test_too_few_batches(self):
        traj = simulate(TWO_STATE, 0, 100, seed=14)
        with pytest.raises(TooFewBatches):
            batch_means_variance(traj, [1.0, -1.0], batch=50)


class TestCrossValidate:
    def test_two_state_benchmark(self):
        rep = cross_validate_variance(TWO_STATE, [1.0, -1.0], 100_000, seed=15, batch=1000)
        assert rep.status == "pass"
        assert rep.witness["exact"] == pytest.approx(7 / 3, rel=1e-12)

    def test_random_pairs_mostly_pass(self):
        from hybridgibbs import exact_random_scan
        from hybridgibbs.randomgen import random_joint, rng_from

        passed = 0
        for seed in range(12):
            joint = random_joint(seed + 600)
            T = exact_random_scan(joint)
            f = rng_from(seed).standard_normal(T.n)
            rep = cross_validate_variance(T, f, 30_000, seed=seed, batch=150)
            passed += rep.status == "pass"
        assert passed >= 11


class TestMixingCurve:
    def test_stationary_start_stays_at_zero(self):
        curve = mixing_curve(TWO_STATE, TWO_STATE.stationary, 10)
        np.testing.assert_allclose(curve.distances, 0.0, atol=1e-12)
        assert curve.fitted_rate == 0.0

    def test_two_state_point_mass(self):
        curve = mixing_curve(TWO_STATE, [1.0, 0.0], 20)
        expected = [0.4**t for t in range(21)]
        np.testing.assert_allclose(curve.distances, expected, atol=1e-12)
        assert curve.fitted_rate == pytest.approx(0.4, abs=1e-9)

    def test_fitted_rate_matches_norm(self):
        from hybridgibbs import exact_random_scan, spectral_summary
        from hybridgibbs.randomgen import random_joint

        for seed in range(8):
            joint = random_joint(seed + 700)
            T = exact_random_scan(joint)
            s = spectral_summary(T)
            mu0 = np.zeros(T.n)
            mu0[0] = 1.0
            curve = mixing_curve(T, mu0, 50)
            assert curve.fitted_rate <= s.operator_norm + 1e-6
            # The tail slope identifies the norm once the subdominant mode
            # has decayed away within the fitted window.
            mags = np.sort(np.abs(s.eigenvalues))
            second = mags[-2] if mags.size > 1 else 0.0
            separated = s.operator_norm > 1e-3 and second / s.operator_norm < 0.88
            if separated:
                assert curve.fitted_rate == pytest.approx(s.operator_norm, abs=1e-3)

    def test_monotone_for_psd(self):
        curve = mixing_curve(TWO_STATE, [0.9, 0.1], 30)
        diffs = np.diff(curve.distances)
        assert np.all(diffs <= 1e-12)

    def test_absolute_continuity_required(self):
        rev = check_reversibility(np.eye(2), [1.0, 0.0])
        with pytest.raises(NotAbsolutelyContinuous):
            mixing_curve(rev, [0.0, 1.0], 5)


class TestTrajectoryExport:
    def test_format(self, tmp_path):
        traj = simulate(TWO_STATE, 0, 5, seed=21)
        path = tmp_path / "traj.txt"
        write_trajectory(traj, path)
        lines = path.read_text().splitlines()
        assert lines[0] == f"# seed=21 kernel={traj.fingerprint}"
        assert [int(x) for x in lines[1:]] == traj.states.tolist()
