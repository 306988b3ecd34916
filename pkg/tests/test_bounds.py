"""Approximation quality, power bounds, and every certification check."""

import numpy as np
import pytest

from hybridgibbs import (
    ApproximatorSpec,
    Exact,
    Lazy,
    SliceModel,
    approx_quality,
    check_block_comparison,
    check_da_gap_sandwich,
    check_da_tstep,
    check_da_variance_tstep,
    check_dirichlet_sandwich,
    check_gap_sandwich,
    check_selection_reweighting,
    check_slice_tstep,
    check_uniform_tstep_bound,
    check_variance_sandwich,
    da_exact,
    dominating_norm_profile,
    exact_norm_profile,
    exact_random_scan,
    joint_from_weights,
    mean_power_bound,
    product_joint,
    rms_power_bound,
)
from hybridgibbs.bounds import function_battery
from hybridgibbs.errors import (
    DominationViolated,
    InvalidBlockSize,
    InvalidSpec,
    NonUniformSelection,
    PreconditionUnmet,
    ZeroSelectionProb,
)
from hybridgibbs.randomgen import (
    random_joint,
    random_lazy_spec,
    random_mixed_spec,
    rng_from,
)

SKEWED = joint_from_weights((2, 2), [0.1, 0.2, 0.3, 0.4])
TWO_COINS = product_joint([[0.5, 0.5], [0.5, 0.5]])


def all_pass(reports):
    return all(r.status == "pass" for r in reports)


def min_slack(reports):
    return min(r.slack for r in reports)


class TestApproxQuality:
    def test_all_exact(self):
        q = approx_quality(SKEWED, ApproximatorSpec())
        assert q.max_norm == 0.0
        assert q.ratio_min == 1.0
        assert q.ratio_max == 1.0
        assert q.all_psd

    def test_all_lazy(self):
        q = approx_quality(SKEWED, ApproximatorSpec(default=Lazy(0.25)))
        assert q.max_norm == pytest.approx(0.25, abs=1e-12)
        assert q.ratio_min == pytest.approx(0.75, abs=1e-12)
        assert q.ratio_max == pytest.approx(0.75, abs=1e-12)
        assert q.all_psd

    def test_mixed(self):
        spec = ApproximatorSpec(default=Exact(), overrides={0: Lazy(0.3)})
        q = approx_quality(SKEWED, spec)
        assert q.max_norm == pytest.approx(0.3, abs=1e-12)
        assert q.ratio_min == pytest.approx(0.7, abs=1e-12)
        assert q.ratio_max == pytest.approx(1.0, abs=1e-12)

    def test_consistency_on_random_specs(self):
        for seed in range(15):
            joint = random_joint(seed)
            q = approx_quality(joint, random_mixed_spec(seed + 1, joint))
            assert q.ratio_min >= 1.0 - q.max_norm - 1e-9
            assert q.ratio_max <= 1.0 + q.max_norm + 1e-9
            if q.all_psd:
                assert q.ratio_max <= 1.0 + 1e-9

    def test_coordinate_restriction(self):
        spec = ApproximatorSpec(default=Exact(), overrides={1: Lazy(0.5)})
        q = approx_quality(SKEWED, spec, coords=(0,))
        assert q.max_norm == 0.0
        assert all(i == 0 for (i, _y) in q.per_conditional)


class TestNormProfiles:
    def test_exact_profile_lazy(self):
        spec = ApproximatorSpec(default=Lazy(0.4))
        prof = exact_norm_profile(SKEWED, spec)
        np.testing.assert_allclose(prof.values, [0.4, 0.4], atol=1e-12)
        assert prof.kind == "per_z"

    def test_dominating_profile_accepted(self):
        spec = ApproximatorSpec(default=Lazy(0.4))
        prof = dominating_norm_profile(SKEWED, [0.5, 0.45], spec)
        assert prof.derivation == "supplied"

    def test_domination_violated(self):
        spec = ApproximatorSpec(default=Lazy(0.4))
        with pytest.raises(DominationViolated):
            dominating_norm_profile(SKEWED, [0.1, 0.5], spec)

    def test_values_must_be_probability_like(self):
        spec = ApproximatorSpec(default=Lazy(0.4))
        with pytest.raises(InvalidSpec):
            dominating_norm_profile(SKEWED, [0.5, 1.5], spec)


class TestPowerBounds:
    def test_constant_profile(self):
        spec = ApproximatorSpec(default=Lazy(0.6))
        prof = exact_norm_profile(SKEWED, spec)
        for t in (1, 2, 5):
            assert mean_power_bound(SKEWED, prof, t) == pytest.approx(0.6**t, rel=1e-12)
            assert rms_power_bound(SKEWED, prof, t) == pytest.approx(0.6**t, rel=1e-12)

    def test_slice_two_level_hand_formula(self):
        model = SliceModel(density=np.array([2.0, 1.0]))
        g1, g2 = 0.3, 0.8
        prof = dominating_norm_profile(
            SliceModel(
                density=np.array([2.0, 1.0]),
                level_kernels=(Lazy(g1), np.array([[1.0]])),
            ),
            [g1, g2],
        )
        for t in (1, 2, 3, 6):
            expected = max(g1**t, (g1**t + g2**t) / 2)
            assert mean_power_bound(model, prof, t) == pytest.approx(expected, rel=1e-12)

    def test_alpha_nonincreasing_and_vanishing(self):
        model = SliceModel(density=np.array([2.0, 1.0]))
        prof = dominating_norm_profile(
            SliceModel(
                density=np.array([2.0, 1.0]),
                level_kernels=(Lazy(0.5), np.array([[1.0]])),
            ),
            [0.5, 0.9],
        )
        values = [mean_power_bound(model, prof, t) for t in range(1, 65)]
        assert all(a >= b - 1e-15 for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-2

    def test_rms_strictly_larger_with_flat_level(self):
        model = SliceModel(density=np.array([2.0, 1.0]))
        prof = dominating_norm_profile(
            SliceModel(
                density=np.array([2.0, 1.0]),
                level_kernels=(Lazy(0.5), np.array([[1.0]])),
            ),
            [0.5, 1.0],
        )
        for t in (1, 2, 4):
            a = mean_power_bound(model, prof, t)
            b = rms_power_bound(model, prof, t)
            assert b > a + 1e-6


class TestDirichletSandwich:
    def test_exact_spec_equalities(self):
        reps = check_dirichlet_sandwich(TWO_COINS, None, ApproximatorSpec(), trials=8, seed=0)
        assert all_pass(reps)
        assert abs(min_slack(reps)) < 1e-12

    def test_lazy_tight_both_sides(self):
        reps = check_dirichlet_sandwich(
            SKEWED, None, ApproximatorSpec(default=Lazy(0.4)), trials=8, seed=0
        )
        assert all_pass(reps)
        assert abs(min_slack(reps)) < 1e-10

    def test_random_sweep(self):
        for seed in range(50):
            joint = random_joint(seed)
            spec = random_mixed_spec(seed + 1000, joint)
            reps = check_dirichlet_sandwich(joint, None, spec, trials=16, seed=seed)
            assert min_slack(reps) >= -1e-9


class TestGapSandwich:
    def test_lazy_lower_bound_tight(self):
        reps = check_gap_sandwich(SKEWED, None, ApproximatorSpec(default=Lazy(0.3)))
        lower = next(r for r in reps if r.name.endswith("lower"))
        assert abs(lower.slack) < 1e-10

    def test_exact_all_equal(self):
        reps = check_gap_sandwich(SKEWED, None, ApproximatorSpec())
        assert all(abs(r.slack) < 1e-12 for r in reps)

    def test_random_sweep(self):
        for seed in range(50):
            joint = random_joint(seed + 7)
            spec = random_mixed_spec(seed + 77, joint)
            assert min_slack(check_gap_sandwich(joint, None, spec)) >= -1e-9


class TestVarianceSandwich:
    def test_exact_spec_collapses(self):
        reps = check_variance_sandwich(SKEWED, None, ApproximatorSpec(), trials=4)
        assert all_pass(reps)
        assert abs(min_slack(reps)) < 1e-9

    def test_lazy_eigenfunction_formula(self):
        # For an eigenfunction with exact eigenvalue lam, the hybrid variance
        # is (1 + lam_h) / (1 - lam_h) with lam_h = eps + (1 - eps) lam.
        eps = 0.2
        joint = TWO_COINS
        T = exact_random_scan(joint)
        F, _ = function_battery(T, trials=0, seed=0)
        from hybridgibbs import asymptotic_variance, hybrid_random_scan

        Th = hybrid_random_scan(joint, spec=ApproximatorSpec(default=Lazy(eps)))
        w = T.stationary.weights
        K = T.kernel.matrix
        for k in range(F.shape[1]):
            f = F[:, k]
            lam = float(w @ (f * (K @ f)))
            lam_h = eps + (1 - eps) * lam
            v = asymptotic_variance(Th, f)
            assert v == pytest.approx((1 + lam_h) / (1 - lam_h), rel=1e-10)
        reps = check_variance_sandwich(joint, None, ApproximatorSpec(default=Lazy(eps)))
        assert all_pass(reps)

    def test_random_sweep(self):
        count = 0
        for seed in range(60):
            joint = random_joint(seed + 13)
            spec = random_lazy_spec(seed + 31, joint, eps_range=(0.0, 0.8))
            reps = check_variance_sandwich(joint, None, spec, trials=8, seed=seed)
            assert min_slack(reps) >= -1e-9
            count += 1
        assert count == 60


class TestDaChecks:
    def test_gap_sandwich_lazy_tight(self):
        reps = check_da_gap_sandwich(SKEWED, ApproximatorSpec(default=Lazy(0.5)))
        lower = next(r for r in reps if r.name.endswith("lower"))
        assert abs(lower.slack) < 1e-10
        assert all_pass(reps)

    def test_tstep_exact_spec(self):
        reps = check_da_tstep(SKEWED, ApproximatorSpec(), t=2, trials=8)
        assert all_pass(reps)
        gap_lower = next(r for r in reps if r.name == "da-tstep-gap-lower")
        assert gap_lower.witness["alpha"] == pytest.approx(0.0, abs=1e-15)

    def test_tstep_functional_every_eigenvector(self):
        # The battery includes the full eigenbasis; verify the functional
        # inequality individually for each eigenvector.
        joint = random_joint(71, sizes=(3, 3))
        spec = random_mixed_spec(72, joint, coords=(0,))
        from hybridgibbs import da_hybrid

        S = da_exact(joint)
        Sh = da_hybrid(joint, spec)
        prof = exact_norm_profile(joint, spec)
        t = 4
        a_t = mean_power_bound(joint, prof, t)
        F, labels = function_battery(Sh, trials=0, seed=0)
        w = Sh.stationary.weights
        for k in range(F.shape[1]):
            f = F[:, k]
            r_h = float(w @ (f * (Sh.kernel.matrix @ f)))
            r_s = float(w @ (f * (S.kernel.matrix @ f)))
            assert labels[k]["kind"] == "eigenvector"
            assert r_h**t >= -1e-12
            assert r_h**t <= r_s + a_t + 1e-9

    def test_tstep_odd_requires_psd(self):
        from hybridgibbs.randomgen import random_explicit_spec

        joint = random_joint(81, sizes=(3, 3))
        spec = random_explicit_spec(82, joint, coords=(0,))
        with pytest.raises(PreconditionUnmet):
            check_da_tstep(joint, spec, t=3)

    def test_tstep_odd_allowed_when_psd(self):
        reps = check_da_tstep(SKEWED, ApproximatorSpec(default=Lazy(0.4)), t=3, trials=4)
        assert all_pass(reps)

    def test_variance_tstep_pass(self):
        reps = check_da_variance_tstep(SKEWED, ApproximatorSpec(default=Lazy(0.3)), t=4)
        assert len(reps) == 1 and reps[0].status == "pass"
        # alpha_4 = 0.3^4 = 0.0081, well under half the gap.
        assert reps[0].witness["alpha"] == pytest.approx(0.3**4, rel=1e-12)

    def test_variance_tstep_hypothesis_unmet(self):
        reps = check_da_variance_tstep(SKEWED, ApproximatorSpec(default=Lazy(0.99)), t=2)
        assert len(reps) == 1
        assert reps[0].status == "hypothesis_unmet"
        assert reps[0].lhs == pytest.approx(0.99**2, rel=1e-12)

    def test_random_sweep(self):
        for seed in range(40):
            rng = rng_from(seed + 200)
            d1 = int(rng.integers(2, 5))
            d2 = int(rng.integers(2, 5))
            joint = random_joint(rng, sizes=(d1, d2))
            spec = random_mixed_spec(rng, joint, coords=(0,))
            for t in (2, 4):
                assert min_slack(check_da_tstep(joint, spec, t=t, trials=8)) >= -1e-9


class TestBlockComparison:
    def test_three_coin_equality_case(self):
        joint = product_joint([[0.5, 0.5]] * 3)
        reps = check_block_comparison(joint, 2, 1, trials=8)
        gap_lower = next(r for r in reps if r.name == "block-gap-lower")
        assert gap_lower.witness["c1"] == pytest.approx(0.5, abs=1e-12)
        # c1 * (1 - |T_2|) = 0.5 * (2/3) = 1/3 = 1 - |T_1| exactly.
        assert abs(gap_lower.slack) < 1e-10
        assert all_pass(reps)

    def test_invalid_sizes(self):
        joint = product_joint([[0.5, 0.5]] * 3)
        with pytest.raises(InvalidBlockSize):
            check_block_comparison(joint, 2, 2)
        with pytest.raises(InvalidBlockSize):
            check_block_comparison(joint, 3, 1)

    def test_random_sweep(self):
        for seed in range(20):
            joint = random_joint(seed + 300, sizes=(2, 2, 3))
            reps = check_block_comparison(joint, 2, 1, trials=8, seed=seed)
            assert min_slack(r for r in reps if r.status != "hypothesis_unmet") >= -1e-9


class TestSelectionReweighting:
    def test_equal_probs_reduce_to_weaker_sandwich(self):
        spec = ApproximatorSpec(default=Lazy(0.2))
        reps = check_selection_reweighting(SKEWED, [0.5, 0.5], [0.5, 0.5], spec)
        transfer = next(r for r in reps if r.name == "selection-hybrid-transfer")
        assert transfer.witness["b"] == pytest.approx(1.0, abs=1e-12)
        assert all_pass(reps)

    def test_two_coin_spec_example(self):
        spec = ApproximatorSpec(default=Lazy(0.2))
        reps = check_selection_reweighting(TWO_COINS, [0.5, 0.5], [0.75, 0.25], spec)
        assert all_pass(reps)

    def test_zero_prob_rejected(self):
        with pytest.raises(ZeroSelectionProb):
            check_selection_reweighting(SKEWED, [1.0, 0.0], [0.5, 0.5], ApproximatorSpec())

    def test_random_sweep(self):
        for seed in range(25):
            rng = rng_from(seed + 400)
            joint = random_joint(rng)
            n = joint.space.ncoords
            p = rng.random(n) + 0.2
            p_alt = rng.random(n) + 0.2
            spec = random_mixed_spec(rng, joint)
            reps = check_selection_reweighting(joint, p, p_alt, spec)
            assert min_slack(r for r in reps if r.status != "hypothesis_unmet") >= -1e-9


class TestUniformPowerBound:
    def test_exact_t1_equality(self):
        reps = check_uniform_tstep_bound(SKEWED, None, ApproximatorSpec(), t=1)
        lower = next(r for r in reps if r.name == "uniform-power-lower")
        assert abs(lower.slack) < 1e-12
        assert all_pass(reps)

    def test_nonuniform_rejected(self):
        with pytest.raises(NonUniformSelection):
            check_uniform_tstep_bound(SKEWED, [0.7, 0.3], ApproximatorSpec(), t=2)

    def test_dominated_by_sandwich_bound(self):
        spec = ApproximatorSpec(default=Lazy(0.5))
        for t in (1, 2, 3, 4):
            reps = check_uniform_tstep_bound(SKEWED, None, spec, t=t)
            dom = next(r for r in reps if r.name == "uniform-power-dominated")
            assert dom.status in ("pass", "hypothesis_unmet")
            if dom.status == "pass":
                assert dom.slack >= -1e-12


class TestSliceTstep:
    def test_exact_levels_trivial(self):
        model = SliceModel(density=np.array([2.0, 1.0]), level_kernels=(Exact(), Exact()))
        reps = check_slice_tstep(model, t=2)
        assert all_pass(reps)
        upper = next(r for r in reps if r.name == "slice-tstep-upper")
        assert abs(upper.slack) < 1e-12

    def test_lazy_levels(self):
        model = SliceModel(
            density=np.array([2.0, 1.0]), level_kernels=(Lazy(0.5), Lazy(0.9))
        )
        for t in (2, 4, 6):
            assert all_pass(check_slice_tstep(model, t=t))

    def test_odd_t_requires_psd_levels(self):
        # Level 1 covers all three points; level 2 is the two top points,
        # where the flip kernel has eigenvalue -1 (not psd).
        flip = np.array([[0.0, 1.0], [1.0, 0.0]])
        model = SliceModel(
            density=np.array([2.0, 2.0, 1.0]),
            level_kernels=(Exact(), flip),
        )
        with pytest.raises(PreconditionUnmet):
            check_slice_tstep(model, t=3)
        assert all_pass(check_slice_tstep(model, t=2))


class TestHundredModelSweeps:
    """Each checker passes over 100 randomized models within its preconditions."""

    def test_da_gap_sandwich_sweep(self):
        for seed in range(100):
            rng = rng_from(seed + 500)
            joint = random_joint(rng, sizes=(int(rng.integers(2, 5)), int(rng.integers(2, 5))))
            spec = random_mixed_spec(rng, joint, coords=(0,))
            assert min_slack(check_da_gap_sandwich(joint, spec)) >= -1e-9

    def test_variance_sandwich_sweep(self):
        done = 0
        for seed in range(130):
            if done == 100:
                break
            joint = random_joint(seed + 900)
            spec = random_lazy_spec(seed + 901, joint, eps_range=(0.0, 0.8))
            reps = check_variance_sandwich(joint, None, spec, trials=6, seed=seed)
            assert min_slack(reps) >= -1e-9
            done += 1
        assert done == 100

    def test_variance_sandwich_lazy_tight_both_sides(self):
        # With a single lazy rule, c1 = c2 and the variance transform is an
        # exact per-mode identity, so both halves are equalities.
        for seed in range(5):
            joint = random_joint(seed + 950)
            reps = check_variance_sandwich(
                joint, None, ApproximatorSpec(default=Lazy(0.4)), trials=4, seed=seed
            )
            assert max(abs(r.slack) for r in reps) < 1e-8

    def test_da_variance_tstep_sweep(self):
        met = 0
        for seed in range(100):
            rng = rng_from(seed + 1500)
            joint = random_joint(rng, sizes=(int(rng.integers(2, 5)), int(rng.integers(2, 5))))
            spec = random_mixed_spec(rng, joint, coords=(0,), lazy_prob=0.7)
            reps = check_da_variance_tstep(joint, spec, t=2, trials=6, seed=seed)
            certified = [r for r in reps if r.status != "hypothesis_unmet"]
            if certified:
                met += 1
                assert min_slack(certified) >= -1e-9
        assert met >= 50

    def test_selection_reweighting_sweep(self):
        for seed in range(100):
            rng = rng_from(seed + 2500)
            joint = random_joint(rng)
            n = joint.space.ncoords
            p = rng.random(n) + 0.1
            p_alt = rng.random(n) + 0.1
            spec = random_mixed_spec(rng, joint)
            reps = check_selection_reweighting(joint, p, p_alt, spec)
            certified = [r for r in reps if r.status != "hypothesis_unmet"]
            assert min_slack(certified) >= -1e-9

    def test_slice_tstep_sweep(self):
        from hybridgibbs.randomgen import random_slice_model

        for seed in range(100):
            model = random_slice_model(seed + 3500)
            for t in (2, 4):
                reps = check_slice_tstep(model, t)
                assert min_slack(reps) >= -1e-9

    def test_dirichlet_and_gap_sweep(self):
        for seed in range(100):
            joint = random_joint(seed + 4500)
            spec = random_mixed_spec(seed + 4501, joint)
            assert min_slack(check_dirichlet_sandwich(joint, None, spec, trials=8, seed=seed)) >= -1e-9
            assert min_slack(check_gap_sandwich(joint, None, spec)) >= -1e-9
