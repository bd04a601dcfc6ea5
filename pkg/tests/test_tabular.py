"""Exact-table machinery: divergences, closed forms, objectives, identities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adclab import tabular
from adclab.tabular import (
    AbsoluteContinuityViolation,
    EmptyFamily,
    JointTable,
    UndefinedPair,
    UndefinedRow,
    argmin_over_family,
    classifier_objective,
    conditional_entropy,
    generator_objective,
    js,
    kl,
    optimal_classifier_acgan,
    optimal_discriminative_classifier,
    optimal_discriminator,
    optimal_label_extended,
    optimal_pd_logit,
    optimal_twin_classifiers,
    random_joint_table,
    verify_theorem,
)

P_EXAMPLE = JointTable([[0.4, 0.1], [0.1, 0.4]])
Q_UNIFORM = JointTable([[0.25, 0.25], [0.25, 0.25]])


def brute_kl(a, b):
    """Independent cell-by-cell summation oracle."""
    total = 0.0
    for av, bv in zip(np.asarray(a).ravel(), np.asarray(b).ravel()):
        if av > 0:
            total += av * math.log(av / bv)
    return total


def random_pair(gen, npts=None, k=None):
    npts = npts or int(gen.integers(2, 9))
    k = k or int(gen.integers(2, 6))
    return random_joint_table(gen, npts, k), random_joint_table(gen, npts, k)


class TestJointTable:
    def test_rejects_negative_and_unnormalized(self):
        with pytest.raises(ValueError):
            JointTable([[0.5, -0.1], [0.3, 0.3]])
        with pytest.raises(ValueError):
            JointTable([[0.5, 0.4]])

    def test_marginals_sum_to_one(self):
        gen = np.random.default_rng(0)
        p = random_joint_table(gen, 5, 3)
        assert p.marginal_x().sum() == pytest.approx(1.0, abs=1e-12)
        assert p.marginal_y().sum() == pytest.approx(1.0, abs=1e-12)

    def test_probs_frozen(self):
        p = random_joint_table(np.random.default_rng(1), 3, 2)
        with pytest.raises(ValueError):
            p.probs[0, 0] = 0.5


class TestDivergences:
    def test_kl_identity_is_zero(self):
        assert kl(P_EXAMPLE, P_EXAMPLE) == 0.0

    def test_kl_uniform_vs_example(self):
        # frozen from the summation oracle: 0.5*log(0.625) + 0.5*log(2.5)
        expected = brute_kl(Q_UNIFORM.probs, P_EXAMPLE.probs)
        assert expected == pytest.approx(0.223144, abs=1e-6)
        assert kl(Q_UNIFORM, P_EXAMPLE) == pytest.approx(expected, abs=1e-15)

    def test_kl_point_mass_vs_uniform(self):
        assert kl([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2.0), abs=1e-12)

    def test_kl_absolute_continuity(self):
        with pytest.raises(AbsoluteContinuityViolation):
            kl([0.5, 0.5], [1.0, 0.0])

    def test_js_identity_and_disjoint(self):
        assert js(P_EXAMPLE, P_EXAMPLE) == 0.0
        assert js([1.0, 0.0], [0.0, 1.0]) == pytest.approx(math.log(2.0), abs=1e-12)

    def test_js_matches_direct_summation(self):
        a, b = P_EXAMPLE.probs, Q_UNIFORM.probs
        m = 0.5 * (a + b)
        assert js(P_EXAMPLE, Q_UNIFORM) == pytest.approx(
            0.5 * brute_kl(a, m) + 0.5 * brute_kl(b, m), abs=1e-15)

    def test_conditional_entropy_examples(self):
        assert conditional_entropy(JointTable([[0.5, 0.0], [0.0, 0.5]])) == 0.0
        assert conditional_entropy(Q_UNIFORM) == pytest.approx(math.log(2.0), abs=1e-12)
        h8 = -(0.8 * math.log(0.8) + 0.2 * math.log(0.2))
        assert conditional_entropy(P_EXAMPLE) == pytest.approx(h8, abs=1e-12)
        assert h8 == pytest.approx(0.500402, abs=1e-6)

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_divergence_ranges(self, seed):
        gen = np.random.default_rng(seed)
        p, q = random_pair(gen)
        assert kl(q, p) >= 0.0
        assert 0.0 <= js(p, q) <= math.log(2.0) + 1e-12
        assert 0.0 <= conditional_entropy(p) <= math.log(p.num_classes) + 1e-12

    def test_kl_zero_iff_equal(self):
        gen = np.random.default_rng(7)
        p, q = random_pair(gen)
        assert kl(p, p) == 0.0
        assert kl(q, p) > 0.0


def perturb_rows_oracle(gen, probs):
    """Additive-noise row perturbation, independent of the library's scheme."""
    noisy = probs + 0.3 * gen.random(probs.shape) * (probs.max() + 0.05)
    return noisy / noisy.sum(axis=1, keepdims=True)


class TestClosedForms:
    def test_acgan_classifier_values(self):
        c = optimal_classifier_acgan(P_EXAMPLE)
        assert c.probs[0, 0] == pytest.approx(0.8, abs=1e-12)
        assert not c.undefined_rows.any()
        c_uni = optimal_classifier_acgan(Q_UNIFORM)
        assert np.allclose(c_uni.probs, 0.5)

    def test_acgan_classifier_flags_zero_support(self):
        p = JointTable([[0.0, 0.0], [0.5, 0.5]])
        c = optimal_classifier_acgan(p)
        assert c.undefined_rows[0] and not c.undefined_rows[1]
        assert np.isnan(c.probs[0]).all()

    def test_discriminative_classifier_symmetry_case(self):
        cd = optimal_discriminative_classifier(P_EXAMPLE, P_EXAMPLE)
        cond = P_EXAMPLE.probs / P_EXAMPLE.marginal_x()[:, None]
        assert np.allclose(cd.probs[:, :2], cond / 2.0, atol=1e-15)
        assert np.allclose(cd.probs[:, 2:], cond / 2.0, atol=1e-15)
        assert np.allclose(cd.probs.sum(axis=1), 1.0, atol=1e-12)

    def test_discriminative_classifier_mismatched_pair_zero(self):
        p = JointTable([[0.0, 0.5], [0.25, 0.25]])
        q = JointTable([[0.0, 0.25], [0.5, 0.25]])
        cd = optimal_discriminative_classifier(p, q)
        assert cd.probs[0, 0] == 0.0

    def test_twin_classifiers(self):
        c, c_mi = optimal_twin_classifiers(P_EXAMPLE, P_EXAMPLE)
        assert np.array_equal(c.probs, c_mi.probs)
        q = JointTable([[0.5, 0.0], [0.0, 0.5]])
        _, c_mi = optimal_twin_classifiers(P_EXAMPLE, q)
        assert np.allclose(c_mi.probs, np.eye(2))

    def test_discriminator_values(self):
        assert np.allclose(optimal_discriminator(P_EXAMPLE, P_EXAMPLE), 0.5)
        p = JointTable([[0.4, 0.2], [0.2, 0.2]])
        q = JointTable([[0.2, 0.1], [0.35, 0.35]])
        # p(x0) = 0.6 = 2 q(x0)
        assert optimal_discriminator(p, q)[0] == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_label_extended_rows(self):
        d = optimal_label_extended(P_EXAMPLE, P_EXAMPLE)
        assert np.allclose(d.probs[:, 0], 0.5, atol=1e-15)
        assert np.allclose(d.probs.sum(axis=1), 1.0, atol=1e-12)

    def test_undefined_row_errors(self):
        p = JointTable([[0.0, 0.0], [0.5, 0.5]])
        with pytest.raises(UndefinedRow):
            optimal_discriminative_classifier(p, p)
        with pytest.raises(UndefinedRow):
            optimal_twin_classifiers(p, p)
        with pytest.raises(UndefinedRow):
            optimal_discriminator(p, p)
        with pytest.raises(UndefinedRow):
            optimal_label_extended(p, p)

    @pytest.mark.parametrize("seed", range(20))
    def test_closed_forms_beat_perturbations(self, seed):
        """Each optimum must dominate random row-stochastic alternatives."""
        gen = np.random.default_rng(seed)
        p, q = random_pair(gen)
        k = p.num_classes
        cases = [
            ("acgan", optimal_classifier_acgan(p).probs),
            ("adc", optimal_discriminative_classifier(p, q).probs),
            ("tac_real", optimal_twin_classifiers(p, q)[0].probs),
            ("tac_fake", optimal_twin_classifiers(p, q)[1].probs),
            ("label_extended", optimal_label_extended(p, q).probs),
        ]
        for kind, probs in cases:
            best = classifier_objective(kind, p, q, probs)
            for _ in range(25):
                rival = perturb_rows_oracle(gen, probs)
                assert classifier_objective(kind, p, q, rival) <= best
        d = optimal_discriminator(p, q)
        best = classifier_objective("disc", p, q, d)
        for _ in range(25):
            rival = np.clip(d + 0.2 * (gen.random(d.shape) - 0.5), 1e-6, 1 - 1e-6)
            assert classifier_objective("disc", p, q, rival) <= best


class TestPdLogit:
    def test_equal_tables_zero(self):
        r_x, r_yx, d_star = optimal_pd_logit(P_EXAMPLE, P_EXAMPLE, 0, 1)
        assert d_star == pytest.approx(0.0, abs=1e-12)
        assert r_x == pytest.approx(0.0, abs=1e-12)

    def test_double_joint_same_marginal(self):
        p = JointTable([[0.4, 0.1], [0.1, 0.4]])
        q = JointTable([[0.2, 0.3], [0.3, 0.2]])  # same p(x), different joints
        r_x, r_yx, d_star = optimal_pd_logit(p, q, 0, 0)
        assert r_x == pytest.approx(0.0, abs=1e-12)
        assert d_star == pytest.approx(math.log(2.0), abs=1e-12)

    def test_undefined_pair_raises(self):
        p = JointTable([[0.0, 0.5], [0.25, 0.25]])
        q = JointTable([[0.0, 0.25], [0.5, 0.25]])
        with pytest.raises(UndefinedPair):
            optimal_pd_logit(p, q, 0, 0)

    @pytest.mark.parametrize("seed", range(10))
    def test_three_way_decomposition(self, seed):
        gen = np.random.default_rng(100 + seed)
        p, q = random_pair(gen)
        for x in range(p.num_points):
            for y in range(p.num_classes):
                r_x, r_yx, d_star = optimal_pd_logit(p, q, x, y)
                assert abs(r_x + r_yx - d_star) < 1e-12


class TestGeneratorObjective:
    def test_all_methods_at_equality(self):
        for method in ("adcgan", "tacgan", "pdgan"):
            assert generator_objective(method, P_EXAMPLE, P_EXAMPLE, 3.7) == \
                pytest.approx(0.0, abs=1e-12)
        assert generator_objective("acgan", P_EXAMPLE, P_EXAMPLE, 1.0) == \
            pytest.approx(conditional_entropy(P_EXAMPLE), abs=1e-12)
        assert generator_objective("acgan", P_EXAMPLE, P_EXAMPLE, 1.0) == \
            pytest.approx(0.500402, abs=1e-6)

    def test_without_js_acgan_positive_on_overlap(self):
        val = generator_objective("acgan", P_EXAMPLE, P_EXAMPLE, 1.0, include_js=False)
        assert val > 0.0

    def test_adcgan_without_js_is_joint_kl(self):
        gen = np.random.default_rng(5)
        p, q = random_pair(gen)
        assert generator_objective("adcgan", p, q, 1.0, include_js=False) == kl(q, p)

    def test_amgan_at_equality_is_entropy_plus_log2(self):
        val = generator_objective("amgan", P_EXAMPLE, P_EXAMPLE)
        assert val == pytest.approx(conditional_entropy(P_EXAMPLE) + math.log(2.0), abs=1e-12)

    def test_unknown_method_and_negative_lambda(self):
        with pytest.raises(ValueError):
            generator_objective("wgan", P_EXAMPLE, P_EXAMPLE)
        with pytest.raises(ValueError):
            generator_objective("acgan", P_EXAMPLE, P_EXAMPLE, lam=-1.0)


class TestTheoremIdentities:
    @pytest.mark.parametrize("seed", range(25))
    def test_residuals_on_random_tables(self, seed):
        gen = np.random.default_rng(1000 + seed)
        p, q = random_pair(gen)
        for tid in ("thm1", "thm2", "thm3"):
            assert verify_theorem(tid, p, q) < 1e-10
        assert verify_theorem("amgan_bound", p, q) >= -1e-12

    def test_equality_cases(self):
        p = random_joint_table(np.random.default_rng(42), 6, 4)
        for tid in ("thm1", "thm2", "thm3"):
            assert verify_theorem(tid, p, p) < 1e-12
        assert abs(verify_theorem("amgan_bound", p, p)) < 1e-12

    def test_thm1_equality_value_is_entropy(self):
        # both sides at q = p equal the conditional entropy up to sign
        c = optimal_classifier_acgan(P_EXAMPLE)
        signal = float(np.sum(P_EXAMPLE.probs * np.log(c.probs)))
        assert signal == pytest.approx(-conditional_entropy(P_EXAMPLE), abs=1e-12)

    def test_unknown_id(self):
        with pytest.raises(ValueError):
            verify_theorem("thm9", P_EXAMPLE, P_EXAMPLE)

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_thm2_identity_property(self, seed):
        gen = np.random.default_rng(seed)
        p, q = random_pair(gen)
        assert verify_theorem("thm2", p, q) < 1e-10


class TestArgminOverFamily:
    def test_family_containing_p_wins_for_adcgan(self):
        gen = np.random.default_rng(3)
        p = random_joint_table(gen, 6, 2)
        family = [random_joint_table(gen, 6, 2) for _ in range(10)] + [p]
        best, val = argmin_over_family("adcgan", p, family)
        assert val == 0.0
        assert np.array_equal(best.probs, p.probs)

    def test_empty_family(self):
        with pytest.raises(EmptyFamily):
            argmin_over_family("adcgan", P_EXAMPLE, [])

    def test_acgan_without_js_prefers_low_entropy(self):
        """Grid-search oracle: the entropy-minimizing pull picks a family
        member whose labels are sharper than the target's."""
        gen = np.random.default_rng(9)
        # overlapping 2-class target
        p = JointTable([[0.2, 0.1], [0.15, 0.15], [0.1, 0.3]])
        family = [p] + [random_joint_table(gen, 3, 2) for _ in range(200)]
        best, _ = argmin_over_family("acgan", p, family, include_js=False)
        assert conditional_entropy(best) < conditional_entropy(p)
        # independent exhaustive evaluation oracle
        vals = [generator_objective("acgan", p, q, include_js=False) for q in family]
        assert min(vals) == generator_objective("acgan", p, best, include_js=False)

    def test_tacgan_without_js_matches_exhaustive_oracle(self):
        gen = np.random.default_rng(11)
        p = random_joint_table(gen, 4, 3)
        family = [random_joint_table(gen, 4, 3) for _ in range(50)]
        best, val = argmin_over_family("tacgan", p, family, include_js=False)
        oracle = min(kl(q, p) - kl(q.marginal_x(), p.marginal_x()) for q in family)
        assert val == pytest.approx(oracle, abs=1e-12)
