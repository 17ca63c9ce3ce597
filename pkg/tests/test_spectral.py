"""Extremal factors and conjugate phase construction.

Golden values for the reference model are recomputed here in exact rational
arithmetic before being compared against the floating-point pipeline.
"""

from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

import spectralfactors as sf
from spectralfactors.spectral import outer_to_plus, plus_to_bar_plus

from helpers import random_outer, ref_density_entry


def _sqrt_fraction(q):
    """Exact square root of a Fraction that is a perfect square."""
    from math import isqrt
    num, den = isqrt(q.numerator), isqrt(q.denominator)
    assert num * num == q.numerator and den * den == q.denominator
    return Fraction(num, den)


def rational_reference_chain():
    """The whole construction chain for the reference model over Fractions,
    channel by channel (the model is two decoupled scalar channels)."""
    a = Fraction(1, 2)
    zeros = (Fraction(1, 4), Fraction(1, 3))
    out = {"x": [], "u1": [], "g1": [], "b_plus": [], "d_plus": [],
           "y": [], "h2": [], "u2": [], "g2": [], "z": [],
           "b_t": [], "d_t": []}
    for gz in zeros:
        h1 = a - gz                       # D^{-1} C entry; gz is the zero
        x = (h1 * h1) / (gz * gz - 1)     # gz^2 x - x = h1^2
        u1 = _sqrt_fraction(1 + h1 * h1 / x)
        g1 = gz / x * h1 / u1
        b_plus = u1 + g1                  # B = D = 1 per channel
        d_plus = u1
        y = (b_plus * b_plus) / (1 - a * a)   # y = a^2 y + b_plus^2
        h2 = b_plus / a
        u2 = _sqrt_fraction(1 + h2 * h2 / y)
        g2 = (1 / a) / y * h2 / u2
        out["x"].append(x)
        out["u1"].append(u1)
        out["g1"].append(g1)
        out["b_plus"].append(b_plus)
        out["d_plus"].append(d_plus)
        out["y"].append(y)
        out["h2"].append(h2)
        out["u2"].append(u2)
        out["g2"].append(g2)
        out["z"].append(y + 1 / x)
        out["b_t"].append(g1 * u2 + g2 / x)
        out["d_t"].append(u1 * u2)
    return out


RATIONAL = rational_reference_chain()


def as_diag(key):
    return np.diag([float(v) for v in RATIONAL[key]])


class TestZeroMatrix:
    def test_reference(self, ref_model):
        assert_allclose(sf.zero_matrix(ref_model), np.diag([0.25, 1 / 3]),
                        atol=1e-15)

    def test_zero_input(self):
        r = sf.Realization(0.5 * np.eye(2), np.zeros((2, 2)), np.eye(2), np.eye(2))
        assert_allclose(sf.zero_matrix(r), r.a)

    def test_zero_output(self):
        r = sf.Realization(0.5 * np.eye(2), np.eye(2), np.zeros((2, 2)), np.eye(2))
        assert_allclose(sf.zero_matrix(r), r.a)


class TestValidateOuter:
    def test_reference_passes(self, ref_model):
        sf.validate_outer(ref_model)

    def test_unstable_pole(self):
        r = sf.Realization(1.5 * np.eye(2), np.eye(2), 0.1 * np.eye(2), np.eye(2))
        with pytest.raises(sf.NotOuter):
            sf.validate_outer(r)

    def test_unstable_zero(self):
        r = sf.Realization(0.5 * np.eye(2), np.eye(2), -np.eye(2), np.eye(2))
        with pytest.raises(sf.NotOuter):
            sf.validate_outer(r)

    def test_singular_state_matrix(self):
        r = sf.Realization(np.diag([0.5, 0.0]), np.eye(2),
                           np.diag([0.25, 1 / 6]), np.eye(2))
        with pytest.raises(sf.NotOuter):
            sf.validate_outer(r)

    def test_singular_feedthrough(self):
        r = sf.Realization(0.5 * np.eye(2), np.eye(2), 0.1 * np.eye(2),
                           np.diag([1.0, 0.0]))
        with pytest.raises(sf.SingularFeedthrough):
            sf.validate_outer(r)

    def test_non_minimal(self, ref_model):
        a = np.zeros((4, 4))
        a[:2, :2] = ref_model.a
        a[2:, 2:] = ref_model.a
        padded = sf.Realization(a, np.vstack([ref_model.b, ref_model.b]),
                                np.hstack([ref_model.c, np.zeros((2, 2))]),
                                ref_model.d)
        with pytest.raises(sf.NotOuter):
            sf.validate_outer(padded)


class TestOuterToPlus:
    def test_reference_chain(self, ref_model):
        stage = outer_to_plus(ref_model)
        assert RATIONAL["x"] == [Fraction(-1, 15), Fraction(-1, 32)]
        assert_allclose(stage.x, as_diag("x"), atol=1e-14)
        assert_allclose(stage.u1, as_diag("u1"), atol=1e-14)
        assert_allclose(stage.g1, as_diag("g1"), atol=1e-13)
        assert_allclose(stage.b_plus, as_diag("b_plus"), atol=1e-13)
        assert_allclose(stage.d_plus, as_diag("d_plus"), atol=1e-14)
        assert sf.is_all_pass(stage.t1, tol=1e-10)

    def test_flipped_zeros(self, ref_model):
        stage = outer_to_plus(ref_model)
        pz = sf.poles_zeros(stage.w_plus)
        assert_allclose(sorted(pz.zeros.real), [3.0, 4.0], atol=1e-10)
        assert_allclose(sorted(pz.poles.real), [0.5, 0.5], atol=1e-12)

    def test_constant_model(self):
        stage = outer_to_plus(sf.identity(2))
        assert stage.t1.n == 0
        assert_allclose(stage.t1.d, np.eye(2))
        assert stage.w_plus.n == 0


class TestPlusToBarPlus:
    def test_reference_chain(self, ref_model):
        stage2 = plus_to_bar_plus(outer_to_plus(ref_model).w_plus)
        assert RATIONAL["y"] == [Fraction(49, 3), Fraction(100, 3)]
        assert_allclose(stage2.y, as_diag("y"), rtol=1e-13)
        assert_allclose(stage2.h2, as_diag("h2"), atol=1e-13)
        assert_allclose(stage2.u2, as_diag("u2"), atol=1e-13)
        assert_allclose(stage2.g2, as_diag("g2"), atol=1e-13)
        assert sf.is_all_pass(stage2.t2, tol=1e-10)

    def test_conjugate_outer_value_at_zero(self, ref_model):
        # entry (1,1) of the conjugate outer factor is (1/2)(z-4)/(z-2)
        z = Fraction(0)
        expected = Fraction(1, 2) * (z - 4) / (z - 2)
        assert expected == 1
        stage2 = plus_to_bar_plus(outer_to_plus(ref_model).w_plus)
        assert_allclose(sf.evalfr(stage2.w_bar_plus, 0.0)[0, 0],
                        float(expected), atol=1e-12)

    def test_direct_form_matches_cascade(self, ref_model, config):
        stage1 = outer_to_plus(ref_model)
        stage2 = plus_to_bar_plus(stage1.w_plus)
        cascade = sf.minimal(sf.series(stage1.w_plus, stage2.t2))
        assert cascade.n == stage2.w_bar_plus.n == 2
        from spectralfactors.statespace import eval_gap
        assert eval_gap(cascade, stage2.w_bar_plus) <= 1e-10

    def test_constant_model(self):
        stage2 = plus_to_bar_plus(sf.identity(2))
        assert stage2.t2.n == 0


class TestConjugatePhase:
    def test_reference_realization(self, ref_cp):
        assert_allclose(ref_cp.t.a, np.diag([0.25, 1 / 3, 2.0, 2.0]), atol=1e-13)
        b_expect = np.zeros((4, 2))
        b_expect[0, 0] = float(RATIONAL["b_t"][0])
        b_expect[1, 1] = float(RATIONAL["b_t"][1])
        b_expect[2, 0] = float(RATIONAL["g2"][0])
        b_expect[3, 1] = float(RATIONAL["g2"][1])
        assert RATIONAL["b_t"] == [Fraction(-15, 14), Fraction(-16, 15)]
        assert_allclose(ref_cp.t.b, b_expect, atol=1e-13)
        c_expect = np.array([[0.25, 0.0, 2.0, 0.0], [0.0, 1 / 6, 0.0, 2.0]])
        assert_allclose(ref_cp.t.c, c_expect, atol=1e-13)
        assert RATIONAL["d_t"] == [Fraction(1, 2), Fraction(2, 3)]
        assert_allclose(ref_cp.t.d, as_diag("d_t"), atol=1e-13)

    def test_reference_gramian_inverse(self, ref_cp):
        expected = np.zeros((4, 4))
        expected[:2, :2] = as_diag("x")
        expected[2:, 2:] = np.diag([float(v) for v in RATIONAL["z"]])
        expected[:2, 2:] = -np.eye(2)
        expected[2:, :2] = -np.eye(2)
        assert RATIONAL["z"] == [Fraction(4, 3), Fraction(4, 3)]
        assert_allclose(ref_cp.p0_inv, expected, atol=1e-13)

    def test_gramian_closed_form_matches_inversion(self, ref_cp, config):
        num_inv = np.linalg.inv(ref_cp.p0)
        assert np.linalg.norm(num_inv - ref_cp.p0_inv) <= config.residual_tol * (
            1.0 + np.linalg.norm(ref_cp.p0_inv))

    def test_degree_and_blocks(self, ref_cp):
        assert ref_cp.t.n == 4
        assert ref_cp.n_gamma == ref_cp.n_a == 2
        assert sf.mcmillan_degree(ref_cp.t) == 4
        assert_allclose(ref_cp.gamma, np.diag([0.25, 1 / 3]), atol=1e-14)
        assert_allclose(ref_cp.a_inv_t, 2.0 * np.eye(2), atol=1e-14)

    def test_constant_model(self):
        cp = sf.conjugate_phase(sf.identity(2))
        assert cp.t.n == 0
        assert_allclose(cp.t.d, np.eye(2))


class TestSpectrumSample:
    def test_reference_at_one(self, ref_model):
        expected = [float(ref_density_entry(Fraction(1), i)) for i in range(2)]
        assert expected == [2.25, 16.0 / 9.0]
        assert_allclose(sf.spectrum_sample(ref_model, 1.0), np.diag(expected),
                        atol=1e-13)

    def test_candidate_shares_spectrum(self, ref_model, ref_values):
        z = np.exp(0.4j)
        phi_ref = sf.spectrum_sample(ref_model, z)
        phi_cand = sf.spectrum_sample(ref_values["w_bar_minus"], z)
        assert_allclose(phi_cand, phi_ref, atol=1e-12)

    def test_all_pass_spectrum_is_identity(self, ref_values):
        t_bar = ref_values["divisor_2"]
        for z in np.exp(1j * np.array([0.0, 1.1, 2.9])):
            assert_allclose(sf.spectrum_sample(t_bar, z), np.eye(2), atol=1e-12)

    def test_off_circle_uses_reciprocal(self, ref_model):
        z = 1.7
        expected = np.diag([float(ref_density_entry(Fraction(17, 10), i))
                            for i in range(2)])
        assert_allclose(sf.spectrum_sample(ref_model, z).real, expected,
                        atol=1e-12)


class TestIsAllPass:
    def test_reference_divisor(self, ref_values):
        assert sf.is_all_pass(ref_values["divisor_2"])

    def test_outer_factor_is_not(self, ref_model):
        assert not sf.is_all_pass(ref_model)

    def test_constant_orthogonal(self):
        th = 0.7
        q = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        assert sf.is_all_pass(sf.constant(q))
        assert not sf.is_all_pass(sf.constant(2.0 * q))


class TestGramianIdentities:
    def test_reference_residuals(self, ref_cp):
        check = sf.check_gramian_identities(ref_cp)
        assert check.passed
        assert max(check.residuals().values()) <= 1e-10

    def test_perturbation_detected(self, ref_cp):
        from dataclasses import replace
        bumped = replace(ref_cp, t=sf.Realization(
            ref_cp.t.a, ref_cp.t.b + 1e-3, ref_cp.t.c, ref_cp.t.d))
        check = sf.check_gramian_identities(bumped)
        assert not check.passed
        assert 1e-5 <= check.state_residual <= 1e-1

    def test_constant_vacuous(self):
        cp = sf.conjugate_phase(sf.identity(2))
        assert sf.check_gramian_identities(cp).passed


@pytest.mark.parametrize("seed", range(8))
class TestRandomModelInvariants:
    def test_structure(self, seed, config):
        w = random_outer(seed, n_max=4)
        cp = sf.conjugate_phase(w, config)
        ext = cp.extremals
        n = w.n
        # sign structure of the two Stein solutions
        assert np.all(np.linalg.eigvalsh(ext.x) < 0)
        assert np.all(np.linalg.eigvalsh(ext.y) > 0)
        # coupling identity Z = B B^T + A Z A^T
        resid = np.linalg.norm(ext.z - w.b @ w.b.T - w.a @ ext.z @ w.a.T)
        assert resid <= config.residual_tol * (1 + np.linalg.norm(ext.z))
        # all-pass quotients and the conjugate phase itself
        assert sf.is_all_pass(ext.t1, tol=1e-7, samples=128)
        assert sf.is_all_pass(ext.t2, tol=1e-7, samples=128)
        assert sf.is_all_pass(cp.t, tol=1e-7, samples=128)
        assert sf.mcmillan_degree(cp.t) == 2 * n
        # spectra of all extremal factors agree
        zs = np.exp(2j * np.pi * np.arange(64) / 64)
        phi = sf.spectrum_samples(w, zs)
        for other in (ext.w_plus, ext.w_bar_plus):
            gap = np.max(np.abs(sf.spectrum_samples(other, zs) - phi))
            assert gap <= config.residual_tol * (1 + np.max(np.abs(phi)))
        # pole reflection of the conjugate outer factor
        rec = np.sort(1.0 / np.linalg.eigvals(w.a).conj())
        got = np.sort(np.linalg.eigvals(ext.w_bar_plus.a))
        assert np.max(np.abs(np.sort_complex(rec) - np.sort_complex(got))) <= 1e-8
        # closed-form Gramian inverse against numerical inversion
        gap = np.linalg.norm(np.linalg.inv(cp.p0) - cp.p0_inv)
        assert gap <= config.residual_tol * (1 + np.linalg.norm(cp.p0_inv))
