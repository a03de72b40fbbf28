import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from memfrac.errors import BracketError, DomainError
from memfrac.moment_analysis import (
    DEFAULT_U_GRID,
    FAIL,
    INCONCLUSIVE,
    NO_V_EXISTS,
    PASS,
    CharacteristicFunction,
    MomentSequence,
    alternating_differences,
    beta_pairing_constraints,
    candidate_v_moments,
    charfn_case,
    charfn_ratio_probe,
    complete_monotonicity_check,
    moments_probe,
    remark_root_function,
    remark_root_solve,
    remark_roots_probe,
)
from memfrac.weights import WeightDistribution as W
from memfrac.weights import paired_v

VALID_PAIRINGS = [W.dirac(), W.beta(1, 0.5), W.beta(1, 0.3), W.beta(1, 0.9), W.expgamma(0.5), W.expgamma(0.3),
                  W.expgamma(0.8), W.bemix()]


def bernoulli_exp_ratio_modulus(u, scale):
    # |(1 - i s u) / ((1 - i u)(1 - i s u/2))|
    return math.sqrt(1 + (scale * u) ** 2) / (math.sqrt(1 + u * u) * math.sqrt(1 + (scale * u / 2) ** 2))


class TestCandidateMoments:
    def test_dirac_gives_uniform(self):
        m = candidate_v_moments(W.dirac(), 10).as_array()
        np.testing.assert_allclose(m, 1 / (1 + np.arange(11)), rtol=1e-15)

    def test_lfrac_case_gives_beta(self):
        r = np.arange(21)
        expected = np.exp(special.betaln(1.5 + r, 0.5) - special.betaln(1.5, 0.5))
        np.testing.assert_allclose(candidate_v_moments(W.beta(1, 0.5), 20).as_array(), expected, rtol=1e-13)

    def test_expgamma(self):
        r = np.arange(16)
        np.testing.assert_allclose(candidate_v_moments(W.expgamma(0.5), 15).as_array(), (1 + r) ** -0.5, rtol=1e-14)

    @pytest.mark.parametrize("w", VALID_PAIRINGS, ids=str)
    def test_matches_paired_v(self, w):
        v = paired_v(w).v
        got = candidate_v_moments(w, 30).as_array()
        np.testing.assert_allclose(got, [v.moment(r) for r in range(31)], rtol=1e-12)
        assert got[0] == 1.0 and np.all((got > 0) & (got <= 1 + 1e-15))

    def test_validation(self):
        with pytest.raises(ValueError):
            candidate_v_moments(W.dirac(), 0)
        with pytest.raises(ValueError):
            MomentSequence((0.9, 0.5))
        with pytest.raises(ValueError):
            MomentSequence((1.0, 0.0))


class TestMonotonicity:
    def test_uniform_passes(self):
        seq = MomentSequence(tuple(1 / (1 + r) for r in range(21)))
        assert complete_monotonicity_check(seq, 20).verdict == PASS

    def test_expgamma_candidate_passes(self):
        assert complete_monotonicity_check(candidate_v_moments(W.expgamma(0.3), 12), 12).passed

    def test_raised_second_moment_fails_at_first_order(self):
        vals = [1 / (1 + r) for r in range(8)]
        vals[2] = vals[1] + 0.05
        res = complete_monotonicity_check(MomentSequence(tuple(vals)), 7)
        assert res.verdict == FAIL
        k, r, value = res.first_violation
        assert (k, r) == (1, 1) and value == pytest.approx(-0.05)

    def test_differences_of_uniform_are_beta_values(self):
        # (-1)^k Δ^k m_r = B(r+1, k+1) for the uniform law
        rows = alternating_differences(MomentSequence(tuple(1 / (1 + r) for r in range(9))), 8)
        for k, row in enumerate(rows):
            np.testing.assert_allclose(row, special.beta(np.arange(row.size) + 1, k + 1), rtol=1e-10)

    def test_order_bound(self):
        with pytest.raises(ValueError):
            complete_monotonicity_check(candidate_v_moments(W.dirac(), 3), 4)

    @pytest.mark.parametrize("w", VALID_PAIRINGS, ids=str)
    def test_no_false_rejection(self, w):
        assert moments_probe(w, 10).verdict == PASS

    def test_inadmissible_weight_fails(self):
        # W = Beta(2,2) has no V: the candidate moment sequence exceeds 1
        rep = moments_probe(W.beta(2, 2), 6)
        assert rep.verdict == FAIL and rep.violations[0]["k"] == 1

    def test_report_json(self):
        d = json.loads(moments_probe(W.expgamma(0.5), 8).to_json())
        assert set(d) == {"probe", "params", "grid", "values", "verdict", "violations"}
        assert d["verdict"] == PASS and d["grid"] == list(range(9))


class TestCharFn:
    def test_example_scale_two(self):
        probe = charfn_ratio_probe(charfn_case("example43"), DEFAULT_U_GRID)
        np.testing.assert_allclose(probe.moduli, [1.00971, 1.03561, 1.15467], atol=1e-4)
        # closed form sqrt(1+4u^2)/(1+u^2)
        u = np.array(DEFAULT_U_GRID)
        np.testing.assert_allclose(probe.moduli, np.sqrt(1 + 4 * u**2) / (1 + u**2), rtol=1e-14)
        assert probe.verdict == NO_V_EXISTS and len(probe.violations) == 3

    def test_example_scale_one_is_valid(self):
        u = np.linspace(-20, 20, 401)
        probe = charfn_ratio_probe(charfn_case("example42"), u)
        assert probe.verdict == INCONCLUSIVE
        np.testing.assert_allclose(probe.moduli, 1 / np.sqrt(1 + u**2 / 4), rtol=1e-14)

    @given(st.floats(0.05, 0.95), st.floats(-50, 50))
    def test_gamma_modulus(self, a, u):
        probe = charfn_ratio_probe(CharacteristicFunction.gamma(a), [u])
        assert probe.moduli[0] == pytest.approx((1 + u * u) ** ((a - 1) / 2), rel=1e-13)
        assert probe.verdict == INCONCLUSIVE

    @given(st.floats(0.1, 4.0), st.floats(0.0, 30.0))
    def test_scale_family_modulus(self, s, u):
        probe = charfn_ratio_probe(CharacteristicFunction.bernoulli_exp(s), [u])
        assert probe.moduli[0] == pytest.approx(bernoulli_exp_ratio_modulus(u, s), rel=1e-13)

    @pytest.mark.parametrize("w", VALID_PAIRINGS, ids=str)
    def test_symmetry_and_no_false_rejection(self, w):
        u = np.linspace(-30, 30, 241)
        probe = charfn_ratio_probe(CharacteristicFunction.from_weight(w), u)
        assert probe.verdict == INCONCLUSIVE
        np.testing.assert_allclose(probe.values[::-1], np.conj(probe.values), atol=1e-14)
        zero = charfn_ratio_probe(CharacteristicFunction.from_weight(w), [0.0]).values[0]
        assert abs(zero - 1.0) <= 1e-14

    def test_beta_log_mellin_against_mpmath(self):
        cf = CharacteristicFunction.from_weight(W.beta(1, 0.5))
        for u in (0.3, 2.0, 11.0):
            expected = mp.gamma(1 - 1j * u) * mp.gamma(1.5) / (mp.gamma(1.5 - 1j * u) * mp.gamma(1))
            assert abs(cf(np.array([u]))[0] - complex(expected)) < 1e-13

    def test_cases(self):
        assert charfn_case("gamma:0.4").params == {"shape": 0.4}
        assert charfn_case("bemix-scale:3").params == {"scale": 3.0}
        with pytest.raises(DomainError):
            charfn_case("nope")
        with pytest.raises(DomainError):
            charfn_case("gamma:-1")

    def test_report(self):
        d = charfn_ratio_probe(charfn_case("example43"), DEFAULT_U_GRID).report({"case": "example43"}).to_dict()
        assert d["verdict"] == NO_V_EXISTS and len(d["values"]["modulus"]) == 3


class TestBetaPairingRoots:
    def test_constraints(self):
        c = beta_pairing_constraints(0.99, 0.5)
        assert (c.beta_tilde, c.alpha_tilde_lower) == (0.5, 1.0)
        c = beta_pairing_constraints(0.2, 0.3)
        assert c.beta_tilde == pytest.approx(0.7) and c.alpha_tilde_lower == pytest.approx(0.5)
        with pytest.raises(DomainError):
            beta_pairing_constraints(0.5, 1.0)

    def test_published_roots(self):
        assert remark_root_solve(0.99, 0.5, 1).root == pytest.approx(1.51284, abs=1e-4)
        assert remark_root_solve(0.99, 0.5, 2).root == pytest.approx(1.51183, abs=1e-4)

    def test_roots_against_mpmath(self):
        for r in (1, 2, 3):
            target = mp.loggamma(mp.mpf(0.99) + 0.5 + r) - mp.log(1 + r) - mp.loggamma(mp.mpf(0.99) + r)
            root = mp.findroot(lambda a: mp.loggamma(a + r) - mp.loggamma(a + r + 0.5) - target, 1.5)
            assert remark_root_solve(0.99, 0.5, r).root == pytest.approx(float(root), abs=1e-10)

    @pytest.mark.parametrize("beta", [0.2, 0.5, 0.8])
    def test_lfrac_case_root_independent_of_r(self, beta):
        roots = [remark_root_solve(1.0, beta, r).roots for r in range(1, 6)]
        for rs in roots:
            assert len(rs) == 1 and rs[0] == pytest.approx(1 + beta, abs=1e-9)

    @given(st.floats(0.05, 1.0), st.floats(0.05, 0.95), st.integers(1, 6))
    def test_residual(self, alpha, beta, r):
        try:
            res = remark_root_solve(alpha, beta, r)
        except BracketError:
            return
        F = remark_root_function(alpha, beta, r)
        for x, rel in zip(res.roots, res.residuals):
            assert rel < 1e-8
            assert abs(F(x)) / max(1.0, abs(F.target)) < 1e-8
            assert x > res.bracket[0]

    def test_bracket_error(self):
        # β near 1: the gamma ratio decays too slowly to reach the target before ã = 50
        with pytest.raises(BracketError, match="no sign change"):
            remark_root_solve(0.5, 0.95, 1)
        with pytest.raises(DomainError):
            remark_root_solve(0.5, 0.5, 0)

    def test_probe_flags_discrepancy(self):
        rep = remark_roots_probe(0.99, 0.5, (1, 2))
        assert rep.verdict == NO_V_EXISTS
        assert rep.violations[0]["discrepancy"] > 1e-3

    def test_probe_lfrac_case_inconclusive(self):
        assert remark_roots_probe(1.0, 0.5, (1, 2, 3)).verdict == INCONCLUSIVE
