import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from memfrac.errors import AxiomError, NoKnownPairing, ParseError
from memfrac.specfun import beta_fn
from memfrac.weights import (
    MEMORY_CONDITION,
    WeightDistribution,
    admissible,
    expectation,
    expectation_rule,
    moment,
    paired_v,
    parse_weight,
    require_admissible,
    sample,
)

W = WeightDistribution
FAMILIES = [W.dirac(), W.beta(1, 0.5), W.beta(1, 0.7), W.beta(0.99, 0.5), W.beta(2, 3), W.expgamma(0.5),
            W.expgamma(0.3), W.bemix(), W.uniform()]
PAIRED = [W.dirac(), W.beta(1, 0.5), W.beta(1, 0.7), W.lfrac(0.2), W.expgamma(0.5), W.expgamma(0.3), W.bemix(),
          W.uniform()]


class TestMoments:
    def test_closed_form_examples(self):
        assert moment(W.expgamma(0.5), 3) == pytest.approx(0.5, rel=1e-15)
        assert moment(W.bemix(), 1) == 0.75
        assert moment(W.beta(1, 0.5), 1) == pytest.approx(2 / 3, rel=1e-14)
        assert moment(W.uniform(), 4) == 0.2
        assert moment(W.dirac(), 7) == 1.0

    def test_beta_function_oracle(self):
        w = W.beta(0.7, 0.4)
        assert moment(w, 2) == pytest.approx(beta_fn(2.7, 0.4) / beta_fn(0.7, 0.4), rel=1e-13)

    @pytest.mark.parametrize("w", FAMILIES, ids=str)
    def test_monotone_and_bounded(self, w):
        m = np.array([moment(w, n) for n in range(101)])
        assert m[0] == 1.0
        assert np.all(np.diff(m) <= 0)
        assert np.all(m > 0)

    @given(st.floats(0.05, 5.0), st.floats(0.05, 5.0), st.integers(0, 60))
    def test_beta_monotone_property(self, a, b, n):
        w = W.beta(a, b)
        assert moment(w, n + 1) <= moment(w, n)

    @pytest.mark.parametrize("w", FAMILIES, ids=str)
    def test_monte_carlo_oracle(self, w):
        draws = sample(w, 200_000, np.random.default_rng(11))
        for n in (1, 3):
            vals = draws**n
            se = vals.std() / math.sqrt(vals.size)
            assert abs(vals.mean() - moment(w, n)) < 5 * se + 1e-12

    def test_negative_order(self):
        with pytest.raises(ValueError):
            moment(W.bemix(), -1)


class TestAdmissibility:
    def test_uniform_rejected(self):
        verdict = admissible(W.uniform())
        assert not verdict and verdict.limit == 1.0
        with pytest.raises(AxiomError) as info:
            require_admissible(W.uniform())
        assert info.value.condition == MEMORY_CONDITION
        assert MEMORY_CONDITION in str(info.value)

    def test_examples(self):
        assert admissible(W.dirac())
        assert admissible(W.beta(0.99, 0.5))
        assert admissible(W.bemix())
        assert admissible(W.expgamma(0.5))

    def test_boundary_cases(self):
        assert admissible(W.beta(2.0, 1.0)).limit == 2.0
        assert admissible(W.beta(2.0, 1.5)).limit == 0.0
        assert admissible(W.expgamma(1.0)).limit == 1.0
        assert not admissible(W.expgamma(2.0))

    @pytest.mark.parametrize(
        "w,rate",
        [
            (W.beta(1, 0.5), lambda n: math.gamma(1.5) * n**0.5),
            (W.beta(1, 0.7), lambda n: math.gamma(1.7) * n**0.3),
            (W.beta(0.99, 0.5), lambda n: math.exp(math.lgamma(1.49) - math.lgamma(0.99)) * n**0.5),
            (W.expgamma(0.5), lambda n: n**0.5),
            (W.bemix(), lambda n: n / 2),
        ],
        ids=lambda v: str(v) if isinstance(v, W) else "",
    )
    def test_growth_matches_family_rate(self, w, rate):
        growth = [n * moment(w, n) for n in (10**2, 10**3, 10**4, 10**5)]
        assert all(b > a for a, b in zip(growth, growth[1:]))
        n = 10**6
        assert n * moment(w, n) / rate(n) == pytest.approx(1.0, abs=1e-2)

    @pytest.mark.parametrize("w", [W.uniform(), W.beta(2, 1.5), W.expgamma(1.5)], ids=str)
    def test_inadmissible_growth_is_bounded(self, w):
        limit = admissible(w).limit
        gaps = [abs(n * moment(w, n) - limit) for n in (10**4, 10**5, 10**6)]
        assert gaps[2] < gaps[1] < gaps[0] and gaps[2] < 5e-3


class TestPairing:
    def test_lfrac_pairing(self):
        p = paired_v(W.beta(1, 0.5))
        assert p.v == W.beta(1.5, 0.5)
        assert p.v_kind == "beta"

    def test_dirac_pairing(self):
        assert paired_v(W.dirac()).v == W.uniform()

    def test_special_pairings(self):
        assert paired_v(W.expgamma(0.3)).v == W.expgamma(0.7)
        assert paired_v(W.bemix()).v == W.beta(2, 1)
        assert paired_v(W.uniform()).v == W.dirac()

    @pytest.mark.parametrize("w", PAIRED, ids=str)
    def test_moment_identity(self, w):
        assert paired_v(w).identity_defect(50) < 1e-12

    def test_halfexp_is_beta21(self):
        # -log V ~ Exp(1)/2 has E[V^n] = 2/(2+n), the Beta(2, 1) moments
        v = paired_v(W.bemix()).v
        for n in range(20):
            assert moment(v, n) == pytest.approx(2 / (2 + n), rel=1e-14)

    @pytest.mark.parametrize("w", [W.beta(0.99, 0.5), W.beta(2, 0.5), W.expgamma(1.5)], ids=str)
    def test_no_known_pairing(self, w):
        with pytest.raises(NoKnownPairing):
            paired_v(w)


class TestExpectationRule:
    def test_beta_moments_32_nodes(self):
        rule = expectation_rule(W.beta(1, 0.5), 32)
        for n in range(21):
            assert rule.expect(lambda u: u**n) == pytest.approx(moment(W.beta(1, 0.5), n), rel=1e-12)

    def test_dirac_atom(self):
        rule = expectation_rule(W.dirac(), 5)
        assert rule.expect(np.cos) == pytest.approx(math.cos(1.0))

    def test_expgamma_48_nodes(self):
        rule = expectation_rule(W.expgamma(0.3), 48)
        assert rule.expect(lambda u: u**2) == pytest.approx(3**-0.3, rel=1e-10)

    @pytest.mark.parametrize("w", FAMILIES, ids=str)
    def test_all_families_against_moments(self, w):
        for n in range(21):
            got = expectation(w, lambda u: u**n)
            assert abs(got - moment(w, n)) < 1e-10

    @pytest.mark.parametrize("w", FAMILIES, ids=str)
    def test_positive_unit_mass(self, w):
        rule = expectation_rule(w, 64)
        assert np.all(rule.all_weights > 0)
        assert rule.all_weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all((rule.all_nodes >= 0) & (rule.all_nodes <= 1))

    def test_vector_valued_integrand(self):
        rule = expectation_rule(W.bemix(), 16)
        got = rule.expect(lambda u: np.stack([u, u**2], axis=1))
        np.testing.assert_allclose(got, [moment(W.bemix(), 1), moment(W.bemix(), 2)], rtol=1e-14)

    def test_too_few_nodes(self):
        with pytest.raises(ValueError):
            expectation_rule(W.uniform(), 1)


class TestParsing:
    @pytest.mark.parametrize("w", FAMILIES, ids=str)
    def test_round_trip(self, w):
        assert parse_weight(str(w)) == w

    @given(st.floats(0.01, 100), st.floats(0.01, 100))
    def test_beta_round_trip_property(self, a, b):
        assert parse_weight(f"beta:{a!r},{b!r}") == W.beta(a, b)

    @pytest.mark.parametrize(
        "text,pos",
        [("gauss", 0), ("beta:1", 4), ("beta:1,x", 7), ("expgamma:", 9), ("beta:1;2", 6), ("beta:-1,0.5", 5)],
    )
    def test_errors_carry_position(self, text, pos):
        with pytest.raises(ParseError) as info:
            parse_weight(text)
        assert info.value.position == pos
        assert f"position {pos}" in str(info.value)

    def test_invalid_construction(self):
        with pytest.raises(ValueError):
            W("beta", 1.0)
        with pytest.raises(ValueError):
            W("dirac", 1.0)
        with pytest.raises(ValueError):
            W("cauchy")
