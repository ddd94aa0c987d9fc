from fractions import Fraction

import mpmath
import pytest
from hypothesis import example, given, strategies as st

from cartan_hartogs.algebra import BiPoly, UniPoly, rising_factorial
from cartan_hartogs.domains import alpha_threshold, ball, cartan_catalog, hua_polynomial, make_spec, thullen
from cartan_hartogs.epsilon import (
    AlphaError,
    EpsilonReport,
    NotPolynomialError,
    PolynomialityVerdict,
    Status,
    b_coefficient,
    balanced_check,
    berezin_report,
    epsilon_coeffs,
    epsilon_from_kernel,
    epsilon_series,
    nu_zero_coeffs,
    nu_zero_reduction_check,
    kernel_eval,
    phi_build,
    polynomiality_check,
    psi_denominator,
    psi_eval,
    psi_numerator,
    psi_parts,
    sigma,
    sigma_enumerated,
)

from conftest import rationals

X = UniPoly.x()
HALF = Fraction(1, 2)


def balanced_thullen(mu):
    mu = Fraction(mu)
    return thullen(mu, (1 - mu) / (2 * mu))


class TestSigma:
    @pytest.mark.parametrize("nu", [0, HALF, Fraction(-1, 3), 2])
    def test_thullen(self, nu):
        spec = thullen(1, nu)
        assert (sigma(spec, 0), sigma(spec, 1)) == (nu, 1)

    def test_nu_zero(self):
        spec = make_spec([(ball(2), 1, 0), (cartan_catalog("I", 2, 2), 2, 0)], 1)
        assert [sigma(spec, t) for t in range(spec.d + 1)] == [0] * spec.d + [1]

    def test_two_discs(self):
        n1, n2 = Fraction(1, 3), Fraction(2, 5)
        spec = make_spec([(ball(1), 1, n1), (ball(1), 1, n2)], 1)
        assert [sigma(spec, t) for t in range(3)] == [n1 * n2, n1 + n2, 1]

    def test_frozen_mixed(self):
        spec = make_spec([(ball(2), 1, Fraction(1, 3)), (ball(1), 1, Fraction(2, 5))], 1)
        assert [str(sigma(spec, t)) for t in range(4)] == ["2/45", "17/45", "16/15", "1"]

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            sigma(thullen(1, 0), 2)

    @given(st.lists(st.tuples(st.integers(1, 3), rationals(-0, 3)), min_size=1, max_size=3))
    def test_matches_enumeration(self, factors):
        spec = make_spec([(ball(d), 1, nu) for d, nu in factors], 1)
        for t in range(spec.d + 1):
            assert sigma(spec, t) == sigma_enumerated(spec, spec.d - t)


class TestPsi:
    @pytest.mark.parametrize("mu,nu", [(1, 0), (HALF, HALF), (2, 3)])
    def test_thullen_parts(self, mu, nu):
        mu, nu, alpha = Fraction(mu), Fraction(nu), Fraction(11)
        num, den = psi_parts(thullen(mu, nu), alpha)
        y = UniPoly.x()
        assert num == (y + (1 + nu) * alpha).scale(mu) - 1
        assert den == (y + alpha - 1 + nu * (alpha - 2)).scale(mu)

    def test_nu_zero_denominator(self):
        spec = make_spec([(ball(2), HALF, 0), (ball(1), 3, 0)], 1)
        bx, by = BiPoly.x(), BiPoly.y()
        expected = BiPoly.constant(HALF**2 * 3) * (bx + by - 3) * (bx + by - 2) * (bx + by - 1)
        assert psi_denominator(spec) == expected

    def test_value_at_origin(self):
        assert psi_eval(thullen(1, 0), 5, 0) == 1

    def test_nu_zero_reduction(self):
        spec = make_spec([(ball(2), HALF, 0)], 1)
        chi = hua_polynomial(ball(2))
        for alpha, t in [(Fraction(13), 0), (Fraction(29, 2), 3)]:
            expected = chi(HALF * (alpha + t) - 3) / (HALF**2 * rising_factorial(alpha + t - 2, 2))
            assert psi_eval(spec, alpha, t) == expected

    def test_large_t_limit(self):
        assert abs(psi_eval(thullen(1, 1), 5, 10**6) - 1) < Fraction(1, 10**4)

    def test_degree_and_leading_coefficient(self):
        spec = make_spec([(cartan_catalog("I", 2, 2), HALF, Fraction(1, 3)), (ball(1), 2, 1)], 1)
        lead = HALF**4 * 2
        for part in (psi_numerator(spec), psi_denominator(spec)):
            assert part.degree_in("y") == spec.d
            assert part.coefficients_in("y")[spec.d] == UniPoly([lead])


class TestPolynomiality:
    @pytest.mark.parametrize("mu", [HALF, 1, 2, Fraction(3, 5)])
    def test_balanced_thullen(self, mu):
        v = polynomiality_check(balanced_thullen(mu))
        assert v.status is Status.POLYNOMIAL_ALL_ALPHA
        assert v.alpha_independent_phi() == X - 1

    def test_failure_witness_fixed(self):
        v = polynomiality_check(thullen(1, 1), [5])
        assert v.status is Status.NOT_POLYNOMIAL
        assert v.witness == UniPoly([-6])
        assert v.failed_alpha == 5

    def test_failure_witness_symbolic(self):
        # remainder -2(alpha - 2) from an independent sympy division over Q(alpha)
        v = polynomiality_check(thullen(1, 1))
        assert v.witness == BiPoly.y() * -2 + 4

    @pytest.mark.parametrize(
        "base,mu,expected",
        [
            (ball(1), HALF, ["-2", "1"]),
            (ball(3), HALF, ["-48", "44", "-12", "1"]),
            (ball(3), 1, ["-6", "11", "-6", "1"]),
            (cartan_catalog("I", 2, 2), HALF, ["192", "-224", "92", "-16", "1"]),
            (cartan_catalog("I", 2, 2), 1, ["12", "-28", "23", "-8", "1"]),
        ],
    )
    def test_nu_zero_frozen(self, base, mu, expected):
        v = polynomiality_check(make_spec([(base, mu, 0)], 1))
        assert v.status is Status.POLYNOMIAL_ALL_ALPHA
        assert v.alpha_independent_phi().to_strings() == expected

    def test_fixed_mode_agrees_with_symbolic(self):
        spec = make_spec([(ball(2), HALF, 0), (ball(1), 1, 0)], 2)
        sym = polynomiality_check(spec)
        fixed = polynomiality_check(spec, [13, Fraction(27, 2)])
        assert fixed.status is Status.POLYNOMIAL_AT_ALPHA
        assert fixed.phi_at(13) == sym.phi_at(13)

    def test_alpha_below_threshold(self):
        with pytest.raises(AlphaError):
            polynomiality_check(thullen(1, 0), [2])

    def test_verdict_invariants(self):
        with pytest.raises(ValueError):
            PolynomialityVerdict(Status.NOT_POLYNOMIAL)
        with pytest.raises(ValueError):
            PolynomialityVerdict(Status.POLYNOMIAL_ALL_ALPHA, phi=BiPoly.x(), witness=BiPoly.x())

    def test_phi_build_symbolic_is_pair(self):
        sym = phi_build(balanced_thullen(HALF))
        assert sym.num.degree_in("x") >= sym.den.degree_in("x")


class TestClosedForm:
    @pytest.mark.parametrize("mu", [HALF, 1, 2])
    def test_constant_epsilon(self, mu):
        alpha = Fraction(9)
        cf = epsilon_coeffs(balanced_thullen(mu), alpha)
        assert cf.diffs == (0, 1)
        assert cf.coeffs == (0, (alpha - 2) * (alpha - 1))
        assert cf.is_constant()

    def test_not_polynomial(self):
        with pytest.raises(NotPolynomialError):
            epsilon_coeffs(thullen(1, 1), 5)

    def test_two_discs_frozen(self):
        # 4 s^2 - 28 s + 144 from sympy
        cf = epsilon_coeffs(make_spec([(ball(1), 1, 0), (ball(1), 1, 0)], 1), 7)
        assert cf.value(HALF) == 131
        assert cf.as_poly_in_one_minus_s().to_strings() == ["120", "20", "4"]

    def test_top_coefficient(self):
        spec = make_spec([(ball(2), HALF, 0), (ball(1), 2, 0)], 2)
        alpha = Fraction(31, 2)
        cf = epsilon_coeffs(spec, alpha)
        assert cf.coeffs[-1] == rising_factorial(alpha - spec.n, spec.n)

    @pytest.mark.parametrize(
        "spec,alpha",
        [
            (thullen(1, 0), 5),
            (make_spec([(ball(1), 1, 0), (ball(1), 2, 0)], 2), 9),
            (make_spec([(ball(3), HALF, 0)], 1), 13),
        ],
    )
    def test_nu_zero_paths_agree(self, spec, alpha):
        assert nu_zero_reduction_check(spec, alpha)
        assert nu_zero_coeffs(spec, alpha) == epsilon_coeffs(spec, alpha).coeffs

    def test_b_coefficient(self):
        cf = epsilon_coeffs(thullen(1, 0), 5)
        const, slope = b_coefficient(cf)
        assert const == -3
        assert slope == cf.diffs[0]


class TestSeries:
    def test_constant_value(self):
        res = epsilon_series(thullen(1, 0), 5, Fraction(3, 10))
        assert res.converged
        assert abs(res.value - 12) < 1e-9

    def test_origin_single_term(self):
        spec = thullen(1, 1)
        res = epsilon_series(spec, 7, 0)
        assert res.terms == 1
        expected = rising_factorial(Fraction(5), 2) * psi_eval(spec, 7, 0)
        assert abs(res.value - mpmath.mpf(expected.numerator) / expected.denominator) < 1e-12

    def test_two_discs_against_closed_form(self):
        spec = make_spec([(ball(1), 1, 0), (ball(1), 1, 0)], 1)
        res = epsilon_series(spec, 7, HALF)
        assert abs(res.value - 131) < 1e-9

    def test_outside_domain(self):
        with pytest.raises(ValueError):
            epsilon_series(thullen(1, 0), 5, 1)

    def test_truncation_cap(self):
        res = epsilon_series(thullen(1, 0), 5, Fraction(99, 100), max_terms=10)
        assert not res.converged
        assert res.terms == 10

    def test_kernel_round_trip(self):
        spec = thullen(1, 0)
        phi = 0.37
        k = kernel_eval(spec, 5, Fraction(1, 4), phi)
        assert abs(epsilon_from_kernel(5, k, phi) - 12) < 1e-20
        assert abs(kernel_eval(spec, 5, Fraction(1, 4), 0.0) - 12) < 1e-20


class TestBalanced:
    @pytest.mark.parametrize("mu", [HALF, 1, 2])
    def test_balanced_family(self, mu):
        res = balanced_check(balanced_thullen(mu))
        assert res.balanced and res.reindex_ok
        assert res.residual.is_zero()

    def test_hand_expansions(self):
        bx, by = BiPoly.x(), BiPoly.y()
        assert balanced_check(thullen(1, 0)).lhs == bx + by - 1
        res = balanced_check(thullen(HALF, HALF))
        assert res.lhs == res.rhs == bx * Fraction(3, 4) + by * HALF - 1

    def test_unbalanced(self):
        res = balanced_check(thullen(2, 0))
        assert not res.balanced
        assert res.reindex_ok
        assert res.residual == BiPoly.constant(1)


class TestReport:
    def test_admissible(self):
        rep = berezin_report(thullen(HALF, HALF))
        assert rep.berezin_admissible and rep.wallach_ok and rep.balanced

    def test_nu_zero_admissible(self):
        rep = berezin_report(make_spec([(cartan_catalog("I", 2, 2), 1, 0)], 1))
        assert rep.berezin_admissible

    def test_not_admissible(self):
        rep = berezin_report(thullen(1, 1))
        assert rep.verdict.status is Status.NOT_POLYNOMIAL
        assert not rep.berezin_admissible

    def test_wallach_gap_blocks_admissibility(self):
        # mu = 1/2 lies in the gap (0, 1) of the Wallach set of I(2,2)
        rep = berezin_report(make_spec([(cartan_catalog("I", 2, 2), HALF, 0)], 1))
        assert rep.verdict.is_polynomial
        assert not rep.wallach_ok and not rep.berezin_admissible

    def test_invariant(self):
        rep = berezin_report(thullen(1, 1))
        with pytest.raises(ValueError):
            EpsilonReport(rep.verdict, rep.balanced, True, True, rep.alpha_threshold)


spec_strategy = st.lists(
    st.tuples(
        st.sampled_from([ball(1), ball(2), cartan_catalog("I", 2, 2), cartan_catalog("III", 2)]),
        st.fractions(Fraction(1, 4), 4, max_denominator=4),
        st.fractions(Fraction(-3, 4), 3, max_denominator=4),
    ),
    min_size=1,
    max_size=2,
).flatmap(lambda fs: st.integers(1, 3).map(lambda d0: make_spec(fs, d0)))


class TestEngineInvariants:
    @given(spec_strategy)
    def test_sigma_normalization(self, spec):
        assert sigma(spec, spec.d) == 1
        total = sum(sigma(spec, t) for t in range(spec.d + 1))
        expected = Fraction(1)
        for f in spec.factors:
            expected *= (1 + f.nu) ** f.params.dim
        assert total == expected

    @given(spec_strategy)
    def test_psi_difference_drops_degree(self, spec):
        assert (psi_numerator(spec) - psi_denominator(spec)).degree_in("y") < spec.d

    @given(spec_strategy)
    def test_reindexing(self, spec):
        assert balanced_check(spec).reindex_ok

    @given(spec_strategy)
    @example(balanced_thullen(HALF))
    @example(balanced_thullen(3))
    def test_balanced_implies_constant(self, spec):
        res = balanced_check(spec)
        if not res.balanced:
            return
        v = polynomiality_check(spec)
        alpha = alpha_threshold(spec) + 2
        cf = epsilon_coeffs(spec, alpha, v)
        assert cf.coeffs[:-1] == (0,) * spec.d
        assert cf.coeffs[-1] == rising_factorial(alpha - spec.n, spec.n)
