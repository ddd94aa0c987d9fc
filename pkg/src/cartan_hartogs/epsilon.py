"""Epsilon function of the weighted Bergman kernels on generalized Cartan-Hartogs domains.

For ``alpha`` above :func:`alpha_threshold` the epsilon function depends only
on ``s = |w~|^2`` and is

    eps(s) = (alpha-n)_n (1-s)^alpha * sum_t psi(alpha, t) (alpha)_t / t! * s^t.

It is a polynomial in ``1 - s`` exactly when

    phi(x) = (x-d)_d * psi(alpha, x - alpha)

is a polynomial, and then ``eps = sum_j c_j(alpha) (1-s)^(d-j)`` with
``c_j = D^j phi(d) / j! * (alpha-n)_{d0+j}`` (``D`` the backward difference).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

import mpmath

from .algebra import (
    BiPoly,
    PoleError,
    RationalFunction,
    Scalar,
    UniPoly,
    as_fraction,
    bipoly_divmod,
    finite_difference,
    poly_exact_div,
    rising_factorial,
    rising_factorial_poly,
)
from .domains import DomainSpec, alpha_threshold, hua_polynomial, validate_spec, wallach_contains


class AlphaError(ValueError):
    """``alpha`` does not exceed the admissibility threshold."""


class NotPolynomialError(ValueError):
    """The closed form was requested where ``phi`` is not a polynomial."""


class Status(str, Enum):
    POLYNOMIAL_ALL_ALPHA = "polynomial_all_alpha"
    POLYNOMIAL_AT_ALPHA = "polynomial_at_alpha"
    NOT_POLYNOMIAL = "not_polynomial"


def _require_valid(spec: DomainSpec) -> None:
    problems = validate_spec(spec)
    if problems:
        raise ValueError("; ".join(problems))


def check_alpha(spec: DomainSpec, alpha: Scalar) -> Fraction:
    alpha = as_fraction(alpha)
    threshold = alpha_threshold(spec)
    if not alpha > threshold:
        raise AlphaError(f"alpha = {alpha} must exceed the threshold {threshold}")
    return alpha


# --- sigma -------------------------------------------------------------------

def nu_generating_poly(spec: DomainSpec) -> UniPoly:
    """``prod_i (1 + nu_i y)^{d_i}``; its ``y^m`` coefficient sums over ``sum t_i = m``."""
    out = UniPoly([1])
    for f in spec.factors:
        out = out * UniPoly([1, f.nu]) ** f.params.dim
    return out


def sigma_table(spec: DomainSpec) -> list[Fraction]:
    d = spec.d
    gen = nu_generating_poly(spec)
    return [gen[d - t] for t in range(d + 1)]


def sigma(spec: DomainSpec, t: int) -> Fraction:
    """``sum over t_1+...+t_k = d-t of prod_i C(d_i, t_i) nu_i^{t_i}``."""
    if not 0 <= t <= spec.d:
        raise ValueError(f"t must lie in [0, {spec.d}], got {t}")
    return nu_generating_poly(spec)[spec.d - t]


def sigma_enumerated(spec: DomainSpec, m: int) -> Fraction:
    """Multi-index sum over ``t_1+...+t_k = m`` by direct enumeration."""
    dims = [f.params.dim for f in spec.factors]
    total = Fraction(0)
    for ts in itertools.product(*(range(di + 1) for di in dims)):
        if sum(ts) != m:
            continue
        term = Fraction(1)
        for f, ti in zip(spec.factors, ts):
            term *= comb(f.params.dim, ti) * f.nu**ti
        total += term
    return total


# --- psi and phi -------------------------------------------------------------

def _mu_power(spec: DomainSpec) -> Fraction:
    out = Fraction(1)
    for f in spec.factors:
        out *= f.mu ** f.params.dim
    return out


def _rising_bi(shift: Scalar, m: int, arg: BiPoly) -> BiPoly:
    return rising_factorial_poly(shift, m).compose(arg)


def psi_numerator(spec: DomainSpec) -> BiPoly:
    """``prod_i chi_i(mu_i((1+nu_i)x + y) - p_i)`` in (x, y)."""
    x, y = BiPoly.x(), BiPoly.y()
    out = BiPoly.constant(1)
    for f in spec.factors:
        arg = (x * (1 + f.nu) + y) * f.mu - f.params.genus
        out = out * hua_polynomial(f.params).compose(arg)
    return out


def psi_denominator(spec: DomainSpec) -> BiPoly:
    """``prod mu_i^{d_i} * sum_t sigma(t) (x-n)_{d-t} (x+y-t)_t`` in (x, y)."""
    x, y = BiPoly.x(), BiPoly.y()
    d, n = spec.d, spec.n
    sig = sigma_table(spec)
    acc = BiPoly()
    for t in range(d + 1):
        if sig[t] == 0:
            continue
        acc = acc + _rising_bi(-n, d - t, x) * _rising_bi(-t, t, x + y) * sig[t]
    return acc * _mu_power(spec)


def psi_parts(spec: DomainSpec, alpha: Scalar | None = None):
    """Numerator and denominator of ``psi``.

    With ``alpha=None`` both are BiPoly in (x, y); with a rational ``alpha``
    they are UniPoly in ``y`` with ``x = alpha``.
    """
    num, den = psi_numerator(spec), psi_denominator(spec)
    if alpha is None:
        return num, den
    alpha = as_fraction(alpha)
    return num.substitute("x", alpha), den.substitute("x", alpha)


def psi_eval(spec: DomainSpec, alpha: Scalar, t: Scalar) -> Fraction:
    alpha = check_alpha(spec, alpha)
    num, den = psi_parts(spec, alpha)
    t = as_fraction(t)
    dv = den(t)
    if dv == 0:
        raise PoleError(f"psi has a pole at (alpha, t) = ({alpha}, {t})")
    return num(t) / dv


@dataclass(frozen=True)
class SymbolicPhi:
    """``phi`` as a quotient of BiPoly in (x, alpha); ``alpha`` occupies the ``y`` slot."""

    num: BiPoly
    den: BiPoly


def phi_build(spec: DomainSpec, alpha: Scalar | None = None):
    """``phi(x) = (x-d)_d psi(alpha, x-alpha)``.

    Returns a reduced :class:`RationalFunction` in ``x`` for rational
    ``alpha``, or a :class:`SymbolicPhi` when ``alpha`` is symbolic.
    """
    x, a = BiPoly.x(), BiPoly.y()
    num, den = psi_numerator(spec), psi_denominator(spec)
    # psi(X, Y) with X = alpha, Y = x - alpha
    num = num.evaluate(a, x - a)
    den = den.evaluate(a, x - a)
    num = num * BiPoly.from_uni(rising_factorial_poly(-spec.d, spec.d), "x")
    if alpha is None:
        return SymbolicPhi(num, den)
    alpha = as_fraction(alpha)
    return RationalFunction(num.substitute("y", alpha), den.substitute("y", alpha))


def phi_unreduced(spec: DomainSpec, alpha: Scalar) -> tuple[UniPoly, UniPoly]:
    sym = phi_build(spec)
    alpha = as_fraction(alpha)
    return sym.num.substitute("y", alpha), sym.den.substitute("y", alpha)


# --- polynomiality -----------------------------------------------------------

@dataclass(frozen=True)
class PolynomialityVerdict:
    status: Status
    phi: BiPoly | tuple[UniPoly, ...] | None = None
    alphas: tuple[Fraction, ...] = ()
    witness: BiPoly | UniPoly | None = None
    failed_alpha: Fraction | None = None

    def __post_init__(self):
        if (self.phi is None) != (self.status is Status.NOT_POLYNOMIAL):
            raise ValueError("phi must be present exactly when the verdict is polynomial")
        if (self.witness is None) == (self.status is Status.NOT_POLYNOMIAL):
            raise ValueError("witness must be present exactly when the verdict is negative")

    @property
    def is_polynomial(self) -> bool:
        return self.status is not Status.NOT_POLYNOMIAL

    def phi_at(self, alpha: Scalar) -> UniPoly:
        """``phi`` as a UniPoly in ``x`` for one value of ``alpha``."""
        if self.status is Status.POLYNOMIAL_ALL_ALPHA:
            return self.phi.substitute("y", as_fraction(alpha))
        if self.status is Status.POLYNOMIAL_AT_ALPHA:
            alpha = as_fraction(alpha)
            for a, p in zip(self.alphas, self.phi):
                if a == alpha:
                    return p
        raise NotPolynomialError(f"phi is not known to be polynomial at alpha = {alpha}")

    def alpha_independent_phi(self) -> UniPoly | None:
        """``phi`` as a UniPoly in ``x`` when it does not involve ``alpha``."""
        if self.status is Status.POLYNOMIAL_ALL_ALPHA and self.phi.degree_in("y") <= 0:
            return self.phi.substitute("y", 0)
        if self.status is Status.POLYNOMIAL_AT_ALPHA and len(set(self.phi)) == 1:
            return self.phi[0]
        return None


def polynomiality_check(spec: DomainSpec, alphas: Sequence[Scalar] | None = None) -> PolynomialityVerdict:
    """Decide whether ``phi`` is a polynomial in ``x``.

    ``alphas=None`` treats ``alpha`` symbolically and tests divisibility in
    Q[x, alpha]; otherwise each listed ``alpha`` is tested on its own.
    """
    _require_valid(spec)
    if alphas is None:
        sym = phi_build(spec)
        res = bipoly_divmod(sym.num, sym.den, "x")
        # the x-leading coefficient of the denominator is the constant prod mu_i^{d_i}
        assert res is not None
        quot, rem = res
        if rem.is_zero():
            return PolynomialityVerdict(Status.POLYNOMIAL_ALL_ALPHA, phi=quot)
        return PolynomialityVerdict(Status.NOT_POLYNOMIAL, witness=rem)

    checked = [check_alpha(spec, a) for a in alphas]
    phis = []
    for alpha in checked:
        num, den = phi_unreduced(spec, alpha)
        rf = RationalFunction(num, den)
        if not rf.is_polynomial():
            _, rem = poly_exact_div(num, den)
            return PolynomialityVerdict(Status.NOT_POLYNOMIAL, alphas=tuple(checked), witness=rem, failed_alpha=alpha)
        phis.append(rf.as_poly())
    return PolynomialityVerdict(Status.POLYNOMIAL_AT_ALPHA, phi=tuple(phis), alphas=tuple(checked))


# --- closed form -------------------------------------------------------------

@dataclass(frozen=True)
class EpsilonClosedForm:
    alpha: Fraction
    n: int
    d: int
    d0: int
    diffs: tuple[Fraction, ...]
    coeffs: tuple[Fraction, ...]
    phi: UniPoly

    def value(self, s: Scalar) -> Fraction:
        """``sum_j c_j (1-s)^(d-j)`` exactly."""
        u = 1 - as_fraction(s)
        return sum((c * u ** (self.d - j) for j, c in enumerate(self.coeffs)), Fraction(0))

    def as_poly_in_one_minus_s(self) -> UniPoly:
        """Coefficients of ``eps`` in powers of ``u = 1 - s`` (lowest first)."""
        return UniPoly(reversed(self.coeffs))

    def is_constant(self) -> bool:
        return all(c == 0 for c in self.coeffs[:-1])


def closed_form_from_phi(phi: UniPoly, alpha: Fraction, d: int, n: int, d0: int) -> EpsilonClosedForm:
    diffs = tuple(finite_difference(phi, j, d) for j in range(d + 1))
    coeffs = tuple(diffs[j] / factorial(j) * rising_factorial(alpha - n, d0 + j) for j in range(d + 1))
    return EpsilonClosedForm(alpha, n, d, d0, diffs, coeffs, phi)


def epsilon_coeffs(spec: DomainSpec, alpha: Scalar, verdict: PolynomialityVerdict | None = None) -> EpsilonClosedForm:
    """Closed-form coefficients ``c_j(alpha)``; requires ``phi`` polynomial at ``alpha``."""
    alpha = check_alpha(spec, alpha)
    if verdict is not None and verdict.is_polynomial:
        phi = verdict.phi_at(alpha)
    else:
        v = polynomiality_check(spec, [alpha])
        if not v.is_polynomial:
            raise NotPolynomialError(
                f"phi is not a polynomial at alpha = {alpha} (remainder {v.witness})"
            )
        phi = v.phi[0]
    return closed_form_from_phi(phi, alpha, spec.d, spec.n, spec.d0)


# --- series ------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesResult:
    value: mpmath.mpf
    terms: int
    last_term: mpmath.mpf
    tail_estimate: mpmath.mpf
    converged: bool

    def __float__(self) -> float:
        return float(self.value)


def epsilon_series(
    spec: DomainSpec,
    alpha: Scalar,
    s: Scalar,
    max_terms: int = 10_000,
    tol: float = 1e-20,
    dps: int = 40,
) -> SeriesResult:
    """Sum the power series in ``s`` term by term at ``dps`` decimal digits.

    Stops once the newest term is below ``tol`` times the partial sum and
    the index is past the peak ``alpha*s/(1-s)`` of the binomial weights.
    """
    alpha = check_alpha(spec, alpha)
    s = as_fraction(s)
    if s < 0 or s >= 1:
        raise ValueError(f"s must lie in [0, 1), got {s}")
    num, den = psi_parts(spec, alpha)
    n = spec.n
    with mpmath.workdps(dps):
        lead = rising_factorial(alpha - n, n)
        prefactor = mpmath.mpf(lead.numerator) / lead.denominator
        a = mpmath.mpf(alpha.numerator) / alpha.denominator
        sm = mpmath.mpf(s.numerator) / s.denominator
        peak = alpha * s / (1 - s)

        def psi_at(t: int) -> mpmath.mpf:
            dv = den(t)
            if dv == 0:
                raise PoleError(f"psi has a pole at t = {t}")
            q = num(t) / dv
            return mpmath.mpf(q.numerator) / q.denominator

        weight = mpmath.mpf(1)
        partial = psi_at(0)
        last = partial
        tail = mpmath.mpf(0)
        converged = s == 0
        t = 0
        if not converged:
            while t + 1 < max_terms:
                weight = weight * (a + t) / (t + 1) * sm
                t += 1
                term = psi_at(t) * weight
                partial += term
                if t > peak and abs(term) < tol * abs(partial):
                    ratio = abs(term / last) if last else mpmath.mpf(0)
                    tail = abs(term) * ratio / (1 - ratio) if ratio < 1 else mpmath.inf
                    last = term
                    converged = True
                    break
                last = term
            if not converged:
                tail = mpmath.inf
        value = prefactor * mpmath.power(1 - sm, a) * partial
        scale = prefactor * mpmath.power(1 - sm, a)
        return SeriesResult(+value, t + 1, +(last * scale), +(tail * scale), converged)


def kernel_eval(spec: DomainSpec, alpha: Scalar, s: Scalar, potential_value: float, **series_kw) -> mpmath.mpf:
    """Weighted Bergman kernel on the diagonal: ``K = exp(alpha * Phi) * eps``."""
    eps = epsilon_series(spec, alpha, s, **series_kw).value
    a = as_fraction(alpha)
    return mpmath.exp(mpmath.mpf(a.numerator) / a.denominator * potential_value) * eps


def epsilon_from_kernel(alpha: Scalar, kernel_value, potential_value: float) -> mpmath.mpf:
    a = as_fraction(alpha)
    return mpmath.exp(-mpmath.mpf(a.numerator) / a.denominator * potential_value) * kernel_value


# --- balanced metrics --------------------------------------------------------

@dataclass(frozen=True)
class BalancedResult:
    balanced: bool
    residual: BiPoly
    reindex_ok: bool
    lhs: BiPoly
    rhs: BiPoly


def balanced_rhs(spec: DomainSpec) -> BiPoly:
    """``prod mu_i^{d_i} * sum_t S(t) (x-n)_t (x+y-d+t)_{d-t}`` with ``S(t)`` enumerated over ``sum t_i = t``."""
    x, y = BiPoly.x(), BiPoly.y()
    d, n = spec.d, spec.n
    acc = BiPoly()
    for t in range(d + 1):
        st = sigma_enumerated(spec, t)
        if st == 0:
            continue
        acc = acc + _rising_bi(-n, t, x) * _rising_bi(-d + t, d - t, x + y) * st
    return acc * _mu_power(spec)


def balanced_check(spec: DomainSpec) -> BalancedResult:
    """Compare both sides of the balanced identity as exact BiPoly.

    Also confirms that the right-hand side written with enumerated
    multi-index sums equals the ``psi`` denominator after ``t -> d - t``.
    """
    _require_valid(spec)
    lhs = psi_numerator(spec)
    rhs = balanced_rhs(spec)
    reindex_ok = rhs == psi_denominator(spec)
    residual = lhs - rhs
    return BalancedResult(residual.is_zero(), residual, reindex_ok, lhs, rhs)


# --- report ------------------------------------------------------------------

@dataclass(frozen=True)
class EpsilonReport:
    verdict: PolynomialityVerdict
    balanced: bool
    wallach_ok: bool
    berezin_admissible: bool
    alpha_threshold: Fraction

    def __post_init__(self):
        expected = self.wallach_ok and self.verdict.status is Status.POLYNOMIAL_ALL_ALPHA
        if self.berezin_admissible != expected:
            raise ValueError("berezin_admissible must equal wallach_ok and uniform polynomiality")


def wallach_ok(spec: DomainSpec) -> bool:
    return all(f.mu != 0 and wallach_contains(f.params, f.mu) for f in spec.factors)


def berezin_report(spec: DomainSpec) -> EpsilonReport:
    _require_valid(spec)
    verdict = polynomiality_check(spec)
    w_ok = wallach_ok(spec)
    return EpsilonReport(
        verdict=verdict,
        balanced=balanced_check(spec).balanced,
        wallach_ok=w_ok,
        berezin_admissible=w_ok and verdict.status is Status.POLYNOMIAL_ALL_ALPHA,
        alpha_threshold=alpha_threshold(spec),
    )


def nu_zero_coeffs(spec: DomainSpec, alpha: Scalar) -> tuple[Fraction, ...]:
    """Coefficients for ``nu = 0`` built straight from the Hua polynomials.

    ``(1/prod mu_i^{d_i}) * D^j chi~(d)/j! * (alpha-n)_{j+d0}`` where
    ``chi~(x) = prod_i chi_i(mu_i x - p_i)``.
    """
    if any(f.nu != 0 for f in spec.factors):
        raise ValueError("all nu_i must vanish")
    alpha = check_alpha(spec, alpha)
    chi = UniPoly([1])
    for f in spec.factors:
        chi = chi * hua_polynomial(f.params).compose_affine(f.mu, -f.params.genus)
    scale = 1 / _mu_power(spec)
    d, n, d0 = spec.d, spec.n, spec.d0
    return tuple(
        scale * finite_difference(chi, j, d) / factorial(j) * rising_factorial(alpha - n, j + d0)
        for j in range(d + 1)
    )


def nu_zero_reduction_check(spec: DomainSpec, alpha: Scalar) -> bool:
    return nu_zero_coeffs(spec, alpha) == epsilon_coeffs(spec, alpha).coeffs


def b_coefficient(cf: EpsilonClosedForm) -> tuple[Fraction, Fraction]:
    """``(constant, slope)`` with ``B = constant + slope * X``."""
    n, d = cf.n, cf.d
    slope = cf.diffs[d - 1] / factorial(d - 1) if d >= 1 else Fraction(0)
    return Fraction(-(n + 1) * n, 2), slope
