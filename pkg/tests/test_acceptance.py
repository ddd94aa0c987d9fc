"""Acceptance criteria 1-9, each at its stated tolerance and runtime budget."""

import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np

from cartan_hartogs.algebra import UniPoly, finite_differences, newton_reconstruct, rising_factorial
from cartan_hartogs.domains import (
    alpha_threshold,
    ball,
    cartan_catalog,
    hua_polynomial,
    make_spec,
    thullen,
)
from cartan_hartogs.epsilon import (
    Status,
    balanced_check,
    berezin_report,
    epsilon_coeffs,
    epsilon_series,
    nu_zero_reduction_check,
    polynomiality_check,
    psi_denominator,
    psi_numerator,
    sigma,
    sigma_enumerated,
)
from cartan_hartogs.numeric import (
    MA_MARGIN,
    boundedness_sample,
    complex_hessian_fd,
    diastasis_check,
    monge_ampere_closed_form,
    sample_point,
)

X = UniPoly.x()
HALF = Fraction(1, 2)
DISC, BALL3, I22 = ball(1), ball(3), cartan_catalog("I", 2, 2)


def balanced_thullen(mu):
    mu = Fraction(mu)
    return thullen(mu, (1 - mu) / (2 * mu))


def criterion1_specs():
    return [balanced_thullen(mu) for mu in (HALF, 1, 2, Fraction(3, 5))]


def criterion2_specs():
    return [make_spec([(base, mu, 0)], 1) for base in (DISC, BALL3, I22) for mu in (HALF, 1)]


def criterion3_specs():
    out = []
    for base, d0, mu1, mu2 in itertools.product((DISC, I22), (1, 2), (HALF, 1), (HALF, 1, 2)):
        d1 = base.dim
        nu2 = (1 - Fraction(mu2) * (d1 + 1)) / ((d0 + d1 + 1) * Fraction(mu2))
        out.append(make_spec([(base, mu1, 0), (DISC, mu2, nu2)], d0))
    return out


def chi_tilde(spec):
    out = UniPoly([1])
    for f in spec.factors:
        out = out * hua_polynomial(f.params).compose_affine(f.mu, -f.params.genus).scale(f.mu ** -f.params.dim)
    return out


def test_criterion_1_balanced_thullen_phi(criterion):
    start = time.perf_counter()
    ok = True
    for spec in criterion1_specs():
        v = polynomiality_check(spec)
        ok &= v.status is Status.POLYNOMIAL_ALL_ALPHA and v.phi_at(17) == X - 1 and v.alpha_independent_phi() == X - 1
        ok &= berezin_report(spec).berezin_admissible
    elapsed = time.perf_counter() - start
    criterion(1, ok and elapsed < 1, f"phi = x - 1 and admissible for mu in {{1/2,1,2,3/5}} ({elapsed:.3f} s < 1 s)")


def test_criterion_2_nu_zero_reduction(criterion):
    start = time.perf_counter()
    ok = True
    for spec in criterion2_specs():
        v = polynomiality_check(spec)
        ok &= v.status is Status.POLYNOMIAL_ALL_ALPHA
        ok &= v.alpha_independent_phi() == chi_tilde(spec)
        alpha = alpha_threshold(spec) + 1
        ok &= nu_zero_reduction_check(spec, alpha)
    elapsed = time.perf_counter() - start
    criterion(2, ok and elapsed < 5, f"phi = prod mu^-d chi(mu x - p) and reduction check on 6 specs ({elapsed:.3f} s < 5 s)")


def test_criterion_3_product_with_disc(criterion):
    ok = True
    for spec in criterion3_specs():
        f1 = spec.factors[0]
        expected = (X - spec.d) * hua_polynomial(f1.params).compose_affine(f1.mu, -f1.params.genus).scale(
            f1.mu ** -f1.params.dim
        )
        v = polynomiality_check(spec)
        ok &= v.status is Status.POLYNOMIAL_ALL_ALPHA and v.alpha_independent_phi() == expected
    criterion(3, ok, f"phi = mu1^-d1 (x - d) chi1(mu1 x - p1) on {len(criterion3_specs())} specs")


def random_spec(rng: random.Random):
    k = rng.randint(1, 3)
    factors = []
    for _ in range(k):
        base = rng.choice([DISC, ball(2), BALL3, I22])
        mu = Fraction(rng.randint(1, 9), rng.randint(1, 4))
        nu = Fraction(rng.randint(-3, 12), rng.randint(4, 6))
        factors.append((base, mu, nu))
    return make_spec(factors, rng.randint(1, 3))


def test_criterion_4_balanced_identity(criterion):
    ok = True
    for mu in (HALF, 1, 2):
        spec = balanced_thullen(mu)
        ok &= balanced_check(spec).balanced
        for alpha in (Fraction(3), Fraction(7, 2), Fraction(20)):
            cf = epsilon_coeffs(spec, alpha)
            ok &= cf.is_constant() and cf.value(Fraction(1, 3)) == (alpha - 1) * (alpha - 2)
            ok &= cf.coeffs[-1] == rising_factorial(alpha - spec.n, spec.n)
    bad = balanced_check(thullen(2, 0))
    ok &= not bad.balanced and not bad.residual.is_zero()
    rng = random.Random(2024)
    reindexed = [balanced_check(random_spec(rng)).reindex_ok for _ in range(10)]
    ok &= all(reindexed)
    criterion(4, ok, "balanced family constant (a-1)(a-2), mu=2 nu=0 unbalanced, re-indexing exact on 10 random specs")


def test_criterion_5_series_matches_closed_form(criterion):
    start = time.perf_counter()
    specs = criterion1_specs() + criterion2_specs() + criterion3_specs()
    worst, max_terms, count, ok = 0.0, 0, 0, True
    for spec in specs:
        base = alpha_threshold(spec)
        for alpha in (base + 1, base + 3, base + 10):
            cf = epsilon_coeffs(spec, alpha)
            for s in (Fraction(0), Fraction(1, 10), HALF, Fraction(9, 10)):
                res = epsilon_series(spec, alpha, s)
                closed = cf.value(s)
                gap = abs(float(res.value - closed.numerator / closed.denominator)) / max(1.0, abs(float(closed)))
                worst = max(worst, gap)
                max_terms = max(max_terms, res.terms)
                ok &= res.converged and gap <= 1e-9 and res.terms < 10_000
                count += 1
    elapsed = time.perf_counter() - start
    criterion(
        5,
        ok and elapsed < 30,
        f"{count} series evaluations, worst scaled gap {worst:.2e} <= 1e-9, max {max_terms} terms ({elapsed:.1f} s < 30 s)",
    )


def ma_specs():
    out = []
    for mu, nu in ((1, 0), (1, 1), (HALF, HALF)):
        out.append(("disc/disc", thullen(mu, nu)))
        out.append(("ball2/disc", make_spec([(ball(2), mu, nu)], 1)))
        out.append(("disc/ball2", make_spec([(DISC, mu, nu)], 2)))
    return out


def test_criterion_6_monge_ampere(criterion):
    start = time.perf_counter()
    h = 1e-3
    worst_err, ratios, ok = 0.0, [], True
    for seed, (_, spec) in enumerate(ma_specs()):
        rng = np.random.default_rng(seed)
        for _ in range(20):
            p = sample_point(spec, rng, MA_MARGIN)
            closed = monge_ampere_closed_form(spec, p)
            e1 = abs(np.linalg.det(complex_hessian_fd(spec, p, h)).real - closed) / closed
            e2 = abs(np.linalg.det(complex_hessian_fd(spec, p, h / 2)).real - closed) / closed
            worst_err = max(worst_err, e1)
            ratios.append(e1 / e2)
            ok &= e1 < 1e-4 and 3 <= e1 / e2 <= 5
    elapsed = time.perf_counter() - start
    criterion(
        6,
        ok and elapsed < 60,
        f"max rel error {worst_err:.2e} < 1e-4, h/(h/2) ratios in [{min(ratios):.3f}, {max(ratios):.3f}] ({elapsed:.1f} s < 60 s)",
    )


THULLEN_SAMPLING = [thullen(1, 0), thullen(1, 1), thullen(HALF, HALF)]


def test_criterion_7_diastasis(criterion):
    ok = True
    top, diag_err, off_max = 0.0, 0.0, 0.0
    for seed, spec in enumerate(THULLEN_SAMPLING):
        rng = np.random.default_rng(100 + seed)
        for _ in range(1000):
            p1, p2 = sample_point(spec, rng), sample_point(spec, rng)
            v = diastasis_check(spec, 3, p1, p2)
            ok &= 0 < v <= 1 + 1e-12
            top = max(top, v)
            if np.abs(p1.flat() - p2.flat()).max() > 1e-6:
                ok &= v < 1
                off_max = max(off_max, v)
            diag_err = max(diag_err, abs(diastasis_check(spec, 3, p1, p1) - 1))
    ok &= diag_err <= 1e-12
    criterion(7, ok, f"1000 pairs x 3 specs: max exp(-D) {top:.6f}, max off-diagonal {off_max:.6f} < 1, diagonal error {diag_err:.1e}")


def test_criterion_8_boundedness(criterion):
    ok, worst_x, worst_c = True, 0.0, 0.0
    for seed, spec in enumerate(THULLEN_SAMPLING):
        try:
            res = boundedness_sample(spec, 10_000, seed=200 + seed)
        except AssertionError:
            ok = False
            continue
        worst_x, worst_c = max(worst_x, res.max_abs_x), max(worst_c, res.max_abs_cross)
    ok &= worst_c < 1 and worst_x < 2
    criterion(8, ok, f"10^4 samples x 3 specs: max |cross| {worst_c:.6f} < 1, max |X| {worst_x:.6f} < 2")


def full_catalog():
    for m in range(1, 6):
        for n in range(m, 8):
            yield cartan_catalog("I", m, n), m * n
    for n in range(2, 11):
        yield cartan_catalog("II", n), n * (n - 1) // 2
    for n in range(1, 9):
        yield cartan_catalog("III", n), n * (n + 1) // 2
    for n in range(3, 13):
        yield cartan_catalog("IV", n), n
    yield cartan_catalog("V"), 16
    yield cartan_catalog("VI"), 27


def test_criterion_9_property_suites(criterion):
    rng = random.Random(9)
    failures = []

    for _ in range(100):
        deg = rng.randint(0, 6)
        p = UniPoly([Fraction(rng.randint(-50, 50), rng.randint(1, 12)) for _ in range(deg + 1)])
        d = max(p.degree, 0)
        if newton_reconstruct(finite_differences(p, d), d) != p:
            failures.append(f"newton {p}")

    nus = [Fraction(rng.randint(-9, 40), rng.randint(10, 13)) for _ in range(25)]
    sigma_cases = 0
    for k in (1, 2, 3):
        for dims in itertools.product(range(1, 5), repeat=k):
            for idx in range(25):
                nu_vec = [nus[(idx + j * 7) % 25] for j in range(k)]
                spec = make_spec([(ball(di), 1, nv) for di, nv in zip(dims, nu_vec)], 1)
                sigma_cases += 1
                if any(sigma(spec, t) != sigma_enumerated(spec, spec.d - t) for t in range(spec.d + 1)):
                    failures.append(f"sigma {dims} {nu_vec}")

    for _ in range(25):
        spec = random_spec(rng)
        lead = UniPoly([math.prod(f.mu ** f.params.dim for f in spec.factors)])
        for part in (psi_numerator(spec), psi_denominator(spec)):
            if part.degree_in("y") != spec.d or part.coefficients_in("y")[spec.d] != lead:
                failures.append(f"psi {spec}")

    catalog_count = 0
    for params, matrix_dim in full_catalog():
        r, a, b = params.r, params.a, params.b
        catalog_count += 1
        if params.d != r * (r - 1) * a // 2 + r * b + r or params.p != (r - 1) * a + b + 2 or params.d != matrix_dim:
            failures.append(f"catalog {params.kind}")
        chi = hua_polynomial(params)
        if chi.degree != params.d or chi.leading != 1:
            failures.append(f"hua {params.kind}")

    criterion(
        9,
        not failures,
        f"100 Newton round-trips, {sigma_cases} sigma cases, 25 psi specs, {catalog_count} catalog entries"
        + (f"; failures: {failures[:3]}" if failures else ""),
    )
