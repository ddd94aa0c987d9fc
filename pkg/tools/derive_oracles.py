"""Recompute the frozen reference values used in the test suite.

Everything here is built with sympy straight from the defining formulas,
sharing no code with the package.  Run with ``python3 tools/derive_oracles.py``
and compare against the literals in tests/.
"""

import itertools

import mpmath
import sympy as sp

mpmath.mp.dps = 30

x, y, al, s = sp.symbols("x y alpha s")


def rf(v, m):
    return sp.prod([v + i for i in range(m)])


def params(r, a, b):
    return r, a, b, r * (r - 1) * a // 2 + r * b + r, (r - 1) * a + b + 2


def hua(r, a, b, v):
    return sp.expand(sp.prod([rf(v + 1 + sp.Rational((j - 1) * a, 2), 1 + b + (r - j) * a) for j in range(1, r + 1)]))


def sigma(dims, nus, t):
    d = sum(dims)
    gen = sp.expand(sp.prod([(1 + nu * y) ** di for di, nu in zip(dims, nus)]))
    return gen.coeff(y, d - t)


def sigma_brute(dims, nus, m):
    # sum over t_i <= d_i with sum t_i = m of prod C(d_i, t_i) nu_i^(d_i - t_i)
    total = 0
    for ts in itertools.product(*[range(di + 1) for di in dims]):
        if sum(ts) == m:
            total += sp.prod([sp.binomial(di, ti) * nu ** (di - ti) for di, ti, nu in zip(dims, ts, nus)])
    return total


def phi(factors, d0):
    """factors: list of ((r,a,b), mu, nu).  Returns (quotient, remainder) in x over Q(alpha)."""
    ps = [params(*f[0]) for f in factors]
    d = sum(p[3] for p in ps)
    n = d + d0
    dims = [p[3] for p in ps]
    nus = [f[2] for f in factors]
    num = sp.prod([hua(*f[0][:3], f[1] * ((1 + f[2]) * X + Y) - p[4]) for f, p in zip(factors, ps)
                   for X, Y in [(al, x - al)]])
    den = sp.prod([f[1] ** p[3] for f, p in zip(factors, ps)]) * sum(
        sigma(dims, nus, t) * rf(al - n, d - t) * rf(x - t, t) for t in range(d + 1))
    top = sp.expand(rf(x - d, d) * num)
    q, r = sp.div(sp.Poly(top, x), sp.Poly(sp.expand(den), x))
    return q, r


def coeffs_low_first(poly):
    return [str(c) for c in reversed(sp.Poly(poly, x).all_coeffs())]


def main():
    half = sp.Rational(1, 2)
    print("hua I(2,2):", coeffs_low_first(hua(2, 2, 0, x)))
    print("hua I(2,3):", coeffs_low_first(hua(2, 2, 1, x)))
    print("hua IV(5):", coeffs_low_first(hua(2, 3, 0, x)))
    print("hua II(5):", coeffs_low_first(hua(2, 4, 2, x)))

    dims, nus = [2, 1], [sp.Rational(1, 3), sp.Rational(2, 5)]
    print("sigma d=(2,1) nu=(1/3,2/5):", [str(sigma(dims, nus, t)) for t in range(4)],
          [str(sigma_brute(dims, nus, t)) for t in range(4)])

    q, r = phi([((1, 2, 0), 1, 1)], 1)
    print("thullen mu=1 nu=1 symbolic remainder:", sp.factor(r.as_expr()))
    q, r = phi([((1, 2, 0), 1, 1)], 1)
    print("  at alpha=5:", sp.Poly(r.as_expr().subs(al, 5), x).all_coeffs())

    disc, ball3, i22 = (1, 2, 0), (1, 2, 2), (2, 2, 0)
    for name, base in (("disc", disc), ("ball3", ball3), ("I22", i22)):
        for mu in (half, 1):
            q, r = phi([(base, mu, 0)], 1)
            assert r.is_zero
            print(f"phi nu=0 {name} mu={mu}:", coeffs_low_first(q.as_expr()))

    for d0 in (1, 2):
        for mu1 in (half, 1):
            mu2 = 2
            d1 = 4
            nu2 = (1 - mu2 * (d1 + 1)) / sp.Integer((d0 + d1 + 1) * mu2)
            q, r = phi([(i22, mu1, 0), (disc, mu2, nu2)], d0)
            print(f"phi I22 x disc d0={d0} mu1={mu1} mu2=2 nu2={nu2}:", r.is_zero, coeffs_low_first(q.as_expr()))

    # closed form for two discs, nu=0, mu=(1,1), d0=1 at alpha=7, s=1/2
    q, r = phi([(disc, 1, 0), (disc, 1, 0)], 1)
    ph = q.as_expr()
    d, n, d0, a = 2, 3, 1, 7
    total = 0
    for j in range(d + 1):
        diff = sum(sp.binomial(j, l) * (-1) ** l * ph.subs(x, d - l) for l in range(j + 1))
        total += diff / sp.factorial(j) * rf(sp.Integer(a - n), d0 + j) * (1 - s) ** (d - j)
    print("two-disc closed form alpha=7:", sp.expand(total), "at s=1/2:", total.subs(s, half))

    # Monge-Ampere: exact complex Hessian determinant for Thullen (mu, nu) at real z, w
    zr, zi, wr, wi = sp.symbols("zr zi wr wi", real=True)
    for mu, nu, zv, wv in ((1, 0, mpmath.mpf(3) / 10, mpmath.mpf(1) / 2), (half, half, mpmath.mpf(1) / 5, mpmath.mpf(3) / 10)):
        N = 1 - zr**2 - zi**2
        pot = -nu * mu * sp.log(N) - sp.log(N**mu - wr**2 - wi**2)
        coords = [(zr, zi), (wr, wi)]
        H = sp.zeros(2, 2)
        for j, (xj, yj) in enumerate(coords):
            for k, (xk, yk) in enumerate(coords):
                H[j, k] = sp.Rational(1, 4) * (sp.diff(pot, xj, xk) + sp.diff(pot, yj, yk)
                                                + sp.I * (sp.diff(pot, xj, yk) - sp.diff(pot, yj, xk)))
        f = sp.lambdify([zr, zi, wr, wi], H, "mpmath")
        val = mpmath.det(mpmath.matrix(f(zv, 0, wv, 0))).real
        print(f"MA det Thullen mu={mu} nu={nu} z={zv} w={wv}:", mpmath.nstr(val, 20))


if __name__ == "__main__":
    main()
