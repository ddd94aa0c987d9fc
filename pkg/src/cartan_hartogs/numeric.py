"""Floating-point cross-checks on generalized Cartan-Hartogs domains.

Only factors with an explicit generic norm are supported here: unit balls,
``N(z, w) = 1 - <z, w>``, and type I(m, n) matrix balls,
``N(Z, W) = det(I_m - Z W^*)``.  Points are complex numpy arrays; a type I
factor point is the ``m x n`` matrix flattened row-major.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .domains import DomainSpec, IrreducibleDomainParams, alpha_threshold
from .epsilon import EpsilonClosedForm, b_coefficient, epsilon_coeffs, epsilon_from_kernel, kernel_eval


class UnsupportedDomainError(ValueError):
    """No generic norm is available for this factor kind."""


class BoundaryError(ValueError):
    """Point on or outside the domain, or too close for the requested stencil."""


class BranchCutError(ArithmeticError):
    """A sesquianalytic extension hit the negative real axis."""


# Sampling region for finite-difference checks: |z_i|^2 <= 1/2 and s <= 1/2.
# Closer to the boundary the O(h^2) truncation error of the stencil grows
# like (h / gap)^2 and swamps a 1e-4 tolerance at h = 1e-3.
MA_MARGIN = 0.5

_TYPE_I = re.compile(r"I\((\d+),(\d+)\)")


def factor_shape(params: IrreducibleDomainParams) -> tuple[int, int]:
    """``(m, n)`` for a ball (``m = 1``) or type I(m, n) factor."""
    m = _TYPE_I.fullmatch(params.kind)
    if m:
        return int(m.group(1)), int(m.group(2))
    if params.rank == 1 and params.a == 2:
        return 1, params.dim
    raise UnsupportedDomainError(f"no generic norm for factor kind {params.kind!r}")


def factor_kind(params: IrreducibleDomainParams) -> str:
    m, _ = factor_shape(params)
    return "ball" if m == 1 else "I"


def generic_norm(kind: str, z1, z2, shape: tuple[int, int] | None = None) -> complex:
    """Sesquianalytic generic norm ``N(z1, conj(z2))``."""
    z1 = np.asarray(z1, dtype=complex).ravel()
    z2 = np.asarray(z2, dtype=complex).ravel()
    if kind == "ball":
        return complex(1 - np.dot(z1, np.conj(z2)))
    if kind == "I":
        if shape is None:
            raise ValueError("type I needs the matrix shape")
        m, n = shape
        a = z1.reshape(m, n)
        b = z2.reshape(m, n)
        return complex(np.linalg.det(np.eye(m) - a @ b.conj().T))
    raise UnsupportedDomainError(f"no generic norm for kind {kind!r}")


def _norm_mp(shape: tuple[int, int], z1: Sequence, z2: Sequence):
    m, n = shape
    if m == 1:
        return 1 - mpmath.fsum(a * mpmath.conj(b) for a, b in zip(z1, z2))
    mat = mpmath.eye(m)
    for i in range(m):
        for j in range(m):
            mat[i, j] -= mpmath.fsum(z1[i * n + k] * mpmath.conj(z2[j * n + k]) for k in range(n))
    return mpmath.det(mat)


@dataclass(frozen=True)
class FullPoint:
    factor_points: tuple[np.ndarray, ...]
    w: np.ndarray

    @classmethod
    def make(cls, factor_points: Sequence, w) -> "FullPoint":
        return cls(
            tuple(np.asarray(z, dtype=complex).ravel() for z in factor_points),
            np.asarray(w, dtype=complex).ravel(),
        )

    def flat(self) -> np.ndarray:
        return np.concatenate(list(self.factor_points) + [self.w])


def origin(spec: DomainSpec) -> FullPoint:
    return FullPoint.make([np.zeros(f.params.dim) for f in spec.factors], np.zeros(spec.d0))


def split_flat(spec: DomainSpec, flat) -> FullPoint:
    parts, k = [], 0
    for f in spec.factors:
        parts.append(flat[k:k + f.params.dim])
        k += f.params.dim
    return FullPoint.make(parts, flat[k:])


def _floats(spec: DomainSpec) -> tuple[list[float], list[float]]:
    return [float(f.mu) for f in spec.factors], [float(f.nu) for f in spec.factors]


def factor_norms(spec: DomainSpec, point: FullPoint) -> list[float]:
    out = []
    for f, z in zip(spec.factors, point.factor_points):
        shape = factor_shape(f.params)
        out.append(generic_norm(factor_kind(f.params), z, z, shape).real)
    return out


def fiber_invariant(spec: DomainSpec, point: FullPoint) -> float:
    """``s = |w|^2 / prod N_i(z_i, z_i)^{mu_i}``."""
    mus, _ = _floats(spec)
    norms = factor_norms(spec, point)
    if any(nv <= 0 for nv in norms):
        raise BoundaryError("base point outside the domain")
    weight = float(np.prod([nv**mu for nv, mu in zip(norms, mus)]))
    return float(np.vdot(point.w, point.w).real) / weight


def contains(spec: DomainSpec, point: FullPoint, margin: float = 0.0) -> bool:
    for f, z in zip(spec.factors, point.factor_points):
        m, n = factor_shape(f.params)
        if m == 1:
            if np.vdot(z, z).real >= 1 - margin:
                return False
        elif np.linalg.norm(z.reshape(m, n), 2) ** 2 >= 1 - margin:
            return False
    return fiber_invariant(spec, point) < 1 - margin


def potential_eval(spec: DomainSpec, point: FullPoint) -> float:
    """Kahler potential ``-sum nu_i mu_i ln N_i - ln(prod N_i^{mu_i} - |w|^2)``."""
    mus, nus = _floats(spec)
    norms = factor_norms(spec, point)
    if any(nv <= 0 for nv in norms):
        raise BoundaryError("base point outside the domain")
    weight = float(np.prod([nv**mu for nv, mu in zip(norms, mus)]))
    gap = weight - float(np.vdot(point.w, point.w).real)
    if gap <= 0:
        raise BoundaryError("point on or outside the boundary")
    return -sum(nu * mu * np.log(nv) for nu, mu, nv in zip(nus, mus, norms)) - float(np.log(gap))


def _potential_mp(spec: DomainSpec, shapes, mus, nus, coords):
    k = 0
    norms = []
    for shape in shapes:
        size = shape[0] * shape[1]
        z = coords[k:k + size]
        norms.append(mpmath.re(_norm_mp(shape, z, z)))
        k += size
    w = coords[k:]
    if any(nv <= 0 for nv in norms):
        raise BoundaryError("stencil left the domain")
    weight = mpmath.fprod(nv**mu for nv, mu in zip(norms, mus))
    gap = weight - mpmath.fsum(abs(c) ** 2 for c in w)
    if gap <= 0:
        raise BoundaryError("stencil left the domain")
    return -mpmath.fsum(nu * mu * mpmath.log(nv) for nu, mu, nv in zip(nus, mus, norms)) - mpmath.log(gap)


def boundary_margin(spec: DomainSpec, point: FullPoint) -> float:
    """Crude Euclidean distance proxy to the boundary, used to vet stencils."""
    mus, _ = _floats(spec)
    gaps = []
    for f, z in zip(spec.factors, point.factor_points):
        m, n = factor_shape(f.params)
        radius = np.linalg.norm(z) if m == 1 else np.linalg.norm(z.reshape(m, n), 2)
        gaps.append(1 - radius)
    norms = factor_norms(spec, point)
    weight = float(np.prod([nv**mu for nv, mu in zip(norms, mus)]))
    gaps.append(np.sqrt(max(weight, 0.0)) - np.linalg.norm(point.w))
    return float(min(gaps))


def complex_hessian_fd(spec: DomainSpec, point: FullPoint, h: float = 1e-3, dps: int = 30) -> np.ndarray:
    """``d^2 Phi / dZ_j dconj(Z_k)`` from second central differences in real coordinates.

    The potential is evaluated at ``dps`` digits so rounding stays far below
    the ``O(h^2)`` truncation error.
    """
    if boundary_margin(spec, point) <= 4 * h:
        raise BoundaryError("insufficient boundary margin for the stencil")
    shapes = [factor_shape(f.params) for f in spec.factors]
    z = point.flat()
    n = z.size
    with mpmath.workdps(dps):
        mus_mp = [mpmath.mpf(f.mu.numerator) / f.mu.denominator for f in spec.factors]
        nus_mp = [mpmath.mpf(f.nu.numerator) / f.nu.denominator for f in spec.factors]
        base = [mpmath.mpf(float(v)) for v in np.concatenate([z.real, z.imag])]
        hh = mpmath.mpf(h)

        def f(shift: dict[int, int]):
            x = list(base)
            for idx, step in shift.items():
                x[idx] += step * hh
            coords = [mpmath.mpc(x[i], x[n + i]) for i in range(n)]
            return _potential_mp(spec, shapes, mus_mp, nus_mp, coords)

        f0 = f({})
        real = [[mpmath.mpf(0)] * (2 * n) for _ in range(2 * n)]
        for i in range(2 * n):
            real[i][i] = (f({i: 1}) - 2 * f0 + f({i: -1})) / hh**2
            for j in range(i + 1, 2 * n):
                val = (f({i: 1, j: 1}) - f({i: 1, j: -1}) - f({i: -1, j: 1}) + f({i: -1, j: -1})) / (4 * hh**2)
                real[i][j] = real[j][i] = val
        a = np.array([[float(v) for v in row] for row in real])
    xx, yy = a[:n, :n], a[n:, n:]
    xy, yx = a[:n, n:], a[n:, :n]
    return 0.25 * ((xx + yy) + 1j * (xy - yx))


@lru_cache(maxsize=None)
def _log_norm_hessian_det(m: int, n: int) -> float:
    size = m * n
    shape = (m, n)
    with mpmath.workdps(50):
        hh = mpmath.mpf("1e-8")

        def at(shift: dict[int, int]):
            x = [mpmath.mpf(0)] * (2 * size)
            for idx, step in shift.items():
                x[idx] += step * hh
            coords = [mpmath.mpc(x[i], x[size + i]) for i in range(size)]
            return -mpmath.log(mpmath.re(_norm_mp(shape, coords, coords)))

        f0 = at({})
        a = mpmath.zeros(2 * size, 2 * size)
        for i in range(2 * size):
            a[i, i] = (at({i: 1}) - 2 * f0 + at({i: -1})) / hh**2
            for j in range(i + 1, 2 * size):
                v = (at({i: 1, j: 1}) - at({i: 1, j: -1}) - at({i: -1, j: 1}) + at({i: -1, j: -1})) / (4 * hh**2)
                a[i, j] = a[j, i] = v
        hess = mpmath.matrix(size, size)
        for j in range(size):
            for k in range(size):
                hess[j, k] = (a[j, k] + a[size + j, size + k] + 1j * (a[j, size + k] - a[size + j, k])) / 4
        return float(mpmath.re(mpmath.det(hess)))


def norm_constant(params: IrreducibleDomainParams) -> float:
    """``det(-d dbar ln N)`` at the origin, from a 50-digit finite-difference Hessian.

    Truncation error is ``O(h^2) = 1e-16`` at ``h = 1e-8``; balls skip the
    computation since their value is 1 by inspection.
    """
    m, n = factor_shape(params)
    return 1.0 if m == 1 else _log_norm_hessian_det(m, n)


def monge_ampere_closed_form(spec: DomainSpec, point: FullPoint) -> float:
    """Determinant of the metric predicted by the closed Monge-Ampere formula."""
    mus, nus = _floats(spec)
    norms = factor_norms(spec, point)
    s = fiber_invariant(spec, point)
    u = 1 - s
    out = 1.0 / u ** (spec.d0 + 1)
    for f, mu, nu, nv in zip(spec.factors, mus, nus, norms):
        dim, genus = f.params.dim, f.params.genus
        out *= mu**dim * norm_constant(f.params)
        out *= (nu + 1 / u) ** dim / nv ** (genus + mu * spec.d0)
    return out


def monge_ampere_check(spec: DomainSpec, point: FullPoint, h: float = 1e-3) -> float:
    """Relative error of ``det(H_fd)`` against the closed form."""
    closed = monge_ampere_closed_form(spec, point)
    det = np.linalg.det(complex_hessian_fd(spec, point, h)).real
    return abs(det - closed) / abs(closed)


def epsilon_invariance_check(spec: DomainSpec, point: FullPoint, alpha, cf: EpsilonClosedForm | None = None) -> float:
    """Relative gap between the closed form at ``point`` and at the fiber point ``(0, w~)``."""
    if cf is None:
        cf = epsilon_coeffs(spec, alpha)
    s = fiber_invariant(spec, point)
    w_tilde = np.zeros(spec.d0, dtype=complex)
    w_tilde[0] = np.sqrt(s)
    s_fiber = fiber_invariant(spec, FullPoint.make([np.zeros(f.params.dim) for f in spec.factors], w_tilde))
    here = closed_form_float(cf, s)
    there = closed_form_float(cf, s_fiber)
    return abs(here - there) / max(abs(here), 1e-300)


def closed_form_float(cf: EpsilonClosedForm, s: float) -> float:
    u = 1.0 - s
    return float(sum(float(c) * u ** (cf.d - j) for j, c in enumerate(cf.coeffs)))


def kernel_roundtrip_error(spec: DomainSpec, point: FullPoint, alpha, cf: EpsilonClosedForm | None = None) -> float:
    """``exp(-alpha Phi) K`` against the closed form, relative, at a sampled point."""
    if cf is None:
        cf = epsilon_coeffs(spec, alpha)
    s = fiber_invariant(spec, point)
    phi_val = potential_eval(spec, point)
    s_exact = Fraction(s)
    k = kernel_eval(spec, alpha, s_exact, phi_val)
    eps = epsilon_from_kernel(alpha, k, phi_val)
    closed = cf.value(s_exact)
    return float(abs(eps - mpmath.mpf(closed.numerator) / closed.denominator) / abs(closed))


# --- sesquianalytic checks ---------------------------------------------------

def _principal_power(base: complex, exponent: float) -> complex:
    if base.imag == 0 and base.real <= 0:
        raise BranchCutError(f"principal power undefined at {base}")
    return complex(np.exp(exponent * np.log(base)))


def cross_term(spec: DomainSpec, p1: FullPoint, p2: FullPoint) -> complex:
    """``w conj(eta)^t / prod N_i(z_i, conj(xi_i))^{mu_i}``."""
    mus, _ = _floats(spec)
    denom = 1 + 0j
    for f, mu, z, xi in zip(spec.factors, mus, p1.factor_points, p2.factor_points):
        denom *= _principal_power(generic_norm(factor_kind(f.params), z, xi, factor_shape(f.params)), mu)
    return complex(np.dot(p1.w, np.conj(p2.w))) / denom


def diastasis_beta_floor(spec: DomainSpec) -> Fraction:
    """``max (r_i - 1) a_i / (2 mu_i (1 + nu_i))``; ``beta`` must exceed it."""
    return max(Fraction((f.params.rank - 1) * f.params.a) / (2 * f.mu * (1 + f.nu)) for f in spec.factors)


def diastasis_check(spec: DomainSpec, beta, p1: FullPoint, p2: FullPoint) -> float:
    """``exp(-D)`` for the metric ``beta * g`` between two points."""
    beta_f = Fraction(beta)
    if not beta_f > diastasis_beta_floor(spec):
        raise ValueError(f"beta must exceed {diastasis_beta_floor(spec)}")
    beta = float(beta_f)
    mus, nus = _floats(spec)
    log_val = 0.0
    for f, mu, nu, z, xi in zip(spec.factors, mus, nus, p1.factor_points, p2.factor_points):
        kind, shape = factor_kind(f.params), factor_shape(f.params)
        cross = generic_norm(kind, z, xi, shape)
        if cross.imag == 0 and cross.real <= 0:
            raise BranchCutError(f"N(z, conj(xi)) = {cross} on the branch cut")
        nz = generic_norm(kind, z, z, shape).real
        nxi = generic_norm(kind, xi, xi, shape).real
        e = beta * mu * (1 + nu)
        log_val += -2 * e * np.log(abs(cross)) + e * (np.log(nz) + np.log(nxi))
    x = 1 - cross_term(spec, p1, p2)
    if x.imag == 0 and x.real <= 0:
        raise BranchCutError(f"cross term 1 - w.conj(eta)/N^mu = {x} on the branch cut")
    log_val += -2 * beta * np.log(abs(x))
    log_val += beta * np.log1p(-fiber_invariant(spec, p1)) + beta * np.log1p(-fiber_invariant(spec, p2))
    return float(np.exp(log_val))


# --- sampling ----------------------------------------------------------------

def _disc(rng: np.random.Generator, size: int, radius: float = 1.0) -> np.ndarray:
    r = radius * np.sqrt(rng.random(size))
    theta = rng.random(size) * 2 * np.pi
    return r * np.exp(1j * theta)


def sample_point(spec: DomainSpec, rng: np.random.Generator, margin: float = 1e-3, max_tries: int = 100_000) -> FullPoint:
    """Uniform in polydisc coordinates, rejected until inside with ``margin``."""
    for _ in range(max_tries):
        parts = [_disc(rng, f.params.dim) for f in spec.factors]
        p = FullPoint.make(parts, _disc(rng, spec.d0))
        if contains(spec, p, margin):
            return p
    raise RuntimeError("rejection sampling failed; margin too large?")


@dataclass(frozen=True)
class BoundednessSample:
    max_abs_x: float
    max_abs_cross: float
    b_bound: float | None
    count: int


def boundedness_sample(
    spec: DomainSpec,
    count: int,
    seed: int,
    cf: EpsilonClosedForm | None = None,
    margin: float = 1e-3,
) -> BoundednessSample:
    """Sample pairs and track ``|X| = |1 - cross|`` and ``|cross|``.

    Raises ``AssertionError`` if a sample violates ``|cross| < 1`` or
    ``|X| < 2``.  With ``cf`` the implied bound on ``|B|`` is reported.
    """
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    max_x = max_c = 0.0
    for _ in range(count):
        p1 = sample_point(spec, rng, margin)
        p2 = sample_point(spec, rng, margin)
        c = abs(cross_term(spec, p1, p2))
        x = abs(1 - cross_term(spec, p1, p2))
        if not c < 1:
            raise AssertionError(f"cross term {c} is not below 1")
        if not x < 2:
            raise AssertionError(f"|X| = {x} is not below 2")
        max_x, max_c = max(max_x, x), max(max_c, c)
    b_bound = None
    if cf is not None:
        const, slope = b_coefficient(cf)
        b_bound = abs(float(const)) + abs(float(slope)) * max_x
    return BoundednessSample(max_x, max_c, b_bound, count)


def default_alpha(spec: DomainSpec) -> Fraction:
    """Smallest integer strictly above the admissibility threshold."""
    t = alpha_threshold(spec)
    return Fraction(t.numerator // t.denominator + 1)
