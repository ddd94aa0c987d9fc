"""Irreducible bounded symmetric domains and generalized Cartan-Hartogs data.

An irreducible domain is described by its rank ``r`` and characteristic
multiplicities ``a, b``; the dimension and genus follow from

    d = r(r-1)/2 * a + r*b + r,        p = (r-1)*a + b + 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import Scalar, UniPoly, as_fraction, rising_factorial, rising_factorial_poly


class DomainError(ValueError):
    """Invalid domain parameters."""


@dataclass(frozen=True)
class IrreducibleDomainParams:
    rank: int
    a: int
    b: int
    dim: int
    genus: int
    kind: str = "custom"

    def __post_init__(self):
        r, a, b = self.rank, self.a, self.b
        if self.dim != r * (r - 1) // 2 * a + r * b + r:
            raise DomainError(f"dimension {self.dim} inconsistent with (r,a,b)=({r},{a},{b})")
        if self.genus != (r - 1) * a + b + 2:
            raise DomainError(f"genus {self.genus} inconsistent with (r,a,b)=({r},{a},{b})")

    @property
    def r(self) -> int:
        return self.rank

    @property
    def d(self) -> int:
        return self.dim

    @property
    def p(self) -> int:
        return self.genus


def make_irreducible(r: int, a: int, b: int, kind: str = "custom") -> IrreducibleDomainParams:
    """Build parameters from ``(r, a, b)``, deriving dimension and genus."""
    if r < 1:
        raise DomainError("rank must be positive")
    if a < 0 or b < 0:
        raise DomainError("multiplicities must be non-negative")
    d = r * (r - 1) // 2 * a + r * b + r
    p = (r - 1) * a + b + 2
    return IrreducibleDomainParams(r, a, b, d, p, kind)


def ball(n: int) -> IrreducibleDomainParams:
    """Unit ball in C^n (type I(1, n))."""
    return cartan_catalog("I", 1, n)


def cartan_catalog(kind: str, *sizes: int) -> IrreducibleDomainParams:
    """Standard ``(r, a, b)`` for the Cartan classification.

    ``I(m, n)`` is normalized to ``m <= n``.  ``V`` and ``VI`` are the two
    exceptional domains (dimensions 16 and 27) and take no sizes.
    """
    kind = kind.upper()
    if kind == "I":
        if len(sizes) != 2:
            raise DomainError("type I needs two sizes (m, n)")
        m, n = sorted(sizes)
        if m < 1:
            raise DomainError("type I sizes must be positive")
        return make_irreducible(m, 2, n - m, f"I({m},{n})")
    if kind in ("II", "III", "IV"):
        if len(sizes) != 1:
            raise DomainError(f"type {kind} needs one size")
        (n,) = sizes
        if kind == "II":
            if n < 2:
                raise DomainError("type II needs n >= 2")
            return make_irreducible(n // 2, 4, 2 * (n % 2), f"II({n})")
        if kind == "III":
            if n < 1:
                raise DomainError("type III needs n >= 1")
            return make_irreducible(n, 1, 0, f"III({n})")
        if n < 3:
            raise DomainError("type IV needs n >= 3")
        return make_irreducible(2, n - 2, 0, f"IV({n})")
    if kind == "V":
        if sizes:
            raise DomainError("type V takes no sizes")
        return make_irreducible(2, 6, 4, "V")
    if kind == "VI":
        if sizes:
            raise DomainError("type VI takes no sizes")
        return make_irreducible(3, 8, 0, "VI")
    raise DomainError(f"unknown domain kind {kind!r}")


# Representative entries used for listings and catalog-wide checks.
CATALOG_SAMPLES: tuple[tuple[str, tuple[int, ...]], ...] = (
    ("I", (1, 1)), ("I", (1, 2)), ("I", (1, 3)), ("I", (2, 2)), ("I", (2, 3)),
    ("I", (3, 3)), ("I", (3, 5)), ("II", (2,)), ("II", (4,)), ("II", (5,)),
    ("II", (6,)), ("III", (1,)), ("III", (2,)), ("III", (3,)), ("IV", (3,)),
    ("IV", (5,)), ("IV", (8,)), ("V", ()), ("VI", ()),
)


def hua_polynomial(params: IrreducibleDomainParams) -> UniPoly:
    """``chi(s) = prod_{j=1..r} (s + 1 + (j-1)a/2)_{1 + b + (r-j)a}``, monic of degree ``d``."""
    r, a, b = params.rank, params.a, params.b
    out = UniPoly([1])
    for j in range(1, r + 1):
        out = out * rising_factorial_poly(1 + Fraction((j - 1) * a, 2), 1 + b + (r - j) * a)
    return out


def wallach_contains(params: IrreducibleDomainParams, mu: Scalar) -> bool:
    """Membership in ``{0, a/2, ..., (r-1)a/2} U ((r-1)a/2, inf)``."""
    mu = as_fraction(mu)
    half_a = Fraction(params.a, 2)
    top = (params.rank - 1) * half_a
    if mu > top:
        return True
    if mu < 0:
        return False
    if half_a == 0:
        return mu == 0
    k = mu / half_a
    return k.denominator == 1 and k <= params.rank - 1


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p < 0 for p in parts):
            raise ValueError("partition parts must be non-negative")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError("partition parts must be non-increasing")
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return sum(1 for p in self.parts if p)


def generalized_pochhammer(s, lam: Partition | Sequence[int], a: Scalar, rank: int | None = None):
    """``(s)_lambda = prod_j (s - (j-1)a/2)_{lambda_j}``."""
    if not isinstance(lam, Partition):
        lam = Partition(tuple(lam))
    if rank is not None and len(lam) > rank:
        raise ValueError("partition longer than the rank")
    a = as_fraction(a)
    if isinstance(s, (int, str)):
        s = as_fraction(s)
    out = Fraction(1) if isinstance(s, Fraction) else 1
    for j, part in enumerate(lam.parts):
        out = out * rising_factorial(s - j * a / 2, part)
    return out


@dataclass(frozen=True)
class Factor:
    params: IrreducibleDomainParams
    mu: Fraction
    nu: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mu", as_fraction(self.mu))
        object.__setattr__(self, "nu", as_fraction(self.nu))


@dataclass(frozen=True)
class DomainSpec:
    """Base factors with weights ``mu_i, nu_i`` and fiber ball dimension ``d0``."""

    factors: tuple[Factor, ...]
    d0: int
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def d(self) -> int:
        return sum(f.params.dim for f in self.factors)

    @property
    def n(self) -> int:
        return self.d + self.d0

    @property
    def mus(self) -> tuple[Fraction, ...]:
        return tuple(f.mu for f in self.factors)

    @property
    def nus(self) -> tuple[Fraction, ...]:
        return tuple(f.nu for f in self.factors)


def make_spec(factors: Sequence[tuple[IrreducibleDomainParams, Scalar, Scalar]], d0: int, label: str = "") -> DomainSpec:
    return DomainSpec(tuple(Factor(p, mu, nu) for p, mu, nu in factors), d0, label)


def thullen(mu: Scalar, nu: Scalar) -> DomainSpec:
    """Disc over disc: ``|z|^2 + |w|^(2/mu) < 1``."""
    return make_spec([(ball(1), mu, nu)], 1, "thullen")


def validate_spec(spec: DomainSpec) -> list[str]:
    """Return every violated hypothesis; empty means the spec is usable."""
    problems = []
    if spec.k == 0:
        problems.append("at least one base factor is required")
    if not isinstance(spec.d0, int) or spec.d0 < 1:
        problems.append("d0 must be a positive integer")
    for i, f in enumerate(spec.factors):
        p = f.params
        if p.dim != p.rank * (p.rank - 1) // 2 * p.a + p.rank * p.b + p.rank:
            problems.append(f"factors[{i}]: dimension violates d = r(r-1)a/2 + rb + r")
        if p.genus != (p.rank - 1) * p.a + p.b + 2:
            problems.append(f"factors[{i}]: genus violates p = (r-1)a + b + 2")
        if f.mu <= 0:
            problems.append(f"factors[{i}]: mu must be positive")
        if f.nu <= -1:
            problems.append(f"factors[{i}]: nu must exceed -1")
    return problems


def alpha_threshold(spec: DomainSpec) -> Fraction:
    """``max{n, (p_i - 1)/(mu_i (1 + nu_i))}``; admissible ``alpha`` must exceed it strictly."""
    out = Fraction(spec.n)
    for f in spec.factors:
        out = max(out, Fraction(f.params.genus - 1) / (f.mu * (1 + f.nu)))
    return out
