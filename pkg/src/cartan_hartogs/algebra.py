"""Exact polynomial algebra over the rationals.

Scalars are :class:`fractions.Fraction`.  ``UniPoly`` stores coefficients
lowest degree first; ``BiPoly`` stores a sparse map ``(i, j) -> c`` for the
monomial ``x**i * y**j``.  Both are immutable and kept in canonical form, so
``==`` is exact mathematical equality.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence, Union

Scalar = Union[int, Fraction]


class PoleError(ArithmeticError):
    """A rational function was evaluated at a zero of its denominator."""


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and rational strings like ``"3/4"`` to Fraction.

    Floats are rejected: the symbolic path never rounds.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _trim(coeffs: Iterable[Fraction]) -> tuple[Fraction, ...]:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _fmt_scalar(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class UniPoly:
    """Univariate polynomial with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        object.__setattr__(self, "coeffs", _trim(as_fraction(c) for c in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    @classmethod
    def constant(cls, c: Scalar) -> "UniPoly":
        return cls([c])

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    @classmethod
    def linear(cls, slope: Scalar, intercept: Scalar) -> "UniPoly":
        return cls([intercept, slope])

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int) -> Fraction:
        if k < 0:
            raise IndexError("negative exponent")
        return self.coeffs[k] if k < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _trim([Fraction(other)])
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("UniPoly", self.coeffs))

    def _coerce(self, other) -> "UniPoly":
        if isinstance(other, UniPoly):
            return other
        return UniPoly([as_fraction(other)])

    def __add__(self, other) -> "UniPoly":
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "UniPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "UniPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            c = as_fraction(other)
            return UniPoly(c * a for a in self.coeffs)
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, m: int) -> "UniPoly":
        if m < 0:
            raise ValueError("negative power")
        result, base = UniPoly([1]), self
        while m:
            if m & 1:
                result = result * base
            base = base * base
            m >>= 1
        return result

    def scale(self, c: Scalar) -> "UniPoly":
        return self * as_fraction(c)

    def __call__(self, value):
        """Horner evaluation; exact for rationals, generic for other rings."""
        if isinstance(value, (int, str)):
            value = as_fraction(value)
        acc = Fraction(0) if isinstance(value, Fraction) else 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def compose_affine(self, c: Scalar, e: Scalar) -> "UniPoly":
        """Return ``p(c*x + e)``."""
        return self.compose(UniPoly.linear(c, e))

    def compose(self, inner):
        """Return ``p(inner)`` for ``inner`` a UniPoly or BiPoly."""
        zero = inner * 0
        acc = zero
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self * (1 / self.leading)

    def derivative(self) -> "UniPoly":
        return UniPoly(k * c for k, c in enumerate(self.coeffs) if k)

    def __divmod__(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        return poly_exact_div(self, other)

    def __floordiv__(self, other: "UniPoly") -> "UniPoly":
        return poly_exact_div(self, other)[0]

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return poly_exact_div(self, other)[1]

    def to_strings(self) -> list[str]:
        return [_fmt_scalar(c) for c in self.coeffs]

    def __repr__(self) -> str:
        return f"UniPoly({self.to_strings()})"

    def __str__(self) -> str:
        return format_poly(self)


def format_poly(p: UniPoly, var: str = "x") -> str:
    if p.is_zero():
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{_fmt_scalar(mag)}*{mono}"
        else:
            body = _fmt_scalar(mag)
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def poly_exact_div(num: UniPoly, den: UniPoly) -> tuple[UniPoly, UniPoly]:
    """Long division: ``num == q*den + r`` with ``deg r < deg den``."""
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    rem = list(num.coeffs)
    dd = den.degree
    lead = den.leading
    if len(rem) - 1 < dd:
        return UniPoly(), num
    quot = [Fraction(0)] * (len(rem) - dd)
    for k in range(len(rem) - 1, dd - 1, -1):
        c = rem[k]
        if c == 0:
            continue
        q = c / lead
        quot[k - dd] = q
        for i, b in enumerate(den.coeffs):
            rem[k - dd + i] -= q * b
    return UniPoly(quot), UniPoly(rem[:dd])


def poly_gcd(p: UniPoly, q: UniPoly) -> UniPoly:
    """Monic gcd by the Euclidean algorithm; ``gcd(0, 0) == 0``."""
    a, b = p, q
    while not b.is_zero():
        a, b = b, poly_exact_div(a, b)[1]
    return a.monic()


def rising_factorial_poly(shift: Scalar, m: int) -> UniPoly:
    """``(x + shift)_m = (x+shift)(x+shift+1)...(x+shift+m-1)`` as a polynomial."""
    if m < 0:
        raise ValueError("m must be non-negative")
    shift = as_fraction(shift)
    out = UniPoly([1])
    for l in range(m):
        out = out * UniPoly([shift + l, 1])
    return out


def rising_factorial(s, m: int):
    """Numeric raising factorial ``(s)_m``; exact when ``s`` is rational."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if isinstance(s, (int, str)):
        s = as_fraction(s)
    out = Fraction(1) if isinstance(s, Fraction) else 1
    for l in range(m):
        out = out * (s + l)
    return out


class RationalFunction:
    """Quotient ``num/den`` in lowest terms with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: UniPoly, den: UniPoly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = poly_gcd(num, den) if not num.is_zero() else den.monic()
        if not g.is_zero() and g.degree > 0:
            num = poly_exact_div(num, g)[0]
            den = poly_exact_div(den, g)[0]
        if num.is_zero():
            den = UniPoly([1])
        lead = den.leading
        object.__setattr__(self, "num", num * (1 / lead))
        object.__setattr__(self, "den", den * (1 / lead))

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def as_poly(self) -> UniPoly:
        if not self.is_polynomial():
            raise ValueError("not a polynomial")
        return self.num

    def __call__(self, value):
        value = as_fraction(value)
        d = self.den(value)
        if d == 0:
            raise PoleError(f"pole at x = {value}")
        return self.num(value) / d

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, UniPoly):
            return self.is_polynomial() and self.num == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalFunction({self.num!r}, {self.den!r})"


def finite_difference(f: Callable, j: int, x0: Scalar) -> Fraction:
    """Backward difference ``sum_l C(j,l) (-1)^l f(x0 - l)``.

    Raises :class:`PoleError` if ``f`` is undefined at one of the nodes.
    """
    if j < 0:
        raise ValueError("order must be non-negative")
    x0 = as_fraction(x0)
    total = Fraction(0)
    for l in range(j + 1):
        try:
            v = f(x0 - l)
        except ZeroDivisionError as exc:
            raise PoleError(f"f undefined at x = {x0 - l}") from exc
        term = comb(j, l) * as_fraction(v)
        total += -term if l % 2 else term
    return total


def finite_differences(f: Callable, d: int) -> list[Fraction]:
    """``[D^0 f(d), ..., D^d f(d)]``."""
    return [finite_difference(f, j, d) for j in range(d + 1)]


def newton_reconstruct(diffs: Sequence[Scalar], d: int) -> UniPoly:
    """Rebuild ``f(x) = sum_j diffs[j]/j! * (x-d)_j`` from backward differences at ``d``."""
    if len(diffs) != d + 1:
        raise ValueError(f"need {d + 1} differences, got {len(diffs)}")
    out = UniPoly()
    basis = UniPoly([1])
    for j, dj in enumerate(diffs):
        if j:
            basis = basis * UniPoly([-d + j - 1, 1])
        out = out + basis * (as_fraction(dj) / factorial(j))
    return out


# --- bivariate -------------------------------------------------------------

Monomial = tuple[int, int]


class BiPoly:
    """Sparse bivariate polynomial in ``x`` and ``y`` over the rationals."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Scalar] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Fraction] = {}
        for (i, j), c in items:
            if i < 0 or j < 0:
                raise ValueError("negative exponent")
            c = as_fraction(c)
            if c:
                acc[(i, j)] = acc.get((i, j), Fraction(0)) + c
        object.__setattr__(self, "terms", {k: v for k, v in sorted(acc.items()) if v})

    def __setattr__(self, name, value):
        raise AttributeError("BiPoly is immutable")

    @classmethod
    def constant(cls, c: Scalar) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    @classmethod
    def from_uni(cls, p: UniPoly, var: str = "x") -> "BiPoly":
        if var == "x":
            return cls({(k, 0): c for k, c in enumerate(p.coeffs)})
        if var == "y":
            return cls({(0, k): c for k, c in enumerate(p.coeffs)})
        raise ValueError(f"unknown variable {var!r}")

    def is_zero(self) -> bool:
        return not self.terms

    def degree_in(self, var: str) -> int:
        idx = _var_index(var)
        return max((m[idx] for m in self.terms), default=-1)

    def __eq__(self, other) -> bool:
        if isinstance(other, BiPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == BiPoly.constant(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    def _coerce(self, other) -> "BiPoly":
        if isinstance(other, BiPoly):
            return other
        return BiPoly.constant(as_fraction(other))

    def __add__(self, other) -> "BiPoly":
        other = self._coerce(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return BiPoly(acc)

    __radd__ = __add__

    def __neg__(self) -> "BiPoly":
        return BiPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> "BiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "BiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "BiPoly":
        if not isinstance(other, BiPoly):
            c = as_fraction(other)
            return BiPoly({k: c * v for k, v in self.terms.items()})
        acc: dict[Monomial, Fraction] = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                k = (i1 + i2, j1 + j2)
                acc[k] = acc.get(k, Fraction(0)) + a * b
        return BiPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, m: int) -> "BiPoly":
        out = BiPoly.constant(1)
        for _ in range(m):
            out = out * self
        return out

    def __call__(self, x, y):
        return self.evaluate(x, y)

    def evaluate(self, x, y):
        if isinstance(x, (int, str)):
            x = as_fraction(x)
        if isinstance(y, (int, str)):
            y = as_fraction(y)
        total = 0
        for (i, j), c in self.terms.items():
            total += c * x**i * y**j
        return total

    def substitute(self, var: str, value: Scalar) -> UniPoly:
        """Fix one variable at a rational value, leaving a UniPoly in the other."""
        value = as_fraction(value)
        idx = _var_index(var)
        acc: dict[int, Fraction] = {}
        for m, c in self.terms.items():
            k = m[1 - idx]
            acc[k] = acc.get(k, Fraction(0)) + c * value ** m[idx]
        top = max(acc, default=-1)
        return UniPoly(acc.get(k, Fraction(0)) for k in range(top + 1))

    def shift(self, var: str, c: Scalar) -> "BiPoly":
        """Substitute ``var -> var + c`` (use a negative ``c`` for ``var -> var - |c|``)."""
        c = as_fraction(c)
        idx = _var_index(var)
        lin = BiPoly.x() + c if idx == 0 else BiPoly.y() + c
        out = BiPoly()
        for (i, j), coef in self.terms.items():
            if idx == 0:
                out = out + lin**i * BiPoly({(0, j): coef})
            else:
                out = out + lin**j * BiPoly({(i, 0): coef})
        return out

    def coefficients_in(self, var: str) -> list[UniPoly]:
        """View as a polynomial in ``var``: entry ``k`` is the UniPoly coefficient of ``var**k``."""
        idx = _var_index(var)
        buckets: dict[int, dict[int, Fraction]] = {}
        for m, c in self.terms.items():
            buckets.setdefault(m[idx], {})[m[1 - idx]] = c
        out = []
        for k in range(self.degree_in(var) + 1):
            b = buckets.get(k, {})
            top = max(b, default=-1)
            out.append(UniPoly(b.get(e, Fraction(0)) for e in range(top + 1)))
        return out

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[UniPoly], var: str) -> "BiPoly":
        idx = _var_index(var)
        terms = {}
        for k, p in enumerate(coeffs):
            for e, c in enumerate(p.coeffs):
                terms[(k, e) if idx == 0 else (e, k)] = c
        return cls(terms)

    def to_dict(self) -> dict[str, str]:
        return {f"{i},{j}": _fmt_scalar(c) for (i, j), c in self.terms.items()}

    def __repr__(self) -> str:
        return f"BiPoly({self.to_dict()})"

    def __str__(self) -> str:
        return format_bipoly(self)


def format_bipoly(p: BiPoly, names: tuple[str, str] = ("x", "y")) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for (i, j), c in sorted(p.terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0])):
        mono = "*".join(
            f"{n}^{e}" if e > 1 else n for n, e in zip(names, (i, j)) if e
        )
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{_fmt_scalar(mag)}*{mono}"
        else:
            body = _fmt_scalar(mag)
        pieces.append(("-" if c < 0 else "+", body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def _var_index(var: str) -> int:
    if var == "x":
        return 0
    if var == "y":
        return 1
    raise ValueError(f"unknown variable {var!r}")


def bipoly_divmod(num: BiPoly, den: BiPoly, variable: str = "x") -> tuple[BiPoly, BiPoly] | None:
    """Long division in ``variable`` with coefficients in Q[other variable].

    Each step divides the leading coefficient exactly in the univariate ring of
    the other variable.  Returns ``(quotient, remainder)`` with the remainder of
    lower ``variable``-degree than ``den``, or ``None`` when some step is not
    exact (then ``den`` cannot divide ``num`` in Q[x, y]).  When ``den`` has a
    constant leading coefficient the division always completes.
    """
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    dcoef = den.coefficients_in(variable)
    dd = len(dcoef) - 1
    lead = dcoef[-1]
    rem = num.coefficients_in(variable)
    if len(rem) - 1 < dd:
        return BiPoly(), num
    quot = [UniPoly()] * (len(rem) - dd)
    for k in range(len(rem) - 1, dd - 1, -1):
        c = rem[k]
        if c.is_zero():
            continue
        q, r = poly_exact_div(c, lead)
        if not r.is_zero():
            return None
        quot[k - dd] = q
        for i, b in enumerate(dcoef):
            rem[k - dd + i] = rem[k - dd + i] - q * b
    return (
        BiPoly.from_coefficients(quot, variable),
        BiPoly.from_coefficients(rem[:dd], variable),
    )


def bipoly_exact_div(num: BiPoly, den: BiPoly, variable: str = "x") -> BiPoly | None:
    """Quotient if ``den`` divides ``num`` exactly in Q[x, y], else ``None``."""
    res = bipoly_divmod(num, den, variable)
    if res is None or not res[1].is_zero():
        return None
    return res[0]
