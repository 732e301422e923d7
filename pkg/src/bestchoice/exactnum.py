"""Exact rational and theta-polynomial arithmetic.

Every generating function in the package is a :class:`ThetaPolynomial` with
:class:`fractions.Fraction` coefficients.  Probabilities travel as
:class:`WinFraction` pairs that are deliberately *not* reduced, because the
mediant sum :func:`oplus` is only meaningful on the raw (num, den) pair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

BigRat = Fraction
Rational = Union[int, Fraction]

__all__ = [
    "BigRat",
    "ThetaPolynomial",
    "WinFraction",
    "RootBracket",
    "THETA",
    "parse_rational",
    "poly_eval",
    "rising_factorial",
    "theta_integer",
    "theta_factorial",
    "oplus",
    "isolate_positive_roots",
    "simplest_rational_between",
]


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or an integer string into a Fraction.

    Decimal strings are refused so that a value such as ``0.1`` never turns
    silently into a binary-float approximation.
    """
    s = text.strip()
    if any(ch in s for ch in ".eE") and "/" not in s:
        raise ValueError(f"expected an exact rational 'p/q', got decimal {text!r}")
    try:
        value = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse rational {text!r}") from exc
    return value


class ThetaPolynomial:
    """Immutable univariate polynomial in theta with rational coefficients.

    Coefficients are stored lowest order first with trailing zeros trimmed.
    The zero polynomial has an empty coefficient tuple and degree ``-inf``.
    """

    __slots__ = ("_c",)

    def __init__(self, coefficients: Iterable[Rational] = ()):
        c = [Fraction(x) for x in coefficients]
        while c and c[-1] == 0:
            c.pop()
        self._c: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def constant(cls, value: Rational) -> "ThetaPolynomial":
        return cls((value,))

    @classmethod
    def monomial(cls, degree: int, coeff: Rational = 1) -> "ThetaPolynomial":
        return cls([0] * degree + [coeff])

    @classmethod
    def from_exponent_counts(cls, counts: dict[int, int]) -> "ThetaPolynomial":
        """Build sum(count * theta**exp) from an exponent histogram."""
        if not counts:
            return cls()
        c = [0] * (max(counts) + 1)
        for e, n in counts.items():
            c[e] += n
        return cls(c)

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return self._c

    @property
    def degree(self) -> float:
        return len(self._c) - 1 if self._c else float("-inf")

    def is_zero(self) -> bool:
        return not self._c

    def coeff(self, i: int) -> Fraction:
        return self._c[i] if 0 <= i < len(self._c) else Fraction(0)

    @property
    def leading(self) -> Fraction:
        return self._c[-1] if self._c else Fraction(0)

    def __call__(self, theta: Rational) -> Fraction:
        return poly_eval(self, theta)

    def _coerce(self, other) -> "ThetaPolynomial":
        if isinstance(other, ThetaPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return ThetaPolynomial.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self._c), len(other._c))
        return ThetaPolynomial(self.coeff(i) + other.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return ThetaPolynomial(-x for x in self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._c or not other._c:
            return ThetaPolynomial()
        out = [Fraction(0)] * (len(self._c) + len(other._c) - 1)
        for i, a in enumerate(self._c):
            if a == 0:
                continue
            for j, b in enumerate(other._c):
                out[i + j] += a * b
        return ThetaPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = ThetaPolynomial.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: "ThetaPolynomial"):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self._c)
        dd = len(other._c) - 1
        lead = other._c[-1]
        if len(rem) - 1 < dd:
            return ThetaPolynomial(), self
        quot = [Fraction(0)] * (len(rem) - dd)
        for i in range(len(rem) - 1, dd - 1, -1):
            q = rem[i] / lead
            quot[i - dd] = q
            if q:
                for j, b in enumerate(other._c):
                    rem[i - dd + j] -= q * b
        return ThetaPolynomial(quot), ThetaPolynomial(rem[:dd])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "ThetaPolynomial") -> "ThetaPolynomial":
        """Divide, raising ArithmeticError when the remainder is nonzero."""
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def derivative(self) -> "ThetaPolynomial":
        return ThetaPolynomial(i * c for i, c in enumerate(self._c) if i)

    def monic(self) -> "ThetaPolynomial":
        if self.is_zero():
            return self
        lead = self._c[-1]
        return ThetaPolynomial(c / lead for c in self._c)

    def gcd(self, other: "ThetaPolynomial") -> "ThetaPolynomial":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def square_free(self) -> "ThetaPolynomial":
        g = self.gcd(self.derivative())
        return self.exact_div(g) if g.degree > 0 else self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ThetaPolynomial.constant(other)
        if not isinstance(other, ThetaPolynomial):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        return f"ThetaPolynomial({[str(c) for c in self._c]})"

    def __str__(self):
        if not self._c:
            return "0"
        terms = []
        for e in range(len(self._c) - 1, -1, -1):
            c = self._c[e]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                var = "θ" if e == 1 else f"θ^{e}"
                body = var if mag == 1 else f"{mag}{var}" if mag.denominator == 1 else f"({mag}){var}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    # serialisation: JSON array of "p/q" strings, lowest order first
    def to_json(self) -> str:
        return json.dumps([f"{c.numerator}/{c.denominator}" for c in self._c])

    @classmethod
    def from_json(cls, text: str) -> "ThetaPolynomial":
        return cls(Fraction(s) for s in json.loads(text))


THETA = ThetaPolynomial.monomial(1)


def poly_eval(p: ThetaPolynomial, theta: Rational) -> Fraction:
    """Exact Horner evaluation."""
    theta = Fraction(theta)
    acc = Fraction(0)
    for c in reversed(p.coefficients):
        acc = acc * theta + c
    return acc


def rising_factorial(n: int) -> ThetaPolynomial:
    """theta (theta+1) ... (theta+n-1); the empty product for n = 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    p = ThetaPolynomial.constant(1)
    for j in range(n):
        p = p * ThetaPolynomial((j, 1))
    return p


def theta_integer(n: int) -> ThetaPolynomial:
    """1 + theta + ... + theta^(n-1)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return ThetaPolynomial([1] * n)


def theta_factorial(n: int) -> ThetaPolynomial:
    """[n]_theta [n-1]_theta ... [1]_theta, with [0]! = 1."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    p = ThetaPolynomial.constant(1)
    for i in range(1, n + 1):
        p = p * theta_integer(i)
    return p


@dataclass(frozen=True)
class WinFraction:
    """Unreduced probability pair.

    ``num`` and ``den`` are either both Fractions or both ThetaPolynomials.
    The pair is kept as is so that :func:`oplus` combines conditioning sets
    correctly; use :meth:`to_reduced_rational` only for display or comparison.
    """

    num: Union[Fraction, ThetaPolynomial]
    den: Union[Fraction, ThetaPolynomial]

    def __post_init__(self):
        num, den = self.num, self.den
        if isinstance(num, int):
            object.__setattr__(self, "num", num := Fraction(num))
        if isinstance(den, int):
            object.__setattr__(self, "den", den := Fraction(den))
        if isinstance(num, ThetaPolynomial) != isinstance(den, ThetaPolynomial):
            raise TypeError("num and den must both be polynomials or both rationals")
        if (den.is_zero() if isinstance(den, ThetaPolynomial) else den == 0):
            raise ZeroDivisionError("WinFraction with zero denominator")

    @property
    def is_polynomial(self) -> bool:
        return isinstance(self.num, ThetaPolynomial)

    def at(self, theta: Rational) -> "WinFraction":
        """Specialise a polynomial-valued fraction at a rational theta."""
        if not self.is_polynomial:
            return self
        return WinFraction(poly_eval(self.num, theta), poly_eval(self.den, theta))

    def to_reduced_rational(self, theta: Rational | None = None) -> Fraction:
        frac = self
        if self.is_polynomial:
            if theta is None:
                raise ValueError("theta required to reduce a polynomial fraction")
            frac = self.at(theta)
        return frac.num / frac.den

    def oplus(self, other: "WinFraction") -> "WinFraction":
        return oplus(self, other)

    def __str__(self):
        if self.is_polynomial:
            return f"({self.num}) / ({self.den})"
        return f"{self.num}/{self.den}"


def oplus(*fractions: WinFraction) -> WinFraction:
    """Mediant sum (a+c)/(b+d) of fractions over disjoint conditioning sets."""
    if not fractions:
        raise ValueError("oplus needs at least one operand")
    kind = fractions[0].is_polynomial
    num, den = fractions[0].num, fractions[0].den
    for f in fractions[1:]:
        if f.is_polynomial != kind:
            raise TypeError("cannot combine polynomial and rational fractions")
        num = num + f.num
        den = den + f.den
    return WinFraction(num, den)


# --- root isolation ---------------------------------------------------------


@dataclass(frozen=True)
class RootBracket:
    """A real root known to lie in [lo, hi]; ``exact`` is set when it is rational and found."""

    lo: Fraction
    hi: Fraction
    exact: Fraction | None = None

    @property
    def midpoint(self) -> Fraction:
        return self.exact if self.exact is not None else (self.lo + self.hi) / 2

    def __float__(self):
        return float(self.midpoint)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _sturm_chain(p: ThetaPolynomial) -> list[ThetaPolynomial]:
    chain = [p, p.derivative()]
    while not chain[-1].is_zero() and chain[-1].degree > 0:
        r = chain[-2] % chain[-1]
        if r.is_zero():
            break
        chain.append(-r)
    return chain


def _sign_changes(chain: Sequence[ThetaPolynomial], x: Fraction) -> int:
    signs = [s for s in (_sign(poly_eval(q, x)) for q in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def simplest_rational_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator in the closed interval [lo, hi] (0 <= lo <= hi)."""
    if lo > hi:
        lo, hi = hi, lo
    if lo < 0:
        raise ValueError("only nonnegative intervals are supported")
    fl = lo.numerator // lo.denominator
    if Fraction(fl) == lo:
        return lo
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # both endpoints share the integer part; recurse on reciprocals of the fractional parts
    inner = simplest_rational_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / inner


def isolate_positive_roots(
    p: ThetaPolynomial,
    interval: tuple[Rational, Rational],
    tol: Rational = Fraction(1, 10**12),
) -> list[RootBracket]:
    """Brackets of width <= tol around every distinct real root of ``p`` in ``interval``.

    Works on the square-free part with a Sturm chain, so it is exact; no floating
    point is involved.  A bracket whose simplest rational is an exact root is
    reported with ``exact`` set.  Endpoints that are roots are reported exactly.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    tol = Fraction(tol)
    if tol <= 0 or lo > hi:
        raise ValueError("need tol > 0 and lo <= hi")
    q = p.square_free()
    chain = _sturm_chain(q)

    found: list[RootBracket] = []
    if poly_eval(q, lo) == 0:
        found.append(RootBracket(lo, lo, lo))

    # each stack entry is a half-open interval (a, b] holding at least one root
    stack = [(lo, hi)]
    isolated = []
    while stack:
        a, b = stack.pop()
        n = _sign_changes(chain, a) - _sign_changes(chain, b)
        if n == 0:
            continue
        if n == 1:
            isolated.append((a, b))
            continue
        m = (a + b) / 2
        stack.append((m, b))
        stack.append((a, m))

    for a, b in sorted(isolated):
        if poly_eval(q, b) == 0:
            found.append(RootBracket(b, b, b))
            continue
        # q(a) may itself vanish (a root excluded from this half-open piece), so track b's sign
        sb = _sign(poly_eval(q, b))
        exact = None
        while b - a > tol:
            m = (a + b) / 2
            sm = _sign(poly_eval(q, m))
            if sm == 0:
                exact = m
                break
            if sm == sb:
                b = m
            else:
                a = m
        if exact is None and a >= 0:
            guess = simplest_rational_between(a, b)
            if poly_eval(q, guess) == 0:
                exact = guess
        if exact is not None:
            found.append(RootBracket(exact, exact, exact))
        else:
            found.append(RootBracket(a, b))
    return sorted(found, key=lambda r: r.lo)
