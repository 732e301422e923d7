"""W(N,k) polynomials, critical roots and strategy functions for the Ewens and Mallows games.

W(N,k) is the theta-weighted count of permutations won by the positional
strategy that rejects k candidates.  For Ewens the weight is
theta**(#left-to-right maxima), for Mallows theta**(#inversions).

Large-N profiles (N in the hundreds or thousands) are evaluated exactly at a
rational theta with a shared integer denominator, so the argmax is an integer
comparison and no huge gcd is ever taken.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Optional

from .exactnum import (
    THETA,
    ThetaPolynomial,
    isolate_positive_roots,
    poly_eval,
    rising_factorial,
    theta_factorial,
    theta_integer,
)
from .permutation import INVERSIONS, LRMAX, Statistic, all_permutations, is_k_winnable

__all__ = [
    "Model",
    "WTable",
    "StrategyProfile",
    "normalizer",
    "enumerate_w_table",
    "ewens_w_recurrence",
    "ewens_w_closed",
    "ewens_delta_w",
    "ewens_delta_w_factored",
    "ewens_critical_root",
    "ewens_critical_roots",
    "ewens_kappa",
    "mallows_w_recurrence",
    "mallows_w_closed",
    "mallows_delta_w",
    "mallows_critical_roots",
    "mallows_kappa",
    "ewens_profile",
    "mallows_profile",
    "strategy_profile",
    "harmonic_tail",
]


class Model(enum.Enum):
    EWENS = "ewens"
    MALLOWS = "mallows"

    @property
    def statistic(self) -> Statistic:
        return LRMAX if self is Model.EWENS else INVERSIONS

    @classmethod
    def parse(cls, s: "str | Model") -> "Model":
        return s if isinstance(s, Model) else cls(s.lower())


def normalizer(model: Model | str, n: int) -> ThetaPolynomial:
    """<N>! for Ewens, [N]! for Mallows."""
    model = Model.parse(model)
    return rising_factorial(n) if model is Model.EWENS else theta_factorial(n)


@dataclass(frozen=True)
class WTable:
    model: Model
    n: int
    entries: tuple[ThetaPolynomial, ...]  # index k = 0..N

    def __getitem__(self, k: int) -> ThetaPolynomial:
        return self.entries[k]

    def __len__(self):
        return len(self.entries)

    def csv_rows(self) -> list[str]:
        """Rows "N,k,coeff0,coeff1,..." for k = 0..N-1 (W(N,N) = 0 is omitted)."""
        rows = []
        for k in range(self.n):
            coeffs = ",".join(str(c) for c in self.entries[k].coefficients)
            rows.append(f"{self.n},{k},{coeffs}")
        return rows


def harmonic_tail(lo: int, hi: int) -> Fraction:
    """sum_{i=lo}^{hi} 1/i (empty sums are 0)."""
    return sum((Fraction(1, i) for i in range(lo, hi + 1)), Fraction(0))


# --- enumeration oracle -----------------------------------------------------------


def enumerate_w_table(model: Model | str, n: int) -> WTable:
    """Brute force over S_N; used as the independent oracle for the recurrences."""
    model = Model.parse(model)
    c = model.statistic
    hist = [dict() for _ in range(n + 1)]
    for pi in all_permutations(n):
        e = c(pi)
        for k in range(n + 1):
            if is_k_winnable(pi, k):
                hist[k][e] = hist[k].get(e, 0) + 1
    return WTable(model, n, tuple(ThetaPolynomial.from_exponent_counts(h) for h in hist))


# --- Ewens ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def ewens_w_recurrence(n: int) -> WTable:
    """W(N,k) = (N-1) W(N-1,k) + (N-2)!/(k-1)! theta <k>!  for 1 <= k <= N-1.

    The k = 0 column is (N-1)! theta directly and W(N,N) = 0.
    """
    if n < 1:
        raise ValueError("N must be >= 1")
    if n == 1:
        return WTable(Model.EWENS, 1, (THETA, ThetaPolynomial()))
    prev = ewens_w_recurrence(n - 1)
    row = [THETA * math.factorial(n - 1)]
    for k in range(1, n):
        carry = prev[k] if k < n - 1 else ThetaPolynomial()
        extra = Fraction(math.factorial(n - 2), math.factorial(k - 1)) * THETA * rising_factorial(k)
        row.append(carry * (n - 1) + extra)
    row.append(ThetaPolynomial())
    return WTable(Model.EWENS, n, tuple(row))


def ewens_w_closed(n: int, k: int) -> ThetaPolynomial:
    """theta <k>! (N-1)!/(k-1)! sum_{i=k}^{N-1} 1/i, with the k = 0 and k = N cases separate."""
    if not 0 <= k <= n:
        raise ValueError("k must lie in 0..N")
    if k == n:
        return ThetaPolynomial()
    if k == 0:
        return THETA * math.factorial(n - 1)
    const = Fraction(math.factorial(n - 1), math.factorial(k - 1)) * harmonic_tail(k, n - 1)
    if const.denominator != 1:
        raise ArithmeticError(f"non-integral W({n},{k}) constant {const}")
    return THETA * rising_factorial(k) * const


def ewens_delta_w(n: int, k: int) -> ThetaPolynomial:
    """W(N,k+1) - W(N,k) from the recurrence table."""
    if not 0 <= k <= n - 1:
        raise ValueError("k must lie in 0..N-1")
    table = ewens_w_recurrence(n)
    return table[k + 1] - table[k]


def ewens_delta_w_factored(n: int, k: int) -> ThetaPolynomial:
    """prod_{j=k+1}^{N-1} j * ((sum_{i=k+1}^{N-1} 1/i) theta - 1) * theta <k>!."""
    c1 = math.prod(range(k + 1, n))
    linear = ThetaPolynomial((-1, harmonic_tail(k + 1, n - 1)))
    return linear * THETA * rising_factorial(k) * c1


def ewens_critical_root(n: int, k: int) -> Fraction:
    """The unique positive root of W(N,k+1) - W(N,k): 1 / sum_{i=k+1}^{N-1} 1/i."""
    if not 0 <= k <= n - 2:
        raise ValueError("k must lie in 0..N-2")
    return 1 / harmonic_tail(k + 1, n - 1)


def ewens_critical_roots(n: int) -> list[Fraction]:
    """Roots for k = 0..N-2, computed with one running harmonic sum."""
    roots = []
    acc = Fraction(0)
    for i in range(n - 1, 0, -1):
        acc += Fraction(1, i)
        roots.append(1 / acc)
    return roots[::-1]


def roots_csv_rows(n_max: int) -> list[str]:
    """Rows "N,k,num,den[,starred]"; starred marks the interval (root_{k-1}, root_k] holding theta = 1."""
    rows = []
    for n in range(2, n_max + 1):
        roots = ewens_critical_roots(n)
        star = ewens_kappa(n, 1)
        for k, r in enumerate(roots):
            tail = ",starred" if k == star else ""
            rows.append(f"{n},{k},{r.numerator},{r.denominator}{tail}")
    return rows


def ewens_kappa(n: int, theta) -> int:
    """Optimal number of rejections; ties at a critical root go to the smaller k.

    kappa = k on (root_{k-1}, root_k], 0 below root_0, and N-1 above N-1.
    """
    theta = Fraction(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    for k, r in enumerate(ewens_critical_roots(n)):
        if theta <= r:
            return k
    return n - 1


# --- Mallows --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def mallows_w_recurrence(n: int) -> WTable:
    """W(N,k) = theta [N-1] W(N-1,k) + theta^(N-k-1) [k] [N-2]!  for 1 <= k <= N-1.

    W(1,0) = 1, W(N,0) = theta^(N-1) [N-1]!, W(N,N) = 0.
    """
    if n < 1:
        raise ValueError("N must be >= 1")
    if n == 1:
        return WTable(Model.MALLOWS, 1, (ThetaPolynomial.constant(1), ThetaPolynomial()))
    prev = mallows_w_recurrence(n - 1)
    row = [ThetaPolynomial.monomial(n - 1) * theta_factorial(n - 1)]
    step = THETA * theta_integer(n - 1)
    fact = theta_factorial(n - 2)
    for k in range(1, n):
        carry = prev[k] if k < n - 1 else ThetaPolynomial()
        row.append(step * carry + ThetaPolynomial.monomial(n - k - 1) * theta_integer(k) * fact)
    row.append(ThetaPolynomial())
    return WTable(Model.MALLOWS, n, tuple(row))


def mallows_w_closed(n: int, k: int) -> ThetaPolynomial:
    """theta^(N-k-1) [N-1]! sum_{i=k}^{N-1} [k]/[i], each term divided exactly."""
    if not 0 <= k <= n:
        raise ValueError("k must lie in 0..N")
    if k == n:
        return ThetaPolynomial()
    fact = theta_factorial(n - 1)
    if k == 0:
        return ThetaPolynomial.monomial(n - 1) * fact
    qk = theta_integer(k)
    total = ThetaPolynomial()
    for i in range(k, n):
        total = total + (fact * qk).exact_div(theta_integer(i))
    return ThetaPolynomial.monomial(n - k - 1) * total


def mallows_delta_w(n: int, k: int) -> ThetaPolynomial:
    if not 0 <= k <= n - 1:
        raise ValueError("k must lie in 0..N-1")
    table = mallows_w_recurrence(n)
    return table[k + 1] - table[k]


def mallows_critical_roots(n: int, k: int, hi=None, tol=Fraction(1, 10**12)):
    """Positive real roots of the Mallows Delta W(N,k), isolated by exact bisection.

    No closed form is known, so these are brackets (RootBracket) in (0, hi].
    """
    p = mallows_delta_w(n, k)
    # strip the theta^m factor so 0 is not reported
    c = p.coefficients
    shift = next(i for i, x in enumerate(c) if x != 0)
    p = ThetaPolynomial(c[shift:])
    if hi is None:
        # Cauchy bound on positive roots
        lead = abs(p.leading)
        hi = 1 + max((abs(x) / lead for x in p.coefficients[:-1]), default=Fraction(0))
    return isolate_positive_roots(p, (Fraction(0), Fraction(hi)), tol)


# --- strategy profiles ------------------------------------------------------------------


@dataclass(frozen=True)
class StrategyProfile:
    """Win probability of every positional strategy at one theta.

    Stored as integer numerators over one shared positive denominator; the
    reduced Fractions in ``win_by_k`` are built lazily.
    """

    model: Optional[Model]
    n: int
    theta: Fraction
    numerators: tuple[int, ...]  # k = 0..N-1
    denominator: int

    def win(self, k: int) -> Fraction:
        return Fraction(self.numerators[k], self.denominator)

    def win_float(self, k: int) -> float:
        return self.numerators[k] / self.denominator

    @cached_property
    def win_by_k(self) -> dict[int, Fraction]:
        return {k: self.win(k) for k in range(len(self.numerators))}

    @property
    def kappa(self) -> int:
        """Smallest argmax."""
        best = max(self.numerators)
        return self.numerators.index(best)

    @property
    def optimal(self) -> Fraction:
        return self.win(self.kappa)


def strategy_profile(model: Model | str, n: int, theta) -> StrategyProfile:
    """Profile from the exact W-table polynomials (small N; cross-check for the fast paths)."""
    model = Model.parse(model)
    theta = Fraction(theta)
    table = ewens_w_recurrence(n) if model is Model.EWENS else mallows_w_recurrence(n)
    norm = poly_eval(normalizer(model, n), theta)
    probs = [poly_eval(table[k], theta) / norm for k in range(n)]
    common = math.lcm(*(p.denominator for p in probs))
    return StrategyProfile(model, n, theta, tuple(int(p * common) for p in probs), common)


def ewens_profile(n: int, theta) -> StrategyProfile:
    """Exact W(N,k)/<N>! at theta = a/b for all k, over a shared integer denominator.

    p(k) = a b^(N-k-1) (N-1)!/(k-1)! h_k P_k / (L P_N) for k >= 1 with
    P_k = prod_{j<k}(a + j b), L = lcm(1..N-1), h_k = L * sum_{i=k}^{N-1} 1/i,
    and p(0) = a b^(N-1) (N-1)! / P_N.
    """
    theta = Fraction(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    a, b = theta.numerator, theta.denominator
    L = math.lcm(*range(1, n)) if n > 1 else 1
    fact = math.factorial(n - 1)
    h = [0] * (n + 1)
    for i in range(n - 1, 0, -1):
        h[i] = h[i + 1] + L // i
    P = [1] * (n + 1)
    for j in range(n):
        P[j + 1] = P[j] * (a + j * b)
    nums = [a * b ** (n - 1) * fact * L]
    falling = fact  # (N-1)!/(k-1)!
    for k in range(1, n):
        if k > 1:
            falling //= k - 1
        nums.append(a * b ** (n - k - 1) * falling * h[k] * P[k])
    return StrategyProfile(Model.EWENS, n, theta, tuple(nums), L * P[n])


def mallows_profile(n: int, theta) -> StrategyProfile:
    """Exact W(N,k)/[N]! at theta = a/b for all k, over a shared integer denominator.

    With u_i = b^i - a^i and U = prod_{i<N} u_i, the k >= 1 probability is
    (b-a) b u_k a^(N-k) sum_{i=k}^{N-1} b^(i-1) U/u_i  /  (a u_N U), and
    k = 0 gives a^(N-1)(b-a)/u_N.  theta = 1 uses the classical counts.
    """
    theta = Fraction(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    if theta == 1:
        L = math.lcm(*range(1, n)) if n > 1 else 1
        tail = 0
        nums = [0] * n
        for k in range(n - 1, 0, -1):
            tail += L // k
            nums[k] = k * tail
        nums[0] = L
        return StrategyProfile(Model.MALLOWS, n, theta, tuple(nums), n * L)
    a, b = theta.numerator, theta.denominator
    u = [b**i - a**i for i in range(n + 1)]
    U = math.prod(u[1:n])
    num_scale = b - a
    den = a * u[n] * U
    nums = [0] * n
    nums[0] = a**n * U * num_scale
    tail = 0
    for k in range(n - 1, 0, -1):
        tail += b ** (k - 1) * (U // u[k])
        nums[k] = num_scale * b * u[k] * a ** (n - k) * tail
    if den < 0:
        den = -den
        nums = [-x for x in nums]
    return StrategyProfile(Model.MALLOWS, n, theta, tuple(nums), den)


def mallows_kappa(n: int, theta) -> StrategyProfile:
    """Full exact Mallows profile; ``.kappa`` is the smallest argmax."""
    return mallows_profile(n, theta)
