"""Backward induction over the prefix tree of a weighted best-choice game.

The solver walks every prefix of S_N once (sum of N!/(N-i)! nodes).  Weights
theta**c are scaled to integers, theta = a/b giving a**c * b**(B-c) with B an
upper bound for c on S_N, so all comparisons are exact integer comparisons and
nothing is reduced until a result is reported.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .exactnum import ThetaPolynomial, WinFraction, oplus
from .permutation import (
    Permutation,
    Statistic,
    all_permutations,
    flatten,
    is_eligible,
    is_k_winnable,
    sigma_apply,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 9

__all__ = [
    "BudgetExceeded",
    "GameSpec",
    "SolveResult",
    "solve",
    "strike_probability",
    "open_probability",
    "closed_probability",
    "positional_win",
    "positional_profile",
    "positional_strike_set",
    "is_valid_strike_set",
    "verify_positionality",
    "PositionalityReport",
    "check_sigma_symmetry",
    "SymmetryReport",
    "solve_increasing_chain",
    "ChainResult",
    "children",
    "extensions",
]


class BudgetExceeded(ValueError):
    """Raised when N is larger than the enumeration budget."""


@dataclass(frozen=True)
class GameSpec:
    n: int
    statistic: Statistic
    theta: Optional[Fraction] = Fraction(1)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("N must be >= 1")
        if self.theta is not None:
            theta = Fraction(self.theta)
            if theta <= 0:
                raise ValueError("theta must be positive")
            object.__setattr__(self, "theta", theta)

    @property
    def symbolic(self) -> bool:
        return self.theta is None


def children(p: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """The m+1 one-step extensions of a size-m prefix, by relative rank of the newcomer."""
    m = len(p)
    for r in range(1, m + 2):
        yield tuple(x + (x >= r) for x in p) + (r,)


def extensions(p: Sequence[int], n: int) -> Iterator[tuple[int, ...]]:
    """All pi in S_n whose prefix flattening of size len(p) is p."""
    stack = [tuple(p)]
    while stack:
        q = stack.pop()
        if len(q) == n:
            yield q
        else:
            stack.extend(children(q))


class _Weigher:
    """Integer-scaled weights theta**c = weight / scale."""

    def __init__(self, spec: GameSpec):
        self.spec = spec
        c = spec.statistic
        theta = spec.theta
        a, b = theta.numerator, theta.denominator
        if c.bound is not None:
            top = c.bound(spec.n)
        else:
            top = max(c(pi) for pi in all_permutations(spec.n))
        self._powers = [a**e * b ** (top - e) for e in range(top + 1)]
        self.scale = b**top

    def __call__(self, pi: Sequence[int]) -> int:
        return self._powers[self.spec.statistic(pi)]

    def fraction(self, num: int, den: int) -> WinFraction:
        return WinFraction(Fraction(num, self.scale), Fraction(den, self.scale))


@dataclass
class _Tree:
    """Raw node table: prefix -> (strike numerator, open numerator, denominator)."""

    spec: GameSpec
    weigher: _Weigher
    root: tuple[int, ...]
    nodes: dict[tuple[int, ...], tuple[int, int, int]]

    def closed(self, p) -> int:
        s, o, _ = self.nodes[p]
        return s if s >= o else o


def _walk(spec: GameSpec, root: Sequence[int] = (1,)) -> _Tree:
    n = spec.n
    weigh = _Weigher(spec)
    nodes: dict[tuple[int, ...], tuple[int, int, int]] = {}
    # win_acc[m] collects weights of leaves won by accepting the current size-m ancestor
    win_acc = [0] * (n + 1)

    def visit(p: tuple[int, ...]) -> tuple[int, int]:
        m = len(p)
        if m == n:
            w = weigh(p)
            t = p.index(n) + 1
            if t < n:
                win_acc[t] += w
            s = w if t == n else 0
            nodes[p] = (s, 0, w)
            return w, s
        win_acc[m] = 0
        den = 0
        opened = 0
        for child in children(p):
            d, closed = visit(child)
            den += d
            opened += closed
        s = win_acc[m]
        nodes[p] = (s, opened, den)
        return den, (s if s >= opened else opened)

    visit(tuple(root))
    return _Tree(spec, weigh, tuple(root), nodes)


def _check_budget(spec: GameSpec, budget: int):
    if spec.n > budget:
        raise BudgetExceeded(f"N={spec.n} exceeds the enumeration budget {budget}")


# --- single-prefix probabilities ------------------------------------------------


def _weight_poly_or_value(spec: GameSpec, pis) -> ThetaPolynomial | Fraction:
    c = spec.statistic
    if spec.symbolic:
        hist: dict[int, int] = {}
        for pi in pis:
            e = c(pi)
            hist[e] = hist.get(e, 0) + 1
        return ThetaPolynomial.from_exponent_counts(hist)
    return sum((spec.theta ** c(pi) for pi in pis), Fraction(0))


def strike_probability(p: Sequence[int], spec: GameSpec) -> WinFraction:
    """S(p) with the standard denominator, by direct enumeration of p-prefixed pi.

    With ``spec.theta is None`` the result is a fraction of theta-polynomials.
    """
    if len(p) > spec.n:
        raise ValueError("prefix longer than the game")
    k = len(p)
    prefixed = list(extensions(p, spec.n))
    winnable = [pi for pi in prefixed if pi[k - 1] == spec.n]
    return WinFraction(_weight_poly_or_value(spec, winnable), _weight_poly_or_value(spec, prefixed))


def open_probability(p: Sequence[int], spec: GameSpec, budget: int = DEFAULT_BUDGET) -> WinFraction:
    """Best win probability after rejecting p, conditional on p-prefixed pi."""
    _check_budget(spec, budget)
    tree = _walk(spec, p)
    _, o, d = tree.nodes[tuple(p)]
    return tree.weigher.fraction(o, d)


def closed_probability(p: Sequence[int], spec: GameSpec, budget: int = DEFAULT_BUDGET) -> WinFraction:
    """max(S(p), open(p)) over the standard denominator."""
    _check_budget(spec, budget)
    tree = _walk(spec, p)
    _, _, d = tree.nodes[tuple(p)]
    return tree.weigher.fraction(tree.closed(tuple(p)), d)


# --- strike sets -------------------------------------------------------------------


def positional_strike_set(n: int, k: int) -> frozenset[Permutation]:
    """Strike set of "reject the first k candidates, accept the next left-to-right maximum"."""
    if not 0 <= k <= n - 1:
        raise ValueError("k must lie in 0..N-1")
    out = set()
    stack = [(1,)]
    while stack:
        p = stack.pop()
        m = len(p)
        if m > k and (p[-1] == m or m == n):
            out.add(Permutation(p))
        else:
            stack.extend(children(p))
    return frozenset(out)


def is_valid_strike_set(strike: Sequence[Sequence[int]], n: int) -> bool:
    """Eligible, an antichain under prefix containment, and covering S_n."""
    sset = {tuple(p) for p in strike}
    if not all(is_eligible(p, n) for p in sset):
        return False
    for p in sset:
        for i in range(1, len(p)):
            if flatten(p[:i]) in sset:
                return False
    for pi in all_permutations(n):
        if not any(flatten(pi[:i]) in sset for i in range(1, n + 1)):
            return False
    return True


# --- solve ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolveResult:
    spec: GameSpec
    optimal_win: WinFraction
    strike_set: frozenset[Permutation]
    positivity: dict[Permutation, bool] = field(repr=False)
    positional_k: Optional[int]
    ties: tuple[Permutation, ...] = ()

    @property
    def optimal(self) -> Fraction:
        return self.optimal_win.to_reduced_rational()

    def to_json_dict(self) -> dict:
        opt = self.optimal
        theta = self.spec.theta
        return {
            "N": self.spec.n,
            "statistic": self.spec.statistic.label,
            "theta": f"{theta.numerator}/{theta.denominator}",
            "optimal": f"{opt.numerator}/{opt.denominator}",
            "positional_k": self.positional_k,
            "strike_set": [str(p) for p in sorted(self.strike_set, key=lambda p: (len(p), tuple(p)))],
        }


def solve(spec: GameSpec, budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Optimal strike set and win probability by backward induction.

    Ties S(p) = S_open(p) count as positive (accept).  Tied prefixes below
    size N are returned in ``ties`` and logged at debug level.
    """
    if spec.symbolic:
        raise ValueError("solve needs a concrete rational theta")
    _check_budget(spec, budget)
    tree = _walk(spec)
    n = spec.n

    positivity: dict[Permutation, bool] = {}
    ties = []
    for p, (s, o, _) in tree.nodes.items():
        if is_eligible(p, n):
            positivity[Permutation(p)] = s >= o
            if s == o and len(p) < n:
                ties.append(Permutation(p))
    if ties:
        log.debug("positivity ties at %d prefixes for %s", len(ties), spec)

    strike = set()
    stack = [(1,)]
    while stack:
        p = stack.pop()
        if len(p) == n or (p[-1] == len(p) and positivity[Permutation(p)]):
            strike.add(Permutation(p))
        else:
            stack.extend(children(p))
    strike = frozenset(strike)

    pieces = [tree.weigher.fraction(tree.nodes[tuple(p)][0], tree.nodes[tuple(p)][2]) for p in strike]
    total = oplus(*pieces)

    k0 = min(len(p) for p in strike) - 1
    k = k0 if strike == positional_strike_set(n, k0) else None
    return SolveResult(spec, total, strike, positivity, k, tuple(sorted(ties)))


# --- positional strategies -----------------------------------------------------------


def positional_profile(spec: GameSpec, budget: int = DEFAULT_BUDGET) -> list[WinFraction]:
    """Win fractions of every positional strategy k = 0..N-1, by is_k_winnable enumeration."""
    _check_budget(spec, budget)
    n = spec.n
    perms = list(all_permutations(n))
    out = []
    for k in range(n):
        won = [pi for pi in perms if is_k_winnable(pi, k)]
        out.append(WinFraction(_weight_poly_or_value(spec, won), _weight_poly_or_value(spec, perms)))
    return out


def positional_win(spec: GameSpec, k: int, budget: int = DEFAULT_BUDGET) -> WinFraction:
    if not 0 <= k <= spec.n - 1:
        raise ValueError("k must lie in 0..N-1")
    _check_budget(spec, budget)
    perms = list(all_permutations(spec.n))
    won = [pi for pi in perms if is_k_winnable(pi, k)]
    return WinFraction(_weight_poly_or_value(spec, won), _weight_poly_or_value(spec, perms))


@dataclass(frozen=True)
class PositionalityReport:
    spec: GameSpec
    optimal: Fraction
    best_positional: Fraction
    argmax_k: tuple[int, ...]
    strike_k: Optional[int]

    @property
    def positional(self) -> bool:
        return self.optimal == self.best_positional and self.strike_k is not None

    def __str__(self):
        tag = "positional" if self.positional else "NOT positional"
        return (
            f"N={self.spec.n} c={self.spec.statistic.label} theta={self.spec.theta}: {tag}; "
            f"tree optimum {self.optimal}, best positional {self.best_positional} at k={list(self.argmax_k)}"
        )


def verify_positionality(spec: GameSpec, budget: int = DEFAULT_BUDGET) -> PositionalityReport:
    result = solve(spec, budget)
    profile = [w.to_reduced_rational() for w in positional_profile(spec, budget)]
    best = max(profile)
    argmax = tuple(k for k, v in enumerate(profile) if v == best)
    return PositionalityReport(spec, result.optimal, best, argmax, result.positional_k)


# --- sigma symmetry ------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetryReport:
    ok: bool
    checked: int
    failures: tuple[tuple[Permutation, Permutation], ...] = ()


def check_sigma_symmetry(spec: GameSpec, budget: int = DEFAULT_BUDGET) -> SymmetryReport:
    """Check that sigma_q preserves S, S_open and positivity on T(12..k) for every q.

    The prefix 12..k itself is included only when q ends in its maximum.  For
    k < N that is eligibility; a complete q such as 12..(N)(N-1) is eligible
    but loses, so its strike probability cannot match that of 12..N.  Ratios
    are compared as reduced rationals via cross-multiplication.
    """
    _check_budget(spec, budget)
    tree = _walk(spec)
    nodes = tree.nodes
    n = spec.n
    checked = 0
    failures = []
    by_head: dict[int, list[tuple[int, ...]]] = {}
    for p in nodes:
        for k in range(1, len(p) + 1):
            if all(p[i] < p[i + 1] for i in range(k - 1)):
                by_head.setdefault(k, []).append(p)
            else:
                break
    for k in range(1, n + 1):
        idk = tuple(range(1, k + 1))
        for q in all_permutations(k):
            if tuple(q) == idk:
                continue
            q_eligible = q[-1] == k
            for p in by_head.get(k, ()):
                if len(p) == k and not q_eligible:
                    continue
                image = tuple(sigma_apply(q, p))
                s1, o1, d1 = nodes[p]
                s2, o2, d2 = nodes[image]
                same = s1 * d2 == s2 * d1 and o1 * d2 == o2 * d1
                if is_eligible(p, n):
                    same = same and (s1 >= o1) == (s2 >= o2)
                checked += 1
                if not same:
                    failures.append((q, Permutation(p)))
    return SymmetryReport(not failures, checked, tuple(failures))


# --- increasing-chain solver for equivariant statistics --------------------------------


@dataclass(frozen=True)
class ChainResult:
    spec: GameSpec
    optimal_win: WinFraction
    positive_sizes: tuple[bool, ...]  # index m-1 -> is 12..m positive
    positional_k: Optional[int]

    @property
    def optimal(self) -> Fraction:
        return self.optimal_win.to_reduced_rational()


def solve_increasing_chain(spec: GameSpec) -> ChainResult:
    """Solve an equivariant game along the increasing prefixes 1, 12, ..., 12..N only.

    Each non-increasing child 12..(k-1)j of 12..(k-1) is a sigma-image of the
    subtree below 12..k scaled by theta**(c(r)-c(12..k)), which turns the
    backward induction into a single pass over k.  No tree enumeration, so N
    can be in the hundreds; only valid for prefix equivariant statistics.
    """
    if spec.symbolic:
        raise ValueError("solve_increasing_chain needs a concrete theta")
    if not spec.statistic.equivariant:
        raise ValueError(f"statistic {spec.statistic.label} is not declared prefix equivariant")
    n, theta, c = spec.n, spec.theta, spec.statistic
    d = theta ** c(range(1, n + 1))
    s, o = d, Fraction(0)
    positive = [True] * n
    for k in range(n, 1, -1):
        base = c(range(1, k + 1))
        mult = Fraction(0)
        for j in range(1, k):
            r = list(range(1, j)) + list(range(j + 1, k + 1)) + [j]
            mult += theta ** (c(r) - base)
        positive[k - 1] = s >= o
        closed = s if s >= o else o
        s, o, d = s * mult, closed + o * mult, d * (1 + mult)
    positive[0] = s >= o
    best = s if s >= o else o
    first_pos = positive.index(True)
    k = first_pos if all(positive[first_pos:]) else None
    return ChainResult(spec, WinFraction(best, d), tuple(positive), k)
