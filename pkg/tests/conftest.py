"""Brute-force oracles shared by the tests.

Everything here is written from the definitions with plain itertools and
Fraction so it stays independent of the package under test.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def perms(n):
    return list(itertools.permutations(range(1, n + 1)))


def brute_lrmax(w):
    return sum(1 for i, v in enumerate(w) if all(v > u for u in w[:i]))


def brute_inv(w):
    return sum(1 for i, j in itertools.combinations(range(len(w)), 2) if w[i] > w[j])


def brute_321(w):
    return sum(1 for i, j, k in itertools.combinations(range(len(w)), 3) if w[i] > w[j] > w[k])


def brute_k_wins(w, k):
    """Reject k, then accept the first candidate beating everyone seen; True if it is the best."""
    n = len(w)
    seen = max(w[:k], default=0)
    for v in w[k:]:
        if v > seen:
            return v == n
    return False


def brute_poly(n, stat, pred=lambda w: True):
    """Coefficient list of sum over words satisfying pred of theta^stat."""
    coeffs = {}
    for w in perms(n):
        if pred(w):
            e = stat(w)
            coeffs[e] = coeffs.get(e, 0) + 1
    top = max(coeffs, default=-1)
    return [coeffs.get(i, 0) for i in range(top + 1)]


def brute_positional(n, stat, theta, k):
    theta = Fraction(theta)
    num = den = Fraction(0)
    for w in perms(n):
        wt = theta ** stat(w)
        den += wt
        if brute_k_wins(w, k):
            num += wt
    return num / den


def _rel(seq):
    s = sorted(seq)
    return tuple(s.index(x) + 1 for x in seq)


def brute_optimal(n, stat, theta):
    """Optimal stopping value by memoised backward induction over raw prefixes."""
    theta = Fraction(theta)
    words = perms(n)
    weight = {w: theta ** stat(w) for w in words}
    groups = {}
    for w in words:
        for i in range(1, n + 1):
            groups.setdefault(_rel(w[:i]), []).append(w)
    memo = {}

    def closed(p):
        if p in memo:
            return memo[p]
        ws = groups[p]
        tot = sum(weight[w] for w in ws)
        m = len(p)
        strike = sum(weight[w] for w in ws if w[m - 1] == n) / tot
        if m == n:
            val = strike
        else:
            cont = Fraction(0)
            for j in range(1, m + 2):
                child = tuple(x + 1 if x >= j else x for x in p) + (j,)
                cont += sum(weight[w] for w in groups[child]) / tot * closed(child)
            val = max(strike, cont) if p[-1] == m else cont
        memo[p] = val
        return val

    return closed((1,))

