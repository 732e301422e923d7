"""Permutations in one-line notation, their statistics and prefix structure.

Values are 1-based throughout: a permutation of size m is a word containing
each of 1..m once, and the value m is the best candidate.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

__all__ = [
    "Permutation",
    "StatTag",
    "Statistic",
    "LRMAX",
    "INVERSIONS",
    "PATTERN321",
    "STATISTICS",
    "lr_maxima",
    "lr_maxima_positions",
    "inversions",
    "count_321",
    "flatten",
    "prefix_flatten",
    "is_eligible",
    "is_p_prefixed",
    "is_p_winnable",
    "is_k_winnable",
    "winning_k_range",
    "sigma_apply",
    "identity",
    "all_permutations",
    "EquivarianceViolation",
    "equivariance_defect",
    "check_prefix_equivariance",
]


class Permutation(tuple):
    """A permutation of {1..m} stored as its one-line word."""

    def __new__(cls, word: Sequence[int] | str):
        if isinstance(word, str):
            word = [int(tok) for tok in re.split(r"[\s,]+", word.strip()) if tok]
        word = tuple(int(x) for x in word)
        if not word or sorted(word) != list(range(1, len(word) + 1)):
            raise ValueError(f"not a permutation of 1..m: {word}")
        return super().__new__(cls, word)

    @property
    def size(self) -> int:
        return len(self)

    def __repr__(self):
        return f"Permutation({' '.join(map(str, self))!r})"

    def __str__(self):
        return " ".join(map(str, self))

    def compact(self) -> str:
        """Juxtaposed form, e.g. ``2516374`` (only unambiguous below 10)."""
        return "".join(map(str, self))


def identity(m: int) -> Permutation:
    return Permutation(range(1, m + 1))


def all_permutations(m: int) -> Iterator[Permutation]:
    """S_m in lexicographic order."""
    for w in itertools.permutations(range(1, m + 1)):
        yield Permutation(w)


# --- statistics ---------------------------------------------------------------


def lr_maxima_positions(pi: Sequence[int]) -> list[int]:
    """0-based indices of the left-to-right maxima."""
    out = []
    best = 0
    for i, v in enumerate(pi):
        if v > best:
            best = v
            out.append(i)
    return out


def lr_maxima(pi: Sequence[int]) -> int:
    count = 0
    best = 0
    for v in pi:
        if v > best:
            best = v
            count += 1
    return count


def inversions(pi: Sequence[int]) -> int:
    # O(m^2) is plenty for the sizes that are enumerated
    n = len(pi)
    return sum(1 for i in range(n) for j in range(i + 1, n) if pi[i] > pi[j])


def count_321(pi: Sequence[int]) -> int:
    """Number of index triples i<j<k with pi_i > pi_j > pi_k."""
    n = len(pi)
    total = 0
    for j in range(1, n - 1):
        left = sum(1 for i in range(j) if pi[i] > pi[j])
        if left:
            right = sum(1 for k in range(j + 1, n) if pi[k] < pi[j])
            total += left * right
    return total


class StatTag(enum.Enum):
    LeftToRightMaxima = "lrmax"
    Inversions = "inversions"
    Pattern321Count = "321"
    Custom = "custom"


@dataclass(frozen=True)
class Statistic:
    """A permutation statistic c with an optional upper bound on S_N.

    ``bound(N)`` must dominate c on S_N; it lets the tree solver scale
    weights theta**c to integers.  ``equivariant`` is a declaration, checked
    separately by :func:`check_prefix_equivariance`.
    """

    tag: StatTag
    evaluator: Callable[[Sequence[int]], int] = field(compare=False)
    bound: Optional[Callable[[int], int]] = field(default=None, compare=False)
    equivariant: bool = False
    name: str = ""

    def __call__(self, pi: Sequence[int]) -> int:
        return self.evaluator(pi)

    @property
    def label(self) -> str:
        return self.name or self.tag.value

    @classmethod
    def custom(cls, fn, name="custom", bound=None, equivariant=False) -> "Statistic":
        return cls(StatTag.Custom, fn, bound, equivariant, name)


LRMAX = Statistic(StatTag.LeftToRightMaxima, lr_maxima, lambda n: n, True, "lrmax")
INVERSIONS = Statistic(StatTag.Inversions, inversions, lambda n: n * (n - 1) // 2, True, "inversions")
PATTERN321 = Statistic(
    StatTag.Pattern321Count, count_321, lambda n: n * (n - 1) * (n - 2) // 6, False, "321"
)

STATISTICS = {
    "lrmax": LRMAX,
    "ewens": LRMAX,
    "inversions": INVERSIONS,
    "inv": INVERSIONS,
    "mallows": INVERSIONS,
    "321": PATTERN321,
    "pattern321": PATTERN321,
}


# --- prefixes -------------------------------------------------------------------


def flatten(seq: Sequence[int]) -> tuple[int, ...]:
    """The word on {1..len(seq)} order-isomorphic to ``seq``."""
    order = sorted(range(len(seq)), key=seq.__getitem__)
    out = [0] * len(seq)
    for rank, idx in enumerate(order, start=1):
        out[idx] = rank
    return tuple(out)


def prefix_flatten(pi: Sequence[int], i: int) -> Permutation:
    if not 1 <= i <= len(pi):
        raise ValueError(f"prefix length {i} out of range 1..{len(pi)}")
    return Permutation(flatten(pi[:i]))


def is_eligible(p: Sequence[int], n: int) -> bool:
    """A prefix is eligible when it ends in a left-to-right maximum or is complete."""
    m = len(p)
    if m > n:
        raise ValueError("prefix longer than the game")
    return m == n or p[-1] == m


def is_p_prefixed(pi: Sequence[int], p: Sequence[int]) -> bool:
    if len(p) > len(pi):
        return False
    return flatten(pi[: len(p)]) == tuple(p)


def is_p_winnable(pi: Sequence[int], p: Sequence[int]) -> bool:
    return is_p_prefixed(pi, p) and pi[len(p) - 1] == len(pi)


def is_k_winnable(pi: Sequence[int], k: int) -> bool:
    """Whether "reject the first k, then take the next left-to-right maximum" hires the best.

    Implemented as a direct scan so it can act as an oracle for the tree solver.
    """
    n = len(pi)
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of range 0..{n}")
    if k == n:
        return False
    if k == 0:
        return pi[0] == n
    threshold = max(pi[:k])
    for v in pi[k:]:
        if v > threshold:
            return v == n
    return False


def winning_k_range(pi: Sequence[int]) -> range:
    """All k for which ``pi`` is k-winnable, as a range (possibly empty).

    Those are k with r < k <= t where t is the position of the maximum and r the
    previous left-to-right maximum (0-based).  Cheaper than testing every k.
    """
    maxima = lr_maxima_positions(pi)
    t = maxima[-1]
    if len(maxima) == 1:
        return range(0, 1)
    return range(maxima[-2] + 1, t + 1)


def sigma_apply(q: Sequence[int], pi: Sequence[int]) -> Permutation:
    """Rearrange the (increasing) first len(q) entries of ``pi`` into relative order q."""
    k = len(q)
    head = pi[:k]
    if k > len(pi) or any(a > b for a, b in zip(head, head[1:])):
        raise ValueError("sigma_apply needs pi whose first k entries increase")
    ordered = sorted(head)
    return Permutation([ordered[r - 1] for r in q] + list(pi[k:]))


# --- prefix equivariance ---------------------------------------------------------


@dataclass(frozen=True)
class EquivarianceViolation:
    q: Permutation
    pi: Permutation
    lhs: int  # c(pi) - c(sigma_q pi)
    rhs: int  # c(12..k) - c(q)

    @property
    def image(self) -> Permutation:
        return sigma_apply(self.q, self.pi)

    def __str__(self):
        return (
            f"q={self.q.compact()} pi={self.pi} -> {self.image}: "
            f"c(pi)-c(sigma pi)={self.lhs} but c(id)-c(q)={self.rhs}"
        )


def equivariance_defect(c: Statistic | Callable, q: Sequence[int], pi: Sequence[int]) -> int:
    """(c(pi) - c(sigma_q pi)) - (c(12..k) - c(q)); zero when the pair is consistent."""
    k = len(q)
    lhs = c(pi) - c(sigma_apply(q, pi))
    rhs = c(tuple(range(1, k + 1))) - c(q)
    return lhs - rhs


def check_prefix_equivariance(c: Statistic | Callable, n: int):
    """Exhaustively test prefix equivariance of ``c`` on all prefixes up to size n.

    Returns True, or the first :class:`EquivarianceViolation` found, scanning
    k ascending, then the size of pi, then q and pi in lexicographic order.
    Cost is roughly n * sum(m!) statistic evaluations, so keep n <= 8.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    for k in range(1, n + 1):
        idk = tuple(range(1, k + 1))
        c_id = c(idk)
        qs = [(q, c_id - c(q)) for q in itertools.permutations(idk) if q != idk]
        for m in range(k, n + 1):
            # pi ranges over size-m words whose first k entries increase
            pis = [
                (pi, c(pi))
                for pi in itertools.permutations(range(1, m + 1))
                if all(pi[i] < pi[i + 1] for i in range(k - 1))
            ]
            for q, rhs in qs:
                for pi, c_pi in pis:
                    image = sigma_apply(q, pi)
                    lhs = c_pi - c(image)
                    if lhs != rhs:
                        return EquivarianceViolation(Permutation(q), Permutation(pi), lhs, rhs)
    return True
