"""Random permutations from the Ewens and Mallows distributions, and Monte Carlo play.

Mallows: grow the word one value at a time; at step m the new last entry is
i in 1..m with weight theta**(m-i), since it sits above m-i earlier values.

Ewens: Chinese-restaurant process (a new cycle with weight theta, otherwise
join after one of the m-1 seated customers), then write each cycle starting
from its maximum and concatenate the cycles by increasing maximum.  Cycle
maxima become left-to-right maxima, so the word has weight theta**(#lr-maxima).

Randomness comes from numpy's Philox4x64-10 counter-based generator; worker
streams are spawned from one SeedSequence, so results depend only on
(seed, workers).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional, TextIO, Union

import numpy as np

from .permutation import Permutation, flatten

__all__ = [
    "GENERATOR",
    "make_rng",
    "sample_mallows",
    "sample_ewens",
    "sample_mallows_batch",
    "sample_ewens_batch",
    "sample_uniform_batch",
    "sample_batch",
    "positional_wins",
    "SimConfig",
    "SimResult",
    "run_simulation",
    "empirical_distribution",
    "total_variation",
]

GENERATOR = "numpy.random.Philox (Philox4x64-10)"
_CHUNK = 1 << 16


def make_rng(seed: Union[int, np.random.SeedSequence, None]) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


# --- single draws ------------------------------------------------------------------------


def sample_mallows(n: int, theta: float, rng: np.random.Generator) -> Permutation:
    if theta <= 0:
        raise ValueError("theta must be positive")
    word: list[int] = []
    for m in range(1, n + 1):
        weights = [theta ** (m - i) for i in range(1, m + 1)]
        u = rng.random() * sum(weights)
        i = 1
        acc = weights[0]
        while acc < u and i < m:
            acc += weights[i]
            i += 1
        word = [x + 1 if x >= i else x for x in word] + [i]
    return Permutation(word)


def _cycles_to_word(succ: list[int]) -> list[int]:
    """Canonical cycle form: each cycle from its maximum, cycles by increasing maximum."""
    n = len(succ)
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = succ[x]
        top = cyc.index(max(cyc))
        cycles.append(cyc[top:] + cyc[:top])
    cycles.sort(key=lambda c: c[0])
    return [x + 1 for c in cycles for x in c]


def sample_ewens(n: int, theta: float, rng: np.random.Generator) -> Permutation:
    if theta <= 0:
        raise ValueError("theta must be positive")
    succ = [0] * n
    for m in range(n):
        if m == 0 or rng.random() * (theta + m) < theta:
            succ[m] = m
        else:
            j = int(rng.integers(m))
            succ[m] = succ[j]
            succ[j] = m
    return Permutation(_cycles_to_word(succ))


# --- batched draws (rows are 1-based words) -------------------------------------------------


def sample_mallows_batch(n: int, theta: float, size: int, rng: np.random.Generator) -> np.ndarray:
    if theta <= 0:
        raise ValueError("theta must be positive")
    words = np.zeros((size, 0), dtype=np.int64)
    log_t = math.log(theta)
    for m in range(1, n + 1):
        logw = (m - np.arange(1, m + 1)) * log_t
        w = np.exp(logw - logw.max())
        cdf = np.cumsum(w)
        i = np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right") + 1
        i = np.minimum(i, m)[:, None]
        words = np.concatenate([words + (words >= i), i], axis=1)
    return words


def sample_ewens_batch(n: int, theta: float, size: int, rng: np.random.Generator) -> np.ndarray:
    if theta <= 0:
        raise ValueError("theta must be positive")
    rows = np.arange(size)
    succ = np.zeros((size, n), dtype=np.int64)
    for m in range(1, n):
        new = rng.random(size) * (theta + m) < theta
        j = rng.integers(0, m, size=size)
        succ[:, m] = np.where(new, m, succ[rows, j])
        join = ~new
        succ[rows[join], j[join]] = m
    # cycle maximum, cycle length and distance from the maximum for every element
    start = np.broadcast_to(np.arange(n), (size, n))
    cur = start.copy()
    top = start.copy()
    length = np.zeros((size, n), dtype=np.int64)
    for t in range(1, n + 1):
        cur = np.take_along_axis(succ, cur, axis=1)
        top = np.maximum(top, cur)
        length = np.where((length == 0) & (cur == start), t, length)
    cur = start.copy()
    to_top = np.full((size, n), -1, dtype=np.int64)
    for t in range(n):
        to_top = np.where((to_top < 0) & (cur == top), t, to_top)
        cur = np.take_along_axis(succ, cur, axis=1)
    offset = (length - to_top) % length
    order = np.argsort(top * n + offset, axis=1, kind="stable")
    return order + 1


def sample_uniform_batch(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    return np.argsort(rng.random((size, n)), axis=1) + 1


def sample_batch(model: str, n: int, theta: float, size: int, rng: np.random.Generator) -> np.ndarray:
    model = model.lower()
    if model == "mallows":
        return sample_mallows_batch(n, theta, size, rng)
    if model == "ewens":
        return sample_ewens_batch(n, theta, size, rng)
    if model == "uniform":
        return sample_uniform_batch(n, size, rng)
    raise ValueError(f"unknown model {model!r}")


# --- playing strategies -----------------------------------------------------------------


def positional_wins(words: np.ndarray, k: int) -> np.ndarray:
    """Boolean mask of rows won by "reject k, accept the next left-to-right maximum"."""
    size, n = words.shape
    if not 0 <= k < n:
        raise ValueError("k must lie in 0..N-1")
    pos = np.argmax(words == n, axis=1)
    if k == 0:
        return pos == 0
    prefmax = np.maximum.accumulate(words, axis=1)
    rows = np.arange(size)
    ok = pos >= k
    before = prefmax[rows, np.maximum(pos - 1, 0)]
    return ok & (before == prefmax[:, k - 1])


def _strike_wins(words: np.ndarray, strike: frozenset) -> np.ndarray:
    n = words.shape[1]
    keys = {tuple(p) for p in strike}
    out = np.zeros(len(words), dtype=bool)
    for r, w in enumerate(words.tolist()):
        for i in range(1, n + 1):
            if flatten(w[:i]) in keys:
                out[r] = w[i - 1] == n
                break
    return out


@dataclass(frozen=True)
class SimConfig:
    model: str  # "ewens", "mallows" or "uniform"
    n: int
    theta: float
    strategy: Union[int, frozenset]
    trials: int
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.theta <= 0:
            raise ValueError("theta must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class SimResult:
    wins: int
    trials: int
    estimate: float
    std_error: float
    generator: str = GENERATOR
    seed: int = 0
    workers: int = 1

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def run_simulation(cfg: SimConfig, dump: Optional[TextIO] = None) -> SimResult:
    """Play the configured strategy on ``cfg.trials`` sampled permutations.

    Trials are split evenly over ``cfg.workers`` spawned streams; the result is
    deterministic for a fixed (seed, workers) pair.  ``dump`` receives every
    sampled permutation, one per line.
    """
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.workers)
    base, extra = divmod(cfg.trials, cfg.workers)
    wins = 0
    for w, ss in enumerate(streams):
        rng = make_rng(ss)
        todo = base + (1 if w < extra else 0)
        while todo:
            size = min(todo, _CHUNK)
            words = sample_batch(cfg.model, cfg.n, cfg.theta, size, rng)
            if isinstance(cfg.strategy, (int, np.integer)):
                won = positional_wins(words, int(cfg.strategy))
            else:
                won = _strike_wins(words, cfg.strategy)
            wins += int(won.sum())
            if dump is not None:
                for row in words.tolist():
                    dump.write(" ".join(map(str, row)) + "\n")
            todo -= size
    est = wins / cfg.trials
    return SimResult(wins, cfg.trials, est, math.sqrt(est * (1 - est) / cfg.trials), GENERATOR, cfg.seed, cfg.workers)


# --- distribution checks -----------------------------------------------------------------


def empirical_distribution(words: np.ndarray) -> dict[tuple[int, ...], float]:
    """Relative frequency of each distinct row."""
    size, n = words.shape
    # rows -> integers in base n+1 so counting is a single np.unique over a flat array
    codes = (words.astype(np.int64) * (n + 1) ** np.arange(n)).sum(axis=1)
    uniq, counts = np.unique(codes, return_counts=True)
    out = {}
    for code, c in zip(uniq.tolist(), counts.tolist()):
        row = []
        for _ in range(n):
            code, d = divmod(code, n + 1)
            row.append(d)
        out[tuple(row)] = c / size
    return out


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(x, 0.0) - q.get(x, 0.0)) for x in keys)
