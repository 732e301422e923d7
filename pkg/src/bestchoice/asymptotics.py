"""Large-N limits of the Ewens and Mallows games (double precision).

This is the only inexact module.  Every claim made here is cross-checked in
the tests against exact finite-N profiles from :mod:`bestchoice.positional`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional, TextIO

import numpy as np
from scipy.optimize import brentq, minimize_scalar

__all__ = [
    "AsymptoticReport",
    "ewens_limit",
    "mallows_sub_limit",
    "mallows_super_series",
    "mallows_super_tail_bound",
    "mallows_super_k0_limit",
    "mallows_super_optimal_k",
    "mallows_super_crossover",
    "mallows_global_max",
    "emit_figure_data",
    "theta_grid",
]


@dataclass(frozen=True)
class AsymptoticReport:
    model: str
    theta: float
    optimal_parameter: float  # k/N for Ewens, j = N-k for Mallows theta<1, k for theta>1
    limit_probability: float
    series_truncation_error_bound: float = 0.0


def ewens_limit(theta: float) -> AsymptoticReport:
    """Reject a fraction e^(-1/theta) of the candidates; win with probability 1/e."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    return AsymptoticReport("ewens", theta, math.exp(-1.0 / theta), math.exp(-1.0))


def mallows_sub_limit(theta: float) -> AsymptoticReport:
    """theta < 1: keep the last j = max(-1/ln theta, 1) candidates open.

    Success probability j theta^(j-1) (1-theta).
    """
    if not 0 < theta < 1:
        raise ValueError("need 0 < theta < 1")
    j = max(-1.0 / math.log(theta), 1.0)
    p = j * theta ** (j - 1) * (1 - theta)
    return AsymptoticReport("mallows", theta, j, p)


def _prefactor(theta: float, k: int) -> float:
    # (theta-1)(theta^k-1)/theta^(k+1), written to stay finite for large k
    return (theta - 1) / theta * (1 - theta ** (-k))


def mallows_super_tail_bound(theta: float, k: int, m: int) -> float:
    """Bound on the prefactor times sum_{i>=m} 1/(theta^i - 1), for m >= k.

    Uses theta^i - 1 >= theta^i (1 - theta^-k) for i >= k.
    """
    tail = theta ** (-m) / ((1 - 1 / theta) * (1 - theta ** (-k)))
    return _prefactor(theta, k) * tail


def mallows_super_series(theta: float, k: int, tol: float = 1e-12, with_bound: bool = False):
    """Limit of W(N,k)/[N]! for theta > 1 and fixed k >= 1.

    (theta-1)(theta^k-1)/theta^(k+1) * sum_{i>=k} 1/(theta^i - 1), summed until
    the tail bound drops below ``tol``.
    """
    if theta <= 1:
        raise ValueError("the series needs theta > 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    pre = _prefactor(theta, k)
    total = 0.0
    i = k
    while True:
        total += 1.0 / math.expm1(i * math.log(theta))
        i += 1
        bound = mallows_super_tail_bound(theta, k, i)
        if bound < tol:
            break
    value = pre * total
    return (value, bound) if with_bound else value


def mallows_super_k0_limit(theta: float) -> float:
    """Limit of W(N,0)/[N]! = theta^(N-1)/[N] for theta > 1, namely 1 - 1/theta."""
    if theta <= 1:
        raise ValueError("need theta > 1")
    return 1 - 1 / theta


def mallows_super_optimal_k(theta: float, tol: float = 1e-12) -> tuple[int, float, float]:
    """Best fixed k >= 1 for theta > 1, with the stopping bound used.

    Every k has limit probability at most theta^-k, so the search stops at the
    first k with theta^-k below the best value found.  Returns (k, p, bound).
    """
    if theta <= 1:
        raise ValueError("need theta > 1")
    best_k, best_p = 1, mallows_super_series(theta, 1, tol)
    k = 2
    while theta ** (-k) >= best_p:
        p = mallows_super_series(theta, k, tol)
        if p > best_p:
            best_k, best_p = k, p
        k += 1
    return best_k, best_p, theta ** (-k)


def mallows_super_crossover(k: int = 1, lo: float = 1.05, hi: float = 3.0, xtol: float = 1e-10) -> float:
    """theta where the k and k+1 limit curves cross (k+1 better below, k above)."""
    f = lambda t: mallows_super_series(t, k) - mallows_super_series(t, k + 1)
    return brentq(f, lo, hi, xtol=xtol)


def mallows_global_max(tol: float = 1e-8, theta_max: float = 4.0) -> tuple[float, int, float]:
    """Maximise the best k >= 1 limit probability over theta in (1, theta_max].

    A coarse grid picks the bracket, bounded Brent refines it.  Returns
    (theta*, k*, p*).
    """
    grid = np.linspace(1.01, theta_max, 300)
    vals = [mallows_super_optimal_k(float(t))[1] for t in grid]
    i = int(np.argmax(vals))
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, len(grid) - 1)])
    res = minimize_scalar(
        lambda t: -mallows_super_optimal_k(t)[1],
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": tol},
    )
    theta_star = float(res.x)
    k_star, p_star, _ = mallows_super_optimal_k(theta_star)
    return theta_star, k_star, p_star


# --- figure data -----------------------------------------------------------------------


def theta_grid(theta_min: float, theta_max: float, steps: int) -> np.ndarray:
    if steps < 2 or not theta_min < theta_max:
        raise ValueError("need steps >= 2 and theta_min < theta_max")
    return np.linspace(theta_min, theta_max, steps)


def emit_figure_data(
    figure: str,
    grid: Iterable[float],
    out: Optional[TextIO] = None,
    k: int = 1,
) -> str:
    """CSV rows for plotting.

    f4: theta, e^(-1/theta)  (fraction rejected, Ewens)
    m1: theta, j theta^(j-1)(1-theta)  (Mallows theta < 1)
    m2: theta, series value, k, truncation bound  (Mallows theta > 1)
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if figure == "f4":
        w.writerow(["theta", "value"])
        for t in grid:
            w.writerow([f"{t:.6g}", f"{ewens_limit(float(t)).optimal_parameter:.6f}"])
    elif figure == "m1":
        w.writerow(["theta", "value"])
        for t in grid:
            w.writerow([f"{t:.6g}", f"{mallows_sub_limit(float(t)).limit_probability:.6f}"])
    elif figure == "m2":
        w.writerow(["theta", "value", "k", "bound"])
        for t in grid:
            v, b = mallows_super_series(float(t), k, with_bound=True)
            w.writerow([f"{t:.6g}", f"{v:.6f}", k, f"{b:.3e}"])
    else:
        raise ValueError(f"unknown figure {figure!r}; expected f4, m1 or m2")
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text
