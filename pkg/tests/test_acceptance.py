"""Acceptance criteria 1-10, each timed against its budget.

Every test prints one ``PASS criterion N`` or ``FAIL criterion N`` line to the
terminal (outside pytest's capture) before asserting.
"""

import csv
import io
import itertools
import math
import time
from fractions import Fraction
from importlib import resources

import pytest

from bestchoice.asymptotics import mallows_global_max, mallows_sub_limit, mallows_super_series
from bestchoice.exactnum import ThetaPolynomial
from bestchoice.permutation import (
    INVERSIONS,
    LRMAX,
    PATTERN321,
    EquivarianceViolation,
    check_prefix_equivariance,
    equivariance_defect,
    flatten,
    sigma_apply,
)
from bestchoice.positional import (
    Model,
    enumerate_w_table,
    ewens_critical_roots,
    ewens_profile,
    ewens_w_closed,
    ewens_w_recurrence,
    mallows_profile,
    roots_csv_rows,
)
from bestchoice.sampler import SimConfig, empirical_distribution, make_rng, run_simulation, sample_batch, total_variation
from bestchoice.tree_solver import GameSpec, solve, verify_positionality

from conftest import brute_inv, brute_lrmax, perms

THETAS4 = [Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(6, 5), Fraction(2), Fraction(3)]


@pytest.fixture
def report(capsys):
    def emit(number, checks, elapsed, limit):
        failed = [name for name, ok in checks if not ok]
        if elapsed >= limit:
            failed.append(f"runtime {elapsed:.2f}s >= {limit}s")
        status = "FAIL" if failed else "PASS"
        detail = "; ".join(failed) if failed else f"{len(checks)} checks"
        with capsys.disabled():
            print(f"\n{status} criterion {number}: {detail} ({elapsed:.2f}s, limit {limit}s)")
        assert not failed, detail

    return emit


def load_csv(name):
    text = resources.files("bestchoice.data").joinpath(name).read_text()
    return [row for row in csv.reader(io.StringIO(text)) if row]


def test_criterion_1_uniform_four(report):
    t0 = time.perf_counter()
    res = solve(GameSpec(4, LRMAX, Fraction(1)))
    core = {(1, 2), (2, 1, 3), (3, 1, 2, 4), (3, 2, 1, 4)}
    rest = set(res.strike_set) - core
    zero = all(len(p) == 4 and p[-1] != 4 for p in rest)
    elapsed = time.perf_counter() - t0
    checks = [
        ("optimum is 11/24", res.optimal == Fraction(11, 24)),
        ("strike set contains 12, 213, 3124, 3214", core <= set(res.strike_set)),
        ("other strikes are losing size-4 completions", zero and len(rest) == 6),
    ]
    report(1, checks, elapsed, 1)


def test_criterion_2_ewens_w_table(report):
    t0 = time.perf_counter()
    fixture = {}
    for row in load_csv("ewens_w_table.csv"):
        n, k, *coeffs = map(int, row)
        fixture[n, k] = ThetaPolynomial(coeffs)
    checks = []
    for n in range(1, 7):
        rec = ewens_w_recurrence(n)
        enum = enumerate_w_table(Model.EWENS, n)
        for k in range(n):
            want = fixture[n, k]
            checks.append((f"W({n},{k}) enumeration", enum[k] == want))
            checks.append((f"W({n},{k}) recurrence", rec[k] == want))
            checks.append((f"W({n},{k}) closed form", ewens_w_closed(n, k) == want))
    report(2, checks, time.perf_counter() - t0, 10)


def test_criterion_3_critical_roots(report):
    t0 = time.perf_counter()
    fixture = [",".join(r) for r in load_csv("critical_roots.csv")]
    rows = roots_csv_rows(11)
    checks = [("rows match table", rows == fixture)]
    for n in range(2, 12):
        roots = ewens_critical_roots(n)
        starred = [int(r.split(",")[1]) for r in rows if r.startswith(f"{n},") and r.endswith("starred")]
        k = starred[0] if len(starred) == 1 else None
        lo = roots[k - 1] if k else Fraction(0)
        checks.append((f"N={n} starred interval holds theta=1", k is not None and lo < 1 <= roots[k]))
        checks.append((f"N={n} reduced", all(math.gcd(r.numerator, r.denominator) == 1 for r in roots)))
    report(3, checks, time.perf_counter() - t0, 1)


def test_criterion_4_positionality(report):
    t0 = time.perf_counter()
    checks = []
    for stat in (LRMAX, INVERSIONS):
        for n in range(4, 8):
            for theta in THETAS4:
                rep = verify_positionality(GameSpec(n, stat, theta))
                checks.append((str(rep), rep.optimal == rep.best_positional and rep.positional))
    report(4, checks, time.perf_counter() - t0, 300)


def _pattern_equivalent(v: EquivarianceViolation, big_pi, big_q):
    """Is the witness an order-isomorphic restriction of the (q, pi) pair?"""
    k = len(v.q)
    big_k = len(big_q)
    big_img = sigma_apply(big_q, big_pi)
    for head in itertools.combinations(range(big_k), k):
        for tail in itertools.combinations(range(big_k, len(big_pi)), len(v.pi) - k):
            idx = head + tail
            if flatten([big_pi[i] for i in idx]) == tuple(v.pi) and flatten([big_img[i] for i in idx]) == tuple(v.image):
                return True
    return False


def test_criterion_5_equivariance_counterexample(report):
    t0 = time.perf_counter()
    v = check_prefix_equivariance(PATTERN321, 8)
    big_pi, big_q = (2, 4, 6, 8, 1, 3, 5, 7), (2, 1, 3, 4)
    found = isinstance(v, EquivarianceViolation)
    checks = [
        ("violation found", found),
        ("c(2468|1357)=0 and c(4268|1357)=1", PATTERN321(big_pi) == 0 and PATTERN321((4, 2, 6, 8, 1, 3, 5, 7)) == 1),
        ("same defect as the eight-letter pair", found and v.lhs - v.rhs == equivariance_defect(PATTERN321, big_q, big_pi)),
        ("witness is a sub-pattern of the eight-letter pair", found and _pattern_equivalent(v, big_pi, big_q)),
    ]
    report(5, checks, time.perf_counter() - t0, 60)


def test_criterion_6_ewens_asymptotics(report):
    t0 = time.perf_counter()
    n = 2000
    checks = []
    for theta in (Fraction(1, 2), Fraction(1), Fraction(2)):
        prof = ewens_profile(n, theta)
        x = math.exp(-1 / float(theta))
        checks.append((f"theta={theta} probability {prof.win_float(prof.kappa):.4f}",
                       abs(prof.win_float(prof.kappa) - 1 / math.e) < 0.01))
        checks.append((f"theta={theta} k/N {prof.kappa / n:.4f} vs {x:.4f}", abs(prof.kappa / n - x) < 0.01))
    report(6, checks, time.perf_counter() - t0, 30)


def test_criterion_7_mallows_sub(report):
    t0 = time.perf_counter()
    n = 200
    checks = []
    for theta in (Fraction(3, 10), Fraction(1, 2), Fraction(4, 5)):
        prof = mallows_profile(n, theta)
        r = mallows_sub_limit(float(theta))
        j = r.optimal_parameter
        got = prof.win_float(prof.kappa)
        checks.append((f"theta={theta} probability {got:.4f} vs {r.limit_probability:.4f}",
                       abs(got - r.limit_probability) < 0.01))
        checks.append((f"theta={theta} k={prof.kappa}", prof.kappa in {n - math.ceil(j), n - math.floor(j)}))
    report(7, checks, time.perf_counter() - t0, 30)


def test_criterion_8_mallows_super(report):
    t0 = time.perf_counter()
    checks = []
    for theta, k, value in ((1.55, 1, 0.433939), (1.25, 2, 0.400125), (1.16, 3, 0.389029)):
        got = mallows_super_series(theta, k)
        checks.append((f"series({theta},{k}) {got:.6f} vs {value}", abs(got - value) < 1e-4))
    ts, ks, ps = mallows_global_max()
    checks.append((f"global max theta*={ts:.4f}", 1.5 <= ts <= 1.6))
    checks.append((f"global max k*={ks}", ks == 1))
    report(8, checks, time.perf_counter() - t0, 10)


def _exact(n, stat, theta):
    w = {p: theta ** stat(p) for p in perms(n)}
    z = sum(w.values())
    return {p: v / z for p, v in w.items()}


def test_criterion_9_samplers(report):
    t0 = time.perf_counter()
    checks = []
    for model, stat in (("ewens", brute_lrmax), ("mallows", brute_inv)):
        for n in (4, 5):
            for theta in (0.5, 1.0, 2.0):
                words = sample_batch(model, n, theta, 10**6, make_rng(2024 + n))
                tv = total_variation(empirical_distribution(words), _exact(n, stat, theta))
                checks.append((f"{model} N={n} theta={theta} TV={tv:.4f}", tv < 0.01))
    # win rates against the exact values of criteria 1 and 2
    res = run_simulation(SimConfig("uniform", 4, 1.0, 1, 10**6, seed=1))
    checks.append((f"uniform N=4 k=1 {res.estimate:.5f}", abs(res.estimate - 11 / 24) < 4 * res.std_error))
    for theta in (Fraction(1, 2), Fraction(2)):
        prof = ewens_profile(6, theta)
        res = run_simulation(SimConfig("ewens", 6, float(theta), prof.kappa, 10**6, seed=2))
        exact = prof.win_float(prof.kappa)
        checks.append((f"ewens N=6 theta={theta} {res.estimate:.5f} vs {exact:.5f}",
                       abs(res.estimate - exact) < 4 * res.std_error))
    report(9, checks, time.perf_counter() - t0, 120)


def test_criterion_10_instability(report):
    t0 = time.perf_counter()
    n = 500
    below = mallows_profile(n, Fraction(19, 20)).kappa / n
    above = mallows_profile(n, Fraction(21, 20)).kappa / n
    middle = mallows_profile(n, Fraction(1)).kappa / n
    checks = [
        (f"theta=0.95 k/N={below:.3f}", below > 0.95),
        (f"theta=1.05 k/N={above:.3f}", above < 0.05),
        (f"theta=1 k/N={middle:.3f}", abs(middle - 1 / math.e) < 0.01),
    ]
    report(10, checks, time.perf_counter() - t0, 60)
