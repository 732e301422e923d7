from fractions import Fraction

import pytest

from bestchoice.exactnum import ThetaPolynomial, oplus
from bestchoice.permutation import INVERSIONS, LRMAX, PATTERN321, all_permutations
from bestchoice.positional import ewens_critical_roots, ewens_kappa
from bestchoice.tree_solver import (
    BudgetExceeded,
    GameSpec,
    check_sigma_symmetry,
    children,
    closed_probability,
    is_valid_strike_set,
    open_probability,
    positional_strike_set,
    positional_win,
    solve,
    solve_increasing_chain,
    strike_probability,
    verify_positionality,
)

from conftest import brute_321, brute_inv, brute_lrmax, brute_optimal, brute_positional

THETAS = [Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(6, 5), Fraction(2), Fraction(3)]


def test_uniform_four():
    res = solve(GameSpec(4, LRMAX))
    assert res.optimal == Fraction(11, 24)
    assert {(1, 2), (2, 1, 3), (3, 1, 2, 4), (3, 2, 1, 4)} <= set(res.strike_set)
    rest = [p for p in res.strike_set if len(p) == 4 and p[-1] != 4]
    assert len(rest) == 6 and len(res.strike_set) == 10
    assert res.positional_k == 1
    d = res.to_json_dict()
    assert d["optimal"] == "11/24" and d["theta"] == "1/1" and d["strike_set"][:2] == ["1 2", "2 1 3"]


def test_trivial_and_five():
    one = solve(GameSpec(1, LRMAX))
    assert one.optimal == 1 and one.strike_set == {(1,)}
    five = solve(GameSpec(5, LRMAX))
    assert five.optimal == Fraction(52, 120) and five.positional_k == 2


def test_open_closed_examples():
    spec = GameSpec(4, LRMAX)
    assert open_probability((1, 2, 3), spec).to_reduced_rational() == Fraction(1, 4)
    assert open_probability((1, 2), spec).to_reduced_rational() == Fraction(5, 12)
    assert strike_probability((1, 2), spec).to_reduced_rational() == Fraction(6, 12)
    assert open_probability((2, 1, 4, 3), spec).to_reduced_rational() == 0
    assert closed_probability((1, 2), spec).to_reduced_rational() == Fraction(1, 2)


def test_symbolic_strike_probability():
    spec = GameSpec(4, LRMAX, theta=None)
    s = strike_probability((1,), spec)
    assert s.num == ThetaPolynomial([0, 6])
    assert s.den == ThetaPolynomial([0, 6, 11, 6, 1])


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        solve(GameSpec(10, LRMAX))
    with pytest.raises(ValueError):
        GameSpec(0, LRMAX)


@pytest.mark.parametrize("stat,brute", [(LRMAX, brute_lrmax), (INVERSIONS, brute_inv)])
@pytest.mark.parametrize("theta", [Fraction(1, 2), Fraction(1), Fraction(2)])
def test_solve_matches_brute_force(stat, brute, theta):
    for n in range(1, 6):
        assert solve(GameSpec(n, stat, theta)).optimal == brute_optimal(n, brute, theta)


def test_321_solve_matches_brute_force():
    for theta in (Fraction(1, 2), Fraction(3)):
        assert solve(GameSpec(5, PATTERN321, theta)).optimal == brute_optimal(5, brute_321, theta)


@pytest.mark.parametrize("theta", [Fraction(1, 2), Fraction(1), Fraction(3)])
def test_sibling_decomposition(theta):
    n = 5
    spec = GameSpec(n, INVERSIONS, theta)
    stack = [(1,)]
    while stack:
        p = stack.pop()
        if len(p) == n:
            continue
        kids = list(children(p))
        pair = oplus(*(closed_probability(c, spec) for c in kids))
        assert pair.to_reduced_rational() == open_probability(p, spec).to_reduced_rational()
        stack.extend(kids)


@pytest.mark.parametrize("stat", [LRMAX, INVERSIONS])
def test_negativity_propagates_down_increasing_chain(stat):
    grid = [Fraction(i, 4) for i in range(1, 17)]
    for n in range(2, 8):
        for theta in grid:
            pos = solve_increasing_chain(GameSpec(n, stat, theta)).positive_sizes
            for k in range(2, n + 1):
                if not pos[k - 1]:
                    assert not pos[k - 2]


def test_negativity_chain_matches_tree():
    for theta in THETAS:
        spec = GameSpec(6, INVERSIONS, theta)
        res = solve(spec)
        chain = solve_increasing_chain(spec)
        for m in range(1, 7):
            assert res.positivity[tuple(range(1, m + 1))] == chain.positive_sizes[m - 1]


@pytest.mark.parametrize("stat", [LRMAX, INVERSIONS])
@pytest.mark.parametrize("theta", THETAS)
def test_chain_equals_tree(stat, theta):
    for n in range(1, 7):
        spec = GameSpec(n, stat, theta)
        tree, chain = solve(spec), solve_increasing_chain(spec)
        assert tree.optimal == chain.optimal
        assert tree.positional_k == chain.positional_k


def test_chain_refuses_non_equivariant():
    with pytest.raises(ValueError):
        solve_increasing_chain(GameSpec(5, PATTERN321))


def test_strike_set_validity():
    for stat in (LRMAX, INVERSIONS, PATTERN321):
        for theta in (Fraction(1, 2), Fraction(2)):
            res = solve(GameSpec(5, stat, theta))
            assert is_valid_strike_set(res.strike_set, 5)
    for k in range(5):
        assert is_valid_strike_set(positional_strike_set(5, k), 5)
    assert not is_valid_strike_set([(1, 2)], 4)  # misses 2 1 ...
    assert not is_valid_strike_set([(1,), (1, 2)], 4)  # not an antichain
    assert not is_valid_strike_set([(2, 1), (1, 2)], 4)  # 2 1 not eligible


def test_positional_win_examples():
    assert positional_win(GameSpec(4, LRMAX), 1).to_reduced_rational() == Fraction(11, 24)
    spec = GameSpec(5, INVERSIONS, Fraction(1, 2))
    assert positional_win(spec, 2).to_reduced_rational() == brute_positional(5, brute_inv, Fraction(1, 2), 2)
    # k = 0 wins exactly when the first candidate is the best
    spec = GameSpec(4, LRMAX, Fraction(2))
    num = sum(2 ** brute_lrmax(w) for w in all_permutations(4) if w[0] == 4)
    den = sum(2 ** brute_lrmax(w) for w in all_permutations(4))
    assert positional_win(spec, 0).to_reduced_rational() == Fraction(num, den)


@pytest.mark.parametrize("stat", [LRMAX, INVERSIONS])
def test_positionality_small(stat):
    for n in range(1, 7):
        for theta in (Fraction(1, 2), Fraction(1), Fraction(6, 5), Fraction(3)):
            rep = verify_positionality(GameSpec(n, stat, theta))
            assert rep.positional, str(rep)


def test_321_report_runs():
    # no claim either way; the report must be internally consistent
    for theta in (Fraction(1, 2), Fraction(2)):
        rep = verify_positionality(GameSpec(5, PATTERN321, theta))
        assert rep.optimal >= rep.best_positional


@pytest.mark.parametrize("stat,theta", [(LRMAX, Fraction(1)), (LRMAX, Fraction(3)), (INVERSIONS, Fraction(2))])
def test_sigma_symmetry(stat, theta):
    rep = check_sigma_symmetry(GameSpec(5, stat, theta))
    assert rep.ok and rep.checked > 0


def test_sigma_symmetry_detects_321():
    rep = check_sigma_symmetry(GameSpec(5, PATTERN321, Fraction(2)))
    assert not rep.ok


def test_ties_sit_exactly_at_ewens_roots():
    for n in range(3, 7):
        for k, r in enumerate(ewens_critical_roots(n)):
            res = solve(GameSpec(n, LRMAX, r))
            assert res.ties and {len(p) for p in res.ties} == {k + 1}
            assert all(p[-1] == k + 1 for p in res.ties)
            assert res.positional_k == k == ewens_kappa(n, r)
            off = solve(GameSpec(n, LRMAX, r + Fraction(1, 1000)))
            assert off.ties == ()
