import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from avoider_enforcer.bias import (
    auto_bias,
    case_guarantee,
    check_case_arithmetic,
    choose_k,
    claim_bound,
    compute_t,
    girth_budget,
    guarantee_dominates,
    isolation_case,
    isolation_target,
    min_rounds,
    n_choose_2,
    select_strict_bias,
)
from avoider_enforcer.errors import BiasInfeasible, InvalidConfig


def _t_by_scan(n):
    t = 1
    while n * ((t + 1) / (10 * math.log(n))) ** t >= 3:
        t += 1
    return t


@pytest.mark.parametrize("n,t", [(1000, 2), (10**4, 3), (2 * 10**4, 3), (10**6, 4)])
def test_compute_t(n, t):
    assert compute_t(n) == t == _t_by_scan(n)
    assert t < math.log(n) / 3 or n < 10**6


def test_compute_t_small_n():
    assert compute_t(3) >= 1
    with pytest.raises(InvalidConfig):
        compute_t(2)


def test_claim_bound_values():
    assert claim_bound(10**4, 1) == 10**4
    assert claim_bound(10**4, 2) == pytest.approx(217.147, abs=1e-3)
    assert claim_bound(10**6, 4) == pytest.approx(24.2705, abs=1e-3)


def test_claim_bound_monotone_in_n():
    for k in (2, 3):
        values = [claim_bound(n, k) for n in range(10**4, 10**6, 10**4) if k <= math.log(n) / 3]
        assert all(a <= b for a, b in zip(values, values[1:]))


def test_min_rounds():
    assert min_rounds(4, 5) == 1
    assert min_rounds(10**4, 18_466_733) == 2
    assert min_rounds(2 * 10**4, auto_bias(2 * 10**4)) == 5
    assert auto_bias(2 * 10**4) == 39_613_951


@given(st.integers(2, 10**6), st.integers(1, 10**9))
def test_min_rounds_brackets(n, b):
    r = min_rounds(n, b)
    assert r * (b + 1) <= n_choose_2(n) < (r + 1) * (b + 1)


def test_n_choose_2_exact_at_large_n():
    assert n_choose_2(10**6) == 499_999_500_000
    assert n_choose_2(3 * 10**9) == 3 * 10**9 * (3 * 10**9 - 1) // 2


def test_select_strict_bias_n_10_4():
    sel = select_strict_bias(10**4)
    # ceil(200.5 n ln n) evaluated exactly is 18,466,733
    assert sel.b1 == 18_466_733
    assert sel.r1 == n_choose_2(10**4) % (sel.b1 + 1) == 13_061_532
    assert sel.b == sel.b1 and sel.certified and not sel.used_fallback


@pytest.mark.parametrize("n", [10, 1000, 10**4, 2 * 10**4, 7134, 54321])
def test_select_strict_bias_postconditions(n):
    sel = select_strict_bias(n)
    L = math.log(n)
    assert math.ceil(200 * n * L) <= sel.b <= math.floor(201 * n * L)
    r = n_choose_2(n) % (sel.b + 1)
    assert r == sel.remainder and r >= math.ceil(n * L)


@pytest.mark.parametrize("n", [3, 3243, 3250, 3261, 7115, 7133])
def test_select_strict_bias_infeasible(n):
    with pytest.raises(BiasInfeasible) as info:
        select_strict_bias(n)
    L = math.log(n)
    b1 = math.ceil(200.5 * n * L)
    candidates = (b1, b1 - math.ceil(402 * L * L))
    assert info.value.remainders == tuple(n_choose_2(n) % (b + 1) for b in candidates)
    for b, r in zip(candidates, info.value.remainders):
        in_window = math.ceil(200 * n * L) <= b <= math.floor(201 * n * L)
        assert r < n * L or not in_window


def test_select_strict_bias_rejects_tiny_n():
    with pytest.raises(InvalidConfig):
        select_strict_bias(2)


def test_isolation_cases_exact_boundaries():
    n = 900
    assert isolation_case(n, 441) == 1  # 0.49 n
    assert isolation_case(n, 440) is None
    assert isolation_case(n, 500) == 1  # 5n/9 belongs to the lower case
    assert isolation_case(n, 501) == 2
    assert isolation_case(n, 531) == 3
    assert isolation_case(n, 532) is None  # above 0.59 n = 531
    assert isolation_case(5000, 2500) == 1
    assert isolation_case(5000, 2850) == 2
    assert isolation_case(5000, 2925) == 3


def test_check_case_arithmetic():
    assert 3 + (2500 - 6) // 4 + 2500 // 3 + 2500 // 2 + 2500 == 5209
    assert check_case_arithmetic(5000, 2500)
    assert check_case_arithmetic(100, 49)
    assert 3 + (49 - 6) // 4 + 49 // 3 + 49 // 2 + 49 == 102
    assert check_case_arithmetic(5000, 2850)
    assert check_case_arithmetic(5000, 2925)
    assert not check_case_arithmetic(100, 30)
    assert isolation_case(100, 30) is None


def test_case_guarantees():
    assert case_guarantee(5000, 2500) == 555
    assert case_guarantee(5000, 2850) == 714
    assert case_guarantee(5000, 2925) == 755
    assert n_target(5000, 2500) == 5 and n_target(5000, 2850) == 618 and n_target(5000, 2925) == 730
    for b in (2500, 2850, 2925):
        assert guarantee_dominates(5000, b)


def n_target(n, b):
    return n - math.ceil(Fraction(999, 1000) * Fraction(n * n, 2 * b))


def test_isolation_target_is_exact():
    assert isolation_target(1000, 500) == 1000 - Fraction(999, 1000) * 1000


def test_choose_k():
    assert choose_k(Fraction(1, 1000)) == 4001
    assert choose_k(1) == 5
    assert choose_k(2) == 3
    assert Fraction(4, 2) * (1 - Fraction(1, 2)) == 1  # k=4 at c=1 is exactly 1, excluded
    for bad in (0, -1):
        with pytest.raises(InvalidConfig):
            choose_k(bad)


@given(st.fractions(min_value=Fraction(1, 10**4), max_value=2))
def test_choose_k_matches_scan(c):
    k = 3
    while not Fraction(k, k - 2) * (1 - c / 2) < 1:
        k += 1
    assert choose_k(c) == k


def test_girth_budget():
    assert girth_budget(2000, 4) == 635
    assert girth_budget(2000, 3) == 135
    assert girth_budget(2000, 4, C=2.0) == math.ceil(2 * 4 * 2000 ** (2 / 3))
