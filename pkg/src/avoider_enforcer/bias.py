"""Closed-form bias and bound arithmetic.

Everything that decides divisibility or compares against a threshold uses
exact integers or :class:`fractions.Fraction`; ``ln n`` is the only float and
is always re-checked exactly where a certificate depends on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BiasInfeasible, InvalidConfig

__all__ = [
    "BiasSelection",
    "select_strict_bias",
    "claim_bound",
    "min_rounds",
    "compute_t",
    "auto_bias",
    "isolation_case",
    "check_case_arithmetic",
    "isolation_target",
    "case_guarantee",
    "guarantee_dominates",
    "choose_k",
    "girth_budget",
    "CASE_INTERVALS",
]


def n_choose_2(n: int) -> int:
    return n * (n - 1) // 2


def _exceeds_n_ln_n(value: int, n: int) -> bool:
    """Exact test of ``value >= n ln n`` for integers (ln n is irrational for n >= 2)."""
    # value >= n ln n  <=>  exp(value / n) >= n; decide with a wide float margin
    # first and fall back to high-precision arithmetic near the boundary.
    x = value - n * math.log(n)
    if abs(x) > 1e-6 * max(1.0, value):
        return x > 0
    from decimal import Decimal, getcontext

    getcontext().prec = 60
    return Decimal(value) >= Decimal(n) * Decimal(n).ln()


@dataclass(frozen=True)
class BiasSelection:
    n: int
    b1: int
    q1: int
    r1: int
    fallback_delta: int
    b: int
    used_fallback: bool
    remainder: int
    certified: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _certify(n: int, b: int) -> tuple[int, bool]:
    N = n_choose_2(n)
    rem = N % (b + 1)
    L = math.log(n)
    in_window = math.ceil(200 * n * L) <= b <= math.floor(201 * n * L)
    return rem, in_window and _exceeds_n_ln_n(rem, n)


def select_strict_bias(n: int) -> BiasSelection:
    """Pick a bias in [200 n ln n, 201 n ln n] leaving a large remainder.

    Start from ``b1 = ceil(200.5 n ln n)``; if ``C(n,2) mod (b1+1)`` exceeds
    ``n ln n`` keep it, otherwise step down by ``ceil(402 ln^2 n)``.  The
    outcome is re-verified exactly; an uncertified result raises
    :class:`BiasInfeasible` carrying both candidate remainders.
    """
    if n < 3:
        raise InvalidConfig("bias selection needs n >= 3")
    L = math.log(n)
    N = n_choose_2(n)
    b1 = math.ceil(200.5 * n * L)
    q1, r1 = divmod(N, b1 + 1)
    delta = math.ceil(402 * L * L)
    use_fallback = not (r1 > n * L and _exceeds_n_ln_n(r1, n))
    b = b1 - delta if use_fallback else b1
    rem, ok = _certify(n, b) if b >= 1 else (0, False)
    if not ok:
        candidates = (b1, b1 - delta)
        rems = tuple(N % (x + 1) if x >= 1 else None for x in candidates)
        raise BiasInfeasible(
            f"no certified bias for n={n}: remainders {rems} for b in {candidates}",
            remainders=rems,
        )
    return BiasSelection(n, b1, q1, r1, delta, b, use_fallback, rem, ok)


def claim_bound(n: int, k: int, scale: float = 10.0) -> float:
    """Upper bound ``n (k / (scale ln n))^(k-1)`` on size-k components created."""
    if k < 1:
        raise ValueError("k must be positive")
    return n * (k / (scale * math.log(n))) ** (k - 1)


def min_rounds(n: int, b: int) -> int:
    """floor(C(n,2) / (b+1)): rounds in which Avoider surely moves."""
    if b < 1:
        raise InvalidConfig("bias must be positive")
    return n_choose_2(n) // (b + 1)


def compute_t(n: int) -> int:
    """Smallest t >= 1 with n ((t+1) / (10 ln n))^t < 3."""
    if n < 3:
        raise InvalidConfig("stage cap needs n >= 3")
    L = math.log(n)
    t = 1
    while not n * ((t + 1) / (10 * L)) ** t < 3:
        t += 1
    return t


def auto_bias(n: int, c: float = 200) -> int:
    """ceil(c n ln n)."""
    return math.ceil(c * n * math.log(n))


# -- isolation game arithmetic ------------------------------------------------

# (lower, upper) as fractions of n; an endpoint shared by two cases goes to the lower case.
CASE_INTERVALS = {
    1: (Fraction(49, 100), Fraction(5, 9)),
    2: (Fraction(5, 9), Fraction(11, 19)),
    3: (Fraction(11, 19), Fraction(59, 100)),
}


def isolation_case(n: int, b: int) -> int | None:
    """Case 1, 2 or 3 of the isolation strategy, or None outside [0.49n, 0.59n]."""
    for case, (lo, hi) in CASE_INTERVALS.items():
        if lo * n <= b <= hi * n:
            return case
    return None


def check_case_arithmetic(n: int, b: int, case: int | None = None) -> bool:
    """Whether the final isolating round fits into one move of size b."""
    case = isolation_case(n, b) if case is None else case
    if case == 1:
        return 3 + (b - 6) // 4 + b // 3 + b // 2 + b > n
    if case == 2:
        return 2 + (b - 3) // 3 + b // 2 + b > n
    if case == 3:
        return 2 * (1 + (b - 1) // 2 + b) >= 3 * b
    return False


def isolation_target(n: int, b: int, c: Fraction = Fraction(1, 1000)) -> Fraction:
    """n - (1-c) n^2 / (2b), the promised number of isolated vertices."""
    return n - (1 - c) * Fraction(n * n, 2 * b)


def case_guarantee(n: int, b: int, case: int | None = None) -> Fraction:
    """What the case analysis promises for this (n, b)."""
    case = isolation_case(n, b) if case is None else case
    if case == 1:
        return Fraction(n // 9)
    if case == 2:
        return Fraction(n // 7)
    if case == 3:
        return (n - Fraction(3, 2) * b) + (Fraction(21, 2) * b - 6 * n) / 5
    raise ValueError(f"b={b} outside the isolation range for n={n}")


def guarantee_dominates(n: int, b: int, c: Fraction = Fraction(1, 1000)) -> bool:
    return case_guarantee(n, b) >= isolation_target(n, b, c)


def choose_k(c) -> int:
    """Smallest integer k >= 3 with k/(k-2) * (1 - c/2) < 1, in exact arithmetic."""
    c = Fraction(c)
    if c <= 0:
        raise InvalidConfig("c must be positive")
    if c > 2:
        raise InvalidConfig("c must be at most 2")
    # k (1 - c/2) < k - 2  <=>  k c/2 > 2  <=>  k > 4/c
    k = max(3, math.floor(4 / c) + 1)
    assert Fraction(k, k - 2) * (1 - c / 2) < 1
    assert k == 3 or not Fraction(k - 1, k - 3) * (1 - c / 2) < 1
    return k


def girth_budget(n: int, k: int, C: float = 1.0) -> int:
    """ceil(C k n^((k-2)/(k-1))), the per-round budget for short-cycle blocking."""
    return math.ceil(C * k * n ** ((k - 2) / (k - 1)))
