"""Sybil-proof bounty schedule.

The reward for the i-th confirmed informer when n total reports exist is

    reward(i, n) = -xi_i + sum_{j=i+1..n} xi_j + c * 2^(1-n)

with xi_1 = 0 and xi_{i+1} = sum_{j<=i} 2^(j-i) * delta_j, where the
delta sequence is a free nonnegative parameter subject to
sum_j 2^j * delta_j <= c. The reward splits exactly into an
index-dependent part paid at confirmation (``immediate``) and a
count-dependent part paid at campaign end (``deferred``).

All arithmetic is exact (Fraction): the telescoping identities the split
relies on hold with equality, and the tests assert them with ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union

Money = Fraction
MoneyLike = Union[int, float, str, Fraction]


def as_money(value: MoneyLike) -> Fraction:
    return Fraction(value) if not isinstance(value, Fraction) else value


@dataclass(frozen=True)
class RewardSchedule:
    """Total bounty c, guarantee length, and the delta sequence.

    ``deltas[j]`` is delta_{j+1}; deltas beyond ``guarantee_len`` are zero.
    """

    total_bounty: Fraction
    guarantee_len: int
    deltas: tuple = field(default=())

    def __post_init__(self):
        c = as_money(self.total_bounty)
        object.__setattr__(self, "total_bounty", c)
        object.__setattr__(self, "deltas", tuple(as_money(d) for d in self.deltas))
        if c <= 0:
            raise ValueError("total bounty must be positive")
        if self.guarantee_len < 1:
            raise ValueError("guarantee length must be >= 1")
        if len(self.deltas) != self.guarantee_len:
            raise ValueError("need exactly guarantee_len delta values")
        if any(d < 0 for d in self.deltas):
            raise ValueError("delta values must be nonnegative")
        weighted = sum(Fraction(2) ** (j + 1) * d for j, d in enumerate(self.deltas))
        if weighted > c:
            raise ValueError("sum of 2^j * delta_j exceeds the total bounty")

    def delta(self, i: int) -> Fraction:
        """delta_i, zero beyond the guarantee length."""
        if i < 1:
            raise ValueError("delta index starts at 1")
        if i > self.guarantee_len:
            return Fraction(0)
        return self.deltas[i - 1]

    def xi(self, i: int) -> Fraction:
        """xi_i: xi_1 = 0, xi_{i+1} = sum_{j<=i} 2^(j-i) * delta_j.

        Beyond the guarantee length the recurrence halves each step, so
        the closed form xi_{L+t} = xi_{L+1} / 2^(t-1) applies (L = length).
        """
        if i < 1:
            raise ValueError("xi index starts at 1")
        if i == 1:
            return Fraction(0)
        top = min(i - 1, self.guarantee_len)
        value = sum(
            self.delta(j) * Fraction(2) ** (j - (i - 1)) for j in range(1, top + 1)
        )
        return value if value else Fraction(0)

    def xi_tail(self, n: int) -> Fraction:
        """sum_{j >= n+1} xi_j in closed form (geometric beyond L)."""
        if n < 0:
            raise ValueError("tail start must be >= 0")
        limit = max(n + 1, self.guarantee_len + 1)
        head = sum(self.xi(j) for j in range(n + 1, limit))
        # from guarantee_len+1 (or n+1 if later) onward, xi halves each step
        return head + 2 * self.xi(limit)

    def a(self, i: int) -> Fraction:
        """a_i = c * 2^(1-i) - xi_i, the single-informer reward B(i, i)."""
        return self.total_bounty * Fraction(2) ** (1 - i) - self.xi(i)


def geometric_schedule(c: MoneyLike, guarantee_len: int) -> RewardSchedule:
    """delta_i = 2^(-i) * c / L for i <= L: the tightest schedule, with
    sum 2^j * delta_j = c exactly and deferred(n) = 0 once n >= L."""
    c = as_money(c)
    if c <= 0:
        raise ValueError("total bounty must be positive")
    if guarantee_len < 1:
        raise ValueError("guarantee length must be >= 1")
    unit = c / guarantee_len
    deltas = tuple(unit * Fraction(2) ** (-i) for i in range(1, guarantee_len + 1))
    return RewardSchedule(c, guarantee_len, deltas)


def legacy_schedule(c: MoneyLike) -> RewardSchedule:
    """All deltas zero: every informer gets c * 2^(1-n), nothing guaranteed."""
    return RewardSchedule(as_money(c), 1, (Fraction(0),))


def reward(sched: RewardSchedule, i: int, n: int) -> Fraction:
    """Bounty of the i-th confirmed informer with n total reports."""
    if i < 1:
        raise ValueError("informer index starts at 1")
    if n < i:
        raise ValueError("total report count cannot precede the index")
    middle = sum(sched.xi(j) for j in range(i + 1, n + 1))
    return -sched.xi(i) + middle + sched.total_bounty * Fraction(2) ** (1 - n)


def reward_general_form(sched: RewardSchedule, i: int, n: int) -> Fraction:
    """Independent route: B(i, n) = a_i - sum_{j=i+1..n} a_j."""
    if i < 1 or n < i:
        raise ValueError("need 1 <= i <= n")
    return sched.a(i) - sum(sched.a(j) for j in range(i + 1, n + 1))


def immediate(sched: RewardSchedule, i: int) -> Fraction:
    """B1(i) = 2 * sum_{j>=i} delta_j, payable at confirmation."""
    if i < 1:
        raise ValueError("informer index starts at 1")
    if i > sched.guarantee_len:
        return Fraction(0)
    return 2 * sum(sched.delta(j) for j in range(i, sched.guarantee_len + 1))


def deferred(sched: RewardSchedule, n: int) -> Fraction:
    """B2(n) = c * 2^(1-n) - sum_{j>n} xi_j, payable once n is final."""
    if n < 0:
        raise ValueError("report count must be >= 0")
    if n == 0:
        return Fraction(0)
    return sched.total_bounty * Fraction(2) ** (1 - n) - sched.xi_tail(n)


def legacy_reward(c: MoneyLike, n: int) -> Fraction:
    """Flat prior-work payout: c * 2^(1-n), identical for every index."""
    if n < 1:
        raise ValueError("report count must be >= 1")
    return as_money(c) * Fraction(2) ** (1 - n)


def check_sybil_proof(sched: RewardSchedule, max_n: int) -> bool:
    """Brute-force oracle for Sybil-proofness.

    A coalition holding report slots S_m in an m-report world never gains
    by injecting extra reports: for every k >= m and every set of extra
    slots T inside {m+1..k} (the remaining late slots being other honest
    arrivals),

        sum_{i in S_m} reward(i, m)  >=  sum_{i in S_m u T} reward(i, k).

    Exponential in max_n; keep max_n <= 12.
    """
    if max_n > 12:
        raise ValueError("exhaustive check limited to max_n <= 12")
    table = {
        (i, n): reward(sched, i, n)
        for n in range(1, max_n + 1)
        for i in range(1, n + 1)
    }
    for m in range(1, max_n + 1):
        base = list(range(1, m + 1))
        for size in range(1, m + 1):
            for s_m in combinations(base, size):
                honest = sum(table[(i, m)] for i in s_m)
                for k in range(m, max_n + 1):
                    extras = list(range(m + 1, k + 1))
                    for t_size in range(0, len(extras) + 1):
                        for extra in combinations(extras, t_size):
                            attacked = sum(table[(i, k)] for i in s_m + extra)
                            if honest < attacked:
                                return False
    return True


@dataclass
class GuaranteeReport:
    """Outcome of the order/timeliness/guarantee property sweep."""

    order_aware: bool
    split_exact: bool
    guaranteed_amount: bool
    exponential_bound: bool
    failures: list

    @property
    def all_hold(self) -> bool:
        return (
            self.order_aware
            and self.split_exact
            and self.guaranteed_amount
            and self.exponential_bound
        )


def check_order_timely_guarantee(sched: RewardSchedule, max_n: int) -> GuaranteeReport:
    """Verify order-awareness, the exact immediate/deferred split, the
    positive guaranteed amount, and the exponential upper bound."""
    if max_n < 2:
        raise ValueError("need max_n >= 2")
    failures = []
    order_aware = True
    split_exact = True
    bound = True
    a1 = sched.a(1)
    # precomputed xi values and prefix sums keep the sweep quadratic
    xi = [Fraction(0)] * (max_n + 2)
    prefix = [Fraction(0)] * (max_n + 2)
    for j in range(1, max_n + 2):
        xi[j] = sched.xi(j)
        prefix[j] = prefix[j - 1] + xi[j]
    for n in range(1, max_n + 1):
        dn = deferred(sched, n)
        tail_const = prefix[n] + sched.total_bounty * Fraction(2) ** (1 - n)
        prev = None
        for i in range(1, n + 1):
            b = -xi[i] + (tail_const - prefix[i])
            if prev is not None and prev < b:
                order_aware = False
                failures.append(("order", i, n))
            prev = b
            if b != immediate(sched, i) + dn:
                split_exact = False
                failures.append(("split", i, n))
            if b > a1 * Fraction(2) ** (2 - i):
                bound = False
                failures.append(("bound", i, n))
    guaranteed = all(
        immediate(sched, i) > 0 for i in range(1, sched.guarantee_len + 1)
    )
    if not guaranteed:
        failures.append(("guarantee", sched.guarantee_len, None))
    return GuaranteeReport(order_aware, split_exact, guaranteed, bound, failures)


def reward_curve_rows(
    sched: RewardSchedule,
    n_values: Iterable[int],
    max_i: int = 20,
) -> list:
    """Rows (model, i, n, reward, immediate, deferred) for CSV export.

    n may be the string "inf", meaning the guaranteed n->infinity amount.
    Legacy rows use the same total bounty with the flat payout.
    """
    rows = []
    c = sched.total_bounty
    for n in n_values:
        if n == "inf":
            for i in range(1, max_i + 1):
                b1 = immediate(sched, i)
                rows.append(("argus", i, "inf", b1, b1, Fraction(0)))
            continue
        for i in range(1, min(max_i, n) + 1):
            rows.append(
                (
                    "argus",
                    i,
                    n,
                    reward(sched, i, n),
                    immediate(sched, i),
                    deferred(sched, n),
                )
            )
            rows.append(("legacy", i, n, legacy_reward(c, n), Fraction(0), legacy_reward(c, n)))
    return rows
