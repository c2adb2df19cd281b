"""Integer partitions: exact counts and the leading asymptotic."""
from __future__ import annotations

import math
from functools import lru_cache

from .errors import SizeLimitExceeded

N_MAX = 10_000


class PartitionTable:
    """nu[n] for 0 <= n <= limit, grown on demand by the pentagonal recurrence."""

    def __init__(self, limit: int = 0):
        self.nu = [1]
        self.extend(limit)

    def extend(self, limit: int) -> None:
        nu = self.nu
        for n in range(len(nu), limit + 1):
            total = 0
            k = 1
            while True:
                g1 = k * (3 * k - 1) // 2
                if g1 > n:
                    break
                sign = 1 if k % 2 else -1
                total += sign * nu[n - g1]
                g2 = g1 + k
                if g2 <= n:
                    total += sign * nu[n - g2]
                k += 1
            nu.append(total)

    def __getitem__(self, n: int) -> int:
        if n >= len(self.nu):
            self.extend(n)
        return self.nu[n]


_TABLE = PartitionTable()


def nu(n: int, n_max: int = N_MAX) -> int:
    """Number of partitions of n."""
    if n < 0:
        return 0
    if n > n_max:
        raise SizeLimitExceeded(f"nu({n}) exceeds configured limit {n_max}")
    return _TABLE[n]


def nu_dp(n: int) -> list[int]:
    """nu(0..n) by the parts-bounded knapsack recurrence (oracle)."""
    ways = [1] + [0] * n
    for part in range(1, n + 1):
        for total in range(part, n + 1):
            ways[total] += ways[total - part]
    return ways


def partitions_min2(p: int) -> int:
    """Partitions of p whose parts are all at least 2, by direct DP."""
    if p < 0:
        return 0
    ways = [1] + [0] * p
    for part in range(2, p + 1):
        for total in range(part, p + 1):
            ways[total] += ways[total - part]
    return ways[p]


@lru_cache(maxsize=None)
def _bicolored_min2(p: int) -> tuple[int, ...]:
    # each part size >= 2 comes in two colors: generating function prod 1/(1-x^k)^2
    ways = [1] + [0] * p
    for part in range(2, p + 1):
        for _ in range(2):
            for total in range(part, p + 1):
                ways[total] += ways[total - part]
    return tuple(ways)


def partitions_min2_bicolored(p: int) -> int:
    """Partitions of p into parts >= 2 where every part carries one of two colors.

    This counts (2,p) coverings with member sizes 1 or 2: each component is
    either a cycle or a path on at least two members.
    """
    if p < 0:
        return 0
    return _bicolored_min2(p)[p]


def log_int(n: int) -> float:
    """Natural log of a positive integer of any size."""
    if n <= 0:
        raise ValueError("log of nonpositive integer")
    bits = n.bit_length()
    if bits < 1000:
        return math.log(n)
    shift = bits - 64
    return math.log(n >> shift) + shift * math.log(2)


def log_meinardus(n: int) -> float:
    return math.pi * math.sqrt(2 * n / 3) - math.log(4 * n * math.sqrt(3))


def meinardus_asymptotic(n: int) -> float:
    """Leading term exp(pi sqrt(2n/3)) / (4 n sqrt 3)."""
    if n < 1:
        raise ValueError("n must be positive")
    return math.exp(log_meinardus(n))


def meinardus_ratio(n: int) -> float:
    """nu(n) / asymptotic, evaluated in log space."""
    return math.exp(log_int(nu(n)) - log_meinardus(n))


def log_p1_asymptotic(p: int) -> float:
    return math.log(math.pi * math.sqrt(2) / 12) - 1.5 * math.log(p) + math.pi * math.sqrt(2 * p / 3)


def theorem_p1_asymptotic(p: int) -> float:
    """pi sqrt2 / (12 p sqrt p) * exp(pi sqrt(2p/3)), the leading term of 2(nu(p) - nu(p-1))."""
    if p < 2:
        raise ValueError("p must be at least 2")
    return math.exp(log_p1_asymptotic(p))


def theorem_p1_ratio(p: int) -> float:
    """2(nu(p) - nu(p-1)) divided by its leading asymptotic."""
    exact = 2 * (nu(p) - nu(p - 1))
    return math.exp(log_int(exact) - log_p1_asymptotic(p))


def partition_rows(ns) -> list[tuple[int, int, float, float]]:
    return [(n, nu(n), meinardus_asymptotic(n), meinardus_ratio(n)) for n in ns]
