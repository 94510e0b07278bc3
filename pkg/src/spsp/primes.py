"""Prime generation, deterministic 64-bit primality, and factorization.

The sieve is a segmented odd-only Eratosthenes on numpy bool arrays, so
memory is bounded by the segment size rather than the range. Primality is
the deterministic Miller-Rabin variant over published base sets that cover
the full 64-bit range. Factorization is trial division followed by Brent's
cycle-finding rho with a fixed constant sequence, so runs are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

DEFAULT_SEGMENT = 1 << 20  # odd entries per segment
DEFAULT_TRIAL_BOUND = 100_000
DEFAULT_RHO_BUDGET = 1 << 22

# Deterministic Miller-Rabin base sets. Each row (limit, bases) is valid for
# n < limit; the last row covers the remaining 64-bit range.
_MR_BASE_SETS: tuple[tuple[int, tuple[int, ...]], ...] = (
    (2_047, (2,)),
    (1_373_653, (2, 3)),
    (25_326_001, (2, 3, 5)),
    (3_215_031_751, (2, 3, 5, 7)),
    (2_152_302_898_747, (2, 3, 5, 7, 11)),
    (3_474_749_660_383, (2, 3, 5, 7, 11, 13)),
    (341_550_071_728_321, (2, 3, 5, 7, 11, 13, 17)),
    (1 << 64, (2, 325, 9_375, 28_178, 450_775, 9_780_504, 1_795_265_022)),
)

_TINY_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_TINY_SET = frozenset(_TINY_PRIMES)


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (plain Eratosthenes)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_range(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT) -> Iterator[int]:
    """Yield the primes p with lo <= p < hi in ascending order, each once."""
    if segment_size < 1:
        raise ValueError("segment_size must be >= 1")
    if hi <= lo:
        return
    if lo <= 2 < hi:
        yield 2
    base = simple_sieve(math.isqrt(max(hi - 1, 0)))
    odd_base = base[1:]  # skip 2; segments hold odd numbers only
    low = max(lo, 3)
    if low % 2 == 0:
        low += 1
    span = 2 * segment_size
    while low < hi:
        high = min(low + span, hi)  # exclusive
        count = (high - low + 1) // 2
        mask = np.ones(count, dtype=bool)
        for p in odd_base:
            p = int(p)
            start = max(p * p, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start >= high:
                continue
            mask[(start - low) // 2 :: p] = False
        for off in np.flatnonzero(mask):
            yield low + 2 * int(off)
        low = high


def primes_between(lo: int, hi: int) -> list[int]:
    """List form of sieve_range, for callers that need random access."""
    return list(sieve_range(lo, hi))


def _strong_probable_prime(n: int, a: int) -> bool:
    a %= n
    if a == 0:
        return True
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Exact primality for all 0 <= n < 2**64."""
    if n < 41:
        return n in _TINY_SET
    for p in _TINY_PRIMES:
        if n % p == 0:
            return False
    for limit, bases in _MR_BASE_SETS:
        if n < limit:
            return all(_strong_probable_prime(n, a) for a in bases)
    raise ValueError(f"{n} is outside the supported 64-bit range")


@dataclass
class Factorization:
    """n = cofactor * product(p**e); cofactor 1 means fully factored."""

    original: int
    factors: list[tuple[int, int]] = field(default_factory=list)
    cofactor: int = 1

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    def distinct_primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def product(self) -> int:
        value = self.cofactor
        for p, e in self.factors:
            value *= p**e
        return value


_small_prime_cache: list[int] = []


def _small_primes(bound: int) -> list[int]:
    global _small_prime_cache
    if not _small_prime_cache or _small_prime_cache[-1] < bound:
        _small_prime_cache = [int(p) for p in simple_sieve(max(bound, 1 << 16))]
    return _small_prime_cache


def _brent_rho(n: int, c: int, budget: int) -> tuple[int, int]:
    """One Brent rho round with polynomial x^2 + c; returns (divisor, used).

    divisor == n signals failure for this c. Deterministic: no randomness,
    the caller advances c = 1, 2, 3, ... between rounds.
    """
    y, r, q, g = 2, 1, 1, 1
    used = 0
    m = 128
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        used += r
        k = 0
        while k < r and g == 1:
            ys = y
            steps = min(m, r - k)
            for _ in range(steps):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            used += steps
            g = math.gcd(q, n)
            k += m
        r <<= 1
        if g == 1 and used > budget:
            return n, used
    if g == n:
        # the batched gcd jumped past the divisor; backtrack stepwise
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g, used


def factorize(
    n: int,
    trial_bound: int = DEFAULT_TRIAL_BOUND,
    rho_budget: int = DEFAULT_RHO_BUDGET,
) -> Factorization:
    """Factor n by trial division then Brent rho; never silently wrong.

    Budget exhaustion leaves cofactor > 1 with complete == False. Factors
    are sorted ascending and every listed prime passes is_prime.
    """
    if n < 1:
        raise ValueError(f"factorize requires n >= 1, got {n}")
    result = Factorization(original=n)
    if n == 1:
        return result
    counts: dict[int, int] = {}
    rem = n
    for p in _small_primes(trial_bound):
        if p > trial_bound or p * p > rem:
            break
        while rem % p == 0:
            counts[p] = counts.get(p, 0) + 1
            rem //= p
    if rem > 1 and rem <= trial_bound * trial_bound:
        # all prime divisors below the bound were removed, so rem is prime
        counts[rem] = counts.get(rem, 0) + 1
        rem = 1
    budget = rho_budget
    stack = [rem] if rem > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        d = m
        c = 1
        while d == m and budget > 0:
            d, used = _brent_rho(m, c, budget)
            budget -= max(used, 1)
            c += 1
        if d == m or d == 1:
            result.cofactor *= m  # give up on this piece
            continue
        stack.append(d)
        stack.append(m // d)
    result.factors = sorted(counts.items())
    return result
