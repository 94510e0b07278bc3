"""Pseudoprime predicates, order signatures, and the lambda/mu survey.

The signature of a prime p under a base vector v is the tuple of 2-adic
valuations of the multiplicative orders of the bases mod p. Equal
signatures across all prime factors are necessary (and, together with the
Fermat congruence, sufficient) for a squarefree n to be a strong
pseudoprime to every base, which is what makes signature matching the
key of the whole search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from . import numth, primes

NINE_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23)
ELEVEN_BASES = NINE_BASES + (29, 31)

_FIRST_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def first_bases(m: int) -> tuple[int, ...]:
    """The first m prime bases, v = (2, 3, 5, ...)."""
    if not 1 <= m <= len(_FIRST_PRIMES):
        raise ValueError(f"base count must be in 1..{len(_FIRST_PRIMES)}, got {m}")
    return _FIRST_PRIMES[:m]


def validate_bases(bases: tuple[int, ...]) -> None:
    if not bases:
        raise ValueError("base vector must be nonempty")
    if list(bases) != sorted(set(bases)):
        raise ValueError("bases must be strictly ascending")
    for a in bases:
        if not primes.is_prime(a):
            raise ValueError(f"base {a} is not prime")


def _check_odd(n: int) -> None:
    if n <= 2 or n % 2 == 0:
        raise ValueError(f"predicate requires an odd integer > 2, got {n}")


def is_psp(n: int, a: int) -> bool:
    """Fermat congruence a**(n-1) = 1 (mod n).

    True for primes as well; compositeness is the caller's concern. A base
    sharing a factor with n can never satisfy the congruence, so that case
    returns False.
    """
    _check_odd(n)
    if math.gcd(a, n) != 1:
        return False
    return pow(a, n - 1, n) == 1


def is_spsp(n: int, a: int) -> bool:
    """Strong (Miller-Rabin) congruence to base a.

    With n - 1 = 2**s * d, d odd: a**d = 1, or a**(2**k * d) = -1 for some
    0 <= k < s.
    """
    _check_odd(n)
    if math.gcd(a, n) != 1:
        return False
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


def order_val2(a: int, p: int) -> int:
    """val2 of the multiplicative order of a mod an odd prime p.

    Needs no factorization of p - 1: write p - 1 = 2**e * d with d odd,
    then a**d is either 1 (valuation 0) or reaches -1 after exactly
    val2(Ord(a)) - 1 squarings, because -1 is the only square root of 1
    in the prime field.
    """
    d = p - 1
    e = (d & -d).bit_length() - 1
    d >>= e
    x = pow(a, d, p)
    if x == 1:
        return 0
    t = 0
    while x != p - 1:
        x = x * x % p
        t += 1
        if t > e:
            raise ValueError(f"{p} is not prime (no -1 in the power chain)")
    return t + 1


def signature_fast(p: int, bases: tuple[int, ...]) -> tuple[int, ...]:
    """Signature of prime p without factoring p - 1."""
    return tuple(order_val2(a, p) for a in bases)


def signature(
    p: int, bases: tuple[int, ...], p_minus_1_factors
) -> tuple[int, ...]:
    """Signature of prime p computed through full multiplicative orders."""
    for a in bases:
        if p % a == 0:
            raise ValueError(f"prime {p} divides base {a}; signature undefined")
    return tuple(
        numth.val2(numth.mult_order(a, p, p_minus_1_factors)) for a in bases
    )


@dataclass(frozen=True)
class PrimeRecord:
    """One row of the order survey: p with Val(p-1), lambda_p, mu_p, sigma."""

    p: int
    e: int  # val2(p - 1)
    lam: int  # lcm of the base orders mod p
    mu: int  # (p - 1) // lam
    sigma: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.mu * self.lam != self.p - 1:
            raise ValueError(f"mu * lambda != p - 1 for p = {self.p}")
        if numth.val2(self.lam) != max(self.sigma):
            raise ValueError(f"val2(lambda) != max(sigma) for p = {self.p}")

    @property
    def is_binary(self) -> bool:
        """p = 1 (mod 4) with every signature entry in {0, 1}."""
        return self.p % 4 == 1 and max(self.sigma) <= 1


def prime_record(
    p: int,
    bases: tuple[int, ...] = NINE_BASES,
    trial_bound: int = primes.DEFAULT_TRIAL_BOUND,
) -> PrimeRecord:
    """Compute orders of all bases mod p once; derive lambda, mu, sigma."""
    for a in bases:
        if p % a == 0:
            raise ValueError(f"prime {p} divides base {a}")
    fac = primes.factorize(p - 1, trial_bound=trial_bound)
    if not fac.complete:
        raise ArithmeticError(
            f"could not fully factor p - 1 = {p - 1} (cofactor {fac.cofactor})"
        )
    orders = [numth.mult_order(a, p, fac.factors) for a in bases]
    lam = 1
    for o in orders:
        lam = lam * o // math.gcd(lam, o)
    return PrimeRecord(
        p=p,
        e=numth.val2(p - 1),
        lam=lam,
        mu=(p - 1) // lam,
        sigma=tuple(numth.val2(o) for o in orders),
    )


def spsp_by_signature(factors: Iterable[int], bases: tuple[int, ...]) -> bool:
    """Is n = product(factors) an spsp to every base, via the signature test?

    n is spsp(v) iff n is psp(v) and all prime factors share one signature.
    Only squarefree n qualifies, so repeated factors are a domain error.
    """
    fs = sorted(factors)
    if len(fs) != len(set(fs)):
        raise ValueError("factors must be distinct (squarefree n only)")
    if len(fs) < 2:
        raise ValueError("need at least two prime factors")
    for p in fs:
        if p < 3 or p % 2 == 0:
            raise ValueError(f"factor {p} is not an odd prime > 2")
    n = math.prod(fs)
    for a in bases:
        if not is_psp(n, a):
            return False
    sig = signature_fast(fs[0], bases)
    return all(signature_fast(p, bases) == sig for p in fs[1:])


def symbols_compatible(p: int, q: int, bases: tuple[int, ...]) -> bool:
    """Necessary-condition filter from the Legendre symbol proposition.

    When val2(p-1) = val2(q-1), equal signatures force equal symbols for
    every base; unequal valuations impose no constraint here.
    """
    if numth.val2(p - 1) != numth.val2(q - 1):
        return True
    return all(numth.jacobi(a, p) == numth.jacobi(a, q) for a in bases)


def wieferich_pair(p: int) -> bool:
    """2**(p-1) = 1 and 3**(p-1) = 1 (mod p**2) simultaneously.

    A prime with both congruences is what it would take for a non-squarefree
    psp to bases 2 and 3 to exist; none is known below 3*10**9.
    """
    if p < 3 or p % 2 == 0:
        raise ValueError(f"wieferich_pair requires an odd prime, got {p}")
    p2 = p * p
    if p2 > numth.WORD_MAX:
        raise OverflowError(f"p**2 = {p2} exceeds the 63-bit range")
    return pow(2, p - 1, p2) == 1 and pow(3, p - 1, p2) == 1


def classify(record: PrimeRecord) -> tuple[str, ...]:
    """Survey class labels for a record with mu >= 2.

    The mu = 2 class splits by p mod 4; binary primes carry their mu label
    plus "binary" (the survey table counts them under both).
    """
    labels: list[str] = []
    if record.mu == 2:
        labels.append("mu2_3mod4" if record.p % 4 == 3 else "mu2_1mod4")
    else:
        labels.append(f"mu{record.mu}")
    if record.is_binary:
        labels.append("binary")
    return tuple(labels)


@dataclass(frozen=True)
class SurveyRecord:
    record: PrimeRecord
    labels: tuple[str, ...]


def _mu_greater_1(p: int, bases: tuple[int, ...], fac: primes.Factorization) -> bool:
    # mu > 1 iff lambda divides (p-1)/r for some prime r | p-1, i.e. every
    # base is an r-th power residue. Base 2 rejects almost everything fast.
    n1 = p - 1
    for r in fac.distinct_primes():
        reduced = n1 // r
        if all(pow(a, reduced, p) == 1 for a in bases):
            return True
    return False


def survey_mu(
    bound: int,
    bases: tuple[int, ...] = NINE_BASES,
    start: int | None = None,
    trial_bound: int = 10_000,
) -> Iterator[SurveyRecord]:
    """Every prime p <= bound with mu_p >= 2, classified, ascending.

    Primes up to the largest base are skipped (their signatures are
    undefined under v). Factorization failure for some p - 1 aborts with
    the offending p.
    """
    if bound > numth.WORD_MAX:
        raise OverflowError(f"bound {bound} exceeds the 63-bit range")
    lo = max(bases[-1] + 1, start if start is not None else 0)
    for p in primes.sieve_range(lo, bound + 1):
        fac = primes.factorize(p - 1, trial_bound=trial_bound)
        if not fac.complete:
            raise ArithmeticError(f"factorization of {p} - 1 incomplete")
        if not _mu_greater_1(p, bases, fac):
            continue
        orders = [numth.mult_order(a, p, fac.factors) for a in bases]
        lam = 1
        for o in orders:
            lam = lam * o // math.gcd(lam, o)
        rec = PrimeRecord(
            p=p,
            e=numth.val2(p - 1),
            lam=lam,
            mu=(p - 1) // lam,
            sigma=tuple(numth.val2(o) for o in orders),
        )
        yield SurveyRecord(rec, classify(rec))


def survey_totals(records: Iterable[SurveyRecord]) -> dict[str, int]:
    """Per-class totals; binary records count under their mu class too."""
    totals: dict[str, int] = {}
    for sr in records:
        for label in sr.labels:
            totals[label] = totals.get(label, 0) + 1
    return totals
