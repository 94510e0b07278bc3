"""Exact integer arithmetic kernel: 2-adic valuations, modular arithmetic,
Jacobi symbols, multiplicative orders, and CRT combination of residue classes.

All search arithmetic stays below 2**63; the one place that exceeds word
size (the gcd of numbers like 2**(b-1) - 1 with b around 2*10**6) goes
through :func:`big_gcd`, which is backed by GMP via gmpy2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2

WORD_MAX = 2**63 - 1


@dataclass(frozen=True, order=True)
class ResidueClass:
    """The set of integers x with x = residue (mod modulus)."""

    modulus: int
    residue: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"modulus must be >= 1, got {self.modulus}")
        if not 0 <= self.residue < self.modulus:
            raise ValueError(
                f"residue {self.residue} out of range for modulus {self.modulus}"
            )

    def contains(self, x: int) -> bool:
        return x % self.modulus == self.residue


def val2(n: int) -> int:
    """Exponent of the largest power of 2 dividing n (n >= 1)."""
    if n <= 0:
        raise ValueError(f"val2 requires n >= 1, got {n}")
    return (n & -n).bit_length() - 1


def mod_mul(a: int, b: int, m: int) -> int:
    """a*b mod m, exact for any operands (Python ints never overflow)."""
    if m < 1:
        raise ValueError(f"modulus must be >= 1, got {m}")
    return (a * b) % m


def mod_pow(a: int, e: int, m: int) -> int:
    """a**e mod m for e >= 0."""
    if m < 1:
        raise ValueError(f"modulus must be >= 1, got {m}")
    if e < 0:
        raise ValueError(f"exponent must be >= 0, got {e}")
    return pow(a, e, m)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1; the Legendre symbol when n is prime."""
    if n < 1 or n % 2 == 0:
        raise ValueError(f"jacobi requires odd n >= 1, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def lcm(a: int, b: int) -> int:
    """lcm with lcm(0, x) = 0, checked against the 64-bit search range."""
    value = math.lcm(a, b)
    if value > WORD_MAX:
        raise OverflowError(f"lcm({a}, {b}) = {value} exceeds the 63-bit range")
    return value


def mod_inverse(a: int, m: int) -> int | None:
    """x with a*x = 1 (mod m), or None when gcd(a, m) != 1.

    Non-invertibility is a normal outcome for the searches (it kills a
    candidate tuple), so it is reported as None rather than raised.
    """
    if m < 1:
        raise ValueError(f"modulus must be >= 1, got {m}")
    try:
        return pow(a, -1, m)
    except ValueError:
        return None


def crt_combine(classes: list[ResidueClass]) -> ResidueClass | None:
    """Combine residue classes into the unique class mod lcm of the moduli.

    Moduli need not be pairwise coprime. Returns None when the classes are
    incompatible. Raises OverflowError when the combined modulus leaves the
    63-bit range.
    """
    if not classes:
        raise ValueError("crt_combine requires a nonempty list")
    m1, r1 = classes[0].modulus, classes[0].residue
    for cls in classes[1:]:
        m2, r2 = cls.modulus, cls.residue
        g = math.gcd(m1, m2)
        if (r2 - r1) % g != 0:
            return None
        m = lcm(m1, m2)
        # r1 + m1*t = r2 (mod m2)  =>  t = (r2-r1)/g * inv(m1/g) (mod m2/g)
        m2g = m2 // g
        t = ((r2 - r1) // g * pow(m1 // g, -1, m2g)) % m2g
        r1 = (r1 + m1 * t) % m
        m1 = m
    return ResidueClass(m1, r1)


def mult_order(a: int, p: int, p_minus_1_factors) -> int:
    """Least e >= 1 with a**e = 1 (mod p), for prime p.

    p_minus_1_factors is the factorization of p-1 as (prime, exponent)
    pairs; the caller supplies it so one factorization can be reused
    across many bases.
    """
    if math.gcd(a, p) != 1:
        raise ValueError(f"base {a} shares a factor with {p}")
    order = p - 1
    check = 1
    for q, e in p_minus_1_factors:
        check *= q**e
    if check != order:
        raise ValueError("factors do not multiply to p - 1")
    for q, e in p_minus_1_factors:
        for _ in range(e):
            reduced = order // q
            if pow(a, reduced, p) != 1:
                break
            order = reduced
    return order


def big_gcd(x: int, y: int) -> int:
    """gcd of unbounded naturals; delegates to GMP for subquadratic speed.

    math.gcd is quadratic in the operand size, which is prohibitive for the
    ~2*10**6-bit operands the small-product trick produces.
    """
    if x < 0 or y < 0:
        raise ValueError("big_gcd is defined on nonnegative integers")
    return int(gmpy2.gcd(gmpy2.mpz(x), gmpy2.mpz(y)))


def pow2m1(k: int) -> int:
    """2**k - 1 as an unbounded natural."""
    if k < 0:
        raise ValueError(f"exponent must be >= 0, got {k}")
    return (1 << k) - 1


def pow3m1(k: int) -> int:
    """3**k - 1 as an unbounded natural (GMP-backed for large k)."""
    if k < 0:
        raise ValueError(f"exponent must be >= 0, got {k}")
    return int(gmpy2.mpz(3) ** k - 1)


def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of n >= 0, exact for any size."""
    if n < 0 or k < 1:
        raise ValueError("iroot requires n >= 0 and k >= 1")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / k)))
    while r > 0 and r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r
