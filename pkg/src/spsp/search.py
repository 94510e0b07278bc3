"""Case searches for strong pseudoprimes below a bound.

A squarefree n = p_1 * ... * p_t is an spsp to every base in v iff it is a
Fermat pseudoprime to every base and all prime factors share one order
signature. The searches split by t:

  t >= 5  equal-signature sequences whose 5-element products fit the bound
  t = 4   feasible 3-tuples extended along the progression p4 = b^-1 mod lam
  t = 3   feasible 2-tuples from CRT residue classes; small products use
          the gcd(2^(b-1)-1, 3^(b-1)-1) trick to jump straight to p3
  t = 2   small p1 via the gcd trick, middle p1 via first-6-base residue
          classes, large p1 via the plain progression p2 = 1 mod lam

Candidate enumeration walks only the residue classes that equal signatures
force (mod 9240 and friends), plus the small pool of primes with 4 | mu
that those classes deliberately leave out.
"""

from __future__ import annotations

import bisect
import itertools
import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Sequence

import numpy as np

from . import numth, primes
from .numth import ResidueClass, iroot, val2
from .pseudoprimes import (
    NINE_BASES,
    PrimeRecord,
    first_bases,
    is_spsp,
    order_val2,
    prime_record,
    signature_fast,
    spsp_by_signature,
    validate_bases,
)

log = logging.getLogger(__name__)

Q11 = 3825123056546413051
Q11_FACTORS = (149491, 747451, 34233211)

Sigma = tuple[int, ...]


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for one search run; defaults match the headline computation."""

    bound: int = Q11
    bases: tuple[int, ...] = NINE_BASES
    p1_lo: int | None = None  # half-open [p1_lo, p1_hi) shard
    p1_hi: int | None = None
    b_max: int | None = None  # only emit/extend tuples with b < b_max (t=3)
    small_product_threshold: int = 2_000_000
    strip_bound: int = 1_000_000
    trial_bound: int = primes.DEFAULT_TRIAL_BOUND
    rho_budget: int = primes.DEFAULT_RHO_BUDGET
    t2_small_max: int = 10**6
    t2_large_min: int = 10**8
    max_walk: int | None = None  # progression-walk candidate cap, None = no cap
    window: int = 1 << 23  # span of one candidate-walk chunk

    def __post_init__(self) -> None:
        if not 1 <= self.bound <= numth.WORD_MAX:
            raise ValueError(f"bound {self.bound} outside 1..2^63-1")
        validate_bases(self.bases)
        if self.bases != first_bases(len(self.bases)):
            raise ValueError("searches require v = the first m prime bases")


@dataclass(frozen=True)
class FeasibleTuple:
    """Ascending primes with equal signatures and product small enough to extend."""

    case: str
    primes: tuple[int, ...]
    b: int
    lam: int
    sigma: Sigma


@dataclass(frozen=True)
class Hit:
    n: int
    primes: tuple[int, ...]
    case: str


@dataclass(frozen=True)
class SequenceInfo:
    primes: tuple[int, ...]
    sigma: Sigma
    five_subsets: int


@dataclass
class SearchReport:
    case: str
    tuples_examined: int = 0
    feasible_count: int = 0
    candidate_count: int = 0
    hits: list[Hit] = field(default_factory=list)
    sequences: list[SequenceInfo] = field(default_factory=list)
    six_plus_subsets: int = 0
    unresolved: list[FeasibleTuple] = field(default_factory=list)
    wall_time: float = 0.0

    def hit_values(self) -> list[int]:
        return sorted({h.n for h in self.hits})


def merge_reports(a: SearchReport, b: SearchReport) -> SearchReport:
    """Combine shard reports; sums and set unions, deterministic order."""
    if a.case != b.case:
        raise ValueError(f"cannot merge {a.case} with {b.case}")
    hits = sorted(set(a.hits) | set(b.hits), key=lambda h: h.n)
    seqs = sorted(set(a.sequences) | set(b.sequences), key=lambda s: s.primes)
    return SearchReport(
        case=a.case,
        tuples_examined=a.tuples_examined + b.tuples_examined,
        feasible_count=a.feasible_count + b.feasible_count,
        candidate_count=a.candidate_count + b.candidate_count,
        hits=hits,
        sequences=seqs,
        six_plus_subsets=a.six_plus_subsets + b.six_plus_subsets,
        unresolved=sorted(set(a.unresolved) | set(b.unresolved), key=lambda t: t.primes),
        wall_time=a.wall_time + b.wall_time,
    )


# ---------------------------------------------------------------------------
# prime records and the 4 | mu pool


_record_cache: dict[tuple[int, tuple[int, ...]], PrimeRecord] = {}


def _record(p: int, bases: tuple[int, ...], trial_bound: int) -> PrimeRecord:
    key = (p, bases)
    rec = _record_cache.get(key)
    if rec is None:
        rec = prime_record(p, bases, trial_bound=trial_bound)
        if len(_record_cache) > (1 << 17):
            _record_cache.clear()
        _record_cache[key] = rec
    return rec


class MuPool:
    """Primes q with 4 | mu_q, i.e. a**((q-1)/4) = 1 mod q for every base.

    Equal-signature residue classes for q = 1 mod 4 candidates only cover
    valuations up to one step above the leader's; everything deeper has
    4 | mu and lives here. Members are rare, so their signatures are cached
    and candidate walks merge them in by plain lookup.
    """

    def __init__(self, bases: tuple[int, ...]):
        self.bases = bases
        self._values: list[int] = []
        self._sigmas: list[Sigma] = []
        self._bound = bases[-1]

    def extend_to(self, bound: int) -> None:
        if bound <= self._bound:
            return
        for q in primes.sieve_range(self._bound + 1, bound + 1):
            if q % 4 != 1:
                continue
            r = (q - 1) // 4
            if all(pow(a, r, q) == 1 for a in self.bases):
                self._values.append(q)
                self._sigmas.append(signature_fast(q, self.bases))
        self._bound = bound

    def members_between(
        self, lo: int, hi: int, mod_filter: ResidueClass | None
    ) -> list[tuple[int, Sigma]]:
        """Members q with lo < q <= hi, optionally filtered to a residue class."""
        self.extend_to(hi)
        i = bisect.bisect_right(self._values, lo)
        j = bisect.bisect_right(self._values, hi)
        out = []
        for k in range(i, j):
            q = self._values[k]
            if mod_filter is None or mod_filter.contains(q):
                out.append((q, self._sigmas[k]))
        return out


# ---------------------------------------------------------------------------
# residue classes forced by equal signatures


def _legendre_residues(a: int, target: int, q_mod4: int) -> list[int]:
    # (a/q) = (q/a) * s by reciprocity, s = -1 iff a = q = 3 (mod 4);
    # so fixing q mod 4 turns the symbol constraint into residues mod a.
    s = -1 if (a % 4 == 3 and q_mod4 == 3) else 1
    want = target * s
    return [r for r in range(1, a) if numth.jacobi(r, a) == want]


def _symbol_classes(
    two_cls: ResidueClass, odd_bases: Sequence[int], targets: dict[int, int]
) -> list[ResidueClass]:
    q_mod4 = two_cls.residue % 4 if two_cls.modulus % 4 == 0 else 1
    per_base = [
        [(a, r) for r in _legendre_residues(a, targets[a], q_mod4)] for a in odd_bases
    ]
    out = []
    for combo in itertools.product(*per_base):
        parts = [two_cls] + [ResidueClass(a, r) for a, r in combo]
        combined = numth.crt_combine(parts)
        assert combined is not None  # moduli are pairwise coprime
        out.append(combined)
    return out


def residue_classes(
    p1: int, bases: tuple[int, ...] = NINE_BASES, num_bases: int = 5
) -> list[ResidueClass]:
    """Classes that any prime q with sigma_q = sigma_p1 must fall in.

    Case analysis on p1 mod 8 (with e = val2(p1-1), f = val2(lambda_p1)):

      p1 = 3 (4)   q = p1 (8) with matching symbols for the first num_bases
                   bases; 30 classes mod 9240 for five of the nine bases
      p1 = 5 (8)   q = 5 (8) matching symbols, plus q = 9 (16) with all
                   symbols +1 (30 classes mod 18480)
      p1 = 1 (8)   f = e: q = 1+2^e (2^(e+1)) matching, plus q = 1+2^(e+1)
                   (2^(e+2)) all +1; f < e: the single class q = 1 (2^f)

    Matching candidates with q = 1 mod 4 deeper than these classes reach
    all have 4 | mu_q and are enumerated from the MuPool instead.
    """
    if p1 % 2 == 0 or p1 in bases:
        raise ValueError(f"p1 = {p1} must be an odd prime outside the base vector")
    nb = min(num_bases, len(bases))
    odd_cb = [a for a in bases[:nb] if a != 2]
    match = {a: numth.jacobi(a, p1) for a in odd_cb}
    plus = {a: 1 for a in odd_cb}
    if p1 % 4 == 3:
        classes = _symbol_classes(ResidueClass(8, p1 % 8), odd_cb, match)
    elif p1 % 8 == 5:
        classes = _symbol_classes(ResidueClass(8, 5), odd_cb, match)
        classes += _symbol_classes(ResidueClass(16, 9), odd_cb, plus)
    else:
        e = val2(p1 - 1)
        f = max(signature_fast(p1, bases))
        if f == e:
            classes = _symbol_classes(
                ResidueClass(1 << (e + 1), 1 + (1 << e)), odd_cb, match
            )
            classes += _symbol_classes(
                ResidueClass(1 << (e + 2), 1 + (1 << (e + 1))), odd_cb, plus
            )
        else:
            classes = [ResidueClass(1 << f, 1 % (1 << f))]
    return sorted(classes)


def _pool_filter(p1: int, bases: tuple[int, ...]) -> ResidueClass | None:
    """Residue restriction on pool members matching p1; None = pool unused."""
    if p1 % 4 == 3:
        return ResidueClass(4, 1)
    if p1 % 8 == 5:
        return ResidueClass(16, 1)
    e = val2(p1 - 1)
    f = max(signature_fast(p1, bases))
    if f == e:
        return ResidueClass(1 << (e + 2), 1 % (1 << (e + 2)))
    return None  # f < e: the 2^f class already covers every match


def _sigma_matches(q: int, sig: Sigma, bases: tuple[int, ...], e_q: int) -> bool:
    if max(sig) > e_q:
        return False
    d = (q - 1) >> e_q
    for a, want in zip(bases, sig):
        x = pow(a, d, q)
        if x == 1:
            t = 0
        else:
            t = 1
            while x != q - 1:
                x = x * x % q
                t += 1
                if t > e_q:
                    return False  # cannot happen for prime q
        if t != want:
            return False
    return True


def _iter_matches(
    p1: int,
    sig: Sigma,
    classes: Sequence[ResidueClass],
    pool: MuPool | None,
    pool_filter: ResidueClass | None,
    lo: int,
    hi: int,
    bases: tuple[int, ...],
    window: int,
    counter: list[int],
) -> Iterator[int]:
    """Primes q in (lo, hi] with sigma_q = sig, ascending.

    Walks the arithmetic progressions of the residue classes in windowed
    chunks and merges in pool members (whose signatures are pre-verified).
    """
    use_pool = pool is not None and pool_filter is not None
    pos = lo
    while pos < hi:
        top = min(pos + window, hi)
        vals: list[int] = []
        for cls in classes:
            m, r = cls.modulus, cls.residue
            first = pos + 1 + ((r - (pos + 1)) % m)
            if first <= top:
                vals.extend(range(first, top + 1, m))
        pooled: dict[int, Sigma] = {}
        if use_pool:
            for q, qs in pool.members_between(pos, top, pool_filter):
                pooled[q] = qs
        if pooled:
            merged = sorted(set(vals) | set(pooled))
        else:
            merged = sorted(set(vals)) if len(classes) > 1 else vals
        for v in merged:
            qs = pooled.get(v)
            if qs is not None:
                if qs == sig:
                    yield v
                continue
            if v & 1 == 0 or v == p1:
                continue
            counter[0] += 1
            if not primes.is_prime(v):
                continue
            if _sigma_matches(v, sig, bases, val2(v - 1)):
                yield v
        pos = top


def signature_candidates(
    p1: int,
    hi: int,
    bases: tuple[int, ...] = NINE_BASES,
    num_bases: int = 5,
    pool: MuPool | None = None,
    window: int = 1 << 23,
) -> Iterator[int]:
    """Primes q in (p1, hi] with sigma_q = sigma_p1, in ascending order."""
    sig = signature_fast(p1, bases)
    classes = residue_classes(p1, bases, num_bases)
    if pool is None:
        pool = MuPool(bases)
    counter = [0]
    yield from _iter_matches(
        p1, sig, classes, pool, _pool_filter(p1, bases), p1, hi, bases, window, counter
    )


# ---------------------------------------------------------------------------
# t >= 5


def s_p_prefix(
    p: int,
    q_bound: int,
    bases: tuple[int, ...] = NINE_BASES,
    pool: MuPool | None = None,
    window: int = 1 << 23,
    counter: list[int] | None = None,
) -> list[int]:
    """Leading elements of S_p = {q prime : sigma_q = sigma_p}, ascending.

    Emits the first l elements when l > 5, the product of the first five
    is <= q_bound, and the product of the first four times element l
    exceeds q_bound. Emits nothing when no 5-element prefix fits, and
    nothing for any p that is not the smallest member of its own S_p
    (that sequence is emitted once, for the smallest member).
    """
    if p <= 2 or p in bases:
        return []  # primes dividing a base have no signature
    if counter is None:
        counter = [0]
    if pool is None:
        pool = MuPool(bases)
    sig = signature_fast(p, bases)
    classes = residue_classes(p, bases)
    pf = _pool_filter(p, bases)

    def matches(lo: int, hi: int) -> Iterator[int]:
        return _iter_matches(p, sig, classes, pool, pf, lo, hi, bases, window, counter)

    for q in matches(bases[-1], p - 1):
        return []  # a smaller prime owns this sequence
    seq = [p]
    cur = p
    while len(seq) < 5:
        prod = math.prod(seq)
        k = len(seq)
        # largest next element that still lets a 5-prefix fit under the bound
        horizon = iroot(q_bound // prod, 5 - k)
        while prod * (horizon + 1) ** (5 - k) <= q_bound:
            horizon += 1
        if horizon <= cur:
            return []
        nxt = next(matches(cur, horizon), None)
        if nxt is None:
            return []  # any completion to 5 elements would exceed the bound
        seq.append(nxt)
        cur = nxt
    prod4 = math.prod(seq[:4])
    boundary = q_bound // prod4
    if cur < boundary:
        seq.extend(matches(cur, boundary))
        cur = boundary
    # the emitted sequence ends at the first match beyond the boundary
    span = max(boundary // 4, 1 << 16)
    while True:
        terminator = next(matches(cur, cur + span), None)
        if terminator is not None:
            seq.append(terminator)
            return seq
        cur += span
        span *= 2
        if cur > boundary * 64 + (1 << 24):
            raise RuntimeError(f"no sequence terminator found for p = {p} below {cur}")


def search_t_ge5(config: SearchConfig) -> SearchReport:
    """Check every equal-signature sequence for products of >= 5 primes."""
    t0 = time.perf_counter()
    q_bound, bases = config.bound, config.bases
    report = SearchReport(case="t>=5")
    pool = MuPool(bases)
    counter = [0]
    lo = config.p1_lo if config.p1_lo is not None else bases[-1] + 1
    hi = iroot(q_bound, 5)
    if config.p1_hi is not None:
        hi = min(hi, config.p1_hi - 1)
    for p in primes.sieve_range(lo, hi + 1):
        if p in bases:
            continue
        seq = s_p_prefix(p, q_bound, bases, pool, config.window, counter)
        if not seq:
            continue
        five = 0
        for size in range(5, len(seq) + 1):
            for combo in itertools.combinations(seq, size):
                if math.prod(combo) > q_bound:
                    continue
                report.tuples_examined += 1
                if size == 5:
                    five += 1
                else:
                    report.six_plus_subsets += 1
                if spsp_by_signature(combo, bases):
                    report.hits.append(_verified_hit(combo, bases, "t>=5"))
        report.sequences.append(
            SequenceInfo(tuple(seq), signature_fast(p, bases), five)
        )
        report.feasible_count += 1
    report.candidate_count = counter[0]
    report.wall_time = time.perf_counter() - t0
    return report


def _verified_hit(factors: Sequence[int], bases: tuple[int, ...], case: str) -> Hit:
    n = math.prod(factors)
    if not all(is_spsp(n, a) for a in bases):
        raise AssertionError(f"hit {n} failed direct strong-test verification")
    if len(set(factors)) == len(factors):
        if not spsp_by_signature(factors, bases):
            raise AssertionError(f"hit {n} failed signature verification")
    log.info("hit: %d = %s (%s)", n, " * ".join(map(str, factors)), case)
    return Hit(n=n, primes=tuple(sorted(factors)), case=case)


# ---------------------------------------------------------------------------
# t = 4


def feasible_3tuples(
    config: SearchConfig, sink: Callable[[FeasibleTuple], None] | None = None
) -> Iterator[FeasibleTuple]:
    """All (p1, p2, p3) with equal signatures and p1*p2*p3^2 < bound."""
    q_bound, bases = config.bound, config.bases
    pool = MuPool(bases)
    counter = [0]
    lo = config.p1_lo if config.p1_lo is not None else bases[-1] + 1
    hi = iroot(q_bound, 4)
    if config.p1_hi is not None:
        hi = min(hi, config.p1_hi - 1)
    for p1 in primes.sieve_range(lo, hi + 1):
        if p1 in bases:
            continue
        p2_hi = iroot((q_bound - 1) // p1, 3)
        if p2_hi <= p1:
            continue
        sig = signature_fast(p1, bases)
        classes = residue_classes(p1, bases)
        pf = _pool_filter(p1, bases)
        rec1 = None
        for p2 in _iter_matches(
            p1, sig, classes, pool, pf, p1, p2_hi, bases, config.window, counter
        ):
            if rec1 is None:
                rec1 = _record(p1, bases, config.trial_bound)
            rec2 = _record(p2, bases, config.trial_bound)
            p3_hi = math.isqrt((q_bound - 1) // (p1 * p2))
            for p3 in _iter_matches(
                p1, sig, classes, pool, pf, p2, p3_hi, bases, config.window, counter
            ):
                rec3 = _record(p3, bases, config.trial_bound)
                lam = math.lcm(rec1.lam, rec2.lam, rec3.lam)
                tup = FeasibleTuple(
                    case="t4",
                    primes=(p1, p2, p3),
                    b=p1 * p2 * p3,
                    lam=lam,
                    sigma=sig,
                )
                if sink is not None:
                    sink(tup)
                yield tup


def search_t4(
    config: SearchConfig, sink: Callable[[FeasibleTuple], None] | None = None
) -> SearchReport:
    """Extend each feasible 3-tuple along p4 = b^-1 (mod lam), p3 < p4 <= Q/b."""
    t0 = time.perf_counter()
    q_bound, bases = config.bound, config.bases
    report = SearchReport(case="t4")
    for tup in feasible_3tuples(config, sink):
        report.feasible_count += 1
        b, lam = tup.b, tup.lam
        if math.gcd(b, lam) != 1:
            continue  # no qualifying p4 exists
        report.tuples_examined += 1
        inv = numth.mod_inverse(b % lam, lam)
        assert inv is not None
        hi = q_bound // b
        start = inv + ((tup.primes[2] - inv) // lam + 1) * lam
        for p4 in range(start, hi + 1, lam):
            report.candidate_count += 1
            if not primes.is_prime(p4):
                continue
            if _sigma_matches(p4, tup.sigma, bases, val2(p4 - 1)):
                if spsp_by_signature(tup.primes + (p4,), bases):
                    report.hits.append(
                        _verified_hit(tup.primes + (p4,), bases, "t4")
                    )
    report.wall_time = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# the gcd trick


@dataclass(frozen=True)
class TrickResult:
    primes: tuple[int, ...]
    complete: bool


_chunk_cache: dict[int, list[tuple[int, list[int]]]] = {}


def _prime_chunks(bound: int) -> list[tuple[int, list[int]]]:
    """(product, primes) chunks for fast smooth-part extraction by gcd."""
    chunks = _chunk_cache.get(bound)
    if chunks is None:
        chunks = []
        batch: list[int] = []
        for p in primes.sieve_range(2, bound + 1):
            batch.append(p)
            if len(batch) == 1024:
                chunks.append((math.prod(batch), batch))
                batch = []
        if batch:
            chunks.append((math.prod(batch), batch))
        if len(_chunk_cache) > 4:
            _chunk_cache.clear()
        _chunk_cache[bound] = chunks
    return chunks


def gcd_trick_p3(
    b: int,
    lo: int,
    hi: int,
    strip_bound: int = 1_000_000,
    trial_bound: int = primes.DEFAULT_TRIAL_BOUND,
    rho_budget: int = primes.DEFAULT_RHO_BUDGET,
) -> TrickResult:
    """Prime divisors of gcd(2^(b-1)-1, 3^(b-1)-1) in (lo, hi].

    Any further prime factor p of a base-2,3 pseudoprime n = b*p satisfies
    a^(b-1) = 1 (mod p) for a = 2, 3, so it divides this gcd. Small primes
    are stripped with sieved chunk products; a word-size leftover goes to
    Pollard rho. If an unfactored leftover could still hide a divisor <= hi
    the result is flagged incomplete and the caller must fall back to
    progression walking.
    """
    if b < 3 or b % 2 == 0:
        raise ValueError(f"gcd trick requires odd b >= 3, got {b}")
    g = numth.big_gcd(numth.pow2m1(b - 1), numth.pow3m1(b - 1))
    found: set[int] = set()
    if g == 1:
        return TrickResult((), True)
    for prod, chunk in _prime_chunks(strip_bound):
        h = numth.big_gcd(g, prod)
        if h == 1:
            continue
        for p in chunk:
            if h % p == 0:
                while g % p == 0:
                    g //= p
                if lo < p <= hi:
                    found.add(p)
                h //= p
                if h == 1:
                    break
    complete = True
    if g > 1:
        # every remaining prime factor of g exceeds strip_bound
        resolved = _split_leftover(g, found, lo, hi, strip_bound, rho_budget)
        complete = resolved or strip_bound >= hi
    return TrickResult(tuple(sorted(found)), complete)


def _split_leftover(
    g: int, found: set[int], lo: int, hi: int, strip_bound: int, rho_budget: int
) -> bool:
    """Split a stripped gcd leftover with Brent rho, collecting in-range primes.

    Word-size pieces get exact primality; larger pieces are split further or,
    when rho gives up, reported as unresolved (return False) since they could
    hide a divisor <= hi.
    """
    stack = [g]
    budget = rho_budget
    resolved = True
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if m <= strip_bound * strip_bound or (m < (1 << 64) and primes.is_prime(m)):
            if lo < m <= hi:
                found.add(m)
            continue
        d = m
        c = 1
        while d == m and budget > 0:
            d, used = primes._brent_rho(m, c, budget)
            budget -= max(used, 1)
            c += 1
        if d in (1, m):
            resolved = False
            continue
        stack.append(d)
        stack.append(m // d)
    return resolved


# ---------------------------------------------------------------------------
# t = 3


def search_t3(
    config: SearchConfig, sink: Callable[[FeasibleTuple], None] | None = None
) -> SearchReport:
    """Feasible 2-tuples (sigma-equal, p1*p2^2 < Q), then p3 by trick or walk."""
    t0 = time.perf_counter()
    q_bound, bases = config.bound, config.bases
    trick_ok = len(bases) >= 2  # the trick needs both base 2 and base 3
    report = SearchReport(case="t3")
    pool = MuPool(bases)
    counter = [0]
    lo = config.p1_lo if config.p1_lo is not None else bases[-1] + 1
    hi = iroot(q_bound, 3)
    if config.p1_hi is not None:
        hi = min(hi, config.p1_hi - 1)
    for p1 in primes.sieve_range(lo, hi + 1):
        if p1 in bases:
            continue
        p2_hi = math.isqrt((q_bound - 1) // p1)
        if config.b_max is not None:
            p2_hi = min(p2_hi, (config.b_max - 1) // p1)
        if p2_hi <= p1:
            continue
        sig = signature_fast(p1, bases)
        classes = residue_classes(p1, bases)
        pf = _pool_filter(p1, bases)
        rec1 = None
        for p2 in _iter_matches(
            p1, sig, classes, pool, pf, p1, p2_hi, bases, config.window, counter
        ):
            if rec1 is None:
                rec1 = _record(p1, bases, config.trial_bound)
            rec2 = _record(p2, bases, config.trial_bound)
            b = p1 * p2
            lam = math.lcm(rec1.lam, rec2.lam)
            tup = FeasibleTuple(case="t3", primes=(p1, p2), b=b, lam=lam, sigma=sig)
            report.feasible_count += 1
            if sink is not None:
                sink(tup)
            if math.gcd(b, lam) != 1:
                continue
            report.tuples_examined += 1
            p3_hi = q_bound // b
            if p3_hi <= p2:
                continue
            if trick_ok and b < config.small_product_threshold:
                tr = gcd_trick_p3(
                    b, p2, p3_hi, config.strip_bound, config.trial_bound,
                    config.rho_budget,
                )
                if tr.complete:
                    for p3 in tr.primes:
                        report.candidate_count += 1
                        if _sigma_matches(p3, sig, bases, val2(p3 - 1)):
                            if spsp_by_signature((p1, p2, p3), bases):
                                report.hits.append(
                                    _verified_hit((p1, p2, p3), bases, "t3")
                                )
                    continue
            _walk_progression(report, tup, q_bound, bases, config)
    report.candidate_count += counter[0]
    report.wall_time = time.perf_counter() - t0
    return report


def _walk_progression(
    report: SearchReport,
    tup: FeasibleTuple,
    q_bound: int,
    bases: tuple[int, ...],
    config: SearchConfig,
) -> None:
    """Test p_t = b^-1 (mod lam) over (max prime, Q/b] for one tuple."""
    b, lam, sig = tup.b, tup.lam, tup.sigma
    lo, hi = tup.primes[-1], q_bound // b
    inv = numth.mod_inverse(b % lam, lam)
    if inv is None:
        return
    start = inv + ((lo - inv) // lam + 1) * lam
    if config.max_walk is not None and (hi - start) // lam + 1 > config.max_walk:
        report.unresolved.append(tup)
        return
    for pt in range(start, hi + 1, lam):
        report.candidate_count += 1
        if pt & 1 == 0 or not primes.is_prime(pt):
            continue
        if _sigma_matches(pt, sig, bases, val2(pt - 1)):
            if spsp_by_signature(tup.primes + (pt,), bases):
                report.hits.append(_verified_hit(tup.primes + (pt,), bases, tup.case))


# ---------------------------------------------------------------------------
# t = 2


def _t2_classes(
    p1: int, rec1: PrimeRecord, bases: tuple[int, ...], num_bases: int = 6
) -> list[ResidueClass]:
    """Residue classes for p2 in the two-factor case, first num_bases bases.

    Unlike the t = 3 classes there is no pool: every deeper-valuation
    candidate lands in the all-symbols-+1 branch, which stays walkable
    because it is intersected with p2 = 1 (mod lambda_p1).
    """
    lam = rec1.lam
    nb = min(num_bases, len(bases))
    odd_cb = [a for a in bases[1:nb] if lam % a != 0]  # drop bases inside lam
    match = {a: numth.jacobi(a, p1) for a in odd_cb}
    plus = {a: 1 for a in odd_cb}
    if p1 % 4 == 3:
        classes = _symbol_classes(ResidueClass(8, p1 % 8), odd_cb, match)
        classes += _symbol_classes(ResidueClass(8, 1), odd_cb, plus)
    elif p1 % 8 == 5:
        classes = _symbol_classes(ResidueClass(8, 5), odd_cb, match)
        classes += _symbol_classes(ResidueClass(8, 1), odd_cb, plus)
    else:
        e, f = rec1.e, max(rec1.sigma)
        if f == e:
            two = 1 << (e + 1)
            classes = _symbol_classes(ResidueClass(two, 1 + (1 << e)), odd_cb, match)
            classes += _symbol_classes(ResidueClass(two, 1), odd_cb, plus)
        else:
            classes = [ResidueClass(2, 1)]
    combined = []
    lam_cls = ResidueClass(lam, 1 % lam)
    for cls in classes:
        merged = numth.crt_combine([cls, lam_cls])
        if merged is not None:
            combined.append(merged)
    return sorted(set(combined))


def search_t2(config: SearchConfig) -> SearchReport:
    """Two-factor search split by p1 size: trick / CRT classes / plain walk."""
    t0 = time.perf_counter()
    q_bound, bases = config.bound, config.bases
    trick_ok = len(bases) >= 2
    report = SearchReport(case="t2")
    lo = config.p1_lo if config.p1_lo is not None else bases[-1] + 1
    hi = math.isqrt(q_bound - 1)
    if config.p1_hi is not None:
        hi = min(hi, config.p1_hi - 1)
    for p1 in primes.sieve_range(lo, hi + 1):
        if p1 in bases:
            continue
        p2_hi = q_bound // p1
        if p2_hi <= p1:
            continue
        report.tuples_examined += 1
        sig = signature_fast(p1, bases)
        if trick_ok and p1 <= config.t2_small_max:
            tr = gcd_trick_p3(
                p1, p1, p2_hi, config.strip_bound, config.trial_bound,
                config.rho_budget,
            )
            if tr.complete:
                for p2 in tr.primes:
                    report.candidate_count += 1
                    if _sigma_matches(p2, sig, bases, val2(p2 - 1)):
                        if spsp_by_signature((p1, p2), bases):
                            report.hits.append(_verified_hit((p1, p2), bases, "t2"))
                continue
        rec1 = _record(p1, bases, config.trial_bound)
        if p1 > config.t2_large_min:
            classes = [ResidueClass(rec1.lam, 1 % rec1.lam)]
        else:
            classes = _t2_classes(p1, rec1, bases)
        for p2 in _iter_matches(
            p1, sig, classes, None, None, p1, p2_hi, bases, config.window,
            [0],
        ):
            report.candidate_count += 1
            if spsp_by_signature((p1, p2), bases):
                report.hits.append(_verified_hit((p1, p2), bases, "t2"))
    report.wall_time = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# square divisors, driver, oracle


def square_divisor_scan(config: SearchConfig) -> SearchReport:
    """Non-squarefree spsp candidates: n = p**2 * k with every base a
    satisfying a**(p-1) = 1 (mod p**2).

    For any v containing both 2 and 3 there is no such p below 3*10**9
    (the double Wieferich bound), which covers every 63-bit search; the
    scan only has work to do for v = (2).
    """
    t0 = time.perf_counter()
    q_bound, bases = config.bound, config.bases
    report = SearchReport(case="square")
    if len(bases) >= 2:
        report.wall_time = time.perf_counter() - t0
        return report
    for p in primes.sieve_range(3, math.isqrt(q_bound) + 1):
        p2 = p * p
        if any(pow(a, p - 1, p2) != 1 for a in bases):
            continue
        for k in range(1, q_bound // p2 + 1, 2):
            n = p2 * k
            report.candidate_count += 1
            if all(is_spsp(n, a) for a in bases):
                fac = primes.factorize(n)
                flat = tuple(
                    sorted(q for q, e in fac.factors for _ in range(e))
                )
                report.hits.append(Hit(n=n, primes=flat, case="square"))
                log.info("square hit: %d = %s", n, flat)
    report.wall_time = time.perf_counter() - t0
    return report


CASE_SEARCHES = {
    "5": search_t_ge5,
    "4": search_t4,
    "3": search_t3,
    "2": search_t2,
}


def run_all_cases(config: SearchConfig) -> dict[str, SearchReport]:
    """Every t-case plus the square-divisor scan, as one report bundle."""
    reports = {
        "t>=5": search_t_ge5(config),
        "t4": search_t4(config),
        "t3": search_t3(config),
        "t2": search_t2(config),
        "square": square_divisor_scan(config),
    }
    return reports


def find_psi(m: int, bound: int, config: SearchConfig | None = None) -> int | None:
    """Smallest spsp to the first m prime bases that is <= bound, or None."""
    if not 1 <= m <= 11:
        raise ValueError(f"base count must be in 1..11, got {m}")
    bases = first_bases(m)
    if config is None:
        config = SearchConfig(bound=bound, bases=bases)
    else:
        config = replace(config, bound=bound, bases=bases)
    reports = run_all_cases(config)
    hits = sorted({h.n for r in reports.values() for h in r.hits})
    return hits[0] if hits else None


def naive_spsp_scan(m: int, bound: int) -> list[int]:
    """Every odd composite n < bound that is spsp to the first m bases.

    Brute force with no structural shortcuts; the independent oracle the
    structured searches are checked against.
    """
    bases = first_bases(m)
    out = []
    seg = 1 << 22
    lo = 9
    while lo < bound:
        hi = min(lo + 2 * seg, bound)
        flags = _composite_flags(lo, hi)
        base0 = bases[0]
        for i in range(flags.size):
            if not flags[i]:
                continue
            n = lo + 2 * i
            if is_spsp(n, base0) and all(is_spsp(n, a) for a in bases[1:]):
                out.append(n)
        lo = hi
    return out


def _composite_flags(lo: int, hi: int) -> np.ndarray:
    """Bool array over odd n in [lo, hi): True when n is composite."""
    count = (hi - lo + 1) // 2
    comp = np.zeros(count, dtype=bool)
    for p in primes.simple_sieve(math.isqrt(max(hi - 1, 0))):
        p = int(p)
        if p == 2:
            continue
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        if start < hi:
            comp[(start - lo) // 2 :: p] = True
    return comp
