"""Strong pseudoprime search toolkit.

Verifies and reproduces the smallest strong pseudoprimes to the first m
prime bases (psi_m) by signature matching, CRT candidate reduction, and
per-factor-count case searches, at configurable scale.
"""

from .numth import ResidueClass, big_gcd, crt_combine, jacobi, mod_inverse, mult_order, val2
from .primes import Factorization, factorize, is_prime, sieve_range
from .pseudoprimes import (
    ELEVEN_BASES,
    NINE_BASES,
    PrimeRecord,
    first_bases,
    is_psp,
    is_spsp,
    prime_record,
    signature,
    signature_fast,
    spsp_by_signature,
    survey_mu,
    symbols_compatible,
    wieferich_pair,
)
from .search import (
    Q11,
    Q11_FACTORS,
    FeasibleTuple,
    Hit,
    SearchConfig,
    SearchReport,
    feasible_3tuples,
    find_psi,
    gcd_trick_p3,
    naive_spsp_scan,
    residue_classes,
    run_all_cases,
    s_p_prefix,
    search_t2,
    search_t3,
    search_t4,
    search_t_ge5,
    signature_candidates,
)

__version__ = "0.1.0"
