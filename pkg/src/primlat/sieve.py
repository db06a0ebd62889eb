"""Integer factorization tables shared by every other module.

A single linear sieve pass fills, for all n up to a limit:

    spf[n]    smallest prime factor              (int32)
    mu[n]     Mobius function in {-1, 0, +1}     (int8)
    omega[n]  prime factors with multiplicity    (int8)

plus the ascending array of primes up to the limit.  The tables cost
about 6 bytes per integer (plus the prime list) and are frozen after
construction, so they can be shared freely across threads.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass

import numpy as np

from ._kernels import _linear_sieve
from .errors import CapacityError, DomainError, RangeError

#: Hard cap on sieve size: omega fits in 8 bits and spf in 32 bits below this.
SIEVE_LIMIT_CAP = 2**31 - 1


@dataclass(frozen=True)
class SieveTables:
    """Immutable factorization tables up to `limit` (inclusive).

    Attributes:
        limit: largest indexable value.
        spf: smallest prime factor, valid for 2 <= n <= limit.
        mu: Mobius function, valid for 1 <= n <= limit.
        omega: number of prime factors with multiplicity, 1 <= n <= limit.
        primes: ascending int64 array of all primes <= limit.
    """

    limit: int
    spf: np.ndarray
    mu: np.ndarray
    omega: np.ndarray
    primes: np.ndarray


def _prime_count_bound(limit: int) -> int:
    # pi(x) <= 1.3 x / ln x for x >= 17; small x handled by the constant.
    if limit < 17:
        return 8
    return int(1.3 * limit / math.log(limit)) + 16


def build_sieve(limit: int) -> SieveTables:
    """Run the linear sieve and return frozen tables for 1..limit.

    Raises CapacityError when limit exceeds SIEVE_LIMIT_CAP and RangeError
    when limit < 1.  A too-large request fails loudly instead of truncating.
    """
    limit = int(limit)
    if limit < 1:
        raise RangeError(f"sieve limit must be >= 1, got {limit}")
    if limit > SIEVE_LIMIT_CAP:
        raise CapacityError(
            f"sieve limit {limit} exceeds the cap {SIEVE_LIMIT_CAP} (= 2**31 - 1); "
            f"tables cost about 6 bytes per entry"
        )
    spf, mu, omega, primes = _linear_sieve(limit, _prime_count_bound(limit))
    for arr in (spf, mu, omega, primes):
        arr.setflags(write=False)
    return SieveTables(limit=limit, spf=spf, mu=mu, omega=omega, primes=primes)


def _check_range(n: int, tables: SieveTables) -> int:
    n = int(n)
    if n < 1 or n > tables.limit:
        raise RangeError(f"n={n} outside table range 1..{tables.limit}")
    return n


def factorize(n: int, tables: SieveTables) -> list[tuple[int, int]]:
    """Return the prime factorization of n as ascending (prime, exponent) pairs.

    factorize(1) is the empty list.  Requires 1 <= n <= tables.limit.
    """
    n = _check_range(n, tables)
    spf = tables.spf
    out: list[tuple[int, int]] = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def liouville(n: int, tables: SieveTables) -> int:
    """(-1) ** omega(n), the completely multiplicative sign of n."""
    n = _check_range(n, tables)
    return -1 if int(tables.omega[n]) & 1 else 1


class PrimeClass(enum.Enum):
    """Residue class of a prime modulo 4."""

    TWO = "two"
    ONE_MOD4 = "one_mod4"
    THREE_MOD4 = "three_mod4"


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test (fine for n up to ~10**12)."""
    n = int(n)
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def prime_class(p: int) -> PrimeClass:
    """Classify a prime as 2, 1 mod 4, or 3 mod 4.

    Raises DomainError for non-prime input.
    """
    p = int(p)
    if not is_prime(p):
        raise DomainError(f"prime_class: {p} is not prime")
    if p == 2:
        return PrimeClass.TWO
    return PrimeClass.ONE_MOD4 if p % 4 == 1 else PrimeClass.THREE_MOD4


# ---------------------------------------------------------------------------
# Global prime-position lookup.
#
# Seeded value rules key off the position of a prime in the ascending
# sequence of all primes, independent of any particular sieve.  A small
# cached Eratosthenes sieve grows on demand to answer those queries.
# ---------------------------------------------------------------------------

_position_lock = threading.Lock()
_cached_primes: np.ndarray | None = None


def _primes_upto(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return np.nonzero(flags)[0].astype(np.int64)


def prime_position(p: int) -> int:
    """0-based position of p in the ascending sequence of all primes.

    Raises DomainError when p is not prime.
    """
    global _cached_primes
    p = int(p)
    if p < 2:
        raise DomainError(f"prime_position: {p} is not prime")
    with _position_lock:
        if _cached_primes is None or _cached_primes[-1] < p:
            _cached_primes = _primes_upto(max(2 * p, 1 << 10))
        idx = int(np.searchsorted(_cached_primes, p))
        if idx >= len(_cached_primes) or int(_cached_primes[idx]) != p:
            raise DomainError(f"prime_position: {p} is not prime")
        return idx
