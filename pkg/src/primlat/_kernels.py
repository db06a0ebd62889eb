"""Numba kernels for the two hot loops: sieve construction and value tables.

Both are plain O(limit) passes; numba specializes `_fill_mult_table` per
value dtype (int8, float64, complex128).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _linear_sieve(limit, primes_cap):
    """One linear (Euler) sieve pass filling spf, mu, omega and the prime list.

    Every composite is struck exactly once, by its smallest prime factor,
    so the total work is O(limit).
    """
    spf = np.zeros(limit + 1, np.int32)
    mu = np.zeros(limit + 1, np.int8)
    omega = np.zeros(limit + 1, np.int8)
    primes = np.empty(primes_cap, np.int64)
    if limit >= 1:
        mu[1] = 1
    count = 0
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            mu[i] = -1
            omega[i] = 1
            primes[count] = i
            count += 1
        for j in range(count):
            p = primes[j]
            if p > spf[i] or p * i > limit:
                break
            ip = p * i
            spf[ip] = np.int32(p)
            omega[ip] = omega[i] + 1
            if p == spf[i]:
                mu[ip] = 0
            else:
                mu[ip] = -mu[i]
    return spf, mu, omega, primes[:count].copy()


@njit(cache=True)
def _fill_mult_table(spf, prime_vals, out):
    """Fill out[n] = f(n) for a completely multiplicative f given f on primes.

    prime_vals is indexed by integer value and holds f(p) at prime slots;
    out must be preallocated with out.shape[0] == spf.shape[0] >= 2.
    """
    out[1] = 1
    for n in range(2, out.shape[0]):
        out[n] = out[n // spf[n]] * prime_vals[spf[n]]
