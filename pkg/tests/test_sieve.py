import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primlat import (
    CapacityError,
    DomainError,
    PrimeClass,
    RangeError,
    build_sieve,
    factorize,
    liouville,
    prime_class,
)
from primlat.sieve import SIEVE_LIMIT_CAP, is_prime, prime_position


def trial_division(n):
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def test_limit_one():
    t = build_sieve(1)
    assert int(t.mu[1]) == 1
    assert int(t.omega[1]) == 0
    assert len(t.primes) == 0


def test_small_values():
    t = build_sieve(100)
    assert int(t.spf[12]) == 2
    assert int(t.mu[12]) == 0
    assert int(t.omega[12]) == 3
    assert int(t.mu[30]) == -1
    assert int(t.omega[30]) == 3


def test_factorize_examples(tables_small):
    assert factorize(1, tables_small) == []
    assert factorize(360, tables_small) == [(2, 3), (3, 2), (5, 1)]
    # 9973 confirmed prime by trial division, then looked up
    assert trial_division(9973) == [(9973, 1)]
    assert factorize(9973, tables_small) == [(9973, 1)]


def test_factorize_matches_trial_division(tables_small):
    rng = np.random.default_rng(0)
    for n in rng.integers(1, tables_small.limit + 1, size=200):
        assert factorize(int(n), tables_small) == trial_division(int(n))


def test_factorize_range_errors(tables_small):
    with pytest.raises(RangeError):
        factorize(0, tables_small)
    with pytest.raises(RangeError):
        factorize(tables_small.limit + 1, tables_small)


def test_liouville_examples(tables_small):
    assert liouville(1, tables_small) == 1
    assert liouville(12, tables_small) == -1
    assert liouville(60, tables_small) == 1


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 99), st.integers(1, 99))
def test_liouville_completely_multiplicative(m, n):
    t = build_sieve(10_000)
    assert liouville(m * n, t) == liouville(m, t) * liouville(n, t)


def test_mobius_fundamental_identity(tables_small):
    # sum of mu over the divisors of n is 1 at n = 1 and 0 otherwise
    mu = tables_small.mu
    for n in range(1, 10_001):
        total = 0
        d = 1
        while d * d <= n:
            if n % d == 0:
                total += int(mu[d])
                if d != n // d:
                    total += int(mu[n // d])
            d += 1
        assert total == (1 if n == 1 else 0), f"failed at n={n}"


def test_omega_equals_factorization_exponent_sum(tables_small):
    rng = np.random.default_rng(1)
    for n in rng.integers(1, tables_small.limit + 1, size=300):
        n = int(n)
        assert int(tables_small.omega[n]) == sum(e for _, e in factorize(n, tables_small))


def test_primes_match_trial_division_oracle():
    t = build_sieve(100_000)
    oracle = [n for n in range(2, 100_001) if is_prime(n)]
    assert t.primes.tolist() == oracle


def test_spf_invariants(tables_small):
    spf = tables_small.spf
    rng = np.random.default_rng(2)
    for n in rng.integers(2, tables_small.limit + 1, size=300):
        n = int(n)
        p = int(spf[n])
        assert is_prime(p) and n % p == 0
        assert all(n % q for q in range(2, p))


def test_capacity_and_range_errors():
    with pytest.raises(CapacityError) as err:
        build_sieve(SIEVE_LIMIT_CAP + 1)
    assert str(SIEVE_LIMIT_CAP) in str(err.value)
    with pytest.raises(RangeError):
        build_sieve(0)


def test_prime_class_examples():
    assert prime_class(2) is PrimeClass.TWO
    assert prime_class(5) is PrimeClass.ONE_MOD4
    assert prime_class(7) is PrimeClass.THREE_MOD4
    with pytest.raises(DomainError):
        prime_class(9)


def test_prime_class_exhaustive_small():
    t = build_sieve(1000)
    for p in t.primes.tolist():
        cls = prime_class(p)
        if p == 2:
            assert cls is PrimeClass.TWO
        elif p % 4 == 1:
            assert cls is PrimeClass.ONE_MOD4
        else:
            assert cls is PrimeClass.THREE_MOD4


def test_prime_position():
    assert prime_position(2) == 0
    assert prime_position(3) == 1
    assert prime_position(97) == 24
    with pytest.raises(DomainError):
        prime_position(100)


def test_tables_are_read_only(tables_small):
    with pytest.raises(ValueError):
        tables_small.mu[1] = 5
