"""Closed-form limit constants: zeta values, Euler products, Dirichlet series,
conversion constants between full-grid and primitive-grid averages, and the
two-squares product formulas.

Products are accumulated in log space with sign tracking.  Divergence to
zero is detected two ways, and both are pure functions of (spec, cutoff):

  * the running log-magnitude falls below a hard threshold (default -40,
    under double-precision meaningfulness), or
  * the factors carry 1/p-scale decay: the log-mass accumulated over the
    top dyadic window (sqrt(cutoff), cutoff] stays bounded away from 0,
    which extrapolates to a log-magnitude of -infinity as the cutoff grows.

The second test is what recognizes slowly divergent products such as the
Liouville two-squares product, whose partial products decay only like a
power of log(cutoff).

Tail bounds are rigorous only for factors of scale 1/p**s with s >= 2 and
unit-bounded functions; products with 1/p-scale factors get labeled
heuristic tails that claim nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import DomainError, ParameterError, RangeError, SingularityError, TailModeError
from .multfunc import MultiplicativeSpec, power_spec, prime_value
from .sieve import SieveTables

DEFAULT_PRIME_CUTOFF = 10**6
DEFAULT_SERIES_CUTOFF = 10**6
DEFAULT_LOG_THRESHOLD = -40.0
DEFAULT_DRIFT_TOL = 0.05

PREDICTION_CSV_HEADER = ["name", "value", "cutoff", "tail_bound", "tail_kind", "diverged_to_zero"]


@dataclass
class PredictionResult:
    """A predicted limit constant with its cutoff and tail metadata."""

    value: Union[float, complex]
    cutoff: int
    tail_bound: float
    tail_kind: str  # "rigorous" | "heuristic"
    diverged_to_zero: bool = False
    terms_log_sum: float = 0.0
    meta: dict = field(default_factory=dict)

    def csv_row(self, name: str) -> list[str]:
        from .csvio import format_number

        return [
            name,
            format_number(self.value),
            str(self.cutoff),
            format_number(self.tail_bound),
            self.tail_kind,
            str(self.diverged_to_zero).lower(),
        ]


@lru_cache(maxsize=None)
def zeta(r: int) -> float:
    """zeta(r) for integer r >= 2 to better than 12 digits.

    r = 2, 4, 6 use the closed forms; otherwise a short series with
    Euler-Maclaurin corrections at a = 32 (error far below 1e-15).
    """
    r = int(r)
    if r < 2:
        raise DomainError(f"zeta needs r >= 2, got {r}")
    if r == 2:
        return math.pi**2 / 6
    if r == 4:
        return math.pi**4 / 90
    if r == 6:
        return math.pi**6 / 945
    a = 32
    total = sum(n ** (-float(r)) for n in range(1, a))
    total += a ** (1.0 - r) / (r - 1)
    total += 0.5 * a ** (-float(r))
    # Bernoulli corrections: + B_{2k}/(2k)! * (r)(r+1)...(r+2k-2) * a**(1-r-2k)
    rising = float(r)
    total += (1.0 / 12) * rising * a ** (-r - 1.0)
    rising *= (r + 1) * (r + 2)
    total += (-1.0 / 720) * rising * a ** (-r - 3.0)
    rising *= (r + 3) * (r + 4)
    total += (1.0 / 30240) * rising * a ** (-r - 5.0)
    rising *= (r + 5) * (r + 6)
    total += (-1.0 / 1209600) * rising * a ** (-r - 7.0)
    return total


# ---------------------------------------------------------------------------
# Log-space accumulation with divergence detection
# ---------------------------------------------------------------------------


def _primes_below(tables: SieveTables, cutoff: int) -> np.ndarray:
    cutoff = int(cutoff)
    if cutoff < 2:
        raise ParameterError(f"prime cutoff must be >= 2, got {cutoff}")
    if cutoff > tables.limit:
        raise RangeError(f"prime cutoff {cutoff} exceeds the sieve limit {tables.limit}")
    hi = int(np.searchsorted(tables.primes, cutoff, side="right"))
    return tables.primes[:hi]


def _accumulate_product(
    factors: np.ndarray,
    primes: np.ndarray,
    cutoff: int,
    prefactor: float,
    log_threshold: float,
    drift_tol: float,
):
    """Signed log-space product of prefactor * prod(factors).

    Returns (value, log_sum, diverged, drift) where drift is the log-mass
    over the top dyadic prime window, used for 1/p-scale divergence.
    """
    if prefactor == 0:
        return 0.0, -math.inf, True, 0.0
    sign = -1.0 if prefactor < 0 else 1.0
    neg = int(np.count_nonzero(factors < 0))
    if neg & 1:
        sign = -sign
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(factors))
    log_sum = float(logs.sum()) + math.log(abs(prefactor))
    window = primes.astype(np.float64) > math.sqrt(cutoff)
    drift = float(logs[window].sum()) if window.any() else 0.0
    diverged = (log_sum < log_threshold) or (drift < -drift_tol)
    value = 0.0 if diverged else sign * math.exp(log_sum)
    return value, log_sum, diverged, drift


def _resolve_tail_mode(spec_bound: float, tail: str) -> str:
    if tail == "auto":
        return "rigorous" if spec_bound <= 1.0 else "heuristic"
    if tail == "rigorous":
        if spec_bound > 1.0:
            raise TailModeError(
                f"rigorous tails need a unit bound, but the function declares bound {spec_bound}"
            )
        return "rigorous"
    if tail == "heuristic":
        return "heuristic"
    raise ParameterError(f"tail must be 'auto', 'rigorous' or 'heuristic', got {tail!r}")


# ---------------------------------------------------------------------------
# Euler products and Dirichlet series
# ---------------------------------------------------------------------------


def euler_product(
    spec: MultiplicativeSpec,
    k: int,
    s: int,
    tables: SieveTables,
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
    *,
    tail: str = "auto",
    log_threshold: float = DEFAULT_LOG_THRESHOLD,
    drift_tol: float = DEFAULT_DRIFT_TOL,
) -> PredictionResult:
    """prod over primes p <= cutoff of (1 - f(p)**k / p**s), s >= 2.

    For unit-bounded f the tail of omitted primes is rigorously below
    sum_{n > cutoff} n**-s < cutoff**(1-s)/(s-1), converted to a value
    scale through the log bound |log(1-x)| <= |x| / (1 - 2**-s).
    """
    s = int(s)
    if s < 2:
        raise DomainError(f"euler_product needs s >= 2, got {s}")
    mode = _resolve_tail_mode(spec.bound**k, tail)
    ps = _primes_below(tables, prime_cutoff)
    vals = spec.prime_values(ps)
    if spec.is_complex:
        fk = vals.astype(np.complex128) ** k
        factors = 1.0 - fk / ps.astype(np.float64) ** s
        # complex products: plain accumulation, magnitude threshold only
        value = complex(np.prod(factors))
        log_sum = math.log(abs(value)) if value != 0 else -math.inf
        diverged = log_sum < log_threshold
        if diverged:
            value = 0.0
    else:
        fk = vals.astype(np.float64) ** k
        factors = 1.0 - fk / ps.astype(np.float64) ** s
        if np.any(factors == 0):
            value, log_sum, diverged = 0.0, -math.inf, True
        else:
            value, log_sum, diverged, _ = _accumulate_product(
                factors, ps, prime_cutoff, 1.0, log_threshold, drift_tol
            )
    bk = spec.bound**k
    log_tail = (bk / (1.0 - 2.0**-s)) * prime_cutoff ** (1 - s) / (s - 1)
    tail_bound = abs(value) * math.expm1(log_tail) if not diverged else 0.0
    return PredictionResult(
        value=value,
        cutoff=int(prime_cutoff),
        tail_bound=tail_bound,
        tail_kind=mode,
        diverged_to_zero=diverged,
        terms_log_sum=log_sum,
        meta={"k": k, "s": s, "log_threshold": log_threshold},
    )


def dirichlet_series(
    spec: MultiplicativeSpec,
    k: int,
    s: int,
    tables: SieveTables,
    series_cutoff: int = DEFAULT_SERIES_CUTOFF,
    *,
    tail: str = "auto",
) -> PredictionResult:
    """sum_{n <= cutoff} f(n)**k / n**s with the rigorous tail
    cutoff**(1-s)/(s-1) in the unit-bound case."""
    s = int(s)
    if s < 2:
        raise DomainError(f"dirichlet_series needs s >= 2, got {s}")
    series_cutoff = int(series_cutoff)
    if series_cutoff < 1:
        raise ParameterError(f"series cutoff must be >= 1, got {series_cutoff}")
    if series_cutoff > tables.limit:
        raise RangeError(f"series cutoff {series_cutoff} exceeds the sieve limit {tables.limit}")
    mode = _resolve_tail_mode(spec.bound**k, tail)
    table = power_spec(spec, k).value_table(tables)[1 : series_cutoff + 1]
    n = np.arange(1, series_cutoff + 1, dtype=np.float64)
    weights = n ** (-float(s))
    if spec.is_complex:
        value: Union[float, complex] = complex((table.astype(np.complex128) * weights).sum())
    else:
        value = float((table.astype(np.float64) * weights).sum())
    tail_bound = (spec.bound**k) * series_cutoff ** (1 - s) / (s - 1)
    log_sum = math.log(abs(value)) if value != 0 else -math.inf
    return PredictionResult(
        value=value,
        cutoff=series_cutoff,
        tail_bound=tail_bound,
        tail_kind=mode,
        diverged_to_zero=False,
        terms_log_sum=log_sum,
        meta={"k": k, "s": s},
    )


def primitive_constant(
    spec: MultiplicativeSpec,
    k: int,
    r: int,
    tables: SieveTables,
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
    *,
    tail: str = "auto",
) -> PredictionResult:
    """zeta(r) * prod_p (1 - f(p)**k / p**r): the factor converting a
    full-grid limit into the matching primitive-grid limit."""
    ep = euler_product(spec, k, r, tables, prime_cutoff, tail=tail)
    z = zeta(r)
    ep.value = z * ep.value
    ep.tail_bound = z * ep.tail_bound
    ep.terms_log_sum += math.log(z)
    return ep


def full_constant(
    spec: MultiplicativeSpec,
    k: int,
    r: int,
    tables: SieveTables,
    series_cutoff: int = DEFAULT_SERIES_CUTOFF,
    *,
    tail: str = "auto",
) -> PredictionResult:
    """(1/zeta(r)) * sum_n f(n)**k / n**r: the factor converting a
    primitive-grid limit into the matching full-grid limit."""
    ds = dirichlet_series(spec, k, r, tables, series_cutoff, tail=tail)
    z = zeta(r)
    ds.value = ds.value / z
    ds.tail_bound = ds.tail_bound / z
    if ds.value != 0:
        ds.terms_log_sum = math.log(abs(ds.value))
    return ds


def consistency_check(
    spec: MultiplicativeSpec,
    k: int,
    r: int,
    tables: SieveTables,
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
    series_cutoff: int = DEFAULT_SERIES_CUTOFF,
) -> float:
    """|primitive_constant * full_constant - 1|, which vanishes analytically
    because the Euler product and the Dirichlet series are reciprocal for a
    completely multiplicative function.  Returns NaN when a diverged
    product makes the check meaningless."""
    pc = primitive_constant(spec, k, r, tables, prime_cutoff)
    fc = full_constant(spec, k, r, tables, series_cutoff)
    if pc.diverged_to_zero or fc.diverged_to_zero:
        return math.nan
    return abs(pc.value * fc.value - 1.0)


def combined_tail(a: PredictionResult, b: PredictionResult) -> float:
    """First-order tail bound for the product a.value * b.value."""
    return a.tail_bound * abs(b.value) + b.tail_bound * abs(a.value) + a.tail_bound * b.tail_bound


# ---------------------------------------------------------------------------
# Two-squares product formulas
# ---------------------------------------------------------------------------


def _real_prime_values(spec: MultiplicativeSpec, ps: np.ndarray) -> np.ndarray:
    if spec.is_complex:
        raise DomainError("two-squares product formulas need a real-valued function")
    return spec.prime_values(ps).astype(np.float64)


def coprime_two_squares_constant(
    spec: MultiplicativeSpec,
    tables: SieveTables,
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
    *,
    log_threshold: float = DEFAULT_LOG_THRESHOLD,
    drift_tol: float = DEFAULT_DRIFT_TOL,
) -> PredictionResult:
    """Limit of the coprime-pair average of f(m**2 + n**2):

        (2 + f(2))/3 * prod over p = 1 mod 4 of
            (p + f(p)) (p - 1) / ((p - f(p)) (p + 1)).

    The prefactor is the p = 2 local factor of the full-to-primitive
    conversion product times the full-average prefactor 1/(2 - f(2)); it
    simplifies to (4 - f(2)**2) / (3 (2 - f(2))) = (2 + f(2))/3, which
    equals 1/(2 - f(2)) whenever f(2) = +/-1.  Factors are 1 + O(1/p), so
    the tail is heuristic, and f(p) not tending to 1 on the split primes
    drives the product to zero (reported via diverged_to_zero)."""
    ps = _primes_below(tables, prime_cutoff)
    vals = _real_prime_values(spec, ps)
    f2 = float(prime_value(spec, 2).real if isinstance(prime_value(spec, 2), complex) else prime_value(spec, 2))
    sel = ps % 4 == 1
    p1 = ps[sel].astype(np.float64)
    f1 = vals[sel]
    den = (p1 - f1) * (p1 + 1)
    if np.any(den == 0):
        raise SingularityError("coprime two-squares product has a vanishing factor denominator")
    factors = (p1 + f1) * (p1 - 1) / den
    prefactor = (2.0 + f2) / 3.0
    value, log_sum, diverged, drift = _accumulate_product(
        factors, ps[sel], prime_cutoff, prefactor, log_threshold, drift_tol
    )
    tail_bound = 0.0 if diverged else abs(value) * abs(drift)
    return PredictionResult(
        value=value,
        cutoff=int(prime_cutoff),
        tail_bound=tail_bound,
        tail_kind="heuristic",
        diverged_to_zero=diverged,
        terms_log_sum=log_sum,
        meta={"log_threshold": log_threshold, "drift": drift, "drift_tol": drift_tol},
    )


def full_two_squares_constant(
    spec: MultiplicativeSpec,
    tables: SieveTables,
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
    *,
    log_threshold: float = DEFAULT_LOG_THRESHOLD,
    drift_tol: float = DEFAULT_DRIFT_TOL,
) -> PredictionResult:
    """Limit of the full-grid average of f(m**2 + n**2):

        1/(2 - f(2)) * prod_{p = 1 mod 4} ((p - 1)/(p - f(p)))**2
                     * prod_{p = 3 mod 4} (p**2 - 1)/(p**2 - f(p)**2).

    The 3 mod 4 factors are 1 + O(1/p**2) (rigorously small tail); the
    1 mod 4 factors are 1 + O(1/p), so the combined tail stays labeled
    heuristic and carries the same divergence detection as the coprime
    formula."""
    ps = _primes_below(tables, prime_cutoff)
    vals = _real_prime_values(spec, ps)
    f2v = prime_value(spec, 2)
    f2 = float(f2v.real if isinstance(f2v, complex) else f2v)
    if f2 == 2.0:
        raise SingularityError("full two-squares product is singular at f(2) = 2")
    sel1 = ps % 4 == 1
    sel3 = ps % 4 == 3
    p1 = ps[sel1].astype(np.float64)
    f1 = vals[sel1]
    p3 = ps[sel3].astype(np.float64)
    f3 = vals[sel3]
    if np.any(p1 - f1 == 0) or np.any(p3 * p3 - f3 * f3 == 0):
        raise SingularityError("full two-squares product has a vanishing factor denominator")
    factors1 = ((p1 - 1) / (p1 - f1)) ** 2
    factors3 = (p3 * p3 - 1) / (p3 * p3 - f3 * f3)
    prefactor = 1.0 / (2.0 - f2)
    # split accumulation so the drift test sees only the 1/p-scale class
    value1, log1, diverged, drift = _accumulate_product(
        factors1, ps[sel1], prime_cutoff, prefactor, log_threshold, drift_tol
    )
    with np.errstate(divide="ignore"):
        log3 = float(np.log(np.abs(factors3)).sum())
    sign3 = -1.0 if int(np.count_nonzero(factors3 < 0)) & 1 else 1.0
    log_sum = log1 + log3
    diverged = diverged or log_sum < log_threshold
    if diverged:
        value = 0.0
    else:
        value = math.copysign(1.0, value1) * sign3 * math.exp(log_sum)
    rigorous3 = math.expm1(2.7 * max(spec.bound, 1.0) ** 2 / prime_cutoff)
    tail_bound = 0.0 if diverged else abs(value) * (abs(drift) + rigorous3)
    return PredictionResult(
        value=value,
        cutoff=int(prime_cutoff),
        tail_bound=tail_bound,
        tail_kind="heuristic",
        diverged_to_zero=diverged,
        terms_log_sum=log_sum,
        meta={"log_threshold": log_threshold, "drift": drift, "drift_tol": drift_tol},
    )


def gaussian_coprime_factor(
    gspec,
    tables: SieveTables,
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
    *,
    tail: str = "auto",
    log_threshold: float = DEFAULT_LOG_THRESHOLD,
) -> PredictionResult:
    """zeta(2) * prod_p (1 - f(p)/p**2) for a real-valued completely
    multiplicative f on the nonzero Gaussian integers, with f evaluated at
    the rational primes embedded as p + 0i.

    Converts the full-grid limit of the average of f(m + i n) into the
    coprime-pair limit."""
    from .gaussian import embedded_prime_values

    ps = _primes_below(tables, prime_cutoff)
    fvals = embedded_prime_values(gspec, ps, tables)
    mode = _resolve_tail_mode(gspec.bound**2, tail)
    factors = 1.0 - fvals / ps.astype(np.float64) ** 2
    if np.any(factors == 0):
        value, log_sum, diverged = 0.0, -math.inf, True
    else:
        value, log_sum, diverged, _ = _accumulate_product(
            factors, ps, prime_cutoff, 1.0, log_threshold, DEFAULT_DRIFT_TOL
        )
    z = zeta(2)
    value *= z
    log_tail = (max(gspec.bound, 1.0) ** 2 / (1.0 - 0.25)) / prime_cutoff
    tail_bound = 0.0 if diverged else abs(value) * math.expm1(log_tail)
    return PredictionResult(
        value=value,
        cutoff=int(prime_cutoff),
        tail_bound=tail_bound,
        tail_kind=mode,
        diverged_to_zero=diverged,
        terms_log_sum=log_sum + (math.log(z) if not diverged else 0.0),
        meta={"log_threshold": log_threshold},
    )
