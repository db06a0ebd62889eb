"""Averages of products prod_j f_j(L_j(m)) over full and primitive grids,
their conversion constants, and the exact transfer identity.

For completely multiplicative f_j and linear forms L_j, scaling the grid
point by d multiplies each factor by f_j(d), so

    sum over primitive m in [N]^r of prod_j f_j(L_j(m))
      = sum_{d<=N} mu(d) (prod_j f_j(d)) * sum over m in [N/d]^r of prod_j f_j(L_j(m))

exactly.  The conversion constants reuse the Euler-product machinery with
the pointwise product function g(p) = prod_j f_j(p).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapacityError, DomainError, EmptyDomainError, ParameterError
from .lattice import ALL_POINTS, AverageReport, GridMode, fixed_order_sum
from .multfunc import (
    MultiplicativeSpec,
    evaluate_exact,
    exact_prime_value,
    product_spec,
)
from .predict import PredictionResult, full_constant, primitive_constant
from .sieve import SieveTables


@dataclass(frozen=True)
class LinearForm:
    """L(m) = k_vec . m with nonnegative integer coefficients, not all zero."""

    k_vec: tuple[int, ...]

    def __post_init__(self):
        if not self.k_vec or all(c == 0 for c in self.k_vec):
            raise DomainError("linear form needs at least one positive coefficient")
        if any(c < 0 for c in self.k_vec):
            raise DomainError(f"linear form coefficients must be >= 0, got {self.k_vec}")

    @property
    def r(self) -> int:
        return len(self.k_vec)

    @property
    def has_zero_component(self) -> bool:
        return any(c == 0 for c in self.k_vec)

    def evaluate(self, *coords):
        out = None
        for c, x in zip(self.k_vec, coords):
            if c == 0:
                continue
            term = c * np.asarray(x, dtype=np.int64)
            out = term if out is None else out + term
        return out

    def max_on_grid(self, N: int) -> int:
        return sum(c * N for c in self.k_vec)

    def label(self) -> str:
        return "+".join(f"{c}*x{i+1}" for i, c in enumerate(self.k_vec) if c)


@dataclass(frozen=True)
class MultilinearProblem:
    """A family of functions applied to linear forms on [N]^r, optionally
    with conjugated partner forms."""

    specs: tuple[MultiplicativeSpec, ...]
    forms: tuple[LinearForm, ...]
    r: int
    conjugate_pairs: tuple[tuple[LinearForm, LinearForm], ...] = ()

    def __post_init__(self):
        if len(self.specs) != len(self.forms):
            raise DomainError(
                f"{len(self.specs)} functions vs {len(self.forms)} forms; lengths must agree"
            )
        for L in self.forms:
            if L.r != self.r:
                raise DomainError(f"form {L.label()} has dimension {L.r}, problem has r={self.r}")
        for L, Lp in self.conjugate_pairs:
            if L.r != self.r or Lp.r != self.r:
                raise DomainError("paired forms must match the problem dimension")

    @property
    def degenerate_forms(self) -> bool:
        return any(L.has_zero_component for L in self.forms)


def _coordinate_axes(N: int, r: int):
    m = np.arange(1, N + 1, dtype=np.int64)
    return [m.reshape((1,) * i + (N,) + (1,) * (r - 1 - i)) for i in range(r)]


def _check_capacity(prob: MultilinearProblem, N: int, tables: SieveTables, forms: Sequence[LinearForm]):
    worst = max((L.max_on_grid(N) for L in forms), default=1)
    if worst > tables.limit:
        raise CapacityError(f"form values reach {worst} but the sieve covers {tables.limit}")


def _product_grid(prob: MultilinearProblem, N: int, tables: SieveTables) -> np.ndarray:
    axes = _coordinate_axes(N, prob.r)
    dtype = np.complex128 if any(s.is_complex for s in prob.specs) else np.float64
    out = np.ones((N,) * prob.r, dtype=dtype)
    for spec, L in zip(prob.specs, prob.forms):
        vals = spec.value_table(tables)[L.evaluate(*axes)]
        out = out * vals
    return out


def multilinear_average(
    prob: MultilinearProblem,
    N: int,
    mode: GridMode = ALL_POINTS,
    tables: SieveTables | None = None,
    *,
    threads: int = 1,
) -> AverageReport:
    """Direct enumeration of prod_j f_j(L_j(m)) over mode-selected points."""
    _check_capacity(prob, N, tables, prob.forms)
    V = _product_grid(prob, N, tables)
    rep = _masked_average(V, N, prob.r, mode, threads)
    rep.meta["forms"] = [L.label() for L in prob.forms]
    rep.meta["degenerate_forms"] = prob.degenerate_forms
    return rep


def _masked_average(V: np.ndarray, N: int, r: int, mode: GridMode, threads: int) -> AverageReport:
    mask = mode.mask(N, r)
    sel = V if mask is None else V[mask]
    count = V.size if mask is None else int(mask.sum())
    if count == 0:
        raise EmptyDomainError(f"mode {mode.label()} selects no points in [{N}]^{r}")
    total = fixed_order_sum(sel, threads=threads)
    return AverageReport(
        N=N, r=r, mode=mode.label(), count=count, sum=total, average=total / count, meta={}
    )


def conjugate_paired_average(
    prob: MultilinearProblem,
    N: int,
    mode: GridMode = ALL_POINTS,
    tables: SieveTables | None = None,
    *,
    threads: int = 1,
) -> AverageReport:
    """Average of prod_j f_j(L_j(m)) conj(f_j)(L'_j(m)) over selected points;
    the conjugated factor sits at the paired form."""
    if len(prob.conjugate_pairs) != len(prob.specs):
        raise DomainError("conjugate_paired_average needs one form pair per function")
    all_forms = [L for pair in prob.conjugate_pairs for L in pair]
    _check_capacity(prob, N, tables, all_forms)
    axes = _coordinate_axes(N, prob.r)
    dtype = np.complex128 if any(s.is_complex for s in prob.specs) else np.float64
    V = np.ones((N,) * prob.r, dtype=dtype)
    for spec, (L, Lp) in zip(prob.specs, prob.conjugate_pairs):
        table = spec.value_table(tables)
        V = V * table[L.evaluate(*axes)]
        V = V * np.conj(table[Lp.evaluate(*axes)])
    rep = _masked_average(V, N, prob.r, mode, threads)
    rep.meta["forms"] = [[L.label(), Lp.label()] for L, Lp in prob.conjugate_pairs]
    return rep


def multilinear_constants(
    specs: Sequence[MultiplicativeSpec],
    r: int,
    tables: SieveTables,
    prime_cutoff: int = 10**6,
    series_cutoff: int = 10**6,
) -> tuple[PredictionResult, PredictionResult]:
    """The pair of conversion constants between full-grid and primitive
    averages: zeta(r) prod_p (1 - g(p)/p**r) and (1/zeta(r)) sum_n g(n)/n**r
    for the pointwise product g(p) = prod_j f_j(p)."""
    g = product_spec(list(specs))
    prim = primitive_constant(g, 1, r, tables, prime_cutoff)
    full = full_constant(g, 1, r, tables, series_cutoff)
    return prim, full


def convergence_probe(
    prob: MultilinearProblem,
    Ns: Sequence[int],
    mode: GridMode,
    tables: SieveTables,
    *,
    threads: int = 1,
) -> list[tuple[int, complex, float]]:
    """(N, average, Cauchy gap |avg(N) - avg(previous N)|) along an ascending
    sweep; data only, no convergence assertion."""
    Ns = [int(N) for N in Ns]
    if len(Ns) < 3:
        raise ParameterError("convergence probe needs at least three N values")
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ParameterError(f"probe Ns must be strictly ascending, got {Ns}")
    out = []
    prev = None
    for N in Ns:
        avg = multilinear_average(prob, N, mode, tables, threads=threads).average
        gap = float("nan") if prev is None else abs(avg - prev)
        out.append((N, avg, gap))
        prev = avg
    return out


# ---------------------------------------------------------------------------
# Exact paths
# ---------------------------------------------------------------------------


def _exact_value_tables(prob: MultilinearProblem, N: int, tables: SieveTables) -> list[list[Fraction]]:
    """Per-function exact Fraction tables up to each form's largest value on
    [N]^r, via the same multiplicative recursion as the float tables."""
    tabs = []
    for spec, L in zip(prob.specs, prob.forms):
        top = L.max_on_grid(N)
        if top > tables.limit:
            raise CapacityError(f"form values reach {top} but the sieve covers {tables.limit}")
        vals = [Fraction(0)] * (top + 1)
        if top >= 1:
            vals[1] = Fraction(1)
        spf = tables.spf
        for n in range(2, top + 1):
            p = int(spf[n])
            vals[n] = vals[n // p] * exact_prime_value(spec, p)
        tabs.append(vals)
    return tabs


def _exact_point_product(tabs, forms, point) -> Fraction:
    term = Fraction(1)
    for tab, L in zip(tabs, forms):
        term *= tab[int(L.evaluate(*point))]
    return term


def multilinear_average_exact(
    prob: MultilinearProblem,
    N: int,
    mode: GridMode = ALL_POINTS,
    tables: SieveTables | None = None,
) -> AverageReport:
    """Rational-arithmetic version of multilinear_average (real-valued
    functions only); sums and averages are exact Fractions."""
    tabs = _exact_value_tables(prob, N, tables)
    mask = mode.mask(N, prob.r)
    total = Fraction(0)
    count = 0
    for idx in np.ndindex(*(N,) * prob.r):
        if mask is not None and not mask[idx]:
            continue
        total += _exact_point_product(tabs, prob.forms, tuple(i + 1 for i in idx))
        count += 1
    return AverageReport(
        N=N,
        r=prob.r,
        mode=mode.label(),
        count=count,
        sum=total,
        average=total / count,
        meta={"exact": True},
    )


def primitive_transfer_sum(prob: MultilinearProblem, N: int, tables: SieveTables) -> Fraction:
    """sum_{d<=N} mu(d) (prod_j f_j(d)) * (full sum over [N/d]^r of the form
    product), in exact rational arithmetic.

    Equals the primitive-point sum of the form product exactly; this is the
    factored route that uses complete multiplicativity, distinct from the
    strided-view route of mobius_layer_sum."""
    tabs = _exact_value_tables(prob, N, tables)
    full_sum_by_q: dict[int, Fraction] = {}

    def full_sum(q: int) -> Fraction:
        hit = full_sum_by_q.get(q)
        if hit is None:
            hit = Fraction(0)
            for idx in np.ndindex(*(q,) * prob.r):
                hit += _exact_point_product(tabs, prob.forms, tuple(i + 1 for i in idx))
            full_sum_by_q[q] = hit
        return hit

    mu = tables.mu
    total = Fraction(0)
    for d in range(1, N + 1):
        md = int(mu[d])
        if md == 0:
            continue
        fd = Fraction(1)
        for spec in prob.specs:
            fd *= evaluate_exact(spec, d, tables)
        total += md * fd * full_sum(N // d)
    return total
