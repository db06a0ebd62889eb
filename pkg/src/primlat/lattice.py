"""Lattice-point enumeration, empirical averages, and transfer identities.

The key exact identities, valid for every bounded b and every N:

    sum over primitive m in [N]^r of b(m)
        = sum_{d<=N} mu(d) * sum over m in [floor(N/d)]^r of b(d m)

    sum over m in [N]^r of b(m)
        = sum_{d<=N} sum over primitive m in [floor(N/d)]^r of b(d m)

Both follow from classifying points by gcd and Mobius inversion, with no
error term.  The truncated transforms specialize b = f(P(m,n)) for a
homogeneous form P of degree k, where f(P(dm, dn)) = f(d)**k f(P(m,n)):
their default "exact" weighting reproduces the identities at full depth
D = N, while the "idealized" weighting uses the 1/d**r factors and
carries the documented O(1/D) + O(log N / N) error terms.

Summation is chunked in fixed row-major order: worker threads may speed
up chunk sums, but the reduction order (hence every rounding) is a pure
function of the data shape, so results are thread-count invariant.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from .errors import (
    CapacityError,
    DomainError,
    EmptyDomainError,
    FormPositivityError,
    ParameterError,
    RangeError,
)
from .multfunc import MultiplicativeSpec, evaluate_power
from .sieve import SieveTables

_SUM_CHUNK = 1 << 16  # elements per reduction chunk (fixed, order-defining)


# ---------------------------------------------------------------------------
# Deterministic chunked summation
# ---------------------------------------------------------------------------


def fixed_order_sum(arr: np.ndarray, threads: int = 1):
    """Sum of arr with a reduction order fixed by the raveled layout.

    Chunks of _SUM_CHUNK elements are summed independently (numpy pairwise
    inside a chunk) and combined left to right by chunk index.  The result
    is identical for any thread count.  Integer arrays accumulate into
    Python ints, so they never overflow.
    """
    flat = np.ascontiguousarray(arr).ravel()
    n = flat.size
    if n == 0:
        return 0
    is_int = flat.dtype.kind in "iub"
    nchunks = (n + _SUM_CHUNK - 1) // _SUM_CHUNK

    def chunk_sum(i: int):
        part = flat[i * _SUM_CHUNK : (i + 1) * _SUM_CHUNK]
        s = part.sum(dtype=np.int64) if is_int else part.sum()
        return int(s) if is_int else s.item()

    if threads > 1 and nchunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(chunk_sum, range(nchunks)))
    else:
        parts = [chunk_sum(i) for i in range(nchunks)]
    total = parts[0]
    for s in parts[1:]:
        total = total + s
    return total


# ---------------------------------------------------------------------------
# Grid modes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridMode:
    """Selection of lattice points in [N]^r by a gcd condition."""

    kind: str
    param: int | None = None

    def __post_init__(self):
        if self.kind not in ("all", "primitive", "kfree_gcd", "fixed_gcd"):
            raise DomainError(f"unknown grid mode {self.kind!r}")
        if self.kind == "kfree_gcd":
            if self.param is None or self.param < 2:
                raise DomainError("kfree_gcd needs k >= 2")
        elif self.kind == "fixed_gcd":
            if self.param is None or self.param < 1:
                raise DomainError("fixed_gcd needs d >= 1")
        elif self.param is not None:
            raise DomainError(f"mode {self.kind!r} takes no parameter")

    def label(self) -> str:
        if self.param is None:
            return self.kind
        return f"{self.kind}({self.param})"

    def mask(self, N: int, r: int) -> np.ndarray | None:
        """Boolean selection mask over [N]^r, or None when all points pass."""
        if self.kind == "all":
            return None
        g = gcd_grid(N, r)
        if self.kind == "primitive":
            return g == 1
        if self.kind == "fixed_gcd":
            return g == self.param
        return kfree_table(N, self.param)[g]


ALL_POINTS = GridMode("all")
PRIMITIVE = GridMode("primitive")


def k_free_gcd(k: int) -> GridMode:
    return GridMode("kfree_gcd", int(k))


def fixed_gcd(d: int) -> GridMode:
    return GridMode("fixed_gcd", int(d))


def gcd_grid(N: int, r: int) -> np.ndarray:
    """gcd of the r coordinates over [N]^r (binary gcd ufunc, no sieve)."""
    if r < 2:
        raise DomainError(f"dimension r must be >= 2, got {r}")
    m = np.arange(1, N + 1, dtype=np.int64)
    g = np.gcd.outer(m, m)
    for _ in range(r - 2):
        g = np.gcd(g[..., None], m)
    return g


def kfree_table(N: int, k: int) -> np.ndarray:
    """kfree[n] is True when no prime power p**k divides n (index 0 unused)."""
    out = np.ones(N + 1, dtype=bool)
    p = 2
    while p**k <= N:
        step = p**k
        out[step::step] = False
        p += 1
    return out


# ---------------------------------------------------------------------------
# Homogeneous forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomogeneousForm:
    """P(x, y) = sum_j coeffs[j] * x**(degree-j) * y**j, integer coefficients.

    Homogeneity P(d x, d y) = d**degree P(x, y) holds by construction; the
    positivity requirement P >= 1 on probed grids is checked at evaluation
    time and violations abort with the offending point.
    """

    degree: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.degree < 1:
            raise DomainError(f"form degree must be >= 1, got {self.degree}")
        if len(self.coeffs) != self.degree + 1:
            raise DomainError(
                f"degree {self.degree} form needs {self.degree + 1} coefficients, got {len(self.coeffs)}"
            )
        if not any(self.coeffs):
            raise DomainError("form must have a nonzero coefficient")

    def evaluate(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        k = self.degree
        out = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
        for j, c in enumerate(self.coeffs):
            if c:
                out += c * x ** (k - j) * y**j
        return out

    def value_grid(self, N: int) -> np.ndarray:
        """P(m, n) over the full grid 1 <= m, n <= N, positivity-checked."""
        m = np.arange(1, N + 1, dtype=np.int64)
        vals = self.evaluate(m[:, None], m[None, :])
        if vals.min() < 1:
            bad = np.unravel_index(int(vals.argmin()), vals.shape)
            raise FormPositivityError((bad[0] + 1, bad[1] + 1), int(vals[bad]))
        return vals

    def label(self) -> str:
        return f"deg{self.degree}:{','.join(str(c) for c in self.coeffs)}"


SUM_OF_SQUARES = HomogeneousForm(2, (1, 0, 1))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

AVERAGE_CSV_HEADER = ["N", "r", "mode", "count", "sum", "average", "D", "residual_bound", "residual_observed"]


@dataclass
class AverageReport:
    """One finite-N empirical average over a selected point set."""

    N: int
    r: int
    mode: str
    count: int
    sum: Union[int, float, complex, Fraction]
    average: Union[float, complex, Fraction]
    meta: dict = field(default_factory=dict)

    def csv_row(self) -> list[str]:
        from .csvio import format_number

        return [
            str(self.N),
            str(self.r),
            self.mode,
            str(self.count),
            format_number(self.sum),
            format_number(self.average),
            str(self.meta.get("D", "")),
            format_number(self.meta["residual_bound"]) if "residual_bound" in self.meta else "",
            format_number(self.meta["residual_observed"]) if "residual_observed" in self.meta else "",
        ]


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------

GridFunction = Union[np.ndarray, Callable[..., np.ndarray]]


def grid_values(b: GridFunction, N: int, r: int) -> np.ndarray:
    """Materialize b over [N]^r; b is an (N,)*r array or a vectorized callable
    of r one-based coordinate arrays."""
    if N < 1:
        raise DomainError(f"grid side length must be >= 1, got {N}")
    if isinstance(b, np.ndarray):
        if b.shape != (N,) * r:
            raise DomainError(f"grid array has shape {b.shape}, expected {(N,) * r}")
        return b
    m = np.arange(1, N + 1, dtype=np.int64)
    axes = [m.reshape((1,) * i + (N,) + (1,) * (r - 1 - i)) for i in range(r)]
    vals = b(*axes)
    return np.broadcast_to(vals, (N,) * r)


def count_primitive(N: int, r: int, tables: SieveTables) -> int:
    """Number of points in [N]^r with coprime coordinates, as the exact
    Mobius sum of floor(N/d)**r.  Python integer arithmetic cannot overflow."""
    N = int(N)
    if r < 2:
        raise DomainError(f"dimension r must be >= 2, got {r}")
    if N < 1 or N > tables.limit:
        raise RangeError(f"N={N} outside sieve range 1..{tables.limit}")
    mu = tables.mu
    total = 0
    for d in range(1, N + 1):
        md = int(mu[d])
        if md:
            total += md * (N // d) ** r
    return total


def grid_average(
    b: GridFunction,
    N: int,
    r: int,
    mode: GridMode = ALL_POINTS,
    tables: SieveTables | None = None,
    *,
    threads: int = 1,
    exact: bool = False,
) -> AverageReport:
    """Direct enumeration average of b over the mode-selected points of [N]^r.

    With exact=True (integer-valued grids) the sum is an exact Python int
    and the average an exact Fraction.
    """
    V = grid_values(b, N, r)
    mask = mode.mask(N, r)
    if mask is None:
        sel = V
        count = V.size
    else:
        count = int(mask.sum())
        if count == 0:
            raise EmptyDomainError(f"mode {mode.label()} selects no points in [{N}]^{r}")
        sel = V[mask]
    total = fixed_order_sum(sel, threads=threads)
    if exact:
        if not isinstance(total, int):
            raise DomainError("exact mode needs an integer-valued grid")
        avg: Union[float, complex, Fraction] = Fraction(total, count)
    else:
        avg = total / count
    return AverageReport(
        N=N,
        r=r,
        mode=mode.label(),
        count=count,
        sum=total,
        average=avg,
        meta={"exact": exact},
    )


def _strided_view(V: np.ndarray, d: int) -> np.ndarray:
    idx = tuple(slice(d - 1, None, d) for _ in range(V.ndim))
    return V[idx]


def mobius_layer_sum(b: GridFunction, N: int, r: int, tables: SieveTables, *, threads: int = 1):
    """sum_{d<=N} mu(d) * sum_{m in [N/d]^r} b(d m); equals the primitive sum
    of b over [N]^r exactly, by Mobius inversion."""
    if N > tables.limit:
        raise RangeError(f"N={N} outside sieve range 1..{tables.limit}")
    V = grid_values(b, N, r)
    mu = tables.mu
    total = 0
    for d in range(1, N + 1):
        md = int(mu[d])
        if md == 0:
            continue
        total = total + md * fixed_order_sum(_strided_view(V, d), threads=threads)
    return total


def layer_decomposition(b: GridFunction, N: int, r: int, tables: SieveTables, *, threads: int = 1):
    """sum_{d<=N} sum over primitive m in [N/d]^r of b(d m); equals the full
    grid sum of b over [N]^r exactly (points classified by their gcd)."""
    if N > tables.limit:
        raise RangeError(f"N={N} outside sieve range 1..{tables.limit}")
    V = grid_values(b, N, r)
    prim = gcd_grid(N, r) == 1
    total = 0
    for d in range(1, N + 1):
        q = N // d
        view = _strided_view(V, d)
        sub = tuple(slice(0, q) for _ in range(r))
        total = total + fixed_order_sum(view[prim[sub]], threads=threads)
    return total


# ---------------------------------------------------------------------------
# Truncated transfer transforms (r = 2, b = f(P(m, n)))
# ---------------------------------------------------------------------------


class TransformResult(NamedTuple):
    value: Union[float, complex]
    residual: float
    meta: dict


def form_value_grid(
    spec: MultiplicativeSpec, form: HomogeneousForm, N: int, tables: SieveTables
) -> np.ndarray:
    """f(P(m, n)) over 1 <= m, n <= N via the spec's value table."""
    P = form.value_grid(N)
    pmax = int(P.max())
    if pmax > tables.limit:
        raise CapacityError(
            f"form values reach {pmax} but the sieve covers only {tables.limit}"
        )
    return spec.value_table(tables)[P]


def _block_sums(V: np.ndarray, N: int, D: int, mask: np.ndarray | None, threads: int):
    """Sums of V over the leading q x q blocks, q = floor(N/d), d = 1..D."""
    out = []
    for d in range(1, D + 1):
        q = N // d
        blk = V[:q, :q] if mask is None else V[:q, :q][mask[:q, :q]]
        out.append(fixed_order_sum(blk, threads=threads))
    return out


def truncated_primitive_transform(
    spec: MultiplicativeSpec,
    form: HomogeneousForm,
    N: int,
    D: int | None = None,
    tables: SieveTables = None,
    *,
    weights: str = "exact",
    threads: int = 1,
) -> TransformResult:
    """Approximate the normalized primitive sum of f(P(m,n)) from full-grid
    averages at scales N/d, weighted by mu(d) f(d)**k.

    weights="exact" uses floor(N/d)**2 / N**2 (the identity weights: at
    D = N the result equals the primitive sum / N**2 exactly, and the
    truncation error is rigorously below sum_{d>D} d**-2 < 1/D in the
    unit-bound case).  weights="idealized" uses 1/d**2 and additionally carries
    the O(log N / N) grid rounding term.  residual reports the observed
    gap to the directly enumerated reference.
    """
    N = int(N)
    D = N if D is None else int(D)
    if not 1 <= D <= N:
        raise ParameterError(f"truncation depth D={D} must satisfy 1 <= D <= N={N}")
    if weights not in ("exact", "idealized"):
        raise ParameterError(f"weights must be 'exact' or 'idealized', got {weights!r}")
    V = form_value_grid(spec, form, N, tables)
    k = form.degree
    mu = tables.mu
    blocks = _block_sums(V, N, D, None, threads)
    value = 0.0
    for d in range(1, D + 1):
        md = int(mu[d])
        if md == 0:
            continue
        fd = evaluate_power(spec, d, k, tables)
        q = N // d
        if weights == "exact":
            value = value + md * fd * (blocks[d - 1] / (N * N))
        else:
            value = value + md * fd * (blocks[d - 1] / (q * q)) / (d * d)
    prim_mask = gcd_grid(N, 2) == 1
    reference = fixed_order_sum(V[prim_mask], threads=threads) / (N * N)
    residual = abs(value - reference)
    meta = {
        "D": D,
        "N": N,
        "weights": weights,
        "reference": reference,
        "bound_trunc_term": 1.0 / D,
        "bound_grid_term": math.log(max(N, 2)) / N,
    }
    return TransformResult(value, residual, meta)


def truncated_full_transform(
    spec: MultiplicativeSpec,
    form: HomogeneousForm,
    N: int,
    D: int | None = None,
    tables: SieveTables = None,
    *,
    weights: str = "exact",
    threads: int = 1,
) -> TransformResult:
    """Reconstruct the full-grid average of f(P(m,n)) from primitive-point
    averages at scales N/d, weighted by f(d)**k.

    weights="exact" sums the primitive block sums divided by N**2 (at
    D = N this is the gcd-classification identity, exact).  weights="idealized"
    uses 1/(zeta(2) d**2) times the primitive block averages and carries
    the O(1/D) + O((log N)**2 / N) error terms.
    """
    from .predict import zeta

    N = int(N)
    D = N if D is None else int(D)
    if not 1 <= D <= N:
        raise ParameterError(f"truncation depth D={D} must satisfy 1 <= D <= N={N}")
    if weights not in ("exact", "idealized"):
        raise ParameterError(f"weights must be 'exact' or 'idealized', got {weights!r}")
    V = form_value_grid(spec, form, N, tables)
    k = form.degree
    prim_mask = gcd_grid(N, 2) == 1
    blocks = _block_sums(V, N, D, prim_mask, threads)
    value = 0.0
    z2 = zeta(2)
    for d in range(1, D + 1):
        fd = evaluate_power(spec, d, k, tables)
        q = N // d
        if weights == "exact":
            value = value + fd * (blocks[d - 1] / (N * N))
        else:
            zq = int(prim_mask[:q, :q].sum())
            value = value + fd * (blocks[d - 1] / zq) / (z2 * d * d)
    reference = fixed_order_sum(V, threads=threads) / (N * N)
    residual = abs(value - reference)
    meta = {
        "D": D,
        "N": N,
        "weights": weights,
        "reference": reference,
        "bound_trunc_term": 1.0 / D,
        "bound_grid_term": math.log(max(N, 2)) ** 2 / N,
    }
    return TransformResult(value, residual, meta)


def sweep(
    spec: MultiplicativeSpec,
    form: HomogeneousForm,
    Ns: Sequence[int],
    mode: GridMode,
    tables: SieveTables,
    *,
    threads: int = 1,
    exact: bool = False,
) -> list[AverageReport]:
    """grid_average of f(P(m,n)) at each N of an ascending sweep."""
    Ns = [int(N) for N in Ns]
    if not Ns:
        raise ParameterError("sweep needs at least one N")
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ParameterError(f"sweep Ns must be strictly ascending, got {Ns}")
    reports = []
    for N in Ns:
        V = form_value_grid(spec, form, N, tables)
        rep = grid_average(V, N, 2, mode, tables, threads=threads, exact=exact)
        rep.meta["spec"] = spec.name
        rep.meta["form"] = form.label()
        if spec.bound > 1.0:
            rep.meta["bound_above_one"] = True
        reports.append(rep)
    return reports


def fixed_gcd_partition(b: GridFunction, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Counts and sums of b over [N]^2 split by gcd(m, n) = d, d = 0..N.

    One bincount pass; entry d of the result equals the count/sum that
    grid_average would report for fixed_gcd(d)."""
    V = grid_values(b, N, 2)
    g = gcd_grid(N, 2).ravel()
    counts = np.bincount(g, minlength=N + 1)
    if np.iscomplexobj(V):
        sums = np.bincount(g, weights=V.real.ravel(), minlength=N + 1) + 1j * np.bincount(
            g, weights=V.imag.ravel(), minlength=N + 1
        )
    else:
        sums = np.bincount(g, weights=V.ravel().astype(np.float64), minlength=N + 1)
    return counts, sums
