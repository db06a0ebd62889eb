"""Built-in verification suite: desk-scale runs of the exact identities and
cross-module consistency checks, used by the `verify` command."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import ergodic, gaussian, lattice, multfunc, predict
from .sieve import SieveTables, build_sieve


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_mobius_inversion(tables: SieveTables) -> CheckResult:
    rng = np.random.default_rng(1201)
    worst = None
    for r, nmax, count in ((2, 60, 12), (3, 24, 6)):
        for _ in range(count):
            n = int(rng.integers(1, nmax + 1))
            grid = rng.integers(-9, 10, size=(n,) * r).astype(np.int64)
            lhs = lattice.mobius_layer_sum(grid, n, r, tables)
            mask = lattice.gcd_grid(n, r) == 1
            rhs = int(grid[mask].sum(dtype=np.int64))
            if lhs != rhs:
                worst = (n, r, lhs, rhs)
    ok = worst is None
    return CheckResult("mobius_inversion_exact", ok, "all grids exact" if ok else f"mismatch {worst}")


def check_layer_decomposition(tables: SieveTables) -> CheckResult:
    rng = np.random.default_rng(1202)
    worst = None
    for r, nmax, count in ((2, 60, 12), (3, 24, 6)):
        for _ in range(count):
            n = int(rng.integers(1, nmax + 1))
            grid = rng.integers(-9, 10, size=(n,) * r).astype(np.int64)
            lhs = lattice.layer_decomposition(grid, n, r, tables)
            rhs = int(grid.sum(dtype=np.int64))
            if lhs != rhs:
                worst = (n, r, lhs, rhs)
    ok = worst is None
    return CheckResult("layer_decomposition_exact", ok, "all grids exact" if ok else f"mismatch {worst}")


def check_primitive_counts(tables: SieveTables) -> CheckResult:
    import math

    z24 = lattice.count_primitive(4, 2, tables)
    z32 = lattice.count_primitive(2, 3, tables)
    brute24 = sum(
        1 for m in range(1, 5) for n in range(1, 5) if math.gcd(m, n) == 1
    )
    brute32 = sum(
        1
        for m in range(1, 3)
        for n in range(1, 3)
        for k in range(1, 3)
        if math.gcd(math.gcd(m, n), k) == 1
    )
    nbig = 10**4
    ratio = lattice.count_primitive(nbig, 2, tables) / nbig**2
    ok = z24 == brute24 == 11 and z32 == brute32 == 7 and abs(ratio - 6 / np.pi**2) < 0.002
    return CheckResult(
        "primitive_counts",
        ok,
        f"Z_2(4)={z24}, Z_3(2)={z32}, Z_2(1e4)/1e8={ratio:.6f}",
    )


def check_gaussian_roundtrip(tables: SieveTables) -> CheckResult:
    bad = 0
    for m in range(1, 81):
        for n in range(1, 81):
            z = gaussian.GaussInt(m, n)
            if gaussian.factor_gaussian(z, tables).value() != z:
                bad += 1
    return CheckResult("gaussian_roundtrip", bad == 0, f"{bad} mismatches on the 80x80 grid")


def check_product_series_duality(tables: SieveTables) -> CheckResult:
    specs = [
        multfunc.one_spec(),
        multfunc.liouville_spec(),
        multfunc.split_agree_spec(),
        multfunc.constant_spec(0.5),
        multfunc.seeded_sign_spec(12345),
    ]
    cut = min(10**5, tables.limit)
    worst = -float("inf")
    for spec in specs:
        for k in (1, 2):
            ep = predict.euler_product(spec, k, 2, tables, cut)
            ds = predict.dirichlet_series(spec, k, 2, tables, cut)
            resid = abs(ep.value * ds.value - 1.0)
            budget = predict.combined_tail(ep, ds)
            worst = max(worst, resid - budget)
    ok = worst <= 0.0
    return CheckResult("product_series_duality", ok, f"max(residual - tail budget) = {worst:.3g}")


def check_ergodic_cross_module(tables: SieveTables) -> CheckResult:
    n = 200
    system = ergodic.CyclicRotation(2)
    fn = ergodic.CyclicTable((1, -1))
    rep = ergodic.omega_orbit_average(system, fn, 0, n, lattice.PRIMITIVE, tables)
    lam_grid = lattice.form_value_grid(multfunc.liouville_spec(), lattice.SUM_OF_SQUARES, n, tables)
    ref = lattice.grid_average(lam_grid, n, 2, lattice.PRIMITIVE, tables)
    ok = rep.sum == ref.sum and rep.count == ref.count and rep.average == ref.average
    return CheckResult(
        "ergodic_cross_module", ok, f"orbit sum {rep.sum} vs grid sum {ref.sum} over {rep.count} points"
    )


ALL_CHECKS: list[Callable[[SieveTables], CheckResult]] = [
    check_mobius_inversion,
    check_layer_decomposition,
    check_primitive_counts,
    check_gaussian_roundtrip,
    check_product_series_duality,
    check_ergodic_cross_module,
]


def run_suite(tables: SieveTables | None = None) -> list[CheckResult]:
    if tables is None:
        tables = build_sieve(10**6)
    return [check(tables) for check in ALL_CHECKS]
