import math
from fractions import Fraction

import numpy as np
import pytest

from primlat import (
    ALL_POINTS,
    PRIMITIVE,
    DomainError,
    LinearForm,
    MultilinearProblem,
    ParameterError,
    conjugate_paired_average,
    constant_spec,
    convergence_probe,
    evaluate,
    liouville_spec,
    mobius_layer_sum,
    multilinear_average,
    multilinear_average_exact,
    multilinear_constants,
    one_spec,
    primitive_constant,
    full_constant,
    primitive_transfer_sum,
    product_spec,
    seeded_phase_spec,
    split_agree_spec,
)
from primlat.predict import combined_tail

LX = LinearForm((1, 0))
LY = LinearForm((0, 1))
LSUM = LinearForm((1, 1))


def test_all_ones(tables_small):
    prob = MultilinearProblem(specs=(one_spec(), one_spec()), forms=(LX, LY), r=2)
    rep = multilinear_average(prob, 40, ALL_POINTS, tables_small)
    assert rep.average == 1.0


def test_lengths_must_agree():
    with pytest.raises(DomainError):
        MultilinearProblem(specs=(one_spec(),), forms=(LX, LY), r=2)
    with pytest.raises(DomainError):
        MultilinearProblem(specs=(one_spec(),), forms=(LinearForm((1, 0, 1)),), r=2)


def test_separability_exact(tables_small):
    # coordinate forms factor into the product of 1-dimensional averages
    lam = liouville_spec()
    for N in (17, 60, 121):
        prob = MultilinearProblem(specs=(lam, lam), forms=(LX, LY), r=2)
        rep = multilinear_average_exact(prob, N, ALL_POINTS, tables_small)
        col = sum(Fraction(evaluate(lam, m, tables_small)) for m in range(1, N + 1))
        assert rep.sum == col * col
        assert rep.average == (col / N) * (col / N)


def test_separability_float_matches_exact(tables_small):
    lam = liouville_spec()
    prob = MultilinearProblem(specs=(lam, lam), forms=(LX, LY), r=2)
    for N in (30, 75):
        fast = multilinear_average(prob, N, ALL_POINTS, tables_small)
        slow = multilinear_average_exact(prob, N, ALL_POINTS, tables_small)
        assert abs(fast.average - float(slow.average)) < 1e-12


def test_hand_enumeration_sum_form(tables_small):
    # f = split_agree on m + n over [3]^2: values at 2..6 weighted by
    # multiplicity 1,2,3,2,1
    f2 = split_agree_spec()
    prob = MultilinearProblem(specs=(f2,), forms=(LSUM,), r=2)
    rep = multilinear_average_exact(prob, 3, ALL_POINTS, tables_small)
    vals = {s: evaluate(f2, s, tables_small) for s in range(2, 7)}
    expected = sum({2: 1, 3: 2, 4: 3, 5: 2, 6: 1}[s] * Fraction(vals[s]) for s in range(2, 7))
    assert rep.sum == expected == 3
    assert rep.average == Fraction(3, 9)


def test_transfer_identity_exact(tables_small):
    lam = liouville_spec()
    f2 = split_agree_spec()
    half = constant_spec(0.5)
    cases = [
        ((lam,), (LSUM,), 60),
        ((f2, lam), (LX, LY), 40),
        ((half, f2, lam), (LX, LY, LSUM), 25),
    ]
    for specs, forms, N in cases:
        prob = MultilinearProblem(specs=specs, forms=forms, r=2)
        factored = primitive_transfer_sum(prob, N, tables_small)
        direct = multilinear_average_exact(prob, N, PRIMITIVE, tables_small)
        assert factored == direct.sum


def test_transfer_matches_strided_inversion(tables_small):
    # third route: generic Mobius layer sum on the materialized grid
    f2 = split_agree_spec()
    N = 48
    prob = MultilinearProblem(specs=(f2,), forms=(LSUM,), r=2)
    factored = primitive_transfer_sum(prob, N, tables_small)
    m = np.arange(1, N + 1, dtype=np.int64)
    V = f2.value_table(tables_small)[m[:, None] + m[None, :]].astype(np.int64)
    strided = mobius_layer_sum(V, N, 2, tables_small)
    assert factored == strided


def test_conjugate_paired_real_equals_doubled(tables_small):
    lam = liouville_spec()
    prob_paired = MultilinearProblem(
        specs=(lam,), forms=(LX,), r=2, conjugate_pairs=((LX, LY),)
    )
    rep = conjugate_paired_average(prob_paired, 35, ALL_POINTS, tables_small)
    prob_double = MultilinearProblem(specs=(lam, lam), forms=(LX, LY), r=2)
    ref = multilinear_average(prob_double, 35, ALL_POINTS, tables_small)
    assert abs(rep.average - ref.average) < 1e-12


def test_conjugate_paired_unimodular_same_form(tables_small):
    phase = seeded_phase_spec(5)
    prob = MultilinearProblem(specs=(phase,), forms=(LX,), r=2, conjugate_pairs=((LX, LX),))
    rep = conjugate_paired_average(prob, 30, ALL_POINTS, tables_small)
    assert abs(rep.average - 1.0) < 1e-12


def test_conjugate_paired_seeded_phase_fixture(tables_small, oracle_fixtures):
    fix = oracle_fixtures["paired_seeded_phase"]
    phase = seeded_phase_spec(fix["seed"])
    prob = MultilinearProblem(
        specs=(phase,), forms=(LX,), r=2, conjugate_pairs=((LX, LY),)
    )
    rep = conjugate_paired_average(prob, fix["N"], ALL_POINTS, tables_small)
    assert abs(rep.average - complex(fix["re"], fix["im"])) < 1e-11


def test_multilinear_constants(tables_big):
    prim, full = multilinear_constants([one_spec(), one_spec()], 2, tables_big, 10**5, 10**5)
    assert abs(prim.value - 1.0) < 1e-4
    assert abs(full.value - 1.0) < 1e-4
    # two Liouville factors multiply to the constant one function
    prim, full = multilinear_constants([liouville_spec(), liouville_spec()], 2, tables_big, 10**5, 10**5)
    assert abs(prim.value - 1.0) < 1e-4
    assert abs(full.value - 1.0) < 1e-4
    # delegation: product function matches the direct constants
    g = product_spec([constant_spec(0.5)])
    prim2 = primitive_constant(g, 1, 2, tables_big, 10**5)
    full2 = full_constant(g, 1, 2, tables_big, 10**5)
    prim3, full3 = multilinear_constants([constant_spec(0.5)], 2, tables_big, 10**5, 10**5)
    assert prim2.value == prim3.value
    assert full2.value == full3.value


def test_constants_duality(tables_big):
    for specs in ([liouville_spec(), split_agree_spec()], [constant_spec(0.5)]):
        prim, full = multilinear_constants(specs, 2, tables_big)
        resid = abs(prim.value * full.value - 1.0)
        assert resid <= combined_tail(prim, full)


def test_empty_product_is_one(tables_small):
    prob = MultilinearProblem(specs=(), forms=(), r=2)
    a = multilinear_average(prob, 20, ALL_POINTS, tables_small)
    b = multilinear_average(prob, 20, PRIMITIVE, tables_small)
    assert a.average == 1.0 == b.average


def test_degenerate_form_flagged(tables_small):
    prob = MultilinearProblem(specs=(one_spec(),), forms=(LX,), r=2)
    rep = multilinear_average(prob, 10, ALL_POINTS, tables_small)
    assert rep.meta["degenerate_forms"] is True
    prob_full = MultilinearProblem(specs=(one_spec(),), forms=(LSUM,), r=2)
    rep = multilinear_average(prob_full, 10, ALL_POINTS, tables_small)
    assert rep.meta["degenerate_forms"] is False


def test_convergence_probe_fixture(tables_small, oracle_fixtures):
    fix = oracle_fixtures["convergence_probes"]
    lam = liouville_spec()
    prob = MultilinearProblem(specs=(lam,), forms=(LX,), r=2)
    rows = convergence_probe(prob, fix["Ns"], ALL_POINTS, tables_small)
    assert [n for n, _, _ in rows] == fix["Ns"]
    for (_, avg, _), expected in zip(rows, fix["liouville_coordinate"]):
        assert abs(avg - expected) < 1e-12
    assert math.isnan(rows[0][2])
    assert rows[-1][2] < rows[1][2]  # gaps settle along the recorded sweep

    f2 = split_agree_spec()
    prob2 = MultilinearProblem(specs=(f2,), forms=(LSUM,), r=2)
    rows2 = convergence_probe(prob2, fix["Ns"], ALL_POINTS, tables_small)
    for (_, avg, _), expected in zip(rows2, fix["split_agree_sum_form"]):
        assert abs(avg - expected) < 1e-12


def test_probe_needs_three_points(tables_small):
    prob = MultilinearProblem(specs=(one_spec(),), forms=(LX,), r=2)
    with pytest.raises(ParameterError):
        convergence_probe(prob, [10, 20], ALL_POINTS, tables_small)


def test_probe_constant_gaps_zero(tables_small):
    prob = MultilinearProblem(specs=(one_spec(),), forms=(LSUM,), r=2)
    rows = convergence_probe(prob, [10, 20, 30], ALL_POINTS, tables_small)
    assert rows[1][2] == 0.0 and rows[2][2] == 0.0


def test_kfree_mode_on_multilinear(tables_small):
    from primlat import k_free_gcd
    from primlat.lattice import gcd_grid, kfree_table

    lam = liouville_spec()
    prob = MultilinearProblem(specs=(lam,), forms=(LSUM,), r=2)
    n = 40
    rep = multilinear_average(prob, n, k_free_gcd(2), tables_small)
    g = gcd_grid(n, 2)
    mask = kfree_table(n, 2)[g]
    m = np.arange(1, n + 1, dtype=np.int64)
    V = lam.value_table(tables_small)[m[:, None] + m[None, :]]
    assert rep.count == int(mask.sum())
    assert abs(rep.average - V[mask].sum() / mask.sum()) < 1e-12


def test_r3_multilinear(tables_small):
    lam = liouville_spec()
    forms = (LinearForm((1, 0, 0)), LinearForm((0, 1, 1)))
    prob = MultilinearProblem(specs=(lam, lam), forms=forms, r=3)
    rep = multilinear_average(prob, 12, PRIMITIVE, tables_small)
    # oracle: direct triple loop
    total = 0.0
    count = 0
    for a in range(1, 13):
        for b in range(1, 13):
            for c in range(1, 13):
                if math.gcd(math.gcd(a, b), c) != 1:
                    continue
                total += evaluate(lam, a, tables_small) * evaluate(lam, b + c, tables_small)
                count += 1
    assert rep.count == count
    assert abs(rep.average - total / count) < 1e-12
