import math

import mpmath
import pytest

from primlat import (
    DomainError,
    SingularityError,
    TailModeError,
    by_class_spec,
    consistency_check,
    constant_spec,
    coprime_two_squares_constant,
    dirichlet_series,
    euler_product,
    full_constant,
    full_two_squares_constant,
    gaussian_coprime_factor,
    liouville_spec,
    one_spec,
    primitive_constant,
    seeded_sign_spec,
    split_agree_spec,
    zeta,
)
from primlat.gaussian import GaussianMultSpec
from primlat.predict import combined_tail

CUT = 10**6


def corpus():
    return [
        one_spec(),
        liouville_spec(),
        split_agree_spec(),
        constant_spec(0.5),
        seeded_sign_spec(20240),
    ]


def test_zeta_reference_values():
    assert abs(zeta(2) - 1.644934066848226) < 1e-12
    assert abs(zeta(4) - 1.082323233711138) < 1e-12
    assert abs(zeta(3) - 1.202056903159594) < 1e-12
    with pytest.raises(DomainError):
        zeta(1)


def test_zeta_against_mpmath():
    mpmath.mp.dps = 30
    for r in range(2, 20):
        assert abs(zeta(r) - float(mpmath.zeta(r))) < 1e-12


def test_euler_product_examples(tables_big):
    ep = euler_product(one_spec(), 1, 2, tables_big, CUT)
    assert abs(ep.value - 6 / math.pi**2) <= ep.tail_bound
    assert ep.tail_kind == "rigorous"
    ep2 = euler_product(liouville_spec(), 2, 2, tables_big, CUT)
    assert abs(ep2.value - 6 / math.pi**2) <= ep2.tail_bound


def test_dirichlet_series_examples(tables_big):
    ds = dirichlet_series(one_spec(), 1, 2, tables_big, CUT)
    assert abs(ds.value - math.pi**2 / 6) <= ds.tail_bound
    # alternating-sign series: zeta(4)/zeta(2) = pi**2 / 15
    ds_lam = dirichlet_series(liouville_spec(), 1, 2, tables_big, CUT)
    assert abs(ds_lam.value - math.pi**2 / 15) <= ds_lam.tail_bound
    ds_lam2 = dirichlet_series(liouville_spec(), 2, 2, tables_big, CUT)
    assert abs(ds_lam2.value - zeta(2)) <= ds_lam2.tail_bound


def test_product_series_duality(tables_big):
    for spec in corpus():
        for k in (1, 2, 3):
            ep = euler_product(spec, k, 2, tables_big, CUT)
            ds = dirichlet_series(spec, k, 2, tables_big, CUT)
            resid = abs(ep.value * ds.value - 1.0)
            assert resid <= combined_tail(ep, ds) <= 3e-6


def test_primitive_and_full_constants(tables_big):
    assert abs(primitive_constant(one_spec(), 1, 2, tables_big, CUT).value - 1.0) < 3e-6
    assert abs(primitive_constant(liouville_spec(), 2, 2, tables_big, CUT).value - 1.0) < 3e-6
    assert abs(full_constant(one_spec(), 1, 2, tables_big, CUT).value - 1.0) < 3e-6
    assert abs(full_constant(liouville_spec(), 2, 2, tables_big, CUT).value - 1.0) < 3e-6
    # (6/pi**2) * (pi**2/15) = 2/5
    fc = full_constant(liouville_spec(), 1, 2, tables_big, CUT)
    assert abs(fc.value - 0.4) < 3e-6


def test_consistency_check(tables_big):
    # analytically zero; numerically bounded by the truncation tails
    for spec, k in ((one_spec(), 1), (liouville_spec(), 1), (constant_spec(0.5), 3)):
        resid = consistency_check(spec, k, 2, tables_big, CUT, CUT)
        pc = primitive_constant(spec, k, 2, tables_big, CUT)
        fc = full_constant(spec, k, 2, tables_big, CUT)
        assert resid <= combined_tail(pc, fc) <= 4e-6


def test_coprime_two_squares_examples(tables_big):
    assert coprime_two_squares_constant(one_spec(), tables_big, CUT).value == pytest.approx(1.0, abs=1e-12)
    res = coprime_two_squares_constant(split_agree_spec(), tables_big, CUT)
    assert abs(res.value - 1 / 3) < 1e-10  # every split factor is exactly 1
    lam = coprime_two_squares_constant(liouville_spec(), tables_big, CUT)
    assert lam.diverged_to_zero and lam.value == 0.0
    assert lam.tail_kind == "heuristic"


def test_coprime_two_squares_partial_products_decay(tables_big):
    # monotone decay of the Liouville partial products along cutoffs
    vals = []
    for cut in (10**3, 10**4, 10**5):
        res = coprime_two_squares_constant(liouville_spec(), tables_big, cut, drift_tol=math.inf)
        vals.append(math.exp(res.terms_log_sum))
    assert vals[0] > vals[1] > vals[2] > 0


def test_full_two_squares_examples(tables_big):
    assert full_two_squares_constant(one_spec(), tables_big, CUT).value == pytest.approx(1.0, abs=1e-12)
    res = full_two_squares_constant(split_agree_spec(), tables_big, CUT)
    assert abs(res.value - 1 / 3) < 1e-10  # prefactor 1/3, every product factor 1
    lam = full_two_squares_constant(liouville_spec(), tables_big, CUT)
    assert lam.diverged_to_zero and lam.value == 0.0


def test_two_squares_conversion_consistency(tables_big):
    # coprime constant = zeta(2) prod(1 - f(p)**2/p**2) * full constant,
    # the k = 2 conversion applied to the closed product form; the full
    # sieve range keeps the conversion product's truncation below 1e-8
    deep_cut = tables_big.limit
    for spec in (split_agree_spec(), constant_spec(0.5), by_class_spec(0.0, 1.0, -1.0)):
        full = full_two_squares_constant(spec, tables_big, deep_cut)
        conv = primitive_constant(spec, 2, 2, tables_big, deep_cut)
        target = coprime_two_squares_constant(spec, tables_big, deep_cut)
        if target.diverged_to_zero or full.diverged_to_zero:
            assert target.diverged_to_zero and full.diverged_to_zero
            continue
        assert abs(conv.value * full.value - target.value) < 1e-8


def test_two_squares_parity_cross_check(tables_big):
    # For f = 1 except f(2) = 0: coprime pairs with odd m**2 + n**2 have
    # density 2/3 (parities (odd, even), (even, odd) out of three coprime
    # classes), and the full grid has density 1/2.  Pins the p = 2 local
    # factor handling of both product formulas.
    spec = constant_spec(1.0, name="odd_indicator")
    spec.overrides[2] = 0.0
    cop = coprime_two_squares_constant(spec, tables_big, CUT)
    assert abs(cop.value - 2 / 3) < 1e-9
    full = full_two_squares_constant(spec, tables_big, CUT)
    assert abs(full.value - 1 / 2) < 1e-9


def test_divergence_drift_detection(tables_big):
    # f(p) = 1/2 on the split primes does not tend to 1, so the coprime
    # product diverges to zero even though the hard -40 threshold is far
    res = coprime_two_squares_constant(constant_spec(0.5), tables_big, CUT)
    assert res.diverged_to_zero and res.value == 0.0
    assert res.terms_log_sum > -40


def test_divergence_is_pure_function_of_inputs(tables_big):
    a = coprime_two_squares_constant(liouville_spec(), tables_big, CUT)
    b = coprime_two_squares_constant(liouville_spec(), tables_big, CUT)
    assert a.diverged_to_zero == b.diverged_to_zero
    assert a.terms_log_sum == b.terms_log_sum
    assert a.value == b.value


def test_monotone_rigorous_tails(tables_big):
    cuts = [10**4, 10**5, 10**6]
    for spec in (one_spec(), liouville_spec(), constant_spec(0.5)):
        ep_tails = [euler_product(spec, 1, 2, tables_big, c).tail_bound for c in cuts]
        assert ep_tails[0] >= ep_tails[1] >= ep_tails[2]
        ds_tails = [dirichlet_series(spec, 1, 2, tables_big, c).tail_bound for c in cuts]
        assert ds_tails[0] >= ds_tails[1] >= ds_tails[2]


def test_bound_gt_one_rejected_in_rigorous_mode(tables_big):
    wide = constant_spec(1.5, bound=1.5)
    with pytest.raises(TailModeError):
        euler_product(wide, 1, 2, tables_big, 10**4, tail="rigorous")
    res = euler_product(wide, 1, 2, tables_big, 10**4)  # auto downgrades
    assert res.tail_kind == "heuristic"


def test_singularity_errors(tables_big):
    f2_is_2 = constant_spec(1.0, bound=2.0)
    f2_is_2.overrides[2] = 2.0
    with pytest.raises(SingularityError):
        full_two_squares_constant(f2_is_2, tables_big, 10**4)


def test_gaussian_conversion_factor(tables_big):
    ones = GaussianMultSpec()
    assert abs(gaussian_coprime_factor(ones, tables_big, CUT).value - 1.0) < 3e-6
    lam_norm = GaussianMultSpec(norm_of=liouville_spec())
    # f(p) = lam(p**2) = 1, so the product collapses to 1/zeta(2)
    assert abs(gaussian_coprime_factor(lam_norm, tables_big, CUT).value - 1.0) < 3e-6
    one_norm = GaussianMultSpec(norm_of=one_spec())
    assert abs(gaussian_coprime_factor(one_norm, tables_big, CUT).value - 1.0) < 3e-6


def test_prediction_csv_row(tables_big):
    res = euler_product(one_spec(), 1, 2, tables_big, 10**4)
    row = res.csv_row("one.euler")
    assert row[0] == "one.euler"
    assert row[4] == "rigorous"
    assert row[5] == "false"
