import cmath
import math

import numpy as np
import pytest

from primlat import (
    CapacityError,
    CircleRotation,
    CyclicRotation,
    CyclicTable,
    DomainError,
    LinearForm,
    MultiplicativeFlow,
    PRIMITIVE,
    ALL_POINTS,
    SUM_OF_SQUARES,
    TrigPolynomial,
    fixed_gcd,
    flow_pair_average,
    form_value_grid,
    grid_average,
    integral,
    k_free_gcd,
    liouville_spec,
    omega_orbit_average,
)
from primlat.ergodic import SQRT2_MINUS_1


def trig(coeffs):
    return TrigPolynomial.from_dict(coeffs)


def test_integral_examples():
    assert integral(CircleRotation(0.3), trig({0: 0.7, 2: 1.0})) == 0.7
    assert integral(CyclicRotation(2), CyclicTable((1, 0))) == 0.5
    assert integral(CircleRotation(0.3), trig({1: 1.0})) == 0


def test_integral_type_errors():
    with pytest.raises(TypeError):
        integral(CircleRotation(0.3), CyclicTable((1, 0)))
    with pytest.raises(TypeError):
        integral(CyclicRotation(3), CyclicTable((1, 0)))  # wrong length
    with pytest.raises(TypeError):
        integral(CyclicRotation(2), trig({0: 1.0}))


def test_constant_function_gives_exactly_one(tables_small):
    fn = trig({0: 1.0})
    for mode in (ALL_POINTS, PRIMITIVE, k_free_gcd(2), fixed_gcd(3)):
        rep = omega_orbit_average(CircleRotation(SQRT2_MINUS_1), fn, 0.25, 50, mode, tables_small)
        assert rep.average == 1.0
        assert rep.meta["gap"] == 0.0


def test_constant_value_c(tables_small):
    fn = trig({0: 2.5 + 0.5j})
    rep = omega_orbit_average(CircleRotation(0.1), fn, 0.0, 30, PRIMITIVE, tables_small)
    assert rep.average == 2.5 + 0.5j


def test_fixed_gcd_variant_reduces_to_primitive(tables_big):
    # pairs with gcd exactly 2 are 2 * (coprime pairs of half size), and
    # Omega(m**2 + n**2) shifts by Omega(4) = 2 there, preserving parity:
    # the fixed_gcd(2) orbit average equals the primitive average at N/2,
    # summand for summand
    n = 240
    system = CyclicRotation(2)
    fn = CyclicTable((1, -1))
    scaled = omega_orbit_average(system, fn, 0, n, fixed_gcd(2), tables_big)
    half = omega_orbit_average(system, fn, 0, n // 2, PRIMITIVE, tables_big)
    assert scaled.sum == half.sum
    assert scaled.count == half.count
    assert scaled.average == half.average


def test_cyclic_matches_liouville_grid(tables_big):
    n = 300
    rep = omega_orbit_average(CyclicRotation(2), CyclicTable((1, -1)), 0, n, PRIMITIVE, tables_big)
    V = form_value_grid(liouville_spec(), SUM_OF_SQUARES, n, tables_big)
    ref = grid_average(V, n, 2, PRIMITIVE, tables_big)
    assert rep.sum == ref.sum
    assert rep.count == ref.count
    assert rep.average == ref.average  # bit-identical: same integers divided


def test_linearity_in_test_function(tables_small):
    rng = np.random.default_rng(12)
    system = CircleRotation(SQRT2_MINUS_1)
    n = 40
    for _ in range(5):
        c1 = {j: complex(*rng.normal(size=2)) for j in range(-2, 3)}
        c2 = {j: complex(*rng.normal(size=2)) for j in range(-2, 3)}
        a, b = rng.normal(), rng.normal()
        combo = {j: a * c1.get(j, 0) + b * c2.get(j, 0) for j in range(-2, 3)}
        r1 = omega_orbit_average(system, trig(c1), 0.1, n, PRIMITIVE, tables_small).average
        r2 = omega_orbit_average(system, trig(c2), 0.1, n, PRIMITIVE, tables_small).average
        rc = omega_orbit_average(system, trig(combo), 0.1, n, PRIMITIVE, tables_small).average
        assert abs(rc - (a * r1 + b * r2)) < 1e-12


def test_rotation_invariance_of_integral():
    fn = trig({0: 0.7, 1: 2.0, -3: 1.5j})
    shifted = fn.shifted(SQRT2_MINUS_1)
    assert shifted.coefficient(0) == fn.coefficient(0)
    for j in (1, -3):
        assert abs(abs(shifted.coefficient(j)) - abs(fn.coefficient(j))) < 1e-12


def test_capacity_error(tables_small):
    with pytest.raises(CapacityError):
        omega_orbit_average(CircleRotation(0.5), trig({0: 1.0}), 0.0, 5000, ALL_POINTS, tables_small)


def test_circle_gap_shrinks(tables_big, oracle_fixtures):
    # Birkhoff target is 0; no rate is asserted, only the measured
    # monotone envelope over a dyadic sweep plus a coarse size check
    fix = oracle_fixtures["circle_rotation_gap"]
    fn = trig({1: 1.0})
    gaps = []
    for n in (500, 1000, 2000):
        rep = omega_orbit_average(CircleRotation(fix["alpha"]), fn, 0.0, n, PRIMITIVE, tables_big)
        gaps.append(abs(rep.average))
    assert gaps[0] < 0.05
    assert gaps[0] > gaps[1] > gaps[2]


# -- multiplicative flow -----------------------------------------------------


def test_flow_homomorphism():
    flow = MultiplicativeFlow(SQRT2_MINUS_1)
    rng = np.random.default_rng(13)
    for _ in range(1000):
        m = int(rng.integers(1, 1001))
        n = int(rng.integers(1, 1001))
        x0 = float(rng.random())
        direct = flow.position(m * n, x0)
        composed = flow.position(m, float(flow.position(n, x0)))
        gap = abs(float(direct) - float(composed))
        assert min(gap, 1 - gap) < 1e-10  # circle distance


def test_flow_identity_at_one():
    flow = MultiplicativeFlow(0.77)
    assert float(flow.position(1, 0.3)) == pytest.approx(0.3, abs=1e-15)


def test_flow_pair_average_constants(tables_small):
    flow = MultiplicativeFlow(1.0)
    forms = (LinearForm((1, 0)), LinearForm((0, 1)))
    rep = flow_pair_average(flow, trig({0: 1.0}), trig({0: 1.0}), forms, 50, ALL_POINTS, tables_small)
    assert rep.average == 1.0
    # F has no frequency matched by G: every term dies
    rep = flow_pair_average(flow, trig({1: 1.0}), trig({0: 1.0}), forms, 50, ALL_POINTS, tables_small)
    assert rep.average == 0.0


def test_flow_pair_average_oracle(tables_small):
    # F = e^{2 pi i x}, G = conj, L = m, L' = n, alpha = 1:
    # inner integral = e^{2 pi i log(m/n)}; direct double-sum oracle
    n = 60
    flow = MultiplicativeFlow(1.0)
    forms = (LinearForm((1, 0)), LinearForm((0, 1)))
    rep = flow_pair_average(flow, trig({1: 1.0}), trig({-1: 1.0}), forms, n, ALL_POINTS, tables_small)
    direct = 0j
    for m in range(1, n + 1):
        for k in range(1, n + 1):
            direct += cmath.exp(2j * math.pi * math.log(m / k))
    direct /= n * n
    assert abs(rep.average - direct) < 1e-9


def test_flow_pair_form_products(tables_small):
    # two forms on each side multiply into the flow index
    flow = MultiplicativeFlow(0.5)
    left = [LinearForm((1, 0)), LinearForm((0, 1))]
    right = [LinearForm((1, 1))]
    rep = flow_pair_average(flow, trig({1: 1.0}), trig({-1: 1.0}), (left, right), 30, PRIMITIVE, tables_small)
    direct = 0j
    count = 0
    for m in range(1, 31):
        for k in range(1, 31):
            if math.gcd(m, k) != 1:
                continue
            direct += cmath.exp(2j * math.pi * 0.5 * (math.log(m * k) - math.log(m + k)))
            count += 1
    assert abs(rep.average - direct / count) < 1e-9
    assert rep.meta["independence"] == "user-asserted"


def test_flow_pair_rejects_non_trig_functions(tables_small):
    flow = MultiplicativeFlow(1.0)
    with pytest.raises(TypeError):
        flow_pair_average(
            flow,
            CyclicTable((1, -1)),
            trig({0: 1.0}),
            (LinearForm((1, 0)), LinearForm((0, 1))),
            10,
            ALL_POINTS,
            tables_small,
        )


def test_linear_form_validation():
    with pytest.raises(DomainError):
        LinearForm((0, 0))
    with pytest.raises(DomainError):
        LinearForm((1, -1))
