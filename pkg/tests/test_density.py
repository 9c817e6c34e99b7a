import math
from itertools import permutations

import pytest

from primerace.density import (
    decomposition_check,
    delta_r_way,
    delta_three_way,
    delta_two_way,
)
from primerace.fields import multiquadratic
from primerace.gaussian import bvn_cdf, std_normal_cdf
from primerace.primes import int_above_exp, next_prime_1mod4
from primerace.race import RaceSpec

MQ = multiquadratic([5, 13])
ONE, S1, S2, S12 = (0, 0), (1, 0), (0, 1), (1, 1)


def spec_for(field, *classes, **kw):
    return RaceSpec(field=field, classes=tuple(classes), **kw)


def test_two_way_balanced_race():
    est = delta_two_way(spec_for(MQ, S1, S2))
    assert est.value == 0.5
    assert est.stderr == 0.0
    assert est.formula == "two-way"


def test_two_way_chebyshev_direction():
    est = delta_two_way(spec_for(MQ, ONE, S1))
    v = est.report.V[0]
    assert est.value == pytest.approx(std_normal_cdf(4 / math.sqrt(v)), rel=1e-14)
    assert est.value > 0.5
    assert est.error_diagnostic > 0


def test_two_way_complement():
    a = delta_two_way(spec_for(MQ, ONE, S1))
    b = delta_two_way(spec_for(MQ, S1, ONE))
    assert a.value + b.value == pytest.approx(1.0, abs=1e-15)


def test_two_way_class_count_guard():
    with pytest.raises(ValueError):
        delta_two_way(spec_for(MQ, ONE, S1, S2))
    with pytest.raises(ValueError):
        delta_three_way(spec_for(MQ, ONE, S1))


def test_three_way_zero_bias_matches_orthant():
    # non-identity classes have no square roots, so both biases vanish
    est = delta_three_way(spec_for(MQ, S1, S2, S12))
    rho = est.report.Delta[0, 1]
    assert est.report.B == pytest.approx([0.0, 0.0], abs=1e-15)
    assert est.value == pytest.approx(0.25 + math.asin(rho) / (2 * math.pi), rel=1e-14)
    exact = bvn_cdf(0.0, 0.0, rho)
    assert est.value == pytest.approx(exact, abs=5e-11)
    mc = delta_r_way(spec_for(MQ, S1, S2, S12))
    assert mc.value == pytest.approx(exact, abs=5e-11)


def test_three_way_small_bias_agreement():
    # large primes push the biases toward 0 where the linearization is honest
    p1 = next_prime_1mod4(int_above_exp(100.0))
    p2 = next_prime_1mod4(p1 + 1)
    field = multiquadratic([p1, p2])
    spec = spec_for(field, ONE, S1, S2)
    lin = delta_three_way(spec)
    full = delta_r_way(spec)
    assert abs(lin.report.B).max() < 0.15
    assert abs(lin.value - full.value) <= max(3 * full.stderr, 5e-3)
    assert lin.error_diagnostic > 0


def test_r_way_two_class_consistency():
    est = delta_r_way(spec_for(MQ, ONE, S1))
    two = delta_two_way(spec_for(MQ, ONE, S1))
    assert est.value == pytest.approx(two.value, abs=5e-11)
    assert est.formula == "r-way"


def test_r_way_full_group_race():
    est = delta_r_way(spec_for(MQ, ONE, S1, S2, S12), samples=2**14, shifts=8)
    assert 0 <= est.value <= 1
    assert est.stderr > 0
    assert est.error_diagnostic > 0


def test_permutation_sum_three_classes():
    total = 0.0
    for order in permutations([S1, S2, S12]):
        total += delta_three_way(spec_for(MQ, *order)).value
    assert total == pytest.approx(1.0, abs=1e-9)


def test_permutation_sum_four_classes():
    total, acc_sq = 0.0, 0.0
    for order in permutations([ONE, S1, S2, S12]):
        est = delta_r_way(spec_for(MQ, *order), samples=2**14, shifts=8, seed=7)
        total += est.value
        acc_sq += est.accuracy**2
    assert abs(total - 1.0) <= 3 * math.sqrt(acc_sq) + 1e-9


def test_decomposition_closed_forms():
    residual, resolution = decomposition_check(spec_for(MQ, ONE, S1), S2)
    assert abs(residual) <= 3 * resolution


def test_decomposition_monte_carlo():
    residual, resolution = decomposition_check(
        spec_for(MQ, ONE, S1, S2), S12, samples=2**14, shifts=8, seed=3
    )
    assert resolution > 0
    assert abs(residual) <= 3 * resolution


def test_decomposition_rejects_duplicate():
    with pytest.raises(ValueError):
        decomposition_check(spec_for(MQ, ONE, S1), S1)


def test_central_orders_monotone_response():
    values = []
    for order in range(3):
        spec = spec_for(MQ, S1, ONE, central_orders={"10": order, "11": order})
        values.append(delta_two_way(spec).value)
    assert values[0] > values[1] > values[2]


def test_estimates_stay_in_unit_interval():
    for classes in permutations([ONE, S1, S2], 3):
        est = delta_three_way(spec_for(MQ, *classes))
        assert 0.0 <= est.value <= 1.0
