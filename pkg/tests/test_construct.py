import math

import pytest

from primerace.construct import (
    Caps,
    ConstructionError,
    FamilyReport,
    build_b_dense_family,
    build_theorem_c_prefix,
    build_u_dense_family,
    moderacy_report,
    prime_density_step,
)
from primerace.fields import cyclotomic_subgroup, multiquadratic
from primerace.primes import is_prime, log_int
from primerace.race import RaceSpec, u_map


def test_step_at_one_half():
    cert = prime_density_step(5, 0.5)
    assert cert.theta == 1.0
    assert cert.primes == (13, 73)
    ratio = log_int(73) / log_int(5 * 13 * 73)
    assert cert.ratio == pytest.approx(ratio, rel=1e-14)
    assert abs(ratio - 0.5) <= math.log(2) / log_int(5 * 13)
    assert cert.holds


def test_step_certificates_recompute():
    for alpha in (0.3, 0.5, 0.8):
        cert = prime_density_step(5, alpha)
        prod = 5 * math.prod(cert.primes)
        ratio = log_int(cert.primes[-1]) / log_int(prod)
        bound = (cert.doublings + 1) * math.log(2) / log_int(prod // cert.primes[-1])
        assert abs(ratio - alpha) <= bound
        assert all(is_prime(p) and p % 4 == 1 for p in cert.primes)
        assert list(cert.primes) == sorted(cert.primes)


def test_step_alpha_near_one_is_short():
    cert = prime_density_step(5, 0.93)
    assert len(cert.primes) == 1
    assert cert.primes[0] > 5**10


def test_step_validation():
    with pytest.raises(ValueError):
        prime_density_step(5, 0.0)
    with pytest.raises(ValueError):
        prime_density_step(5, 1.0)
    with pytest.raises(ValueError):
        prime_density_step(4, 0.5)


def test_step_block_cap():
    with pytest.raises(ConstructionError, match="exhausted"):
        prime_density_step(5, 0.05)


def test_step_determinism():
    a = prime_density_step(7, 0.4)
    b = prime_density_step(7, 0.4)
    assert a == b


def test_u_dense_single_target_matches_field_u():
    fam = build_u_dense_family([0.5])
    assert fam.primes[0] == 5
    cert = fam.certificates[0]
    field = multiquadratic(fam.primes)
    G = field.group
    spec = RaceSpec(field=field, classes=(G.identity, (1,) + (0,) * (len(fam.primes) - 1)))
    u = u_map(spec)
    sigma_last = (0,) * (len(fam.primes) - 1) + (1,)
    assert abs(u[sigma_last]) == pytest.approx(cert.ratio, rel=1e-12)


def test_u_dense_two_targets():
    fam = build_u_dense_family([1 / 3, 2 / 3])
    assert list(fam.primes) == sorted(set(fam.primes))
    running = 1
    consumed = 1
    for cert, target in zip(fam.certificates, (1 / 3, 2 / 3)):
        running = math.prod(fam.primes[:consumed])
        assert cert.ell == running
        consumed += len(cert.primes)
        ratio = log_int(math.prod(fam.primes[:consumed])) and log_int(
            cert.primes[-1]
        ) / log_int(math.prod(fam.primes[:consumed]))
        assert cert.ratio == pytest.approx(ratio, rel=1e-12)
        assert abs(ratio - target) <= cert.bound
        assert cert.holds


def test_u_dense_empty():
    fam = build_u_dense_family([])
    assert fam.primes == (5,)
    assert fam.certificates == ()


def test_b_dense_single_target():
    fam = build_b_dense_family([2.0])
    cert = fam.certificates[0]
    assert cert.epsilon == pytest.approx(0.2)
    assert cert.lower < cert.log_last < cert.upper
    n = len(fam.primes)
    value = 2.0**n / log_int(math.prod(fam.primes))
    assert cert.value == pytest.approx(value, rel=1e-12)
    assert abs(value - 2.0) < cert.epsilon
    assert cert.doublings == 0


def test_b_dense_index_identity():
    fam = build_b_dense_family([2.0])
    field = multiquadratic(fam.primes)
    report = moderacy_report([field])[0]
    assert report.two_moderacy_index == pytest.approx(
        math.sqrt(2 * fam.certificates[0].value), rel=1e-12
    )


def test_b_dense_two_targets():
    fam = build_b_dense_family([2.0, 0.7])
    assert list(fam.primes) == sorted(set(fam.primes))
    for k, cert in enumerate(fam.certificates):
        assert cert.holds
        total = len(cert.existing) + len(cert.primes)
        value = 2.0**total / log_int(math.prod(cert.existing + cert.primes))
        assert abs(value - cert.target) < cert.epsilon


def test_b_dense_validation_and_empty():
    assert build_b_dense_family([]).primes == ()
    with pytest.raises(ValueError):
        build_b_dense_family([-1.0])
    with pytest.raises(ValueError):
        build_b_dense_family([1.0], epsilons=[2.0])
    with pytest.raises(ValueError):
        build_b_dense_family([1.0, 2.0], epsilons=[0.1])


def test_theorem_c_depth_two():
    cert = build_theorem_c_prefix(2)
    p1, p2 = cert.primes
    assert log_int(p1) / 4 > 4
    assert log_int(p1 * p2) / 8 > 16
    assert cert.holds
    fields = [multiquadratic(cert.primes[:1]), multiquadratic(cert.primes[:2])]
    for k, report in enumerate(moderacy_report(fields), start=1):
        assert report.two_moderacy_index < 2.0**-k


def test_theorem_c_empty_and_caps():
    assert build_theorem_c_prefix(0).primes == ()
    with pytest.raises(ConstructionError, match="bits"):
        build_theorem_c_prefix(3)
    with pytest.raises(ValueError):
        build_theorem_c_prefix(-1)


def test_moderacy_prime_cyclic_criterion_is_exactly_zero():
    fields = [
        cyclotomic_subgroup(7, [1, 6]),
        cyclotomic_subgroup(13, [1, 5, 8, 12]),
        cyclotomic_subgroup(11, [1, 10]),
    ]
    for report in moderacy_report(fields):
        assert report.uniform_criterion == 0.0
        assert report.r_g == 1
        assert all(0 <= u <= 1 for u in report.u_range)


def test_moderacy_single_quadratic():
    report = moderacy_report([multiquadratic([13])])[0]
    assert report.r_g == 2
    assert report.two_moderacy_index == pytest.approx(2 / math.sqrt(math.log(13)))
    assert report.u_range == (1.0,)
    assert report.uniform_criterion == 0.0


def test_moderacy_trend_on_u_dense_tower():
    fam = build_u_dense_family([0.6, 0.7])
    depths = [fam.primes[:k] for k in range(1, len(fam.primes) + 1)]
    reports = moderacy_report([multiquadratic(d) for d in depths])
    indices = [r.two_moderacy_index for r in reports]
    assert all(a > b for a, b in zip(indices, indices[1:]))
    for report in reports:
        assert max(report.u_range) >= 0.5


def test_family_report_validation():
    with pytest.raises(ValueError):
        FamilyReport(1, 1.0, 2, -0.1, 0.0, (0.5,))
    with pytest.raises(ValueError):
        FamilyReport(1, 1.0, 2, 0.1, 0.0, (1.5,))
