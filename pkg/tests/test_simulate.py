import numpy as np
import pytest

from primerace.density import delta_r_way, delta_three_way
from primerace.fields import multiquadratic
from primerace.race import RaceSpec, mean_E, variance_V
from primerace.simulate import (
    SimConfig,
    characteristic_function,
    empirical_cf,
    empirical_delta,
    sample_class_scores,
    sample_mu,
)
from primerace.zeros import ZERO_DATA, ZeroArchive, build_field_archive

MQ = multiquadratic([5, 13])
S1, S2 = (1, 0), (0, 1)


@pytest.fixture(scope="module")
def archive():
    return build_field_archive(MQ, 100.0)


def truncated(archive, height):
    entries = {k: v[v <= height] for k, v in archive.entries.items()}
    return ZeroArchive(entries, height, archive.provenance, archive.fingerprint)


def spec_at(archive, *classes):
    return RaceSpec(field=MQ, classes=tuple(classes), mode=ZERO_DATA, archive=archive)


def test_requires_zero_data_mode():
    spec = RaceSpec(field=MQ, classes=((0, 0), S1))
    with pytest.raises(ValueError, match="ZeroData"):
        sample_mu(spec, SimConfig(height=10.0, samples=10))


def test_archive_height_shortfall(archive):
    spec = spec_at(archive, (0, 0), S1)
    with pytest.raises(ValueError, match="below"):
        sample_mu(spec, SimConfig(height=150.0, samples=10))


def test_mean_and_variance_match(archive):
    spec = spec_at(archive, (0, 0), S1, S2)
    n = 120_000
    rows = sample_mu(spec, SimConfig(height=100.0, samples=n, seed=5))
    assert rows.shape == (n, 2)
    for j, t in enumerate(spec.race_vectors()):
        e, v = mean_E(spec, t), variance_V(spec, t)
        assert abs(rows[:, j].mean() - e) <= 4 * np.sqrt(v / n)
        assert abs(rows[:, j].var() - v) <= 5 * v * np.sqrt(8 / n)


def test_single_zero_coordinate_is_bounded_cosine():
    entries = {"10": np.array([6.0]), "01": np.array([]), "11": np.array([])}
    arch = ZeroArchive(entries, 10.0, "ingested", MQ.fingerprint())
    spec = spec_at(arch, (0, 0), S1)
    n = 40_000
    x = sample_mu(spec, SimConfig(height=10.0, samples=n, seed=1))[:, 0]
    amp = 1 / np.sqrt(0.25 + 36.0)
    centered = x - (-4.0)
    assert np.max(np.abs(centered)) <= 4 * amp + 1e-12
    # symmetric about the mean, and arcsine mass piles up near the edges
    assert abs(np.mean(centered < 0) - 0.5) <= 0.01
    edge = np.mean(np.abs(centered) > 0.99 * 4 * amp)
    assert abs(edge - 2 * np.arccos(0.99) / np.pi) <= 0.01
    assert abs(centered.var() - 8 * amp**2) <= 0.01


def test_characteristic_function_at_random_points(archive):
    arch = truncated(archive, 30.0)
    spec = spec_at(arch, (0, 0), S1, S2)
    rows = sample_mu(spec, SimConfig(height=30.0, samples=20_000, seed=3))
    rng = np.random.default_rng(11)
    for _ in range(20):
        x = rng.uniform(-1, 1, size=2)
        x /= max(1.0, np.linalg.norm(x))
        emp, spread = empirical_cf(rows, x)
        theo = characteristic_function(spec, 30.0, x)
        assert abs(emp - theo) <= 4 * spread + 1e-3


def test_truncation_variance_monotone(archive):
    spec = spec_at(archive, (0, 0), S1)
    variances = []
    for height in (25.0, 50.0, 100.0):
        rows = sample_mu(spec, SimConfig(height=height, samples=60_000, seed=7))
        variances.append(rows[:, 0].var())
    assert variances[0] <= variances[1] <= variances[2]


def test_seeded_determinism(archive):
    spec = spec_at(archive, S1, S2)
    config = SimConfig(height=50.0, samples=4_000, seed=42)
    a = sample_mu(spec, config)
    b = sample_mu(spec, config)
    assert np.array_equal(a, b)
    c = sample_mu(spec, SimConfig(height=50.0, samples=4_000, seed=43))
    assert not np.array_equal(a, c)


def test_empirical_delta_basics():
    ones = np.full((50, 3), -1.0)
    value, err = empirical_delta(ones)
    assert value == 1.0 and err == 0.0
    mixed = np.array([[-1.0, -1.0], [-1.0, 2.0], [1.0, -1.0], [-2.0, -3.0]])
    value, err = empirical_delta(mixed)
    assert value == 0.5
    assert err == pytest.approx(np.sqrt(0.25 / 4))
    with pytest.raises(ValueError):
        empirical_delta(np.empty((0, 2)))


def test_empirical_matches_linearized_density(archive):
    # unbiased tuple: the linearized formula is in regime and exact for B = 0
    spec = spec_at(archive, S1, S2, (1, 1))
    rows = sample_mu(spec, SimConfig(height=100.0, samples=200_000, seed=2))
    value, err = empirical_delta(rows)
    lin = delta_three_way(spec)
    assert abs(value - lin.value) <= 0.02


def test_empirical_matches_gaussian_orthant_when_biased(archive):
    # identity class gives |B| near 2; only the full orthant formula applies
    spec = spec_at(archive, (0, 0), S1, S2)
    rows = sample_mu(spec, SimConfig(height=100.0, samples=200_000, seed=2))
    value, err = empirical_delta(rows)
    assert delta_three_way(spec).error_diagnostic > 1.0
    full = delta_r_way(spec, samples=1 << 14, seed=9)
    assert abs(value - full.value) <= 0.02 + 3 * err


def test_class_scores_reproduce_race_laws(archive):
    arch = truncated(archive, 50.0)
    n = 80_000
    scores, elements = sample_class_scores(MQ, arch, 50.0, n, seed=13)
    assert scores.shape == (n, 4)
    idx = {g: i for i, g in enumerate(elements)}
    # column means are minus the square-counting function
    assert abs(scores[:, idx[(0, 0)]].mean() + 4.0) <= 4 * np.sqrt(scores[:, 0].var() / n)
    for g in (S1, S2, (1, 1)):
        assert abs(scores[:, idx[g]].mean()) <= 5 * np.sqrt(scores[:, idx[g]].var() / n)
    # differences of columns carry the race vector law
    spec = spec_at(arch, (0, 0), S1)
    t = spec.race_vectors()[0]
    diff = scores[:, idx[(0, 0)]] - scores[:, idx[S1]]
    v = variance_V(spec, t)
    assert abs(diff.mean() - mean_E(spec, t)) <= 4 * np.sqrt(v / n)
    assert abs(diff.var() - v) <= 5 * v * np.sqrt(8 / n)
    # ordering fractions agree with a direct three-way sample
    direct = sample_mu(spec_at(arch, (0, 0), S1, S2), SimConfig(50.0, n, seed=14))
    d_direct, e1 = empirical_delta(direct)
    d_scores, e2 = empirical_delta(
        np.stack(
            [
                scores[:, idx[(0, 0)]] - scores[:, idx[S1]],
                scores[:, idx[S1]] - scores[:, idx[S2]],
            ],
            axis=1,
        )
    )
    assert abs(d_direct - d_scores) <= 4 * (e1 + e2)


def test_class_scores_height_check(archive):
    with pytest.raises(ValueError, match="height"):
        sample_class_scores(MQ, truncated(archive, 20.0), 50.0, 10)
