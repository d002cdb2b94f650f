# tests/test_sampling.py
import numpy as np
import pytest
from scipy.stats import qmc

from core.errors import ArgumentError
from core.sampling import HALTON, LATIN_HYPERCUBE, SampleSet, first_primes, halton, latin_hypercube, radical_inverse


@pytest.mark.parametrize("index, base, expected", [(1, 2, 0.5), (3, 2, 0.75), (0, 7, 0.0), (1, 3, 1 / 3), (5, 3, 7 / 9)])
def test_radical_inverse(index, base, expected):
    assert radical_inverse(index, base) == pytest.approx(expected, abs=1e-15)


def test_radical_inverse_rejects_bad_input():
    with pytest.raises(ArgumentError):
        radical_inverse(3, 1)
    with pytest.raises(ArgumentError):
        radical_inverse(-1, 2)


def test_first_primes():
    assert first_primes(10) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_halton_small_cases():
    np.testing.assert_allclose(halton(3, 1).points[:, 0], [0.0, -0.5, 0.5], atol=1e-15)
    np.testing.assert_allclose(halton(1, 2).points[0], [0.0, -1 / 3], atol=1e-15)


def test_halton_skip_consistency():
    full = halton(20, 6, skip=0).points
    np.testing.assert_array_equal(halton(15, 6, skip=5).points, full[5:])


def test_halton_matches_scipy_unscrambled():
    reference = qmc.Halton(d=5, scramble=False).random(33)
    # scipy's unscrambled sequence starts at index 0
    np.testing.assert_allclose(halton(32, 5).points, 2.0 * reference[1:] - 1.0, atol=1e-14)


def test_halton_inside_cube():
    points = halton(200, 10).points
    assert points.shape == (200, 10)
    assert np.all(np.abs(points) <= 1.0)


def test_latin_hypercube_stratification():
    sample = latin_hypercube(4, 1, seed=3)
    coords = np.sort(sample.points[:, 0])
    lower = np.array([-1.0, -0.5, 0.0, 0.5])
    assert np.all(coords >= lower)
    assert np.all(coords <= lower + 0.5)


def test_latin_hypercube_every_dimension_stratified():
    count = 37
    points = latin_hypercube(count, 8, seed=11).points
    for d in range(8):
        strata = np.floor((points[:, d] + 1.0) / 2.0 * count).clip(0, count - 1)
        assert sorted(strata.astype(int)) == list(range(count))


def test_latin_hypercube_deterministic():
    a = latin_hypercube(16, 4, seed=5)
    b = latin_hypercube(16, 4, seed=5)
    c = latin_hypercube(16, 4, seed=6)
    np.testing.assert_array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)


def test_single_point_latin_hypercube():
    points = latin_hypercube(1, 3, seed=0).points
    assert points.shape == (1, 3)
    assert np.all(np.abs(points) <= 1.0)


def test_sample_set_header_regenerates():
    for sample in (halton(7, 3, skip=2), latin_hypercube(7, 3, seed=9)):
        restored = SampleSet.from_header(sample.header(), sample.points)
        np.testing.assert_array_equal(restored.regenerate().points, sample.points)
    assert halton(2, 2).kind == HALTON
    assert latin_hypercube(2, 2).kind == LATIN_HYPERCUBE
