import numpy as np
import pytest

from mfstable.errors import CapacityError, DomainError, PathRangeError
from mfstable.filters import FilterSeq, binomial_filter, discrete_variations, verify_moments
from mfstable.sim import SamplePath


def test_binomial_coefficients():
    assert binomial_filter(0).coefficients == (-1.0, 1.0)
    assert binomial_filter(1).coefficients == (1.0, -2.0, 1.0)
    assert binomial_filter(2).coefficients == (-1.0, 3.0, -3.0, 1.0)
    f = binomial_filter(5)
    assert (f.K, f.L) == (6, 5)


@pytest.mark.parametrize("L", range(0, 21))
def test_binomial_moments(L):
    rep = verify_moments(binomial_filter(L))
    assert all(m == 0 for m in rep.moments[:-1])
    assert rep.moments[-1] != 0
    assert rep.ok


def test_binomial_limits():
    with pytest.raises(CapacityError):
        binomial_filter(21)
    with pytest.raises(DomainError):
        binomial_filter(-1)


def test_from_coefficients_checks_moments():
    f = FilterSeq.from_coefficients([1, -2, 1], L=1)
    assert f.K == 2
    with pytest.raises(DomainError):
        FilterSeq.from_coefficients([1, -2, 1], L=2)
    with pytest.raises(DomainError):
        FilterSeq.from_coefficients([1, -1, 0.5], L=0)
    with pytest.raises(DomainError):
        FilterSeq.from_coefficients([1.0], L=0)


def test_non_integer_filter_moments():
    # a Daubechies-like 4-tap high-pass with one vanishing moment
    s3 = np.sqrt(3.0)
    g = np.array([1 - s3, -(3 - s3), 3 + s3, -(1 + s3)]) / (4 * np.sqrt(2))
    f = FilterSeq.from_coefficients(g, L=1)
    assert verify_moments(f).ok


def test_reversed():
    f = binomial_filter(3)
    assert f.reversed().coefficients == tuple(reversed(f.coefficients))


def _path(values, n=10, t_start=0.0):
    return SamplePath(n, t_start, np.asarray(values, dtype=float))


def test_variations_kill_polynomials():
    t = np.arange(0, 41) / 40
    for L in range(0, 5):
        f = binomial_filter(L)
        for deg in range(L + 1):
            d = discrete_variations(_path(3.0 * t**deg - 1.0, n=40), f, range(0, 40 - f.K))
            assert np.max(np.abs(d)) < 1e-12


def test_variations_values_and_offset():
    f = binomial_filter(0)
    p = _path([0.0, 1.0, 4.0, 9.0], n=10, t_start=0.5)
    assert p.i_start == 5
    np.testing.assert_array_equal(discrete_variations(p, f, [5, 6, 7]), [1.0, 3.0, 5.0])


def test_variations_out_of_range_names_k():
    f = binomial_filter(1)
    p = _path(np.arange(5.0))
    with pytest.raises(PathRangeError) as exc:
        discrete_variations(p, f, [0, 1, 2, 3])
    assert exc.value.k == 3
    with pytest.raises(PathRangeError) as exc:
        discrete_variations(p, f, [-1])
    assert exc.value.k == -1
