from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special, stats

from twlab.errors import InvalidParameterError
from twlab.rng import (
    NoisePath,
    chi_cdf,
    chi_inverse_cdf,
    gaussian_inverse_cdf,
    make_stream,
    sample_brownian,
    sample_chi,
    sample_gaussian,
)

GOLDEN = Path(__file__).parent / "data" / "golden_rng.txt"


def test_same_key_same_sequence():
    a = make_stream(7, 0).generator.random(100)
    b = make_stream(7, 0).generator.random(100)
    assert np.array_equal(a, b)


def test_distinct_stream_ids_differ():
    a = make_stream(7, 0).generator.random(100)
    b = make_stream(7, 1).generator.random(100)
    assert not np.any(a == b)


def test_golden_file_matches():
    from make_golden import golden_lines

    assert golden_lines() == GOLDEN.read_text().splitlines()


def test_golden_first_draw():
    first = GOLDEN.read_text().splitlines()[0].split()[1]
    assert make_stream(7, 0).generator.random() == float(first)


def test_position_advances():
    s = make_stream(1, 2)
    p0 = s.position
    s.generator.random(10)
    assert s.position > p0


def test_degenerate_gaussian(stream):
    assert sample_gaussian(stream, 3.5, 0.0) == 3.5


def test_negative_sigma_rejected(stream):
    with pytest.raises(InvalidParameterError):
        sample_gaussian(stream, 0.0, -1.0)


def test_gaussian_moments(stream):
    x = sample_gaussian(stream, 0.0, 1.0, size=100_000)
    assert abs(x.mean()) < 0.02
    assert abs(x.var() - 1.0) < 0.03


@given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
def test_gaussian_quantile_mirror_symmetry(u):
    assert gaussian_inverse_cdf(1 - u) == pytest.approx(-gaussian_inverse_cdf(u), abs=1e-9)


def test_chi_second_moment(stream):
    x = sample_chi(stream, 3.0, size=100_000)
    assert np.all(x >= 0)
    assert abs(np.mean(x**2) - 3.0) < 0.05


@pytest.mark.parametrize("dof", [0.0, -1.0])
def test_chi_rejects_bad_dof(stream, dof):
    with pytest.raises(InvalidParameterError):
        sample_chi(stream, dof)


def test_chi_one_is_abs_gaussian():
    x = sample_chi(make_stream(3, 0), 1.0, size=10_000)
    y = np.abs(sample_gaussian(make_stream(3, 1), 0.0, 1.0, size=10_000))
    assert stats.ks_2samp(x, y).statistic < 0.03


def test_chi_inverse_cdf_closed_form():
    assert chi_inverse_cdf(1 - np.exp(-2.0), 2.0) == pytest.approx(2.0, abs=1e-9)


def test_chi_inverse_cdf_left_edge():
    assert chi_inverse_cdf(1e-12, 3.0) < 1e-3
    assert chi_inverse_cdf(1e-300, 3.0) < 1e-90


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
def test_chi_inverse_cdf_domain(u):
    with pytest.raises(InvalidParameterError):
        chi_inverse_cdf(u, 2.0)


@given(st.floats(min_value=1e-8, max_value=1 - 1e-8), st.floats(min_value=0.05, max_value=400.0))
def test_chi_inverse_cdf_inverts(u, dof):
    x = chi_inverse_cdf(u, dof)
    assert abs(chi_cdf(x, dof) - u) <= 1e-10


@given(
    st.floats(min_value=1e-6, max_value=1 - 1e-6),
    st.floats(min_value=1e-6, max_value=1 - 1e-6),
    st.floats(min_value=0.1, max_value=100.0),
)
def test_chi_inverse_cdf_monotone(u1, u2, dof):
    if abs(u1 - u2) < 1e-9:
        return
    lo, hi = sorted((u1, u2))
    assert chi_inverse_cdf(lo, dof) < chi_inverse_cdf(hi, dof)


def test_chi_inverse_cdf_continuous_in_dof():
    xs = [chi_inverse_cdf(0.3, d) for d in np.linspace(2.0, 2.1, 11)]
    assert np.max(np.abs(np.diff(xs))) < 0.01


def test_inverse_cdf_sampling_matches_gamma_sampling():
    u = make_stream(11, 0).generator.random(10_000)
    x = np.array([chi_inverse_cdf(v, 3.0) for v in u])
    y = sample_chi(make_stream(11, 1), 3.0, size=10_000)
    assert stats.ks_2samp(x, y).statistic < 0.03


def test_chi_cdf_agrees_with_scipy():
    for x in (0.1, 1.0, 2.5):
        assert chi_cdf(x, 2.7) == pytest.approx(stats.chi.cdf(x, 2.7), abs=1e-12)


def test_brownian_increment_variance():
    s = make_stream(5, 0)
    inc = np.array([sample_brownian(s, 0.01, 1).increments[0] for _ in range(100_000)])
    assert abs(inc.var() / 0.01 - 1) < 0.05


def test_brownian_path_starts_at_zero(stream):
    path = sample_brownian(stream, 0.1, 5)
    b = path.path()
    assert b[0] == 0.0
    assert b[1] == path.increments[0]
    assert np.allclose(np.diff(b), path.increments)


def test_brownian_segments_are_disjoint(stream):
    a = sample_brownian(stream, 0.1, 50).increments
    b = sample_brownian(stream, 0.1, 50).increments
    assert not set(a) & set(b)


@pytest.mark.parametrize("h,m", [(0.0, 5), (-1.0, 5), (0.1, 0)])
def test_brownian_validation(stream, h, m):
    with pytest.raises(InvalidParameterError):
        sample_brownian(stream, h, m)


def test_coarsen_preserves_path(stream):
    fine = sample_brownian(stream, 0.001, 4000)
    coarse = fine.coarsen(4)
    assert coarse.h == pytest.approx(0.004)
    assert np.allclose(coarse.path(), fine.path()[::4])


def test_noise_path_validation():
    with pytest.raises(InvalidParameterError):
        NoisePath(0.1, np.array([]))
