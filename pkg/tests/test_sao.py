import math

import numpy as np
import pytest

from oracles import airy_zeros
from twlab.errors import InvalidParameterError
from twlab.rng import NoisePath, make_stream, sample_brownian
from twlab.sao import (
    INF,
    SaoGrid,
    TestFunction,
    airy_operator,
    discretize_sao,
    quadratic_form_averaged,
    quadratic_form_compact,
    sample_noise,
    sample_tw,
    sao_eigenvalues,
)
from twlab.tridiag import is_positive_semidefinite, smallest_eigenvalues


def test_grid_geometry():
    g = SaoGrid(10.0, 0.01)
    assert g.m == 999
    assert g.points[0] == pytest.approx(0.01) and g.points[-1] == pytest.approx(9.99)
    assert g.noise_length() == 1100


def test_grid_too_small():
    with pytest.raises(InvalidParameterError):
        SaoGrid(1.0, 0.5)


def test_noise_free_airy_eigenvalues():
    op = discretize_sao(INF, 1.0, SaoGrid(20.0, 0.001), None)
    res = sao_eigenvalues(op, 3)
    assert np.max(np.abs(res.eigenvalues - airy_zeros(3))) < 1e-3


def test_noise_free_error_is_second_order():
    errs = []
    for h in (0.04, 0.02, 0.01):
        op = discretize_sao(INF, 1.0, SaoGrid(20.0, h), None)
        errs.append(np.abs(sao_eigenvalues(op, 3).eigenvalues - airy_zeros(3)))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 3.5) & (ratios < 4.5))


def test_entry_formula():
    g = SaoGrid(2.0, 0.5)
    op = discretize_sao(4.0, 1.0, g, NoisePath.zeros(0.5, 6))
    assert op.matrix.diag[0] == pytest.approx(8.5)
    assert np.all(op.matrix.off == -4.0)


def test_entry_formula_with_noise_and_scale():
    g = SaoGrid(2.0, 0.5)
    inc = np.array([0.3, -0.2, 0.1, 0.0, 0.0, 0.0])
    op = discretize_sao(2.0, 1.5, g, NoisePath(0.5, inc))
    y = g.points
    expected = 2 * 1.5 / 0.25 + y / 1.5**2 + (2 / math.sqrt(3.0)) * inc[:3] / 0.5
    assert np.allclose(op.matrix.diag, expected, rtol=1e-15)
    assert np.all(op.matrix.off == -1.5 / 0.25)


def test_zero_noise_unit_scale_is_airy():
    g = SaoGrid(5.0, 0.05)
    a = discretize_sao(3.0, 1.0, g, NoisePath.zeros(0.05, g.noise_length())).matrix
    b = airy_operator(1.0, 1.0, g).matrix
    assert np.array_equal(a.diag, b.diag) and np.array_equal(a.off, b.off)


def test_noise_grid_mismatch():
    g = SaoGrid(5.0, 0.05)
    with pytest.raises(InvalidParameterError):
        discretize_sao(2.0, 1.0, g, NoisePath.zeros(0.1, 200))
    with pytest.raises(InvalidParameterError):
        discretize_sao(2.0, 1.0, g, NoisePath.zeros(0.05, 10))


@pytest.mark.parametrize("beta,beta_prime,s", [(1, 4, 1), (1, 4, 4 ** (-1 / 3)), (2, 4, 1), (0.5, 7, 1.3)])
def test_noise_terms_match_under_coupling(stream, beta, beta_prime, s):
    g = SaoGrid()
    noise = sample_noise(stream, g)
    gamma = math.sqrt(beta_prime / (s * beta))
    upper = discretize_sao(beta_prime, 1.0, g, noise)
    lower = discretize_sao(beta, s, g, noise)
    assert np.allclose(gamma * upper.noise_term, lower.noise_term, rtol=1e-14, atol=0)


def test_laplacian_ground_state_decreases_with_length():
    vals = []
    for L in (5.0, 10.0, 20.0):
        g = SaoGrid(L, 0.01)
        vals.append(sao_eigenvalues(airy_operator(1.0, 0.0, g), 1).eigenvalues[0])
        assert vals[-1] == pytest.approx((math.pi / L) ** 2, rel=1e-3)
    assert vals[0] > vals[1] > vals[2]


@pytest.mark.parametrize("L,h", [(1.5, 0.5), (3.0, 0.1), (10.0, 0.01)])
def test_negative_laplacian_coefficient_not_psd(L, h):
    assert not is_positive_semidefinite(airy_operator(-1.0, 1.0, SaoGrid(L, h)).matrix).psd


def test_sample_tw_infinite_beta():
    t = sample_tw(make_stream(0, 0), INF, SaoGrid(), k=3)
    assert t[0] == pytest.approx(-2.33811, abs=1e-3)


def test_sample_tw_nonincreasing(stream):
    for _ in range(20):
        t = sample_tw(stream, 1.5, SaoGrid(), k=6)
        assert np.all(np.diff(t) <= 0)


def test_sample_tw_rejects_k0(stream):
    with pytest.raises(InvalidParameterError):
        sample_tw(stream, 2.0, SaoGrid(), k=0)


@pytest.mark.slow
def test_tw2_mean_self_consistent_under_refinement():
    coarse_stream, fine_stream = make_stream(1, 0), make_stream(1, 1)
    coarse = np.array([sample_tw(coarse_stream, 2.0, SaoGrid(10.0, 0.01))[0] for _ in range(2000)])
    fine = np.array([sample_tw(fine_stream, 2.0, SaoGrid(16.0, 0.002))[0] for _ in range(10_000)])
    assert abs(coarse.mean() - fine.mean()) < 0.1


@pytest.mark.parametrize("beta", [1.0, 2.0, 4.0])
def test_discretization_convergence(beta):
    L, h = 6.0, 0.01
    close = 0
    stream = make_stream(77, int(beta))
    for _ in range(100):
        fine = sample_brownian(stream, h / 2, int(round((2 * L + 1) / (h / 2))))
        coarse = fine.coarsen(2)
        lam_c = sao_eigenvalues(discretize_sao(beta, 1.0, SaoGrid(L, h), coarse), 1).eigenvalues[0]
        lam_f = sao_eigenvalues(discretize_sao(beta, 1.0, SaoGrid(2 * L, h / 2), fine), 1).eigenvalues[0]
        close += abs(lam_c - lam_f) < 0.05
    assert close >= 95


def test_ground_state_monotone_in_domain(stream):
    for _ in range(20):
        noise = sample_noise(stream, SaoGrid(12.0, 0.01))
        small = discretize_sao(2.0, 1.0, SaoGrid(6.0, 0.01), noise).matrix
        big = discretize_sao(2.0, 1.0, SaoGrid(12.0, 0.01), noise).matrix
        rs, rb = smallest_eigenvalues(small, 1), smallest_eigenvalues(big, 1)
        assert rb.eigenvalues[0] <= rs.eigenvalues[0] + rs.tol + rb.tol


def bump(x):
    return np.where(x <= 1.0, math.sqrt(30.0) * x * (1 - x), 0.0)


def test_compact_form_polynomial():
    f = TestFunction.from_callable(bump, 0.001, 1.0)
    assert quadratic_form_compact(f, INF, None) == pytest.approx(10.5, abs=1e-4)


def test_compact_form_zero_noise_is_deterministic(stream):
    f = TestFunction.from_callable(bump, 0.001, 1.0)
    assert quadratic_form_compact(f, 2.0, NoisePath.zeros(0.001, 3000)) == pytest.approx(
        quadratic_form_compact(f, INF, None), rel=1e-14
    )


def test_compact_form_needs_noise_over_support():
    f = TestFunction.from_callable(bump, 0.01, 1.0)
    with pytest.raises(InvalidParameterError):
        quadratic_form_compact(f, 2.0, NoisePath.zeros(0.01, 50))


def test_test_function_must_vanish_at_origin():
    with pytest.raises(InvalidParameterError):
        TestFunction(0.1, np.array([1.0, 0.5, 0.0]))


def random_smooth_function(rng, support):
    coefs = rng.standard_normal(4) / np.arange(1, 5)

    def fn(x):
        t = np.clip(x / support, 0, 1)
        return sum(c * np.sin((j + 1) * np.pi * t) for j, c in enumerate(coefs)) * (x <= support)

    return fn


@pytest.mark.parametrize("beta", [1.0, 2.0, 4.0])
def test_rayleigh_bound(beta):
    rng = np.random.default_rng(int(beta * 10))
    g = SaoGrid(10.0, 0.01)
    stream = make_stream(31, int(beta))
    for _ in range(25):
        noise = sample_noise(stream, g)
        lam0 = sao_eigenvalues(discretize_sao(beta, 1.0, g, noise), 1).eigenvalues[0]
        f = TestFunction.from_callable(random_smooth_function(rng, rng.uniform(2, 8)), g.h, 9.0)
        assert quadratic_form_compact(f, beta, noise) / f.norm2() >= lam0 - 10 * g.h


def test_averaged_form_zero_noise():
    f = TestFunction.from_callable(bump, 0.001, 1.0)
    z = NoisePath.zeros(0.001, 3000)
    assert quadratic_form_averaged(f, 2.0, z) == pytest.approx(quadratic_form_compact(f, 2.0, z), rel=1e-14)


def test_averaged_form_of_zero_function(stream):
    f = TestFunction(0.01, np.zeros(200))
    assert quadratic_form_averaged(f, 2.0, sample_brownian(stream, 0.01, 400)) == 0.0


def test_averaged_form_needs_extra_unit_of_noise(stream):
    f = TestFunction.from_callable(bump, 0.01, 1.0)
    with pytest.raises(InvalidParameterError):
        quadratic_form_averaged(f, 2.0, sample_brownian(stream, 0.01, 150))


def smooth_bump(x):
    return np.where(x <= 3.0, np.sin(np.pi * x / 3.0) ** 2, 0.0)


@pytest.mark.parametrize("seed", range(4))
def test_averaged_and_compact_forms_agree_at_first_order(seed):
    fine = sample_brownian(make_stream(seed, 5), 0.001, 5000)
    errs = []
    for factor in (4, 2, 1):
        noise = fine.coarsen(factor)
        f = TestFunction.from_callable(smooth_bump, noise.h, 3.0)
        errs.append(abs(quadratic_form_averaged(f, 1.0, noise) - quadratic_form_compact(f, 1.0, noise)))
    hs = np.array([0.004, 0.002, 0.001])
    C = errs[0] / hs[0]
    assert np.all(np.array(errs) <= C * hs * (1 + 1e-9))
    assert errs[1] <= 0.6 * errs[0] and errs[2] <= 0.6 * errs[1]


def test_energy_is_finite_and_dominates_l2():
    f = TestFunction.from_callable(bump, 0.001, 1.0)
    assert np.isfinite(f.energy())
    assert f.energy() >= f.norm2()
