import math

import numpy as np
import pytest
import scipy.stats

from chamberwalk.ibm import (
    bump_function,
    chamber_basis,
    generator_apply,
    grad_log_pi,
    gue_sampler,
    gue_sigma2_per_t,
    ibm_density,
    ibm_norm_check,
    ibm_params,
    in_open_chamber,
    mean_norm2,
    pi_ambient,
    radial_cdf_quadrature,
    rejection_sampler,
    stationarity_residual,
)
from chamberwalk.rootsys import root_system


def test_chamber_basis_orthonormal():
    for r in (1, 2, 3):
        b = chamber_basis(r)
        assert np.allclose(b @ b.T, np.eye(r), atol=1e-14)
        assert np.allclose(b.sum(axis=1), 0, atol=1e-14)


def test_density_normalized():
    for r in (1, 2, 3):
        for t in (0.25, 1.0, 4.0):
            assert ibm_norm_check(r, t) == pytest.approx(1.0, abs=1e-6)


def test_density_wall_vanishing():
    r = 2
    x = np.array([0.5, 0.5, -1.0])  # on the wall x1 = x2
    assert ibm_density(r, 1.0, x) == 0.0
    # quadratic vanishing rate near the wall
    vals = []
    for eps in (1e-2, 1e-3):
        xe = np.array([0.5 + eps, 0.5 - eps, -1.0])
        vals.append(ibm_density(r, 1.0, xe))
    assert vals[1] / vals[0] == pytest.approx(1e-2, rel=0.05)


def test_density_self_similarity():
    # p_t(0, x) dx is the law of sqrt(t) I_1
    r = 2
    rng = np.random.default_rng(3)
    for _ in range(20):
        u = rng.normal(size=3)
        u -= u.mean()
        u = np.sort(u)[::-1]
        t = 2.7
        lhs = ibm_density(r, t, math.sqrt(t) * u)
        rhs = ibm_density(r, 1.0, u) * t ** (-r / 2.0)
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_density_r1_bessel3():
    # r=1: density proportional to x^2 exp(-x^2/t) on the half line (c = 1/2)
    par = ibm_params(1)
    assert par.c == pytest.approx(0.5)
    s = np.linspace(1e-3, 6, 400)
    x = np.stack([s / math.sqrt(2), -s / math.sqrt(2)], axis=1)  # |x| = s
    dens = ibm_density(1, 1.0, x)
    ref = s**2 * np.exp(-(s**2))
    ratio = dens / ref
    assert np.allclose(ratio, ratio[0], rtol=1e-8)


def test_gue_sampler_traceless_ordered():
    ev = gue_sampler(2, 1.0, 500, seed=10)
    assert np.allclose(ev.sum(axis=1), 0, atol=1e-10)
    assert np.all(ev[:, :-1] >= ev[:, 1:] - 1e-12)


def test_gue_sigma_calibration_matches_metric_constant():
    for r in (1, 2, 3):
        assert gue_sigma2_per_t(r) == pytest.approx(
            float(root_system(r).norm_ratio), rel=1e-10
        )


def test_gue_second_moment():
    r, t = 2, 1.0
    ev = gue_sampler(r, t, 40000, seed=4)
    got = (ev**2).sum(axis=1).mean()
    want = mean_norm2(r, t)
    assert got == pytest.approx(want, rel=0.03)


def test_gue_radial_ks():
    for r in (1, 2, 3):
        ev = gue_sampler(r, 1.0, 20000, seed=2024 + r)
        norms = np.linalg.norm(ev, axis=1)
        cdf = lambda s: radial_cdf_quadrature(r, 1.0, np.atleast_1d(s))
        stat, pvalue = scipy.stats.kstest(norms, lambda s: cdf(s))
        assert pvalue > 0.05, (r, stat, pvalue)


def test_rejection_sampler_matches_gue_radially():
    r = 2
    a = np.linalg.norm(gue_sampler(r, 1.0, 8000, seed=5), axis=1)
    b = np.linalg.norm(rejection_sampler(r, 1.0, 8000, seed=6), axis=1)
    stat, pvalue = scipy.stats.ks_2samp(a, b)
    assert pvalue > 0.01


def test_gue_vs_density_energy_distance():
    # full multivariate comparison of the eigenvalue route against exact
    # draws from the density, at the 1% level
    from chamberwalk.experiments import energy_distance_test

    for r in (1, 2, 3):
        a = gue_sampler(r, 1.0, 20000, seed=31 + r)
        b = rejection_sampler(r, 1.0, 20000, seed=77 + r)
        _, pvalue = energy_distance_test(a, b, seed=5, max_points=1200)
        assert pvalue > 0.01, (r, pvalue)


def test_grad_log_pi():
    x = np.array([2.0, 0.5, -2.5])
    g = grad_log_pi(x)
    eps = 1e-6
    for k in range(3):
        e = np.zeros(3)
        e[k] = eps
        num = (
            math.log(abs(pi_ambient(x + e))) - math.log(abs(pi_ambient(x - e)))
        ) / (2 * eps)
        assert g[k] == pytest.approx(num, rel=1e-6)


def test_generator_constant_is_zero():
    assert generator_apply(2, lambda x: 1.0, np.array([1.5, 0.0, -1.5])) == pytest.approx(
        0.0, abs=1e-8
    )


def test_generator_wall_guard():
    with pytest.raises(ValueError):
        generator_apply(2, lambda x: 1.0, np.array([0.001, 0.0, -0.001]), step=1e-2)


def test_generator_two_step_sizes_agree():
    # r=1 cubic test function evaluated along the chamber coordinate
    basis = chamber_basis(1)

    def f(x):
        s = float(x @ basis[0])
        return s**3

    x = basis[0] * 2.0
    a = generator_apply(1, f, x, step=1e-3)
    b = generator_apply(1, f, x, step=5e-4)
    assert a == pytest.approx(b, rel=1e-5)
    # closed form: c (3 s + 3 s^2 / s) with c = 1/2
    s = 2.0
    want = 0.5 * (3 * s + 3 * s)
    assert a == pytest.approx(want, rel=1e-4)


def test_stationarity_of_density_flow():
    cases = (
        (1, np.array([1.0, -1.0]), 0.8),
        (2, np.array([1.5, 0.0, -1.5]), 0.5),
    )
    for r, center, radius in cases:
        f = bump_function(center, radius)
        res = stationarity_residual(r, f, center, radius, t=1.0, dt=1 / 256, mesh=61)
        assert res < 1e-4, (r, res)


def test_in_open_chamber():
    assert in_open_chamber(np.array([2.0, 0.0, -2.0]))
    assert not in_open_chamber(np.array([0.0, 0.0, 0.0]))
