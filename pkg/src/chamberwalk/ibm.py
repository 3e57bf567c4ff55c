"""The limit object: Brownian motion of the Weyl chamber (GUE-type process).

Density, normalization, generator, an eigenvalue-process sampler, and a
rejection sampler used as an independent route in goodness-of-fit tests.
All ambient points live in the trace-zero hyperplane of R^(r+1).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .rootsys import root_system
from .walk import make_rng


def chamber_basis(r):
    """Orthonormal basis of the trace-zero hyperplane, deterministic."""
    n = r + 1
    basis = []
    for i in range(r):
        v = np.zeros(n)
        v[: i + 1] = 1.0
        v[i + 1] = -(i + 1.0)
        basis.append(v / np.linalg.norm(v))
    return np.array(basis)  # (r, n)


def pi_ambient(x):
    """prod_{i<j} (x_i - x_j) for ambient points; vectorized over rows."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    n = x.shape[1]
    out = np.ones(x.shape[0])
    for i in range(n):
        for j in range(i + 1, n):
            out *= x[:, i] - x[:, j]
    return out[0] if single else out


def in_open_chamber(x):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    ok = np.all(x[:, :-1] > x[:, 1:], axis=1)
    return bool(ok[0]) if single else ok


@dataclass(frozen=True)
class IbmParams:
    """Chamber Brownian motion constants for rank r."""

    r: int
    c: float  # ||.||^2 = c |.|^2
    num_positive: int
    norm_const_t1: float  # normalizing constant of the t=1 density on the chamber

    @property
    def density_power(self):
        return self.num_positive + self.r / 2.0


@functools.lru_cache(maxsize=None)
def ibm_params(r):
    rs = root_system(r)
    c = float(rs.norm_ratio)
    z1 = _chamber_normalization(r, c)
    return IbmParams(r, c, rs.num_positive, 1.0 / z1)


@functools.lru_cache(maxsize=None)
def _gauss_hermite(r, n_nodes):
    nodes, weights = hermgauss(n_nodes)
    grids = np.meshgrid(*([nodes] * r), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    w = np.ones(pts.shape[0])
    for axis in range(r):
        wk = np.meshgrid(*([weights] * r), indexing="ij")[axis].ravel()
        w *= wk
    return pts, w


def _chamber_normalization(r, c):
    """integral over the open chamber of pi(x)^2 exp(-|x|^2/(2c)) dx.

    The integrand is W0-invariant, so integrate over the whole hyperplane by
    Gauss-Hermite (exact: polynomial times Gaussian) and divide by |W0|.
    """
    basis = chamber_basis(r)
    deg = r * (r + 1)  # degree of pi^2
    pts, w = _gauss_hermite(r, deg // 2 + 2)
    # x = sqrt(2c) * u in hyperplane coordinates
    amb = math.sqrt(2 * c) * pts @ basis
    vals = pi_ambient(amb) ** 2
    integral = float((w * vals).sum()) * (2 * c) ** (r / 2.0)
    return integral / math.factorial(r + 1)


def ibm_density(r, t, x):
    """Transition density from 0 of the chamber Brownian motion, at time t.

    Normalized so that the integral over the open chamber is 1; vanishes
    quadratically at the walls.  `x` is an ambient point or an array of them.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    par = ibm_params(r)
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    norm2 = (x**2).sum(axis=1)
    vals = (
        par.norm_const_t1
        * t ** (-par.density_power)
        * pi_ambient(x) ** 2
        * np.exp(-norm2 / (2 * par.c * t))
    )
    return float(vals[0]) if single else vals


def ibm_norm_check(r, t, n_nodes_extra=0):
    """Quadrature of the density over the chamber; should be 1."""
    par = ibm_params(r)
    basis = chamber_basis(r)
    deg = r * (r + 1)
    pts, w = _gauss_hermite(r, deg // 2 + 2 + n_nodes_extra)
    amb = math.sqrt(2 * par.c * t) * pts @ basis
    vals = pi_ambient(amb) ** 2 * par.norm_const_t1 * t ** (-par.density_power)
    total = float((w * vals).sum()) * (2 * par.c * t) ** (r / 2.0) / math.factorial(r + 1)
    return total


def mean_norm2(r, t):
    """E |I_t|^2 under the chamber density, by Gauss-Hermite quadrature."""
    par = ibm_params(r)
    basis = chamber_basis(r)
    deg = r * (r + 1) + 2
    pts, w = _gauss_hermite(r, deg // 2 + 2)
    amb = math.sqrt(2 * par.c * t) * pts @ basis
    norm2 = (amb**2).sum(axis=1)
    num = float((w * pi_ambient(amb) ** 2 * norm2).sum())
    den = float((w * pi_ambient(amb) ** 2).sum())
    return num / den


@functools.lru_cache(maxsize=None)
def gue_sigma2_per_t(r):
    """Entry variance per unit time for the traceless eigenvalue sampler.

    Calibrated by matching E|I_t|^2 from the density quadrature against the
    sampler's moment sigma^2 r (r+2); comes out equal to the metric constant
    c, which is recorded rather than assumed.
    """
    target = mean_norm2(r, 1.0)
    return target / (r * (r + 2))


def gue_sampler(r, t, n_samples, seed, sigma2=None):
    """Ordered eigenvalues of traceless Hermitian Gaussian matrices.

    Entries are Brownian at the calibrated scale; rows are points of the
    closed chamber in ambient coordinates summing to zero.
    """
    if sigma2 is None:
        sigma2 = gue_sigma2_per_t(r) * t
    n = r + 1
    rng = make_rng(seed)
    sigma = math.sqrt(sigma2)
    out = np.empty((n_samples, n))
    block = 4096
    done = 0
    while done < n_samples:
        b = min(block, n_samples - done)
        re = rng.normal(size=(b, n, n))
        im = rng.normal(size=(b, n, n))
        # E[H_ii^2] = E[|H_ij|^2] = sigma^2, the convention matching the density
        h = (re + re.transpose(0, 2, 1)) / 2 + 1j * (im - im.transpose(0, 2, 1)) / 2
        h *= sigma
        tr = np.real(np.trace(h, axis1=1, axis2=2)) / n
        h[:, range(n), range(n)] -= tr[:, None]
        ev = np.linalg.eigvalsh(h)
        out[done : done + b] = ev[:, ::-1]
        done += b
    return out


def rejection_sampler(r, t, n_samples, seed):
    """Exact draws from ibm_density, independent of the eigenvalue route.

    The radius is exact: |x|^2 is Gamma((r + 2|R+|)/2, 2ct) because the
    density is a homogeneous pi^2 factor times a Gaussian.  The direction is
    rejection-sampled on the unit sphere of the hyperplane; the angular
    envelope max pi^2 is attained at the scaled roots of the degree-(r+1)
    Hermite polynomial (the electrostatic extremum), and every draw asserts
    the envelope, so a bound violation raises instead of biasing.
    """
    par = ibm_params(r)
    basis = chamber_basis(r)
    c = par.c
    k = par.num_positive
    nodes, _ = hermgauss(r + 1)
    u_star = nodes - nodes.mean()
    u_star /= np.linalg.norm(u_star)
    log_max = 2 * math.log(abs(pi_ambient(u_star)))
    rng = make_rng(seed)
    out = np.empty((n_samples, r + 1))
    done = 0
    batch = 8192
    shape = (r + 2 * k) / 2.0
    while done < n_samples:
        v = rng.normal(size=(batch, r)) @ basis
        v /= np.linalg.norm(v, axis=1)[:, None]
        log_f = 2 * np.log(np.abs(pi_ambient(v)) + 1e-300)
        if np.any(log_f > log_max + 1e-9):
            raise ArithmeticError("angular envelope violated; extremum wrong")
        accept = np.log(rng.random(batch) + 1e-300) < log_f - log_max
        picked = v[accept]
        if picked.shape[0] == 0:
            continue
        take = min(picked.shape[0], n_samples - done)
        radius = np.sqrt(rng.gamma(shape, 2 * c * t, size=take))
        sortd = -np.sort(-picked[:take], axis=1)
        out[done : done + take] = sortd * radius[:, None]
        done += take
    return out


def radial_cdf_quadrature(r, t, s_grid):
    """CDF of |I_t| by quadrature of the radial marginal density.

    The radial density is proportional to s^(r - 1 + 2|R+|) exp(-s^2/(2ct)).
    """
    par = ibm_params(r)
    k = par.r - 1 + 2 * par.num_positive
    s_max = float(np.max(s_grid)) * 1.0 + 12 * math.sqrt(par.c * t)
    mesh = np.linspace(0, s_max, 20001)
    dens = mesh**k * np.exp(-(mesh**2) / (2 * par.c * t))
    cum = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) / 2 * np.diff(mesh))])
    cum /= cum[-1]
    return np.interp(np.asarray(s_grid, dtype=np.float64), mesh, cum)


# ---------------------------------------------------------------------------
# generator
# ---------------------------------------------------------------------------


def grad_log_pi(x):
    """Euclidean-ambient gradient of log pi at an interior point."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    g = np.zeros(n)
    for i in range(n):
        for j in range(i + 1, n):
            d = x[i] - x[j]
            g[i] += 1.0 / d
            g[j] -= 1.0 / d
    return g


def generator_apply(r, f, x, step=1e-3):
    """D f(x) = (1/2) Laplacian + <<grad log pi, grad f>> in the walk metric.

    The normalization is pinned by the walk itself: the rescaled increments
    have ambient covariance c t I (that is what the density's exp(-|x|^2/2ct)
    encodes), so in Euclidean-ambient terms
        D f = c [ (1/2) Delta f + <grad log pi, grad f> ],
    the r=1 case being the Bessel-3 generator run at speed c.  Finite
    differences in an orthonormal hyperplane basis; the point must stay clear
    of the walls.
    """
    par = ibm_params(r)
    x = np.asarray(x, dtype=np.float64)
    gaps = [x[i] - x[i + 1] for i in range(r)]
    if min(gaps) < 10 * step:
        raise ValueError("point within 10 steps of a wall; decrease step")
    basis = chamber_basis(r)
    lap = 0.0
    grad = np.zeros(r)
    f0 = f(x)
    for k in range(r):
        e = basis[k] * step
        fp, fm = f(x + e), f(x - e)
        lap += (fp - 2 * f0 + fm) / step**2
        grad[k] = (fp - fm) / (2 * step)
    glp = grad_log_pi(x) @ basis.T
    return par.c * (0.5 * lap + float(glp @ grad))


def _simpson_weights(n):
    if n % 2 == 0:
        raise ValueError("need an odd number of nodes")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / 3.0


def stationarity_residual(r, f, center, radius, t=1.0, dt=None, mesh=41, fd_step=1e-3):
    """Relative mismatch between d/dt int f p_t and int (Df) p_t.

    `f` must be supported in the ball of `radius` around `center`, itself
    inside the open chamber; the integrals run over the support box with a
    Simpson product rule and Df is zero off the support since D is local.
    """
    dt = dt or t / 64
    basis = chamber_basis(r)
    center = np.asarray(center, dtype=np.float64)
    y0 = basis @ center
    axes = [np.linspace(y0k - radius, y0k + radius, mesh) for y0k in y0]
    step = 2 * radius / (mesh - 1)
    grids = np.meshgrid(*axes, indexing="ij")
    ys = np.stack([g.ravel() for g in grids], axis=1)
    amb = ys @ basis
    wvec = _simpson_weights(mesh)
    w = np.ones(ys.shape[0])
    for axis in range(r):
        w *= np.meshgrid(*([wvec] * r), indexing="ij")[axis].ravel()
    w *= step**r

    f_vals = np.array([f(p) for p in amb])
    inside = ((ys - y0) ** 2).sum(axis=1) < radius**2

    def integral(vals, tt):
        return float((w * vals * ibm_density(r, tt, amb)).sum())

    lhs = (integral(f_vals, t + dt) - integral(f_vals, t - dt)) / (2 * dt)
    df_vals = np.zeros(ys.shape[0])
    for k in np.nonzero(inside)[0]:
        df_vals[k] = generator_apply(r, f, amb[k], step=fd_step)
    rhs = integral(df_vals, t)
    scale = max(abs(lhs), abs(rhs), 1e-12)
    return abs(lhs - rhs) / scale


def bump_function(center, radius):
    """A compactly supported C^2 bump, (1 - d^2)^3 inside the ball.

    Polynomial inside the support keeps finite differences accurate; the
    classical exp(-1/(1-d^2)) profile has derivatives too wild near the edge
    for quadrature-plus-FD checks.
    """
    center = np.asarray(center, dtype=np.float64)

    def f(x):
        d2 = float(((np.asarray(x) - center) ** 2).sum()) / radius**2
        if d2 >= 1.0:
            return 0.0
        return (1.0 - d2) ** 3

    return f
