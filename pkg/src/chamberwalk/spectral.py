"""Spectral side: c and h functions, Macdonald polynomials, F0, and the
integral transition formula of the simple random walk.

F0(lambda) = P_lambda(0) is a 0/0 limit of the symmetrized formula.  The
primary evaluation follows the fixed-direction Richardson extrapolation
design, run in extended precision because the Weyl-sum cancellation grows
like eps^(-|R+|) and double precision cannot reach the required tolerance
from rank 3 on.  An exact rational route through the branching rule of
Hall-Littlewood polynomials at x = (1,...,1) provides an independent value
and shows that q_t^(1/2) W0(1/q) F0 is a polynomial in lambda of degree
|R+|, which is what makes large tables affordable.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from mpmath import mp

from .qcount import big_pi, qt_exponent, stabilizer_poincare, w0_poincare
from .rootsys import cone_window, root_system


class NonGenericPointError(ValueError):
    """A c-function denominator vanished at the requested spectral point."""


class F0ExtrapolationError(ArithmeticError):
    pass


class QuadratureError(ArithmeticError):
    pass


_POLE_TOL = 1e-14


@functools.lru_cache(maxsize=None)
def _weyl_images(r):
    return tuple(itertools.permutations(range(r + 1)))


@functools.lru_cache(maxsize=None)
def generic_direction(r):
    """A fixed pseudo-random unit vector of the hyperplane, wall-free."""
    rng = np.random.default_rng(271828182845904523)
    while True:
        v = rng.normal(size=r + 1)
        v -= v.mean()
        v /= np.linalg.norm(v)
        pairings = [v[i] - v[j] for i in range(r + 1) for j in range(i + 1, r + 1)]
        if min(abs(p) for p in pairings) > 0.05:
            return tuple(float(c) for c in v)


@dataclass
class SpectralPoint:
    """A point z of the complexified hyperplane, in ambient coordinates."""

    z: tuple

    @classmethod
    def from_ambient(cls, z):
        z = tuple(complex(c) for c in z)
        s = sum(z)
        if abs(s) > 1e-9 * max(1.0, max(abs(c) for c in z)):
            raise ValueError("ambient coordinates must sum to zero")
        return cls(z)

    @classmethod
    def from_fundamental(cls, r, coeffs):
        rs = root_system(r)
        fw = rs.fundamental_weights()
        z = [complex(0)] * (r + 1)
        for c, w in zip(coeffs, fw):
            for k in range(r + 1):
                z[k] += complex(c) * float(w[k])
        return cls(tuple(z))

    def is_generic(self, cfg):
        try:
            _c_factors(cfg, self.z)
        except NonGenericPointError:
            return False
        return True


def _as_ambient(z):
    if isinstance(z, SpectralPoint):
        return z.z
    return tuple(complex(c) for c in z)


def _c_factors(cfg, z):
    """c(z) as a product over positive roots; raises near denominator zeros."""
    qinv = 1.0 / cfg.q
    out = complex(1.0)
    n = cfg.r + 1
    for i in range(n):
        for j in range(i + 1, n):
            e = np.exp(-(z[i] - z[j]))
            denom = 1.0 - e
            if abs(denom) < _POLE_TOL:
                raise NonGenericPointError(
                    "c-function pole: <alpha,z> in 2 pi i Z at root (%d,%d)" % (i, j)
                )
            out *= (1.0 - qinv * e) / denom
    return out


def c_function(cfg, z):
    """The Macdonald c-function at z (ambient complex coordinates)."""
    return _c_factors(cfg, _as_ambient(z))


@functools.lru_cache(maxsize=None)
def _orbit_ambient(r):
    rs = root_system(r)
    vecs = []
    for i in range(1, r + 1):
        e = tuple(1 if k == i - 1 else 0 for k in range(r))
        for nu in sorted(rs.weyl_orbit(e)):
            vecs.append(tuple(float(c) for c in rs.ambient(nu)))
    return np.array(vecs)


def h_tilde(cfg, z):
    """h(z)/h(0): normalized exponential sum over the fundamental orbits."""
    z = np.asarray(_as_ambient(z))
    vecs = _orbit_ambient(cfg.r)
    return complex(np.exp(vecs @ z).sum() / vecs.shape[0])


def macdonald_p(cfg, lam, z):
    """P_lambda(z) by the symmetrized c-weighted exponential sum.

    Requires z generic: every c(w^-1 z) must be finite.
    """
    z = _as_ambient(z)
    rs = root_system(cfg.r)
    amb = np.array([float(c) for c in rs.ambient(lam)])
    total = complex(0)
    for images in _weyl_images(cfg.r):
        zz = tuple(z[images[k]] for k in range(cfg.r + 1))
        total += _c_factors(cfg, zz) * np.exp(amb @ np.asarray(zz))
    e = qt_exponent(rs, lam)
    pref = cfg.q ** (-0.5 * e) / float(w0_poincare(cfg.r, cfg.q))
    return pref * total


# ---------------------------------------------------------------------------
# F0 by Richardson extrapolation along a fixed generic direction
# ---------------------------------------------------------------------------


@dataclass
class F0Result:
    value: float
    levels_used: int
    last_diffs: tuple


class _F0Evaluator:
    """Shared per-(cfg, dps) state: c-values and pairing data per epsilon level."""

    def __init__(self, cfg, dps, eps0=Fraction(1, 10)):
        self.cfg = cfg
        self.dps = dps
        self.eps0 = eps0
        self.rs = root_system(cfg.r)
        self._levels = {}
        fw = self.rs.fundamental_weights()
        u = generic_direction(cfg.r)
        self._fw_float = [[float(c) for c in w] for w in fw]
        self._u = u
        self._w0poin = w0_poincare(cfg.r, cfg.q)

    def _level_data(self, k):
        if k in self._levels:
            return self._levels[k]
        cfg = self.cfg
        with mp.workdps(self.dps):
            eps = mp.mpf(self.eps0.numerator) / self.eps0.denominator / mp.power(2, k)
            u = [mp.mpf(c) for c in self._u]
            n = cfg.r + 1
            qinv = mp.mpf(1) / cfg.q
            data = []
            for images in _weyl_images(cfg.r):
                zz = [eps * u[images[t]] for t in range(n)]
                cw = mp.mpf(1)
                ok = True
                for i in range(n):
                    for j in range(i + 1, n):
                        e = mp.e ** (-(zz[i] - zz[j]))
                        denom = 1 - e
                        if denom == 0:
                            ok = False
                            break
                        cw *= (1 - qinv * e) / denom
                    if not ok:
                        break
                if not ok:
                    raise NonGenericPointError("direction hit a wall; should not happen")
                # pairing of each fundamental weight with w^-1 (eps u)
                pair = [
                    mp.fsum(mp.mpf(c) * zz[t] for t, c in enumerate(self._fw_float[j]))
                    for j in range(cfg.r)
                ]
                data.append((cw, pair))
            self._levels[k] = data
            return data

    def raw_value(self, lam, k):
        """P_lambda(eps_k u) in working precision."""
        cfg = self.cfg
        with mp.workdps(self.dps):
            total = mp.mpf(0)
            for cw, pair in self._level_data(k):
                expo = mp.fsum(m * p for m, p in zip(lam, pair) if m)
                total += cw * mp.e**expo
            e = qt_exponent(self.rs, lam)
            pref = mp.power(cfg.q, mp.mpf(-e) / 2) / mp.mpf(
                self._w0poin.numerator
            ) * self._w0poin.denominator
            return pref * total


@functools.lru_cache(maxsize=None)
def _f0_evaluator(cfg, dps):
    return _F0Evaluator(cfg, dps)


def f0(cfg, lam, dps=40, rtol=1e-9, max_levels=14, full=False):
    """F0(lambda) = P_lambda(0), Richardson-extrapolated along eps -> 0.

    Accepts once three successive diagonal extrapolants agree to `rtol`
    relative; raises F0ExtrapolationError with diagnostics otherwise.
    """
    rs = root_system(cfg.r)
    if not rs.is_dominant(lam):
        raise ValueError("F0 is defined on dominant weights")
    ev = _f0_evaluator(cfg, dps)
    with mp.workdps(dps):
        diag = []
        rows = []
        diffs = []
        for k in range(max_levels):
            val = ev.raw_value(lam, k)
            row = [val]
            for j in range(1, k + 1):
                p = mp.power(2, j)
                row.append((p * row[j - 1] - rows[k - 1][j - 1]) / (p - 1))
            rows.append(row)
            diag.append(row[-1])
            if k >= 1:
                d = abs(diag[-1] - diag[-2]) / max(abs(diag[-1]), mp.mpf(1e-300))
                diffs.append(float(d))
                if len(diffs) >= 2 and diffs[-1] < rtol and diffs[-2] < rtol:
                    value = float(diag[-1])
                    if value <= 0:
                        raise F0ExtrapolationError(
                            "extrapolated F0 is not positive at %r: %r" % (lam, value)
                        )
                    if full:
                        return F0Result(value, k + 1, tuple(diffs[-3:]))
                    return value
    raise F0ExtrapolationError(
        "extrapolation for %r did not converge; last diffs %r" % (lam, diffs[-4:])
    )


# ---------------------------------------------------------------------------
# Exact route: Hall-Littlewood polynomials at x = (1, ..., 1)
# ---------------------------------------------------------------------------


def _strip_zeros(parts):
    parts = tuple(parts)
    while parts and parts[-1] == 0:
        parts = parts[:-1]
    return parts


def _multiplicities(parts):
    m = {}
    for p in parts:
        if p > 0:
            m[p] = m.get(p, 0) + 1
    return m


@functools.lru_cache(maxsize=None)
def _hl_ones_scaled(parts, nvars, q):
    """P_parts(1^nvars; 1/q) as (num, e) with value num / q^e, all integer.

    Denominators are pure q-powers, so integer pairs avoid the gcd work that
    dominates Fraction arithmetic in the branching recursion.
    """
    if not parts:
        return 1, 0
    if nvars <= 0 or len(parts) > nvars:
        return 0, 0
    m_lam = _multiplicities(parts)
    total_num, total_e = 0, 0
    lo = list(parts[1:]) + [0]
    for mu in itertools.product(*[range(lo[i], parts[i] + 1) for i in range(len(parts))]):
        # mu interlaces parts by construction; enforce weak decrease
        if any(mu[i] < mu[i + 1] for i in range(len(mu) - 1)):
            continue
        m_mu = _multiplicities(mu)
        psi_num, psi_e = 1, 0
        for size, mult in m_mu.items():
            if mult == m_lam.get(size, 0) + 1:
                psi_num *= q**mult - 1
                psi_e += mult
        sub_num, sub_e = _hl_ones_scaled(_strip_zeros(mu), nvars - 1, q)
        num = psi_num * sub_num
        e = psi_e + sub_e
        if num == 0:
            continue
        if total_num == 0:
            total_num, total_e = num, e
        elif e >= total_e:
            total_num = total_num * q ** (e - total_e) + num
            total_e = e
        else:
            total_num += num * q ** (total_e - e)
    return total_num, total_e


def hl_ones(parts, nvars, q):
    """Hall-Littlewood P_parts(1^nvars; t = 1/q), exact.

    Branching over horizontal strips: P_lam(x_1..x_n) =
    sum_mu psi_{lam/mu}(t) x_n^{|lam|-|mu|} P_mu(x_1..x_{n-1}).
    """
    num, e = _hl_ones_scaled(_strip_zeros(parts), nvars, q)
    return Fraction(num, q**e)


def hl_brute_force(parts, xs, q):
    """R_lam/v_lam by explicit symmetrization at exact distinct points (test oracle)."""
    n = len(xs)
    t = Fraction(1, q)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        y = [xs[k] for k in perm]
        num = Fraction(1)
        den = Fraction(1)
        for i in range(n):
            for j in range(i + 1, n):
                num *= y[i] - t * y[j]
                den *= y[i] - y[j]
        mono = Fraction(1)
        for i, p in enumerate(parts):
            mono *= Fraction(y[i]) ** p
        total += mono * num / den
    # v_lam: multiplicities including the zero parts among the n variables
    padded = list(parts) + [0] * (n - len(parts))
    v = Fraction(1)
    counts = {}
    for p in padded:
        counts[p] = counts.get(p, 0) + 1
    for mult in counts.values():
        for j in range(2, mult + 1):
            v *= sum(t**i for i in range(j))
    return total / v


def f0_exact_pieces(cfg, lam):
    """F0(lambda) = mantissa * q^(-e/2) with exact rational mantissa.

    mantissa = q^e HL_lam(1^(r+1); 1/q) / N_lambda, e = qt exponent; this is
    G(lambda)/W0(1/q) where G = stabilizer-Poincare * HL is the degree-|R+|
    polynomial used by F0Table.
    """
    rs = root_system(cfg.r)
    if not rs.is_dominant(lam):
        raise ValueError("dominant weight required")
    e = qt_exponent(rs, lam)
    parts = rs.partition_rep(lam)
    g = stabilizer_poincare(cfg, lam) * hl_ones(_strip_zeros(parts), cfg.r + 1, cfg.q)
    mant = g / w0_poincare(cfg.r, cfg.q)
    return mant, e


def f0_exact_float(cfg, lam):
    mant, e = f0_exact_pieces(cfg, lam)
    return float(mant) * cfg.q ** (-0.5 * e)


# ---------------------------------------------------------------------------
# Polynomial form of G(lambda) = W0(1/q) q_t^(1/2) F0(lambda)
# ---------------------------------------------------------------------------


def _monomials(r, degree):
    out = []
    for alpha in itertools.product(range(degree + 1), repeat=r):
        if sum(alpha) <= degree:
            out.append(alpha)
    out.sort(key=lambda a: (sum(a), a))
    return out


def _solve_rational(a_rows, b):
    """Gaussian elimination over Q for a square system; raises if singular."""
    n = len(b)
    m = [list(row) + [b[k]] for k, row in enumerate(a_rows)]
    for col in range(n):
        piv = next((k for k in range(col, n) if m[k][col] != 0), None)
        if piv is None:
            raise ArithmeticError("singular system in polynomial fit")
        m[col], m[piv] = m[piv], m[col]
        inv = Fraction(1) / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for k in range(n):
            if k != col and m[k][col] != 0:
                f = m[k][col]
                m[k] = [x - f * y for x, y in zip(m[k], m[col])]
    return [m[k][n] for k in range(n)]


@functools.lru_cache(maxsize=None)
def g_polynomial(cfg):
    """Exact coefficients of G in the monomial basis of total degree <= |R+|.

    Fit from exact Hall-Littlewood values on a grid, then verified to
    reproduce every grid value exactly; a nonzero residual anywhere would
    disprove the polynomiality and raises.
    """
    rs = root_system(cfg.r)
    degree = rs.num_positive
    monos = _monomials(cfg.r, degree)
    grid_max = degree + 1
    samples = list(itertools.product(range(grid_max + 1), repeat=cfg.r))

    def g_value(m):
        parts = _strip_zeros(rs.partition_rep(m))
        return stabilizer_poincare(cfg, m) * hl_ones(parts, cfg.r + 1, cfg.q)

    def mono_val(alpha, m):
        v = 1
        for a, x in zip(alpha, m):
            v *= x**a
        return Fraction(v)

    # normal equations, exact
    nc = len(monos)
    ata = [[Fraction(0)] * nc for _ in range(nc)]
    atb = [Fraction(0)] * nc
    rows = []
    vals = []
    for m in samples:
        row = [mono_val(a, m) for a in monos]
        val = g_value(m)
        rows.append(row)
        vals.append(val)
        for i in range(nc):
            if row[i] == 0:
                continue
            atb[i] += row[i] * val
            for j in range(i, nc):
                ata[i][j] += row[i] * row[j]
    for i in range(nc):
        for j in range(i):
            ata[i][j] = ata[j][i]
    coeffs = _solve_rational(ata, atb)
    for row, val in zip(rows, vals):
        pred = sum(c * x for c, x in zip(coeffs, row))
        if pred != val:
            raise ArithmeticError(
                "G is not a degree-%d polynomial (residual %s)" % (degree, pred - val)
            )
    # spot check beyond the fitting grid
    for m in [(grid_max + 3,) * cfg.r, tuple(range(1, cfg.r + 1))]:
        pred = sum(c * mono_val(a, m) for c, a in zip(coeffs, monos))
        if pred != g_value(m):
            raise ArithmeticError("G polynomial fails off the fitting grid at %r" % (m,))
    return monos, tuple(coeffs)


def g_poly_value(cfg, m):
    """Exact G(m) from the fitted polynomial."""
    monos, coeffs = g_polynomial(cfg)
    total = Fraction(0)
    for alpha, c in zip(monos, coeffs):
        v = c
        for a, x in zip(alpha, m):
            v *= x**a
        total += v
    return total


class F0Table:
    """F0 on a truncated cone, stored in scale-free form.

    Each entry is (mantissa, e) with F0 = mantissa * q^(-e/2); mantissa =
    G(lambda)/W0(1/q) stays O(Pi(lambda)) even when F0 itself underflows,
    which is what the Doob transform and the large-window experiments need.
    """

    def __init__(self, cfg, window, cross_check=0, rtol=1e-8):
        self.cfg = cfg
        self.window = window
        self.states = cone_window(cfg.r, window)
        rs = root_system(cfg.r)
        monos, coeffs = g_polynomial(cfg)
        w0p = float(w0_poincare(cfg.r, cfg.q))
        marr = np.array(self.states, dtype=np.float64)
        vals = np.zeros(len(self.states))
        for alpha, c in zip(monos, coeffs):
            term = np.full(len(self.states), float(c))
            for axis, a in enumerate(alpha):
                if a:
                    term *= marr[:, axis] ** a
            vals += term
        self.mantissa = vals / w0p
        weights = np.array(
            [(k + 1) * (cfg.r - k) for k in range(cfg.r)], dtype=np.float64
        )
        self.exponents = np.asarray(np.rint(marr @ weights), dtype=np.int64)
        if np.any(self.mantissa <= 0):
            bad = self.states[int(np.argmin(self.mantissa))]
            raise ArithmeticError("nonpositive F0 mantissa at %r" % (bad,))
        self.index = {m: k for k, m in enumerate(self.states)}
        self.log_q = math.log(cfg.q)
        self._pi_big = np.array([float(big_pi(rs, m)) for m in self.states])
        self.envelope_ratios = self.mantissa / self._pi_big
        self.diagnostics = {
            "method": "exact-polynomial",
            "envelope_min": float(self.envelope_ratios.min()),
            "envelope_max": float(self.envelope_ratios.max()),
        }
        if cross_check:
            picks = np.linspace(0, len(self.states) - 1, cross_check).astype(int)
            worst = 0.0
            for k in picks:
                lam = self.states[int(k)]
                ref = f0(cfg, lam)
                mine = self.f0(lam)
                worst = max(worst, abs(mine - ref) / ref)
            if worst > rtol:
                raise ArithmeticError(
                    "F0 table disagrees with extrapolation by %.3e" % worst
                )
            self.diagnostics["extrapolation_cross_check"] = {
                "n": int(cross_check),
                "max_rel_err": worst,
            }
        assert abs(self.f0((0,) * cfg.r) - 1.0) < 1e-10

    def f0(self, lam):
        k = self.index[lam]
        return float(self.mantissa[k]) * self.cfg.q ** (-0.5 * float(self.exponents[k]))

    def log_f0(self, lam):
        k = self.index[lam]
        return math.log(self.mantissa[k]) - 0.5 * self.exponents[k] * self.log_q

    def envelope_ratio(self, lam):
        """F0 q_t^(1/2) / Pi(lambda); bounded above and below on the window."""
        return float(self.envelope_ratios[self.index[lam]])


# ---------------------------------------------------------------------------
# Plancherel quadrature for the simple random walk
# ---------------------------------------------------------------------------


# grid offsets per dimension: fractional parts of sqrt(prime) are rationally
# independent, so no small integer combination of pairings lands on a pole
_OFFSET_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)


class PlancherelGrid:
    """Uniform grid on the torus of the spectral domain.

    The integrand of the transition formula is periodic modulo 2 pi Q (Q the
    root lattice) and the stated domain U is exactly a fundamental domain for
    that lattice, so a unimodular uniform grid integrates it with spectral
    accuracy.  Offsets keep every node away from the c-function poles.
    """

    def __init__(self, cfg, points_per_dim):
        self.cfg = cfg
        self.m = points_per_dim
        r = cfg.r
        rs = root_system(r)
        axes = [
            (np.arange(points_per_dim) + (math.sqrt(_OFFSET_PRIMES[j]) % 1.0))
            / points_per_dim
            for j in range(r)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        xs = np.stack([g.ravel() for g in mesh], axis=1)  # (K, r) in [0,1)
        simple = np.array(rs.simple_roots(), dtype=np.float64)  # (r, r+1)
        self.theta = 2 * math.pi * xs @ simple  # ambient (K, r+1)
        self._cw = {}
        qinv = 1.0 / cfg.q
        for images in _weyl_images(r):
            th = self.theta[:, list(images)]
            c = np.ones(self.theta.shape[0], dtype=np.complex128)
            for i in range(r + 1):
                for j in range(i + 1, r + 1):
                    e = np.exp(-1j * (th[:, i] - th[:, j]))
                    denom = 1.0 - e
                    if np.min(np.abs(denom)) < _POLE_TOL:
                        raise QuadratureError("grid node fell on a c-function pole")
                    c *= (1.0 - qinv * e) / denom
            self._cw[images] = c
        ident = tuple(range(r + 1))
        self.c_abs2 = np.abs(self._cw[ident]) ** 2
        vecs = _orbit_ambient(r)
        self.h_tilde = np.exp(1j * (self.theta @ vecs.T)).sum(axis=1) / vecs.shape[0]
        self._norm0 = None

    def macdonald_on_grid(self, lam):
        cfg = self.cfg
        rs = root_system(cfg.r)
        amb = np.array([float(c) for c in rs.ambient(lam)])
        total = np.zeros(self.theta.shape[0], dtype=np.complex128)
        for images, cw in self._cw.items():
            th = self.theta[:, list(images)]
            total += cw * np.exp(1j * (th @ amb))
        e = qt_exponent(rs, lam)
        return total * (cfg.q ** (-0.5 * e) / float(w0_poincare(cfg.r, cfg.q)))

    def mean_integrand(self, n, lam):
        vals = self.h_tilde**n * self.macdonald_on_grid(lam) / self.c_abs2
        return complex(vals.mean())

    def norm0(self):
        if self._norm0 is None:
            self._norm0 = self.mean_integrand(0, (0,) * self.cfg.r)
        return self._norm0


@functools.lru_cache(maxsize=None)
def _cached_grid(cfg, m):
    return PlancherelGrid(cfg, m)


def plancherel_grid(cfg, start=None, stabilize=1e-8, max_doublings=3):
    """Grid sized by doubling until the n=0 normalization stabilizes."""
    m = start or (128 if cfg.r <= 2 else 24)
    grid = _cached_grid(cfg, m)
    for _ in range(max_doublings):
        bigger = _cached_grid(cfg, 2 * m)
        rel = abs(grid.norm0() - bigger.norm0()) / abs(bigger.norm0())
        if rel < stabilize:
            return grid
        m *= 2
        grid = bigger
    raise QuadratureError("normalization did not stabilize; last grid %d" % m)


def p_n_quadrature(cfg, n, lam, grid=None, rho=None):
    """Per-vertex n-step probability p_n(O, x) for x in the sphere of lam.

    Simple random walk only (the integral formula's scope).  The overall
    constant is fixed by p_0(O,O) = 1, never taken from outside.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    rs = root_system(cfg.r)
    if not rs.is_dominant(lam):
        raise ValueError("lambda must be dominant")
    if grid is None:
        grid = plancherel_grid(cfg)
    if rho is None:
        from .kernel import simple_rw_params, spectral_gap

        rho = float(spectral_gap(simple_rw_params(cfg)))
    val = grid.mean_integrand(n, lam) / grid.norm0()
    out = float(rho) ** n * val
    if abs(out.imag) > 1e-10 * max(1.0, abs(out.real)) and abs(out.imag) > 1e-12:
        raise QuadratureError("imaginary residue %r at lam=%r n=%d" % (out.imag, lam, n))
    p = out.real
    if p < -1e-8:
        raise QuadratureError("negative probability %r at lam=%r n=%d" % (p, lam, n))
    return p


def p_n_table(cfg, n, window, grid=None):
    """p_n over all dominant weights in the window, one shared grid."""
    if grid is None:
        grid = plancherel_grid(cfg)
    from .kernel import simple_rw_params, spectral_gap

    rho = float(spectral_gap(simple_rw_params(cfg)))
    return {
        lam: p_n_quadrature(cfg, n, lam, grid=grid, rho=rho)
        for lam in cone_window(cfg.r, window)
    }
