"""Exact one-step transition kernels of radial walks on the dominant cone.

Interior rows come from the closed-form gallery counts.  Rows at the cone
boundary, which the closed form does not cover, fold the interior stencil
across the chamber walls and are validated against exact row-sum and
reversibility constraints; the pure constraint closure is also provided and
raises on the ranks where it is underdetermined, never guessing.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .exactnum import QSqrt
from .qcount import n_lambda, qt_exponent
from .rootsys import cone_window, fundamental_weight, root_system


class KernelError(Exception):
    pass


class UnsolvedRowError(KernelError):
    """A boundary row remained underdetermined after constraint propagation."""


class InconsistentCountsError(KernelError):
    """Constraints forced a negative or non-integer vertex count."""


@functools.lru_cache(maxsize=None)
def step_orbits(r):
    """For each type i (1-based), the orbit W0 lambda_i sorted, with q-tilde exponents."""
    rs = root_system(r)
    out = {}
    for i in range(1, r + 1):
        orbit = sorted(rs.weyl_orbit(fundamental_weight(r, i)))
        out[i] = tuple((nu, qt_exponent(rs, nu)) for nu in orbit)
    return out


def interior_count(cfg, i, nu):
    """|V_{lam+nu}(O) cap V_{lam_i}(x_lam)| for regular dominant lam, a power of q."""
    rs = root_system(cfg.r)
    e_i = qt_exponent(rs, fundamental_weight(cfg.r, i))
    e_nu = qt_exponent(rs, nu)
    total = e_i + e_nu
    if total % 2:
        raise InconsistentCountsError(
            "odd exponent sum %d for type %d step %r" % (total, i, nu)
        )
    if total < 0:
        raise InconsistentCountsError("negative count exponent for step %r" % (nu,))
    return cfg.q ** (total // 2)


def _eliminate_exact(eqs):
    """Solve sparse linear equations over Q by substitution.

    `eqs` is a list of (coeffs, const) with coeffs a dict var -> Fraction,
    meaning sum coeffs[v] * v = const.  Returns a value for every variable
    the system pins down uniquely; free variables are simply absent.
    """
    assigned = {}
    defs = {}  # var -> (coeffs, const): var = const + sum coeffs[w] * w

    def normalize(coeffs, const):
        changed = True
        while changed:
            changed = False
            for v in list(coeffs):
                if v in assigned:
                    const -= coeffs.pop(v) * assigned[v]
                    changed = True
                elif v in defs:
                    c = coeffs.pop(v)
                    dcoeffs, dconst = defs[v]
                    const -= c * dconst
                    for w, a in dcoeffs.items():
                        coeffs[w] = coeffs.get(w, Fraction(0)) + c * a
                        if coeffs[w] == 0:
                            del coeffs[w]
                    changed = True
        return coeffs, const

    pending = [({k: Fraction(v) for k, v in c.items()}, Fraction(k0)) for c, k0 in eqs]
    while pending:
        pending.sort(key=lambda e: len(e[0]))
        nxt = []
        progressed = False
        for coeffs, const in pending:
            coeffs, const = normalize(coeffs, const)
            if not coeffs:
                if const != 0:
                    raise InconsistentCountsError(
                        "inconsistent linear system (0 = %s)" % const
                    )
                progressed = True
                continue
            if len(coeffs) == 1:
                (v, c), = coeffs.items()
                assigned[v] = const / c
                progressed = True
                continue
            nxt.append((coeffs, const))
        if not progressed and nxt:
            # stuck: turn the shortest equation into a definition
            coeffs, const = nxt.pop(0)
            coeffs, const = normalize(coeffs, const)
            if len(coeffs) <= 1:
                nxt.append((coeffs, const))
                pending = nxt
                continue
            v, c = next(iter(coeffs.items()))
            rest = {w: -a / c for w, a in coeffs.items() if w is not v}
            defs[v] = (rest, const / c)
        pending = nxt

    # resolve definitions whose free variables all got assigned
    changed = True
    while changed:
        changed = False
        for v in list(defs):
            dcoeffs, dconst = defs[v]
            if all(w in assigned for w in dcoeffs):
                assigned[v] = dconst + sum(a * assigned[w] for w, a in dcoeffs.items())
                del defs[v]
                changed = True
    return assigned


class StepDistribution:
    """Step probabilities p_1..p_r with sum_i p_i N_{lambda_i} = 1 exactly."""

    def __init__(self, cfg, p, require_symmetric=True):
        self.cfg = cfg
        probs = []
        for x in p:
            x = x if isinstance(x, QSqrt) else QSqrt(x)
            if x.sign() <= 0:
                raise ValueError("step probabilities must be positive")
            probs.append(x)
        if len(probs) != cfg.r:
            raise ValueError("expected %d step probabilities" % cfg.r)
        self.p = tuple(probs)
        total = QSqrt(0)
        for i, pi in enumerate(self.p, start=1):
            total = total + pi * n_lambda(cfg, fundamental_weight(cfg.r, i))
        if total != QSqrt(1):
            raise ValueError("sum p_i N_i = %r, expected exactly 1" % (total,))
        if require_symmetric:
            for i in range(cfg.r):
                if self.p[i] != self.p[cfg.r - 1 - i]:
                    raise ValueError("walk is not symmetric: p_%d != p_%d" % (i + 1, cfg.r - i))

    def __repr__(self):
        return "StepDistribution(r=%d, q=%d, p=%r)" % (self.cfg.r, self.cfg.q, self.p)


def simple_rw_params(cfg):
    """The simple random walk: p_i proportional to q_{t_lambda_i}^(-1/2)."""
    rs = root_system(cfg.r)
    denom = QSqrt(0)
    weights = []
    for i in range(1, cfg.r + 1):
        e_i = qt_exponent(rs, fundamental_weight(cfg.r, i))
        w = QSqrt.q_power(cfg.q, -e_i)
        weights.append(w)
        denom = denom + w * n_lambda(cfg, fundamental_weight(cfg.r, i))
    return StepDistribution(cfg, [w / denom for w in weights])


def spectral_gap(sd):
    """rho = sum_i p_i q_{t_lambda_i}^(1/2) |W0 lambda_i|, exact; 0 < rho < 1."""
    cfg = sd.cfg
    rs = root_system(cfg.r)
    rho = QSqrt(0)
    for i in range(1, cfg.r + 1):
        e_i = qt_exponent(rs, fundamental_weight(cfg.r, i))
        rho = rho + sd.p[i - 1] * QSqrt.q_power(cfg.q, e_i) * rs.orbit_size(i)
    if not (QSqrt(0) < rho < QSqrt(1)):
        raise KernelError("spectral gap out of range: %r" % (rho,))
    return rho


def _fold_step(rs, lam, i, nu, orbit_set):
    """Dominant target reached from lam by the step nu, folding across walls."""
    mu = tuple(a + b for a, b in zip(lam, nu))
    if not rs.is_dominant(mu):
        mu, _ = rs.dominant_representative(mu)
    step = tuple(a - b for a, b in zip(mu, lam))
    if step not in orbit_set:
        raise InconsistentCountsError(
            "folded target %r of %r leaves the step orbit" % (mu, lam)
        )
    return mu


class StepCounts:
    """Vertex counts K(lam, i, mu) on a truncated cone, with provenance.

    Interior rows are the translation-invariant closed-form stencil.  Boundary
    rows, which the closed form does not cover, are obtained by folding the
    stencil across the chamber walls: steps whose targets land outside the
    cone are reflected back and their counts accumulate on the dominant
    representative.  Every stored row is then validated against the row-sum
    and reversibility constraints exactly; a violation raises.

    (A pure constraint closure from row-sum + reversibility + base case alone,
    as in `solve_boundary_by_constraints`, is underdetermined from rank 3 on,
    so it serves as a cross-check at low rank rather than as the construction.)
    """

    def __init__(self, cfg, window, margin=2, validate=True):
        self.cfg = cfg
        self.window = window
        self.margin = margin
        self.rs = root_system(cfg.r)
        self.orbits = step_orbits(cfg.r)
        self.stencil = {
            i: {nu: interior_count(cfg, i, nu) for nu, _ in self.orbits[i]}
            for i in range(1, cfg.r + 1)
        }
        self.sphere_sizes = {
            i: n_lambda(cfg, fundamental_weight(cfg.r, i)) for i in range(1, cfg.r + 1)
        }
        self.boundary = {}
        self.provenance = {}
        self._build_boundary()
        if validate:
            self._validate()

    def _build_boundary(self):
        cfg, rs = self.cfg, self.rs
        ext = self.window + self.margin
        for lam in cone_window(cfg.r, ext):
            if rs.is_regular_dominant(lam):
                continue
            for i in range(1, cfg.r + 1):
                orbit_set = set(self.stencil[i])
                row = {}
                for nu, k in self.stencil[i].items():
                    mu = _fold_step(rs, lam, i, nu, orbit_set)
                    row[mu] = row.get(mu, 0) + k
                self.boundary[(lam, i)] = row
                for mu in row:
                    self.provenance[(lam, i, mu)] = "solved"

    def _validate(self):
        """Exact row-sum and reversibility checks on every stored boundary row."""
        cfg = self.cfg
        n_cache = {}

        def n_of(m):
            if m not in n_cache:
                n_cache[m] = n_lambda(cfg, m)
            return n_cache[m]

        ext = self.window + self.margin
        for (lam, i), row in self.boundary.items():
            if sum(row.values()) != self.sphere_sizes[i]:
                raise InconsistentCountsError(
                    "row (%r, %d) sums to %d, expected %d"
                    % (lam, i, sum(row.values()), self.sphere_sizes[i])
                )
            i_star = cfg.r + 1 - i
            for mu, k in row.items():
                if sum(mu) > ext:
                    continue
                back = self.row(mu, i_star).get(lam, 0)
                if n_of(lam) * k != n_of(mu) * back:
                    raise InconsistentCountsError(
                        "reversibility fails between (%r, %d) and (%r, %d)"
                        % (lam, i, mu, i_star)
                    )

    # -- public API ------------------------------------------------------

    def row(self, lam, i):
        """Counts {mu: K(lam, i, mu)} for any dominant lam with sum(lam) <= window."""
        if self.rs.is_regular_dominant(lam):
            return {
                tuple(a + b for a, b in zip(lam, nu)): k
                for nu, k in self.stencil[i].items()
            }
        return self.boundary[(lam, i)]

    def provenance_of(self, lam, i, mu):
        if self.rs.is_regular_dominant(lam):
            return "closed_form"
        return self.provenance.get((lam, i, mu), "solved")


def solve_boundary_by_constraints(cfg, window, margin=4):
    """Boundary counts from (row-sum, reversibility, base case) alone.

    Propagates single-unknown consequences, then solves the residual linear
    system exactly.  Raises UnsolvedRowError if a row inside the window stays
    underdetermined, which happens for every window from rank 3 on: the
    truncated constraint system has free directions flowing in from the rim.
    Kept as an independent validator for ranks 1 and 2.
    """
    rs = root_system(cfg.r)
    orbits = step_orbits(cfg.r)
    stencil = {
        i: {nu: interior_count(cfg, i, nu) for nu, _ in orbits[i]}
        for i in range(1, cfg.r + 1)
    }
    sphere_sizes = {
        i: n_lambda(cfg, fundamental_weight(cfg.r, i)) for i in range(1, cfg.r + 1)
    }
    ext = window + margin
    boundary_states = [m for m in cone_window(cfg.r, ext) if not rs.is_regular_dominant(m)]
    n_of = {m: n_lambda(cfg, m) for m in boundary_states}
    rows = {}
    targets = {}
    for lam in boundary_states:
        for i in range(1, cfg.r + 1):
            orbit_set = set(stencil[i])
            targets[(lam, i)] = {
                _fold_step(rs, lam, i, nu, orbit_set) for nu in stencil[i]
            }
            rows[(lam, i)] = {}

    def partner_value(mu, i_star, lam):
        if rs.is_regular_dominant(mu):
            return stencil[i_star].get(tuple(a - b for a, b in zip(lam, mu)))
        row = rows.get((mu, i_star))
        return None if row is None else row.get(lam)

    progress = True
    while progress:
        progress = False
        for (lam, i), tset in targets.items():
            row = rows[(lam, i)]
            i_star = cfg.r + 1 - i
            for mu in tset:
                if mu in row:
                    continue
                pv = partner_value(mu, i_star, lam)
                if pv is None:
                    continue
                n_mu = n_of.get(mu)
                if n_mu is None:
                    n_mu = n_of[mu] = n_lambda(cfg, mu)
                val = Fraction(n_mu * pv, n_of[lam])
                if val.denominator != 1 or val < 0:
                    raise InconsistentCountsError(
                        "reversibility forces invalid count %s at (%r, %d, %r)"
                        % (val, lam, i, mu)
                    )
                row[mu] = int(val)
                progress = True
            missing = [mu for mu in tset if mu not in row]
            if len(missing) == 1:
                val = sphere_sizes[i] - sum(row.values())
                if val < 0:
                    raise InconsistentCountsError(
                        "row sum forces negative count at (%r, %d, %r)"
                        % (lam, i, missing[0])
                    )
                row[missing[0]] = val
                progress = True
            if not missing and sum(row.values()) != sphere_sizes[i]:
                raise InconsistentCountsError(
                    "row (%r, %d) sums to %d, expected %d"
                    % (lam, i, sum(row.values()), sphere_sizes[i])
                )

    # residual coupled system, still only row-sum + reversibility
    unknowns = set()
    for (lam, i), tset in targets.items():
        unknowns.update((lam, i, mu) for mu in tset if mu not in rows[(lam, i)])
    if unknowns:
        eqs = []
        for (lam, i), tset in targets.items():
            missing = [mu for mu in tset if mu not in rows[(lam, i)]]
            if missing:
                coeffs = {(lam, i, mu): Fraction(1) for mu in missing}
                eqs.append(
                    (coeffs, Fraction(sphere_sizes[i] - sum(rows[(lam, i)].values())))
                )
        seen = set()
        for var in unknowns:
            lam, i, mu = var
            back = (mu, cfg.r + 1 - i, lam)
            if back in unknowns and (back, var) not in seen:
                seen.add((var, back))
                n_mu = n_of.get(mu)
                if n_mu is None:
                    n_mu = n_of[mu] = n_lambda(cfg, mu)
                eqs.append(({var: Fraction(n_of[lam]), back: -Fraction(n_mu)}, Fraction(0)))
        for var, val in _eliminate_exact(eqs).items():
            if val.denominator != 1 or val < 0:
                raise InconsistentCountsError(
                    "linear solve forces invalid count %s at %r" % (val, var)
                )
            rows[var[:2]][var[2]] = int(val)

    solved = {}
    for lam in boundary_states:
        if sum(lam) > window:
            continue
        for i in range(1, cfg.r + 1):
            missing = [mu for mu in targets[(lam, i)] if mu not in rows[(lam, i)]]
            if missing:
                raise UnsolvedRowError(
                    "boundary row (lam=%r, i=%d) underdetermined; missing %r"
                    % (lam, i, missing)
                )
            solved[(lam, i)] = dict(rows[(lam, i)])
    return solved


class RadialKernel:
    """One-step radial kernel on {lam dominant : sum(lam) <= window}.

    kind == "plain": rows sum to 1 exactly (elements of Q(sqrt q)) in dict
    storage, or to float precision in direct CSR storage used for large
    windows.  kind == "doob": float rows from the F0 transform, summing to 1
    up to the eigenfunction-identity tolerance.  Rim rows (sum(lam) ==
    window) are empty; dynamic programming asserts they are never fed mass.
    """

    def __init__(self, cfg, window, kind, states, rows=None, csr=None, sd=None, meta=None):
        self.cfg = cfg
        self.window = window
        self.kind = kind
        self.states = states
        self.index = {m: k for k, m in enumerate(states)}
        self.rows = rows
        self._csr = csr
        self.sd = sd
        self.meta = meta or {}

    @property
    def exact(self):
        return self.rows is not None

    def row(self, lam):
        k = self.index[lam]
        if self.rows is not None:
            return self.rows[k]
        mat = self.to_csr()
        lo, hi = mat.indptr[k], mat.indptr[k + 1]
        return {
            self.states[j]: v for j, v in zip(mat.indices[lo:hi], mat.data[lo:hi])
        }

    def to_csr(self):
        if self._csr is not None:
            return self._csr
        n = len(self.states)
        indptr = [0]
        indices = []
        data = []
        for lam, row in zip(self.states, self.rows):
            if sum(lam) < self.window:
                for mu, val in sorted(
                    row.items(), key=lambda kv: self.index.get(kv[0], -1)
                ):
                    j = self.index.get(mu)
                    if j is None:
                        continue
                    indices.append(j)
                    data.append(float(val))
            indptr.append(len(indices))
        self._csr = sp.csr_matrix(
            (np.asarray(data), np.asarray(indices), np.asarray(indptr)), shape=(n, n)
        )
        return self._csr


EXACT_KERNEL_WINDOW = 60  # larger windows assemble straight into float CSR


def assemble_kernel(sd, window, counts=None, mode="auto"):
    """Plain radial kernel: row(lam)[mu] = sum_i p_i K(lam, i, mu).

    mode "exact" keeps every row in Q(sqrt q) and verifies the row sums are
    exactly 1; mode "csr" assembles the float matrix directly, which is what
    the large-window experiments use.
    """
    cfg = sd.cfg
    if mode == "auto":
        mode = "exact" if window <= EXACT_KERNEL_WINDOW else "csr"
    counts = counts or StepCounts(cfg, window)
    states = cone_window(cfg.r, window)
    if mode == "exact":
        rows = []
        for lam in states:
            row = {}
            for i in range(1, cfg.r + 1):
                pi = sd.p[i - 1]
                for mu, k in counts.row(lam, i).items():
                    row[mu] = row.get(mu, QSqrt(0)) + pi * k
            rows.append(row)
            if sum(lam) < window:
                total = QSqrt(0)
                for v in row.values():
                    total = total + v
                if total != QSqrt(1):
                    raise KernelError("row %r sums to %r, expected 1" % (lam, total))
        return RadialKernel(
            cfg, window, "plain", states, rows=rows, sd=sd, meta={"counts": counts}
        )
    return RadialKernel(
        cfg,
        window,
        "plain",
        states,
        csr=_assemble_csr(sd, window, counts, states),
        sd=sd,
        meta={"counts": counts},
    )


def _assemble_csr(sd, window, counts, states):
    cfg = sd.cfg
    rs = root_system(cfg.r)
    n = len(states)
    marr = np.array(states, dtype=np.int64)
    strides = (window + 1) ** np.arange(cfg.r - 1, -1, -1, dtype=np.int64)
    keys = marr @ strides  # sorted ascending because states are lex-sorted
    interior = (marr.min(axis=1) >= 1) & (marr.sum(axis=1) < window)
    rows_idx = []
    cols_idx = []
    vals = []
    # translation-invariant stencil on interior states
    for i in range(1, cfg.r + 1):
        p_i = float(sd.p[i - 1])
        for nu, k in counts.stencil[i].items():
            tgt = marr[interior] + np.asarray(nu, dtype=np.int64)
            tkeys = tgt @ strides
            pos = np.searchsorted(keys, tkeys)
            if np.any(keys[pos] != tkeys):
                raise KernelError("stencil target fell outside the state set")
            rows_idx.append(np.nonzero(interior)[0])
            cols_idx.append(pos)
            vals.append(np.full(interior.sum(), p_i * k))
    # boundary rows from the solved counts
    b_rows, b_cols, b_vals = [], [], []
    for lam in states:
        if rs.is_regular_dominant(lam) or sum(lam) >= window:
            continue
        row = {}
        for i in range(1, cfg.r + 1):
            p_i = float(sd.p[i - 1])
            for mu, k in counts.row(lam, i).items():
                row[mu] = row.get(mu, 0.0) + p_i * k
        src = np.int64(np.searchsorted(keys, np.asarray(lam, dtype=np.int64) @ strides))
        for mu, v in row.items():
            b_rows.append(src)
            b_cols.append(np.searchsorted(keys, np.asarray(mu, dtype=np.int64) @ strides))
            b_vals.append(v)
    rows_all = np.concatenate(rows_idx + [np.asarray(b_rows, dtype=np.int64)])
    cols_all = np.concatenate(cols_idx + [np.asarray(b_cols, dtype=np.int64)])
    vals_all = np.concatenate(vals + [np.asarray(b_vals)])
    mat = sp.csr_matrix((vals_all, (rows_all, cols_all)), shape=(n, n))
    sums = np.asarray(mat.sum(axis=1)).ravel()
    live = marr.sum(axis=1) < window
    dev = np.abs(sums[live] - 1.0).max() if live.any() else 0.0
    if dev > 1e-12:
        raise KernelError("float kernel row sums deviate by %.2e" % dev)
    return mat


def doob_transform(kern, f0_log, rho, tol=1e-6):
    """F0 Doob transform: q(lam, mu) = p(lam, mu) F0(mu)/F0(lam) / rho.

    f0_log maps weights to log F0; the row-sum deviation from 1 is exactly the
    eigenfunction identity residual, so deviations beyond `tol` raise.
    """
    if kern.kind != "plain":
        raise KernelError("doob transform expects a plain kernel")
    rho_f = float(rho)
    if kern.exact:
        rows = []
        worst = 0.0
        for lam, row in zip(kern.states, kern.rows):
            lf_lam = f0_log(lam)
            new = {}
            for mu, val in row.items():
                new[mu] = float(val) * math.exp(f0_log(mu) - lf_lam) / rho_f
            rows.append(new)
            if sum(lam) < kern.window:
                dev = abs(sum(new.values()) - 1.0)
                worst = max(worst, dev)
                if dev > tol:
                    raise KernelError(
                        "doob row %r sums to 1%+.3e; F0 or the boundary solver is wrong"
                        % (lam, sum(new.values()) - 1.0)
                    )
        meta = dict(kern.meta)
        meta["max_row_deviation"] = worst
        return RadialKernel(
            kern.cfg, kern.window, "doob", kern.states, rows=rows, sd=kern.sd, meta=meta
        )
    mat = kern.to_csr().copy()
    lf = np.array([f0_log(m) for m in kern.states])
    row_of = np.repeat(np.arange(len(kern.states)), np.diff(mat.indptr))
    mat.data = mat.data * np.exp(lf[mat.indices] - lf[row_of]) / rho_f
    sums = np.asarray(mat.sum(axis=1)).ravel()
    live = np.array([sum(m) < kern.window for m in kern.states])
    worst = float(np.abs(sums[live] - 1.0).max()) if live.any() else 0.0
    if worst > tol:
        raise KernelError(
            "doob row sums deviate by %.3e; F0 or the boundary solver is wrong" % worst
        )
    meta = dict(kern.meta)
    meta["max_row_deviation"] = worst
    return RadialKernel(
        kern.cfg, kern.window, "doob", kern.states, csr=mat, sd=kern.sd, meta=meta
    )


def eigenfunction_residual(kern, f0_log, rho):
    """max over rows of |sum_mu p(lam,mu) F0(mu) / (rho F0(lam)) - 1|."""
    rho_f = float(rho)
    worst = 0.0
    worst_lam = None
    for lam in kern.states:
        if sum(lam) >= kern.window:
            continue
        lf_lam = f0_log(lam)
        acc = sum(
            float(v) * math.exp(f0_log(mu) - lf_lam)
            for mu, v in kern.row(lam).items()
        )
        dev = abs(acc / rho_f - 1.0)
        if dev > worst:
            worst, worst_lam = dev, lam
    return worst, worst_lam
