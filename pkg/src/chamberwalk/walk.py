"""n-step laws by dynamic programming, Monte Carlo paths, bridges, rescaling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exactnum import QSqrt
from .rootsys import root_system

EXACT_DP_WINDOW = 40  # beyond this, exact rational DP gives way to float


class WindowOverflowError(Exception):
    """Probability mass reached the truncation rim; enlarge the window."""


class BridgeParityError(Exception):
    """p_N(O,O) vanished; pick the other parity for N."""


@dataclass
class LawOnCone:
    """A finitely supported law on the dominant cone after n steps."""

    support: dict
    n: int
    kind: str
    window: int
    exact: bool

    def mass(self, lam):
        zero = QSqrt(0) if self.exact else 0.0
        return self.support.get(lam, zero)

    def total(self):
        if self.exact:
            tot = QSqrt(0)
            for v in self.support.values():
                tot = tot + v
            return tot
        return float(sum(self.support.values()))

    def to_float(self):
        return {k: float(v) for k, v in self.support.items()}


def dp_law(kernel, start, n, mode="auto"):
    """Exact or float n-step law of the radial chain started at `start`.

    mode "auto" keeps plain kernels exact up to window EXACT_DP_WINDOW;
    the Doob kernel is float-only since F0 is.
    """
    if mode == "auto":
        mode = (
            "exact"
            if (kernel.kind == "plain" and kernel.exact and kernel.window <= EXACT_DP_WINDOW)
            else "float"
        )
    if mode == "exact":
        if kernel.kind != "plain" or not kernel.exact:
            raise ValueError("exact DP requires a plain kernel with exact rows")
        return _dp_exact(kernel, start, n)
    laws = dp_evolve(kernel, start, [n])
    return laws[n]


def _dp_exact(kernel, start, n):
    law = {tuple(start): QSqrt(1)}
    for step in range(n):
        nxt = {}
        for lam, mass in law.items():
            if sum(lam) >= kernel.window:
                raise WindowOverflowError(
                    "mass at %r reached the rim at step %d" % (lam, step)
                )
            for mu, p in kernel.row(lam).items():
                prev = nxt.get(mu)
                add = mass * p
                nxt[mu] = add if prev is None else prev + add
        law = nxt
    out = LawOnCone(law, n, kernel.kind, kernel.window, exact=True)
    if out.total() != QSqrt(1):
        raise ArithmeticError("exact DP lost mass: total %r" % (out.total(),))
    return out


def dp_evolve(kernel, start, snapshots):
    """Float DP over the sparse kernel, returning laws at the requested steps."""
    snapshots = sorted(set(snapshots))
    mat = kernel.to_csr()
    k = len(kernel.states)
    rim = np.array([sum(m) >= kernel.window for m in kernel.states])
    p = np.zeros(k)
    p[kernel.index[tuple(start)]] = 1.0
    out = {}
    if snapshots and snapshots[0] == 0:
        out[0] = _law_from_vector(kernel, p, 0)
        snapshots = snapshots[1:]
    step = 0
    for target in snapshots:
        while step < target:
            p = p @ mat
            step += 1
            if step % 64 == 0 or step == target:
                if p[rim].sum() > 1e-12:
                    raise WindowOverflowError(
                        "float DP: rim mass %.2e at step %d" % (p[rim].sum(), step)
                    )
        total = p.sum()
        if abs(total - 1.0) > 1e-9:
            raise WindowOverflowError("float DP lost mass: total %r" % total)
        out[target] = _law_from_vector(kernel, p, step)
    return out


def _law_from_vector(kernel, p, n):
    support = {m: float(v) for m, v in zip(kernel.states, p) if v != 0.0}
    return LawOnCone(support, n, kernel.kind, kernel.window, exact=False)


# ---------------------------------------------------------------------------
# bridges
# ---------------------------------------------------------------------------


def bridge_ratio(kernel, f0_log, rho, n, big_n, lam):
    """The bridge Radon-Nikodym factor p_{N-n}(O, x)/p_N(O, O) and its limit.

    Per-vertex probabilities are DP masses divided by sphere sizes (the walk
    law is uniform on each sphere).  Returns (ratio, target) with target =
    rho^-n F0(lam)/F0(0).
    """
    table = bridge_table(kernel, f0_log, rho, [n], [big_n], [tuple(lam)])
    entry = table[(n, big_n, tuple(lam))]
    return entry["ratio"], entry["target"]


def bridge_table(kernel, f0_log, rho, n_list, big_n_list, lam_list):
    """All bridge ratios for a grid of (n, N, lambda), one DP sweep."""
    from .qcount import n_lambda

    if kernel.kind != "plain":
        raise ValueError("the bridge is defined for the unconditioned walk")
    cfg = kernel.cfg
    zero = (0,) * cfg.r
    need = set()
    for big_n in big_n_list:
        need.add(big_n)
        for n in n_list:
            if n > big_n:
                raise ValueError("bridge needs N >= n")
            need.add(big_n - n)
    laws = dp_evolve(kernel, zero, sorted(need))
    rho_f = float(rho)
    lf0_zero = f0_log(zero)
    out = {}
    for big_n in big_n_list:
        p_return = laws[big_n].mass(zero)
        if p_return <= 0:
            raise BridgeParityError(
                "p_N(O,O) = 0 at N=%d; use the other parity of N" % big_n
            )
        for n in n_list:
            law = laws[big_n - n]
            for lam in lam_list:
                lam = tuple(lam)
                per_vertex = law.mass(lam) / n_lambda(cfg, lam)
                ratio = per_vertex / p_return
                target = rho_f ** (-n) * math.exp(f0_log(lam) - lf0_zero)
                out[(n, big_n, lam)] = {"ratio": ratio, "target": target}
    return out


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def _sampler_arrays(kernel):
    """Per-row cumulative probabilities and targets, padded to equal width."""
    cached = kernel.meta.get("_sampler")
    if cached is not None:
        return cached
    mat = kernel.to_csr()
    k = len(kernel.states)
    row_sizes = np.diff(mat.indptr)
    width = max(1, int(row_sizes.max()))
    cdf = np.ones((k, width))
    tgt = np.zeros((k, width), dtype=np.int64)
    valid = row_sizes > 0
    for idx in range(k):
        lo, hi = mat.indptr[idx], mat.indptr[idx + 1]
        if lo == hi:
            tgt[idx, :] = idx
            continue
        probs = mat.data[lo:hi]
        cols = mat.indices[lo:hi]
        acc = np.cumsum(probs)
        n_row = hi - lo
        cdf[idx, :n_row] = acc
        cdf[idx, n_row - 1 :] = max(acc[-1], 1.0)
        tgt[idx, :n_row] = cols
        tgt[idx, n_row:] = cols[-1]
    kernel.meta["_sampler"] = (cdf, tgt, valid)
    return cdf, tgt, valid


def make_rng(seed):
    """The project-wide counter-based generator (Philox) for a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def mc_states(kernel, start, n_steps, n_paths, seed, observer=None):
    """Vectorized simulation of n_paths radial walks for n_steps steps.

    `observer(step, states)` is called after every step (and once at step 0);
    returns the final state indices.  Deterministic for a fixed seed.
    """
    cdf, tgt, valid = _sampler_arrays(kernel)
    rng = make_rng(seed)
    s = np.full(n_paths, kernel.index[tuple(start)], dtype=np.int64)
    if observer is not None:
        observer(0, s)
    for step in range(1, n_steps + 1):
        if not valid[s].all():
            raise WindowOverflowError("a path reached the truncation rim")
        u = rng.random(n_paths)
        j = (cdf[s] < u[:, None]).sum(axis=1)
        s = tgt[s, j]
        if observer is not None:
            observer(step, s)
    return s


def mc_paths(kernel, start, n_steps, n_paths, seed):
    """Full path sample as an (n_paths, n_steps+1) array of state indices."""
    out = np.zeros((n_paths, n_steps + 1), dtype=np.int64)

    def observer(step, states):
        out[:, step] = states

    mc_states(kernel, start, n_steps, n_paths, seed, observer)
    return out


def mc_snapshots(kernel, start, steps, n_paths, seed):
    """State indices at the requested steps only."""
    steps = sorted(set(steps))
    out = {}

    def observer(step, states):
        if step in wanted:
            out[step] = states.copy()

    wanted = set(steps)
    mc_states(kernel, start, max(steps), n_paths, seed, observer)
    return out


def mc_sup_norm(kernel, start, n_steps, n_paths, seed):
    """Running maximum of the ambient norm |lambda_k| along each path."""
    rs = root_system(kernel.cfg.r)
    norms = np.array(
        [math.sqrt(float(rs.ambient_norm2(m))) for m in kernel.states]
    )
    sup = np.zeros(n_paths)

    def observer(step, states):
        np.maximum(sup, norms[states], out=sup)

    mc_states(kernel, start, n_steps, n_paths, seed, observer)
    return sup


def empirical_law(kernel, states):
    """Empirical LawOnCone from an array of state indices."""
    counts = np.bincount(states, minlength=len(kernel.states))
    n = counts.sum()
    support = {
        kernel.states[i]: counts[i] / n for i in np.nonzero(counts)[0]
    }
    return LawOnCone(support, -1, kernel.kind, kernel.window, exact=False)


def total_variation(law_a, law_b):
    keys = set(law_a.support) | set(law_b.support)
    return 0.5 * sum(
        abs(float(law_a.mass(k)) - float(law_b.mass(k))) for k in keys
    )


# ---------------------------------------------------------------------------
# rescaling
# ---------------------------------------------------------------------------


@dataclass
class ScaledPath:
    """A radial path rescaled by 1/sqrt(N) in space and 1/N in time."""

    times: np.ndarray
    points: np.ndarray  # ambient coordinates, shape (len, r+1)
    n_scale: int
    start_label: tuple = field(default=None)

    def norms(self):
        return np.linalg.norm(self.points, axis=1)


def rescale(kernel, path_states, n_scale, a=None):
    rs = root_system(kernel.cfg.r)
    amb = np.array(
        [[float(c) for c in rs.ambient(m)] for m in kernel.states]
    )
    pts = amb[path_states] / math.sqrt(n_scale)
    times = np.arange(len(path_states)) / n_scale
    return ScaledPath(times, pts, n_scale, start_label=a)


def nearest_weight(r, point_ambient):
    """A dominant weight at minimal ambient distance from the given chamber point."""
    rs = root_system(r)
    base = [point_ambient[i] - point_ambient[i + 1] for i in range(r)]
    best = None
    best_d = None
    from itertools import product

    center = [max(0, round(b)) for b in base]
    for delta in product((-1, 0, 1), repeat=r):
        m = tuple(int(c + d) for c, d in zip(center, delta))
        if any(x < 0 for x in m):
            continue
        amb = [float(c) for c in rs.ambient(m)]
        d = sum((x - float(y)) ** 2 for x, y in zip(amb, point_ambient))
        if best_d is None or d < best_d - 1e-15:
            best, best_d = m, d
    return best
