"""q-power bookkeeping: translation lengths, Poincare polynomials, sphere sizes."""

from __future__ import annotations

import functools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .rootsys import RankConfig, RootSystem, root_system


@dataclass(frozen=True)
class QExponent:
    """A power q^e with integer exponent e, kept exact as a rational."""

    q: int
    exponent: int

    @property
    def value(self):
        return Fraction(self.q) ** self.exponent


def qt_exponent(rs: RootSystem, m):
    """sum over positive roots of <alpha, m>; valid for any weight, any sign."""
    return sum((k + 1) * (rs.r - k) * m[k] for k in range(rs.r))


def q_t(cfg: RankConfig, m):
    """q_{t_lambda} for dominant lambda: q to the sum of positive pairings."""
    rs = root_system(cfg.r)
    if not rs.is_dominant(m):
        raise ValueError("q_t requires a dominant weight; use q_tilde instead")
    return QExponent(cfg.q, qt_exponent(rs, m))


def q_tilde(cfg: RankConfig, m):
    """The signed extension of q_t to the whole weight lattice."""
    return QExponent(cfg.q, qt_exponent(root_system(cfg.r), m))


def q_factorial(k, t):
    """[k]_t! = prod_{j<=k} (1 + t + ... + t^(j-1))."""
    out = Fraction(1)
    for j in range(2, k + 1):
        out *= sum(t**i for i in range(j))
    return out


def poincare(elements, q):
    """sum over w of q^(-l(w)) for an explicit set of Weyl elements."""
    return sum(Fraction(1, q ** w.length) for w in elements)


@functools.lru_cache(maxsize=None)
def w0_poincare(r, q):
    """W0(q^-1) for A_r, the q^-1-factorial of r+1."""
    return q_factorial(r + 1, Fraction(1, q))


def stabilizer_blocks(rs: RootSystem, m):
    """Multiplicities of equal ambient coordinates; the stabilizer is their Young subgroup."""
    p = rs.partition_rep(m)
    return sorted(Counter(p).values(), reverse=True)


def stabilizer_poincare(cfg: RankConfig, m):
    """W0lambda(q^-1) via the parabolic product over blocks of equal coordinates."""
    rs = root_system(cfg.r)
    t = Fraction(1, cfg.q)
    out = Fraction(1)
    for b in stabilizer_blocks(rs, m):
        out *= q_factorial(b, t)
    return out


def n_lambda(cfg: RankConfig, m):
    """Sphere cardinality N_lambda = W0(q^-1)/W0lambda(q^-1) * q_{t_lambda}."""
    rs = root_system(cfg.r)
    if not rs.is_dominant(m):
        raise ValueError("N_lambda requires a dominant weight")
    val = (
        w0_poincare(cfg.r, cfg.q)
        / stabilizer_poincare(cfg, m)
        * q_t(cfg, m).value
    )
    if val.denominator != 1:
        raise ArithmeticError("N_lambda is not an integer for %r: %s" % (m, val))
    n = int(val)
    if n <= 0:
        raise ArithmeticError("N_lambda must be positive, got %d" % n)
    return n


def big_pi(rs: RootSystem, m):
    """Pi(lambda) = prod over positive roots of (1 + <alpha, lambda>), exact integer."""
    out = 1
    for pr in rs.positive_pairs:
        out *= 1 + rs.pairing(pr, m)
    return out
