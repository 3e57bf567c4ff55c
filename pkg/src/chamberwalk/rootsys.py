"""Exact geometry and combinatorics of the A_r root system.

Weights are stored as tuples of r integers (coordinates in the fundamental
weight basis), so all lattice combinatorics stays in integer arithmetic.
Ambient coordinates in the trace-zero hyperplane of R^(r+1) are derived
views with rational entries.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb


@dataclass(frozen=True)
class RankConfig:
    """Rank r of the root system and regularity parameter q of the building."""

    r: int
    q: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("rank must be >= 1")
        if self.q < 2:
            raise ValueError("q must be >= 2")


class WeylElement:
    """A permutation of the r+1 ambient coordinates.

    ``images[i]`` is the index the i-th coordinate is sent to, so the action
    on an ambient vector v is (w v)[images[i]] = v[i].
    """

    __slots__ = ("images", "_length")

    def __init__(self, images):
        self.images = tuple(images)
        self._length = None

    def apply(self, v):
        out = [None] * len(self.images)
        for i, j in enumerate(self.images):
            out[j] = v[i]
        return tuple(out)

    def inverse(self):
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return WeylElement(inv)

    def compose(self, other):
        """self after other: (self*other) v = self(other(v))."""
        return WeylElement(tuple(self.images[j] for j in other.images))

    @property
    def length(self):
        # number of positive roots e_i - e_j (i<j) sent to negative ones
        if self._length is None:
            im = self.images
            n = len(im)
            self._length = sum(
                1 for i in range(n) for j in range(i + 1, n) if im[i] > im[j]
            )
        return self._length

    @property
    def sign(self):
        return -1 if self.length % 2 else 1

    def is_identity(self):
        return all(i == j for i, j in enumerate(self.images))

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return "WeylElement%r" % (self.images,)


class RootSystem:
    """Roots, weights and Weyl-group operations for A_r."""

    def __init__(self, r):
        if r < 1:
            raise ValueError("rank must be >= 1")
        self.r = r
        self.n = r + 1
        # positive roots e_i - e_j as index pairs, 0-based, i < j
        self.positive_pairs = [
            (i, j) for i in range(self.n) for j in range(i + 1, self.n)
        ]
        self.num_positive = len(self.positive_pairs)

    # ---- basis vectors -------------------------------------------------

    def simple_roots(self):
        """alpha_i = e_i - e_{i+1} as integer ambient vectors."""
        out = []
        for i in range(self.r):
            v = [0] * self.n
            v[i], v[i + 1] = 1, -1
            out.append(tuple(v))
        return out

    def positive_roots(self):
        out = []
        for i, j in self.positive_pairs:
            v = [0] * self.n
            v[i], v[j] = 1, -1
            out.append(tuple(v))
        return out

    def fundamental_weights(self):
        """Dual basis to the simple roots, as ambient vectors with Fraction entries."""
        out = []
        for j in range(1, self.n):
            head = Fraction(self.n - j, self.n)
            tail = Fraction(-j, self.n)
            out.append(tuple(head if k < j else tail for k in range(self.n)))
        return out

    # ---- weight coordinate conversions ---------------------------------

    def partition_rep(self, m):
        """Cumulative coordinates (p_0,...,p_r) with p_k = sum_{t>=k} m_t, p_r = 0."""
        p = [0] * self.n
        acc = 0
        for k in range(self.r - 1, -1, -1):
            acc += m[k]
            p[k] = acc
        return tuple(p)

    def from_partition_rep(self, p):
        return tuple(p[k] - p[k + 1] for k in range(self.r))

    def ambient(self, m):
        """Ambient coordinates of a weight, exact rationals summing to zero."""
        p = self.partition_rep(m)
        shift = Fraction(sum(p), self.n)
        return tuple(Fraction(pk) - shift for pk in p)

    def from_ambient(self, v):
        m = []
        for k in range(self.r):
            d = v[k] - v[k + 1]
            if d != int(d):
                raise ValueError("ambient vector is not in the weight lattice")
            m.append(int(d))
        return tuple(m)

    # ---- pairings -------------------------------------------------------

    def pairing(self, pair, m):
        """<e_i - e_j, lambda(m)> for a positive-root index pair, an integer."""
        i, j = pair
        return sum(m[i:j])

    def all_pairings(self, m):
        return [self.pairing(pr, m) for pr in self.positive_pairs]

    def is_dominant(self, m):
        return all(c >= 0 for c in m)

    def is_regular_dominant(self, m):
        return all(c >= 1 for c in m)

    def pi(self, m):
        """pi(lambda) = prod over positive roots of <alpha, lambda>, an integer."""
        out = 1
        for pr in self.positive_pairs:
            out *= self.pairing(pr, m)
            if out == 0:
                return 0
        return out

    # ---- Weyl group ------------------------------------------------------

    def weyl_group(self):
        """The full group as permutations; materialized only for r <= 8."""
        if self.r > 8:
            raise ValueError("refusing to materialize W0 for r > 8")
        return [WeylElement(p) for p in itertools.permutations(range(self.n))]

    def weyl_orbit(self, m):
        """The W0-orbit of a weight, in fundamental coordinates."""
        p = self.partition_rep(m)
        return {
            self.from_partition_rep(perm)
            for perm in set(itertools.permutations(p))
        }

    def dominant_representative(self, m):
        """The dominant weight in the orbit of m and a minimal-length w with w m dominant.

        Ties in the stabilizer are broken by stable sorting, which yields the
        unique Weyl element of minimal length among those sorting m.
        """
        p = self.partition_rep(m)
        order = sorted(range(self.n), key=lambda k: (-p[k], k))
        images = [0] * self.n
        for new_pos, old_pos in enumerate(order):
            images[old_pos] = new_pos
        w = WeylElement(images)
        lam = self.from_partition_rep(tuple(p[k] for k in order))
        return lam, w

    def apply_weyl(self, w, m):
        p = self.partition_rep(m)
        return self.from_partition_rep(w.apply(p))

    # ---- metric ----------------------------------------------------------

    @property
    def norm_ratio(self):
        """The constant c with ||x||^2 = c |x|^2, c = 2^(r-2) / (2^r - 1)."""
        return Fraction(2) ** (self.r - 2) / (2**self.r - 1)

    def h0(self):
        """Total size of the union of fundamental orbits, 2^(r+1) - 2."""
        return 2 ** (self.n) - 2

    def ambient_norm2(self, m):
        v = self.ambient(m)
        return sum(c * c for c in v)

    def fundamental_orbit_vectors(self):
        """Ambient vectors of all weights in the orbits of the fundamental weights."""
        out = []
        for i in range(self.r):
            e = tuple(0 if k != i else 1 for k in range(self.r))
            for nu in sorted(self.weyl_orbit(e)):
                out.append(self.ambient(nu))
        return out

    def cnorm2(self, x, tol=1e-12):
        """||x||^2 computed both as the orbit sum and as c |x|^2; they must agree.

        x may be a weight (tuple of r ints) or an ambient vector of length r+1.
        """
        if len(x) == self.r and all(isinstance(c, int) for c in x):
            v = self.ambient(x)
            exact = True
        else:
            if len(x) != self.n:
                raise ValueError("expected a weight or an ambient vector")
            v = tuple(x)
            exact = all(isinstance(c, (int, Fraction)) for c in v)
        orbit_sum = 0
        for nu in _orbit_vector_cache(self.r):
            pairing = sum(a * b for a, b in zip(nu, v))
            orbit_sum += pairing * pairing
        orbit_val = orbit_sum / Fraction(self.h0()) if exact else orbit_sum / self.h0()
        norm2 = sum(c * c for c in v)
        closed = self.norm_ratio * norm2 if exact else float(self.norm_ratio) * norm2
        if exact:
            if orbit_val != closed:
                raise ArithmeticError(
                    "norm identity violated exactly: %s != %s" % (orbit_val, closed)
                )
            return closed
        if abs(orbit_val - closed) > tol * max(1.0, abs(closed)):
            raise ArithmeticError(
                "norm identity violated: %r vs %r" % (orbit_val, closed)
            )
        return closed

    def gram_fundamental(self):
        """Gram matrix <lambda_i, lambda_j> of the fundamental weights, exact."""
        fw = self.fundamental_weights()
        return [
            [sum(a * b for a, b in zip(fw[i], fw[j])) for j in range(self.r)]
            for i in range(self.r)
        ]

    def orbit_size(self, i):
        """|W0 lambda_i| = binomial(r+1, i) for the i-th fundamental weight (1-based)."""
        return comb(self.n, i)


@functools.lru_cache(maxsize=None)
def root_system(r):
    return RootSystem(r)


@functools.lru_cache(maxsize=None)
def _orbit_vector_cache(r):
    return tuple(root_system(r).fundamental_orbit_vectors())


def fundamental_weight(r, i):
    """The weight m with a single 1 in slot i (1-based)."""
    return tuple(1 if k == i - 1 else 0 for k in range(r))


def cone_window(r, window):
    """All dominant weights with coordinate sum <= window, lexicographically sorted."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for c in range(remaining + 1):
            rec(prefix + [c], remaining - c, slots - 1)

    rec([], window, r)
    out.sort()
    return out
