"""Lattice points on spheres: frequency sets, multiplicities and moments.

The frequency set of the eigenvalue ``4 pi^2 n`` on the d-torus is the set
of integer vectors of squared length ``n``.  Everything here is exact
integer arithmetic until the very last conversion to float.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, RangeError

__all__ = [
    "LatticePoint",
    "FrequencySet",
    "MomentReport",
    "enumerate_frequencies",
    "multiplicity",
    "multiplicity_by_factorization",
    "is_admissible",
    "moment_report",
    "odd_moment_sums",
    "equidistribution_trend",
    "scan_admissible",
]

# n is squared inside int64 products; keep n^2 representable.
MAX_N = 2**31 - 1
_BLOCK = 1 << 20
SUPPORTED_DIMS = (2, 3)

LatticePoint = tuple  # tuple of d Python ints


def _isqrt_vec(r: np.ndarray) -> np.ndarray:
    """Exact floor square root of a non-negative int64 array."""
    s = np.floor(np.sqrt(r.astype(np.float64))).astype(np.int64)
    s -= (s * s > r)
    s += ((s + 1) * (s + 1) <= r)
    return s


def _check_dim(d: int) -> None:
    if d not in SUPPORTED_DIMS:
        raise DomainError(f"dimension must be 2 or 3, got {d}")


@dataclass(frozen=True, eq=False)
class FrequencySet:
    """Integer vectors of squared norm ``n`` in lexicographic order.

    ``points`` is an ``(N, d)`` int64 array.  ``half_index`` selects one
    representative per antipodal pair (the lexicographically larger one),
    and ``neg_index[i]`` is the row of ``-points[i]``.
    """

    n: int
    d: int
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.points.setflags(write=False)

    @property
    def N(self) -> int:
        return int(self.points.shape[0])

    def __len__(self) -> int:
        return self.N

    @cached_property
    def half_index(self) -> np.ndarray:
        # rows whose first nonzero coordinate is positive
        pts = self.points
        first = np.argmax(pts != 0, axis=1)
        mask = pts[np.arange(len(pts)), first] > 0
        idx = np.flatnonzero(mask)
        idx.setflags(write=False)
        return idx

    @property
    def half_set(self) -> np.ndarray:
        return self.points[self.half_index]

    @cached_property
    def neg_index(self) -> np.ndarray:
        # lexicographic order reverses under negation
        idx = np.arange(self.N)[::-1].copy()
        idx.setflags(write=False)
        return idx

    @cached_property
    def _lookup(self) -> dict:
        return {tuple(int(c) for c in p): i for i, p in enumerate(self.points)}

    def index_of(self, point: Sequence[int]) -> int:
        """Row of ``point``; raises ``KeyError`` if it is not in the set."""
        return self._lookup[tuple(int(c) for c in point)]

    def __contains__(self, point) -> bool:
        return tuple(int(c) for c in point) in self._lookup

    def as_tuples(self) -> list:
        return [tuple(int(c) for c in p) for p in self.points]


def enumerate_frequencies(n: int, d: int) -> FrequencySet:
    """All ``lam`` in Z^d with ``|lam|^2 == n``, lexicographically sorted.

    Runs over the first ``d-1`` coordinates (vectorised in blocks) and
    completes the last one by an exact integer square root, O(n^((d-1)/2))
    work.
    """
    n = int(n)
    _check_dim(d)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if n > MAX_N:
        raise RangeError(f"n={n} exceeds the supported bound {MAX_N}")

    m = math.isqrt(n)
    chunks = []
    if d == 2:
        x = np.arange(-m, m + 1, dtype=np.int64)
        r = n - x * x
        y = _isqrt_vec(r)
        ok = y * y == r
        x, y = x[ok], y[ok]
        chunks.append(np.column_stack([x, y]))
        chunks.append(np.column_stack([x, -y])[y > 0])
    else:
        # blocks of x against every y, z by integer square root
        ay = np.arange(-m, m + 1, dtype=np.int64)
        step = max(1, _BLOCK // len(ay))
        for x0 in range(-m, m + 1, step):
            ax = np.arange(x0, min(x0 + step, m + 1), dtype=np.int64)
            x, y = (v.ravel() for v in np.meshgrid(ax, ay, indexing="ij"))
            r = n - x * x - y * y
            keep = r >= 0
            x, y, r = x[keep], y[keep], r[keep]
            z = _isqrt_vec(r)
            ok = z * z == r
            x, y, z = x[ok], y[ok], z[ok]
            chunks.append(np.column_stack([x, y, z]))
            chunks.append(np.column_stack([x, y, -z])[z > 0])

    pts = np.concatenate(chunks) if chunks else np.empty((0, d), np.int64)
    pts = pts.reshape(-1, d)
    order = np.lexsort(pts.T[::-1])
    return FrequencySet(n=n, d=d, points=np.ascontiguousarray(pts[order]))


def multiplicity(n: int, d: int) -> int:
    return enumerate_frequencies(n, d).N


def multiplicity_by_factorization(n: int) -> int:
    """Number of representations of ``n`` as a sum of two squares.

    ``4 * prod(b_j + 1)`` over primes ``p_j = 1 mod 4`` dividing ``n`` to
    the power ``b_j``; zero if a prime ``3 mod 4`` has odd exponent.
    """
    from sympy import factorint

    n = int(n)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    count = 4
    for p, e in factorint(n).items():
        if p % 4 == 3 and e % 2:
            return 0
        if p % 4 == 1:
            count *= e + 1
    return count


def is_admissible(n: int) -> bool:
    """True iff ``n mod 8`` is not 0, 4 or 7."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    return n % 8 not in (0, 4, 7)


@dataclass(frozen=True)
class MomentReport:
    n: int
    d: int
    N: int
    quadratic: np.ndarray  # exact integer d x d
    quartic_axis: np.ndarray  # per axis, sum lam_k^4 / (n^2 N)
    quartic_cross: dict  # (j, k) with j < k -> sum lam_j^2 lam_k^2 / (n^2 N)
    fourier4: complex | None = None


def _exact_pts(freq: FrequencySet) -> np.ndarray:
    # int64 is exact as long as N * n^2 fits; otherwise use Python ints
    if freq.N * freq.n**2 < 2**62:
        return freq.points
    return freq.points.astype(object)


def moment_report(freq: FrequencySet) -> MomentReport:
    if freq.N == 0:
        raise DomainError(f"empty frequency set for n={freq.n}, d={freq.d}")
    n, d, N = freq.n, freq.d, freq.N
    pts = _exact_pts(freq)
    quad = pts.T @ pts
    sq = pts * pts
    quartic_axis = np.array([int(v) for v in (sq * sq).sum(axis=0)], dtype=np.float64)
    quartic_axis /= n * n * N
    cross = {}
    for j, k in itertools.combinations(range(d), 2):
        cross[(j, k)] = int((sq[:, j] * sq[:, k]).sum()) / (n * n * N)
    f4 = None
    if d == 2:
        z = freq.points[:, 0] + 1j * freq.points[:, 1]
        f4 = complex(np.mean(z**4) / n**2)
    return MomentReport(n=n, d=d, N=N, quadratic=np.asarray(quad), quartic_axis=quartic_axis,
                        quartic_cross=cross, fourier4=f4)


def odd_moment_sums(freq: FrequencySet, max_degree: int = 4) -> dict:
    """Exact sums of every monomial with an odd exponent, keyed by exponent."""
    pts = _exact_pts(freq)
    if max_degree > 4:
        pts = freq.points.astype(object)
    powers = [np.stack([pts[:, k] ** a for a in range(max_degree + 1)], axis=1)
              for k in range(freq.d)]
    if pts.dtype != object:
        # one contraction gives every monomial sum at once
        spec = ",".join(f"i{c}" for c in "abc"[:freq.d]) + "->" + "abc"[:freq.d]
        table = np.einsum(spec, *powers)
    else:
        table = None
    out = {}
    for alpha in itertools.product(range(max_degree + 1), repeat=freq.d):
        if sum(alpha) > max_degree or all(a % 2 == 0 for a in alpha):
            continue
        if table is not None:
            out[alpha] = int(table[alpha])
        else:
            mono = np.ones(len(pts), dtype=object)
            for k, a in enumerate(alpha):
                mono = mono * powers[k][:, a]
            out[alpha] = int(mono.sum())
    return out


def equidistribution_trend(ns: Iterable[int]) -> list:
    """Rows ``(n, |axis - 1/5|, |cross - 1/15|)`` for d=3 frequency sets.

    The deviations are maxima over axes and axis pairs; by the signed
    permutation symmetry they coincide anyway.
    """
    rows = []
    for n in ns:
        if not is_admissible(n):
            raise DomainError(f"n={n} is not admissible (n mod 8 in {{0,4,7}})")
        rep = moment_report(enumerate_frequencies(n, 3))
        dev_axis = float(np.max(np.abs(rep.quartic_axis - 0.2)))
        dev_cross = max(abs(v - 1 / 15) for v in rep.quartic_cross.values())
        rows.append((n, dev_axis, dev_cross))
    return rows


def scan_admissible(n_min: int, n_max: int, min_multiplicity: int = 1, d: int = 3) -> list:
    """``(n, N_n)`` for admissible n in ``[n_min, n_max]`` with ``N_n`` large enough."""
    out = []
    for n in range(max(1, n_min), n_max + 1):
        if d == 3 and not is_admissible(n):
            continue
        N = multiplicity(n, d)
        if N >= min_multiplicity and N > 0:
            out.append((n, N))
    return out
