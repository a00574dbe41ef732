"""Zero-sum 4-tuples of lattice points (4-correlations).

A 4-correlation is an ordered tuple ``(l1, l2, l3, l4)`` of frequencies with
``l1 + l2 + l3 + l4 = 0``.  It is degenerate when some proper nonempty
subset already sums to zero; every degenerate tuple is a pairing
``{l, -l, m, -m}`` in one of three positions.  The census joins the table of
pair sums ``l1 + l2 = v`` against the pairs summing to ``-v``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import DomainError, SizeError
from .lattice import FrequencySet, enumerate_frequencies, is_admissible

__all__ = [
    "CorrelationCensus",
    "PairTable",
    "pair_table",
    "census_4",
    "brute_force_census",
    "enumerate_x4",
    "x4_scaling",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 5000


@dataclass(frozen=True)
class PairTable:
    """Pairs of frequency rows grouped by their vector sum.

    Rows ``bstart[b]:bstart[b+1]`` of ``(pi, pj)`` share one sum; bucket
    ``bneg[b]`` holds the opposite sum.  With ``ordered=False`` only
    ``pi <= pj`` is stored and ``mult`` is 2 off the diagonal.
    """

    pi: np.ndarray
    pj: np.ndarray
    bucket: np.ndarray
    bstart: np.ndarray
    bneg: np.ndarray
    mult: np.ndarray
    ordered: bool

    @property
    def nbuckets(self) -> int:
        return len(self.bneg)


def _sum_keys(pts: np.ndarray, n: int, pi: np.ndarray, pj: np.ndarray):
    # sums have coordinates in [-2m, 2m]; pack them into one int64
    m = 2 * math.isqrt(n)
    base = 2 * m + 1
    key = np.zeros(len(pi), dtype=np.int64)
    centre = 0
    for k in range(pts.shape[1] - 1, -1, -1):
        key = key * base + (pts[pi, k] + pts[pj, k] + m)
        centre = centre * base + m
    return key, 2 * centre  # key(-v) = 2*centre - key(v)


def pair_table(freq: FrequencySet, ordered: bool = True) -> PairTable:
    N = freq.N
    if ordered:
        pi, pj = np.divmod(np.arange(N * N, dtype=np.int64), N)
    else:
        pi, pj = np.triu_indices(N)
        pi = pi.astype(np.int64)
        pj = pj.astype(np.int64)
    key, twice_centre = _sum_keys(freq.points, freq.n, pi, pj)
    order = np.argsort(key, kind="stable")
    pi, pj, key = pi[order], pj[order], key[order]
    uniq, bstart, bucket = np.unique(key, return_index=True, return_inverse=True)
    bstart = np.append(bstart, len(key)).astype(np.int64)
    bneg = np.searchsorted(uniq, twice_centre - uniq).astype(np.int64)
    mult = np.where(pi == pj, 1.0, 1.0 if ordered else 2.0)
    return PairTable(pi=np.ascontiguousarray(pi), pj=np.ascontiguousarray(pj),
                     bucket=bucket.astype(np.int64).ravel(), bstart=bstart, bneg=bneg,
                     mult=mult, ordered=ordered)


@dataclass(frozen=True)
class CorrelationCensus:
    n: int
    d: int
    N: int
    total_c4: int
    pairing_counts: tuple  # families A (l2=-l1), B (l3=-l1), C (l4=-l1)
    diagonal_counts: tuple  # overlaps A&B, A&C, B&C
    nondegenerate_x4: int
    x4_tuples: np.ndarray | None = field(default=None, repr=False)
    truncated: bool = False

    @property
    def exponent_estimate(self) -> float | None:
        if self.nondegenerate_x4 <= 0 or self.N <= 1:
            return None
        return math.log(self.nondegenerate_x4) / math.log(self.N)

    def decomposition_holds(self) -> bool:
        N = self.N
        return self.total_c4 == 3 * N * N - 3 * N + self.nondegenerate_x4


def census_4(freq: FrequencySet, cap: int = DEFAULT_CAP, list_cap: int = 0) -> CorrelationCensus:
    """Count ordered 4-correlations, their pairing families and the rest.

    ``list_cap`` > 0 also returns up to that many non-degenerate tuples as
    rows of frequency indices; ``truncated`` is set if more exist.
    """
    if freq.N == 0:
        raise DomainError(f"empty frequency set for n={freq.n}, d={freq.d}")
    if freq.N > cap:
        raise SizeError(f"N={freq.N} exceeds the census cap {cap}")
    table = pair_table(freq, ordered=True)
    pts = np.ascontiguousarray(freq.points, dtype=np.int64)
    neg = np.ascontiguousarray(freq.neg_index, dtype=np.int64)
    total, nondeg, fam, diag, listed, overflow = kernels.census_scan(
        pts, neg, table.pi, table.pj, table.bstart, table.bneg, int(list_cap))
    return CorrelationCensus(
        n=freq.n, d=freq.d, N=freq.N, total_c4=int(total),
        pairing_counts=tuple(int(x) for x in fam), diagonal_counts=tuple(int(x) for x in diag),
        nondegenerate_x4=int(nondeg),
        x4_tuples=np.asarray(listed, dtype=np.int64) if list_cap > 0 else None,
        truncated=bool(overflow))


def enumerate_x4(freq: FrequencySet, cap: int = DEFAULT_CAP, max_tuples: int = 10**7) -> np.ndarray:
    """All non-degenerate ordered tuples as an ``(|X|, 4)`` index array."""
    c = census_4(freq, cap=cap, list_cap=max_tuples)
    if c.truncated:
        raise SizeError(f"|X_n(4)| = {c.nondegenerate_x4} exceeds max_tuples={max_tuples}")
    return c.x4_tuples


def brute_force_census(freq: FrequencySet) -> CorrelationCensus:
    """Exhaustive O(N^4) census, written independently of the hash join."""
    pts = freq.points
    N, d = freq.N, freq.d
    neg = np.array([freq.index_of(-p) for p in pts])
    idx = np.arange(N)
    i2, i3, i4 = (g.ravel() for g in np.meshgrid(idx, idx, idx, indexing="ij"))
    hits = []
    for i1 in range(N):
        s = pts[i1] + pts[i2] + pts[i3] + pts[i4]
        ok = ~s.any(axis=1)
        hits.append(np.column_stack([np.full(ok.sum(), i1), i2[ok], i3[ok], i4[ok]]))
    t = np.concatenate(hits)
    a = (t[:, 1] == neg[t[:, 0]]) & (t[:, 3] == neg[t[:, 2]])
    b = (t[:, 2] == neg[t[:, 0]]) & (t[:, 3] == neg[t[:, 1]])
    c = (t[:, 3] == neg[t[:, 0]]) & (t[:, 2] == neg[t[:, 1]])
    degenerate = np.zeros(len(t), dtype=bool)
    for r in (1, 2, 3):
        for comb in itertools.combinations(range(4), r):
            degenerate |= ~pts[t[:, list(comb)]].sum(axis=1).any(axis=1)
    good = t[~degenerate]
    return CorrelationCensus(
        n=freq.n, d=d, N=N, total_c4=len(t),
        pairing_counts=(int(a.sum()), int(b.sum()), int(c.sum())),
        diagonal_counts=(int((a & b).sum()), int((a & c).sum()), int((b & c).sum())),
        nondegenerate_x4=len(good), x4_tuples=good.astype(np.int64))


def x4_scaling(ns, d: int = 3, cap: int = DEFAULT_CAP) -> list:
    """Rows ``(n, N, |X_n(4)|, exponent or None)``."""
    rows = []
    for n in ns:
        if d == 3 and not is_admissible(n):
            raise DomainError(f"n={n} is not admissible")
        freq = enumerate_frequencies(n, d)
        if freq.N <= 1:
            raise DomainError(f"n={n} has N={freq.N}; need N > 1")
        c = census_4(freq, cap=cap)
        rows.append((n, c.N, c.nondegenerate_x4, c.exponent_estimate))
    return rows


@lru_cache(maxsize=16)
def cached_pair_table(n: int, d: int, ordered: bool) -> PairTable:
    return pair_table(enumerate_frequencies(n, d), ordered=ordered)
