"""The W, R and X statistics of a coefficient draw.

X-type sums run over ordered non-degenerate 4-correlations.  Two exact
routes are available:

* ``direct``: sum over the enumerated tuples;
* ``complement``: sum over all 4-correlations through pair sums
  ``T_p(v) = sum_{l1 + l2 = v} w_p(l1, l2) a_l1 a_l2`` and subtract the
  three pairing families in closed form.

The weights are ``w_0 = 1`` and ``w_k(l1, l2) = l1_k l2_k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .. import kernels
from ..correlations import DEFAULT_CAP, census_4, pair_table
from ..errors import DependencyError, SizeError
from ..lattice import FrequencySet, enumerate_frequencies
from .draws import CoefficientDraw

__all__ = ["ChaosStatistics", "StatisticsEngine", "chaos_statistics", "engine_for"]

_PAIR_BUDGET = 1 << 24
DIRECT_MAX_N = 128


@dataclass(frozen=True)
class ChaosStatistics:
    n: int
    d: int
    N: int
    W: float
    Wjk: np.ndarray
    R: float
    Rjk: np.ndarray
    X: complex
    Xkk: np.ndarray
    Xkkjj: np.ndarray

    def as_dict(self) -> dict:
        def c(z):
            return [float(np.real(z)), float(np.imag(z))]
        return {
            "n": self.n, "d": self.d, "N": self.N, "W": self.W, "Wjk": self.Wjk.tolist(),
            "R": self.R, "Rjk": self.Rjk.tolist(), "X": c(self.X),
            "Xkk": [c(z) for z in self.Xkk], "Xkkjj": [[c(z) for z in row] for row in self.Xkkjj],
        }


class StatisticsEngine:
    """Precomputed lattice data for evaluating statistics of many draws."""

    def __init__(self, freq: FrequencySet, cap: int = DEFAULT_CAP):
        self.freq = freq
        self.cap = cap
        pts = freq.points.astype(np.float64)
        self.n, self.d, self.N = freq.n, freq.d, freq.N
        d = self.d
        self.pts = pts
        self.quad = np.stack([pts[:, j] * pts[:, k] for j in range(d) for k in range(d)], axis=1)
        self.quart = self.quad**2
        # per-frequency pieces of the pairing terms, index 0 = constant weight
        one = np.ones((self.N, 1))
        self.lin = np.hstack([one, pts])  # w_p(l, .) factor
        self.anti = np.hstack([one, -pts**2])  # w_p(l, -l)
        self.same = np.hstack([one, pts**2])  # w_p(l, l)

    # lattice data, built on first use
    @cached_property
    def x4_tuples(self) -> np.ndarray:
        c = census_4(self.freq, cap=self.cap, list_cap=10**7)
        if c.truncated:
            raise DependencyError("non-degenerate tuples exceed the enumeration cap")
        return c.x4_tuples

    @cached_property
    def unordered_pairs(self):
        t = pair_table(self.freq, ordered=False)
        w = np.empty((len(t.pi), self.d + 1))
        w[:, 0] = t.mult
        for k in range(self.d):
            w[:, k + 1] = t.mult * self.pts[t.pi, k] * self.pts[t.pj, k]
        return t, np.ascontiguousarray(w)

    # statistics
    def quadratic(self, a: np.ndarray):
        """W, Wjk, R, Rjk for a batch ``a`` of shape (M, N)."""
        n, d, N = self.n, self.d, self.N
        p = np.abs(a) ** 2
        q = p - 1.0
        W = q.sum(axis=1) / np.sqrt(N)
        Wjk = (q @ self.quad).reshape(-1, d, d) / (n * np.sqrt(N))
        p2 = p * p
        R = p2.sum(axis=1) / N
        Rjk = (p2 @ self.quart).reshape(-1, d, d) / (n * n * N)
        return W, Wjk, R, Rjk

    def pairing_terms(self, a: np.ndarray) -> np.ndarray:
        """Sum of the pairing families for each weight pair, shape (M, d+1, d+1)."""
        p = np.abs(a) ** 2
        p2 = p * p
        A = p @ self.anti  # (M, K)
        K = self.d + 1
        out = A[:, :, None] * A[:, None, :]
        for i in range(K):
            for j in range(K):
                b = p @ (self.lin[:, i] * self.lin[:, j])
                over = p2 @ (2 * self.anti[:, i] * self.anti[:, j] + self.same[:, i] * self.same[:, j])
                out[:, i, j] += 2 * b * b - over
        return out

    def correlation_sums_c4(self, a: np.ndarray) -> np.ndarray:
        """Weighted sums over all 4-correlations, shape (M, d+1, d+1).

        ``sum_v T_p(v) T_q(-v)`` with ``T_q(-v) = conj(T_q(v))``.
        """
        t, w = self.unordered_pairs
        return kernels.pair_gram(np.ascontiguousarray(a), t.pi, t.pj, t.bstart, t.bneg, w)

    def x_sums(self, a: np.ndarray, method: str = "auto") -> np.ndarray:
        """Weighted sums over non-degenerate tuples, shape (M, d+1, d+1)."""
        if method == "auto":
            method = "direct" if self.N <= DIRECT_MAX_N else "complement"
        if method == "complement":
            return self.correlation_sums_c4(a) - self.pairing_terms(a)
        if method != "direct":
            raise ValueError(f"unknown method {method!r}")
        tup = self.x4_tuples
        K = self.d + 1
        out = np.zeros((a.shape[0], K, K), dtype=np.complex128)
        if len(tup) == 0:
            return out
        w12 = self.lin[tup[:, 0]] * self.lin[tup[:, 1]]
        w34 = self.lin[tup[:, 2]] * self.lin[tup[:, 3]]
        step = max(1, _PAIR_BUDGET // len(tup))
        for r0 in range(0, a.shape[0], step):
            blk = a[r0:r0 + step]
            prod = blk[:, tup[:, 0]] * blk[:, tup[:, 1]] * blk[:, tup[:, 2]] * blk[:, tup[:, 3]]
            out[r0:r0 + step] = np.einsum("mt,tp,tq->mpq", prod, w12, w34)
        return out

    def statistics_batch(self, a: np.ndarray, method: str = "auto") -> list:
        a = np.atleast_2d(a)
        W, Wjk, R, Rjk = self.quadratic(a)
        S = self.x_sums(a, method)
        n, N, d = self.n, self.N, self.d
        out = []
        for m in range(a.shape[0]):
            out.append(ChaosStatistics(
                n=n, d=d, N=N, W=float(W[m]), Wjk=Wjk[m], R=float(R[m]), Rjk=Rjk[m],
                X=complex(S[m, 0, 0] / N), Xkk=S[m, 1:, 0] / (n * N),
                Xkkjj=S[m, 1:, 1:] / (n * n * N)))
        return out


@lru_cache(maxsize=8)
def _engine(n: int, d: int) -> StatisticsEngine:
    return StatisticsEngine(enumerate_frequencies(n, d))


def engine_for(freq: FrequencySet) -> StatisticsEngine:
    eng = _engine(freq.n, freq.d)
    return eng


def chaos_statistics(draw: CoefficientDraw, method: str = "auto") -> ChaosStatistics:
    """W, R and X statistics of one draw.

    ``method`` is ``"direct"`` (enumerated tuples; raises ``DependencyError``
    if they cannot be enumerated), ``"complement"`` or ``"auto"``.
    """
    eng = engine_for(draw.freq)
    try:
        return eng.statistics_batch(draw.full[None, :], method)[0]
    except SizeError as exc:
        raise DependencyError(str(exc)) from exc
