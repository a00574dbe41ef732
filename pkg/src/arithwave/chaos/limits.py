"""Limit laws, limiting covariance and variance targets."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy import stats
from scipy.special import gammainc

from ..errors import DomainError
from ..lattice import FrequencySet, is_admissible

__all__ = [
    "W_ORDER",
    "covariance_matrix_limit",
    "covariance_matrix_exact",
    "limit_law_sample",
    "limit_law_cdf",
    "limit_law_moments",
    "LimitLaw",
    "D2LimitLaw",
    "d2_limit_law",
    "limit_law",
    "theoretical_variance",
    "VARIANCE_CONSTANT",
]

W_ORDER = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
VARIANCE_CONSTANT = Fraction(32, 375)
assert Fraction(2**5, 5**3 * 3) == VARIANCE_CONSTANT


def _limit_entry(p, q) -> float:
    # lim (2 / (n^2 N)) sum l_i l_j l_k l_m: 2/5 for iiii, 2/15 for iijj, 0 otherwise
    idx = sorted(p + q)
    counts = sorted(idx.count(v) for v in set(idx))
    if counts == [4]:
        return 2 / 5
    if counts == [2, 2]:
        return 2 / 15
    return 0.0


def covariance_matrix_limit() -> np.ndarray:
    """Limiting covariance of ``(W11, W12, W13, W22, W23, W33)`` in d = 3."""
    return np.array([[_limit_entry(p, q) for q in W_ORDER] for p in W_ORDER])


def covariance_matrix_exact(freq: FrequencySet) -> np.ndarray:
    """Exact ``Cov(W_kl, W_jm) = 2/(n^2 N) sum_l l_k l_l l_j l_m`` for this n."""
    if freq.d != 3:
        raise DomainError("the 6-component W vector is defined for d = 3")
    pts = freq.points.astype(np.float64)
    cols = np.stack([pts[:, p] * pts[:, q] for p, q in W_ORDER], axis=1)
    return 2 * cols.T @ cols / (freq.n**2 * freq.N)


class LimitLaw:
    """The law of ``(5 - chi2_5) / sqrt(10)``."""

    scale = math.sqrt(10.0)

    def sample(self, seed, m: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        chi = (rng.standard_normal((m, 5)) ** 2).sum(axis=1)
        return (5.0 - chi) / self.scale

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        u = 5.0 - self.scale * t  # P(Y <= t) = P(chi >= u)
        out = np.where(u > 0, 1.0 - gammainc(2.5, np.maximum(u, 0) / 2.0), 1.0)
        return out if out.ndim else float(out)

    def moments(self):
        return 0.0, 1.0, -math.sqrt(8 / 5)


class D2LimitLaw:
    """The law of ``[2 - (1+eta) X1^2 - (1-eta) X2^2] / (2 sqrt(1 + eta^2))``."""

    def __init__(self, eta: float):
        if not 0.0 <= eta <= 1.0:
            raise DomainError(f"eta must lie in [0, 1], got {eta}")
        self.eta = float(eta)
        self.norm = 2 * math.sqrt(1 + self.eta**2)

    def sample(self, seed, m: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((m, 2)) ** 2
        return (2 - (1 + self.eta) * x[:, 0] - (1 - self.eta) * x[:, 1]) / self.norm

    def cdf(self, t, nodes: int = 4096):
        # P(Y <= t) = P(Q >= s), Q = (1+eta) X1^2 + (1-eta) X2^2, s = 2 - norm * t
        t = np.atleast_1d(np.asarray(t, dtype=float))
        s = 2.0 - self.norm * t
        a, b = 1 + self.eta, 1 - self.eta
        if b == 0.0:
            out = np.where(s > 0, 1.0 - stats.chi2.cdf(np.maximum(s, 0) / a, 1), 1.0)
        else:
            # P(a X1^2 + b X2^2 <= s) = (1/2pi) int (1 - exp(-s / (2 (a cos^2 + b sin^2)))) dtheta
            th = 2 * np.pi * (np.arange(nodes) + 0.5) / nodes
            q = a * np.cos(th) ** 2 + b * np.sin(th) ** 2
            sp = np.maximum(s, 0)[:, None]
            inner = 1.0 - np.exp(-sp / (2 * q[None, :]))
            out = np.where(s > 0, 1.0 - inner.mean(axis=1), 1.0)
        return out if out.size > 1 else float(out[0])

    def moments(self):
        a, b = 1 + self.eta, 1 - self.eta
        var = 2 * (a * a + b * b) / self.norm**2
        third = -8 * (a**3 + b**3) / self.norm**3
        return 0.0, var, third / var**1.5


def limit_law() -> LimitLaw:
    return LimitLaw()


def d2_limit_law(eta: float) -> D2LimitLaw:
    return D2LimitLaw(eta)


def limit_law_sample(seed, m):
    return LimitLaw().sample(seed, m)


def limit_law_cdf(t):
    return LimitLaw().cdf(t)


def limit_law_moments():
    return LimitLaw().moments()


def theoretical_variance(n: int, N: int, d: int = 3, fourier4: float | None = None) -> float:
    """``(32/375) n / N^2`` in d = 3; ``c_n E_n / N^2`` with ``c_n = (1 + mu4^2)/512`` in d = 2."""
    if d == 3:
        if not is_admissible(n):
            raise DomainError(f"n={n} is not admissible")
        return float(VARIANCE_CONSTANT) * n / N**2
    if d == 2:
        if fourier4 is None:
            raise DomainError("d = 2 needs the Fourier coefficient mu_n(4)")
        c_n = (1 + fourier4**2) / 512
        return c_n * 4 * math.pi**2 * n / N**2
    raise DomainError(f"unsupported dimension {d}")
