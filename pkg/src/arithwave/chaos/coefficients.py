"""Hermite polynomials and the chaos coefficients of the nodal volume.

``beta`` are the Hermite coefficients of the Dirac mass at 0 and ``a(2s)``
those of the Euclidean norm ``|Z|`` of a standard Gaussian vector:

    |Z| = sum_s a(s) prod_j H_{s_j}(Z_j),   a(s) = E[|Z| prod H_{s_j}(Z_j)] / prod s_j!

Only even multi-indices carry weight.  Everything below takes the *half*
index ``s`` and returns ``a(2s)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_genlaguerre, roots_jacobi

from ..errors import DomainError, NumericError

__all__ = [
    "hermite",
    "beta_coefficient",
    "a_coefficient",
    "a_closed_form",
    "a_quadrature",
    "gradient_norm_coefficient",
    "ChaosCoefficients",
    "chaos_coefficients",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)
MAX_HERMITE_ORDER = 64


def hermite(k: int, x):
    """Probabilists' Hermite polynomial ``He_k(x)``; works on arrays."""
    if k < 0 or k > MAX_HERMITE_ORDER:
        raise DomainError(f"Hermite order must be in [0, {MAX_HERMITE_ORDER}], got {k}")
    x = np.asarray(x, dtype=np.float64)
    h_prev, h = np.ones_like(x), x.copy()
    if k == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    for j in range(1, k):
        h_prev, h = h, x * h - j * h_prev
    return h if h.ndim else float(h)


def beta_coefficient(k: int) -> float:
    """``He_k(0) / sqrt(2 pi)`` for even ``k``."""
    if k < 0 or k % 2:
        raise DomainError(f"beta is only defined for even orders, got {k}")
    # He_{2m}(0) = (-1)^m (2m-1)!!
    m = k // 2
    double_fact = math.prod(range(2 * m - 1, 0, -2)) if m else 1
    return (-1) ** m * double_fact / SQRT_2PI


def _gamma_ratio(a: float, b: float) -> float:
    return math.exp(gammaln(a) - gammaln(b))


def a_coefficient(s, d: int, max_terms: int = 200) -> float:
    """``a(2s)`` from the non-central chi expansion.

    The outer sum runs over ``i = |j|`` for multi-indices ``j <= s``; terms
    with ``i > |s|`` are empty, so the sum is finite.  ``max_terms`` guards
    against runaway inputs.
    """
    s = tuple(int(v) for v in s)
    if len(s) != d:
        raise DomainError(f"multi-index {s} has length {len(s)}, expected {d}")
    if min(s) < 0:
        raise DomainError(f"multi-index {s} has negative entries")
    total = 0.0
    top = sum(s)
    if top + 1 > max_terms:
        raise NumericError(f"series for a(2s) needs {top + 1} terms > max_terms={max_terms}")
    for i in range(top + 1):
        gamma_i = math.sqrt(2.0) * _gamma_ratio(d / 2 + i + 0.5, d / 2 + i) / (math.factorial(i) * 2**i)
        inner = 0.0
        for j in itertools.product(*(range(v + 1) for v in s)):
            if sum(j) != i:
                continue
            multinom = math.factorial(i) / math.prod(math.factorial(v) for v in j)
            rest = [sv - jv for sv, jv in zip(s, j)]
            inner += (multinom * (-1) ** sum(rest)
                      / (math.prod(math.factorial(r) for r in rest) * 2 ** sum(rest)))
        total += gamma_i * inner
    if not math.isfinite(total):
        raise NumericError("a(2s) series produced a non-finite value")
    return total


def a_closed_form(kind: str, d: int) -> float:
    """Closed forms for ``kind`` in {"0", "2k", "4k", "2jk"}."""
    g = math.exp(gammaln((d + 1) / 2))
    if kind == "0":
        return math.sqrt(2.0) * g / math.gamma(d / 2)
    if kind == "2k":
        return g / (2 * math.sqrt(2.0) * math.gamma((d + 2) / 2))
    if kind == "4k":
        return -g / (16 * math.sqrt(2.0) * math.gamma((d + 4) / 2))
    if kind == "2jk":
        return -g / (8 * math.sqrt(2.0) * math.gamma((d + 4) / 2))
    raise DomainError(f"unknown closed form {kind!r}")


def _sphere_rule(d: int, order: int):
    """Nodes and weights integrating polynomials of degree <= ``order`` on S^{d-1}.

    Hyperspherical angles: Gauss-Jacobi in ``t_i = cos(theta_i)`` with weight
    ``(1 - t^2)^((d - i - 2)/2)`` and the trapezoid rule in the last angle.
    Weights sum to the surface area of the sphere.
    """
    m = order // 2 + 2
    nphi = order + 2
    phi = 2 * np.pi * np.arange(nphi) / nphi
    nodes = np.column_stack([np.cos(phi), np.sin(phi)])
    weights = np.full(nphi, 2 * np.pi / nphi)
    for i in range(d - 3, -1, -1):
        # build S^{k} from S^{k-1}: x = (t, sqrt(1-t^2) * y)
        alpha = (d - i - 3) / 2
        t, wt = roots_jacobi(m, alpha, alpha)
        r = np.sqrt(1 - t * t)
        nodes = np.concatenate([np.column_stack([np.full(len(nodes), ti), ri * nodes])
                                for ti, ri in zip(t, r)])
        weights = np.concatenate([wi * weights for wi in wt])
    return nodes, weights


def a_quadrature(s, d: int) -> float:
    """``a(2s)`` by exact quadrature of ``E[|Z| prod He_{2 s_j}(Z_j)] / prod (2 s_j)!``.

    In polar coordinates the radial integral is generalized Gauss-Laguerre in
    ``r^2/2`` and the angular one a product rule, both exact for the
    polynomial part.
    """
    s = [int(v) for v in s]
    deg = 2 * sum(s)
    m = deg // 2 + 2
    t, wt = roots_genlaguerre(m, (d - 1) / 2)
    r = np.sqrt(2 * t)
    omega, wo = _sphere_rule(d, deg)
    z = r[:, None, None] * omega[None, :, :]
    vals = np.ones(z.shape[:2])
    for j, sj in enumerate(s):
        vals = vals * hermite(2 * sj, z[:, :, j])
    # int |z| g(z) e^{-|z|^2/2} dz = 2^{(d-1)/2} int_0^inf t^{(d-1)/2} e^{-t} int_S g
    integral = 2 ** ((d - 1) / 2) * np.einsum("i,j,ij->", wt, wo, vals)
    norm = (2 * np.pi) ** (-d / 2) / math.prod(math.factorial(2 * v) for v in s)
    return float(integral * norm)


def gradient_norm_coefficient(index, d: int) -> float:
    """Coefficient for a full multi-index: 0 if any entry is odd, else ``a(index/2)``."""
    index = tuple(int(v) for v in index)
    if any(v % 2 for v in index):
        return 0.0
    return a_coefficient(tuple(v // 2 for v in index), d)


@dataclass(frozen=True)
class ChaosCoefficients:
    d: int
    beta: dict
    a: dict  # half multi-index s -> a(2s)


@lru_cache(maxsize=None)
def chaos_coefficients(d: int, max_order: int = 4) -> ChaosCoefficients:
    beta = {k: beta_coefficient(k) for k in range(0, max_order + 1, 2)}
    a = {}
    for p in range(max_order // 2 + 1):
        for s in itertools.product(range(p + 1), repeat=d):
            if sum(s) == p:
                a[s] = a_coefficient(s, d)
    return ChaosCoefficients(d=d, beta=beta, a=a)
