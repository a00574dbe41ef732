"""Second and fourth chaotic components of the nodal volume.

All formulas take explicit statistics, so every remainder term at finite
``n`` is carried exactly rather than replaced by its limit.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .coefficients import a_closed_form, beta_coefficient
from .draws import CoefficientDraw
from .statistics import ChaosStatistics, chaos_statistics, engine_for

__all__ = [
    "fourth_chaos",
    "fourth_chaos_bracket",
    "fourth_chaos_d3",
    "fourth_chaos_from_integrals",
    "nodal_length_fourth_chaos",
    "second_chaos",
    "second_chaos_terms",
    "h4_integral_identities",
    "H4Integrals",
    "pairing_decomposition",
    "correlation_sums_brute_force",
]


def _prefactor(n: int, d: int, N: int) -> float:
    # sqrt(n pi / d) Gamma((d+1)/2) / (4 N Gamma(d/2))
    return math.sqrt(n * math.pi / d) * math.exp(gammaln((d + 1) / 2) - gammaln(d / 2)) / (4 * N)


def fourth_chaos_bracket(st: ChaosStatistics) -> float:
    d = st.d
    c = d / (d + 2)
    val = (2 / (d + 2) * st.W**2 - 2 * c * np.sum(st.Wjk**2) - st.R + 3 * c * np.sum(st.Rjk)
           + st.X.real + 2 * np.sum(st.Xkk.real) - c * np.sum(st.Xkkjj.real))
    return float(val)


def fourth_chaos(st: ChaosStatistics) -> float:
    """The fourth-order component of the nodal volume for one draw, any d."""
    return _prefactor(st.n, st.d, st.N) * fourth_chaos_bracket(st)


def fourth_chaos_d3(st: ChaosStatistics) -> float:
    """The d = 3 rewrite with prefactor ``sqrt(n) / (5 sqrt(3) N)``."""
    if st.d != 3:
        raise ValueError("fourth_chaos_d3 needs d = 3")
    br = (st.W**2 - 3 * np.sum(st.Wjk**2) - 2.5 * st.R + 4.5 * np.sum(st.Rjk)
          + 2.5 * st.X.real + 5 * np.sum(st.Xkk.real) - 1.5 * np.sum(st.Xkkjj.real))
    return math.sqrt(st.n) / (5 * math.sqrt(3) * st.N) * float(br)


def nodal_length_fourth_chaos(st: ChaosStatistics) -> float:
    """d = 2 form ``pi sqrt(n/512) / N * [R + W^2 - 2 sum W_jk^2]``.

    X-terms vanish identically in d = 2, and ``sum_jk R_kj = R``, so this is
    the general formula, not an approximation; ``R`` tends to 2.
    """
    if st.d != 2:
        raise ValueError("nodal_length_fourth_chaos needs d = 2")
    br = st.R + st.W**2 - 2 * np.sum(st.Wjk**2)
    return math.pi * math.sqrt(st.n / 512) / st.N * float(br)


def fourth_chaos_from_integrals(h4_f, h2h2_sum, h4_grad_sum, h2h2_offdiag_sum, n, d) -> float:
    """Assemble the component from the four Hermite integrals.

    ``h2h2_sum`` is ``sum_k int H2(f) H2(f_k)``, ``h4_grad_sum`` is
    ``sum_k int H4(f_k)`` and ``h2h2_offdiag_sum`` is
    ``sum_{j != k} int H2(f_j) H2(f_k)`` (ordered pairs).
    """
    b0, b2, b4 = (beta_coefficient(k) for k in (0, 2, 4))
    val = (b4 / 24 * a_closed_form("0", d) * h4_f
           + b2 / 2 * a_closed_form("2k", d) * h2h2_sum
           + b0 * (a_closed_form("4k", d) * h4_grad_sum
                   + a_closed_form("2jk", d) * h2h2_offdiag_sum / 2))
    return 2 * math.pi * math.sqrt(n / d) * val


def second_chaos_terms(draw_or_stats, d: int | None = None):
    """The two pieces of the second-order component, before cancellation."""
    st = draw_or_stats if isinstance(draw_or_stats, ChaosStatistics) else _quadratic_only(draw_or_stats)
    n, d, N = st.n, st.d, st.N
    scale = 2 * math.pi * math.sqrt(n / d)
    # int H2(f) = W / sqrt(N),  int H2(f_k) = d W_kk / sqrt(N)
    t_value = scale * beta_coefficient(2) / 2 * a_closed_form("0", d) * st.W / math.sqrt(N)
    t_grad = scale * beta_coefficient(0) * a_closed_form("2k", d) * d * np.trace(st.Wjk) / math.sqrt(N)
    return float(t_value), float(t_grad)


def second_chaos(draw: CoefficientDraw) -> float:
    t1, t2 = second_chaos_terms(draw)
    return t1 + t2


def _quadratic_only(draw: CoefficientDraw) -> ChaosStatistics:
    eng = engine_for(draw.freq)
    W, Wjk, R, Rjk = eng.quadratic(draw.full[None, :])
    d = eng.d
    z = np.zeros(d, dtype=complex)
    return ChaosStatistics(n=eng.n, d=d, N=eng.N, W=float(W[0]), Wjk=Wjk[0], R=float(R[0]),
                           Rjk=Rjk[0], X=0j, Xkk=z, Xkkjj=np.zeros((d, d), complex))


class H4Integrals(tuple):
    """``(int H4(f), sum_k int H2(f)H2(f_k), sum_k int H4(f_k), sum_{j!=k} int H2(f_j)H2(f_k))``."""

    __slots__ = ()

    def __new__(cls, h4_f, h2h2_sum, h4_grad_sum, h2h2_offdiag_sum):
        return super().__new__(cls, (h4_f, h2h2_sum, h4_grad_sum, h2h2_offdiag_sum))


def h4_integral_identities(draw_or_stats, method: str = "auto") -> H4Integrals:
    """Algebraic values of the four degree-4 Hermite integrals."""
    st = (draw_or_stats if isinstance(draw_or_stats, ChaosStatistics)
          else chaos_statistics(draw_or_stats, method))
    d, N = st.d, st.N
    W, Wjk, R, Rjk = st.W, st.Wjk, st.R, st.Rjk
    X, Xkk, Xkkjj = st.X.real, st.Xkk.real, st.Xkkjj.real
    diag = np.diag(Wjk)
    h4_f = (3 * W**2 - 3 * R + X) / N
    h2h2 = (d * W**2 - d * R - d * Xkk.sum()) / N
    h4_grad = d * d * (3 * np.sum(diag**2) - 3 * np.trace(Rjk) + np.trace(Xkkjj)) / N
    off = ~np.eye(d, dtype=bool)
    h2h2_off = d * d / N * (W**2 - np.sum(diag**2) + 2 * np.sum(Wjk[off] ** 2)
                            - 3 * np.sum(Rjk[off]) + np.sum(Xkkjj[off]))
    return H4Integrals(float(h4_f), float(h2h2), float(h4_grad), float(h2h2_off))


def pairing_decomposition(draw: CoefficientDraw, method: str = "auto") -> np.ndarray:
    """Right-hand sides: pairing families in closed form plus the X sums.

    Entry ``[p, q]`` pairs weight ``w_p`` on ``(l1, l2)`` with ``w_q`` on
    ``(l3, l4)``; index 0 is the constant weight, ``k+1`` is ``l_k l_k``.
    """
    eng = engine_for(draw.freq)
    a = draw.full[None, :]
    return (eng.pairing_terms(a) + eng.x_sums(a, method))[0]


def correlation_sums_brute_force(draw: CoefficientDraw, c4_tuples: np.ndarray) -> np.ndarray:
    """Left-hand sides by direct summation over an explicit list of 4-correlations."""
    pts = draw.freq.points.astype(float)
    a = draw.full
    t = np.asarray(c4_tuples)
    prod = a[t[:, 0]] * a[t[:, 1]] * a[t[:, 2]] * a[t[:, 3]]
    d = draw.freq.d
    lin = np.hstack([np.ones((len(pts), 1)), pts])
    w12 = lin[t[:, 0]] * lin[t[:, 1]]
    w34 = lin[t[:, 2]] * lin[t[:, 3]]
    out = np.einsum("t,tp,tq->pq", prod, w12, w34)
    assert out.shape == (d + 1, d + 1)
    return out
