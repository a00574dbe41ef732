"""Grid synthesis of the random wave and its normalized gradient.

``f(x) = N^{-1/2} sum a_l e(<l, x>)`` and
``f_k(x) = i sqrt(d / (n N)) sum l_k a_l e(<l, x>)`` on the nodes
``x = j / G`` of the torus.  Grid averages of trigonometric polynomials of
degree below ``G`` are exact, which is what the quadrature checks rely on.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .chaos.coefficients import hermite
from .chaos.draws import CoefficientDraw, sample_batch
from .chaos.projections import H4Integrals
from .errors import DomainError, ResolutionError
from .lattice import FrequencySet

__all__ = [
    "FieldGrid",
    "synthesize",
    "evaluate_at",
    "covariance_theory",
    "covariance_check",
    "grid_integral_H",
    "grid_h4_integrals",
    "default_grid",
    "write_field",
    "read_field",
]

_MAGIC = b"AWFG"
_HEADER = struct.Struct("<4siqiq")  # magic, d, n, G, seed


@dataclass(frozen=True, eq=False)
class FieldGrid:
    d: int
    n: int
    G: int
    values: np.ndarray = field(repr=False)
    gradient: tuple = field(repr=False)
    seed: int | None = None
    imag_residue: float = 0.0

    @property
    def spacing(self) -> float:
        return 1.0 / self.G

    def gradient_norm(self) -> np.ndarray:
        """``|grad f|`` on the grid: ``2 pi sqrt(n/d) |(f_1, ..., f_d)|``."""
        if not self.gradient:
            raise ValueError("grid was synthesized without the gradient")
        s = np.zeros_like(self.values)
        for g in self.gradient:
            s += g * g
        return 2 * math.pi * math.sqrt(self.n / self.d) * np.sqrt(s)


def default_grid(n: int, factor: int = 4) -> int:
    """Smallest power of two exceeding ``factor * sqrt(n)``."""
    G = 1
    while G <= factor * math.sqrt(n):
        G *= 2
    return G


def _check_resolution(n: int, G: int, factor: int = 2) -> None:
    if G <= factor * math.sqrt(n):
        raise ResolutionError(f"G={G} must exceed {factor}*sqrt(n)={factor * math.sqrt(n):.3f}")


def _synth_fft(freq: FrequencySet, coeffs: np.ndarray, G: int, workers: int) -> np.ndarray:
    # coefficients are Hermitian, so only the half spectrum with last index
    # in [0, G/2] is stored; G > 2 sqrt(n) keeps the Nyquist plane empty
    d = freq.d
    keep = freq.points[:, -1] >= 0
    cube = np.zeros((G,) * (d - 1) + (G // 2 + 1,), dtype=np.complex128)
    idx = tuple((freq.points[keep] % G).T)
    np.add.at(cube, idx, coeffs[keep])
    return scipy.fft.irfftn(cube, s=(G,) * d, workers=workers) * G**d


def _synth_direct(freq: FrequencySet, coeffs: np.ndarray, G: int) -> np.ndarray:
    d = freq.d
    axis = np.arange(G) / G
    # separable phases e(l_k x_k), contracted one frequency at a time
    out = np.zeros((G,) * d, dtype=np.complex128)
    for lam, c in zip(freq.points, coeffs):
        term = np.array(c, dtype=np.complex128)
        for k in range(d):
            ph = np.exp(2j * np.pi * lam[k] * axis)
            term = np.multiply.outer(term, ph)
        out += term
    return out


def synthesize(draw: CoefficientDraw, G: int, method: str = "fft", workers: int = 1,
               gradient: bool = True) -> FieldGrid:
    """Field values, and the normalized gradient unless ``gradient=False``."""
    freq = draw.freq
    n, d, N = freq.n, freq.d, freq.N
    _check_resolution(n, G)
    if method not in ("fft", "direct"):
        raise ValueError(f"unknown synthesis method {method!r}")
    a = draw.full
    pts = freq.points.astype(np.float64)
    blocks = [a / math.sqrt(N)]
    if gradient:
        blocks += [1j * math.sqrt(d / (n * N)) * pts[:, k] * a for k in range(d)]
    if method == "fft":
        # the half-spectrum transform assumes a_{-l} = conj(a_l); report any breach
        resid = float(np.max(np.abs(a[freq.neg_index] - np.conj(a)))) / math.sqrt(N)
        real = [np.ascontiguousarray(_synth_fft(freq, c, G, workers)) for c in blocks]
    else:
        grids = [_synth_direct(freq, c, G) for c in blocks]
        resid = max(float(np.max(np.abs(g.imag))) for g in grids)
        real = [np.ascontiguousarray(g.real) for g in grids]
    return FieldGrid(d=d, n=n, G=G, values=real[0], gradient=tuple(real[1:]),
                     seed=draw.seed, imag_residue=resid)


def evaluate_at(freq: FrequencySet, a_full: np.ndarray, x) -> np.ndarray:
    """``f`` at the point ``x`` for a batch of coefficient rows."""
    ph = np.exp(2j * np.pi * (freq.points @ np.asarray(x, dtype=float)))
    return (np.atleast_2d(a_full) @ ph).real / math.sqrt(freq.N)


def covariance_theory(freq: FrequencySet, x, y) -> float:
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return float(np.mean(np.cos(2 * np.pi * (freq.points @ diff))))


def covariance_check(freq: FrequencySet, M: int, x, y, seed: int = 0) -> float:
    """Monte Carlo ``E[f(x) f(y)]`` minus the exact covariance."""
    if M < 1000:
        raise DomainError(f"need at least 1000 draws, got {M}")
    a = sample_batch(freq, range(seed, seed + M))
    est = float(np.mean(evaluate_at(freq, a, x) * evaluate_at(freq, a, y)))
    return est - covariance_theory(freq, x, y)


_INTEGRANDS = ("H2(f)", "H2(f_k)", "H4(f)", "H4(f_k)", "H2(f)H2(f_k)", "H2(f_j)H2(f_k)")


def grid_integral_H(grid: FieldGrid, which: str, k: int | None = None, j: int | None = None) -> float:
    """Grid average of a Hermite integrand (exact once ``G > 4 sqrt(n)``)."""
    _check_resolution(grid.n, grid.G, factor=4)
    f, g = grid.values, grid.gradient
    if which == "H2(f)":
        v = hermite(2, f)
    elif which == "H4(f)":
        v = hermite(4, f)
    elif which == "H2(f_k)":
        v = hermite(2, g[k])
    elif which == "H4(f_k)":
        v = hermite(4, g[k])
    elif which == "H2(f)H2(f_k)":
        v = hermite(2, f) * hermite(2, g[k])
    elif which == "H2(f_j)H2(f_k)":
        v = hermite(2, g[j]) * hermite(2, g[k])
    else:
        raise DomainError(f"unknown integrand {which!r}; choose from {_INTEGRANDS}")
    return float(np.mean(v))


def grid_h4_integrals(grid: FieldGrid) -> H4Integrals:
    """The four degree-4 integrals, summed over axes as in the algebraic identities."""
    d = grid.d
    h2h2 = sum(grid_integral_H(grid, "H2(f)H2(f_k)", k=k) for k in range(d))
    h4g = sum(grid_integral_H(grid, "H4(f_k)", k=k) for k in range(d))
    off = sum(grid_integral_H(grid, "H2(f_j)H2(f_k)", j=j, k=k)
              for j in range(d) for k in range(d) if j != k)
    return H4Integrals(grid_integral_H(grid, "H4(f)"), h2h2, h4g, off)


def write_field(path, grid: FieldGrid) -> None:
    """Header ``(d, n, G, seed)`` then the values as row-major float64."""
    seed = -1 if grid.seed is None else int(grid.seed)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, grid.d, grid.n, grid.G, seed))
        fh.write(np.ascontiguousarray(grid.values, dtype="<f8").tobytes())


def read_field(path):
    """Returns ``(d, n, G, seed, values)``."""
    with open(path, "rb") as fh:
        magic, d, n, G, seed = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != _MAGIC:
            raise DomainError(f"{path} is not a field dump")
        values = np.frombuffer(fh.read(), dtype="<f8").reshape((G,) * d)
    return d, n, G, (None if seed < 0 else seed), values.copy()
