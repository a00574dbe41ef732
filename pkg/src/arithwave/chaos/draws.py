"""Gaussian coefficient draws with the reality constraint a(-l) = conj(a(l))."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError
from ..lattice import FrequencySet

__all__ = ["CoefficientDraw", "sample_draw", "sample_batch", "full_coefficients"]


def full_coefficients(freq: FrequencySet, half_values: np.ndarray) -> np.ndarray:
    """Expand half-set values (last axis) to all N frequencies."""
    half_values = np.asarray(half_values, dtype=np.complex128)
    out = np.empty(half_values.shape[:-1] + (freq.N,), dtype=np.complex128)
    h = freq.half_index
    out[..., h] = half_values
    out[..., freq.neg_index[h]] = np.conj(half_values)
    return out


@dataclass(frozen=True, eq=False)
class CoefficientDraw:
    """One realization ``{a_l}``; ``values[i]`` belongs to ``freq.half_set[i]``."""

    freq: FrequencySet
    values: np.ndarray = field(repr=False)
    seed: int | None = None

    def __post_init__(self):
        if self.values.shape != (len(self.freq.half_index),):
            raise DomainError(f"expected {len(self.freq.half_index)} half-set values, "
                              f"got shape {self.values.shape}")
        self.values.setflags(write=False)

    @classmethod
    def from_half(cls, freq: FrequencySet, values, seed=None) -> "CoefficientDraw":
        return cls(freq, np.array(values, dtype=np.complex128), seed)

    @classmethod
    def constant(cls, freq: FrequencySet, value: complex = 1.0) -> "CoefficientDraw":
        return cls.from_half(freq, np.full(len(freq.half_index), value, dtype=np.complex128))

    @property
    def full(self) -> np.ndarray:
        """Coefficients for every row of ``freq.points``."""
        return full_coefficients(self.freq, self.values)

    def __getitem__(self, point) -> complex:
        return complex(self.full[self.freq.index_of(point)])

    def shifted(self, x0) -> "CoefficientDraw":
        """Draw of the translated field ``f(x + x0)``."""
        phase = np.exp(2j * np.pi * (self.freq.half_set @ np.asarray(x0, dtype=float)))
        return CoefficientDraw.from_half(self.freq, self.values * phase, self.seed)


def _gaussian_half(rng: np.random.Generator, size) -> np.ndarray:
    z = rng.standard_normal(size + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def sample_draw(freq: FrequencySet, seed: int) -> CoefficientDraw:
    """Re and Im of each half-set coefficient are iid N(0, 1/2)."""
    if freq.N == 0:
        raise DomainError(f"empty frequency set for n={freq.n}, d={freq.d}")
    rng = np.random.default_rng(seed)
    return CoefficientDraw(freq, _gaussian_half(rng, (len(freq.half_index),)), seed)


def sample_batch(freq: FrequencySet, seeds) -> np.ndarray:
    """Full coefficient arrays, one row per seed, identical to ``sample_draw``."""
    h = len(freq.half_index)
    half = np.stack([_gaussian_half(np.random.default_rng(s), (h,)) for s in seeds])
    return full_coefficients(freq, half)
