"""Piecewise Chebyshev interpolation on uniform panels of [0, u_max]."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft


def nodes(width: float, n_panels: int, n_nodes: int) -> np.ndarray:
    """First-kind Chebyshev nodes of every panel, shape (n_panels, n_nodes)."""
    x = np.cos(math.pi * (np.arange(n_nodes) + 0.5) / n_nodes)
    left = np.arange(n_panels) * width
    return left[:, None] + 0.5 * width * (x[None, :] + 1)


def clenshaw(coef: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Chebyshev series, one coefficient row per point (coef shape (npts, ncoef))."""
    b1 = np.zeros(x.shape, dtype=coef.dtype)
    b2 = np.zeros(x.shape, dtype=coef.dtype)
    for k in range(coef.shape[1] - 1, 0, -1):
        b1, b2 = 2 * x * b1 - b2 + coef[:, k], b1
    return x * b1 - b2 + coef[:, 0]


@dataclass(eq=False)
class Panels:
    """Chebyshev panels; ``error`` is an a-posteriori bound from the coefficient tails."""

    width: float
    coef: np.ndarray

    @classmethod
    def from_values(cls, width: float, values: np.ndarray) -> "Panels":
        n = values.shape[1]
        coef = sfft.dct(values, type=2, axis=1) / n
        coef[:, 0] *= 0.5
        return cls(width, coef)

    @property
    def u_max(self) -> float:
        return self.width * self.coef.shape[0]

    @property
    def error(self) -> float:
        return float(10 * np.max(np.abs(self.coef[:, -3:]).sum(axis=1)) + 1e-15)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        k = np.clip((u / self.width).astype(np.int64), 0, self.coef.shape[0] - 1)
        x = 2 * (u - k * self.width) / self.width - 1
        return clenshaw(self.coef[k], x)
