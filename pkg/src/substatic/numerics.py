"""Small numerical helpers: Gauss-Legendre rules, Richardson steps, inverse-power fits."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(npts: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(npts)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gl_nodes(a, b, npts: int = 16):
    """Nodes and weights of an ``npts``-point rule on each interval ``[a_i, b_i]``.

    Returns arrays of shape ``a.shape + (npts,)``.
    """
    x, w = gauss_legendre(npts)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def gl_integrate(func, a, b, npts: int = 16):
    nodes, weights = gl_nodes(a, b, npts)
    return np.sum(weights * func(nodes), axis=-1)


def richardson(coarse, fine, order: int = 2):
    """Combine estimates at step h and h/2 that share an O(h^order) error."""
    return fine + (fine - coarse) / (2.0**order - 1.0)


def fit_inverse_powers(t, y, terms: int) -> np.ndarray:
    """Least-squares coefficients of ``y ~ sum_j a_j t^{-j}``, ``j < terms``."""
    t = np.asarray(t, dtype=float)
    design = np.stack([t ** (-j) for j in range(terms)], axis=1)
    coeffs, *_ = np.linalg.lstsq(design, np.asarray(y, dtype=float), rcond=None)
    return coeffs


def sphere_area(dim: int) -> float:
    """Area of the unit round sphere S^dim."""
    from math import gamma, pi

    return 2.0 * pi ** ((dim + 1) / 2.0) / gamma((dim + 1) / 2.0)


def ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    return sphere_area(n - 1) / n
