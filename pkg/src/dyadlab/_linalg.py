"""Shared dense linear algebra helpers (power iteration and friends)."""

from __future__ import annotations

import numpy as np

__all__ = ["spectral_norm_power", "spectral_norm_upper"]


def spectral_norm_power(A, tol=1e-10, max_iter=5000, seed=0):
    """Largest singular value via power iteration on the Gram matrix.

    Returns ``(value, iterations)``.  The value is a Rayleigh-quotient lower
    bound that converges to the spectral norm; iteration stops when the
    relative update drops below ``tol``.
    """
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0, 0
    gram = A.T @ A
    n = gram.shape[0]
    rng = np.random.default_rng(seed)
    x = np.ones(n) + 1e-3 * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    prev = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        y = gram @ x
        norm_y = np.linalg.norm(y)
        if norm_y == 0.0:
            # x is in the kernel; restart once from a random direction
            x = rng.standard_normal(n)
            nx = np.linalg.norm(x)
            if nx == 0.0:
                return 0.0, it
            x /= nx
            continue
        value = float(np.sqrt(norm_y))
        x = y / norm_y
        if prev > 0.0 and abs(value - prev) <= tol * value:
            prev = value
            break
        prev = value
    return prev, it


def spectral_norm_upper(A):
    """A cheap certified upper bound: ``sqrt(min(|A|_1 * |A|_inf, |A^T A|_inf))``."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    one = np.abs(A).sum(axis=0).max()
    inf = np.abs(A).sum(axis=1).max()
    gram_inf = np.abs(A.T @ A).sum(axis=1).max()
    return float(np.sqrt(min(one * inf, gram_inf)))
