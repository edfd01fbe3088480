"""Schur multipliers and quadratic-form norms of interaction matrices.

An interaction matrix built from a finite martingale pair is symmetric with
vanishing row and column sums.  Two norm-like quantities drive the desk
checks:

* ``norm2``: the bilinear sup ``|alpha^T Lambda beta|`` over independent sign
  boxes ``|alpha|, |beta| <= 1`` (computed exactly by vertex enumeration for
  sizes up to 16);
* ``norm1``: the quadratic sup ``|alpha^T Lambda alpha|`` over the balanced
  box ``|alpha| <= 1/4``, ``sum(alpha) = 0`` (lower bounds by enumeration and
  projected gradient ascent).

Their ratio is the object of the equivalence experiments; ``16 * norm1 <=
norm2`` is a hard inequality, while the upper ratio is probed empirically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._linalg import spectral_norm_power

__all__ = [
    "KG_DEFAULT",
    "LambdaMatrix",
    "AlphaSequence",
    "lambda_matrix",
    "random_admissible_lambda",
    "norm2",
    "norm2_report",
    "norm1_lower",
    "schur_product",
    "random_sign_matrix",
    "multiplier_norm_lower",
    "multiplier_norm_report",
    "equivalence_report",
    "rank_one_multiplier_check",
    "sign_multiplier_check",
    "find_alpha",
]

# Upper bound for the real Grothendieck constant used in reported thresholds.
KG_DEFAULT = 1.783

_ENUM_MAX = 16  # largest size handled by exact vertex enumeration


@dataclass
class LambdaMatrix:
    """A symmetric matrix with zero row/column sums, tagged by its depth k."""

    values: np.ndarray
    k: int

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise ValueError(f"expected a square matrix, got {vals.shape}")
        if vals.shape[0] != 2 ** self.k:
            raise ValueError(
                f"size {vals.shape[0]} does not match 2**k = {2 ** self.k}")
        if vals.dtype != object:
            vals = vals.astype(float)
        self.values = vals
        self._check_admissible()

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def exact(self):
        return self.values.dtype == object

    def as_float(self):
        if not self.exact:
            return self.values
        return np.vectorize(float)(self.values).astype(float)

    def _check_admissible(self):
        vals = self.values
        if self.exact:
            for i in range(self.n):
                for j in range(i + 1, self.n):
                    if vals[i, j] != vals[j, i]:
                        raise ValueError("matrix is not symmetric")
            for i in range(self.n):
                if sum(vals[i, :]) != 0:
                    raise ValueError(f"row {i} sum is nonzero")
        else:
            scale = max(1.0, float(np.abs(vals).max()))
            if np.abs(vals - vals.T).max() > 1e-9 * scale:
                raise ValueError("matrix is not symmetric")
            if np.abs(vals.sum(axis=1)).max() > 1e-9 * scale * self.n:
                raise ValueError("row sums are nonzero")

    def abs_sum(self):
        if self.exact:
            return sum(abs(v) for v in self.values.ravel())
        return float(np.abs(self.values).sum())


@dataclass
class AlphaSequence:
    """A modulation sequence: ``|alpha_i| <= 1/4`` and ``sum(alpha) = 0``."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.dtype != object:
            vals = vals.astype(float)
            if np.abs(vals).max() > 0.25 + 1e-12:
                raise ValueError("entries must lie in [-1/4, 1/4]")
            if abs(vals.sum()) > 1e-10 * max(1.0, np.abs(vals).max()) * vals.size:
                raise ValueError("entries must sum to zero")
        else:
            from fractions import Fraction
            if any(abs(v) > Fraction(1, 4) for v in vals):
                raise ValueError("entries must lie in [-1/4, 1/4]")
            if sum(vals) != 0:
                raise ValueError("entries must sum to zero")
        self.values = vals

    @property
    def n(self):
        return self.values.shape[0]

    def as_float(self):
        if self.values.dtype == object:
            return np.vectorize(float)(self.values).astype(float)
        return self.values


def lambda_matrix(tree, k):
    """Interaction matrix of a martingale pair at depth ``k`` below the root.

    Entry ``(K, L)`` is ``<x_K, y_L> + <x_L, y_K>`` where ``x_K`` is the
    ``f``-side increment ``(f_K - f_root) / 2**k`` and ``y_L`` the ``g``-side
    one.  Symmetry is structural; zero row sums follow from the martingale
    dynamics.
    """
    root = tree.root_point()
    pts = tree.points_at_depth(k)
    nn = 2 ** k
    if len(pts) != nn:
        raise ValueError(f"expected {nn} points at depth {k}, got {len(pts)}")
    exact = getattr(tree, "exact", False)
    den = 2 ** k
    if exact:
        from fractions import Fraction
        xs = [[(a - b) / den for a, b in zip(p.f, root.f)] for p in pts]
        ys = [[(a - b) / den for a, b in zip(p.g, root.g)] for p in pts]
        vals = np.empty((nn, nn), dtype=object)
        for i in range(nn):
            for j in range(nn):
                dot_ij = sum(a * b for a, b in zip(xs[i], ys[j]))
                dot_ji = sum(a * b for a, b in zip(xs[j], ys[i]))
                vals[i, j] = dot_ij + dot_ji
    else:
        X = np.stack([(np.asarray(p.f, float) - np.asarray(root.f, float)) / den
                      for p in pts])
        Y = np.stack([(np.asarray(p.g, float) - np.asarray(root.g, float)) / den
                      for p in pts])
        A = X @ Y.T
        vals = A + A.T
    return LambdaMatrix(vals, k)


def random_admissible_lambda(k, seed, scale=1.0):
    """Centered random symmetric matrix: admissible and generically full rank."""
    n = 2 ** k
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n))
    S = (G + G.T) / 2.0
    H = np.eye(n) - np.full((n, n), 1.0 / n)
    return LambdaMatrix(scale * (H @ S @ H), k)


# -- norm2: bilinear sign-box sup ---------------------------------------


def _sign_vectors(n):
    """All sign vectors with first entry +1 (the other half is redundant)."""
    count = 2 ** (n - 1)
    cols = np.arange(n - 1)
    rows = np.arange(count)[:, None]
    body = 1.0 - 2.0 * ((rows >> cols) & 1)
    return np.hstack([np.ones((count, 1)), body])


def norm2_report(lam, restarts=64, seed=0):
    """Bilinear sup over the product of unit sign boxes.

    Exact by vertex enumeration for sizes up to 16; beyond that a local
    alternating search with restarts reports a certified lower bound.
    """
    A = lam.as_float() if isinstance(lam, LambdaMatrix) else np.asarray(lam, float)
    n = A.shape[0]
    if n <= _ENUM_MAX:
        signs = _sign_vectors(n)
        values = np.abs(signs @ A.T).sum(axis=1)
        best = int(np.argmax(values))
        alpha = signs[best]
        beta = np.sign(A @ alpha)
        beta[beta == 0] = 1.0
        return {"value": float(values[best]), "method": "vertex_enumeration",
                "alpha": alpha, "beta": beta}
    rng = np.random.default_rng(seed)
    best_val, best_alpha, best_beta = 0.0, None, None
    for _ in range(restarts):
        alpha = rng.choice([-1.0, 1.0], size=n)
        for _ in range(200):
            beta = np.sign(A @ alpha)
            beta[beta == 0] = 1.0
            new_alpha = np.sign(A.T @ beta)
            new_alpha[new_alpha == 0] = 1.0
            if np.array_equal(new_alpha, alpha):
                break
            alpha = new_alpha
        val = float(abs(alpha @ A @ beta))
        if val > best_val:
            best_val, best_alpha, best_beta = val, alpha, beta
    return {"value": best_val, "method": "local_search_lower_bound",
            "alpha": best_alpha, "beta": best_beta}


def norm2(lam, **kwargs):
    return norm2_report(lam, **kwargs)["value"]


# -- norm1: balanced quadratic sup --------------------------------------


def _project_balanced_box(x, cap=0.25):
    """Euclidean projection onto ``{|a_i| <= cap, sum a = 0}``.

    The balance residual ``s(mu) = sum clip(x - mu, -cap, cap)`` is piecewise
    linear and decreasing in the shift ``mu``, from ``+n*cap`` to ``-n*cap``,
    so its root sits between two of the ``2n`` clip breakpoints and linear
    interpolation there is exact.
    """
    bp = np.sort(np.concatenate([x - cap, x + cap]))
    s = np.clip(x[None, :] - bp[:, None], -cap, cap).sum(axis=1)
    i = int(np.searchsorted(-s, 0.0, side="left"))  # first s[i] <= 0; i >= 1
    denom = s[i - 1] - s[i]
    if denom > 0.0:
        mu = bp[i - 1] + (bp[i] - bp[i - 1]) * s[i - 1] / denom
    else:
        mu = bp[i]
    return np.clip(x - mu, -cap, cap)


def _balanced_vertices(n, cap=0.25):
    """All vectors with entries +-cap and an equal number of each sign."""
    out = []
    for pos in itertools.combinations(range(n), n // 2):
        v = np.full(n, -cap)
        v[list(pos)] = cap
        out.append(v)
    return np.stack(out)


def _polytope_vertices(n, cap=0.25):
    """Vertices of the balanced box: all coordinates at +-cap except at most
    one, which absorbs the balancing constraint."""
    rows = []
    for free in range(n):
        others = [i for i in range(n) if i != free]
        for bits in range(2 ** (n - 1)):
            v = np.empty(n)
            for pos, i in enumerate(others):
                v[i] = cap if (bits >> pos) & 1 else -cap
            v[free] = -v[others].sum()
            if abs(v[free]) <= cap + 1e-15:
                rows.append(v)
    return np.stack(rows)


def norm1_lower(lam, restarts=32, iters=400, seed=0):
    """Best found value of ``|alpha^T Lambda alpha|`` over the balanced box.

    Returns ``(value, report)``; the value is always attained by the feasible
    ``report["alpha"]`` and is therefore a certified lower bound.
    """
    A = lam.as_float() if isinstance(lam, LambdaMatrix) else np.asarray(lam, float)
    n = A.shape[0]
    best_val, best_alpha, best_method = -1.0, None, None

    def consider(vecs, method):
        nonlocal best_val, best_alpha, best_method
        vals = np.abs(np.einsum("ij,jk,ik->i", vecs, A, vecs))
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_alpha, best_method = float(vals[i]), vecs[i], method

    if n <= _ENUM_MAX:
        consider(_balanced_vertices(n), "balanced_enumeration")
    if n <= 8:
        consider(_polytope_vertices(n), "vertex_enumeration")

    rng = np.random.default_rng(seed)
    norm_scale = max(float(np.abs(A).sum(axis=1).max()), 1e-30)
    ascent_best = []
    for sign in (1.0, -1.0):
        for _ in range(restarts):
            alpha = _project_balanced_box(rng.uniform(-0.25, 0.25, size=n))
            step = 0.25 / norm_scale
            val = sign * float(alpha @ A @ alpha)
            for _ in range(iters):
                grad = 2.0 * sign * (A @ alpha)
                cand = _project_balanced_box(alpha + step * grad)
                cand_val = sign * float(cand @ A @ cand)
                if cand_val > val:
                    alpha, val = cand, cand_val
                else:
                    step *= 0.5
                    if step < 1e-14 / norm_scale:
                        break
            ascent_best.append((val, alpha))
    if ascent_best:
        vecs = np.stack([a for _, a in ascent_best])
        consider(vecs, "projected_gradient_ascent")

    report = {"value": best_val, "alpha": best_alpha, "method": best_method}
    return best_val, report


# -- Schur products and multiplier norms --------------------------------


def schur_product(A, M):
    """Entrywise product; the defining action of a Schur multiplier."""
    A = np.asarray(A, dtype=float)
    M = np.asarray(M, dtype=float)
    if A.shape != M.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {M.shape}")
    return A * M


def random_sign_matrix(n, seed):
    rng = np.random.default_rng(seed)
    return rng.choice([-1.0, 1.0], size=(n, n))


def _candidate_matrices(n, trials, rng):
    yield "identity", np.eye(n)
    yield "all_ones", np.ones((n, n))
    i = np.arange(n)
    theta = np.pi * np.outer(i + 0.5, i + 0.5) / n
    yield "cosine_frame", np.cos(theta)
    for t in range(trials):
        yield f"gaussian_{t}", rng.standard_normal((n, n))
        yield f"signs_{t}", rng.choice([-1.0, 1.0], size=(n, n))
        u = rng.choice([-1.0, 1.0], size=n)
        v = rng.choice([-1.0, 1.0], size=n)
        yield f"rank_one_{t}", np.outer(u, v)


def multiplier_norm_report(A, trials=25, seed=0, tol=1e-10):
    """Lower bound for the Schur multiplier norm of ``A``.

    Probes structured and random test matrices ``M`` and reports the largest
    ratio ``spectral_norm(A o M) / spectral_norm(M)``.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    best = {"value": 0.0, "witness": None}
    for name, M in _candidate_matrices(n, trials, rng):
        denom, _ = spectral_norm_power(M, tol=tol)
        if denom < 1e-12:
            continue
        numer, _ = spectral_norm_power(schur_product(A, M), tol=tol)
        ratio = numer / denom
        if ratio > best["value"]:
            best = {"value": float(ratio), "witness": name}
    best["method"] = "random_probe"
    return best


def multiplier_norm_lower(A, trials=25, seed=0):
    return multiplier_norm_report(A, trials=trials, seed=seed)["value"]


# -- packaged checks ----------------------------------------------------


def equivalence_report(lam, restarts=32, iters=400, seed=0, upper_factor=192.0):
    """Compare the sign-box norm with the balanced quadratic norm.

    The inequality ``norm2 >= 16 * norm1`` holds for every admissible matrix
    (any feasible quadratic witness splits into a bilinear sign pair); the
    reported upper comparison probes the reverse direction empirically.
    """
    rep2 = norm2_report(lam, seed=seed)
    val1, rep1 = norm1_lower(lam, restarts=restarts, iters=iters, seed=seed)
    ratio = rep2["value"] / val1 if val1 > 0 else math.inf
    return {
        "norm2": rep2["value"],
        "norm2_method": rep2["method"],
        "norm1_lower": val1,
        "norm1_method": rep1["method"],
        "ratio": ratio,
        "lower_ok": bool(rep2["value"] >= 16.0 * val1 * (1.0 - 1e-9)),
        "upper_ok": bool(rep2["value"] <= upper_factor * val1 * (1.0 + 1e-6)),
    }


def rank_one_multiplier_check(n, trials=8, seed=0):
    """Rank-one multipliers act by two-sided diagonal scaling.

    For ``A = s t^T`` the Schur action is ``M -> diag(s) M diag(t)``, so the
    multiplier norm is at most ``max|s| * max|t|``.  Verifies the action
    identity exactly and the norm bound against probed lower bounds.
    """
    rng = np.random.default_rng(seed)
    max_identity_error = 0.0
    max_excess = -math.inf
    for trial in range(trials):
        s = rng.uniform(-2.0, 2.0, size=n)
        t = rng.uniform(-2.0, 2.0, size=n)
        A = np.outer(s, t)
        M = rng.standard_normal((n, n))
        direct = schur_product(A, M)
        scaled = (np.diag(s) @ M) @ np.diag(t)
        max_identity_error = max(
            max_identity_error, float(np.abs(direct - scaled).max()))
        bound = float(np.abs(s).max() * np.abs(t).max())
        probe = multiplier_norm_lower(A, trials=10, seed=seed * 1000 + trial)
        max_excess = max(max_excess, probe - bound)
    return {
        "n": n,
        "trials": trials,
        "max_identity_error": max_identity_error,
        "max_excess": max_excess,
        "ok": bool(max_identity_error <= 1e-10 and max_excess <= 1e-6),
    }


def sign_multiplier_check(k, trials=4, seed=0):
    """Sign matrices of size ``2**k`` have multiplier norm at most ``2**(k/2)``.

    Probes random ``+-1`` matrices and reports the largest lower bound found
    relative to the theoretical ceiling.
    """
    n = 2 ** k
    bound = 2.0 ** (k / 2.0)
    worst = 0.0
    for trial in range(trials):
        A = random_sign_matrix(n, seed * 1000 + trial)
        probe = multiplier_norm_lower(A, trials=10, seed=seed * 1000 + trial)
        worst = max(worst, probe)
    return {
        "k": k,
        "bound": bound,
        "max_probe": worst,
        "ok": bool(worst <= bound * (1.0 + 1e-6)),
    }


# -- the modulation pick ------------------------------------------------


def find_alpha(lam, kg=KG_DEFAULT, restarts=32, iters=400, seed=0):
    """Modulation sequence maximising ``|alpha^T Lambda alpha|`` and its yield.

    Returns ``(AlphaSequence, report)``.  The report carries
    ``achieved_c = |alpha^T Lambda alpha| * 2**(k/2) / sum|lambda|`` together
    with the reference threshold ``1 / (192 * kg)``.
    """
    value, inner = norm1_lower(lam, restarts=restarts, iters=iters, seed=seed)
    sum_abs = lam.abs_sum() if isinstance(lam, LambdaMatrix) \
        else float(np.abs(np.asarray(lam, float)).sum())
    sum_abs_f = float(sum_abs)
    k = lam.k if isinstance(lam, LambdaMatrix) else None
    if k is None:
        raise ValueError("find_alpha needs a LambdaMatrix with its depth tag")
    threshold = 1.0 / (192.0 * kg)
    if sum_abs_f <= 0.0:
        report = {"achieved_c": math.inf, "degenerate": True,
                  "sum_abs_lambda": 0.0, "threshold": threshold,
                  "quad_value": value, "method": inner["method"],
                  "meets_threshold": True}
        return AlphaSequence(np.zeros(2 ** k)), report
    achieved = value * 2.0 ** (k / 2.0) / sum_abs_f
    report = {
        "achieved_c": achieved,
        "degenerate": False,
        "sum_abs_lambda": sum_abs_f,
        "quad_value": value,
        "threshold": threshold,
        "meets_threshold": bool(achieved >= threshold),
        "method": inner["method"],
    }
    return AlphaSequence(inner["alpha"]), report
