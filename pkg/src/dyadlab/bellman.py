"""Finite martingale pairs and a grid dynamic-programming gain oracle.

A pair of step functions on a dyadic window induces, level by level, a pair
of martingales together with the averages of their dual powers.  Each node
of the window tree carries a four-coordinate state

    (mean of f,  mean of |f|^p,  mean of g,  mean of |g|^p')

and the parent state is always the mean of its two children.

The oracle tabulates, on a uniform four-dimensional grid, a lower bound for
the largest accumulated value of ``4 * |df| * |dg|`` that a depth-limited
martingale pair started from a given state can collect, where ``df`` and
``dg`` are the split half-steps of the two means.  Splits are restricted to
symmetric on-grid offsets, so every table entry is realised by an explicit
martingale pair and the table is a certified lower bound of the continuum
extremal function.  Values grow with depth (the zero split is admissible)
and with nested grid refinement.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dyadic import DyadicError
from .schur import (KG_DEFAULT, AlphaSequence, _balanced_vertices, find_alpha,
                    lambda_matrix, norm1_lower)

__all__ = [
    "MartingalePoint",
    "MartingaleTree",
    "tree_from_functions",
    "modified_points",
    "BellmanConfig",
    "BellmanTable",
    "bellman_oracle",
    "range_check",
    "concavity_gain_check",
    "lemma51_verify",
]

MAX_TABLE_DEPTH = 6
MAX_AXIS_POINTS = 65
_MAX_LAYER_OPS = 5_000_000_000

# Design range of the split ratios produced by quarter-bounded modulations,
# and the wider range asserted for them downstream.
THETA_DESIGN_RANGE = (0.375, 0.625)
THETA_ASSERTED_RANGE = (0.3, 5.0 / 6.0)


@dataclass(frozen=True)
class MartingalePoint:
    """Four-coordinate state of a node: means of f, |f|^p, g, |g|^p'."""

    f: tuple
    F: object
    g: tuple
    G: object

    @property
    def d(self):
        return len(self.f)

    def coords(self):
        """Scalar state ``(f, F, g, G)``; only for one-dimensional values."""
        if len(self.f) != 1 or len(self.g) != 1:
            raise DyadicError("scalar coordinates need one-dimensional values")
        return (float(self.f[0]), float(self.F), float(self.g[0]),
                float(self.G))


class MartingaleTree:
    """States of all window-tree nodes for a pair of step functions.

    ``points_at_depth(k)`` lists the ``2**k`` states at depth ``k`` below the
    window root, left to right.  ``exact`` marks trees whose states are exact
    rationals (possible when ``p = q = 2`` and the inputs are exact).
    """

    def __init__(self, system, space, levels, exact):
        self.system = system
        self.space = space
        self._levels = levels
        self.exact = bool(exact)

    @property
    def depth(self):
        return len(self._levels) - 1

    def root_point(self):
        return self._levels[0][0]

    def points_at_depth(self, k):
        if not 0 <= k <= self.depth:
            raise DyadicError(f"depth {k} outside 0..{self.depth}")
        return list(self._levels[k])

    def validate_dynamics(self):
        """Largest deviation of any parent state from the mean of its
        children; zero for exactly constructed trees."""
        worst = 0.0
        for t in range(self.depth):
            row, below = self._levels[t], self._levels[t + 1]
            for i, parent in enumerate(row):
                lt, rt = below[2 * i], below[2 * i + 1]
                for a, b, c in zip(parent.f, lt.f, rt.f):
                    worst = max(worst, abs(float(a - (b + c) / 2)))
                for a, b, c in zip(parent.g, lt.g, rt.g):
                    worst = max(worst, abs(float(a - (b + c) / 2)))
                worst = max(worst, abs(float(parent.F - (lt.F + rt.F) / 2)))
                worst = max(worst, abs(float(parent.G - (lt.G + rt.G) / 2)))
        return worst

    def validate_domain(self):
        """Smallest margin ``F - |f|^p`` (and dual) over all nodes.

        Nonnegative by the power-mean inequality; returned as a float so
        callers can assert it against a tolerance.
        """
        p, q = self.space.p, self.space.q
        pd, qd = self.space.p_dual, self.space.q_dual
        worst = math.inf
        for row in self._levels:
            for pt in row:
                fv = np.array([float(c) for c in pt.f])
                gv = np.array([float(c) for c in pt.g])
                fpow = float(np.sum(np.abs(fv) ** q) ** (p / q))
                gpow = float(np.sum(np.abs(gv) ** qd) ** (pd / qd))
                worst = min(worst, float(pt.F) - fpow, float(pt.G) - gpow)
        return worst


def tree_from_functions(f, g, space):
    """Build the martingale state tree of a pair of step functions."""
    if f.system != g.system:
        raise DyadicError("functions live on different dyadic systems")
    if f.d != g.d:
        raise DyadicError(f"value dimensions differ: {f.d} vs {g.d}")
    exact = bool(f.exact and g.exact and space.p == 2.0 and space.q == 2.0)
    if exact:
        f_rows = [tuple(r) for r in f.values]
        g_rows = [tuple(r) for r in g.values]
        F_leaf = [sum(c * c for c in r) for r in f_rows]
        G_leaf = [sum(c * c for c in r) for r in g_rows]
    else:
        p, q = space.p, space.q
        pd, qd = space.p_dual, space.q_dual
        af, ag = f.as_float().values, g.as_float().values
        f_rows = [tuple(float(c) for c in r) for r in af]
        g_rows = [tuple(float(c) for c in r) for r in ag]
        F_leaf = [float(np.sum(np.abs(r) ** q) ** (p / q)) for r in af]
        G_leaf = [float(np.sum(np.abs(r) ** qd) ** (pd / qd)) for r in ag]
    cur = [MartingalePoint(fr, Fr, gr, Gr)
           for fr, Fr, gr, Gr in zip(f_rows, F_leaf, g_rows, G_leaf)]
    levels = [cur]
    while len(cur) > 1:
        nxt = []
        for i in range(0, len(cur), 2):
            a, b = cur[i], cur[i + 1]
            nxt.append(MartingalePoint(
                tuple((x + y) / 2 for x, y in zip(a.f, b.f)),
                (a.F + b.F) / 2,
                tuple((x + y) / 2 for x, y in zip(a.g, b.g)),
                (a.G + b.G) / 2))
        levels.append(nxt)
        cur = nxt
    levels.reverse()
    return MartingaleTree(f.system, space, levels, exact)


def modified_points(tree, alpha, k=None, lam=None):
    """Reweight the depth-``k`` cells by ``1 +- alpha`` and report invariants.

    The plus/minus variants assign cell ``I`` the mass ``2**-k * (1 +-
    alpha_I)``; total mass stays one because the modulation is balanced.  The
    report carries the two modified root states, the range of the split
    ratios realising the masses, the telescoping product residual, and the
    pairing identity

        <f_mod - f_root, g_mod - g_root> = alpha^T Lambda alpha / 2,

    checked exactly on exact trees.
    """
    if not isinstance(alpha, AlphaSequence):
        alpha = AlphaSequence(np.asarray(alpha))
    n = alpha.n
    if k is None:
        k = n.bit_length() - 1
    if 2 ** k != n:
        raise DyadicError(f"modulation length {n} is not 2**{k}")
    pts = tree.points_at_depth(k)
    root = tree.root_point()
    exact = tree.exact and alpha.values.dtype == object
    values = list(alpha.values) if exact else [float(v) for v in
                                               alpha.as_float()]
    one = Fraction(1) if exact else 1.0
    den = 2 ** k
    d = root.d
    if lam is None:
        lam = lambda_matrix(tree, k)

    quad = sum(values[i] * lam.values[i, j] * values[j]
               for i in range(n) for j in range(n))
    rhs = quad / 2

    out = {"k": k}
    theta_lo, theta_hi = math.inf, -math.inf
    product_err = 0.0
    product_exact = exact
    identity_err = 0.0
    identity_exact = exact
    for sign, tag in ((1, "plus"), (-1, "minus")):
        weights = [(one + sign * v) / den for v in values]
        fmod = tuple(sum(w * pt.f[c] for w, pt in zip(weights, pts))
                     for c in range(d))
        gmod = tuple(sum(w * pt.g[c] for w, pt in zip(weights, pts))
                     for c in range(d))
        Fmod = sum(w * pt.F for w, pt in zip(weights, pts))
        Gmod = sum(w * pt.G for w, pt in zip(weights, pts))
        out[tag] = MartingalePoint(fmod, Fmod, gmod, Gmod)

        mass_levels = [weights]
        while len(mass_levels[0]) > 1:
            row = mass_levels[0]
            mass_levels.insert(0, [row[2 * i] + row[2 * i + 1]
                                   for i in range(len(row) // 2)])
        for t in range(k):
            for i, total in enumerate(mass_levels[t]):
                theta = float(mass_levels[t + 1][2 * i] / total)
                theta_lo = min(theta_lo, theta)
                theta_hi = max(theta_hi, theta)
        for j in range(n):
            prod = one
            for t in range(k):
                anc = j >> (k - t)
                child = j >> (k - t - 1)
                prod = prod * (mass_levels[t + 1][child] /
                               mass_levels[t][anc])
            if exact:
                product_exact = product_exact and prod == weights[j]
            product_err = max(product_err, abs(float(prod - weights[j])))

        lhs = sum((a - b) * (c - e) for a, b, c, e in
                  zip(fmod, root.f, gmod, root.g))
        if exact:
            identity_exact = identity_exact and lhs == rhs
        identity_err = max(identity_err, abs(float(lhs - rhs)))

    lo, hi = THETA_DESIGN_RANGE
    alo, ahi = THETA_ASSERTED_RANGE
    out.update({
        "theta_min": theta_lo,
        "theta_max": theta_hi,
        "theta_in_design_range": bool(lo - 1e-12 <= theta_lo
                                      and theta_hi <= hi + 1e-12),
        "theta_in_asserted_range": bool(alo <= theta_lo
                                        and theta_hi <= ahi),
        "product_max_error": product_err,
        "product_exact": product_exact,
        "identity_error": identity_err,
        "identity_exact": identity_exact,
        "pairing_value": float(rhs),
    })
    return out


# -- the grid oracle ----------------------------------------------------


@dataclass(frozen=True)
class BellmanConfig:
    """Grid geometry of the oracle: boxes and point counts per axis.

    The mean axes span symmetric boxes (odd counts keep zero on-grid); the
    power axes span ``[0, max]``.  ``max_offset`` optionally caps the split
    radius per axis, trading oracle quality for speed.
    """

    p: float = 2.0
    f_max: float = 2.0
    F_max: float = 4.0
    g_max: float = 2.0
    G_max: float = 4.0
    n_f: int = 17
    n_F: int = 17
    n_g: int = 17
    n_G: int = 17
    max_offset: int | None = None

    def __post_init__(self):
        if not self.p > 1.0:
            raise DyadicError(f"exponent must exceed 1, got {self.p}")
        for name in ("f_max", "F_max", "g_max", "G_max"):
            if not getattr(self, name) > 0:
                raise DyadicError(f"{name} must be positive")
        for name in ("n_f", "n_g"):
            n = getattr(self, name)
            if n < 3 or n % 2 == 0:
                raise DyadicError(f"{name} must be odd and at least 3")
        for name in ("n_F", "n_G"):
            if getattr(self, name) < 2:
                raise DyadicError(f"{name} must be at least 2")
        for name in ("n_f", "n_F", "n_g", "n_G"):
            if getattr(self, name) > MAX_AXIS_POINTS:
                raise DyadicError(
                    f"{name} exceeds the cap of {MAX_AXIS_POINTS}")

    @property
    def p_dual(self):
        return self.p / (self.p - 1.0)


def _estimated_layer_ops(shape, max_offset):
    total = 1
    for n in shape:
        m = (n - 1) // 2
        if max_offset is not None:
            m = min(m, max_offset)
        total *= sum(n - 2 * abs(j) for j in range(-m, m + 1))
    return total


def _dp_layer(B, hf, hg, max_offset):
    """One depth step: maximise over symmetric on-grid splits."""
    out = B.copy()
    shape = B.shape
    half = [(n - 1) // 2 for n in shape]
    if max_offset is not None:
        half = [min(h, max_offset) for h in half]
    for j in itertools.product(*[range(-h, h + 1) for h in half]):
        first = next((x for x in j if x != 0), 0)
        if first <= 0:
            continue
        cs, ps, ms = [], [], []
        for n, ja in zip(shape, j):
            a = abs(ja)
            cs.append(slice(a, n - a))
            ps.append(slice(a + ja, n - a + ja))
            ms.append(slice(a - ja, n - a - ja))
        cand = B[tuple(ps)] + B[tuple(ms)]
        cand *= 0.5
        gain = 4.0 * abs(j[0] * hf * j[2] * hg)
        if gain:
            cand += gain
        view = out[tuple(cs)]
        np.maximum(view, cand, out=view)
    return out


class BellmanTable:
    """Cached DP layers; ``layer(t)`` is the depth-``t`` gain bound."""

    def __init__(self, config):
        self.config = config
        self.fs = np.linspace(-config.f_max, config.f_max, config.n_f)
        self.Fs = np.linspace(0.0, config.F_max, config.n_F)
        self.gs = np.linspace(-config.g_max, config.g_max, config.n_g)
        self.Gs = np.linspace(0.0, config.G_max, config.n_G)
        self.steps = (self.fs[1] - self.fs[0], self.Fs[1] - self.Fs[0],
                      self.gs[1] - self.gs[0], self.Gs[1] - self.Gs[0])
        shape = (config.n_f, config.n_F, config.n_g, config.n_G)
        ops = _estimated_layer_ops(shape, config.max_offset)
        if ops > _MAX_LAYER_OPS:
            raise DyadicError(
                f"grid needs about {ops:.2e} operations per layer; shrink "
                "the axes or set max_offset")
        self._feasible_f = (np.abs(self.fs)[:, None] ** config.p
                            <= self.Fs[None, :])
        self._feasible_g = (np.abs(self.gs)[:, None] ** config.p_dual
                            <= self.Gs[None, :])
        self._mask = (self._feasible_f[:, :, None, None]
                      & self._feasible_g[None, None, :, :])
        base = np.where(self._mask, 0.0, -np.inf)
        self._layers = [base]

    @property
    def depth(self):
        return len(self._layers) - 1

    def layer(self, t):
        if t > MAX_TABLE_DEPTH:
            raise DyadicError(
                f"depth {t} exceeds the table cap of {MAX_TABLE_DEPTH}")
        while self.depth < t:
            nxt = _dp_layer(self._layers[-1], self.steps[0], self.steps[2],
                            self.config.max_offset)
            nxt[~self._mask] = -np.inf
            self._layers.append(nxt)
        return self._layers[t]

    def nearest_index(self, coords):
        """Grid index closest to a real state, with the snap distance."""
        idx = []
        dist = 0.0
        for x, ax in zip(coords, (self.fs, self.Fs, self.gs, self.Gs)):
            i = int(round((x - ax[0]) / (ax[1] - ax[0])))
            i = min(max(i, 0), len(ax) - 1)
            idx.append(i)
            dist = max(dist, abs(float(ax[i]) - float(x)))
        return tuple(idx), dist

    def evaluate(self, t, point, bump_feasible=True):
        """Table value at the nearest grid node to ``point``.

        A state on the domain boundary can snap to an infeasible node; with
        ``bump_feasible`` the power coordinates are raised grid step by grid
        step until the node is feasible again, and the report says so.
        """
        if isinstance(point, MartingalePoint):
            coords = point.coords()
        else:
            coords = tuple(float(x) for x in point)
        idx, dist = self.nearest_index(coords)
        layer = self.layer(t)
        bumped = False
        i0, i1, i2, i3 = idx
        if bump_feasible:
            while i1 < len(self.Fs) - 1 and not self._feasible_f[i0, i1]:
                i1 += 1
                bumped = True
            while i3 < len(self.Gs) - 1 and not self._feasible_g[i2, i3]:
                i3 += 1
                bumped = True
            idx = (i0, i1, i2, i3)
        return {"value": float(layer[idx]), "index": idx,
                "snap_distance": dist, "bumped": bumped}


_TABLE_CACHE = {}


def bellman_oracle(config=None, depth=0, **overrides):
    """Shared table for a grid configuration, computed up to ``depth``."""
    if config is None:
        config = BellmanConfig(**overrides)
    elif overrides:
        raise DyadicError("pass either a config or keyword overrides")
    table = _TABLE_CACHE.get(config)
    if table is None:
        table = BellmanTable(config)
        _TABLE_CACHE[config] = table
    table.layer(depth)
    return table


def range_check(table, t):
    """Feasible values lie in ``[0, 4 t f_max g_max]`` (per-step gain cap)."""
    layer = table.layer(t)
    finite = layer[np.isfinite(layer)]
    bound = 4.0 * t * table.config.f_max * table.config.g_max
    lo = float(finite.min())
    hi = float(finite.max())
    return {"min": lo, "max": hi, "upper_bound": bound,
            "n_finite": int(finite.size),
            "ok": bool(lo >= 0.0 and hi <= bound + 1e-9)}


def concavity_gain_check(table, t, n_samples=200, seed=0, snapped=False):
    """Sampled slack of the split inequality between layers ``t+1`` and ``t``.

    On-grid parity pairs recompute exactly the candidates the DP maximised
    over, so their slack is nonnegative.  Snapped real pairs pick up
    discretisation error: a sub-grid offset can vanish under snapping while
    its true gain survives (up to ``16 h_f h_g`` for the sampled offsets),
    and the snapped states can straddle one grid step of table variation
    (about ``4 h_f g_max + 4 h_g f_max``).  The report carries this
    ``allowance``; snapped slacks are expected above its negative.
    """
    rng = np.random.default_rng(seed)
    upper = table.layer(t + 1)
    lower = table.layer(t)
    shape = lower.shape
    hf, hF, hg, hG = table.steps
    cfg = table.config
    min_slack = math.inf
    n_eval = 0
    attempts = 0
    max_attempts = 200 * n_samples
    while n_eval < n_samples and attempts < max_attempts:
        attempts += 1
        if not snapped:
            j = tuple(int(rng.integers(-(n - 1) // 2, (n - 1) // 2 + 1))
                      for n in shape)
            idx = tuple(int(rng.integers(abs(ja), n - abs(ja)))
                        for n, ja in zip(shape, j))
            plus = tuple(i + ja for i, ja in zip(idx, j))
            minus = tuple(i - ja for i, ja in zip(idx, j))
            vp, vm, vmid = lower[plus], lower[minus], upper[idx]
            if not (np.isfinite(vp) and np.isfinite(vm)):
                continue
            gain = 4.0 * abs(j[0] * hf * j[2] * hg)
            slack = vmid - (0.5 * (vp + vm) + gain)
        else:
            f0 = rng.uniform(-cfg.f_max + 2 * hf, cfg.f_max - 2 * hf)
            g0 = rng.uniform(-cfg.g_max + 2 * hg, cfg.g_max - 2 * hg)
            F0 = rng.uniform(0.0, cfg.F_max - 2 * hF)
            G0 = rng.uniform(0.0, cfg.G_max - 2 * hG)
            df = rng.uniform(-2 * hf, 2 * hf)
            dF = rng.uniform(-2 * hF, 2 * hF)
            dg = rng.uniform(-2 * hg, 2 * hg)
            dG = rng.uniform(-2 * hG, 2 * hG)
            pts = [(f0, F0, g0, G0), (f0 + df, F0 + dF, g0 + dg, G0 + dG),
                   (f0 - df, F0 - dF, g0 - dg, G0 - dG)]
            if any(abs(f) ** cfg.p > F or abs(g) ** cfg.p_dual > G
                   for f, F, g, G in pts):
                continue
            evs = [table.evaluate(t + 1, pts[0], bump_feasible=False),
                   table.evaluate(t, pts[1], bump_feasible=False),
                   table.evaluate(t, pts[2], bump_feasible=False)]
            if not all(np.isfinite(e["value"]) for e in evs):
                continue
            gain = 4.0 * abs(df * dg)
            slack = evs[0]["value"] - (0.5 * (evs[1]["value"]
                                              + evs[2]["value"]) + gain)
        min_slack = min(min_slack, float(slack))
        n_eval += 1
    allowance = 0.0
    if snapped:
        allowance = (16.0 * hf * hg
                     + 4.0 * (hf * cfg.g_max + hg * cfg.f_max))
    return {"min_slack": min_slack, "n_evaluated": n_eval,
            "snapped": snapped, "t": t, "allowance": allowance}


# -- the cell-decomposition yield check ---------------------------------


def _quarter_alpha(lam):
    """Balanced ``+-1/4`` modulation (exact fractions) maximising the
    quadratic form; falls back to ranking the ascent witness for large k."""
    A = lam.as_float()
    n = A.shape[0]
    if n <= 16:
        vecs = _balanced_vertices(n)
        vals = np.abs(np.einsum("ij,jk,ik->i", vecs, A, vecs))
        best = vecs[int(np.argmax(vals))]
    else:
        _, rep = norm1_lower(lam)
        best = rep["alpha"]
    order = np.argsort(best, kind="stable")
    arr = np.empty(n, dtype=object)
    arr[:] = Fraction(-1, 4)
    for i in order[n // 2:]:
        arr[i] = Fraction(1, 4)
    return AlphaSequence(arr)


def _auto_config(tree, space):
    leaves = tree.points_at_depth(tree.depth)
    f_abs = max(abs(float(pt.f[0])) for pt in leaves)
    g_abs = max(abs(float(pt.g[0])) for pt in leaves)
    F_abs = max(float(pt.F) for pt in leaves)
    G_abs = max(float(pt.G) for pt in leaves)
    return BellmanConfig(
        p=float(space.p),
        f_max=max(2.0, float(math.ceil(f_abs))),
        F_max=max(4.0, float(math.ceil(F_abs))),
        g_max=max(2.0, float(math.ceil(g_abs))),
        G_max=max(4.0, float(math.ceil(G_abs))),
    )


def lemma51_verify(f, g, space, k=1, bellman_depth=None, config=None,
                   seed=0, kg=KG_DEFAULT, restarts=32, iters=400):
    """End-to-end yield check for one pair of functions at cell depth ``k``.

    Builds the martingale state tree, extracts the depth-``k`` interaction
    matrix, optimises the balanced modulation and reports ``achieved_c``
    against the reference threshold; verifies the reweighting invariants
    (exactly on exact trees); and compares the total interaction weight with
    the oracle drop between the root state and the mean of its depth-``k``
    cell states.
    """
    tree = tree_from_functions(f, g, space)
    if not 1 <= k <= tree.depth:
        raise DyadicError(f"cell depth {k} outside 1..{tree.depth}")
    lam = lambda_matrix(tree, k)
    sum_abs = float(lam.abs_sum())
    _, alpha_report = find_alpha(lam, kg=kg, restarts=restarts, iters=iters,
                                 seed=seed)
    quarter = _quarter_alpha(lam)
    mod = modified_points(tree, quarter, k=k, lam=lam)

    report = {
        "k": k,
        "tree_depth": tree.depth,
        "tree_exact": tree.exact,
        "sum_abs_lambda": sum_abs,
        "achieved_c": alpha_report["achieved_c"],
        "threshold": alpha_report["threshold"],
        "meets_threshold": alpha_report["meets_threshold"],
        "alpha_method": alpha_report["method"],
        "quad_value": alpha_report["quad_value"],
        "identity_error": mod["identity_error"],
        "identity_exact": mod["identity_exact"],
        "theta_min": mod["theta_min"],
        "theta_max": mod["theta_max"],
        "product_max_error": mod["product_max_error"],
    }

    if f.d != 1:
        report.update({"bellman_skipped": "multidimensional values",
                       "drop": None, "c_emp": None, "degenerate": True})
        return report

    if bellman_depth is None:
        bellman_depth = min(max(k, 3), tree.depth, MAX_TABLE_DEPTH)
    bellman_depth = int(bellman_depth)
    if bellman_depth < k:
        raise DyadicError("bellman_depth must be at least the cell depth")
    if config is None:
        config = _auto_config(tree, space)
    table = bellman_oracle(config, depth=bellman_depth)
    root_eval = table.evaluate(bellman_depth, tree.root_point())
    cell_evals = [table.evaluate(bellman_depth - k, pt)
                  for pt in tree.points_at_depth(k)]
    values = [e["value"] for e in cell_evals] + [root_eval["value"]]
    snap = max([root_eval["snap_distance"]]
               + [e["snap_distance"] for e in cell_evals])
    if all(np.isfinite(v) for v in values):
        cell_mean = math.fsum(e["value"] for e in cell_evals) / 2 ** k
        drop = root_eval["value"] - cell_mean
    else:
        cell_mean = None
        drop = None
    degenerate = drop is None or drop <= 1e-12
    c_emp = None if degenerate else sum_abs / (2.0 ** (k / 2.0) * drop)
    report.update({
        "bellman_depth": bellman_depth,
        "root_value": root_eval["value"],
        "cell_mean_value": cell_mean,
        "drop": drop,
        "c_emp": c_emp,
        "degenerate": bool(degenerate),
        "max_snap_distance": snap,
        "bumped_any": bool(root_eval["bumped"]
                           or any(e["bumped"] for e in cell_evals)),
    })
    return report
