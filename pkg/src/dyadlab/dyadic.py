"""Finite windows of randomly translated dyadic grids.

A system is a window ``[origin, origin + 2**M)`` subdivided ``depth`` times by
exact bisection.  Randomness enters through one bit per level below the root:
the bit at level ``t`` translates every grid coarser than ``t`` by ``2**(M-t)``,
and the accumulated translation is folded into the realized window origin.
Inside the window the intervals therefore always form a perfect binary tree
with scaled-integer endpoints, while the absolute position of the whole
configuration moves on the leaf lattice as the bits vary.

Levels are counted downward from the window root (root = 0, leaves = depth).
An interval at level ``lev`` has length ``2**(M - lev)``.  Global (window
independent) levels, where length ``2**-j`` corresponds to level ``j``, are
``lev - M``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "DyadicError",
    "DepthExhaustedError",
    "WindowError",
    "DyadicSystem",
    "DyadicInterval",
    "children",
    "descendants",
    "sample_system",
]


class DyadicError(ValueError):
    """Base class for dyadic-structure errors."""


class DepthExhaustedError(DyadicError):
    """An operation asked for intervals below the leaf level."""


class WindowError(DyadicError):
    """An address does not exist inside the window."""


@dataclass(frozen=True)
class DyadicSystem:
    """A dyadic window with its translation bits.

    Parameters
    ----------
    base_origin:
        Left endpoint of the window before the translation bits are applied.
    M:
        Window length exponent; the window has length ``2**M``.
    depth:
        Number of bisection levels below the root.
    omega:
        ``depth`` bits; ``omega[t-1]`` is the bit of level ``t`` and shifts the
        realized origin by ``2**(M - t)``.
    """

    base_origin: Fraction = Fraction(0)
    M: int = 0
    depth: int = 1
    omega: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "base_origin", Fraction(self.base_origin))
        if self.depth < 1:
            raise DyadicError("depth must be >= 1")
        bits = tuple(int(b) for b in self.omega)
        if not bits:
            bits = (0,) * self.depth
        if len(bits) != self.depth:
            raise DyadicError(
                f"omega has {len(bits)} bits, expected depth={self.depth}")
        if any(b not in (0, 1) for b in bits):
            raise DyadicError("omega bits must be 0 or 1")
        object.__setattr__(self, "omega", bits)

    # -- geometry --------------------------------------------------------

    @property
    def window_length(self):
        return Fraction(2) ** self.M

    @property
    def leaf_width(self):
        return Fraction(2) ** (self.M - self.depth)

    @property
    def n_leaves(self):
        return 2 ** self.depth

    def grid_translation(self, level):
        """Translation of the level-``level`` grid coming from finer bits.

        Equals the sum of ``2**(M - t) * omega[t-1]`` over stored levels
        ``t > level``; grids at or below ``level`` are translated by integer
        multiples of their own length on top of this.
        """
        if not 0 <= level <= self.depth:
            raise WindowError(f"level {level} outside [0, {self.depth}]")
        out = Fraction(0)
        for t in range(level + 1, self.depth + 1):
            if self.omega[t - 1]:
                out += Fraction(2) ** (self.M - t)
        return out

    @property
    def origin(self):
        """Realized left endpoint of the window."""
        return self.base_origin + self.grid_translation(0)

    # -- intervals -------------------------------------------------------

    def interval(self, level, index):
        if not 0 <= level <= self.depth:
            raise WindowError(f"level {level} outside [0, {self.depth}]")
        if not 0 <= index < 2 ** level:
            raise WindowError(
                f"index {index} outside [0, {2 ** level}) at level {level}")
        return DyadicInterval(self, level, index)

    @property
    def root(self):
        return DyadicInterval(self, 0, 0)

    def intervals(self, level):
        """All intervals of one level, left to right."""
        return [self.interval(level, i) for i in range(2 ** level)]

    def leaves(self):
        return self.intervals(self.depth)

    def nonleaf_intervals(self, max_level=None):
        """All intervals strictly above the leaf level, coarse to fine."""
        stop = self.depth if max_level is None else max_level + 1
        out = []
        for lev in range(min(stop, self.depth)):
            out.extend(self.intervals(lev))
        return out

    # -- serialization ---------------------------------------------------

    def to_json_dict(self):
        return {
            "origin": str(self.base_origin),
            "M": self.M,
            "D": self.depth,
            "omega_bits": list(self.omega),
        }

    @classmethod
    def from_json_dict(cls, data):
        return cls(
            base_origin=Fraction(data["origin"]),
            M=int(data["M"]),
            depth=int(data["D"]),
            omega=tuple(int(b) for b in data["omega_bits"]),
        )


@dataclass(frozen=True)
class DyadicInterval:
    """One interval of a system, addressed by (level, index)."""

    system: DyadicSystem
    level: int
    index: int

    @property
    def address(self):
        return (self.level, self.index)

    @property
    def length(self):
        return Fraction(2) ** (self.system.M - self.level)

    @property
    def left(self):
        return self.system.origin + self.index * self.length

    @property
    def right(self):
        return self.left + self.length

    @property
    def midpoint(self):
        return self.left + self.length / 2

    @property
    def is_leaf(self):
        return self.level == self.system.depth

    @property
    def leaf_span(self):
        """Half-open range of leaf indices covered by this interval."""
        width = 2 ** (self.system.depth - self.level)
        return self.index * width, (self.index + 1) * width

    @property
    def n_leaves(self):
        lo, hi = self.leaf_span
        return hi - lo

    def parent(self):
        if self.level == 0:
            raise WindowError("window root has no parent inside the window")
        return DyadicInterval(self.system, self.level - 1, self.index // 2)

    def sibling(self):
        return DyadicInterval(self.system, self.level, self.index ^ 1)

    def contains(self, other):
        if other.system != self.system or other.level < self.level:
            return False
        return other.index >> (other.level - self.level) == self.index

    def __contains__(self, x):
        return self.left <= x < self.right


def children(interval):
    """Both halves of ``interval``, as ``(left, right)``.

    Haar functions built on top of this module are positive on the left half.
    """
    if interval.is_leaf:
        raise DepthExhaustedError(
            f"interval at leaf level {interval.level} has no children")
    sys_, lev, idx = interval.system, interval.level, interval.index
    return (DyadicInterval(sys_, lev + 1, 2 * idx),
            DyadicInterval(sys_, lev + 1, 2 * idx + 1))


def descendants(interval, n):
    """The ``2**n`` subintervals ``n`` levels down, left to right."""
    if n < 0:
        raise DyadicError("descendant depth must be >= 0")
    lev = interval.level + n
    if lev > interval.system.depth:
        raise DepthExhaustedError(
            f"level {lev} exceeds window depth {interval.system.depth}")
    base = interval.index << n
    return [DyadicInterval(interval.system, lev, base + i)
            for i in range(1 << n)]


def sample_system(seed, depth, M=0, base_origin=0, j_min=None, j_max=None):
    """Draw translation bits i.i.d. uniform on {0, 1}.

    ``j_min``/``j_max`` select which global levels (length ``2**-j`` at level
    ``j``) receive random bits; stored levels are ``1-M .. depth-M`` and levels
    outside the requested range keep bit 0.  Deterministic in ``seed``; a
    sequence seed such as ``(master, trial)`` gives independent per-trial
    streams.
    """
    if j_min is not None and j_max is not None and j_min > j_max:
        raise DyadicError(f"j_min {j_min} > j_max {j_max}")
    lo = 1 - M if j_min is None else max(j_min, 1 - M)
    hi = depth - M if j_max is None else min(j_max, depth - M)
    rng = np.random.default_rng(seed)
    raw = rng.integers(0, 2, size=depth)
    bits = []
    for t in range(1, depth + 1):
        j = t - M
        bits.append(int(raw[t - 1]) if lo <= j <= hi else 0)
    return DyadicSystem(base_origin=Fraction(base_origin), M=M, depth=depth,
                        omega=tuple(bits))
