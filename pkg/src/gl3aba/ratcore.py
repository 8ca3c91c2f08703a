"""Scalar kernel shared by every other module.

Conventions
-----------
All rational building blocks live here:

    g(u, v) = c / (u - v)
    f(u, v) = (u - v + c) / (u - v) = 1 + g(u, v)

Products of ``f`` over parameter sets follow the usual shorthand: whenever an
argument is a set, the product over the set is taken, and any product over an
empty set equals 1.

The transfer-matrix eigenvalue built from vacuum ratio functions r1, r3
(r2 is identically 1 and never represented) is

    tau(w | ubar, vbar) = r1(w) f(ubar, w) + f(w, ubar) f(vbar, w)
                          + r3(w) f(w, vbar)

Partition enumeration uses index bitmasks over the parent sequence (parent
cardinality capped at 63), iterated in increasing bitmask order so every sum
over partitions is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

POLE_RTOL = 1e-12
MAX_PARENT_SIZE = 63

_LABELS = ("uC", "uB", "vC", "vB", "xi", "aux")


class PoleError(ArithmeticError):
    """A rational kernel function was evaluated at (or too close to) a pole."""

    def __init__(self, u: complex, v: complex, context: str = ""):
        self.u = u
        self.v = v
        msg = f"pole: arguments {u} and {v} coincide within tolerance"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


def _near_pole(u: complex, v: complex) -> bool:
    return abs(u - v) < POLE_RTOL * max(1.0, abs(u), abs(v))


@dataclass(frozen=True)
class Coupling:
    """R-matrix constant c, optionally tied to the gas coupling varkappa.

    When ``from_varkappa`` is set the constant obeys c = -i * varkappa exactly.
    """

    c: complex
    varkappa: float | None = None
    from_varkappa: bool = False

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("coupling constant c must be nonzero")
        if self.from_varkappa:
            if self.varkappa is None or self.varkappa < 0:
                raise ValueError("varkappa must be a non-negative real")
            if self.c != -1j * self.varkappa:
                raise ValueError("relation flag set but c != -i*varkappa")

    @classmethod
    def from_gas(cls, varkappa: float) -> "Coupling":
        return cls(c=-1j * varkappa, varkappa=float(varkappa), from_varkappa=True)


@dataclass(frozen=True)
class ParameterSet:
    """Ordered collection of complex rapidities with multiset semantics."""

    points: tuple[complex, ...]
    label: str = "aux"
    degenerate: bool = False
    separation_rtol: float = POLE_RTOL

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(complex(p) for p in self.points))
        if self.label not in _LABELS:
            raise ValueError(f"unknown label {self.label!r}, expected one of {_LABELS}")
        if not self.degenerate:
            pts = self.points
            for i in range(len(pts)):
                for j in range(i + 1, len(pts)):
                    if abs(pts[i] - pts[j]) < self.separation_rtol * max(
                        1.0, abs(pts[i]), abs(pts[j])
                    ):
                        raise ValueError(
                            f"coinciding points {pts[i]} and {pts[j]} in set "
                            f"{self.label!r}; mark the set degenerate to allow this"
                        )

    @classmethod
    def of(cls, *points: complex, label: str = "aux", **kw) -> "ParameterSet":
        return cls(points=tuple(points), label=label, **kw)

    @property
    def size(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[complex]:
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def same_multiset(self, other: "ParameterSet", tol: float = 1e-10) -> bool:
        """Multiset equality up to ``tol`` (greedy matching)."""
        if len(self) != len(other):
            return False
        remaining = list(other.points)
        for p in self.points:
            for k, q in enumerate(remaining):
                if abs(p - q) <= tol * max(1.0, abs(p), abs(q)):
                    remaining.pop(k)
                    break
            else:
                return False
        return True

    def subset(self, indices: Iterable[int], label: str | None = None) -> "ParameterSet":
        idx = tuple(indices)
        return ParameterSet(
            points=tuple(self.points[i] for i in idx),
            label=label or self.label,
            degenerate=True,
        )

    def union(self, other: "ParameterSet", label: str | None = None) -> "ParameterSet":
        return ParameterSet(
            points=self.points + other.points,
            label=label or self.label,
            degenerate=True,
        )


# ---------------------------------------------------------------------------
# Rational kernel functions
# ---------------------------------------------------------------------------


def g(u: complex, v: complex, c: Coupling) -> complex:
    if _near_pole(u, v):
        raise PoleError(u, v, "g")
    return c.c / (u - v)


def f(u: complex, v: complex, c: Coupling) -> complex:
    if _near_pole(u, v):
        raise PoleError(u, v, "f")
    return (u - v + c.c) / (u - v)


def _as_points(s) -> tuple[complex, ...]:
    if isinstance(s, ParameterSet):
        return s.points
    if isinstance(s, (int, float, complex)):
        return (complex(s),)
    return tuple(complex(p) for p in s)


def product_f(A, B, c: Coupling) -> complex:
    """prod_{a in A} prod_{b in B} f(a, b); empty sets give 1."""
    out = 1.0 + 0.0j
    for a in _as_points(A):
        for b in _as_points(B):
            out *= f(a, b, c)
    return out


def product_g(A, B, c: Coupling) -> complex:
    out = 1.0 + 0.0j
    for a in _as_points(A):
        for b in _as_points(B):
            out *= g(a, b, c)
    return out


def tau(w: complex, ubar, vbar, model) -> complex:
    """Transfer-matrix eigenvalue r1(w) f(ubar,w) + f(w,ubar) f(vbar,w) + r3(w) f(w,vbar).

    ``model`` must expose ``r1``, ``r3`` evaluators and a ``coupling``.
    """
    c = model.coupling
    for p in tuple(_as_points(ubar)) + tuple(_as_points(vbar)):
        if _near_pole(w, p):
            raise PoleError(w, p, "tau probe collides with a Bethe parameter")
    return (
        model.r1(w) * product_f(ubar, w, c)
        + product_f(w, ubar, c) * product_f(vbar, w, c)
        + model.r3(w) * product_f(w, vbar, c)
    )


# ---------------------------------------------------------------------------
# Partition enumeration (bitmask based)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Bipartition:
    """Split of range(n) into subset I (bits set in mask) and complement II."""

    n: int
    mask: int

    @property
    def indices_I(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.mask >> i & 1)

    @property
    def indices_II(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if not self.mask >> i & 1)

    @property
    def size_I(self) -> int:
        return bin(self.mask).count("1")


@dataclass(frozen=True)
class FourPartition:
    """Split of range(n) into four disjoint subsets covering the range."""

    n: int
    masks: tuple[int, int, int, int]

    def indices(self, part: int) -> tuple[int, ...]:
        m = self.masks[part]
        return tuple(i for i in range(self.n) if m >> i & 1)

    def part_of(self, index: int) -> int:
        for p, m in enumerate(self.masks):
            if m >> index & 1:
                return p
        raise IndexError(index)


def _masks_with_popcount(n: int, k: int) -> Iterator[int]:
    # Gosper's hack: all n-bit masks with k bits set, ascending.
    if k == 0:
        yield 0
        return
    mask = (1 << k) - 1
    limit = 1 << n
    while mask < limit:
        yield mask
        low = mask & -mask
        ripple = mask + low
        mask = (((ripple ^ mask) >> 2) // low) | ripple


def enumerate_bipartitions(n: int, k: int) -> Iterator[Bipartition]:
    """All C(n,k) bipartitions with |I| = k, ascending bitmask order."""
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"invalid bipartition request n={n}, k={k}")
    if n > MAX_PARENT_SIZE:
        raise ValueError(f"parent cardinality {n} exceeds cap {MAX_PARENT_SIZE}")
    for m in _masks_with_popcount(n, k):
        yield Bipartition(n=n, mask=m)


def enumerate_bipartitions_containing(n: int, k: int, pinned: int) -> Iterator[Bipartition]:
    """Bipartitions with |I| = k and ``pinned`` in subset I (C(n-1,k-1) of them)."""
    if k <= 0:
        raise ValueError("a pinned element requires k >= 1")
    if not 0 <= pinned < n:
        raise ValueError(f"pinned index {pinned} outside range(0,{n})")
    others = [i for i in range(n) if i != pinned]
    for m in _masks_with_popcount(n - 1, k - 1):
        mask = 1 << pinned
        for bit, idx in enumerate(others):
            if m >> bit & 1:
                mask |= 1 << idx
        yield Bipartition(n=n, mask=mask)


def enumerate_bipartitions_excluding(n: int, k: int, pinned: int) -> Iterator[Bipartition]:
    """Bipartitions with |I| = k and ``pinned`` in subset II (C(n-1,k) of them)."""
    if not 0 <= pinned < n:
        raise ValueError(f"pinned index {pinned} outside range(0,{n})")
    if k > n - 1:
        raise ValueError(f"cannot exclude index {pinned} with k={k} of n={n}")
    others = [i for i in range(n) if i != pinned]
    for m in _masks_with_popcount(n - 1, k):
        mask = 0
        for bit, idx in enumerate(others):
            if m >> bit & 1:
                mask |= 1 << idx
        yield Bipartition(n=n, mask=mask)


def enumerate_fourpartitions(n: int, sizes: Sequence[int]) -> Iterator[FourPartition]:
    """All n!/(n1! n2! n3! n4!) splits of range(n) into four labeled subsets."""
    sizes = tuple(sizes)
    if len(sizes) != 4 or any(s < 0 for s in sizes):
        raise ValueError("sizes must be four non-negative integers")
    if sum(sizes) != n:
        raise ValueError(f"sizes {sizes} do not sum to n={n}")
    if n > MAX_PARENT_SIZE:
        raise ValueError(f"parent cardinality {n} exceeds cap {MAX_PARENT_SIZE}")
    full = (1 << n) - 1

    def sub_masks(pool: int, k: int) -> Iterator[int]:
        # ascending-order masks with k bits chosen inside ``pool``
        idx = [i for i in range(n) if pool >> i & 1]
        for m in _masks_with_popcount(len(idx), k):
            mask = 0
            for bit, i in enumerate(idx):
                if m >> bit & 1:
                    mask |= 1 << i
            yield mask

    for m1 in sub_masks(full, sizes[0]):
        rest1 = full ^ m1
        for m2 in sub_masks(rest1, sizes[1]):
            rest2 = rest1 ^ m2
            for m3 in sub_masks(rest2, sizes[2]):
                m4 = rest2 ^ m3
                yield FourPartition(n=n, masks=(m1, m2, m3, m4))
