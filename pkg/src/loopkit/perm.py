"""Self-maps and permutations on element indices 0..n-1.

Maps act on the right, as in the loop literature: for maps ``p`` and ``q``
the product ``p * q`` applies ``p`` first and then ``q``, so
``(p * q)(x) == q(p(x))``.  This keeps formulas such as ``psi * R_x`` or the
autotopism triple ``(R_x**-1, L_x * R_s, R_s)`` readable exactly as written.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .errors import IndexOutOfRange, SizeMismatch


class SelfMap:
    """An arbitrary single-valued map on ``range(n)``."""

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int]):
        imgs = tuple(int(i) for i in images)
        n = len(imgs)
        for i, v in enumerate(imgs):
            if not 0 <= v < n:
                raise IndexOutOfRange(f"image {v} of {i} outside 0..{n - 1}")
        object.__setattr__(self, "images", imgs)

    def __setattr__(self, name, value):
        raise AttributeError("maps are immutable")

    @property
    def n(self) -> int:
        return len(self.images)

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __getitem__(self, x: int) -> int:
        return self.images[x]

    def __iter__(self):
        return iter(self.images)

    def __eq__(self, other) -> bool:
        return isinstance(other, SelfMap) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __lt__(self, other: SelfMap) -> bool:
        return self.images < other.images

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(self.images)})"

    def is_bijective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    def then(self, other: SelfMap) -> SelfMap:
        _check_same(self, other)
        return SelfMap(other.images[i] for i in self.images)

    def after(self, other: SelfMap) -> SelfMap:
        """Function-style composition: ``(self.after(g))(x) == self(g(x))``."""
        return other.then(self)


class Perm(SelfMap):
    """A bijection on ``range(n)``; see the module docstring for the product order."""

    __slots__ = ()

    def __init__(self, images: Iterable[int]):
        super().__init__(images)
        if not self.is_bijective():
            raise ValueError(f"{list(self.images)} is not a permutation")

    @classmethod
    def identity(cls, n: int) -> Perm:
        return cls(range(n))

    @classmethod
    def _trusted(cls, images: Sequence[int]) -> Perm:
        p = object.__new__(cls)
        object.__setattr__(p, "images", tuple(images))
        return p

    def __mul__(self, other: Perm) -> Perm:
        _check_same(self, other)
        o = other.images
        return Perm._trusted([o[i] for i in self.images])

    def then(self, other):
        if isinstance(other, Perm):
            return self * other
        return super().then(other)

    def inverse(self) -> Perm:
        inv = [0] * len(self.images)
        for i, v in enumerate(self.images):
            inv[v] = i
        return Perm._trusted(inv)

    def __pow__(self, k: int) -> Perm:
        if k < 0:
            return self.inverse() ** (-k)
        result = Perm.identity(self.n)
        for _ in range(k):
            result = result * self
        return result

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self.images))

    def fixed_points(self) -> list[int]:
        return [i for i, v in enumerate(self.images) if i == v]


def _check_same(a: SelfMap, b: SelfMap) -> None:
    if len(a.images) != len(b.images):
        raise SizeMismatch(f"maps on {len(a.images)} and {len(b.images)} points")


def is_closed_group(perms: Iterable[Perm]) -> bool:
    """True when the finite set contains the identity and is closed under products.

    Closure under products is enough for a finite set of permutations to be a
    group; inverses are checked anyway since it costs nothing at desk scale.
    """
    s = set(perms)
    if not s:
        return False
    n = next(iter(s)).n
    if Perm.identity(n) not in s:
        return False
    for p in s:
        if p.inverse() not in s:
            return False
        for q in s:
            if p * q not in s:
                return False
    return True
