"""Finite loops backed by Cayley tables or closed-form multiplication.

Elements are the dense indices ``0..n-1``.  Every oracle accepts either plain
ints or integer numpy arrays in ``mul``/``ldiv``/``rdiv`` so identity checks can
vectorize over millions of assignments.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import IndexOutOfRange, InversesDisagree, NoIdentity, NotLatin, SizeMismatch
from .perm import Perm, SelfMap


class MulOracle:
    """Multiplication and the two divisions of a finite loop.

    Subclasses provide ``order``, ``identity`` and the vectorized primitives
    ``_mul``, ``_ldiv`` (``a \\ b``: the x with a*x = b) and ``_rdiv``
    (``b / a``: the y with y*a = b).
    """

    order: int
    identity: int
    name: str = "loop"

    def _mul(self, a, b):
        raise NotImplementedError

    def _ldiv(self, a, b):
        raise NotImplementedError

    def _rdiv(self, b, a):
        raise NotImplementedError

    def _check(self, *xs) -> None:
        n = self.order
        for x in xs:
            if isinstance(x, np.ndarray):
                continue
            if not 0 <= x < n:
                raise IndexOutOfRange(f"element {x} outside 0..{n - 1}")

    def mul(self, a, b):
        self._check(a, b)
        return _scalar(self._mul(a, b))

    def ldiv(self, a, b):
        self._check(a, b)
        return _scalar(self._ldiv(a, b))

    def rdiv(self, b, a):
        self._check(a, b)
        return _scalar(self._rdiv(b, a))

    def right_inverse(self, a):
        """x^rho: the element with a * x^rho = e."""
        return self.ldiv(a, self.identity) if not isinstance(a, np.ndarray) else self._ldiv(
            a, np.full_like(a, self.identity))

    def left_inverse(self, a):
        """x^lambda: the element with x^lambda * a = e."""
        return self.rdiv(self.identity, a) if not isinstance(a, np.ndarray) else self._rdiv(
            np.full_like(a, self.identity), a)

    def right_translation(self, a: int) -> Perm:
        self._check(a)
        ys = np.arange(self.order)
        return Perm._trusted(self._mul(ys, np.full_like(ys, a)).tolist())

    def left_translation(self, a: int) -> Perm:
        self._check(a)
        ys = np.arange(self.order)
        return Perm._trusted(self._mul(np.full_like(ys, a), ys).tolist())

    def elements(self) -> range:
        return range(self.order)

    def materialize(self) -> "CayleyLoop":
        ys = np.arange(self.order)
        table = self._mul(ys[:, None], ys[None, :])
        return load_loop(np.asarray(table))


def _scalar(v):
    if isinstance(v, np.ndarray) and v.ndim == 0:
        return int(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


class CayleyLoop(MulOracle):
    """A validated loop given by its multiplication table.

    Construct through :func:`load_loop`.  Tables are read-only after
    construction, translations are precomputed.
    """

    def __init__(self, table: np.ndarray, identity: int, name: str = "loop"):
        n = table.shape[0]
        self.order = n
        self.identity = int(identity)
        self.name = name
        self.table = table
        self.table.setflags(write=False)
        idx = np.arange(n)
        ld = np.empty_like(table)
        rd = np.empty_like(table)
        for a in range(n):
            ld[a, table[a]] = idx
            rd[table[:, a], a] = idx
        ld.setflags(write=False)
        rd.setflags(write=False)
        self._ld = ld
        self._rd = rd
        self.rtrans = tuple(Perm._trusted(table[:, a].tolist()) for a in range(n))
        self.ltrans = tuple(Perm._trusted(table[a].tolist()) for a in range(n))

    def _mul(self, a, b):
        return self.table[a, b]

    def _ldiv(self, a, b):
        return self._ld[a, b]

    def _rdiv(self, b, a):
        return self._rd[b, a]

    def right_translation(self, a: int) -> Perm:
        self._check(a)
        return self.rtrans[a]

    def left_translation(self, a: int) -> Perm:
        self._check(a)
        return self.ltrans[a]

    def materialize(self) -> "CayleyLoop":
        return self

    def rows(self) -> list[list[int]]:
        return self.table.tolist()

    def __eq__(self, other) -> bool:
        return isinstance(other, CayleyLoop) and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash(self.table.tobytes())

    def __repr__(self) -> str:
        return f"CayleyLoop({self.name!r}, order={self.order}, identity={self.identity})"


def _as_array(table) -> np.ndarray:
    if isinstance(table, np.ndarray):
        arr = table
    else:
        rows = [list(r) for r in table]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise SizeMismatch("table must be a non-empty square array")
        arr = np.array(rows)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise SizeMismatch(f"table of shape {arr.shape} is not square")
    if not np.issubdtype(arr.dtype, np.integer):
        raise SizeMismatch("table entries must be integers")
    n = arr.shape[0]
    if arr.min() < 0 or arr.max() >= n:
        raise IndexOutOfRange(f"table entries must lie in 0..{n - 1}")
    return arr.astype(np.int64)


def _latin_violation(arr: np.ndarray) -> NotLatin | None:
    n = arr.shape[0]
    for i in range(n):
        seen = np.bincount(arr[i], minlength=n)
        if seen.max() > 1:
            return NotLatin("row", i, int(np.argmax(seen > 1)))
    for j in range(n):
        seen = np.bincount(arr[:, j], minlength=n)
        if seen.max() > 1:
            return NotLatin("column", j, int(np.argmax(seen > 1)))
    return None


def validate_latin(table) -> bool:
    """Latin-square check only; no identity required."""
    return _latin_violation(_as_array(table)) is None


def load_loop(table, name: str = "loop") -> CayleyLoop:
    arr = _as_array(table)
    bad = _latin_violation(arr)
    if bad is not None:
        raise bad
    n = arr.shape[0]
    idx = np.arange(n)
    for e in range(n):
        if np.array_equal(arr[e], idx) and np.array_equal(arr[:, e], idx):
            return CayleyLoop(arr.copy(), e, name)
    raise NoIdentity("no two-sided identity element")


def right_translation(L: MulOracle, a: int) -> Perm:
    return L.right_translation(a)


def left_translation(L: MulOracle, a: int) -> Perm:
    return L.left_translation(a)


def right_inverse(L: MulOracle, a: int) -> int:
    return L.right_inverse(a)


def left_inverse(L: MulOracle, a: int) -> int:
    return L.left_inverse(a)


def has_two_sided_inverses(L: MulOracle) -> bool:
    xs = np.arange(L.order)
    return bool(np.array_equal(L.right_inverse(xs), L.left_inverse(xs)))


def j_perm(L: MulOracle) -> Perm:
    """The inversion map x -> x^-1; needs x^lambda == x^rho everywhere."""
    xs = np.arange(L.order)
    r = L.right_inverse(xs)
    lft = L.left_inverse(xs)
    bad = np.nonzero(r != lft)[0]
    if bad.size:
        x = int(bad[0])
        raise InversesDisagree(x, int(lft[x]), int(r[x]))
    return Perm._trusted(r.tolist())


def right_nucleus(L: MulOracle) -> set[int]:
    """Elements x with (z*y)*x == z*(y*x) for all y, z (direct O(n^3) scan)."""
    n = L.order
    z = np.arange(n)[:, None]
    y = np.arange(n)[None, :]
    zy = L._mul(z, y)
    out = set()
    for x in range(n):
        xs = np.full_like(zy, x)
        if np.array_equal(L._mul(zy, xs), L._mul(z, L._mul(y, xs))):
            out.add(x)
    return out


def associativity_witness(L: MulOracle) -> tuple[int, int, int] | None:
    """First (x, y, z) in lexicographic order with (xy)z != x(yz), or None."""
    n = L.order
    y = np.arange(n)[:, None]
    z = np.arange(n)[None, :]
    yz = L._mul(y, z)
    for x in range(n):
        xs = np.full_like(yz, x)
        bad = L._mul(L._mul(xs, y), z) != L._mul(xs, yz)
        if bad.any():
            j, k = np.unravel_index(int(np.argmax(bad)), bad.shape)
            return (x, int(j), int(k))
    return None


def is_group(L: MulOracle) -> bool:
    return associativity_witness(L) is None


def is_commutative(L: CayleyLoop) -> bool:
    return bool(np.array_equal(L.table, L.table.T))


def principal_isotope(L: MulOracle, f: int, g: int) -> CayleyLoop:
    """The loop x o y = (x / g) * (f \\ y); its identity is f * g."""
    L._check(f, g)
    n = L.order
    xs = np.arange(n)
    left = L._rdiv(xs, np.full_like(xs, g))
    right = L._ldiv(np.full_like(xs, f), xs)
    table = L._mul(left[:, None], right[None, :])
    return load_loop(np.asarray(table), name=f"{L.name}@iso({f},{g})")


def relabel(L: CayleyLoop, phi: Sequence[int]) -> CayleyLoop:
    """The isomorphic copy in which old element x is renamed phi[x]."""
    phi = np.asarray(list(phi), dtype=np.int64)
    n = L.order
    if phi.shape != (n,) or sorted(phi.tolist()) != list(range(n)):
        raise SizeMismatch("relabelling must be a permutation of the elements")
    new = np.empty_like(L.table)
    new[np.ix_(phi, phi)] = phi[L.table]
    return load_loop(new, name=L.name)


def normalize(L: CayleyLoop) -> CayleyLoop:
    """Relabel so the identity is element 0 (swap 0 and e)."""
    if L.identity == 0:
        return L
    phi = list(range(L.order))
    phi[0], phi[L.identity] = L.identity, 0
    return relabel(L, phi)


def self_map_from_oracle(L: MulOracle, fn) -> SelfMap:
    """Tabulate a vectorized element function into a SelfMap."""
    xs = np.arange(L.order)
    return SelfMap(np.asarray(fn(xs)).tolist())


def cyclic_group(n: int) -> CayleyLoop:
    i = np.arange(n)
    return load_loop((i[:, None] + i[None, :]) % n, name=f"Z{n}")


def symmetric_group(k: int) -> CayleyLoop:
    """S_k with permutations in lexicographic order; product p*q applies p then q."""
    import itertools
    perms = [Perm(p) for p in itertools.permutations(range(k))]
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[p * q] for q in perms] for p in perms]
    return load_loop(table, name=f"S{k}")


def direct_product(A: CayleyLoop, B: CayleyLoop) -> CayleyLoop:
    m = B.order
    a = np.arange(A.order * m)
    ai, bi = a // m, a % m
    table = A.table[ai[:, None], ai[None, :]] * m + B.table[bi[:, None], bi[None, :]]
    return load_loop(table, name=f"{A.name}x{B.name}")
