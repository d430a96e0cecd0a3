"""Autotopisms, automorphisms, pseudo-automorphisms and special maps.

The three group searches share one engine.  An automorphism, a
pseudo-automorphism with companion ``c`` and a special map with witness
``(f, g)`` are each an isomorphism from the loop onto some isotope living on
the same element set:

* automorphisms: onto the loop itself;
* companion ``c``: onto ``x o y = (x * (y * c)) / c``;
* special-map pair ``(f, g)``: onto ``x o y = (x / g) * (f \\ y)``.

An isomorphism is fixed by the images of a generating set, so the search
enumerates generator images and rebuilds the map from product words.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import MulOracle, j_perm
from .dsl import check_named
from .errors import NotAutotopism, NotRIP, OrderTooLarge, SizeMismatch
from .perm import Perm

BS_LIMIT = 8
BRUTE_LIMIT = 5


@dataclass(frozen=True)
class AutotopismTriple:
    a: Perm
    b: Perm
    c: Perm

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def __mul__(self, other: "AutotopismTriple") -> "AutotopismTriple":
        return AutotopismTriple(self.a * other.a, self.b * other.b, self.c * other.c)

    def inverse(self) -> "AutotopismTriple":
        return AutotopismTriple(self.a.inverse(), self.b.inverse(), self.c.inverse())


@dataclass(frozen=True)
class PseudoAutomorphism:
    psi: Perm
    companions: tuple[int, ...]


@dataclass(frozen=True)
class SpecialMapWitness:
    theta: Perm
    pairs: tuple[tuple[int, int], ...]

    @property
    def is_special(self) -> bool:
        return bool(self.pairs)


def _table(L: MulOracle) -> np.ndarray:
    return L.materialize().table


def _arr(p) -> np.ndarray:
    return np.asarray(p.images, dtype=np.int64)


def is_autotopism(L: MulOracle, t: AutotopismTriple) -> bool:
    """xA * yB == (x*y)C for every pair x, y."""
    n = L.order
    for p in t:
        if p.n != n:
            raise SizeMismatch(f"map on {p.n} points, loop order {n}")
    T = _table(L)
    a, b, c = (_arr(p) for p in t)
    return bool(np.array_equal(T[a[:, None], b[None, :]], c[T]))


def derived_autotopism(L: MulOracle, t: AutotopismTriple) -> AutotopismTriple:
    """(U, V, W) in AUT of an RIP loop gives (W, JVJ, U)."""
    if not check_named(L, "rip").holds:
        raise NotRIP(f"{L.name} lacks the right inverse property")
    J = j_perm(L)
    if not is_autotopism(L, t):
        raise NotAutotopism("input triple is not an autotopism")
    return AutotopismTriple(t.c, J * t.b * J, t.a)


# -- isomorphism engine ------------------------------------------------------


def generating_words(T: np.ndarray, e: int) -> tuple[list[int], list[tuple[int, int, int]]]:
    """A greedy generating set and a product word for every other element.

    Returns ``(gens, steps)`` where each step ``(z, x, y)`` says ``z = x*y``
    with ``x`` and ``y`` already reached; steps are listed in reach order.
    """
    n = T.shape[0]
    reached = [e]
    seen = np.zeros(n, dtype=bool)
    seen[e] = True
    gens: list[int] = []
    steps: list[tuple[int, int, int]] = []
    done = 0
    while len(reached) < n:
        if done == len(reached):
            g = int(np.argmin(seen))
            gens.append(g)
            seen[g] = True
            reached.append(g)
        while done < len(reached):
            j = reached[done]
            for p in reached[:done + 1]:
                for x, y in ((p, j), (j, p)):
                    z = int(T[x, y])
                    if not seen[z]:
                        seen[z] = True
                        reached.append(z)
                        steps.append((z, x, y))
            done += 1
    return gens, steps


def isomorphisms(A: np.ndarray, ea: int, B: np.ndarray, eb: int, first_only: bool = False) -> list[Perm]:
    """All bijections phi with phi(x*y) = phi(x) o phi(y), lexicographically sorted."""
    n = A.shape[0]
    if B.shape[0] != n:
        return []
    gens, steps = generating_words(A, ea)
    candidates = [v for v in range(n) if v != eb]
    found = []
    for imgs in itertools.permutations(candidates, len(gens)):
        phi = np.full(n, -1, dtype=np.int64)
        phi[ea] = eb
        phi[gens] = imgs
        for z, x, y in steps:
            phi[z] = B[phi[x], phi[y]]
        if len(np.unique(phi)) != n:
            continue
        if np.array_equal(phi[A], B[phi[:, None], phi[None, :]]):
            found.append(Perm._trusted(phi.tolist()))
            if first_only:
                break
    found.sort()
    return found


def find_isomorphism(A: MulOracle, B: MulOracle) -> Perm | None:
    """An isomorphism A -> B found by generator-image search, or None."""
    if A.order != B.order:
        return None
    TA, TB = _table(A), _table(B)
    hits = isomorphisms(TA, A.identity, TB, B.identity, first_only=True)
    return hits[0] if hits else None


def companion_isotope(L: MulOracle, c: int) -> np.ndarray:
    """Table of x o y = (x * (y*c)) / c."""
    M = L.materialize()
    M._check(c)
    return M._rd[M.table[:, M.table[:, c]], c]


def special_isotope(L: MulOracle, f: int, g: int) -> np.ndarray:
    """Table of x o y = (x / g) * (f \\ y)."""
    M = L.materialize()
    M._check(f, g)
    xs = np.arange(M.order)
    return M.table[M._rd[xs, g][:, None], M._ld[f, xs][None, :]]


def automorphism_group(L: MulOracle) -> list[Perm]:
    T = _table(L)
    return isomorphisms(T, L.identity, T, L.identity)


def pseudo_automorphisms(L: MulOracle) -> list[PseudoAutomorphism]:
    """Every pseudo-automorphism with its full companion set, sorted by images."""
    T = _table(L)
    e = L.identity
    comps: dict[Perm, list[int]] = {}
    for c in range(L.order):
        for psi in isomorphisms(T, e, companion_isotope(L, c), e):
            comps.setdefault(psi, []).append(c)
    return [PseudoAutomorphism(p, tuple(cs)) for p, cs in sorted(comps.items())]


def special_pairs(L: MulOracle, theta: Perm) -> list[tuple[int, int]]:
    """All (f, g) with (theta R_g^-1, theta L_f^-1, theta) an autotopism."""
    n = L.order
    if theta.n != n:
        raise SizeMismatch(f"map on {theta.n} points, loop order {n}")
    T = _table(L)
    th = _arr(theta)
    lhs_needed = th[T]
    out = []
    for f, g in itertools.product(range(n), repeat=2):
        if th[L.identity] != T[f, g]:
            continue
        if np.array_equal(special_isotope(L, f, g)[th[:, None], th[None, :]], lhs_needed):
            out.append((f, g))
    return out


def is_special_map(L: MulOracle, theta: Perm) -> SpecialMapWitness:
    return SpecialMapWitness(theta, tuple(special_pairs(L, theta)))


def bryant_schneider_with_pairs(L: MulOracle, limit: int = BS_LIMIT) -> dict[Perm, list[tuple[int, int]]]:
    """Map each special map to its witness pairs (f, g), keys sorted."""
    n = L.order
    if n > limit:
        raise OrderTooLarge(f"order {n} exceeds the special-map search limit {limit}")
    T = _table(L)
    e = L.identity
    pairs: dict[Perm, list[tuple[int, int]]] = {}
    for f, g in itertools.product(range(n), repeat=2):
        for theta in isomorphisms(T, e, special_isotope(L, f, g), int(T[f, g])):
            pairs.setdefault(theta, []).append((f, g))
    return dict(sorted(pairs.items()))


def bryant_schneider_group(L: MulOracle, limit: int = BS_LIMIT) -> list[Perm]:
    return list(bryant_schneider_with_pairs(L, limit))


def autotopism_group(L: MulOracle, limit: int = BS_LIMIT) -> list[AutotopismTriple]:
    """All autotopisms, each written as (C R_g^-1, C L_f^-1, C)."""
    M = L.materialize()
    out = []
    for theta, prs in bryant_schneider_with_pairs(L, limit).items():
        for f, g in prs:
            out.append(AutotopismTriple(theta * M.rtrans[g].inverse(), theta * M.ltrans[f].inverse(), theta))
    return sorted(out, key=lambda t: (t.c, t.a, t.b))


# -- definition-level oracles ------------------------------------------------


def _guard(L: MulOracle, limit: int = BRUTE_LIMIT) -> None:
    if L.order > limit:
        raise OrderTooLarge(f"brute force limited to order {limit}, got {L.order}")


def _all_perms(n: int) -> Iterable[Perm]:
    return (Perm._trusted(p) for p in itertools.permutations(range(n)))


def brute_automorphisms(L: MulOracle) -> list[Perm]:
    _guard(L)
    M = L.materialize()
    return [p for p in _all_perms(M.order) if is_autotopism(M, AutotopismTriple(p, p, p))]


def brute_pseudo_automorphisms(L: MulOracle) -> list[PseudoAutomorphism]:
    _guard(L)
    M = L.materialize()
    out = []
    for p in _all_perms(M.order):
        cs = tuple(c for c in range(M.order)
                   if is_autotopism(M, AutotopismTriple(p, p * M.rtrans[c], p * M.rtrans[c])))
        if cs:
            out.append(PseudoAutomorphism(p, cs))
    return out


def brute_bryant_schneider(L: MulOracle) -> list[Perm]:
    _guard(L)
    M = L.materialize()
    n = M.order
    rinv = [r.inverse() for r in M.rtrans]
    linv = [l.inverse() for l in M.ltrans]
    out = []
    for p in _all_perms(n):
        if any(is_autotopism(M, AutotopismTriple(p * rinv[g], p * linv[f], p))
               for f in range(n) for g in range(n)):
            out.append(p)
    return out

