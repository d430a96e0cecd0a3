"""Rings, the matrix-ring example loop, sigma maps, and a small-loop corpus."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels as K
from .core import CayleyLoop, MulOracle, j_perm, load_loop
from .dsl import (Const, IdentityAst, LDiv, LInv, Mul, RDiv, RInv, SigmaApp, Var,
                  check_text, lookup, parse_system, substitute_sigma)
from .errors import AxiomViolation, IndexOutOfRange, NotPrime, OrderTooLarge
from .perm import SelfMap

# -- rings -------------------------------------------------------------------


@dataclass(frozen=True)
class RingSpec:
    kind: str            # "zn" or "matgf"
    modulus: int = 0     # zn
    dim: int = 0         # matgf
    prime: int = 0       # matgf

    @classmethod
    def parse(cls, text: str) -> "RingSpec":
        """``zn:N`` or ``mK:P`` (K x K matrices over GF(P)), e.g. ``m2:3``."""
        head, _, tail = text.partition(":")
        if head == "zn":
            return cls("zn", modulus=int(tail))
        if head.startswith("m") and head[1:].isdigit():
            return cls("matgf", dim=int(head[1:]), prime=int(tail))
        raise ValueError(f"bad ring spec {text!r}; use zn:N or mK:P")

    def __str__(self):
        return f"zn:{self.modulus}" if self.kind == "zn" else f"m{self.dim}:{self.prime}"


class Ring:
    """A finite ring with elements 0..size-1 and tabulated operations."""

    def __init__(self, spec: RingSpec, add: np.ndarray, mul: np.ndarray, zero: int, one: int):
        self.spec = spec
        self.size = add.shape[0]
        self.add = add
        self.mul = mul
        self.zero = zero
        self.one = one
        idx = np.arange(self.size)
        self.neg = np.empty(self.size, dtype=np.int64)
        self.neg[idx] = np.argmax(add == zero, axis=1)
        self.cube = mul[mul[idx, idx], idx]
        for t in (self.add, self.mul, self.neg, self.cube):
            t.setflags(write=False)

    def sub(self, a, b):
        return self.add[a, self.neg[b]]

    def power(self, a, k: int):
        out = np.full_like(np.asarray(a), self.one)
        for _ in range(k):
            out = self.mul[out, a]
        return out

    def check_axioms(self, samples: int = 100_000, seed: int = 0) -> None:
        """Ring axioms: exhaustive up to 100 elements, seeded sample above."""
        m = self.size
        if m <= 100:
            a, b, c = (g.ravel() for g in np.meshgrid(*(np.arange(m),) * 3, indexing="ij"))
        else:
            rng = np.random.default_rng(seed)
            a, b, c = rng.integers(0, m, size=(3, samples))
        A, M = self.add, self.mul
        checks = {
            "additive associativity": A[A[a, b], c] == A[a, A[b, c]],
            "additive commutativity": A[a, b] == A[b, a],
            "additive identity": A[a, self.zero] == a,
            "additive inverse": A[a, self.neg[a]] == self.zero,
            "multiplicative associativity": M[M[a, b], c] == M[a, M[b, c]],
            "multiplicative identity": (M[a, self.one] == a) & (M[self.one, a] == a),
            "left distributivity": M[a, A[b, c]] == A[M[a, b], M[a, c]],
            "right distributivity": M[A[a, b], c] == A[M[a, c], M[b, c]],
        }
        for name, ok in checks.items():
            if not np.all(ok):
                raise AxiomViolation(f"{self.spec}: {name} fails")

    def __repr__(self):
        return f"Ring({self.spec}, size={self.size})"


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


@lru_cache(maxsize=None)
def make_ring(spec: RingSpec) -> Ring:
    if spec.kind == "zn":
        m = spec.modulus
        if m < 2:
            raise ValueError("modulus must be at least 2")
        i = np.arange(m)
        ring = Ring(spec, (i[:, None] + i[None, :]) % m, (i[:, None] * i[None, :]) % m, 0, 1 % m)
    elif spec.kind == "matgf":
        k, p = spec.dim, spec.prime
        if not _is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if k < 1:
            raise ValueError("matrix dimension must be positive")
        size = p ** (k * k)
        idx = np.arange(size)
        weights = p ** np.arange(k * k - 1, -1, -1)
        mats = ((idx[:, None] // weights[None, :]) % p).reshape(size, k, k)

        def encode(arr):
            return (arr.reshape(arr.shape[:-2] + (k * k,)) * weights).sum(axis=-1)

        add = encode((mats[:, None] + mats[None, :]) % p)
        mul = encode(np.einsum("aij,bjk->abik", mats, mats) % p)
        one = int(encode(np.eye(k, dtype=np.int64)))
        ring = Ring(spec, add, mul, 0, one)
    else:
        raise ValueError(f"unknown ring kind {spec.kind!r}")
    ring.check_axioms()
    return ring


# -- the example loop (u,f)(v,g) = (u+v, f+g+u v^3) --------------------------


class ExampleLoop(MulOracle):
    """Loop on R x R with (u,f)(v,g) = (u+v, f+g+u*v^3), by closed formulas.

    Element (u, f) has index u*|R| + f; the identity (0, 0) is index 0.
    """

    def __init__(self, ring: Ring):
        self.ring = ring
        self.m = ring.size
        self.order = self.m * self.m
        self.identity = 0
        self.name = f"example[{ring.spec}]"

    def split(self, a):
        return a // self.m, a % self.m

    def join(self, u, f):
        return u * self.m + f

    def _mul(self, a, b):
        R = self.ring
        u, f = self.split(a)
        v, g = self.split(b)
        return self.join(R.add[u, v], R.add[R.add[f, g], R.mul[u, R.cube[v]]])

    def _ldiv(self, a, b):
        R = self.ring
        u, f = self.split(a)
        w, h = self.split(b)
        v = R.sub(w, u)
        return self.join(v, R.sub(R.sub(h, f), R.mul[u, R.cube[v]]))

    def _rdiv(self, b, a):
        R = self.ring
        w, h = self.split(b)
        v, g = self.split(a)
        u = R.sub(w, v)
        return self.join(u, R.sub(R.sub(h, g), R.mul[u, R.cube[v]]))

    def roundtrip_failures(self, samples: int | None = None, seed: int = 0) -> int:
        """Count division round-trip failures, exhaustively or on a seeded sample."""
        n = self.order
        if samples is None:
            a, b = (g.ravel() for g in np.meshgrid(np.arange(n), np.arange(n), indexing="ij"))
        else:
            a, b = np.random.default_rng(seed).integers(0, n, size=(2, samples))
        bad = self._mul(a, self._ldiv(a, b)) != b
        bad |= self._mul(self._rdiv(b, a), a) != b
        bad |= self._ldiv(a, self._mul(a, b)) != b
        return int(bad.sum())


def paper_example_loop(ring: Ring | RingSpec | str, check_samples: int = 10_000) -> ExampleLoop:
    if isinstance(ring, str):
        ring = RingSpec.parse(ring)
    if isinstance(ring, RingSpec):
        ring = make_ring(ring)
    L = ExampleLoop(ring)
    samples = None if L.order <= 81 else check_samples
    if L.roundtrip_failures(samples):
        raise AxiomViolation("division formulas do not invert the multiplication")
    return L


# -- sigma maps --------------------------------------------------------------


@dataclass(frozen=True)
class SigmaSpec:
    kind: str                      # identity | square | inv | rdiv_inv | const | table
    g: int | None = None           # rdiv_inv parameter, const value
    images: tuple[int, ...] | None = None

    @classmethod
    def parse(cls, text: str) -> "SigmaSpec":
        """``identity``, ``square``, ``inv``, ``rdivinv:G``, ``const:C``."""
        text = text.removeprefix("builtin:")
        if text in ("identity", "id"):
            return cls("identity")
        if text == "square":
            return cls("square")
        if text == "inv":
            return cls("inv")
        if text.startswith("rdivinv:"):
            return cls("rdiv_inv", g=int(text.split(":")[1]))
        if text.startswith("const:"):
            return cls("const", g=int(text.split(":")[1]))
        raise ValueError(f"unknown sigma {text!r}")

    def __str__(self):
        if self.kind == "rdiv_inv":
            return f"rdivinv:{self.g}"
        if self.kind == "const":
            return f"const:{self.g}"
        if self.kind == "table":
            return "table"
        return self.kind

    def as_term(self, arg):
        """The map written as a term in ``arg`` (table maps become slot applications)."""
        if self.kind == "identity":
            return arg
        if self.kind == "square":
            return Mul(arg, arg)
        if self.kind == "inv":
            return RInv(arg)
        if self.kind == "rdiv_inv":
            return RInv(Mul(arg, RInv(Const(self.g))))
        if self.kind == "const":
            return Const(self.g)
        return SigmaApp("s", arg)


def make_sigma(L: MulOracle, spec: SigmaSpec | str) -> SelfMap:
    if isinstance(spec, str):
        spec = SigmaSpec.parse(spec)
    xs = np.arange(L.order)
    if spec.kind == "identity":
        out = xs
    elif spec.kind == "square":
        out = L._mul(xs, xs)
    elif spec.kind in ("inv", "rdiv_inv"):
        J = np.asarray(j_perm(L).images) if L.order <= 10_000 else None
        if J is None:
            raise OrderTooLarge("inversion map requested on a very large loop")
        if spec.kind == "inv":
            out = J
        else:
            L._check(spec.g)
            out = J[L._mul(xs, np.full_like(xs, J[spec.g]))]
    elif spec.kind == "const":
        L._check(spec.g)
        out = np.full_like(xs, spec.g)
    elif spec.kind == "table":
        if spec.images is None or len(spec.images) != L.order:
            raise IndexOutOfRange("table sigma must list one image per element")
        out = np.asarray(spec.images)
    else:
        raise ValueError(f"unknown sigma kind {spec.kind!r}")
    return SelfMap(np.asarray(out).tolist())


# -- compiling identities for the table search -------------------------------


def _compile_programs(asts: Sequence[IdentityAst], maps: Sequence[np.ndarray], n: int):
    consts: list[int] = []
    progs = []
    for ast in asts:
        names = ast.variables()
        ops: list[tuple[int, int, int]] = []
        memo: dict = {}

        def slot(t) -> int:
            if isinstance(t, Var):
                return names.index(t.name)
            if isinstance(t, Const):
                if t.value not in consts:
                    consts.append(t.value)
                return 6 + consts.index(t.value)
            if t in memo:
                return memo[t]
            if isinstance(t, (Mul, LDiv, RDiv)):
                code = {Mul: K.OP_MUL, LDiv: K.OP_LDIV, RDiv: K.OP_RDIV}[type(t)]
                op = (code, slot(t.left), slot(t.right))
            elif isinstance(t, RInv):
                op = (K.OP_RINV, slot(t.arg), -1)
            elif isinstance(t, LInv):
                op = (K.OP_LINV, slot(t.arg), -1)
            elif isinstance(t, SigmaApp):
                op = (K.OP_MAP, slot(t.arg), int(t.slot == "s2"))
            else:
                raise TypeError(t)
            ops.append(op)
            memo[t] = ("op", len(ops) - 1)
            return memo[t]

        lhs, rhs = slot(ast.lhs), slot(ast.rhs)
        progs.append((names, ops, lhs, rhs))
    nc = len(consts)
    width = max([len(p[1]) for p in progs] + [1])
    ops_arr = np.zeros((len(progs), width, 3), dtype=np.int64)
    nops = np.zeros(len(progs), dtype=np.int64)
    nvars = np.zeros(len(progs), dtype=np.int64)
    lhs_arr = np.zeros(len(progs), dtype=np.int64)
    rhs_arr = np.zeros(len(progs), dtype=np.int64)

    def fix(s):
        if isinstance(s, tuple):
            return 6 + nc + s[1]
        return s

    for k, (names, ops, lhs, rhs) in enumerate(progs):
        nvars[k] = len(names)
        nops[k] = len(ops)
        for i, (code, a, b) in enumerate(ops):
            ops_arr[k, i] = (code, fix(a), fix(b) if code not in (K.OP_RINV, K.OP_LINV, K.OP_MAP) else b)
        lhs_arr[k] = fix(lhs)
        rhs_arr[k] = fix(rhs)
    maps_arr = np.zeros((2, n), dtype=np.int64)
    for i, m in enumerate(maps[:2]):
        if m is not None:
            maps_arr[i] = m
    return ops_arr, nops, nvars, lhs_arr, rhs_arr, np.array(consts, dtype=np.int64), maps_arr


def _filter_asts(name: str, sigma: SigmaSpec | None) -> list[IdentityAst]:
    asts = parse_system(lookup(name))
    if sigma is None:
        return asts
    return [substitute_sigma(a, "s", sigma.as_term) for a in asts]


def search_tables(n: int, asts: Sequence[IdentityAst] = (), maps=(), init=None) -> np.ndarray:
    """All normalized n x n loop tables (identity 0) satisfying every identity."""
    if init is None:
        init = np.full((n, n), -1, dtype=np.int64)
        init[0] = np.arange(n)
        init[:, 0] = np.arange(n)
    progs = _compile_programs(list(asts), list(maps), n)
    cap = 4096
    while True:
        out = np.empty((cap, n, n), dtype=np.int64)
        found = K.search_tables(np.asarray(init, dtype=np.int64), *progs, out)
        if found < cap:
            return out[:found].copy()
        cap *= 8


def canonical_form(L: CayleyLoop) -> tuple[np.ndarray, list[int]]:
    """Canonical table and the relabelling ``order`` (order[i] gets label i)."""
    table, order = K.canonical_labelling(np.ascontiguousarray(L.table, dtype=np.int64), L.identity)
    return table, order.tolist()


def is_isomorphic(A: CayleyLoop, B: CayleyLoop) -> bool:
    return A.order == B.order and np.array_equal(canonical_form(A)[0], canonical_form(B)[0])


Filter = tuple  # (identity name, SigmaSpec | str | None, want: bool)


def _norm_filters(filters) -> tuple:
    out = []
    for f in filters or ():
        name, sigma, want = f
        if isinstance(sigma, str):
            sigma = SigmaSpec.parse(sigma)
        out.append((name, sigma, bool(want)))
    return tuple(out)


def small_loop_corpus(order: int, filters=()) -> list[CayleyLoop]:
    """All loops of the given order passing the filters, one per isomorphism class.

    Exhaustive for order <= 6; orders 7 and 8 need a pruning (want=True) filter.
    Output is sorted by canonical table.
    """
    return list(_corpus(order, _norm_filters(filters)))


@lru_cache(maxsize=None)
def _corpus(order: int, filters: tuple) -> tuple[CayleyLoop, ...]:
    if order < 1:
        raise ValueError("order must be positive")
    pruning = [f for f in filters if f[2]]
    if order > 8 or (order > 6 and not pruning):
        raise OrderTooLarge(
            f"order {order} needs at least one pruning filter" if order <= 8 else
            f"order {order} exceeds the corpus limit of 8")
    asts: list[IdentityAst] = []
    maps: list = []
    for name, sigma, _ in pruning:
        if sigma is not None and sigma.kind == "table":
            maps = [np.asarray(sigma.images)]
        asts.extend(_filter_asts(name, sigma))
    tables = search_tables(order, asts, maps)
    if tables.shape[0] == 0:
        return ()
    canon = K.canonical_forms(tables, 0)
    seen = {}
    for t in canon:
        seen.setdefault(t.tobytes(), t)
    loops = []
    for key in sorted(seen):
        L = load_loop(seen[key], name=f"L{order}")
        keep = True
        for name, sigma, want in filters:
            s = {"s": make_sigma(L, sigma)} if sigma is not None else None
            if check_text(L, lookup(name), s).holds != want:
                keep = False
                break
        if keep:
            loops.append(L)
    for i, L in enumerate(loops):
        L.name = f"L{order}.{i}"
    return tuple(loops)


def all_perms(n: int):
    return itertools.permutations(range(n))
