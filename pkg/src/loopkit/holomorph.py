"""A-holomorphs, lifts of self-maps to them, and two-sided equivalence checks.

An element ``(alpha, x)`` of ``H = A x Q`` is stored as ``i * |Q| + x`` where
``i`` indexes ``alpha`` in the automorphism list.  The product is
``(alpha, x) o (beta, y) = (alpha*beta, beta(x) * y)`` with ``alpha*beta``
meaning alpha first, then beta.

Self-map words such as ``a^-1 s g^-1`` below are function compositions read
right to left: ``a^-1 s g^-1 (x) = a^-1(s(g^-1(x)))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import CayleyLoop, MulOracle, j_perm, right_nucleus
from .dsl import Exhaustive, Sampled, check_named
from .errors import MissingParameter, NotAutomorphism, NotClosed
from .perm import Perm, SelfMap
from .search import AutotopismTriple, is_autotopism

H_EXHAUSTIVE_LIMIT = 2 * 10**7
H_SAMPLE = Sampled(1_000_000, 20240601)


class HolomorphLoop(MulOracle):
    def __init__(self, base: CayleyLoop, auts: Sequence[Perm], name: str | None = None):
        self.base = base
        self.auts = list(auts)
        self.index = {a: i for i, a in enumerate(self.auts)}
        n, k = base.order, len(self.auts)
        self.n = n
        self.order = n * k
        ident = Perm.identity(n)
        self.aut_identity = self.index[ident]
        self.identity = self.aut_identity * n + base.identity
        self.name = name or f"H({base.name}, |A|={k})"
        self.images = np.array([a.images for a in self.auts], dtype=np.int64)
        self.inv_images = np.array([a.inverse().images for a in self.auts], dtype=np.int64)
        self.aut_mul = np.array([[self.index[a * b] for b in self.auts] for a in self.auts],
                                dtype=np.int64)
        self.aut_inv = np.array([self.index[a.inverse()] for a in self.auts], dtype=np.int64)
        self._table = None

    def pair(self, a):
        return a // self.n, a % self.n

    def flat(self, i, x):
        return i * self.n + x

    def _mul(self, a, b):
        if self._table is not None:
            return self._table[a, b]
        i, x = self.pair(a)
        j, y = self.pair(b)
        Q = self.base
        return self.flat(self.aut_mul[i, j], Q._mul(self.images[j, x], y))

    def _ldiv(self, a, b):
        i, x = self.pair(a)
        k, z = self.pair(b)
        j = self.aut_mul[self.aut_inv[i], k]
        return self.flat(j, self.base._ldiv(self.images[j, x], z))

    def _rdiv(self, b, a):
        k, z = self.pair(b)
        j, y = self.pair(a)
        i = self.aut_mul[k, self.aut_inv[j]]
        return self.flat(i, self.inv_images[j, self.base._rdiv(z, y)])

    def materialize(self) -> CayleyLoop:
        if not hasattr(self, "_loop"):
            xs = np.arange(self.order)
            self._loop = CayleyLoop(np.asarray(self._mul(xs[:, None], xs[None, :])),
                                    self.identity, self.name)
            self._table = self._loop.table
        return self._loop

    def embed(self, x: int) -> int:
        return self.flat(self.aut_identity, x)


def build_holomorph(Q: MulOracle, auts: Sequence[Perm]) -> HolomorphLoop:
    """The A-holomorph; ``auts`` must be a group of automorphisms of ``Q``."""
    Q = Q.materialize()
    auts = list(dict.fromkeys(auts))
    for a in auts:
        if a.n != Q.order or not is_autotopism(Q, AutotopismTriple(a, a, a)):
            raise NotAutomorphism(f"{list(a.images)} is not an automorphism of {Q.name}")
    pool = set(auts)
    if Perm.identity(Q.order) not in pool:
        raise NotClosed("automorphism list lacks the identity map")
    for a in auts:
        for b in auts:
            if a * b not in pool:
                raise NotClosed(f"{list((a * b).images)} escapes the automorphism list")
    H = HolomorphLoop(Q, auts)
    if H.order <= 4096:
        H.materialize()
    return H


def subloop_embedding_ok(H: HolomorphLoop) -> bool:
    """x -> (I, x) is an injective homomorphism onto a subloop."""
    xs = np.arange(H.n)
    img = H.embed(xs)
    lhs = H._mul(img[:, None], img[None, :])
    return bool(np.array_equal(lhs, H.embed(H.base.table)))


# -- lifts -------------------------------------------------------------------

VARIANTS = ("pointwise", "thm5", "thm7", "t2", "t4")


@dataclass(frozen=True)
class SigmaLift:
    """How a self-map of Q becomes a self-map of H.

    pointwise: (a, x) -> (a, s(x));  thm5: (a, a s c (x));  thm7: (a, s c a^-1 (x));
    t2: (a, [a c (x) * a(g)^-1]^-1);  t4: (a, [c a^-1 (x) * g^-1]^-1), where c is
    the automorphism ``gamma`` (an index into the holomorph's list).
    """

    variant: str
    sigma: SelfMap | None = None
    gamma: int | None = None
    g: int | None = None


def lift_sigma(H: HolomorphLoop, spec: SigmaLift) -> SelfMap:
    if spec.variant not in VARIANTS:
        raise ValueError(f"unknown lift {spec.variant!r}; choose from {', '.join(VARIANTS)}")
    n, k = H.n, len(H.auts)
    if spec.variant in ("pointwise", "thm5", "thm7"):
        if spec.sigma is None:
            raise MissingParameter(f"{spec.variant} lift needs sigma")
        s = np.asarray(spec.sigma.images, dtype=np.int64)
    if spec.variant != "pointwise" and spec.gamma is None:
        raise MissingParameter(f"{spec.variant} lift needs gamma")
    if spec.variant in ("t2", "t4") and spec.g is None:
        raise MissingParameter(f"{spec.variant} lift needs g")
    if spec.gamma is not None and not 0 <= spec.gamma < k:
        raise MissingParameter(f"gamma index {spec.gamma} outside 0..{k - 1}")
    Q = H.base
    xs = np.arange(n)
    out = np.empty((k, n), dtype=np.int64)
    if spec.variant in ("t2", "t4"):
        J = np.asarray(j_perm(Q).images)
    c = H.images[spec.gamma] if spec.gamma is not None else None
    for i in range(k):
        a, ainv = H.images[i], H.inv_images[i]
        if spec.variant == "pointwise":
            y = s[xs]
        elif spec.variant == "thm5":
            y = a[s[c[xs]]]
        elif spec.variant == "thm7":
            y = s[c[ainv[xs]]]
        elif spec.variant == "t2":
            y = J[Q.table[a[c[xs]], J[a[spec.g]]]]
        else:
            y = J[Q.table[c[ainv[xs]], J[spec.g]]]
        out[i] = H.flat(i, y)
    return SelfMap(out.ravel().tolist())


# -- base-level predicates ---------------------------------------------------


def compose(*maps) -> np.ndarray:
    """Function composition, rightmost applied first."""
    out = None
    for m in reversed(maps):
        arr = np.asarray(m.images if hasattr(m, "images") else m, dtype=np.int64)
        out = arr if out is None else arr[out]
    return out


def _mode_for(L: MulOracle, arity: int):
    return Exhaustive() if L.order ** arity <= H_EXHAUSTIVE_LIMIT else H_SAMPLE


def gen_bol(L: MulOracle, sigma) -> bool:
    return check_named(L, "gen-right-bol", {"s": sigma}, mode=_mode_for(L, 3)).holds


def flexible_with(L: MulOracle, sigma) -> bool:
    return check_named(L, "sigma-flexible", {"s": sigma}, mode=_mode_for(L, 2)).holds


def family_ok(Q: CayleyLoop, k_of_x: np.ndarray) -> tuple[bool, int | None]:
    """(R_x^-1, L_x R_k(x), R_k(x)) in AUT for every x; first failing x otherwise."""
    T = Q.table
    xs = np.arange(Q.order)
    for x in range(Q.order):
        k = int(k_of_x[x])
        a = Q._rd[xs, x]
        b = T[T[x, xs], k]
        c = T[xs, k]
        if not np.array_equal(T[a[:, None], b[None, :]], c[T]):
            return False, x
    return True, None


@dataclass
class EquivalenceReport:
    theorem: str
    side_H: bool
    side_Q: bool
    agree: bool
    witness: dict | None = None
    side_Q_universal: bool | None = None
    agree_universal: bool | None = None
    details: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        rec = {"name": self.theorem, "holds": self.agree, "side_H": self.side_H, "side_Q": self.side_Q}
        if self.side_Q_universal is not None:
            rec["side_Q_universal"] = self.side_Q_universal
            rec["agree_universal"] = self.agree_universal
        if self.witness is not None:
            rec["witness"] = self.witness
        if self.details:
            rec["details"] = self.details
        return rec


def _all_sigma_eps(Q, s, auts, with_flex: bool) -> tuple[bool, dict | None]:
    """Q is (s e)-generalised Bol (and (s e)-flexible) for every e in auts."""
    for i, e in enumerate(auts):
        t = compose(s, e)
        if not gen_bol(Q, t):
            return False, {"eps": i, "fails": "gen-right-bol"}
        if with_flex and not flexible_with(Q, t):
            return False, {"eps": i, "fails": "sigma-flexible"}
    return True, None


def _h_side(H: HolomorphLoop, lift: SelfMap, with_flex: bool) -> tuple[bool, dict | None]:
    mode = _mode_for(H, 3)
    r = check_named(H, "gen-right-bol", {"s": lift}, mode=mode)
    if not r.holds:
        return False, {"identity": "gen-right-bol", "assignment": r.witness}
    if with_flex:
        r = check_named(H, "sigma-flexible", {"s": lift}, mode=_mode_for(H, 2))
        if not r.holds:
            return False, {"identity": "sigma-flexible", "assignment": r.witness}
    return True, None


THEOREMS = ("thm4_1", "cor4_2", "thm5", "thm6", "thm7")


def verify_holomorph_theorem(theorem: str, Q: MulOracle, auts: Sequence[Perm], sigma: SelfMap,
                             gamma: int = 0) -> EquivalenceReport:
    """Compute both sides of a holomorph equivalence independently.

    ``side_Q`` is the base-level condition as stated; ``side_Q_universal``
    is the condition the holomorph side is actually equivalent to, namely
    that Q is (sigma e)-generalised Bol (plus flexible, for the flexible
    variants) for every automorphism e in the list.
    """
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}; choose from {', '.join(THEOREMS)}")
    H = build_holomorph(Q, auts)
    Q = H.base
    auts = H.auts
    s = np.asarray(sigma.images, dtype=np.int64)
    flex = theorem in ("thm6", "thm7")
    variant = {"thm4_1": "pointwise", "cor4_2": "pointwise", "thm5": "thm5", "thm6": "pointwise",
               "thm7": "thm7"}[theorem]
    lift = lift_sigma(H, SigmaLift(variant, sigma, gamma if variant != "pointwise" else None))
    side_H, h_wit = _h_side(H, lift, flex)
    universal, u_wit = _all_sigma_eps(Q, s, auts, flex)
    inv = [a.inverse() for a in auts]
    q_wit = None
    if theorem == "thm4_1":
        side_Q = True
        for ai, a in enumerate(inv):
            for ci, c in enumerate(inv):
                ok, x = family_ok(Q, compose(a, s, c))
                if not ok:
                    side_Q, q_wit = False, {"alpha": ai, "gamma": ci, "x": x}
                    break
            if not side_Q:
                break
    elif theorem == "cor4_2":
        side_Q = True
        for ai, a in enumerate(inv):
            for ci, c in enumerate(inv):
                if not gen_bol(Q, compose(a, s, c)):
                    side_Q, q_wit = False, {"alpha": ai, "gamma": ci}
                    break
            if not side_Q:
                break
    elif theorem == "thm6":
        side_Q = True
        for ai, a in enumerate(auts):
            for ci, c in enumerate(inv):
                t = compose(s, a, c)
                if not gen_bol(Q, t):
                    side_Q, q_wit = False, {"alpha": ai, "gamma": ci, "fails": "gen-right-bol"}
                    break
                bad = next((di for di, d in enumerate(auts) if not flexible_with(Q, compose(t, d))), None)
                if bad is not None:
                    side_Q, q_wit = False, {"alpha": ai, "gamma": ci, "delta": bad, "fails": "sigma-flexible"}
                    break
            if not side_Q:
                break
    elif theorem == "thm5":
        side_Q = gen_bol(Q, s)
        if not side_Q:
            q_wit = {"fails": "gen-right-bol"}
    else:  # thm7: sigma-generalised Bol and sigma-flexible for some delta
        side_Q = gen_bol(Q, s) and any(flexible_with(Q, compose(s, d)) for d in auts)
        if not side_Q:
            q_wit = {"fails": "gen-right-bol or sigma-flexible"}
    agree = side_H == side_Q
    witness = None
    if not agree:
        witness = {"H": h_wit, "Q": q_wit, "Q_universal": u_wit}
    return EquivalenceReport(theorem, side_H, side_Q, agree, witness, universal, universal == side_H,
                             {"H_order": H.order, "lift": variant, "gamma": gamma,
                              "H_witness": h_wit, "Q_witness": q_wit})


def check_robinson_remark(Q: MulOracle, auts: Sequence[Perm]) -> EquivalenceReport:
    """H Bol versus (Q Bol and x^-1 * theta(x) in the right nucleus for all theta, x)."""
    H = build_holomorph(Q, auts)
    Q = H.base
    J = np.asarray(j_perm(Q).images)
    r = check_named(H, "right-bol", mode=_mode_for(H, 3))
    side_H = r.holds
    q_bol = check_named(Q, "right-bol").holds
    nuc = right_nucleus(Q)
    xs = np.arange(Q.order)
    bad = None
    for i, th in enumerate(H.auts):
        vals = Q.table[J, np.asarray(th.images)[xs]]
        miss = [int(x) for x, v in zip(xs, vals) if int(v) not in nuc]
        if miss:
            bad = {"theta": i, "x": miss[0]}
            break
    side_Q = q_bol and bad is None
    return EquivalenceReport("robinson", side_H, side_Q, side_H == side_Q,
                             None if side_H == side_Q else {"H": r.witness, "Q": bad},
                             details={"Q_bol": q_bol, "nucleus_violation": bad,
                                      "vacuous": bad is None})
