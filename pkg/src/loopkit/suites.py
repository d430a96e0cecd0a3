"""Instance checks for the generalised Bol and B-loop results the engine builds on.

Every suite takes a loop and a self-map, evaluates the hypothesis with the
identity evaluator, and then checks each consequence directly on the tables.
Consequences are only asserted when the hypothesis holds; otherwise the
report carries ``hypothesis = False`` and vacuous checks.
"""
from __future__ import annotations

import itertools

import numpy as np

from .core import CayleyLoop, MulOracle, has_two_sided_inverses, j_perm, principal_isotope
from .dsl import check_named
from .perm import SelfMap
from .reports import Report
from .search import AutotopismTriple, autotopism_group, derived_autotopism, is_autotopism


def _s(sigma) -> np.ndarray:
    return np.asarray(sigma.images, dtype=np.int64)


def _triple(L: CayleyLoop, a, b, c) -> bool:
    return is_autotopism(L, AutotopismTriple(a, b, c))


def _first_bad(L: CayleyLoop, pred) -> int | None:
    return next((y for y in range(L.order) if not pred(y)), None)


def theorem1(L: MulOracle, sigma: SelfMap) -> Report:
    """Consequences of the generalised right Bol law."""
    L = L.materialize()
    s = _s(sigma)
    rep = Report("thm1")
    hyp = check_named(L, "gen-right-bol", {"s": sigma}).holds
    rep.info["hypothesis"] = hyp
    if not hyp:
        rep.add("hypothesis", True, note="not generalised Bol; nothing to check")
        return rep
    rep.add("rip", check_named(L, "rip").holds)
    two = has_two_sided_inverses(L)
    rep.add("two-sided-inverses", two)
    R = L.rtrans
    rep.add("R_{y s(y)} = R_y R_{s(y)}",
            _first_bad(L, lambda y: R[L.table[y, s[y]]] == R[y] * R[s[y]]) is None)
    if two:
        J = np.asarray(j_perm(L).images)
        T = L.table
        xs, ys = np.meshgrid(np.arange(L.order), np.arange(L.order), indexing="ij")
        lhs = J[T[T[xs, ys], s[xs]]]
        rhs = T[T[J[s[xs]], J[ys]], J[xs]]
        bad = np.argwhere(lhs != rhs)
        rep.add("inverse-formula", bad.size == 0,
                None if bad.size == 0 else {"x": int(bad[0][0]), "y": int(bad[0][1])})
        rep.add("triple (R_{y^-1}, L_y R_s(y), R_s(y))",
                _first_bad(L, lambda y: _triple(L, R[J[y]], L.ltrans[y] * R[s[y]], R[s[y]])) is None)
    rep.add("triple (R_y^-1, L_y R_s(y), R_s(y))",
            _first_bad(L, lambda y: _triple(L, R[y].inverse(), L.ltrans[y] * R[s[y]], R[s[y]])) is None)
    return rep


def theorem2(L: MulOracle, sigma: SelfMap) -> Report:
    """Mirror-image consequences of the generalised left Bol law."""
    L = L.materialize()
    s = _s(sigma)
    rep = Report("thm2")
    hyp = check_named(L, "gen-left-bol", {"s": sigma}).holds
    rep.info["hypothesis"] = hyp
    if not hyp:
        rep.add("hypothesis", True, note="not generalised left Bol; nothing to check")
        return rep
    rep.add("lip", check_named(L, "lip").holds)
    two = has_two_sided_inverses(L)
    rep.add("two-sided-inverses", two)
    Lt, R, T = L.ltrans, L.rtrans, L.table
    rep.add("L_x L_s(x) = L_{s(x) x}", _first_bad(L, lambda x: Lt[x] * Lt[s[x]] == Lt[T[s[x], x]]) is None)
    if two:
        J = np.asarray(j_perm(L).images)
        xs, ys = np.meshgrid(np.arange(L.order), np.arange(L.order), indexing="ij")
        lhs = J[T[s[xs], T[ys, xs]]]
        rhs = T[J[xs], T[J[ys], J[s[xs]]]]
        rep.add("inverse-formula", bool(np.array_equal(lhs, rhs)))
        rep.add("triple (R_x L_s(x), L_{x^-1}, L_s(x))",
                _first_bad(L, lambda x: _triple(L, R[x] * Lt[s[x]], Lt[J[x]], Lt[s[x]])) is None)
        rep.add("triple (R_s(x) L_{x^-1}, L_s(x), L_{x^-1})",
                _first_bad(L, lambda x: _triple(L, R[s[x]] * Lt[J[x]], Lt[s[x]], Lt[J[x]])) is None)
    return rep


THEOREM3_CONDITIONS = {
    "m-loop": ("m-loop",),
    "left-and-right": ("gen-left-bol", "gen-right-bol"),
    "right-and-lip": ("gen-right-bol", "lip"),
    "left-and-rip": ("gen-left-bol", "rip"),
}


def theorem3(L: MulOracle, sigma: SelfMap) -> Report:
    """The four M-loop characterisations have equal truth values."""
    L = L.materialize()
    cache: dict[str, bool] = {}

    def ok(name):
        if name not in cache:
            cache[name] = check_named(L, name, {"s": sigma}).holds
        return cache[name]

    values = {k: all(ok(n) for n in names) for k, names in THEOREM3_CONDITIONS.items()}
    rep = Report("thm3")
    rep.add("equivalent", len(set(values.values())) == 1, None, **values)
    return rep


def admissible_sigmas(L: MulOracle) -> list[list[int]]:
    """For each y, the values s with (xy*z)s = x(yz*s) for all x, z.

    A self-map makes the loop generalised Bol exactly when it picks an
    admissible value at every y.
    """
    L = L.materialize()
    T = L.table
    n = L.order
    xs, zs = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    out = []
    for y in range(n):
        lhs_base = T[T[xs, y], zs]
        rhs_base = T[y, zs]
        good = []
        for s in range(n):
            if np.array_equal(T[lhs_base, s], T[xs, T[rhs_base, s]]):
                good.append(s)
        out.append(good)
    return out


def theorem4(L: MulOracle, sigma: SelfMap) -> Report:
    """Isotopes of a generalised right Bol loop with LIP, under three sigma transports."""
    L = L.materialize()
    s = _s(sigma)
    rep = Report("thm4")
    hyp = check_named(L, "gen-right-bol", {"s": sigma}).holds and check_named(L, "lip").holds
    rep.info["hypothesis"] = hyp
    if not hyp:
        rep.add("hypothesis", True, note="hypothesis fails; nothing to check")
        return rep
    n = L.order
    stats = {"some-sigma": [0, None], "same-sigma": [0, None], "conjugated-sigma": [0, None]}
    for f, g in itertools.product(range(n), repeat=2):
        iso = principal_isotope(L, f, g)
        exists = all(admissible_sigmas(iso))
        same = check_named(iso, "gen-right-bol", {"s": sigma}).holds
        conj = SelfMap(L.table[s[L._rd[np.arange(n), g]], g].tolist())
        conj_ok = check_named(iso, "gen-right-bol", {"s": conj}).holds
        for key, val in (("some-sigma", exists), ("same-sigma", same), ("conjugated-sigma", conj_ok)):
            if val:
                stats[key][0] += 1
            elif stats[key][1] is None:
                stats[key][1] = {"f": f, "g": g}
    for key, (count, wit) in stats.items():
        rep.add(key, count == n * n, wit, isotopes=n * n, passing=count)
    return rep


def lemma_alpha2(L: MulOracle, sigma: SelfMap) -> Report:
    """Generalised Bol law versus membership of the translation-triple family."""
    L = L.materialize()
    s = _s(sigma)
    R = L.rtrans
    law = check_named(L, "gen-right-bol", {"s": sigma}).holds
    fam = _first_bad(L, lambda x: _triple(L, R[x].inverse(), L.ltrans[x] * R[s[x]], R[s[x]])) is None
    rep = Report("lemma-alpha2")
    rep.add("equivalence", law == fam, None, law=law, family=fam)
    return rep


def lemma_alpha3(L: MulOracle) -> Report:
    """(U, V, W) in AUT gives (W, JVJ, U) in AUT on RIP loops."""
    L = L.materialize()
    rep = Report("lemma-alpha3")
    if not check_named(L, "rip").holds:
        rep.add("hypothesis", True, note="loop lacks RIP; nothing to check")
        rep.info["hypothesis"] = False
        return rep
    rep.info["hypothesis"] = True
    auts = autotopism_group(L)
    bad = None
    for t in auts:
        if not is_autotopism(L, derived_autotopism(L, t)):
            bad = t
            break
    rep.add("derived-autotopisms", bad is None, bad and [bad.a, bad.b, bad.c], checked=len(auts))
    return rep


def lemma_alpha1(Q: MulOracle, auts) -> Report:
    """The holomorph has RIP exactly when the base loop does."""
    from .holomorph import build_holomorph
    H = build_holomorph(Q, auts)
    hq = check_named(H.base, "rip").holds
    hh = check_named(H, "rip").holds
    rep = Report("lemma-alpha1")
    rep.add("equivalence", hq == hh, None, Q_rip=hq, H_rip=hh)
    return rep
