import itertools

import pytest
from hypothesis import given, settings, strategies as st

from loopkit.core import cyclic_group, load_loop
from loopkit.dsl import (CHUNK, IdentityAst, LDiv, LInv, Mul, RDiv, RInv, Sampled, Scan, SigmaApp,
                         Var, catalog, check_named, check_text, eval_identity, lookup, parse_identity,
                         parse_mode, parse_system, substitute_sigma)
from loopkit.errors import BudgetExceeded, ParseError, UnboundSigmaSlot
from loopkit.perm import SelfMap

from strategies import loops

x, y, z = Var("x"), Var("y"), Var("z")


def test_parse_generalized_bol():
    ast = parse_identity("((x*y)*z)*s(y) = x*((y*z)*s(y))")
    assert ast.lhs == Mul(Mul(Mul(x, y), z), SigmaApp("s", y))
    assert ast.rhs == Mul(x, Mul(Mul(y, z), SigmaApp("s", y)))
    assert ast.slots() == ("s",)


def test_parse_rip_and_precedence():
    assert parse_identity("(y*x)*x^r = y") == IdentityAst(Mul(Mul(y, x), RInv(x)), y)
    # left associative, inverse binds tighter than any product
    assert parse_identity("x*y/z = x\\y^l").lhs == RDiv(Mul(x, y), z)
    assert parse_identity("x*y/z = x\\y^l").rhs == LDiv(x, LInv(y))


@pytest.mark.parametrize("text, message", [
    ("((x*y)*z = x", "unbalanced parenthesis"),
    ("x*y", "expected '='"),
    ("x*q = x", "unexpected"),
    ("x^k = x", "bad inverse suffix"),
    ("x = ", "unexpected end"),
])
def test_parse_errors(text, message):
    with pytest.raises(ParseError, match=message) as exc:
        parse_identity(text)
    assert exc.value.expected


def test_parse_error_position_in_system():
    with pytest.raises(ParseError) as exc:
        parse_system("x = x ; x*(y = y")
    assert exc.value.position > 6


def test_catalog_lookups():
    assert lookup("rip") == "(y*x)*x^r = y"
    assert lookup("m-loop") == "(x*y)*(z*s(x)) = (x*(y*z))*s(x)"
    with pytest.raises(KeyError):
        lookup("no-such-law")
    for name, text, _ in catalog():
        parse_system(text)


def test_right_bol_on_z4_counts_assignments():
    r = check_named(cyclic_group(4), "right-bol")
    assert r.holds and r.assignments_checked == 64 and r.mode == "exhaustive"


def test_unbound_sigma_slot():
    with pytest.raises(UnboundSigmaSlot):
        check_named(cyclic_group(3), "gen-right-bol")


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        check_named(cyclic_group(11), "right-bol", budget=1000)


def test_mode_parsing():
    assert parse_mode("sample:10:3") == Sampled(10, 3)
    assert parse_mode("scan:5") == Scan(5)
    for bad in ("sample:0:1", "scan", "lots"):
        with pytest.raises(ValueError):
            parse_mode(bad)


def test_substitute_sigma():
    ast = parse_identity("(x*y)*s(x) = x*(y*s(x))")
    sq = substitute_sigma(ast.lhs, "s", lambda t: Mul(t, t))
    assert sq == Mul(Mul(x, y), Mul(x, x))


# -- an independent scalar evaluator ----------------------------------------------


def scalar_eval(L, t, env, sigma):
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Mul):
        return L.mul(scalar_eval(L, t.left, env, sigma), scalar_eval(L, t.right, env, sigma))
    if isinstance(t, LDiv):
        return L.ldiv(scalar_eval(L, t.left, env, sigma), scalar_eval(L, t.right, env, sigma))
    if isinstance(t, RDiv):
        return L.rdiv(scalar_eval(L, t.left, env, sigma), scalar_eval(L, t.right, env, sigma))
    if isinstance(t, RInv):
        return L.right_inverse(scalar_eval(L, t.arg, env, sigma))
    if isinstance(t, LInv):
        return L.left_inverse(scalar_eval(L, t.arg, env, sigma))
    return sigma[scalar_eval(L, t.arg, env, sigma)]


def brute_check(L, ast, sigma):
    names = ast.variables()
    for vals in itertools.product(range(L.order), repeat=len(names)):
        env = dict(zip(names, vals))
        if scalar_eval(L, ast.lhs, env, sigma) != scalar_eval(L, ast.rhs, env, sigma):
            return env
    return None


def terms(depth=3):
    leaves = st.sampled_from([x, y, z])
    return st.recursive(leaves, lambda ch: st.one_of(
        st.builds(Mul, ch, ch), st.builds(LDiv, ch, ch), st.builds(RDiv, ch, ch),
        st.builds(RInv, ch), st.builds(LInv, ch), st.builds(lambda a: SigmaApp("s", a), ch)),
        max_leaves=6)


@settings(max_examples=150, deadline=None)
@given(loops(max_order=5), terms(), terms(), st.data())
def test_vectorized_evaluator_matches_scalar_oracle(L, lhs, rhs, data):
    ast = IdentityAst(lhs, rhs)
    sigma = data.draw(st.lists(st.integers(0, L.order - 1), min_size=L.order, max_size=L.order))
    r = eval_identity(L, ast, {"s": SelfMap(sigma)})
    wit = brute_check(L, ast, sigma)
    assert r.holds == (wit is None)
    if wit is not None:
        assert r.witness == wit


@settings(max_examples=25, deadline=None)
@given(loops(), st.sampled_from(["right-bol", "left-bol", "moufang", "flexible", "aip"]))
def test_workers_do_not_change_results(L, name):
    a = check_named(L, name, workers=1).to_record()
    b = check_named(L, name, workers=4).to_record()
    assert a == b


def test_witness_independent_of_chunking_and_workers():
    # order 70 gives 343000 assignments, more than one chunk; the first failure sits past the first chunk
    n = 70
    T = [[(i + j) % n for j in range(n)] for i in range(n)]
    L = load_loop(T)
    text = "x*(y*z) = (x*y)*z ; x*y = y*x"
    assert check_text(L, text).holds
    sigma = SelfMap([0] * (n - 1) + [1])
    expr = "s(x)*s(y) = s(z)"
    want = brute_check(L, parse_identity(expr), sigma.images)
    for w in (1, 3):
        r = check_text(L, expr, {"s": sigma}, workers=w)
        assert r.witness == want
    r = check_text(L, "s(x) = x^r^l", {"s": SelfMap([0] * (n - 1) + [1])}, workers=2)
    assert r.witness == {"x": 1}
    assert n ** 3 > CHUNK


def test_sampled_mode_is_seeded():
    L = load_loop([[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]])
    a = check_named(L, "associative", mode="sample:500:7")
    b = check_named(L, "associative", mode="sample:500:7", workers=3)
    assert a.to_record() == b.to_record()
    assert not a.holds and a.seed == 7


def test_scan_mode_is_lexicographic_prefix():
    L = load_loop([[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]])
    full = check_named(L, "associative")
    assert check_named(L, "associative", mode="scan:1000").to_record() == {**full.to_record(), "mode": "scan"}
    short = check_named(L, "associative", mode=f"scan:{full.assignments_checked - 1}")
    assert short.holds
