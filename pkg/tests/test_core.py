import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from loopkit.core import (associativity_witness, cyclic_group, direct_product, has_two_sided_inverses,
                          is_group, j_perm, load_loop, normalize, principal_isotope,
                          right_nucleus, symmetric_group, validate_latin)
from loopkit.errors import IndexOutOfRange, InversesDisagree, NoIdentity, NotLatin, SizeMismatch
from loopkit.perm import Perm, SelfMap, is_closed_group

from strategies import loop_and_elements, loops, perms


def test_z3_table_loads_with_identity_zero():
    L = load_loop([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert (L.order, L.identity) == (3, 0)
    assert is_group(L)


def test_repeated_entry_is_not_latin():
    with pytest.raises(NotLatin) as exc:
        load_loop([[0, 1], [1, 1]])
    assert exc.value.index == 1


def test_identity_found_anywhere_and_normalized():
    # Z3 relabelled so that the identity is element 2
    L = load_loop([[1, 2, 0], [2, 0, 1], [0, 1, 2]])
    assert L.identity == 2
    N = normalize(L)
    assert N.identity == 0 and is_group(N)


def test_latin_without_identity_rejected():
    assert validate_latin([[1, 0], [0, 1]])
    with pytest.raises(NoIdentity):
        load_loop([[1, 0, 2], [2, 1, 0], [0, 2, 1]])


@pytest.mark.parametrize("table, err", [
    ([[0, 1], [1]], SizeMismatch),
    ([[0, 1], [1, 2]], IndexOutOfRange),
    ([], SizeMismatch),
])
def test_malformed_tables(table, err):
    with pytest.raises(err):
        load_loop(table)


def test_out_of_range_element():
    with pytest.raises(IndexOutOfRange):
        cyclic_group(3).mul(0, 3)


@given(loop_and_elements(2))
def test_divisions_invert_multiplication(case):
    L, (a, b) = case
    assert L.mul(a, L.ldiv(a, b)) == b
    assert L.mul(L.rdiv(b, a), a) == b
    assert L.ldiv(a, L.mul(a, b)) == b
    assert L.rdiv(L.mul(b, a), a) == b


@given(loop_and_elements(1))
def test_one_sided_inverses(case):
    L, (a,) = case
    e = L.identity
    assert L.mul(a, L.right_inverse(a)) == e
    assert L.mul(L.left_inverse(a), a) == e


@given(loop_and_elements(2))
def test_translations_match_products(case):
    L, (a, b) = case
    assert L.right_translation(a)(b) == L.mul(b, a)
    assert L.left_translation(a)(b) == L.mul(a, b)


@given(loops())
def test_relabel_preserves_structure(L):
    assert is_group(L) == is_group(normalize(L))
    assert normalize(L).identity == 0
    assert has_two_sided_inverses(L) == has_two_sided_inverses(normalize(L))


@given(loops(), st.data())
def test_principal_isotope_identity_is_fg(L, data):
    f = data.draw(st.integers(0, L.order - 1))
    g = data.draw(st.integers(0, L.order - 1))
    iso = principal_isotope(L, f, g)
    assert iso.identity == L.mul(f, g)


@given(loops())
def test_trivial_isotope_is_identical(L):
    assert np.array_equal(principal_isotope(L, L.identity, L.identity).table, L.table)


def test_group_isotopes_are_groups():
    G = symmetric_group(3)
    for f, g in itertools.product(range(6), repeat=2):
        assert is_group(principal_isotope(G, f, g))


def test_right_nucleus_of_group_is_everything():
    assert right_nucleus(cyclic_group(5)) == set(range(5))


def test_nonassociative_loop_has_witness_and_small_nucleus():
    # the smallest nonassociative loop, order 5
    T = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    L = load_loop(T)
    x, y, z = associativity_witness(L)
    assert L.mul(L.mul(x, y), z) != L.mul(x, L.mul(y, z))
    assert right_nucleus(L) == {0}


def test_j_perm_requires_two_sided_inverses():
    T = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    assert j_perm(load_loop(T)).images == (0, 1, 2, 3, 4)
    bad = load_loop([[0, 1, 2, 3, 4], [1, 2, 0, 4, 3], [2, 3, 4, 0, 1], [3, 4, 1, 2, 0], [4, 0, 3, 1, 2]])
    with pytest.raises(InversesDisagree):
        j_perm(bad)


def test_direct_product_and_symmetric_group():
    P = direct_product(cyclic_group(2), cyclic_group(3))
    assert P.order == 6 and is_group(P)
    S3 = symmetric_group(3)
    assert is_group(S3) and not np.array_equal(S3.table, S3.table.T)


# -- permutations ---------------------------------------------------------------


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(perms(n), perms(n), perms(n))))
def test_perm_product_applies_left_factor_first(triple):
    p, q, r = triple
    for x in range(p.n):
        assert (p * q)(x) == q(p(x))
    assert (p * q) * r == p * (q * r)
    assert p * p.inverse() == Perm.identity(p.n)
    assert (p * q).inverse() == q.inverse() * p.inverse()


def test_selfmap_validation():
    with pytest.raises(IndexOutOfRange):
        SelfMap([0, 3])
    with pytest.raises(ValueError):
        Perm([0, 0])
    with pytest.raises(SizeMismatch):
        Perm([0, 1]) * Perm([0, 1, 2])


def test_group_closure():
    rots = [Perm([(i + k) % 4 for i in range(4)]) for k in range(4)]
    assert is_closed_group(rots)
    assert not is_closed_group(rots[:2])
    assert not is_closed_group([])
