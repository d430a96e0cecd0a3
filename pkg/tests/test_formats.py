import numpy as np
import pytest
from hypothesis import given

from loopkit.core import relabel
from loopkit.errors import FormatError
from loopkit.formats import (format_auts, format_loop, format_map, parse_auts, parse_loop, parse_map,
                             parse_perm, read_loop, write_loop)
from loopkit.perm import Perm, SelfMap

from strategies import SMALL, loops


@given(loops())
def test_loop_round_trip(L):
    text = format_loop(L)
    if L.identity != 0:
        with pytest.raises(FormatError, match="--normalize"):
            parse_loop(text)
        back = parse_loop(text, normalize=True)
        assert back.identity == 0
    else:
        assert np.array_equal(parse_loop(text).table, L.table)


def test_file_round_trip(tmp_path):
    for L in SMALL[:20]:
        path = tmp_path / "t.loop"
        write_loop(path, L)
        assert np.array_equal(read_loop(path).table, L.table)


def test_normalize_relabels_to_identity_zero():
    L = relabel(next(M for M in SMALL if M.order == 4), [2, 0, 1, 3])
    assert L.identity != 0
    N = parse_loop(format_loop(L), normalize=True)
    assert N.identity == 0


@pytest.mark.parametrize("text, message", [
    ("LOOP v2\norder: 1\n0\n", "header"),
    ("LOOP v1\nsize: 1\n0\n", "order"),
    ("LOOP v1\norder: 2\n0 1\n", "rows"),
    ("LOOP v1\norder: 2\n0 1\n1 x\n", "non-integer"),
    ("LOOP v1\norder: 2\n0 1\n1 1\n", "repeats"),
    ("LOOP v1\norder: 0\n", "positive"),
])
def test_bad_loop_files(text, message):
    with pytest.raises(FormatError, match=message):
        parse_loop(text)


def test_comments_and_blank_lines_are_ignored():
    L = parse_loop("# Z2\nLOOP v1\n\norder: 2\n0 1\n1 0\n")
    assert L.order == 2


def test_sigma_and_perm_files():
    m = SelfMap([0, 0, 2])
    assert parse_map(format_map(m)) == m
    p = Perm([2, 0, 1])
    assert parse_perm(format_map(p, "PERM v1")) == p
    with pytest.raises(FormatError):
        parse_perm(format_map(m))
    with pytest.raises(FormatError):
        parse_map("SIGMA v1\norder: 3\n0 1\n")
    with pytest.raises(FormatError):
        parse_map("SIGMA v1\norder: 2\n0 5\n")


def test_automorphism_lists():
    auts = [Perm([0, 1, 2]), Perm([0, 2, 1])]
    assert parse_auts(format_auts(auts)) == auts
    with pytest.raises(FormatError):
        parse_auts("AUTS v1\norder: 3\ncount: 2\n0 1 2\n")
    with pytest.raises(FormatError):
        parse_auts("AUTS v1\norder: 3\ncount: 1\n0 1 1\n")
