"""Hypothesis strategies shared by the property tests."""
from hypothesis import strategies as st

from loopkit.constructions import small_loop_corpus
from loopkit.core import relabel
from loopkit.perm import Perm

SMALL = [L for n in range(1, 7) for L in small_loop_corpus(n)]


def perms(n: int):
    return st.permutations(range(n)).map(Perm)


@st.composite
def loops(draw, max_order: int = 6):
    """A corpus loop of order <= max_order under a random relabelling."""
    L = draw(st.sampled_from([L for L in SMALL if L.order <= max_order]))
    phi = draw(st.permutations(range(L.order)))
    return relabel(L, phi)


@st.composite
def loop_and_elements(draw, k: int, max_order: int = 6):
    L = draw(loops(max_order))
    return L, [draw(st.integers(0, L.order - 1)) for _ in range(k)]
