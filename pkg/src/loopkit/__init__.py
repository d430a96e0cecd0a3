"""Finite loops: Cayley tables, identity checking, autotopism searches and holomorphs."""
from .core import CayleyLoop, MulOracle, cyclic_group, direct_product, load_loop, symmetric_group
from .constructions import make_sigma, paper_example_loop, small_loop_corpus
from .dsl import check_named, check_text, parse_identity
from .holomorph import build_holomorph, verify_holomorph_theorem
from .perm import Perm, SelfMap
from .search import (automorphism_group, autotopism_group, bryant_schneider_group,
                     pseudo_automorphisms)

__all__ = [
    "CayleyLoop", "MulOracle", "Perm", "SelfMap", "automorphism_group", "autotopism_group",
    "build_holomorph", "bryant_schneider_group", "check_named", "check_text", "cyclic_group",
    "direct_product", "load_loop", "make_sigma", "paper_example_loop", "parse_identity", "pseudo_automorphisms",
    "small_loop_corpus", "symmetric_group", "verify_holomorph_theorem",
]
__version__ = "0.1.0"
