"""Exact computation in free-by-cyclic groups ``F_n x|_phi Z``.

Modules: ``words`` (free groups), ``fnauto`` (automorphisms), ``zmat``
(integer matrices), ``torus`` (mapping-torus arithmetic and maps),
``outclass`` (rank-2 outer classification and isomorphism),
``parabolic`` (fixed subgroups and normal forms for ``a -> a b^k``).
"""

from .fnauto import FreeMap, NotAutomorphismError, parse_automorphism
from .outclass import OutReport, classify_out, evector_check, iso_decide
from .parabolic import conjugate_into_fixed, fixed_by, parabolic_outer_normal_form, split_pieces
from .torus import Torus, TorusElement, TorusMap, abelianization_invariants, build_map, center_is_nontrivial
from .words import ParseError, Word, parse_word
from .zmat import IntMatrix, gl2_conjugate, parse_matrix, smith_normal_form

__version__ = "0.1.0"

__all__ = [
    "FreeMap",
    "IntMatrix",
    "NotAutomorphismError",
    "OutReport",
    "ParseError",
    "Torus",
    "TorusElement",
    "TorusMap",
    "Word",
    "abelianization_invariants",
    "build_map",
    "center_is_nontrivial",
    "classify_out",
    "conjugate_into_fixed",
    "evector_check",
    "fixed_by",
    "gl2_conjugate",
    "iso_decide",
    "parabolic_outer_normal_form",
    "parse_automorphism",
    "parse_matrix",
    "parse_word",
    "smith_normal_form",
    "split_pieces",
]
