"""Outer automorphism classes of rank-2 mapping tori, read off ``GL_2(Z)``.

In rank two the outer class of the monodromy is determined by its
abelianization, so both the five-way classification of ``Out(M_phi)`` and
the isomorphism problem reduce to integer matrix conjugacy.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any

from . import fnauto
from .fnauto import FreeMap
from .torus import AbelianInvariants, abelianization_invariants
from .zmat import IntMatrix, format_matrix, gl2_conjugate, parabolic_canonical_form, parse_matrix

__all__ = [
    "CASES",
    "DESCRIPTORS",
    "OutReport",
    "IsoDecision",
    "EvectorReport",
    "classify_out",
    "iso_decide",
    "evector_check",
]

CASES = ("I", "II", "III", "IV", "V")

DESCRIPTORS = {
    "I": "(ℤ²⋊C₂)⋊GL₂(ℤ)",
    "II": "PGL₂(ℤ)×C₂",
    "III": "finite",
    "IV": "virtually ℤ",
    "V": "virtually ℤ",
}

TAGS = {
    "I": "semidirect_gl2",
    "II": "pgl2_times_c2",
    "III": "finite",
    "IV": "virtually_cyclic",
    "V": "virtually_cyclic",
}


def _matrix_of(A) -> IntMatrix:
    if isinstance(A, FreeMap):
        return fnauto.abelianize(A)
    if isinstance(A, IntMatrix):
        return A
    return IntMatrix(A)


@dataclass(frozen=True)
class OutReport:
    """One of the five cases, with its complete invariant inside the case.

    ``canonical_k`` is ``|k|`` for case V and ``k`` in ``{0, 1}`` for case IV;
    ``conjugator`` is ``P`` with ``P A P^-1`` equal to the canonical matrix.
    """

    case: str
    canonical_k: int | None = None
    parity: int | None = None
    descriptor: str = ""
    tag: str = ""
    canonical: IntMatrix | None = None
    conjugator: IntMatrix | None = None

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for key in ("canonical", "conjugator"):
            val = getattr(self, key)
            d[key] = None if val is None else format_matrix(val)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> OutReport:
        d = dict(d)
        for key in ("canonical", "conjugator"):
            if d.get(key) is not None:
                d[key] = parse_matrix(d[key])
        return cls(**d)

    def summary(self) -> str:
        out = f"case {self.case}: Out(M_phi) is {self.descriptor}"
        if self.case == "V":
            out += f"; canonical k = {self.canonical_k}; infinite-order generator Psi: a -> t a, b -> b, t -> t"
        elif self.case == "IV":
            out += f"; canonical k = {self.canonical_k} (parity {self.parity}); Psi: a -> t a, b -> b, t -> t"
        return out


def classify_out(A) -> OutReport:
    A = _matrix_of(A)
    if A.shape != (2, 2) or abs(A.det()) != 1:
        raise ValueError(f"expected a 2x2 unimodular matrix, got {format_matrix(A)}")
    I = IntMatrix.identity(2)

    def report(case: str, **kw) -> OutReport:
        return OutReport(case, descriptor=DESCRIPTORS[case], tag=TAGS[case], **kw)

    if A == I:
        return report("I")
    if A == -I:
        return report("II")
    if (A - I).det() != 0:
        return report("III")
    B, P = parabolic_canonical_form(A)
    k = B[0, 1]
    if A.det() == -1:
        return report("IV", canonical_k=k, parity=k % 2, canonical=B, conjugator=P)
    return report("V", canonical_k=abs(k), canonical=B, conjugator=P)


@dataclass(frozen=True)
class IsoDecision:
    """``isomorphic`` iff ``P A P^-1 = B^eps`` for some ``P`` and ``eps = +-1``."""

    isomorphic: bool
    conjugator: IntMatrix | None = None
    eps: int | None = None

    def __bool__(self) -> bool:
        return self.isomorphic

    def to_dict(self) -> dict[str, Any]:
        return {
            "isomorphic": self.isomorphic,
            "conjugator": None if self.conjugator is None else format_matrix(self.conjugator),
            "eps": self.eps,
        }


def iso_decide(A, B) -> IsoDecision:
    A, B = _matrix_of(A), _matrix_of(B)
    for eps, target in ((1, B), (-1, B.inverse())):
        P = gl2_conjugate(A, target)
        if P is not None:
            return IsoDecision(True, P, eps)
    return IsoDecision(False)


@dataclass(frozen=True)
class EvectorReport:
    """(a) abelianization is ``Z`` plus finite; (b) no eigenvalue 1."""

    cond_a: bool
    cond_b: bool
    invariants: AbelianInvariants

    @property
    def free_rank(self) -> int:
        return self.invariants.free_rank

    @property
    def torsion(self) -> tuple[int, ...]:
        return self.invariants.torsion


def evector_check(A) -> EvectorReport:
    A = _matrix_of(A)
    if abs(A.det()) != 1:
        raise ValueError(f"matrix {format_matrix(A)} is not unimodular")
    inv = abelianization_invariants(A)
    cond_b = (A - IntMatrix.identity(A.n)).det() != 0
    return EvectorReport(inv.free_rank == 1, cond_b, inv)
