"""Fixed subgroups and outer normal forms for the parabolic monodromy ``a -> a b^k, b -> b``.

A reduced word splits into pieces ``b^m``, ``a b^m``, ``b^m a^-1`` and
``a b^m a^-1`` by breaking before every ``a`` and after every ``a^-1``.
The monodromy acts piecewise, which makes ``Fix = <a b a^-1, b>`` easy to
recognise and gives a constructive coset normal form for automorphisms of
the mapping torus.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import fnauto
from .fnauto import FreeMap, NotAutomorphismError
from .torus import (
    Torus,
    TorusElement,
    TorusMap,
    analyze_restriction,
    compose_maps,
    delta_map,
    identity_map,
    inner_map,
    invert_element,
    omega_map,
    parabolic_shape,
    psi_map,
    xi_map,
)
from .words import Word, cyclically_reduce, exponent_sum, invert, is_conjugate, primitive_root, reduce

__all__ = [
    "PieceKind",
    "Piece",
    "PieceSplit",
    "ParabolicNormalForm",
    "parabolic_map",
    "split_pieces",
    "fixed_by",
    "conjugate_into_fixed",
    "parabolic_outer_normal_form",
]

A, B = 1, 2


class PieceKind(enum.Enum):
    B_POWER = "bPower"
    A_THEN_B = "aThenB"
    B_THEN_AINV = "bThenAinv"
    A_B_AINV = "aBAinv"


@dataclass(frozen=True)
class Piece:
    kind: PieceKind
    m: int

    def letters(self) -> list[int]:
        body = [B if self.m > 0 else -B] * abs(self.m)
        if self.kind in (PieceKind.A_THEN_B, PieceKind.A_B_AINV):
            body.insert(0, A)
        if self.kind in (PieceKind.B_THEN_AINV, PieceKind.A_B_AINV):
            body.append(-A)
        return body

    def __str__(self) -> str:
        return f"{self.kind.value}({self.m})"


@dataclass(frozen=True)
class PieceSplit:
    pieces: tuple[Piece, ...]

    def word(self) -> Word:
        return reduce([x for p in self.pieces for x in p.letters()], 2)

    def __str__(self) -> str:
        return "[" + ", ".join(str(p) for p in self.pieces) + "]"


def parabolic_map(k: int) -> FreeMap:
    """``a -> a b^k, b -> b`` with its inverse."""
    a, b = Word.generator(2, A), Word.generator(2, B)
    return FreeMap([a * Word.generator(2, B, k), b], [a * Word.generator(2, B, -k), b])


def _fiber_xi() -> FreeMap:
    """``xi : a -> a b, b -> b``."""
    a, b = Word.generator(2, A), Word.generator(2, B)
    return FreeMap([a * b, b], [a * invert(b), b])


def split_pieces(w: Word) -> PieceSplit:
    if w.rank != 2:
        raise ValueError("piece splitting is defined on the rank-2 fiber")
    pieces: list[Piece] = []
    started = False  # current piece is non-empty
    has_a = False
    m = 0

    def close(final: bool) -> None:
        nonlocal started, has_a, m
        if started:
            if final:
                kind = PieceKind.A_THEN_B if has_a else PieceKind.B_POWER
            else:
                kind = PieceKind.A_B_AINV if has_a else PieceKind.B_THEN_AINV
            pieces.append(Piece(kind, m))
        started, has_a, m = False, False, 0

    for g, e in w.syllables:
        if g == B:
            started = True
            m += e
        elif e > 0:
            for _ in range(e):
                close(final=True)
                started, has_a = True, True
        else:
            for _ in range(-e):
                started = True
                close(final=False)
    close(final=True)
    return PieceSplit(tuple(pieces))


def _check_nonzero(k: int, r: int) -> None:
    if k == 0:
        raise ValueError("k must be nonzero (k = 0 makes the monodromy the identity)")
    if r == 0:
        raise ValueError("r must be nonzero")


def fixed_by(w: Word, k: int, r: int) -> bool:
    """Whether ``w phi^r == w`` for ``phi: a -> a b^k, b -> b``.

    The fixed subgroup of every nonzero power is ``<a b a^-1, b>``, i.e. the
    words whose pieces are all ``b^m`` or ``a b^m a^-1``.
    """
    _check_nonzero(k, r)
    return all(p.kind in (PieceKind.B_POWER, PieceKind.A_B_AINV) for p in split_pieces(w).pieces)


def conjugate_into_fixed(w: Word, k: int, r: int) -> tuple[Word, Word] | None:
    """``(x, v)`` with ``x^-1 w x = v`` and ``v`` fixed, if ``w phi^r ~ w``.

    The cyclic core of ``w`` is rotated to start at an ``a``; a rotation
    that is a cyclic permutation of its own image is fixed by some power of
    the monodromy, hence (all powers share one fixed subgroup) by the
    monodromy itself.
    """
    _check_nonzero(k, r)
    phi_r = fnauto.power(parabolic_map(k), r)
    if not is_conjugate(fnauto.apply(phi_r, w), w):
        return None
    core, c = cyclically_reduce(w)
    ci = invert(c)
    if exponent_sum(core, A) == 0 and all(g == B for g, _ in core.syllables):
        return ci, core
    letters = list(core.letters())
    for pos, letter in enumerate(letters):
        if letter != A:
            continue
        prefix = reduce(letters[:pos], 2)
        rotated = reduce(letters[pos:] + letters[:pos], 2)
        if fnauto.apply(phi_r, rotated) == rotated:
            assert fixed_by(rotated, k, 1)
            x = ci * prefix
            assert invert(x) * w * x == rotated
            return x, rotated
    raise AssertionError("image is conjugate but no rotation of the core is fixed")


# ---------------------------------------------------------------------------
# outer normal form


@dataclass(frozen=True)
class ParabolicNormalForm:
    """``Theta Psi^m Gamma_g = Xi^i Delta^delta Omega^omega`` (left to right)."""

    m: int
    g: TorusElement
    i: int
    delta: int
    omega: int

    def rhs(self, T: Torus) -> TorusMap:
        out = xi_map(T) ** self.i
        if self.delta:
            out = compose_maps(out, delta_map(T))
        if self.omega:
            out = compose_maps(out, omega_map(T))
        return out

    def lhs(self, theta: TorusMap) -> TorusMap:
        T = theta.source
        return compose_maps(compose_maps(theta, psi_map(T) ** self.m), inner_map(T, self.g))

    def verify(self, theta: TorusMap) -> bool:
        return self.lhs(theta).images() == self.rhs(theta.source).images()


def parabolic_outer_normal_form(theta: TorusMap) -> ParabolicNormalForm:
    T = theta.source
    if theta.target != T:
        raise ValueError("normal form needs a self-map of the mapping torus")
    k, sign = parabolic_shape(T)
    if sign != 1 or k == 0:
        raise ValueError("monodromy must be a -> a b^k, b -> b with k != 0")
    if not theta.is_isomorphism:
        raise NotAutomorphismError("normal form needs a verified automorphism (inverse assignment)")

    a_img, b_img, t_img = theta.images()
    if b_img.t_exp != 0:
        raise NotAutomorphismError(f"image of b has t-exponent {b_img.t_exp}; an automorphism keeps it 0")
    q = t_img.t_exp
    if q not in (1, -1):
        raise NotAutomorphismError(f"image of t has t-exponent {q}; expected +-1")

    # Move b's image into the fixed subgroup (through its primitive root).
    root, _ = primitive_root(b_img.tail)
    found = conjugate_into_fixed(root, k, q)
    if found is None:
        raise NotAutomorphismError("image of b is not conjugate into the fixed subgroup")
    x_word, _ = found
    x = T.element(0, x_word)

    # Kill the t-exponent of a's image with a power of Psi.
    p = a_img.t_exp
    eps_a = exponent_sum(a_img.tail, A)
    if eps_a not in (1, -1):
        raise NotAutomorphismError(f"image of a has a-exponent sum {eps_a}; expected +-1")
    m = -eps_a * p
    psi_m = psi_map(T) ** m
    lam_map = compose_maps(compose_maps(theta, inner_map(T, x)), psi_m)

    # Make it positive with non-negative trace.
    Om, De = omega_map(T), delta_map(T)
    choices = [
        (identity_map(T), identity_map(T), 0, 0),
        (Om, Om, 0, 1),
        (De, De, 1, 0),
        (compose_maps(Om, De), compose_maps(De, Om), 1, 1),
    ]
    for X, X_inv, delta, omega in choices:
        cand = compose_maps(lam_map, X)
        info = analyze_restriction(cand)
        mat = fnauto.abelianize(info.restriction)
        if info.signum == 1 and mat.trace() >= 0:
            break
    else:
        raise NotAutomorphismError("no sign fix-up yields a positive automorphism with non-negative trace")

    # Its restriction is xi^j followed by an inner automorphism.
    j = mat.rows[0][1]
    xi_inv_j = fnauto.power(_fiber_xi(), -j)
    z = fnauto.extract_conjugator(fnauto.compose(xi_inv_j, info.restriction))
    i = j % abs(k)
    lam = (j - i) // k

    # Lambda X = Xi^i Gamma_{t^lam z}; push everything into one conjugator.
    h = invert_element(T.element(lam, z))
    g = psi_m(x) * X_inv(h)
    nf = ParabolicNormalForm(m, g, i, delta, omega)
    if not nf.verify(theta):
        raise NotAutomorphismError("normal-form identity failed; input is not a genuine automorphism")
    return nf
