"""Endomorphisms and automorphisms of free groups (right action).

``apply(phi, w)`` is ``w phi``; ``compose(phi, psi)`` is "first ``phi``
then ``psi``", so ``abelianize`` is a homomorphism into row-convention
matrices: ``abelianize(compose(phi, psi)) == abelianize(phi) @ abelianize(psi)``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Sequence

from .words import (
    ParseError,
    Word,
    abelian_vector,
    commutator,
    cyclically_reduce,
    generator_name,
    invert,
    is_conjugate,
    parse_word,
    power as word_power,
)
from .zmat import IntMatrix

__all__ = [
    "FreeMap",
    "InnerWitness",
    "NotAutomorphismError",
    "apply",
    "compose",
    "power",
    "abelianize",
    "inner",
    "is_automorphism_rank2",
    "invert_rank2",
    "is_inner_rank2",
    "extract_conjugator",
    "parse_automorphism",
    "format_automorphism",
    "random_nielsen_automorphism",
]


class NotAutomorphismError(ValueError):
    pass


class FreeMap:
    """Endomorphism of ``F_n`` given by generator images.

    If ``inverse_images`` is supplied both composites are checked to fix
    every generator; such a map is an automorphism.
    """

    __slots__ = ("rank", "images", "inverse_images")

    def __init__(self, images: Sequence[Word], inverse_images: Sequence[Word] | None = None, *, verify: bool = True):
        images = tuple(images)
        if not images:
            raise ValueError("a free map needs at least one generator image")
        rank = len(images)
        for w in images:
            if w.rank != rank:
                raise ValueError(f"image {w} has rank {w.rank}, expected {rank}")
        self.rank = rank
        self.images = images
        self.inverse_images = None
        if inverse_images is not None:
            inv = tuple(inverse_images)
            if len(inv) != rank or any(w.rank != rank for w in inv):
                raise ValueError("inverse images have the wrong rank")
            if verify:
                gens = [Word.generator(rank, i + 1) for i in range(rank)]
                fwd = FreeMap(images)
                back = FreeMap(inv)
                for x in gens:
                    if apply(back, apply(fwd, x)) != x or apply(fwd, apply(back, x)) != x:
                        raise NotAutomorphismError(f"supplied inverse does not invert the map at {x}")
            self.inverse_images = inv

    @classmethod
    def identity(cls, rank: int) -> FreeMap:
        gens = [Word.generator(rank, i + 1) for i in range(rank)]
        return cls(gens, gens, verify=False)

    @property
    def is_automorphism(self) -> bool:
        return self.inverse_images is not None

    def inverse(self) -> FreeMap:
        if self.inverse_images is None:
            if self.rank == 2:
                return invert_rank2(self).inverse()
            raise NotAutomorphismError("no inverse images attached to this map")
        return FreeMap(self.inverse_images, self.images, verify=False)

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FreeMap):
            return NotImplemented
        return self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"FreeMap({format_automorphism(self, with_inverse=False)!r})"


@dataclass(frozen=True)
class InnerWitness:
    """``w`` such that the map is ``x -> w^-1 x w``."""

    w: Word


def apply(phi: FreeMap, w: Word) -> Word:
    if w.rank != phi.rank:
        raise ValueError(f"rank mismatch: map has rank {phi.rank}, word has rank {w.rank}")
    result = Word.identity(w.rank)
    for g, e in w.syllables:
        result = result * word_power(phi.images[g - 1], e)
    return result


def compose(phi: FreeMap, psi: FreeMap) -> FreeMap:
    """The map ``x -> (x phi) psi``."""
    if phi.rank != psi.rank:
        raise ValueError(f"rank mismatch: {phi.rank} != {psi.rank}")
    images = [apply(psi, w) for w in phi.images]
    inv = None
    if phi.inverse_images is not None and psi.inverse_images is not None:
        back_phi = FreeMap(phi.inverse_images)
        inv = [apply(back_phi, w) for w in psi.inverse_images]
    return FreeMap(images, inv, verify=False)


def power(phi: FreeMap, m: int) -> FreeMap:
    if m < 0:
        if phi.inverse_images is None:
            raise NotAutomorphismError("negative power of a map without a verified inverse")
        phi, m = phi.inverse(), -m
    result = FreeMap.identity(phi.rank)
    base = phi
    while m:
        if m & 1:
            result = compose(result, base)
        m >>= 1
        if m:
            base = compose(base, base)
    return result


def abelianize(phi: FreeMap) -> IntMatrix:
    """Row ``i`` holds the exponent sums of the ``i``-th generator image."""
    return IntMatrix([abelian_vector(w) for w in phi.images])


def inner(w: Word) -> FreeMap:
    """``gamma_w : x -> w^-1 x w``."""
    n = w.rank
    gens = [Word.generator(n, i + 1) for i in range(n)]
    wi = invert(w)
    return FreeMap([wi * x * w for x in gens], [w * x * wi for x in gens], verify=False)


# ---------------------------------------------------------------------------
# rank two


def _require_rank2(phi: FreeMap) -> None:
    if phi.rank != 2:
        raise ValueError(f"rank-2 operation applied to a map of rank {phi.rank}")


def is_automorphism_rank2(phi: FreeMap) -> bool:
    """Nielsen's criterion: ``[a phi, b phi]`` is conjugate to ``[a, b]^{+-1}``."""
    _require_rank2(phi)
    a, b = Word.generator(2, 1), Word.generator(2, 2)
    c = commutator(a, b)
    img = commutator(*phi.images)
    return is_conjugate(img, c) or is_conjugate(img, invert(c))


_MOVES: list[FreeMap] = []


def _moves() -> list[FreeMap]:
    """Elementary Nielsen moves; ``compose(nu, phi)`` transforms the image pair."""
    if not _MOVES:
        a, b = Word.generator(2, 1), Word.generator(2, 2)
        ai, bi = invert(a), invert(b)
        for img, inv in [
            ((a * b, b), (a * bi, b)),  # (u, v) -> (uv, v)
            ((a * bi, b), (a * b, b)),  # (u v^-1, v)
            ((b * a, b), (bi * a, b)),  # (v u, v)
            ((bi * a, b), (b * a, b)),  # (v^-1 u, v)
            ((a, b * a), (a, b * ai)),  # (u, v u)
            ((a, b * ai), (a, b * a)),  # (u, v u^-1)
            ((a, a * b), (a, ai * b)),  # (u, u v)
            ((a, ai * b), (a, a * b)),  # (u, u^-1 v)
        ]:
            _MOVES.append(FreeMap(img, inv, verify=False))
    return _MOVES


def _pair_length(pair: tuple[Word, Word]) -> int:
    return len(pair[0]) + len(pair[1])


def invert_rank2(phi: FreeMap) -> FreeMap:
    """Attach verified inverse images to a rank-2 automorphism.

    Nielsen reduction on ``(a phi, b phi)``: apply length-reducing
    elementary moves ``nu`` (the new pair is the image pair of ``nu phi``)
    until the pair is a signed permutation ``sigma`` of ``(a, b)``. With
    ``M`` the accumulated product, ``M phi = sigma`` and ``phi^-1 = sigma^-1 M``.
    """
    _require_rank2(phi)
    if phi.inverse_images is not None:
        return phi
    moves = _moves()
    M = FreeMap.identity(2)
    current = phi
    seen: set[tuple[Word, Word]] = set()
    while _pair_length(current.images) > 2:
        length = _pair_length(current.images)
        seen.add(current.images)
        best = None
        plateau = []
        for nu in moves:
            cand = compose(nu, current)
            cl = _pair_length(cand.images)
            if cl < length and (best is None or cl < _pair_length(best[1].images)):
                best = (nu, cand)
            elif cl == length and cand.images not in seen:
                plateau.append((nu, cand))
        if best is None:
            if not plateau:
                raise NotAutomorphismError(f"Nielsen reduction stalls; {phi!r} is not an automorphism")
            best = plateau[0]
        nu, current = best
        M = compose(nu, M)
    u, v = current.images
    a, b = Word.generator(2, 1), Word.generator(2, 2)
    if len(u) != 1 or len(v) != 1 or u.syllables[0][0] == v.syllables[0][0]:
        raise NotAutomorphismError(f"{phi!r} is not an automorphism (terminal pair {u}, {v})")
    # sigma = current; its inverse is immediate
    sigma_inv = [None, None]
    for src, img in ((a, u), (b, v)):
        g, e = img.syllables[0]
        sigma_inv[g - 1] = src if e == 1 else invert(src)
    inv_map = compose(FreeMap(sigma_inv), M)
    return FreeMap(phi.images, inv_map.images)


def is_inner_rank2(phi: FreeMap) -> InnerWitness | None:
    """By Nielsen's theorem a rank-2 automorphism is inner iff it abelianizes to ``I``."""
    _require_rank2(phi)
    if abelianize(phi) != IntMatrix.identity(2):
        return None
    return InnerWitness(extract_conjugator(phi))


def extract_conjugator(phi: FreeMap) -> Word:
    """The unique ``w`` with ``x phi == w^-1 x w`` for every generator (rank >= 2).

    From ``x1 phi = c^-1 x1 c`` the conjugator is ``x1^j c``; conjugating the
    second image back by ``c`` reads off ``j``. The candidate is verified.
    """
    n = phi.rank
    ident = Word.identity(n)
    if n == 1:
        if phi.images[0] == Word.generator(1, 1):
            return ident
        raise NotAutomorphismError("map is not inner")
    x1, x2 = Word.generator(n, 1), Word.generator(n, 2)
    core, c = cyclically_reduce(phi.images[0])
    if core != x1:
        raise NotAutomorphismError("map is not inner: first image is not conjugate to the first generator")
    y = c * phi.images[1] * invert(c)
    if y == x2:
        j = 0
    else:
        syl = y.syllables
        if len(syl) == 3 and syl[0][0] == 1 and syl[2][0] == 1 and syl[1] == (2, 1) and syl[0][1] == -syl[2][1]:
            j = syl[2][1]
        else:
            raise NotAutomorphismError("map is not inner: no common conjugator")
    w = word_power(x1, j) * c
    wi = invert(w)
    for i, img in enumerate(phi.images):
        x = Word.generator(n, i + 1)
        if wi * x * w != img:
            raise NotAutomorphismError(f"map is not inner: conjugator fails at generator {i + 1}")
    return w if w else ident


# ---------------------------------------------------------------------------
# text format


_RULE = re.compile(r"\s*(x\d+|[a-z])\s*->\s*")


def _parse_rules(text: str, offset: int, rank_hint: int | None) -> list[tuple[str, str, int, int]]:
    """``(name, body, body column, name column)`` per ``;``-separated rule."""
    rules = []
    pos = 0
    for chunk in text.split(";"):
        if chunk.strip():
            m = _RULE.match(chunk)
            name_col = offset + pos + len(chunk) - len(chunk.lstrip()) + 1
            if not m:
                raise ParseError("expected '<generator> -> <word>'", text, name_col)
            rules.append((m.group(1), chunk[m.end():], offset + pos + m.end() + 1, name_col))
        pos += len(chunk) + 1
    return rules


def parse_automorphism(text: str, *, auto_invert: bool = True) -> FreeMap:
    """Parse ``"a -> a b^2 ; b -> b"`` with an optional ``inv:`` block.

    Rules must name the generators in order. Rank-2 maps without an
    ``inv:`` block are inverted by Nielsen reduction (``auto_invert``);
    rank >= 3 maps need explicit inverses to count as automorphisms.
    """
    main, _, inv_text = text.partition("inv:")
    rules = _parse_rules(main, 0, None)
    rank = len(rules)
    if rank == 0:
        raise ParseError("empty automorphism specification", text, 1)
    images = []
    for i, (name, body, col, name_col) in enumerate(rules):
        if name != generator_name(i + 1, rank):
            raise ParseError(f"expected rule for {generator_name(i + 1, rank)!r}, got {name!r}", text, name_col)
        try:
            images.append(parse_word(body, rank))
        except ParseError as exc:
            raise ParseError(str(exc).split(" (line")[0], text, col + (exc.column or 1) - 1) from None
    inverse = None
    if inv_text.strip():
        inv_rules = _parse_rules(inv_text, len(main) + 4, rank)
        if len(inv_rules) != rank:
            raise ParseError(f"inv: block needs {rank} rules", text, len(main) + 1)
        inverse = []
        for i, (name, body, col, name_col) in enumerate(inv_rules):
            if name != generator_name(i + 1, rank):
                raise ParseError(f"expected inverse rule for {generator_name(i + 1, rank)!r}", text, name_col)
            try:
                inverse.append(parse_word(body, rank))
            except ParseError as exc:
                raise ParseError(str(exc).split(" (line")[0], text, col + (exc.column or 1) - 1) from None
    phi = FreeMap(images, inverse)
    if inverse is None and rank == 2 and auto_invert:
        phi = invert_rank2(phi)
    return phi


def format_automorphism(phi: FreeMap, with_inverse: bool = True) -> str:
    n = phi.rank
    text = " ; ".join(f"{generator_name(i + 1, n)} -> {w}" for i, w in enumerate(phi.images))
    if with_inverse and phi.inverse_images is not None:
        text += " ; inv: " + " ; ".join(f"{generator_name(i + 1, n)} -> {w}" for i, w in enumerate(phi.inverse_images))
    return text


# ---------------------------------------------------------------------------
# random automorphisms


def _nielsen_generators() -> list[FreeMap]:
    a, b = Word.generator(2, 1), Word.generator(2, 2)
    ai, bi = invert(a), invert(b)
    return [
        FreeMap((b, a), (b, a), verify=False),  # swap
        FreeMap((ai, b), (ai, b), verify=False),  # invert a
        FreeMap((a, bi), (a, bi), verify=False),  # invert b
        FreeMap((a * b, b), (a * bi, b), verify=False),  # a -> ab
        FreeMap((a * bi, b), (a * b, b), verify=False),
    ]


def random_nielsen_automorphism(length: int = 8, rng: random.Random | None = None) -> FreeMap:
    """Product of at most ``length`` elementary Nielsen automorphisms of ``F_2``."""
    rng = rng or random.Random()
    gens = _nielsen_generators()
    phi = FreeMap.identity(2)
    for _ in range(rng.randint(0, length)):
        phi = compose(phi, rng.choice(gens))
    return phi
