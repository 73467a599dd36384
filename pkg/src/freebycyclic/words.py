"""Freely reduced words in a free group of finite rank.

Words are stored as run-length syllables ``(generator, exponent)`` with
1-based generator indices, so ``b**(10**6)`` costs a single syllable.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Sequence

__all__ = [
    "ParseError",
    "Word",
    "reduce",
    "multiply",
    "invert",
    "cyclically_reduce",
    "is_conjugate",
    "exponent_sum",
    "generator_name",
    "parse_word",
    "format_word",
]

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class ParseError(ValueError):
    """Malformed text input; ``column`` is 1-based."""

    def __init__(self, message: str, text: str = "", column: int | None = None, line: int = 1):
        self.text = text
        self.column = column
        self.line = line
        where = f" (line {line}, column {column})" if column is not None else ""
        super().__init__(f"{message}{where}")


class Word:
    """Reduced element of the free group ``F_rank``."""

    __slots__ = ("rank", "syllables", "_hash")

    def __init__(self, rank: int, syllables: Iterable[tuple[int, int]] = ()):
        if rank < 1:
            raise ValueError(f"rank must be positive, got {rank}")
        syl = tuple((int(g), int(e)) for g, e in syllables)
        for i, (g, e) in enumerate(syl):
            if not 1 <= g <= rank:
                raise ValueError(f"generator index {g} out of range for rank {rank}")
            if e == 0:
                raise ValueError("syllable with zero exponent")
            if i and syl[i - 1][0] == g:
                raise ValueError("adjacent syllables share a generator; use reduce()")
        self.rank = rank
        self.syllables = syl
        self._hash = None

    @classmethod
    def _raw(cls, rank: int, syllables: tuple[tuple[int, int], ...]) -> Word:
        # trusted constructor: caller guarantees the invariants
        w = object.__new__(cls)
        w.rank = rank
        w.syllables = syllables
        w._hash = None
        return w

    @classmethod
    def identity(cls, rank: int) -> Word:
        return cls._raw(rank, ())

    @classmethod
    def generator(cls, rank: int, index: int, exponent: int = 1) -> Word:
        if not 1 <= index <= rank:
            raise ValueError(f"generator index {index} out of range for rank {rank}")
        return cls._raw(rank, ((index, exponent),) if exponent else ())

    @classmethod
    def from_letters(cls, rank: int, letters: Iterable[int]) -> Word:
        return reduce(letters, rank)

    def letters(self) -> Iterator[int]:
        """Signed generator letters, e.g. ``a b^-2`` -> ``1, -2, -2``."""
        for g, e in self.syllables:
            s = g if e > 0 else -g
            for _ in range(abs(e)):
                yield s

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.rank == other.rank and self.syllables == other.syllables

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rank, self.syllables))
        return self._hash

    def __mul__(self, other: Word) -> Word:
        return multiply(self, other)

    def __pow__(self, n: int) -> Word:
        return power(self, n)

    def __invert__(self) -> Word:
        return invert(self)

    def inverse(self) -> Word:
        return invert(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r}, rank={self.rank})"

    def __str__(self) -> str:
        return format_word(self)


def _check_rank(u: Word, v: Word) -> None:
    if u.rank != v.rank:
        raise ValueError(f"rank mismatch: {u.rank} != {v.rank}")


def _append(stack: list[tuple[int, int]], g: int, e: int) -> None:
    if e == 0:
        return
    if stack and stack[-1][0] == g:
        e += stack[-1][1]
        stack.pop()
        if e:
            stack.append((g, e))
    else:
        stack.append((g, e))


def reduce(raw: Iterable[int], rank: int) -> Word:
    """Freely reduce a sequence of signed letters (``-2`` is ``b^-1``)."""
    stack: list[tuple[int, int]] = []
    for letter in raw:
        g = abs(int(letter))
        if letter == 0 or g > rank:
            raise ValueError(f"generator index {letter} out of range for rank {rank}")
        _append(stack, g, 1 if letter > 0 else -1)
    return Word._raw(rank, tuple(stack))


def reduce_syllables(syllables: Iterable[tuple[int, int]], rank: int) -> Word:
    """Freely reduce a sequence of (generator, exponent) pairs."""
    stack: list[tuple[int, int]] = []
    for g, e in syllables:
        if not 1 <= g <= rank:
            raise ValueError(f"generator index {g} out of range for rank {rank}")
        _append(stack, g, e)
    return Word._raw(rank, tuple(stack))


def multiply(u: Word, v: Word) -> Word:
    _check_rank(u, v)
    if not u.syllables:
        return v
    if not v.syllables:
        return u
    left = list(u.syllables)
    j = 0
    vs = v.syllables
    while left and j < len(vs) and left[-1][0] == vs[j][0]:
        e = left[-1][1] + vs[j][1]
        if e:
            left[-1] = (vs[j][0], e)
            j += 1
            break
        left.pop()
        j += 1
    return Word._raw(u.rank, tuple(left) + vs[j:])


def invert(w: Word) -> Word:
    return Word._raw(w.rank, tuple((g, -e) for g, e in reversed(w.syllables)))


def power(w: Word, n: int) -> Word:
    if n < 0:
        w, n = invert(w), -n
    if len(w.syllables) == 1:
        g, e = w.syllables[0]
        return Word._raw(w.rank, ((g, e * n),)) if n else Word.identity(w.rank)
    result = Word.identity(w.rank)
    base = w
    while n:
        if n & 1:
            result = multiply(result, base)
        n >>= 1
        if n:
            base = multiply(base, base)
    return result


def commutator(u: Word, v: Word) -> Word:
    """``[u, v] = u^-1 v^-1 u v``."""
    return invert(u) * invert(v) * u * v


def cyclically_reduce(w: Word) -> tuple[Word, Word]:
    """Return ``(core, conjugator)`` with ``w = conjugator^-1 * core * conjugator``.

    The conjugator is the word stripped from the right end of ``w``; the
    core's first and last letters are not mutually inverse.
    """
    syl = list(w.syllables)
    i, j = 0, len(syl) - 1
    stripped: list[tuple[int, int]] = []  # right-end pieces, outermost first
    while j > i and syl[i][0] == syl[j][0] and (syl[i][1] > 0) != (syl[j][1] > 0):
        g, ei = syl[i]
        ej = syl[j][1]
        if ei + ej == 0:
            stripped.append((g, ej))
            i += 1
            j -= 1
        elif abs(ei) < abs(ej):
            stripped.append((g, -ei))
            syl[j] = (g, ej + ei)
            i += 1
        else:
            stripped.append((g, ej))
            syl[i] = (g, ei + ej)
            j -= 1
            break
    core = Word._raw(w.rank, tuple(syl[i : j + 1]))
    conj = Word._raw(w.rank, tuple(reversed(stripped)))
    return core, conj


def _cyclic_form(w: Word) -> tuple[tuple[tuple[int, int], ...], Word]:
    """Cyclic syllable sequence ``S`` and ``c`` with ``w = c^-1 * S * c``.

    In ``S`` the first and last syllables carry distinct generators (unless
    ``S`` has at most one syllable), so rotations of ``S`` at syllable
    boundaries enumerate the cyclic word.
    """
    core, c = cyclically_reduce(w)
    syl = core.syllables
    if len(syl) >= 2 and syl[0][0] == syl[-1][0]:
        # first and last agree in sign here; fold the head onto the tail
        g, e0 = syl[0]
        merged = syl[1:-1] + ((g, syl[-1][1] + e0),)
        # merged = x^-1 * core * x with x = g^e0
        x = Word._raw(w.rank, ((g, e0),))
        return merged, invert(x) * c
    return syl, c


def _kmp_find(pattern: Sequence, text: Sequence) -> int:
    if not pattern:
        return 0
    fail = [0] * len(pattern)
    k = 0
    for i in range(1, len(pattern)):
        while k and pattern[i] != pattern[k]:
            k = fail[k - 1]
        if pattern[i] == pattern[k]:
            k += 1
        fail[i] = k
    k = 0
    for i, item in enumerate(text):
        while k and item != pattern[k]:
            k = fail[k - 1]
        if item == pattern[k]:
            k += 1
            if k == len(pattern):
                return i - k + 1
    return -1


def is_conjugate(u: Word, v: Word, witness: bool = False):
    """Decide conjugacy in the free group.

    With ``witness=True`` return ``(flag, x)`` where ``x^-1 * u * x == v``
    whenever ``flag`` is true (``x`` is ``None`` otherwise).
    """
    _check_rank(u, v)
    su, cu = _cyclic_form(u)
    sv, cv = _cyclic_form(v)
    found = None
    if len(su) == len(sv):
        if len(su) <= 1:
            if su == sv:
                found = 0
        else:
            found = _kmp_find(sv, su + su)
            if found < 0:
                found = None
    if found is None:
        return (False, None) if witness else False
    if not witness:
        return True
    # S_u = P Q, S_v = Q P = P^-1 S_u P
    p = Word._raw(u.rank, su[:found])
    x = invert(cu) * p * cv
    assert invert(x) * u * x == v, "conjugacy witness failed to verify"
    return True, x


def exponent_sum(w: Word, generator: int) -> int:
    if not 1 <= generator <= w.rank:
        raise ValueError(f"generator index {generator} out of range for rank {w.rank}")
    return sum(e for g, e in w.syllables if g == generator)


def abelian_vector(w: Word) -> tuple[int, ...]:
    v = [0] * w.rank
    for g, e in w.syllables:
        v[g - 1] += e
    return tuple(v)


def primitive_root(w: Word) -> tuple[Word, int]:
    """Return ``(root, r)`` with ``w == root**r`` and ``r >= 1`` maximal.

    The identity returns ``(identity, 1)``.
    """
    if not w.syllables:
        return w, 1
    syl, c = _cyclic_form(w)
    if len(syl) == 1:
        g, e = syl[0]
        root = Word._raw(w.rank, ((g, 1 if e > 0 else -1),))
        return invert(c) * root * c, abs(e)
    n = len(syl)
    for p in range(1, n + 1):
        if n % p == 0 and syl[:p] * (n // p) == syl:
            root = Word._raw(w.rank, syl[:p])
            return invert(c) * root * c, n // p
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# text grammar


def generator_name(index: int, rank: int) -> str:
    if rank <= len(_LETTERS):
        return _LETTERS[index - 1]
    return f"x{index}"


_TOKEN = re.compile(r"\s*(?:(x\d+|[a-z])(?:\^\s*([+-]?\d+))?|(1)(?![\d^]))")


def _generator_index(name: str) -> int:
    if name.startswith("x") and len(name) > 1:
        return int(name[1:])
    return _LETTERS.index(name) + 1


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Split ``text`` into ``(name, exponent, column)`` tokens."""
    out = []
    pos = 0
    stripped_end = len(text.rstrip())
    while pos < stripped_end:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[col - 1]!r}", text, col)
        col = m.start(1) + 1 if m.group(1) else m.start(3) + 1
        if m.group(3):
            out.append(("1", 0, col))
        else:
            exp = int(m.group(2)) if m.group(2) is not None else 1
            out.append((m.group(1), exp, col))
        pos = m.end()
    return out


def parse_word(text: str, rank: int | None = None) -> Word:
    """Parse ``"a b^2 a^-1"``, ``"x1 x3^-2"`` or ``"1"``.

    When ``rank`` is omitted it is the largest generator index mentioned
    (at least 1).
    """
    tokens = tokenize(text)
    syl = []
    top = 1
    for name, exp, col in tokens:
        if name == "1":
            continue
        g = _generator_index(name)
        if g < 1 or (rank is not None and g > rank):
            raise ParseError(f"generator {name!r} out of range for rank {rank}", text, col)
        top = max(top, g)
        syl.append((g, exp))
    if rank is None:
        rank = top
    return reduce_syllables(syl, rank)


def format_word(w: Word) -> str:
    if not w.syllables:
        return "1"
    parts = []
    for g, e in w.syllables:
        name = generator_name(g, w.rank)
        parts.append(name if e == 1 else f"{name}^{e}")
    return " ".join(parts)
