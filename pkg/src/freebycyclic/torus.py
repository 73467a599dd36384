"""Normal-form arithmetic in mapping tori ``M_phi = <x_i, t | t^-1 x_i t = x_i phi>``.

Every element is ``t^k w`` with ``w`` in the fiber; products use
``u t^l = t^l (u phi^l)``. Maps between tori are given on generators and
verified against the defining relators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from . import fnauto
from .fnauto import FreeMap, NotAutomorphismError
from .words import ParseError, Word, generator_name, invert, parse_word, tokenize
from .zmat import IntMatrix, smith_normal_form

__all__ = [
    "Torus",
    "TorusElement",
    "TorusMap",
    "RelatorError",
    "RestrictionAnalysis",
    "AbelianInvariants",
    "normalize",
    "build_map",
    "build_isomorphism",
    "semiconjugate_target",
    "inner_map",
    "builtin_automorphisms",
    "psi_map",
    "omega_map",
    "delta_map",
    "xi_map",
    "upsilon_map",
    "analyze_restriction",
    "center_is_nontrivial",
    "abelianization_invariants",
    "parse_element",
    "format_element",
]


class RelatorError(ValueError):
    """A defining relator is not sent to the identity."""

    def __init__(self, index: int, image: TorusElement, message: str = ""):
        self.index = index
        self.image = image
        super().__init__(message or f"relator {index + 1} maps to {format_element(image)}, not the identity")


class Torus:
    """The mapping torus of a fiber automorphism with a verified inverse."""

    def __init__(self, monodromy: FreeMap, stable_letter: str = "t"):
        if monodromy.inverse_images is None:
            if monodromy.rank == 2:
                monodromy = fnauto.invert_rank2(monodromy)
            else:
                raise NotAutomorphismError("monodromy of rank >= 3 needs explicit inverse images")
        self.monodromy = monodromy
        self.rank = monodromy.rank
        self.stable_letter = stable_letter
        self._powers: dict[int, FreeMap] = {0: FreeMap.identity(self.rank), 1: monodromy, -1: monodromy.inverse()}

    @classmethod
    def from_spec(cls, text: str) -> Torus:
        return cls(fnauto.parse_automorphism(text))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Torus):
            return NotImplemented
        return self.monodromy.images == other.monodromy.images

    def __hash__(self) -> int:
        return hash(self.monodromy.images)

    def __repr__(self) -> str:
        return f"Torus({fnauto.format_automorphism(self.monodromy, with_inverse=False)!r})"

    def monodromy_power(self, l: int) -> FreeMap:
        if l not in self._powers:
            self._powers[l] = fnauto.power(self.monodromy, l)
        return self._powers[l]

    def act(self, w: Word, l: int) -> Word:
        """``w phi^l``."""
        if l == 0 or not w:
            return w
        if abs(l) <= 8:
            step = self._powers[1 if l > 0 else -1]
            for _ in range(abs(l)):
                w = fnauto.apply(step, w)
            return w
        return fnauto.apply(self.monodromy_power(l), w)

    # element constructors
    def element(self, t_exp: int = 0, tail: Word | None = None) -> TorusElement:
        tail = Word.identity(self.rank) if tail is None else tail
        if tail.rank != self.rank:
            raise ValueError(f"tail has rank {tail.rank}, torus has rank {self.rank}")
        return TorusElement(self, t_exp, tail)

    def identity(self) -> TorusElement:
        return self.element()

    @property
    def t(self) -> TorusElement:
        return self.element(1)

    def gen(self, i: int) -> TorusElement:
        return self.element(0, Word.generator(self.rank, i))

    def fiber_generators(self) -> list[TorusElement]:
        return [self.gen(i + 1) for i in range(self.rank)]

    def generators(self) -> list[TorusElement]:
        return self.fiber_generators() + [self.t]

    def fiber(self, w: Word | str) -> TorusElement:
        if isinstance(w, str):
            w = parse_word(w, self.rank)
        return self.element(0, w)


@dataclass(frozen=True, eq=False)
class TorusElement:
    """``t^t_exp * tail`` in normal form."""

    torus: Torus
    t_exp: int
    tail: Word

    def _check(self, other: TorusElement) -> None:
        if self.torus is not other.torus and self.torus != other.torus:
            raise ValueError("elements belong to different mapping tori")

    def __mul__(self, other: TorusElement) -> TorusElement:
        return multiply(self, other)

    def inverse(self) -> TorusElement:
        return invert_element(self)

    def __invert__(self) -> TorusElement:
        return invert_element(self)

    def __pow__(self, n: int) -> TorusElement:
        base = self if n >= 0 else invert_element(self)
        n = abs(n)
        result = self.torus.identity()
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def is_identity(self) -> bool:
        return self.t_exp == 0 and not self.tail

    def conjugate_by(self, g: TorusElement) -> TorusElement:
        """``g^-1 * self * g``."""
        return invert_element(g) * self * g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TorusElement):
            return NotImplemented
        return self.t_exp == other.t_exp and self.tail == other.tail and self.torus == other.torus

    def __hash__(self) -> int:
        return hash((self.t_exp, self.tail))

    def __repr__(self) -> str:
        return f"TorusElement({format_element(self)!r})"

    def __str__(self) -> str:
        return format_element(self)


def multiply(g: TorusElement, h: TorusElement) -> TorusElement:
    """``(t^k u)(t^l v) = t^(k+l) (u phi^l) v``."""
    g._check(h)
    T = g.torus
    return TorusElement(T, g.t_exp + h.t_exp, T.act(g.tail, h.t_exp) * h.tail)


def invert_element(g: TorusElement) -> TorusElement:
    """``(t^k w)^-1 = t^-k (w phi^-k)^-1``."""
    T = g.torus
    return TorusElement(T, -g.t_exp, invert(T.act(g.tail, -g.t_exp)))


def t_exponent(g: TorusElement) -> int:
    return g.t_exp


Factor = Union[int, Word, TorusElement]


def normalize(torus: Torus, factors: Iterable[Factor]) -> TorusElement:
    """Normal form of a product of t-powers (ints), fiber words and elements."""
    result = torus.identity()
    for f in factors:
        if isinstance(f, TorusElement):
            piece = f
        elif isinstance(f, Word):
            piece = torus.element(0, f)
        else:
            piece = torus.element(int(f))
        result = result * piece
    return result


def evaluate(text: str, assignment: Mapping[str, TorusElement], torus: Torus | None = None) -> TorusElement:
    """Evaluate a word such as ``"t^-3 s t^2 s"`` under ``letter -> element``."""
    if torus is None:
        torus = next(iter(assignment.values())).torus
    result = torus.identity()
    for name, exp, col in tokenize(text):
        if name == "1":
            continue
        if name not in assignment:
            raise ParseError(f"no image assigned to {name!r}", text, col)
        result = result * (assignment[name] ** exp)
    return result


# ---------------------------------------------------------------------------
# maps between tori


def _image_of_word(w: Word, images: Sequence[TorusElement], target: Torus) -> TorusElement:
    result = target.identity()
    for g, e in w.syllables:
        result = result * (images[g - 1] ** e)
    return result


class TorusMap:
    """Homomorphism ``source -> target`` fixed by generator images.

    Construction checks that every defining relator ``t^-1 x_i t (x_i phi)^-1``
    maps to the identity. With ``inverse`` (images of the target generators
    in the source, fiber first, then the stable letter) both composites are
    checked to fix all generators, certifying an isomorphism.
    """

    def __init__(
        self,
        source: Torus,
        target: Torus,
        fiber_images: Sequence[TorusElement],
        t_image: TorusElement,
        inverse: tuple[Sequence[TorusElement], TorusElement] | None = None,
        *,
        verify: bool = True,
    ):
        fiber_images = tuple(fiber_images)
        if len(fiber_images) != source.rank:
            raise ValueError(f"need {source.rank} fiber images, got {len(fiber_images)}")
        for g in (*fiber_images, t_image):
            if g.torus != target:
                raise ValueError("image does not lie in the target torus")
        self.source = source
        self.target = target
        self.fiber_images = fiber_images
        self.t_image = t_image
        if verify:
            self._verify_relators()
        self.inverse_map: TorusMap | None = None
        if inverse is not None:
            inv_fiber, inv_t = inverse
            back = TorusMap(target, source, inv_fiber, inv_t, verify=verify)
            if verify:
                for x in source.generators():
                    if back(self(x)) != x:
                        raise NotAutomorphismError(f"inverse assignment fails on source generator {format_element(x)}")
                for y in target.generators():
                    if self(back(y)) != y:
                        raise NotAutomorphismError(f"inverse assignment fails on target generator {format_element(y)}")
            self.inverse_map = back
            back.inverse_map = self

    def _verify_relators(self) -> None:
        T = self.t_image
        Ti = invert_element(T)
        for i, X in enumerate(self.fiber_images):
            rhs = _image_of_word(self.source.monodromy.images[i], self.fiber_images, self.target)
            image = Ti * X * T * invert_element(rhs)
            if not image.is_identity():
                raise RelatorError(i, image)

    @property
    def is_isomorphism(self) -> bool:
        return self.inverse_map is not None

    def images(self) -> tuple[TorusElement, ...]:
        return (*self.fiber_images, self.t_image)

    def __call__(self, g: TorusElement) -> TorusElement:
        if g.torus != self.source:
            raise ValueError("element does not lie in the source torus")
        return (self.t_image ** g.t_exp) * _image_of_word(g.tail, self.fiber_images, self.target)

    def inverse(self) -> TorusMap:
        if self.inverse_map is None:
            raise NotAutomorphismError("map carries no inverse assignment")
        return self.inverse_map

    def then(self, other: TorusMap) -> TorusMap:
        """Left-to-right composite ``g -> (g self) other``."""
        return compose_maps(self, other)

    def __mul__(self, other: TorusMap) -> TorusMap:
        return compose_maps(self, other)

    def __pow__(self, m: int) -> TorusMap:
        if self.source != self.target:
            raise ValueError("powers need a self-map")
        base = self if m >= 0 else self.inverse()
        m = abs(m)
        result = identity_map(self.source)
        while m:
            if m & 1:
                result = compose_maps(result, base)
            m >>= 1
            if m:
                base = compose_maps(base, base)
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TorusMap):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.images() == other.images()

    def __hash__(self) -> int:
        return hash(self.images())

    def __repr__(self) -> str:
        return f"TorusMap({format_map(self)!r})"


def build_map(
    source: Torus,
    target: Torus,
    fiber_images: Sequence[TorusElement],
    t_image: TorusElement,
    inverse: tuple[Sequence[TorusElement], TorusElement] | None = None,
) -> TorusMap:
    return TorusMap(source, target, fiber_images, t_image, inverse)


def semiconjugate_target(phi: FreeMap, chi: FreeMap, eps: int, w: Word) -> FreeMap:
    """The ``psi`` with ``chi^-1 phi chi = psi^eps gamma_w``."""
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    chi_inv = chi.inverse()
    psi_eps = fnauto.compose(fnauto.compose(fnauto.compose(chi_inv, phi), chi), fnauto.inner(invert(w)))
    return psi_eps if eps == 1 else psi_eps.inverse()


def build_isomorphism(source: Torus, target: Torus, chi: FreeMap, eps: int, w: Word) -> TorusMap:
    """``x_i -> x_i chi, t -> s^eps w`` where ``phi chi = chi psi^eps gamma_w``.

    The inverse sends ``y_i -> y_i chi^-1`` and ``s -> (t (w chi^-1)^-1)^eps``.
    """
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    chi_inv = chi.inverse()
    fiber = [target.element(0, img) for img in chi.images]
    t_img = target.element(eps, w)
    back_fiber = [source.element(0, img) for img in chi_inv.images]
    s_back = (source.t * source.element(0, invert(fnauto.apply(chi_inv, w)))) ** eps
    return TorusMap(source, target, fiber, t_img, (back_fiber, s_back))


def compose_maps(f: TorusMap, g: TorusMap) -> TorusMap:
    if f.target != g.source:
        raise ValueError("maps are not composable")
    fiber = [g(x) for x in f.fiber_images]
    t_img = g(f.t_image)
    out = TorusMap(f.source, g.target, fiber, t_img, verify=False)
    if f.inverse_map is not None and g.inverse_map is not None:
        fi, gi = f.inverse_map, g.inverse_map
        back = TorusMap(g.target, f.source, [fi(y) for y in gi.fiber_images], fi(gi.t_image), verify=False)
        out.inverse_map = back
        back.inverse_map = out
    return out


def identity_map(T: Torus) -> TorusMap:
    f = TorusMap(T, T, T.fiber_generators(), T.t, verify=False)
    f.inverse_map = f
    return f


def inner_map(T: Torus, g: TorusElement) -> TorusMap:
    """``Gamma_g : x -> g^-1 x g``."""
    gi = invert_element(g)
    fwd = TorusMap(T, T, [x.conjugate_by(g) for x in T.fiber_generators()], T.t.conjugate_by(g), verify=False)
    back = TorusMap(T, T, [x.conjugate_by(gi) for x in T.fiber_generators()], T.t.conjugate_by(gi), verify=False)
    fwd.inverse_map = back
    back.inverse_map = fwd
    return fwd


def maps_agree(f: TorusMap, g: TorusMap) -> bool:
    return f.images() == g.images()


# ---------------------------------------------------------------------------
# built-in automorphisms for a -> a b^k, b -> b^{+-1}


def parabolic_shape(T: Torus) -> tuple[int, int]:
    """Return ``(k, sign)`` if the monodromy is ``a -> a b^k, b -> b^sign``."""
    if T.rank != 2:
        raise ValueError("built-in automorphisms need rank 2")
    a_img, b_img = T.monodromy.images
    b_syl = b_img.syllables
    if len(b_syl) != 1 or b_syl[0][0] != 2 or abs(b_syl[0][1]) != 1:
        raise ValueError(f"monodromy {T!r} does not send b to b^(+-1)")
    syl = a_img.syllables
    if not syl or syl[0] != (1, 1) or len(syl) > 2 or (len(syl) == 2 and syl[1][0] != 2):
        raise ValueError(f"monodromy {T!r} does not send a to a b^k")
    k = syl[1][1] if len(syl) == 2 else 0
    return k, b_syl[0][1]


def _w(T: Torus, text: str) -> TorusElement:
    k, _, w = text.partition("|")
    return T.element(int(k) if k.strip() else 0, parse_word(w or "1", T.rank))


def psi_map(T: Torus) -> TorusMap:
    """``Psi : a -> t a, b -> b, t -> t`` (infinite order in Out)."""
    parabolic_shape(T)
    return TorusMap(T, T, [_w(T, "1|a"), _w(T, "|b")], T.t, ([_w(T, "-1|a"), _w(T, "|b")], T.t))


def omega_map(T: Torus) -> TorusMap:
    """``Omega : a -> a, b -> b^-1, t -> t^-1``."""
    k, sign = parabolic_shape(T)
    if sign != 1:
        raise ValueError("Omega needs b -> b")
    imgs = [_w(T, "|a"), _w(T, "|b^-1")]
    ti = T.element(-1)
    return TorusMap(T, T, imgs, ti, (imgs, ti))


def delta_map(T: Torus) -> TorusMap:
    """``Delta : a -> a^-1, b -> b^-1, t -> t b^-k``."""
    k, sign = parabolic_shape(T)
    if sign != 1:
        raise ValueError("Delta needs b -> b")
    imgs = [_w(T, "|a^-1"), _w(T, "|b^-1")]
    ti = T.element(1, Word.generator(2, 2, -k))
    return TorusMap(T, T, imgs, ti, (imgs, ti))


def xi_map(T: Torus) -> TorusMap:
    """``Xi : a -> a b, b -> b, t -> t``."""
    k, sign = parabolic_shape(T)
    if sign != 1:
        raise ValueError("Xi needs b -> b")
    return TorusMap(T, T, [_w(T, "|a b"), _w(T, "|b")], T.t, ([_w(T, "|a b^-1"), _w(T, "|b")], T.t))


def upsilon_map(T: Torus) -> TorusMap:
    """``Upsilon : x -> x, t -> t^-1``; well defined exactly when ``phi^2 = id``."""
    imgs = T.fiber_generators()
    ti = T.element(-1)
    return TorusMap(T, T, imgs, ti, (imgs, ti))


def builtin_automorphisms(T: Torus) -> dict[str, TorusMap]:
    """Named automorphisms available for the monodromy's shape.

    ``b -> b`` gives Psi, Omega, Delta, Xi and Gamma_t; ``b -> b^-1`` gives
    Psi and Gamma_t, plus Upsilon since then ``phi^2 = id``.
    """
    k, sign = parabolic_shape(T)
    out = {"Psi": psi_map(T), "Gamma_t": inner_map(T, T.t)}
    if sign == 1:
        out.update(Omega=omega_map(T), Delta=delta_map(T), Xi=xi_map(T))
    else:
        out["Upsilon"] = upsilon_map(T)
    return out


# ---------------------------------------------------------------------------
# restriction to the fiber


@dataclass(frozen=True)
class RestrictionAnalysis:
    """``phi psi = psi phi^signum gamma_w`` and ``t -> t^signum w``."""

    signum: int
    restriction: FreeMap
    semiconjugator: Word


def analyze_restriction(theta: TorusMap) -> RestrictionAnalysis:
    T = theta.source
    if theta.target != T:
        raise ValueError("restriction analysis needs a self-map")
    if any(x.t_exp for x in theta.fiber_images):
        raise ValueError("map does not preserve the fiber")
    eps = theta.t_image.t_exp
    if eps not in (1, -1):
        raise ValueError(f"stable letter maps to t-exponent {eps}, expected +-1")
    w = theta.t_image.tail
    psi = FreeMap([x.tail for x in theta.fiber_images])
    if T.rank == 2:
        try:
            psi = fnauto.invert_rank2(psi)
        except NotAutomorphismError:
            pass
    phi = T.monodromy
    wi = invert(w)
    for i in range(T.rank):
        x = Word.generator(T.rank, i + 1)
        lhs = fnauto.apply(psi, fnauto.apply(phi, x))
        rhs = wi * T.act(fnauto.apply(psi, x), eps) * w
        if lhs != rhs:
            raise NotAutomorphismError(f"phi psi = psi phi^eps gamma_w fails at generator {i + 1}")
    return RestrictionAnalysis(eps, psi, w)


# ---------------------------------------------------------------------------
# centre and abelianization


_FINITE_ORDERS = (1, 2, 3, 4, 6)


def center_is_nontrivial(T: Torus) -> TorusElement | None:
    """A central element ``t^m w^-1`` if ``phi^m = gamma_w`` for some ``m != 0``.

    Rank 2 only: ``phi^m`` is inner iff its abelianization is ``I``, and
    finite orders in ``GL_2(Z)`` divide 4 or 6.
    """
    if T.rank != 2:
        raise ValueError("centre detection is implemented for rank 2 only")
    A = fnauto.abelianize(T.monodromy)
    I = IntMatrix.identity(2)
    for m in _FINITE_ORDERS:
        if A**m == I:
            break
    else:
        return None
    w = fnauto.extract_conjugator(T.monodromy_power(m))
    if T.act(w, 1) != w:
        raise AssertionError("conjugator of an inner power is not fixed by the monodromy")
    z = T.element(m, invert(w))
    for x in T.generators():
        if x * z != z * x:
            raise AssertionError("candidate central element does not commute")
    return z


@dataclass(frozen=True)
class AbelianInvariants:
    """``Z^free_rank`` plus cyclic torsion factors ``Z/d``."""

    free_rank: int
    torsion: tuple[int, ...]

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def abelianization_invariants(T: Torus | FreeMap | IntMatrix) -> AbelianInvariants:
    """``M_phi^ab = Z (t) + Z^n / Im(phi^ab - I)``."""
    if isinstance(T, Torus):
        A = fnauto.abelianize(T.monodromy)
    elif isinstance(T, FreeMap):
        A = fnauto.abelianize(T)
    else:
        A = T
    n = A.n
    form = smith_normal_form(A - IntMatrix.identity(n))
    free = 1 + sum(1 for d in form.diagonal if d == 0) + max(0, n - len(form.diagonal))
    torsion = tuple(d for d in form.diagonal if d > 1)
    return AbelianInvariants(free, torsion)


# ---------------------------------------------------------------------------
# text format


def parse_element(text: str, torus: Torus) -> TorusElement:
    """Parse ``"t^K | w"``, ``"t^K"`` or a bare fiber word."""
    head, bar, tail = text.partition("|")
    letter = torus.stable_letter
    if bar:
        k_text = head.strip()
        if k_text == letter:
            k = 1
        elif k_text.startswith(letter + "^"):
            try:
                k = int(k_text[len(letter) + 1 :])
            except ValueError:
                raise ParseError(f"bad stable-letter exponent {k_text!r}", text, 1) from None
        elif k_text in ("", "1"):
            k = 0
        else:
            raise ParseError(f"expected '{letter}^K' before '|'", text, 1)
        try:
            w = parse_word(tail, torus.rank)
        except ParseError as exc:
            raise ParseError(str(exc).split(" (line")[0], text, len(head) + 1 + (exc.column or 1)) from None
        return torus.element(k, w)
    stripped = text.strip()
    if stripped == letter:
        return torus.element(1)
    if stripped.startswith(letter + "^"):
        try:
            return torus.element(int(stripped[len(letter) + 1 :]))
        except ValueError:
            raise ParseError(f"bad stable-letter exponent {stripped!r}", text, 1) from None
    return torus.element(0, parse_word(text, torus.rank))


def format_element(g: TorusElement) -> str:
    return f"{g.torus.stable_letter}^{g.t_exp} | {g.tail}"


def format_map(f: TorusMap) -> str:
    n = f.source.rank
    parts = [f"{generator_name(i + 1, n)} -> {format_element(x)}" for i, x in enumerate(f.fiber_images)]
    parts.append(f"{f.source.stable_letter} -> {format_element(f.t_image)}")
    return " ; ".join(parts)


def parse_map(text: str, T: Torus) -> TorusMap:
    """Parse ``"a -> t^1 | a ; b -> b ; t -> t ; inv: a -> t^-1 | a ; b -> b ; t -> t"``."""
    main, _, inv_text = text.partition("inv:")

    def rules(chunk: str) -> list[TorusElement]:
        items = [r for r in chunk.split(";") if r.strip()]
        names = [generator_name(i + 1, T.rank) for i in range(T.rank)] + [T.stable_letter]
        if len(items) != len(names):
            raise ParseError(f"expected {len(names)} rules ({', '.join(names)})", text, 1)
        out = []
        for name, item in zip(names, items):
            lhs, arrow, rhs = item.partition("->")
            if not arrow or lhs.strip() != name:
                raise ParseError(f"expected rule '{name} -> ...'", text, text.find(item) + 1)
            out.append(parse_element(rhs, T))
        return out

    imgs = rules(main)
    inverse = None
    if inv_text.strip():
        inv = rules(inv_text)
        inverse = (inv[:-1], inv[-1])
    return TorusMap(T, T, imgs[:-1], imgs[-1], inverse)
