from __future__ import annotations

import random

import pytest

from freebycyclic import fnauto, torus as tr
from freebycyclic.fnauto import FreeMap, NotAutomorphismError
from freebycyclic.words import ParseError, Word, invert, parse_word
from freebycyclic.zmat import IntMatrix

from conftest import random_word

RANK3_PHI = "a -> b ; b -> c ; c -> a^-1 b^2 c b^-1 ; inv: a -> a^2 b a^-1 c^-1 ; b -> a ; c -> b"
RANK3_PSI = "a -> b ; b -> c ; c -> b^-1 a b^-2 c^3 ; inv: a -> a c b^-3 a^2 ; b -> a ; c -> b"
RANK3_RELATOR = "t^-3 s t^2 s t^-1 s^-1 t s^-2 t s"


def parabolic(k: int, sign: int = 1) -> tr.Torus:
    return tr.Torus.from_spec(f"a -> a b^{k} ; b -> b^{sign}")


def rewrite_oracle(T: tr.Torus, raw: list) -> tuple[int, Word]:
    """Push every t to the left one letter at a time: x t^e = t^e (x phi^e)."""
    tokens = []  # ("t", +-1) or ("x", Word)
    for item in raw:
        if isinstance(item, int):
            tokens += [("t", 1 if item > 0 else -1)] * abs(item)
        else:
            tokens.append(("x", item))
    phi, phi_inv = T.monodromy, T.monodromy.inverse()
    k = 0
    tail = Word.identity(T.rank)
    for kind, val in tokens:
        if kind == "t":
            k += val
            tail = fnauto.apply(phi if val > 0 else phi_inv, tail)
        else:
            tail = tail * val
    return k, tail


def random_element(T: tr.Torus, rng: random.Random) -> tr.TorusElement:
    return T.element(rng.randint(-3, 3), random_word(rng, rng.randint(0, 6), T.rank))


# -- normal form arithmetic


def test_spec_normal_form_examples():
    k = 3
    T = parabolic(k)
    a, b, t = T.gen(1), T.gen(2), T.t
    assert a * t == t * T.fiber(f"a b^{k}")
    assert b * t**-1 == t**-1 * b
    assert tr.normalize(T, [0, Word.identity(2)]).is_identity()


def test_multiply_example():
    T = parabolic(1)
    ta = T.element(1, parse_word("a", 2))
    assert str(ta * ta) == "t^2 | a b a"
    inv = ta.inverse()
    assert str(inv) == "t^-1 | b a^-1"
    assert (ta * inv).is_identity() and (inv * ta).is_identity()


def test_normalize_agrees_with_rewriting_oracle():
    rng = random.Random(1)
    for spec in ("a -> a b^2 ; b -> b", "a -> a b ; b -> a b^2", RANK3_PHI):
        T = tr.Torus(fnauto.parse_automorphism(spec))
        for _ in range(40):
            raw = []
            for _ in range(rng.randint(1, 6)):
                raw.append(rng.randint(-2, 2) if rng.random() < 0.5 else random_word(rng, 4, T.rank))
            g = tr.normalize(T, raw)
            assert (g.t_exp, g.tail) == rewrite_oracle(T, raw)


def test_group_laws_and_t_exponent_homomorphism():
    rng = random.Random(2)
    T = tr.Torus.from_spec("a -> a b ; b -> a b^2")
    for _ in range(60):
        g, h, f = (random_element(T, rng) for _ in range(3))
        assert (g * h) * f == g * (h * f)
        assert (g * g.inverse()).is_identity()
        assert tr.t_exponent(g * h) == tr.t_exponent(g) + tr.t_exponent(h)
        assert g ** 3 == g * g * g and g ** -2 == g.inverse() * g.inverse()


def test_different_tori_do_not_mix():
    with pytest.raises(ValueError):
        parabolic(1).t * parabolic(2).t


# -- rank-3 pair with a common relator


def test_rank3_relator_vanishes_in_both_tori():
    phi = fnauto.parse_automorphism(RANK3_PHI)
    psi = fnauto.parse_automorphism(RANK3_PSI)
    T, S = tr.Torus(phi), tr.Torus(psi)
    assert tr.evaluate(RANK3_RELATOR, {"s": T.gen(1), "t": T.t}).is_identity()
    assert tr.evaluate(RANK3_RELATOR, {"t": S.gen(3), "s": S.t}).is_identity()
    assert fnauto.abelianize(phi).det() == -1
    assert fnauto.abelianize(psi).det() == 1


# -- maps


def test_build_map_rejects_relator_violation():
    T = parabolic(2)
    with pytest.raises(tr.RelatorError) as info:
        tr.build_map(T, T, [T.fiber("a b"), T.fiber("b^2")], T.t)
    assert info.value.index == 0  # t^-1 a t -> a b^4, but (a b^2) -> a b^5


def test_build_map_identity_and_psi():
    T = parabolic(2)
    ident = tr.build_map(T, T, T.fiber_generators(), T.t)
    rng = random.Random(3)
    for _ in range(10):
        g = random_element(T, rng)
        assert ident(g) == g
    psi = tr.build_map(T, T, [T.element(1, parse_word("a", 2)), T.gen(2)], T.t)
    assert psi(T.gen(1)) == T.element(1, parse_word("a", 2))


def test_map_is_homomorphism():
    rng = random.Random(4)
    T = parabolic(2)
    for f in tr.builtin_automorphisms(T).values():
        for _ in range(10):
            g, h = random_element(T, rng), random_element(T, rng)
            assert f(g * h) == f(g) * f(h)
            assert f.inverse()(f(g)) == g


def test_builtin_algebra():
    for k in (1, 2, 3, -2):
        T = parabolic(k)
        B = tr.builtin_automorphisms(T)
        ident = tr.identity_map(T)
        assert B["Omega"] ** 2 == ident
        assert B["Delta"] ** 2 == ident
        assert B["Xi"] ** abs(k) == (B["Gamma_t"] if k > 0 else B["Gamma_t"].inverse())
        assert B["Gamma_t"](T.gen(1)) == T.fiber(f"a b^{k}")
        for m in range(-5, 6):
            assert tr.t_exponent((B["Psi"] ** m)(T.gen(1))) == m


def test_builtin_shape_requirements():
    with pytest.raises(ValueError):
        tr.builtin_automorphisms(tr.Torus.from_spec("a -> b ; b -> a"))
    T = parabolic(2, -1)
    B = tr.builtin_automorphisms(T)
    assert set(B) == {"Psi", "Gamma_t", "Upsilon"}
    with pytest.raises(tr.RelatorError):
        tr.upsilon_map(parabolic(2))


def test_inner_maps_preserve_t_exponent():
    rng = random.Random(5)
    T = parabolic(3)
    for _ in range(20):
        g = random_element(T, rng)
        G = tr.inner_map(T, g)
        for x in T.generators():
            assert tr.t_exponent(G(x)) == tr.t_exponent(x)
            assert G(x) == g.inverse() * x * g


# -- restriction, centre, abelianization


def test_analyze_restriction_xi_and_omega():
    T = parabolic(2)
    B = tr.builtin_automorphisms(T)
    xi = tr.analyze_restriction(B["Xi"])
    assert xi.signum == 1 and fnauto.format_automorphism(xi.restriction, False) == "a -> a b ; b -> b"
    om = tr.analyze_restriction(B["Omega"])
    assert om.signum == -1 and fnauto.format_automorphism(om.restriction, False) == "a -> a ; b -> b^-1"
    with pytest.raises(ValueError):
        tr.analyze_restriction(B["Psi"])


def test_analyze_restriction_inner():
    T = tr.Torus.from_spec("a -> a b ; b -> a b^2")
    rng = random.Random(6)
    phi = T.monodromy
    for _ in range(20):
        w = random_word(rng, 6)
        info = tr.analyze_restriction(tr.inner_map(T, T.element(0, w)))
        assert info.signum == 1 and info.restriction == fnauto.inner(w)
        assert info.semiconjugator == invert(fnauto.apply(phi, w)) * w


def test_center_examples():
    ident = tr.Torus(FreeMap.identity(2))
    assert tr.center_is_nontrivial(ident) == ident.t
    T = parabolic(3, -1)
    assert tr.center_is_nontrivial(T) == T.element(2)
    assert tr.center_is_nontrivial(parabolic(1)) is None
    # finite order six: phi^6 inner, element t^6 w^-1 is central
    S = tr.Torus.from_spec("a -> b ; b -> a^-1 b")
    z = tr.center_is_nontrivial(S)
    assert z is not None and z.t_exp == 6
    with pytest.raises(ValueError):
        tr.center_is_nontrivial(tr.Torus(fnauto.parse_automorphism(RANK3_PHI)))


@pytest.mark.parametrize(
    "rows,free,torsion",
    [
        ([[1, 2], [0, 1]], 2, (2,)),
        ([[1, 0], [0, -1]], 2, (2,)),
        ([[1, 1], [0, -1]], 2, ()),
        ([[-1, 0], [0, -1]], 1, (2, 2)),
        ([[1, 0], [0, 1]], 3, ()),
        ([[2, 1], [1, 1]], 1, ()),
    ],
)
def test_abelianization_invariants(rows, free, torsion):
    inv = tr.abelianization_invariants(IntMatrix(rows))
    assert (inv.free_rank, inv.torsion) == (free, torsion)


# -- isomorphisms between tori


def test_semiconjugate_isomorphisms():
    rng = random.Random(7)
    phi = fnauto.parse_automorphism("a -> a b^2 ; b -> a b")
    S = tr.Torus(phi)
    for _ in range(10):
        chi = fnauto.random_nielsen_automorphism(8, rng)
        eps = rng.choice([1, -1])
        w = random_word(rng, 5)
        psi = tr.semiconjugate_target(phi, chi, eps, w)
        # phi chi = chi psi^eps gamma_w
        lhs = fnauto.compose(phi, chi)
        rhs = fnauto.compose(fnauto.compose(chi, fnauto.power(psi, eps)), fnauto.inner(w))
        assert lhs == rhs
        f = tr.build_isomorphism(S, tr.Torus(psi), chi, eps, w)
        assert f.is_isomorphism


def test_bad_inverse_assignment_rejected():
    T = parabolic(1)
    psi = tr.psi_map(T)
    with pytest.raises(NotAutomorphismError):
        tr.TorusMap(T, T, psi.fiber_images, psi.t_image, (T.fiber_generators(), T.t))


# -- text


def test_element_round_trip():
    rng = random.Random(8)
    T = parabolic(2)
    for _ in range(30):
        g = random_element(T, rng)
        assert tr.parse_element(tr.format_element(g), T) == g
    assert tr.parse_element("t^-2", T) == T.element(-2)
    assert tr.parse_element("a b", T) == T.fiber("a b")
    assert tr.parse_element("t | a", T) == T.element(1, parse_word("a", 2))


def test_map_round_trip():
    T = parabolic(2)
    for f in tr.builtin_automorphisms(T).values():
        text = tr.format_map(f) + " ; inv: " + tr.format_map(f.inverse())
        assert tr.parse_map(text, T) == f


@pytest.mark.parametrize("text", ["t^x | a", "s^2 | a", "t^1 | a ^"])
def test_element_parse_errors(text):
    with pytest.raises(ParseError):
        tr.parse_element(text, parabolic(1))
