from __future__ import annotations

import random

import pytest

from freebycyclic import fnauto, torus as tr
from freebycyclic.fnauto import NotAutomorphismError
from freebycyclic.parabolic import (
    conjugate_into_fixed,
    fixed_by,
    parabolic_map,
    parabolic_outer_normal_form,
    split_pieces,
)
from freebycyclic.words import Word, invert, parse_word

from conftest import random_word


def w(text: str) -> Word:
    return parse_word(text, 2)


# -- pieces


@pytest.mark.parametrize(
    "text,expected",
    [
        ("a b^2 a^-1", [("aBAinv", 2)]),
        ("b^3", [("bPower", 3)]),
        ("a b a b^-1 a^-1", [("aThenB", 1), ("aBAinv", -1)]),
        ("a^2", [("aThenB", 0), ("aThenB", 0)]),
        ("b a^-1 a^-1 b", [("bThenAinv", 1), ("bThenAinv", 0), ("bPower", 1)]),
        ("1", []),
    ],
)
def test_split_examples(text, expected):
    split = split_pieces(w(text))
    assert [(p.kind.value, p.m) for p in split.pieces] == expected


def test_split_concatenation():
    rng = random.Random(1)
    for _ in range(1000):
        u = random_word(rng, rng.randint(0, 20))
        assert split_pieces(u).word() == u


def test_pieces_do_not_interact():
    """phi acts piece by piece."""
    rng = random.Random(2)
    phi = parabolic_map(2)
    for _ in range(200):
        u = random_word(rng, 15)
        image = Word.identity(2)
        for p in split_pieces(u).pieces:
            image = image * fnauto.apply(phi, Word.from_letters(2, p.letters()))
        assert image == fnauto.apply(phi, u)


# -- fixed subgroup


def test_fixed_by_examples():
    assert fixed_by(w("a b a^-1"), 1, 1)
    assert not fixed_by(w("a"), 1, 1)
    assert fixed_by(w("a b a^-1 b^-2 a b^3 a^-1"), 2, -1)
    with pytest.raises(ValueError):
        fixed_by(w("a"), 0, 1)
    with pytest.raises(ValueError):
        fixed_by(w("a"), 1, 0)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("r", [-2, -1, 1, 2])
def test_fixed_by_matches_direct_equation(k, r):
    rng = random.Random(100 * k + r)
    phi_r = fnauto.power(parabolic_map(k), r)
    gens = [w("a b a^-1"), w("b")]
    for i in range(150):
        if i % 2:
            u = random_word(rng, rng.randint(0, 12))
        else:  # bias towards fixed words
            u = Word.identity(2)
            for _ in range(rng.randint(0, 4)):
                u = u * gens[rng.randint(0, 1)] ** rng.choice([-2, -1, 1, 2])
        assert fixed_by(u, k, r) == (fnauto.apply(phi_r, u) == u)


# -- conjugation into the fixed subgroup


def test_conjugate_into_fixed_examples():
    assert conjugate_into_fixed(w("b^5"), 1, 1) == (Word.identity(2), w("b^5"))
    x, v = conjugate_into_fixed(w("b^-1 a b a^-1 b"), 1, 1)
    assert invert(x) * w("b^-1 a b a^-1 b") * x == v and fixed_by(v, 1, 1)
    assert conjugate_into_fixed(w("a"), 1, 1) is None


def test_conjugate_into_fixed_random():
    rng = random.Random(3)
    gens = [w("a b a^-1"), w("b")]
    for k in (1, 2, -3):
        phi = parabolic_map(k)
        for _ in range(60):
            f = Word.identity(2)
            for _ in range(rng.randint(1, 4)):
                f = f * gens[rng.randint(0, 1)] ** rng.choice([-2, -1, 1, 2])
            c = random_word(rng, rng.randint(0, 8))
            u = invert(c) * f * c
            r = rng.choice([-2, -1, 1, 2])
            found = conjugate_into_fixed(u, k, r)
            assert found is not None
            x, v = found
            assert invert(x) * u * x == v and fnauto.apply(phi, v) == v


def test_conjugate_into_fixed_agrees_with_conjugacy_test():
    from freebycyclic.words import is_conjugate

    rng = random.Random(4)
    phi = parabolic_map(2)
    for _ in range(200):
        u = random_word(rng, rng.randint(0, 10))
        expected = is_conjugate(fnauto.apply(phi, u), u)
        assert (conjugate_into_fixed(u, 2, 1) is not None) == expected


# -- outer normal form


def _torus(k):
    return tr.Torus(parabolic_map(k))


def test_normal_form_of_psi_and_gamma_t():
    T = _torus(2)
    B = tr.builtin_automorphisms(T)
    nf = parabolic_outer_normal_form(B["Psi"])
    assert (nf.m, nf.g, nf.i, nf.delta, nf.omega) == (-1, T.identity(), 0, 0, 0)
    nf = parabolic_outer_normal_form(B["Gamma_t"])
    assert (nf.m, nf.g, nf.i, nf.delta, nf.omega) == (0, T.element(-1), 0, 0, 0)


def test_normal_form_round_trip_example():
    T = _torus(3)
    B = tr.builtin_automorphisms(T)
    ab = T.fiber("a b")
    theta = (B["Xi"] ** 2) * B["Delta"] * B["Omega"] * tr.inner_map(T, ab) * (B["Psi"] ** 3)
    nf = parabolic_outer_normal_form(theta)
    assert nf.verify(theta)
    assert (nf.i, nf.delta, nf.omega) == (2, 1, 1)


def test_normal_form_requires_inverse_and_shape():
    T = _torus(2)
    psi = tr.psi_map(T)
    bare = tr.TorusMap(T, T, psi.fiber_images, psi.t_image)
    with pytest.raises(NotAutomorphismError):
        parabolic_outer_normal_form(bare)
    with pytest.raises(ValueError):
        parabolic_outer_normal_form(tr.psi_map(tr.Torus.from_spec("a -> a b ; b -> b^-1")))


def test_psi_has_infinite_order_in_out():
    T = _torus(2)
    psi = tr.psi_map(T)
    rng = random.Random(5)
    for m in [x for x in range(-5, 6) if x]:
        image = (psi**m)(T.gen(1))
        assert tr.t_exponent(image) == m
        g = T.element(rng.randint(-3, 3), random_word(rng, 5))
        assert tr.t_exponent(tr.inner_map(T, g)(T.gen(1))) == 0
