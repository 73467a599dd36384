from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freebycyclic.words import ParseError
from freebycyclic.zmat import (
    IntMatrix,
    MatrixClass,
    classify_type,
    format_matrix,
    gl2_conjugate,
    gl2_conjugate_bruteforce,
    has_eigenvalue_one,
    integer_kernel,
    invariant_factors,
    parabolic_canonical_form,
    parse_matrix,
    random_unimodular,
    smith_normal_form,
)

M = IntMatrix


def fraction_det(rows):
    a = [[Fraction(x) for x in r] for r in rows]
    n, det = len(a), Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def determinantal_divisors(rows):
    """Invariant factors from gcds of k x k minors (independent of elimination)."""
    m, n = len(rows), len(rows[0])
    d = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in itertools.combinations(range(m), k):
            for cs in itertools.combinations(range(n), k):
                g = math.gcd(g, int(fraction_det([[rows[i][j] for j in cs] for i in rs])))
        if g == 0:
            break
        d.append(g)
    return tuple(d[i] // d[i - 1] for i in range(1, len(d)))


small = st.integers(-6, 6)


@st.composite
def matrices(draw, max_dim=4):
    m = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_dim))
    return M([[draw(small) for _ in range(n)] for _ in range(m)])


@settings(max_examples=150)
@given(matrices())
def test_smith_form_against_minor_oracle(A):
    form = smith_normal_form(A)
    nonzero = tuple(d for d in form.diagonal if d)
    assert nonzero == determinantal_divisors(A.rows)
    assert form.U @ A @ form.V == form.matrix(A.shape)
    assert abs(form.U.det()) == 1 and abs(form.V.det()) == 1
    for x, y in zip(nonzero, nonzero[1:]):
        assert y % x == 0


@settings(max_examples=100)
@given(matrices(3))
def test_kernel_vectors_are_in_kernel(A):
    ker = integer_kernel(A)
    assert len(ker) == A.shape[1] - smith_normal_form(A).rank
    for v in ker:
        assert all(sum(a * x for a, x in zip(row, v)) == 0 for row in A.rows)


@settings(max_examples=100)
@given(matrices(4))
def test_det_matches_fraction_oracle(A):
    if A.shape[0] == A.shape[1]:
        assert A.det() == fraction_det(A.rows)


def test_smith_examples():
    assert smith_normal_form(M([[0, 2], [0, 0]])).diagonal == (2, 0)
    assert smith_normal_form(M([[2, 0], [0, 3]])).diagonal == (1, 6)
    assert invariant_factors(M([[-2, 0], [0, -2]])) == (2, 2)


def test_inverse_and_powers():
    rng = random.Random(3)
    for n in (2, 3, 4):
        for _ in range(20):
            A = random_unimodular(n, rng=rng)
            assert A.is_unimodular()
            assert A @ A.inverse() == M.identity(n)
            assert A ** -2 == (A.inverse()) @ (A.inverse())


@pytest.mark.parametrize(
    "rows,kind",
    [
        ([[0, -1], [1, 0]], MatrixClass.ELLIPTIC),  # A^2 = -I
        ([[0, 1], [1, 0]], MatrixClass.ELLIPTIC),  # A^2 = I
        ([[0, -1], [1, 1]], MatrixClass.ELLIPTIC),  # order six
        ([[1, 2], [0, 1]], MatrixClass.PARABOLIC),
        ([[1, 1], [0, -1]], MatrixClass.ELLIPTIC),  # A^2 = I
        ([[2, 1], [1, 1]], MatrixClass.HYPERBOLIC),
        ([[-1, 3], [0, -1]], MatrixClass.PARABOLIC),
    ],
)
def test_classify_type(rows, kind):
    assert classify_type(M(rows)) is kind


def test_eigenvalue_one():
    assert has_eigenvalue_one(M([[1, 2], [0, 1]]))
    assert not has_eigenvalue_one(M([[2, 1], [1, 1]]))


@pytest.mark.parametrize(
    "rows,canonical",
    [
        ([[1, 2], [0, 1]], [[1, 2], [0, 1]]),
        ([[1, -2], [0, 1]], [[1, 2], [0, 1]]),
        ([[3, 4], [-1, -1]], [[1, 1], [0, 1]]),
        ([[1, 0], [0, -1]], [[1, 0], [0, -1]]),
        ([[0, 1], [1, 0]], [[1, 1], [0, -1]]),
        ([[-1, 0], [0, 1]], [[1, 0], [0, -1]]),
        ([[-1, 5], [0, -1]], [[-1, 5], [0, -1]]),
    ],
)
def test_parabolic_canonical_form(rows, canonical):
    B, P = parabolic_canonical_form(M(rows))
    assert B == M(canonical)
    assert P @ M(rows) @ P.inverse() == B


def test_parabolic_canonical_form_is_conjugation_invariant():
    rng = random.Random(11)
    for A in (M([[1, 3], [0, 1]]), M([[1, 1], [0, -1]]), M([[1, 0], [0, -1]]), M([[-1, 2], [0, -1]])):
        for _ in range(30):
            P = random_unimodular(2, rng=rng)
            assert parabolic_canonical_form(P @ A @ P.inverse())[0] == parabolic_canonical_form(A)[0]


def test_gl2_conjugate_examples():
    assert gl2_conjugate(M([[2, 1], [1, 1]]), M([[1, 1], [1, 2]])) == M([[0, 1], [1, 0]])
    assert gl2_conjugate(M([[1, 2], [0, 1]]), M([[1, -2], [0, 1]])) == M([[1, 0], [0, -1]])
    assert gl2_conjugate(M([[1, 0], [0, -1]]), M([[1, 1], [0, -1]])) is None
    assert gl2_conjugate(M.identity(2), M.identity(2)) == M.identity(2)
    assert gl2_conjugate(M.identity(2), -M.identity(2)) is None


def test_gl2_conjugate_hyperbolic_random():
    """Conjugates of hyperbolic matrices by large P are found and verified."""
    rng = random.Random(5)
    for A in (M([[2, 1], [1, 1]]), M([[3, 2], [1, 1]]), M([[0, 1], [1, 3]]), M([[5, 2], [2, 1]])):
        for _ in range(15):
            P = random_unimodular(2, steps=10, rng=rng)
            B = P @ A @ P.inverse()
            Q = gl2_conjugate(A, B)
            assert Q is not None and Q @ A @ Q.inverse() == B


def content(A):
    """gcd(b, c, a - d): a conjugation invariant of 2x2 integer matrices."""
    return math.gcd(A[0, 1], A[1, 0], A[0, 0] - A[1, 1])


@pytest.mark.parametrize(
    "a,b",
    [
        ([[5, 4], [1, 1]], [[5, 2], [2, 1]]),  # trace 6, det 1; contents 1 and 2
        ([[3, 4], [1, 1]], [[3, 2], [2, 1]]),  # trace 4, det -1; contents 1 and 2
        ([[5, 6], [1, 1]], [[5, 3], [2, 1]]),  # trace 6, det -1; contents 1 and 1
    ],
)
def test_gl2_same_trace_and_det(a, b):
    A, B = M(a), M(b)
    P = gl2_conjugate(A, B)
    if content(A) != content(B):
        assert P is None
    if P is not None:
        assert P @ A @ P.inverse() == B
    assert (P is None) == (gl2_conjugate_bruteforce(A, B, 8) is None)


@pytest.mark.parametrize("text", ["[[1,2],[0,1]]", " [[1, 0, 0], [0, 1, 0], [0, 0, 1]] "])
def test_matrix_round_trip(text):
    A = parse_matrix(text)
    assert parse_matrix(format_matrix(A)) == A


@pytest.mark.parametrize("text", ["[[1,2],[0]]", "[[1,2],[0,1]", "[[1.5,0],[0,1]]", "[]", "[[True,0],[0,1]]"])
def test_matrix_parse_errors(text):
    with pytest.raises(ParseError):
        parse_matrix(text)


def test_non_unimodular_rejected():
    with pytest.raises(ValueError):
        classify_type(M([[2, 0], [0, 1]]))
