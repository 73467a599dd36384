"""Exact integer matrices: GL2(Z) types, canonical forms, conjugacy, Smith form.

Row convention throughout: a matrix acts on row vectors from the right and a
conjugation is ``P @ A @ P^-1`` with the new basis in the rows of ``P``.
"""

from __future__ import annotations

import ast
import enum
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .words import ParseError

__all__ = [
    "IntMatrix",
    "MatrixClass",
    "SmithForm",
    "classify_type",
    "has_eigenvalue_one",
    "parabolic_canonical_form",
    "gl2_conjugate",
    "gl2_conjugate_bruteforce",
    "smith_normal_form",
    "parse_matrix",
    "format_matrix",
    "random_unimodular",
]


class IntMatrix:
    """Immutable integer matrix with arbitrary-precision entries."""

    __slots__ = ("rows", "_hash")

    def __init__(self, rows: Iterable[Iterable[int]]):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise ValueError("ragged matrix")
        self.rows = rows
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, m: int, n: int | None = None) -> IntMatrix:
        return cls([[0] * (m if n is None else n) for _ in range(m)])

    @classmethod
    def diag(cls, entries: Sequence[int]) -> IntMatrix:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    @property
    def n(self) -> int:
        return len(self.rows)

    def is_square(self) -> bool:
        m, n = self.shape
        return m == n

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        m, k = self.shape
        k2, n = other.shape
        if k != k2:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.rows))
        return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])

    def __add__(self, other: IntMatrix) -> IntMatrix:
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> IntMatrix:
        return IntMatrix([[-a for a in r] for r in self.rows])

    def scale(self, c: int) -> IntMatrix:
        return IntMatrix([[c * a for a in r] for r in self.rows])

    def __pow__(self, e: int) -> IntMatrix:
        if e < 0:
            return self.inverse() ** (-e)
        result = IntMatrix.identity(self.n)
        base = self
        while e:
            if e & 1:
                result = result @ base
            e >>= 1
            if e:
                base = base @ base
        return result

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(zip(*self.rows))

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.n))

    def det(self) -> int:
        """Bareiss fraction-free determinant."""
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        n = self.n
        if n == 0:
            return 1
        if n == 2:
            (a, b), (c, d) = self.rows
            return a * d - b * c
        m = [list(r) for r in self.rows]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k]:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return self.is_square() and abs(self.det()) == 1

    def inverse(self) -> IntMatrix:
        """Inverse of a unimodular matrix (exact)."""
        if not self.is_unimodular():
            raise ValueError("matrix is not unimodular")
        n = self.n
        if n == 2:
            (a, b), (c, d) = self.rows
            dt = a * d - b * c
            return IntMatrix([[d * dt, -b * dt], [-c * dt, a * dt]])
        aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next(i for i in range(col, n) if aug[i][col] != 0)
            aug[col], aug[piv] = aug[piv], aug[col]
            p = aug[col][col]
            aug[col] = [x / p for x in aug[col]]
            for i in range(n):
                if i != col and aug[i][col] != 0:
                    f = aug[i][col]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
        out = []
        for r in aug:
            row = []
            for x in r[n:]:
                if x.denominator != 1:
                    raise ArithmeticError("non-integral inverse")
                row.append(int(x))
            out.append(row)
        return IntMatrix(out)

    def is_scalar(self) -> bool:
        n = self.n
        return all(self.rows[i][j] == (self.rows[0][0] if i == j else 0) for i in range(n) for j in range(n))

    def __repr__(self) -> str:
        return f"IntMatrix({format_matrix(self)})"

    __str__ = lambda self: format_matrix(self)  # noqa: E731


def _as_matrix(A) -> IntMatrix:
    return A if isinstance(A, IntMatrix) else IntMatrix(A)


def _require_gl2(A: IntMatrix) -> None:
    if A.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {A.shape}")
    if abs(A.det()) != 1:
        raise ValueError(f"matrix {format_matrix(A)} is not unimodular")


# ---------------------------------------------------------------------------
# taxonomy


class MatrixClass(enum.Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


def classify_type(A) -> MatrixClass:
    """Elliptic / parabolic / hyperbolic by ``A^2`` and ``|trace(A^2)|``.

    ``A^2 = -I`` (order four) is reported as elliptic.
    """
    A = _as_matrix(A)
    _require_gl2(A)
    sq = A @ A
    if sq.is_scalar() and abs(sq[0, 0]) == 1:
        return MatrixClass.ELLIPTIC
    t = abs(sq.trace())
    if t > 2:
        return MatrixClass.HYPERBOLIC
    if t < 2:
        return MatrixClass.ELLIPTIC
    return MatrixClass.PARABOLIC


def has_eigenvalue_one(A) -> bool:
    A = _as_matrix(A)
    return (A - IntMatrix.identity(A.n)).det() == 0


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def parabolic_canonical_form(A) -> tuple[IntMatrix, IntMatrix]:
    """Upper-triangular representative of a matrix with eigenvalue ``+-1``.

    Returns ``(B, P)`` with ``P @ A @ P^-1 == B`` and ``B`` one of
    ``[[1,k],[0,1]]`` or ``[[-1,k],[0,-1]]`` with ``k >= 1``, or
    ``[[1,k],[0,-1]]`` with ``k`` in ``{0, 1}``.
    """
    A = _as_matrix(A)
    _require_gl2(A)
    tr, dt = A.trace(), A.det()
    if A.is_scalar():
        raise ValueError("scalar matrix has no parabolic canonical form")
    if (tr, dt) == (2, 1):
        lam2 = 1
    elif (tr, dt) == (-2, 1):
        lam2 = -1
    elif (tr, dt) == (0, -1):
        lam2 = -1
    else:
        raise ValueError(f"matrix {format_matrix(A)} has no rational eigenvalue")
    M = A - IntMatrix.identity(2).scale(lam2)
    # left null vector p with p @ M == 0 (M has rank one)
    j = 0 if (M[0, 0] or M[1, 0]) else 1
    p = (M[1, j], -M[0, j])
    g = math.gcd(*p)
    p = (p[0] // g, p[1] // g)
    # q with det [[q], [p]] = q0*p1 - q1*p0 = 1
    _, x, y = _xgcd(p[1], -p[0])
    P = IntMatrix([[x, y], [p[0], p[1]]])
    B = P @ A @ P.inverse()
    k = B[0, 1]
    if tr == 0:
        shift = (k - (k % 2)) // 2
        T = IntMatrix([[1, shift], [0, 1]])
    elif k < 0:
        T = IntMatrix([[1, 0], [0, -1]])
    else:
        T = IntMatrix.identity(2)
    P = T @ P
    B = P @ A @ P.inverse()
    assert B[1, 0] == 0 and B[1, 1] == lam2, "canonical form failed to verify"
    return B, P


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V == D`` with ``D`` diagonal (``diagonal`` along it)."""

    diagonal: tuple[int, ...]
    U: IntMatrix
    V: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)

    def matrix(self, shape: tuple[int, int]) -> IntMatrix:
        m, n = shape
        return IntMatrix([[self.diagonal[i] if i == j and i < len(self.diagonal) else 0 for j in range(n)] for i in range(m)])


def _eliminator(p: int, q: int) -> tuple[int, int, int, int]:
    """Unimodular ``[[x, y], [z, w]]`` sending ``(p, q)`` to ``(g, 0)``."""
    if q % p == 0:
        return 1, 0, -(q // p), 1
    g, x, y = _xgcd(p, q)
    return x, y, -(q // g), p // g


def smith_normal_form(M) -> SmithForm:
    M = _as_matrix(M)
    m, n = M.shape
    a = [list(r) for r in M.rows]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def row_combine(i, j, x, y, z, w):
        # (row_i, row_j) <- (x*row_i + y*row_j, z*row_i + w*row_j), det = 1
        for mat in (a, U):
            ri, rj = mat[i], mat[j]
            mat[i] = [x * p + y * q for p, q in zip(ri, rj)]
            mat[j] = [z * p + w * q for p, q in zip(ri, rj)]

    def col_combine(i, j, x, y, z, w):
        for mat in (a, V):
            for r in mat:
                p, q = r[i], r[j]
                r[i] = x * p + y * q
                r[j] = z * p + w * q

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    row_combine(t, i, *_eliminator(a[t][t], a[i][t]))
            for j in range(t + 1, n):
                if a[t][j]:
                    col_combine(t, j, *_eliminator(a[t][t], a[t][j]))
                    done = False
            if any(a[i][t] for i in range(t + 1, m)):
                done = False
            if done:
                # divisibility against the rest of the block
                piv = a[t][t]
                for i in range(t + 1, m):
                    if any(a[i][j] % piv for j in range(t + 1, n)):
                        row_combine(t, i, 1, 1, 0, 1)
                        done = False
                        break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    diag = tuple(a[i][i] for i in range(min(m, n)))
    form = SmithForm(diag, IntMatrix(U), IntMatrix(V))
    assert IntMatrix(U) @ M @ IntMatrix(V) == form.matrix((m, n)), "Smith form failed to verify"
    return form


def invariant_factors(M) -> tuple[int, ...]:
    return smith_normal_form(M).diagonal


def integer_kernel(M) -> list[tuple[int, ...]]:
    """Basis of the lattice ``{x in Z^n : M @ x == 0}`` (column vectors)."""
    M = _as_matrix(M)
    form = smith_normal_form(M)
    _, n = M.shape
    cols = list(zip(*form.V.rows))
    return [cols[j] for j in range(n) if j >= len(form.diagonal) or form.diagonal[j] == 0]


# ---------------------------------------------------------------------------
# binary quadratic forms (used by the conjugacy decision)


def _isqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _represent_unit(a: int, b: int, c: int) -> list[tuple[int, int]]:
    """Integer points where ``a x^2 + b x y + c y^2`` equals +1 or -1.

    Returns a (possibly empty) list of witnesses; empty means no such point.
    """
    D = b * b - 4 * a * c
    if a == b == c == 0:
        return []
    if D < 0:
        return _represent_unit_definite(a, b, c)
    s = _isqrt_exact(D)
    if s is None:
        return _represent_unit_indefinite(a, b, c, D)
    if D == 0:
        return _represent_unit_degenerate(a, b, c)
    return _represent_unit_split(a, b, c, s)


def _represent_unit_definite(a, b, c):
    sign = 1 if a > 0 else -1
    a, b, c = sign * a, sign * b, sign * c
    # track substitution (x, y)^T = M (x', y')^T
    M = [[1, 0], [0, 1]]
    while True:
        if abs(b) > a or b == -a:
            # bring b into (-a, a]
            t = (a - b) // (2 * a)
            b, c = b + 2 * a * t, a * t * t + b * t + c
            M = [[M[0][0], M[0][0] * t + M[0][1]], [M[1][0], M[1][0] * t + M[1][1]]]
            continue
        if a > c:
            a, b, c = c, -b, a
            M = [[M[0][1], -M[0][0]], [M[1][1], -M[1][0]]]
            continue
        break
    if a != 1:
        return []
    sols = [(M[0][0], M[1][0])]
    if c == 1:
        sols.append((M[0][1], M[1][1]))
    return sols


def _represent_unit_degenerate(a, b, c):
    # q = g (r x + s y)^2
    g = math.gcd(a, math.gcd(b, c))
    if a < 0 or c < 0:
        g = -g
    if abs(g) != 1:
        return []
    r = _isqrt_exact(a // g)
    s = _isqrt_exact(c // g)
    if r is None or s is None:
        return []
    if b // g < 0:
        s = -s
    gg, x, y = _xgcd(r, s)
    if gg != 1:
        return []
    return [(x, y)]


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _represent_unit_split(a, b, c, s):
    sols = []
    if a == 0:
        # y (b x + c y) = +-1
        for n in (1, -1):
            for y in (1, -1):
                rest = n // y - c * y
                if b and rest % b == 0:
                    sols.append((rest // b, y))
        return sols
    # 4a q = (2a x + (b+s) y)(2a x + (b-s) y)
    for n in (1, -1):
        target = 4 * a * n
        for d in _divisors(target):
            for u in (d, -d):
                v = target // u
                if (u - v) % (2 * s):
                    continue
                y = (u - v) // (2 * s)
                num = u - (b + s) * y
                if num % (2 * a):
                    continue
                x = num // (2 * a)
                if a * x * x + b * x * y + c * y * y == n:
                    sols.append((x, y))
    return sols


def _represent_unit_indefinite(a, b, c, D, max_steps: int = 1_000_000):
    """Cycle-of-reduced-forms search (``D`` positive, not a square).

    Since ``1 < sqrt(D)/2`` whenever ``D >= 5``, a unit is properly
    represented iff it is a leading coefficient somewhere in the cycle.
    """
    rt = math.isqrt(D)
    M = [[1, 0], [0, 1]]

    def is_reduced(a, b):
        return 0 < b <= rt and 2 * abs(a) + b > rt and 2 * abs(a) - b <= rt

    def rho(a, b, c, M):
        ac = abs(c)
        if ac > rt:
            # b' = -b mod 2|c| in (-|c|, |c|]
            b2 = (-b) % (2 * ac)
            if b2 > ac:
                b2 -= 2 * ac
        else:
            lo = rt - 2 * ac + 1
            b2 = lo + ((-b - lo) % (2 * ac))
        t = (b2 + b) // (2 * c)
        a2 = c
        c2 = a - b * t + c * t * t
        # substitution (x, y) = (-y', x' + t y')
        M = [[M[0][1], -M[0][0] + t * M[0][1]], [M[1][1], -M[1][0] + t * M[1][1]]]
        return a2, b2, c2, M

    def hits(a, b, c, M):
        out = []
        if abs(a) == 1:
            out.append((M[0][0], M[1][0]))
        if abs(c) == 1:
            out.append((M[0][1], M[1][1]))
        return out

    sols = hits(a, b, c, M)
    steps = 0
    while not is_reduced(a, b):
        a, b, c, M = rho(a, b, c, M)
        sols += hits(a, b, c, M)
        steps += 1
        if steps > max_steps:
            raise RuntimeError("reduction of indefinite form did not terminate")
    start = (a, b, c)
    while True:
        a, b, c, M = rho(a, b, c, M)
        sols += hits(a, b, c, M)
        steps += 1
        if (a, b, c) == start:
            break
        if steps > max_steps:
            raise RuntimeError("cycle of reduced forms did not close")
    return sols


# ---------------------------------------------------------------------------
# GL2(Z) conjugacy


def _lagrange_reduce(u: list[int], v: list[int]) -> tuple[list[int], list[int]]:
    def dot(x, y):
        return sum(p * q for p, q in zip(x, y))

    if dot(u, u) > dot(v, v):
        u, v = v, u
    while True:
        uu = dot(u, u)
        q = round(Fraction(dot(u, v), uu))
        v = [p - q * r for p, r in zip(v, u)]
        if dot(v, v) >= uu:
            return u, v
        u, v = v, u


def _normalize_sign(P: IntMatrix) -> IntMatrix:
    for r in P.rows:
        for x in r:
            if x:
                return P if x > 0 else -P
    return P


def _entry_size(P: IntMatrix) -> tuple[int, int]:
    return max(abs(x) for r in P.rows for x in r), sum(abs(x) for r in P.rows for x in r)


def gl2_conjugate(A, B) -> IntMatrix | None:
    """A unimodular ``P`` with ``P @ A @ P^-1 == B``, or ``None``.

    Solutions of ``X A = B X`` form a lattice; ``det`` restricted to it is a
    binary quadratic form and ``A ~ B`` iff that form takes the value +1 or
    -1. Among the witnesses found the one with smallest entries is returned.
    """
    A, B = _as_matrix(A), _as_matrix(B)
    _require_gl2(A)
    _require_gl2(B)
    if A.is_scalar() or B.is_scalar():
        return IntMatrix.identity(2) if A == B else None
    if A.trace() != B.trace() or A.det() != B.det():
        return None
    (a11, a12), (a21, a22) = A.rows
    (b11, b12), (b21, b22) = B.rows
    # unknown X = [[x1, x2], [x3, x4]]; equations (X A - B X)_{ij} = 0
    L = [
        [a11 - b11, a21, -b12, 0],
        [a12, a22 - b11, 0, -b12],
        [-b21, 0, a11 - b22, a21],
        [0, -b21, a12, a22 - b22],
    ]
    basis = integer_kernel(L)
    if len(basis) != 2:
        raise AssertionError(f"solution lattice has rank {len(basis)}, expected 2")
    u, v = _lagrange_reduce(list(basis[0]), list(basis[1]))
    X1 = IntMatrix([u[:2], u[2:]])
    X2 = IntMatrix([v[:2], v[2:]])
    # det(x X1 + y X2) = qa x^2 + qb x y + qc y^2
    qa = X1.det()
    qc = X2.det()
    qb = (X1 + X2).det() - qa - qc
    best = None
    for x, y in _represent_unit(qa, qb, qc):
        P = _normalize_sign(X1.scale(x) + X2.scale(y))
        if best is None or _entry_size(P) < _entry_size(best):
            best = P
    if best is None:
        return None
    assert abs(best.det()) == 1 and best @ A == B @ best, "conjugator failed to verify"
    return best


def gl2_conjugate_bruteforce(A, B, bound: int = 5) -> IntMatrix | None:
    """Exhaustive search over conjugators with entries in ``[-bound, bound]``."""
    A, B = _as_matrix(A), _as_matrix(B)
    rng = range(-bound, bound + 1)
    for p in rng:
        for q in rng:
            for r in rng:
                for s in rng:
                    if abs(p * s - q * r) != 1:
                        continue
                    P = IntMatrix([[p, q], [r, s]])
                    if P @ A == B @ P:
                        return P
    return None


# ---------------------------------------------------------------------------
# text format and random generation


def parse_matrix(text: str) -> IntMatrix:
    """Parse ``[[a,b],[c,d]]`` (any square size)."""
    try:
        value = ast.literal_eval(text.strip())
    except (ValueError, SyntaxError) as exc:
        col = getattr(exc, "offset", None)
        raise ParseError(f"malformed matrix {text!r}", text, col) from None
    if (
        not isinstance(value, (list, tuple))
        or not value
        or not all(isinstance(r, (list, tuple)) and len(r) == len(value) for r in value)
        or not all(isinstance(x, int) and not isinstance(x, bool) for r in value for x in r)
    ):
        raise ParseError(f"expected a square integer matrix, got {text!r}", text, 1)
    return IntMatrix(value)


def format_matrix(A: IntMatrix) -> str:
    return "[" + ",".join("[" + ",".join(str(x) for x in r) + "]" for r in A.rows) + "]"


_ELEMENTARY_CACHE: dict[int, list[IntMatrix]] = {}


def _elementary(n: int) -> list[IntMatrix]:
    if n not in _ELEMENTARY_CACHE:
        gens = []
        for i in range(n):
            for j in range(n):
                if i != j:
                    for s in (1, -1):
                        E = [[int(p == q) for q in range(n)] for p in range(n)]
                        E[i][j] = s
                        gens.append(IntMatrix(E))
        for i in range(n):
            E = [[int(p == q) for q in range(n)] for p in range(n)]
            E[i][i] = -1
            gens.append(IntMatrix(E))
        _ELEMENTARY_CACHE[n] = gens
    return _ELEMENTARY_CACHE[n]


def random_unimodular(n: int, steps: int = 8, rng: random.Random | None = None) -> IntMatrix:
    """Product of ``steps`` random elementary matrices in ``GL_n(Z)``."""
    rng = rng or random.Random()
    gens = _elementary(n)
    M = IntMatrix.identity(n)
    for _ in range(steps):
        M = M @ rng.choice(gens)
    return M
