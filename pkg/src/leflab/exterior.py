"""Exterior algebra on a 2n-dimensional space with basis e^1, ..., e^{2n}.

Monomials are strictly increasing index tuples (1-based). Forms are sparse
maps monomial -> nonzero Fraction and are treated as immutable values.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Mapping, Sequence

from .exactlinalg import RationalMatrix, Vector, inverse

Monomial = tuple[int, ...]


class DimensionMismatch(ValueError):
    pass


class WrongDegree(ValueError):
    pass


@lru_cache(maxsize=None)
def monomial_basis(n: int, k: int) -> tuple[Monomial, ...]:
    """Lexicographically ordered k-subsets of {1, ..., 2n}; empty outside 0..2n."""
    if k < 0 or k > 2 * n:
        return ()
    return tuple(combinations(range(1, 2 * n + 1), k))


@lru_cache(maxsize=None)
def _monomial_index(n: int, k: int) -> dict[Monomial, int]:
    return {m: i for i, m in enumerate(monomial_basis(n, k))}


def space_dim(n: int, k: int) -> int:
    return comb(2 * n, k) if 0 <= k <= 2 * n else 0


def merge_sign(a: Monomial, b: Monomial) -> int:
    """Sign of the shuffle putting a + b in increasing order; 0 if they overlap."""
    if set(a) & set(b):
        return 0
    # count inversions between the two sorted blocks
    inversions = 0
    j = 0
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        inversions += j
    return -1 if inversions % 2 else 1


class Form:
    """A rational differential form with constant coefficients."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Monomial, object] | None = None):
        self.n = n
        clean: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            mono = tuple(mono)
            if any(b <= a for a, b in zip(mono, mono[1:])):
                raise ValueError(f"monomial {mono} is not strictly increasing")
            if mono and (mono[0] < 1 or mono[-1] > 2 * n):
                raise ValueError(f"monomial {mono} out of range for n={n}")
            c = Fraction(c)
            if c:
                clean[mono] = clean.get(mono, Fraction(0)) + c
        self._terms = {m: c for m, c in clean.items() if c}
        self._hash = None

    @classmethod
    def zero(cls, n: int) -> Form:
        return cls(n)

    @classmethod
    def constant(cls, n: int, c=1) -> Form:
        return cls(n, {(): c})

    @classmethod
    def monomial(cls, n: int, indices: Sequence[int], c=1) -> Form:
        """c * e^{i1} ^ e^{i2} ^ ... with indices in any order (sign applied)."""
        indices = tuple(indices)
        if len(set(indices)) != len(indices):
            return cls(n)
        sign = 1
        idx = list(indices)
        for i in range(len(idx)):
            for j in range(len(idx) - 1 - i):
                if idx[j] > idx[j + 1]:
                    idx[j], idx[j + 1] = idx[j + 1], idx[j]
                    sign = -sign
        return cls(n, {tuple(idx): sign * Fraction(c)})

    @classmethod
    def from_vector(cls, n: int, k: int, v: Sequence[Fraction]) -> Form:
        basis = monomial_basis(n, k)
        if len(v) != len(basis):
            raise DimensionMismatch(f"vector of length {len(v)} for degree {k}, n={n}")
        return cls(n, {m: c for m, c in zip(basis, v) if c})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def degrees(self) -> list[int]:
        return sorted({len(m) for m in self._terms})

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> int | None:
        """Degree of a homogeneous form; None for the zero form."""
        degs = self.degrees()
        if len(degs) > 1:
            raise WrongDegree(f"form is not homogeneous (degrees {degs})")
        return degs[0] if degs else None

    def component(self, k: int) -> Form:
        return Form(self.n, {m: c for m, c in self._terms.items() if len(m) == k})

    def to_vector(self, k: int) -> Vector:
        """Coordinates of the degree-k component in the monomial basis."""
        index = _monomial_index(self.n, k)
        out = [Fraction(0)] * len(index)
        for m, c in self._terms.items():
            if len(m) == k:
                out[index[m]] = c
        return tuple(out)

    def coefficient(self, mono: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def _check(self, other: Form):
        if not isinstance(other, Form):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatch(f"forms over n={self.n} and n={other.n}")
        return None

    def __add__(self, other: Form) -> Form:
        if self._check(other) is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return Form(self.n, terms)

    def __neg__(self) -> Form:
        return Form(self.n, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Form) -> Form:
        return self + (-other)

    def __mul__(self, c) -> Form:
        if isinstance(c, Form):
            return NotImplemented
        c = Fraction(c)
        return Form(self.n, {m: c * v for m, v in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, c) -> Form:
        return self * (1 / Fraction(c))

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def wedge(self, other: Form) -> Form:
        return wedge(self, other)

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=lambda m: (len(m), m)):
            c = self._terms[m]
            name = "e^" + "".join(str(i) if i < 10 else f"({i})" for i in m) if m else "1"
            parts.append(f"{c}*{name}" if c != 1 else name)
        return " + ".join(parts)


def wedge(a: Form, b: Form) -> Form:
    if a.n != b.n:
        raise DimensionMismatch(f"forms over n={a.n} and n={b.n}")
    terms: dict[Monomial, Fraction] = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            s = merge_sign(ma, mb)
            if s:
                m = tuple(sorted(ma + mb))
                terms[m] = terms.get(m, Fraction(0)) + s * ca * cb
    return Form(a.n, terms)


def wedge_all(forms: Iterable[Form], n: int) -> Form:
    out = Form.constant(n)
    for f in forms:
        out = wedge(out, f)
    return out


def interior(i: int, a: Form) -> Form:
    """Contraction with the dual basis vector e_i, acting from the left."""
    terms = {}
    for m, c in a.items():
        if i in m:
            pos = m.index(i)
            terms[m[:pos] + m[pos + 1:]] = -c if pos % 2 else c
    return Form(a.n, terms)


def omega_matrix(omega: Form) -> RationalMatrix:
    """Antisymmetric matrix W with omega = sum_{i<j} W[i,j] e^{ij}."""
    n = omega.n
    size = 2 * n
    w = [[Fraction(0)] * size for _ in range(size)]
    for m, c in omega.items():
        if len(m) != 2:
            raise WrongDegree("symplectic form must be a 2-form")
        i, j = m[0] - 1, m[1] - 1
        w[i][j] += c
        w[j][i] -= c
    return RationalMatrix.from_rows(w, cols=size)


class Bivector:
    """Antisymmetric bivector pi^{ij}; built from omega it is the inverse matrix."""

    __slots__ = ("n", "matrix")

    def __init__(self, n: int, matrix: RationalMatrix):
        if matrix.rows != 2 * n or matrix.cols != 2 * n:
            raise DimensionMismatch("bivector matrix must be 2n x 2n")
        if matrix != matrix.transpose().scaled(-1):
            raise ValueError("bivector matrix is not antisymmetric")
        self.n = n
        self.matrix = matrix

    @classmethod
    def from_omega(cls, omega: Form) -> Bivector:
        return cls(omega.n, inverse(omega_matrix(omega)))


def contract(pi: Bivector, a: Form, scale=Fraction(1, 2)) -> Form:
    """(1/2) sum_{i,j} pi^{ij} i_{e_i} i_{e_j} a.

    ``scale`` exists so the normalization can be perturbed on purpose; the
    sl2 relations pin it to 1/2.
    """
    if pi.n != a.n:
        raise DimensionMismatch(f"bivector over n={pi.n}, form over n={a.n}")
    out = Form.zero(a.n)
    size = 2 * a.n
    for j in range(1, size + 1):
        inner = interior(j, a)
        if not inner:
            continue
        for i in range(1, size + 1):
            p = pi.matrix[i - 1, j - 1]
            if p:
                out = out + interior(i, inner) * p
    return out * Fraction(scale)


def integrate(*args) -> Fraction:
    """Coefficient of e^{12...2n}; the form must have no lower-degree part.

    Accepts ``integrate(a)`` or ``integrate(model, a)``; in the second form the
    model only fixes n, which must agree with the form's.
    """
    if len(args) == 2:
        model, a = args
        if model.n != a.n:
            raise DimensionMismatch(f"form has n={a.n}, model has n={model.n}")
    elif len(args) == 1:
        (a,) = args
    else:
        raise TypeError("integrate takes a form, or a model and a form")
    top = 2 * a.n
    if any(d != top for d in a.degrees()):
        raise WrongDegree(f"cannot integrate a form with components of degree {a.degrees()}")
    return a.coefficient(tuple(range(1, top + 1)))


@lru_cache(maxsize=None)
def volume(n: int) -> Form:
    return Form(n, {tuple(range(1, 2 * n + 1)): 1})


def operator_matrix(n: int, k: int, k_out: int, fn) -> RationalMatrix:
    """Matrix, in monomial bases, of a linear map Omega^k -> Omega^k_out given on forms."""
    cols = []
    for m in monomial_basis(n, k):
        cols.append(fn(Form(n, {m: 1})).to_vector(k_out))
    return RationalMatrix.from_columns(cols, space_dim(n, k_out))
