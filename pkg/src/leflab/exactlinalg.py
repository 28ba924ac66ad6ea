"""Exact rational linear algebra.

Everything here works over ``fractions.Fraction``. Ranks and echelon forms are
computed with fraction-free (Bareiss) elimination after clearing row
denominators; kernels are recovered from the integer echelon form by rational
back-substitution. A naive Gauss-Jordan routine is kept alongside as an
independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Callable, Iterable, Sequence

Vector = tuple[Fraction, ...]


class NotInSpan(ValueError):
    """A vector was expected to lie in the span of a basis and does not."""


class NotASubspace(NotInSpan):
    pass


class NotInCodomain(NotInSpan):
    pass


def vec(values: Iterable) -> Vector:
    return tuple(Fraction(v) for v in values)


def zero_vector(dim: int) -> Vector:
    return (Fraction(0),) * dim


def is_zero(v: Sequence[Fraction]) -> bool:
    return not any(v)


def add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def scale(c, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def combine(coeffs: Sequence[Fraction], vectors: Sequence[Vector], dim: int) -> Vector:
    """Return sum(coeffs[i] * vectors[i]) in a space of dimension ``dim``."""
    out = [Fraction(0)] * dim
    for c, v in zip(coeffs, vectors):
        if not c:
            continue
        for i, a in enumerate(v):
            if a:
                out[i] += c * a
    return tuple(out)


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> RationalMatrix:
        rows = [vec(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> RationalMatrix:
        columns = [vec(c) for c in columns]
        if any(len(c) != rows for c in columns):
            raise ValueError("column length does not match row count")
        return cls(
            rows,
            len(columns),
            tuple(columns[j][i] for i in range(rows) for j in range(len(columns))),
        )

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RationalMatrix:
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls(n, n, tuple(Fraction(int(i == j)) for i in range(n) for j in range(n)))

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[Vector]:
        return [self.row(i) for i in range(self.rows)]

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def transpose(self) -> RationalMatrix:
        return RationalMatrix.from_rows(self.columns(), cols=self.rows)

    @property
    def T(self) -> RationalMatrix:
        return self.transpose()

    def apply(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} for {self.rows}x{self.cols} matrix")
        nz = [(j, a) for j, a in enumerate(v) if a]
        c = self.cols
        e = self.entries
        return tuple(
            sum((e[i * c + j] * a for j, a in nz), Fraction(0)) for i in range(self.rows)
        )

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.cols != other.rows:
                raise ValueError(
                    f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}"
                )
            cols = [self.apply(other.column(j)) for j in range(other.cols)]
            return RationalMatrix.from_columns(cols, self.rows)
        return self.apply(other)

    def __add__(self, other: RationalMatrix) -> RationalMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return RationalMatrix(
            self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries))
        )

    def __sub__(self, other: RationalMatrix) -> RationalMatrix:
        return self + other.scaled(-1)

    def scaled(self, c) -> RationalMatrix:
        c = Fraction(c)
        return RationalMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)

    @cached_property
    def rank(self) -> int:
        return len(_echelon(self.to_rows(), self.cols)[1])

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"RationalMatrix({self.rows}x{self.cols}: [{body}])"


# -- elimination --------------------------------------------------------------


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    out = []
    for row in rows:
        den = lcm(*(x.denominator for x in row)) if row else 1
        out.append([x.numerator * (den // x.denominator) for x in row])
    return out


def _echelon(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form.

    Rows are first scaled to integers, then reduced with Bareiss' update
    ``a_ij <- (p * a_ij - a_ic * a_rj) / p_prev``, whose division is exact.
    The pivot in each column is the entry of least magnitude, which keeps
    intermediate growth down. Returns the integer echelon rows and pivot columns.
    """
    m = _integer_rows(rows)
    nrows = len(m)
    prev = 1
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        best = None
        for i in range(r, nrows):
            v = m[i][c]
            if v and (best is None or abs(v) < abs(m[best][c])):
                best = i
        if best is None:
            continue
        m[r], m[best] = m[best], m[r]
        pivot_row = m[r]
        piv = pivot_row[c]
        for i in range(r + 1, nrows):
            row = m[i]
            lead = row[c]
            for j in range(c + 1, ncols):
                q, rem = divmod(piv * row[j] - lead * pivot_row[j], prev)
                if rem:
                    raise ArithmeticError("inexact Bareiss division")
                row[j] = q
            row[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return m[:r], pivots


def _kernel_from_echelon(ech: list[list[int]], pivots: list[int], ncols: int) -> list[Vector]:
    pivot_set = set(pivots)
    free = [j for j in range(ncols) if j not in pivot_set]
    kernel = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in zip(reversed(ech), reversed(pivots)):
            s = sum((row[j] * x[j] for j in range(pc + 1, ncols) if row[j]), Fraction(0))
            x[pc] = -s / row[pc]
        kernel.append(tuple(x))
    return kernel


def naive_rank(m: RationalMatrix) -> int:
    """Rank by plain Gauss-Jordan over the rationals (reference route)."""
    a = [list(r) for r in m.to_rows()]
    rank = 0
    for c in range(m.cols):
        piv = next((i for i in range(rank, m.rows) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][c]
        a[rank] = [x / p for x in a[rank]]
        for i in range(m.rows):
            if i != rank and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def rank_kernel_image(m: RationalMatrix) -> tuple[int, SubspaceBasis, SubspaceBasis]:
    ech, pivots = _echelon(m.to_rows(), m.cols)
    kernel = _kernel_from_echelon(ech, pivots, m.cols)
    image = [m.column(j) for j in pivots]
    return (
        len(pivots),
        SubspaceBasis(m.cols, tuple(kernel), _trusted=True),
        SubspaceBasis(m.rows, tuple(image), _trusted=True),
    )


def kernel(m: RationalMatrix) -> SubspaceBasis:
    return rank_kernel_image(m)[1]


def image(m: RationalMatrix) -> SubspaceBasis:
    return rank_kernel_image(m)[2]


def inverse(m: RationalMatrix) -> RationalMatrix:
    if not m.is_square():
        raise ValueError("inverse of a non-square matrix")
    n = m.rows
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m.to_rows())]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        p = a[c][c]
        a[c] = [x / p for x in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return RationalMatrix.from_rows([r[n:] for r in a], cols=n)


# -- subspaces ----------------------------------------------------------------


@dataclass(frozen=True)
class SubspaceBasis:
    """An ordered basis of a subspace of Q^ambient_dim."""

    ambient_dim: int
    vectors: tuple[Vector, ...] = ()
    _trusted: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vectors", tuple(vec(v) for v in self.vectors))
        if any(len(v) != self.ambient_dim for v in self.vectors):
            raise ValueError("basis vector length differs from ambient dimension")
        if not self._trusted and self.vectors:
            if len(_echelon(self.vectors, self.ambient_dim)[1]) != len(self.vectors):
                raise ValueError("basis vectors are linearly dependent")

    @classmethod
    def spanned_by(cls, ambient_dim: int, vectors: Iterable[Sequence]) -> SubspaceBasis:
        """Basis of span(vectors), keeping the first independent ones in order."""
        vectors = [vec(v) for v in vectors]
        if not vectors:
            return cls(ambient_dim)
        m = RationalMatrix.from_columns(vectors, ambient_dim)
        _, pivots = _echelon(m.to_rows(), m.cols)
        return cls(ambient_dim, tuple(vectors[j] for j in pivots), _trusted=True)

    @classmethod
    def full(cls, dim: int) -> SubspaceBasis:
        return cls(dim, RationalMatrix.identity(dim).columns(), _trusted=True)

    @classmethod
    def zero(cls, dim: int) -> SubspaceBasis:
        return cls(dim)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    def matrix(self) -> RationalMatrix:
        return RationalMatrix.from_columns(self.vectors, self.ambient_dim)

    @cached_property
    def _solver(self) -> tuple[list[int], RationalMatrix]:
        # rows of the basis matrix that form an invertible square block
        _, rows = _echelon(self.vectors, self.ambient_dim)
        block = RationalMatrix.from_rows(
            [[v[i] for v in self.vectors] for i in rows], cols=self.dim
        )
        return rows, inverse(block)

    def coordinates(self, v: Sequence[Fraction]) -> Vector:
        """Coordinates of ``v`` in this basis; raises NotInSpan when v is outside."""
        if len(v) != self.ambient_dim:
            raise ValueError("vector length differs from ambient dimension")
        if not self.vectors:
            if any(v):
                raise NotInSpan("nonzero vector is not in the zero subspace")
            return ()
        rows, inv = self._solver
        coords = inv.apply([v[i] for i in rows])
        if combine(coords, self.vectors, self.ambient_dim) != tuple(Fraction(x) for x in v):
            raise NotInSpan("vector is not in the span of the basis")
        return coords

    def contains(self, v: Sequence[Fraction]) -> bool:
        try:
            self.coordinates(v)
        except NotInSpan:
            return False
        return True

    def contains_space(self, other: SubspaceBasis) -> bool:
        return all(self.contains(v) for v in other.vectors)

    def same_span(self, other: SubspaceBasis) -> bool:
        return self.dim == other.dim and self.contains_space(other)

    def __add__(self, other: SubspaceBasis) -> SubspaceBasis:
        return SubspaceBasis.spanned_by(self.ambient_dim, self.vectors + other.vectors)

    def intersect(self, other: SubspaceBasis) -> SubspaceBasis:
        if not self.vectors or not other.vectors:
            return SubspaceBasis(self.ambient_dim)
        # u = A x = B y  <=>  [A | -B] (x, y) = 0
        cols = list(self.vectors) + [scale(-1, v) for v in other.vectors]
        ker = kernel(RationalMatrix.from_columns(cols, self.ambient_dim))
        return SubspaceBasis.spanned_by(
            self.ambient_dim,
            (combine(k[: self.dim], self.vectors, self.ambient_dim) for k in ker),
        )

    def map(self, m: RationalMatrix) -> SubspaceBasis:
        """Span of the image of this subspace under ``m``."""
        return SubspaceBasis.spanned_by(m.rows, (m.apply(v) for v in self.vectors))

    def preimage(self, m: RationalMatrix, target: SubspaceBasis) -> SubspaceBasis:
        """Vectors of this subspace that ``m`` sends into ``target``."""
        images = [m.apply(v) for v in self.vectors]
        cols = images + [scale(-1, t) for t in target.vectors]
        if not cols:
            return SubspaceBasis(self.ambient_dim)
        ker = kernel(RationalMatrix.from_columns(cols, m.rows))
        return SubspaceBasis.spanned_by(
            self.ambient_dim,
            (combine(k[: self.dim], self.vectors, self.ambient_dim) for k in ker),
        )


def quotient_representatives(space: SubspaceBasis, subspace: SubspaceBasis) -> SubspaceBasis:
    """Vectors of ``space`` completing a basis of ``subspace`` to one of ``space``."""
    for v in subspace.vectors:
        if not space.contains(v):
            raise NotASubspace("subspace vector outside the ambient space")
    cols = list(subspace.vectors) + list(space.vectors)
    if not cols:
        return SubspaceBasis(space.ambient_dim)
    m = RationalMatrix.from_columns(cols, space.ambient_dim)
    _, pivots = _echelon(m.to_rows(), m.cols)
    k = subspace.dim
    return SubspaceBasis(
        space.ambient_dim, tuple(cols[j] for j in pivots if j >= k), _trusted=True
    )


def matrix_of_map(
    domain_basis: SubspaceBasis,
    codomain_basis: SubspaceBasis,
    apply: Callable[[Vector], Sequence[Fraction]],
) -> RationalMatrix:
    columns = []
    for j, v in enumerate(domain_basis.vectors):
        w = apply(v)
        try:
            columns.append(codomain_basis.coordinates(w))
        except NotInSpan as exc:
            raise NotInCodomain(f"image of domain basis vector {j} leaves the codomain") from exc
    return RationalMatrix.from_columns(columns, codomain_basis.dim)


@dataclass(frozen=True)
class Quotient:
    """The subquotient ``top / bottom`` of an ambient space, with bottom inside top."""

    top: SubspaceBasis
    bottom: SubspaceBasis

    def __post_init__(self):
        if self.top.ambient_dim != self.bottom.ambient_dim:
            raise ValueError("ambient dimensions differ")

    @cached_property
    def representatives(self) -> SubspaceBasis:
        return quotient_representatives(self.top, self.bottom)

    @property
    def dim(self) -> int:
        return self.top.dim - self.bottom.dim

    @property
    def ambient_dim(self) -> int:
        return self.top.ambient_dim

    @cached_property
    def _adapted(self) -> SubspaceBasis:
        return SubspaceBasis(
            self.ambient_dim,
            self.representatives.vectors + self.bottom.vectors,
            _trusted=True,
        )

    def class_of(self, v: Sequence[Fraction]) -> Vector:
        """Coordinates of the class of ``v`` (which must lie in top) on the representatives."""
        return self._adapted.coordinates(v)[: self.dim]

    def is_trivial_class(self, v: Sequence[Fraction]) -> bool:
        return self.bottom.contains(v)

    def induced_matrix(self, target: Quotient, m: RationalMatrix) -> RationalMatrix:
        """Matrix of the map induced by ``m`` from this quotient to ``target``.

        Raises NotInCodomain when ``m`` does not send top into target.top or
        bottom into target.bottom, i.e. when the map is not well defined.
        """
        for v in self.bottom.vectors:
            if not target.bottom.contains(m.apply(v)):
                raise NotInCodomain("map does not preserve the subspace being divided out")
        columns = []
        for v in self.representatives.vectors:
            w = m.apply(v)
            try:
                columns.append(target.class_of(w))
            except NotInSpan as exc:
                raise NotInCodomain("map leaves the target space") from exc
        return RationalMatrix.from_columns(columns, target.dim)
