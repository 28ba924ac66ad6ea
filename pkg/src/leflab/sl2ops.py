"""The sl2 operator calculus of a symplectic model.

L, Lambda, H and the operators built from the Lefschetz decomposition
(the reflection *_r, L^{-p}, Pi^p, and d = del_+ + L del_-). Every operator is
realised as an exact matrix on each degree of the exterior algebra, and the
decomposition is obtained by inverting the assembled map
sum_l L^l : (+)_l P^{k-2l} -> Omega^k, where P^s = ker Lambda on s-forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactlinalg import NotInSpan, RationalMatrix, SubspaceBasis, Vector, combine, kernel
from .exterior import Bivector, DimensionMismatch, Form, contract, operator_matrix, space_dim, wedge
from .model import SymplecticModel, d_matrix


class DegreeOutOfRange(ValueError):
    pass


class NotPrimitive(ValueError):
    pass


class DecompositionError(RuntimeError):
    """An identity that the sl2 theory guarantees failed to hold."""


@dataclass(frozen=True)
class LefschetzComponents:
    degree: int
    components: dict[int, Form]  # l -> B_{k-2l}

    def reconstruct(self, calc: Calculus) -> Form:
        n = calc.n
        out = Form.zero(n)
        for l, b in self.components.items():
            out = out + calc.L_power(b, l)
        return out


class Calculus:
    """Operator matrices for one model, built lazily and cached per degree.

    ``lambda_scale`` is the normalisation of Lambda; 1/2 is forced by
    [Lambda, L] = H and anything else exists only for mutation testing.
    """

    def __init__(self, model: SymplecticModel, lambda_scale=Fraction(1, 2)):
        self.model = model
        self.n = model.n
        self.lambda_scale = Fraction(lambda_scale)
        self.pi = Bivector.from_omega(model.omega)
        self._cache: dict = {}

    def cached(self, key, build):
        try:
            return self._cache[key]
        except KeyError:
            value = self._cache[key] = build()
            return value

    # -- basic matrices -------------------------------------------------------

    def dim(self, k: int) -> int:
        return space_dim(self.n, k)

    def L_matrix(self, k: int) -> RationalMatrix:
        return self.cached(
            ("L", k),
            lambda: operator_matrix(self.n, k, k + 2, lambda f: wedge(self.model.omega, f)),
        )

    def Lambda_matrix(self, k: int) -> RationalMatrix:
        return self.cached(
            ("Lambda", k),
            lambda: operator_matrix(
                self.n, k, k - 2, lambda f: contract(self.pi, f, self.lambda_scale)
            ),
        )

    def L_power_matrix(self, k: int, j: int) -> RationalMatrix:
        """L^j : Omega^k -> Omega^{k+2j}."""
        def build():
            m = RationalMatrix.identity(self.dim(k))
            for i in range(j):
                m = self.L_matrix(k + 2 * i) @ m
            return m
        return self.cached(("Lpow", k, j), build)

    def Lambda_power_matrix(self, k: int, j: int) -> RationalMatrix:
        def build():
            m = RationalMatrix.identity(self.dim(k))
            for i in range(j):
                m = self.Lambda_matrix(k - 2 * i) @ m
            return m
        return self.cached(("Lampow", k, j), build)

    def d_matrix(self, k: int) -> RationalMatrix:
        return d_matrix(self.model, k)

    # -- primitive subspaces and the decomposition ----------------------------

    def primitive_basis(self, s: int) -> SubspaceBasis:
        """P^s = ker(Lambda) on s-forms (zero for s < 0 or s > n)."""
        def build():
            if s < 0 or s > self.n:
                return SubspaceBasis(max(self.dim(s), 0))
            return kernel(self.Lambda_matrix(s))
        return self.cached(("P", s), build)

    def lefschetz_range(self, k: int) -> range:
        return range(max(0, k - self.n), k // 2 + 1) if 0 <= k <= 2 * self.n else range(0)

    def _assembled(self, k: int) -> tuple[list[tuple[int, int]], SubspaceBasis]:
        """Columns L^l b over l and b in P^{k-2l}, tagged by (l, index in P)."""
        def build():
            tags, cols = [], []
            for l in self.lefschetz_range(k):
                Lp = self.L_power_matrix(k - 2 * l, l)
                for idx, b in enumerate(self.primitive_basis(k - 2 * l)):
                    tags.append((l, idx))
                    cols.append(Lp.apply(b))
            if len(cols) != self.dim(k):
                raise DecompositionError(
                    f"primitive pieces give {len(cols)} columns in degree {k}, "
                    f"expected {self.dim(k)}"
                )
            try:
                basis = SubspaceBasis(self.dim(k), tuple(cols))
            except ValueError:
                raise DecompositionError(f"sum of L^l P^(k-2l) is not direct in degree {k}")
            return tags, basis
        return self.cached(("assembled", k), build)

    def decompose_vector(self, k: int, v: Vector) -> dict[int, Vector]:
        """Lefschetz components of a k-form given by coordinates: l -> B_{k-2l}."""
        if not 0 <= k <= 2 * self.n:
            return {}
        tags, basis = self._assembled(k)
        coords = basis.coordinates(v)
        out = {}
        for l in self.lefschetz_range(k):
            P = self.primitive_basis(k - 2 * l)
            c = [coords[i] for i, (tl, _) in enumerate(tags) if tl == l]
            out[l] = combine(c, P.vectors, P.ambient_dim)
        return out

    def _lefschetz_operator(self, k: int, k_out: int, key, rule) -> RationalMatrix:
        """Matrix of A = sum L^l B_{k-2l}  ->  sum_l L^{rule(l)} B_{k-2l}.

        ``rule(l, s)`` returns the new exponent or None to drop the component.
        """
        def build():
            cols = []
            for i in range(self.dim(k)):
                e = [Fraction(0)] * self.dim(k)
                e[i] = Fraction(1)
                out = [Fraction(0)] * self.dim(k_out)
                for l, b in self.decompose_vector(k, tuple(e)).items():
                    s = k - 2 * l
                    r = rule(l, s)
                    if r is None or r < 0 or not any(b):
                        continue
                    if 2 * r + s != k_out:
                        raise DecompositionError("exponent rule changes degree inconsistently")
                    w = self.L_power_matrix(s, r).apply(b)
                    out = [x + y for x, y in zip(out, w)]
                cols.append(out)
            return RationalMatrix.from_columns(cols, self.dim(k_out))
        return self.cached((key, k), build)

    def star_matrix(self, k: int) -> RationalMatrix:
        n = self.n
        return self._lefschetz_operator(k, 2 * n - k, "star", lambda l, s: n - l - s)

    def l_inverse_matrix(self, k: int, p: int) -> RationalMatrix:
        return self._lefschetz_operator(
            k, k - 2 * p, ("Linv", p), lambda l, s: l - p if l >= p else None
        )

    def pi_matrix(self, k: int, p: int) -> RationalMatrix:
        return self._lefschetz_operator(k, k, ("Pi", p), lambda l, s: l if l <= p else None)

    def filtered_basis(self, k: int, p: int) -> SubspaceBasis:
        """F^p Omega^k spanned by L^l P^{k-2l}, l <= p, in decomposition order."""
        def build():
            if k > self.n + p:
                raise DegreeOutOfRange(f"F^{p} Omega^{k} needs k <= n + p = {self.n + p}")
            cols = []
            for l in self.lefschetz_range(k):
                if l > p:
                    break
                Lp = self.L_power_matrix(k - 2 * l, l)
                cols.extend(Lp.apply(b) for b in self.primitive_basis(k - 2 * l))
            return SubspaceBasis(self.dim(k), tuple(cols), _trusted=True)
        return self.cached(("F", k, p), build)

    # -- form-level operators -------------------------------------------------

    def _by_degree(self, a: Form, fn) -> Form:
        out = Form.zero(self.n)
        for k in a.degrees():
            k_out, v = fn(k, a.to_vector(k))
            if k_out is not None:
                out = out + Form.from_vector(self.n, k_out, v)
        return out

    def L(self, a: Form) -> Form:
        return wedge(self.model.omega, a)

    def Lambda(self, a: Form) -> Form:
        return contract(self.pi, a, self.lambda_scale)

    def H(self, a: Form) -> Form:
        return sum((a.component(k) * (self.n - k) for k in a.degrees()), Form.zero(self.n))

    def L_power(self, a: Form, j: int) -> Form:
        return self._by_degree(a, lambda k, v: (k + 2 * j, self.L_power_matrix(k, j).apply(v)))

    def Lambda_power(self, a: Form, j: int) -> Form:
        return self._by_degree(
            a, lambda k, v: (k - 2 * j, self.Lambda_power_matrix(k, j).apply(v))
        )

    def d(self, a: Form) -> Form:
        return self._by_degree(a, lambda k, v: (k + 1, self.d_matrix(k).apply(v)))

    def star_r(self, a: Form) -> Form:
        return self._by_degree(a, lambda k, v: (2 * self.n - k, self.star_matrix(k).apply(v)))

    def l_inverse(self, a: Form, p: int) -> Form:
        if p < 1:
            raise ValueError("L^{-p} needs p >= 1")
        return self._by_degree(
            a,
            lambda k, v: (k - 2 * p, self.l_inverse_matrix(k, p).apply(v))
            if k >= 2 * p else (None, None),
        )

    def l_signed_power(self, a: Form, j: int) -> Form:
        """L^j for j >= 0, L^{-|j|} for j < 0."""
        return self.L_power(a, j) if j >= 0 else self.l_inverse(a, -j)

    def pi_p(self, a: Form, p: int) -> Form:
        return self._by_degree(a, lambda k, v: (k, self.pi_matrix(k, p).apply(v)))

    def lefschetz_decompose(self, a: Form) -> LefschetzComponents:
        k = a.degree
        if k is None:
            return LefschetzComponents(0, {})
        comps = self.decompose_vector(k, a.to_vector(k))
        return LefschetzComponents(
            k, {l: Form.from_vector(self.n, k - 2 * l, b) for l, b in comps.items()}
        )

    def is_primitive(self, a: Form) -> bool:
        k = a.degree or 0
        if k > self.n:
            raise DegreeOutOfRange(f"primitivity is defined for degree <= n = {self.n}")
        first = not self.Lambda(a)
        second = not self.L_power(a, self.n - k + 1)
        if first != second:
            raise DecompositionError(f"primitivity criteria disagree on {a!r}")
        return first

    def is_p_filtered(self, a: Form, p: int) -> bool:
        k = a.degree or 0
        if k > self.n + p:
            raise DegreeOutOfRange(f"{p}-filtered forms have degree <= n + p = {self.n + p}")
        first = not self.Lambda_power(a, p + 1)
        second = not self.L_power(a, self.n - k + 1 + p)
        if first != second:
            raise DecompositionError(f"{p}-filtered criteria disagree on {a!r}")
        return first

    def del_plus_minus(self, b: Form) -> tuple[Form, Form]:
        """Split d b = del_+ b + L del_- b for a primitive b."""
        n = self.n
        k = b.degree
        if k is None:
            return Form.zero(n), Form.zero(n)
        if k > n or self.Lambda(b):
            raise NotPrimitive(f"{b!r} is not primitive")
        comps = self.lefschetz_decompose(self.d(b)).components
        extra = {l: c for l, c in comps.items() if l >= 2 and c}
        if extra:
            raise DecompositionError(f"d of a primitive form has components {sorted(extra)}")
        return comps.get(0, Form.zero(n)), comps.get(1, Form.zero(n))


@lru_cache(maxsize=None)
def calculus(model: SymplecticModel) -> Calculus:
    return Calculus(model)


# -- module-level API ---------------------------------------------------------


def sl2_apply(which: str, model: SymplecticModel, a: Form) -> Form:
    calc = calculus(model)
    ops = {"L": calc.L, "Lambda": calc.Lambda, "H": calc.H}
    if which not in ops:
        raise ValueError(f"unknown sl2 operator {which!r}")
    if a.n != model.n:
        raise DimensionMismatch(f"form over n={a.n}, model over n={model.n}")
    return ops[which](a)


def lefschetz_decompose(model: SymplecticModel, a: Form) -> LefschetzComponents:
    return calculus(model).lefschetz_decompose(a)


def is_primitive(model: SymplecticModel, a: Form) -> bool:
    return calculus(model).is_primitive(a)


def is_p_filtered(model: SymplecticModel, a: Form, p: int) -> bool:
    return calculus(model).is_p_filtered(a, p)


def star_r(model: SymplecticModel, a: Form) -> Form:
    return calculus(model).star_r(a)


def l_inverse(model: SymplecticModel, a: Form, p: int) -> Form:
    return calculus(model).l_inverse(a, p)


def pi_p(model: SymplecticModel, a: Form, p: int) -> Form:
    return calculus(model).pi_p(a, p)


def del_plus_minus(model: SymplecticModel, b: Form) -> tuple[Form, Form]:
    return calculus(model).del_plus_minus(b)


__all__ = [
    "Calculus",
    "DecompositionError",
    "DegreeOutOfRange",
    "LefschetzComponents",
    "NotInSpan",
    "NotPrimitive",
    "calculus",
    "del_plus_minus",
    "is_p_filtered",
    "is_primitive",
    "l_inverse",
    "lefschetz_decompose",
    "pi_p",
    "sl2_apply",
    "star_r",
]
