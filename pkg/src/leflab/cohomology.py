"""Cochain complexes of a symplectic model and their cohomologies.

* the p-filtered complex F_p^0 -> ... -> F_p^{2n+2p+1} and F^pH^*,
* the (d + d^Lambda)- and dd^Lambda-cohomologies with their primitive parts,
* Lefschetz maps on de Rham cohomology, and the two exact sequences relating
  F^pH^* to kernels and cokernels of L^{p+1}.

All spaces are subquotients of a single degree of the exterior algebra, held
in monomial coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .exactlinalg import (
    NotInCodomain,
    Quotient,
    RationalMatrix,
    SubspaceBasis,
    kernel,
    matrix_of_map,
)
from .exterior import Form, space_dim
from .model import SymplecticModel, derham_space
from .sl2ops import Calculus, calculus


class ComplexPropertyViolation(RuntimeError):
    pass


class NotFiltered(RuntimeError):
    pass


@dataclass(frozen=True)
class CohomologySpace:
    theory: str
    degree: int
    form_degree: int
    quotient: Quotient

    @property
    def dim(self) -> int:
        return self.quotient.dim

    @property
    def representative_basis(self) -> SubspaceBasis:
        return self.quotient.representatives

    def representatives(self, n: int) -> list[Form]:
        return [Form.from_vector(n, self.form_degree, v) for v in self.representative_basis]


# -- the filtered complex -----------------------------------------------------


@dataclass(frozen=True)
class FilteredComplex:
    model: SymplecticModel
    p: int
    form_degrees: tuple[int, ...]
    spaces: tuple[SubspaceBasis, ...]
    operators: tuple[RationalMatrix, ...]  # d_k on ambient monomial coordinates
    differentials: tuple[RationalMatrix, ...]  # d_k in the bases of F_p^k, F_p^{k+1}
    calc: Calculus = field(repr=False, compare=False)

    @property
    def length(self) -> int:
        return len(self.spaces)

    @property
    def top(self) -> int:
        return 2 * self.model.n + 2 * self.p + 1

    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.spaces)

    def is_ascending(self, k: int) -> bool:
        return k <= self.model.n + self.p

    def bar(self, k: int) -> int:
        return self.top - k

    def operator(self, k: int) -> RationalMatrix:
        """d_k on ambient coordinates; zero map past either end of the complex."""
        if 0 <= k < len(self.operators):
            return self.operators[k]
        src = self.form_degrees[k] if 0 <= k < self.length else -1
        dst = self.form_degrees[k + 1] if 0 <= k + 1 < self.length else -1
        return RationalMatrix.zeros(
            space_dim(self.model.n, dst) if dst >= 0 else 0,
            space_dim(self.model.n, src) if src >= 0 else 0,
        )


def form_degree(n: int, p: int, k: int) -> int:
    return k if k <= n + p else 2 * n + 2 * p + 1 - k


def _differential_operator(calc: Calculus, p: int, k: int) -> RationalMatrix:
    n = calc.n
    if k < n + p:
        return calc.pi_matrix(k + 1, p) @ calc.d_matrix(k)
    if k == n + p:
        # second-order middle map *_r d L^{-(p+1)} d
        return (
            calc.star_matrix(n - p)
            @ calc.d_matrix(n - p - 1)
            @ calc.l_inverse_matrix(n + p + 1, p + 1)
            @ calc.d_matrix(n + p)
        )
    m = 2 * n + 2 * p + 1 - k
    return calc.star_matrix(2 * n - m + 1) @ calc.d_matrix(2 * n - m) @ calc.star_matrix(m)


def build_filtered_complex(model: SymplecticModel, p: int, calc: Calculus | None = None) -> FilteredComplex:
    if calc is None:
        return _default_complex(model, p)
    n = model.n
    if not 0 <= p <= n:
        raise ValueError(f"filtration index p={p} outside 0..{n}")
    top = 2 * n + 2 * p + 1
    fdeg = tuple(form_degree(n, p, k) for k in range(top + 1))
    spaces = tuple(calc.filtered_basis(m, p) for m in fdeg)
    operators, differentials = [], []
    for k in range(top):
        op = _differential_operator(calc, p, k)
        try:
            mat = matrix_of_map(spaces[k], spaces[k + 1], op.apply)
        except NotInCodomain as exc:
            raise NotFiltered(f"d_{k} leaves the {p}-filtered forms") from exc
        operators.append(op)
        differentials.append(mat)
    for k in range(top - 1):
        if not (differentials[k + 1] @ differentials[k]).is_zero():
            raise ComplexPropertyViolation(f"d_{k + 1} d_{k} != 0 for p={p}")
    return FilteredComplex(model, p, fdeg, spaces, tuple(operators), tuple(differentials), calc)


@lru_cache(maxsize=None)
def _default_complex(model: SymplecticModel, p: int) -> FilteredComplex:
    return build_filtered_complex(model, p, calculus(model))


def complex_cohomology(c: FilteredComplex) -> list[CohomologySpace]:
    return [filtered_cohomology_space(c, k) for k in range(c.length)]


def filtered_cohomology_space(c: FilteredComplex, k: int) -> CohomologySpace:
    key = ("FpH", c.p, k)
    return c.calc.cached(key, lambda: _filtered_cohomology_space(c, k))


def _filtered_cohomology_space(c: FilteredComplex, k: int) -> CohomologySpace:
    space = c.spaces[k]
    amb = space.ambient_dim
    if k < c.length - 1:
        ker = kernel(c.differentials[k])
        cocycles = SubspaceBasis(
            amb, tuple(space.matrix().apply(v) for v in ker), _trusted=True
        )
    else:
        cocycles = space
    if k > 0:
        coboundaries = SubspaceBasis.spanned_by(
            amb, (c.operators[k - 1].apply(v) for v in c.spaces[k - 1])
        )
    else:
        coboundaries = SubspaceBasis(amb)
    return CohomologySpace(f"F^{c.p}H", k, c.form_degrees[k], Quotient(cocycles, coboundaries))


def filtered_dims(model: SymplecticModel, p: int) -> tuple[int, ...]:
    return tuple(h.dim for h in complex_cohomology(build_filtered_complex(model, p)))


# -- d^Lambda and the (d + d^Lambda) / dd^Lambda cohomologies -------------------


def d_lambda_matrix(calc: Calculus, k: int) -> RationalMatrix:
    """d^Lambda = d Lambda - Lambda d : Omega^k -> Omega^{k-1}."""
    return calc.cached(
        ("dLambda", k),
        lambda: calc.d_matrix(k - 2) @ calc.Lambda_matrix(k)
        - calc.Lambda_matrix(k + 1) @ calc.d_matrix(k),
    )


def ddl_matrix(calc: Calculus, k: int) -> RationalMatrix:
    return calc.cached(("ddLambda", k), lambda: calc.d_matrix(k - 1) @ d_lambda_matrix(calc, k))


def d_lambda(model: SymplecticModel, a: Form) -> Form:
    calc = calculus(model)
    out = Form.zero(model.n)
    for k in a.degrees():
        out = out + Form.from_vector(model.n, k - 1, d_lambda_matrix(calc, k).apply(a.to_vector(k)))
    return out


def _stack(*ms: RationalMatrix) -> RationalMatrix:
    rows = [r for m in ms for r in m.to_rows()]
    return RationalMatrix.from_rows(rows, cols=ms[0].cols)


def _image(m: RationalMatrix) -> SubspaceBasis:
    return SubspaceBasis.spanned_by(m.rows, m.columns())


def _calc(model, calc):
    return calc if calc is not None else calculus(model)


def h_d_plus_dlambda_space(model: SymplecticModel, k: int, calc: Calculus | None = None) -> CohomologySpace:
    calc = _calc(model, calc)

    def build():
        # on a homogeneous form d raises and d^Lambda lowers degree, so
        # (d + d^Lambda) a = 0 iff both vanish
        top = kernel(_stack(calc.d_matrix(k), d_lambda_matrix(calc, k)))
        bottom = _image(ddl_matrix(calc, k))
        return CohomologySpace("H_d+dLambda", k, k, Quotient(top, bottom))

    return calc.cached(("Hdpdl", k), build)


def h_ddlambda_space(model: SymplecticModel, k: int, calc: Calculus | None = None) -> CohomologySpace:
    calc = _calc(model, calc)

    def build():
        top = kernel(ddl_matrix(calc, k))
        bottom = _image(calc.d_matrix(k - 1)) + _image(d_lambda_matrix(calc, k + 1))
        return CohomologySpace("H_ddLambda", k, k, Quotient(top, bottom))

    return calc.cached(("Hddl", k), build)


def h_d_plus_dlambda(model: SymplecticModel) -> list[CohomologySpace]:
    return [h_d_plus_dlambda_space(model, k) for k in range(2 * model.n + 1)]


def h_ddlambda(model: SymplecticModel) -> list[CohomologySpace]:
    return [h_ddlambda_space(model, k) for k in range(2 * model.n + 1)]


def ph_d_plus_dlambda_space(model: SymplecticModel, k: int, calc: Calculus | None = None) -> CohomologySpace:
    calc = _calc(model, calc)

    def build():
        P = calc.primitive_basis(k)
        top = kernel(calc.d_matrix(k)).intersect(P)
        bottom = _image(ddl_matrix(calc, k)).intersect(P)
        return CohomologySpace("PH_d+dLambda", k, k, Quotient(top, bottom))

    return calc.cached(("PHdpdl", k), build)


def ph_ddlambda_space(model: SymplecticModel, k: int, calc: Calculus | None = None) -> CohomologySpace:
    calc = _calc(model, calc)

    def build():
        P = calc.primitive_basis(k)
        top = kernel(ddl_matrix(calc, k)).intersect(P)
        # (Im d + Im d^Lambda) meets P^k in del_+ P^{k-1} + del_- P^{k+1}; the sum of the
        # separate intersections is smaller at k = n
        bottom = (_image(calc.d_matrix(k - 1)) + _image(d_lambda_matrix(calc, k + 1))).intersect(P)
        return CohomologySpace("PH_ddLambda", k, k, Quotient(top, bottom))

    return calc.cached(("PHddl", k), build)


def primitive_cohomologies(model: SymplecticModel) -> dict[str, list[CohomologySpace]]:
    ks = range(model.n + 1)
    return {
        "d+dLambda": [ph_d_plus_dlambda_space(model, k) for k in ks],
        "ddLambda": [ph_ddlambda_space(model, k) for k in ks],
    }


THEORIES = {
    "d+dLambda": (h_d_plus_dlambda_space, ph_d_plus_dlambda_space),
    "ddLambda": (h_ddlambda_space, ph_ddlambda_space),
}


def lefschetz_assembly(model: SymplecticModel, theory: str, k: int) -> tuple[list[tuple[int, int]], RationalMatrix]:
    """Matrix of (+)_r L^r : (+)_r PH^{k-2r} -> H^k on class coordinates.

    Columns are tagged (r, i) for the i-th representative of PH^{k-2r}.
    Raises NotInCodomain if some L^r is not well defined on classes.
    """
    calc = calculus(model)
    h_space, ph_space = THEORIES[theory]
    H = h_space(model, k).quotient
    tags, cols = [], []
    for r in calc.lefschetz_range(k):
        s = k - 2 * r
        PH = ph_space(model, s).quotient
        Lr = calc.L_power_matrix(s, r)
        for v in PH.bottom:
            if not H.bottom.contains(Lr.apply(v)):
                raise NotInCodomain(f"L^{r} sends a trivial class of PH^{s} to a nontrivial one")
        for i, v in enumerate(PH.representatives):
            try:
                cols.append(H.class_of(Lr.apply(v)))
            except Exception as exc:
                raise NotInCodomain(f"L^{r} of a PH^{s} cocycle is not an H^{k} cocycle") from exc
            tags.append((r, i))
    return tags, RationalMatrix.from_columns(cols, H.dim)


def lefschetz_decomp_check(model: SymplecticModel) -> list[dict]:
    calc = calculus(model)
    n = model.n
    rows = []
    for theory, (h_space, ph_space) in THEORIES.items():
        for k in range(2 * n + 1):
            dim_h = h_space(model, k).dim
            parts = {k - 2 * r: ph_space(model, k - 2 * r).dim for r in calc.lefschetz_range(k)}
            row = {
                "theory": theory,
                "k": k,
                "dim_H": dim_h,
                "dim_PH_sum": sum(parts.values()),
                "dims_match": dim_h == sum(parts.values()),
            }
            try:
                _, m = lefschetz_assembly(model, theory, k)
                row["well_defined"] = True
                row["bijective"] = m.is_square() and m.rank == m.rows
            except NotInCodomain:
                row["well_defined"] = False
                row["bijective"] = False
            row["passed"] = row["dims_match"] and row["well_defined"] and row["bijective"]
            rows.append(row)
    return rows


# -- de Rham Lefschetz maps and the resolution sequences ----------------------


def lefschetz_map_on_derham(model: SymplecticModel, j: int, k: int) -> RationalMatrix:
    """Matrix of L^j : H^k -> H^{k+2j} on de Rham representatives."""
    calc = calculus(model)
    return derham_space(model, k).induced_matrix(
        derham_space(model, k + 2 * j), calc.L_power_matrix(k, j)
    )


def strong_lefschetz_witness(model: SymplecticModel) -> tuple[int, Form] | None:
    """First (k, representative) with L^{n-k} [rep] = 0 in H^{2n-k}, or None."""
    n = model.n
    for k in range(n + 1):
        m = lefschetz_map_on_derham(model, n - k, k)
        if m.rank < m.cols:
            h = derham_space(model, k)
            ker = kernel(m)
            rep = h.representatives.matrix().apply(ker[0])
            return k, Form.from_vector(n, k, rep)
    return None


def strong_lefschetz(model: SymplecticModel) -> bool:
    n = model.n
    for k in range(n + 1):
        m = lefschetz_map_on_derham(model, n - k, k)
        if not (m.is_square() and m.rank == m.rows):
            return False
    return True


def lefschetz_coker(model: SymplecticModel, a: int, j: int) -> Quotient:
    """Coker(L^j : H^a -> H^{a+2j}) as a subquotient of Omega^{a+2j}."""
    calc = calculus(model)
    target = derham_space(model, a + 2 * j)
    image = derham_space(model, a).top.map(calc.L_power_matrix(a, j))
    return Quotient(target.top, target.bottom + image)


def lefschetz_ker(model: SymplecticModel, a: int, j: int) -> Quotient:
    """Ker(L^j : H^a -> H^{a+2j}) as a subquotient of Omega^a."""
    calc = calculus(model)
    source = derham_space(model, a)
    target = derham_space(model, a + 2 * j)
    top = source.top.preimage(calc.L_power_matrix(a, j), target.bottom)
    return Quotient(top, source.bottom)


def _exactness(first: Quotient, middle: Quotient, last: Quotient, f: RationalMatrix, g: RationalMatrix) -> dict:
    out = {"dims": [first.dim, middle.dim, last.dim]}
    try:
        mf = first.induced_matrix(middle, f)
        mg = middle.induced_matrix(last, g)
    except NotInCodomain as exc:
        out.update(well_defined=False, reason=str(exc), injective=False,
                   exact_middle=False, surjective=False, dimension_identity=False)
        return out
    out["well_defined"] = True
    out["injective"] = mf.rank == first.dim
    out["surjective"] = mg.rank == last.dim
    composite_zero = (mg @ mf).is_zero()
    out["exact_middle"] = composite_zero and mf.rank + mg.rank == middle.dim
    out["dimension_identity"] = middle.dim == first.dim + last.dim
    return out


def resolution_check(model: SymplecticModel, p: int) -> list[dict]:
    """Both exact sequences for every 0 <= k <= n + p."""
    n = model.n
    calc = calculus(model)
    c = build_filtered_complex(model, p)
    rows = []
    for k in range(n + p + 1):
        plus = filtered_cohomology_space(c, k).quotient
        seq = _exactness(
            lefschetz_coker(model, k - 2 * p - 2, p + 1),
            plus,
            lefschetz_ker(model, k - 2 * p - 1, p + 1),
            calc.pi_matrix(k, p),
            calc.l_inverse_matrix(k + 1, p + 1) @ calc.d_matrix(k),
        )
        rows.append({"p": p, "k": k, "sequence": "+", **seq})

        minus = filtered_cohomology_space(c, c.bar(k)).quotient
        a = 2 * n - k + 2 * p + 1
        seq = _exactness(
            lefschetz_coker(model, 2 * n - k - 1, p + 1),
            minus,
            lefschetz_ker(model, 2 * n - k, p + 1),
            calc.star_matrix(2 * n - k)
            @ calc.d_matrix(2 * n - k - 1)
            @ calc.l_inverse_matrix(a, p + 1),
            calc.star_matrix(k),
        )
        rows.append({"p": p, "k": k, "sequence": "-", **seq})
    for row in rows:
        row["passed"] = all(
            row[key] for key in
            ("well_defined", "injective", "exact_middle", "surjective", "dimension_identity")
        )
    return rows
