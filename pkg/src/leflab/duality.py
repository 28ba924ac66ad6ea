"""Duality pairings on the filtered and (d + d^Lambda) / dd^Lambda cohomologies.

All pairings are evaluated on representative forms with the integration
functional. The filtered pairing applies the reflection *_r to the argument
that lives on the descending half of the complex.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .cohomology import (
    THEORIES,
    FilteredComplex,
    build_filtered_complex,
    filtered_cohomology_space,
    h_d_plus_dlambda_space,
    h_ddlambda_space,
    ph_d_plus_dlambda_space,
    ph_ddlambda_space,
)
from .exactlinalg import NotInCodomain, RationalMatrix, SubspaceBasis, Vector
from .exterior import Form, WrongDegree, integrate, merge_sign, monomial_basis, space_dim
from .model import SymplecticModel
from .sampling import random_vector_in
from .sl2ops import calculus


@dataclass
class PairingReport:
    left: dict
    right: dict
    matrix: RationalMatrix
    rank: int = field(init=False)
    nondegenerate: bool = field(init=False)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rank = self.matrix.rank
        self.nondegenerate = self.matrix.is_square() and self.rank == self.matrix.rows

    def to_dict(self) -> dict:
        return {
            "left": self.left,
            "right": self.right,
            "matrix": [[str(x) for x in row] for row in self.matrix.to_rows()],
            "rank": self.rank,
            "nondegenerate": self.nondegenerate,
            **self.extra,
        }


@lru_cache(maxsize=None)
def wedge_pairing_matrix(n: int, k: int) -> RationalMatrix:
    """W[a, b] = integral of e^{I_a} ^ e^{J_b}, I_a a k-monomial, J_b a (2n-k)-monomial."""
    rows = []
    for ma in monomial_basis(n, k):
        rows.append([Fraction(merge_sign(ma, mb)) for mb in monomial_basis(n, 2 * n - k)])
    return RationalMatrix.from_rows(rows, cols=space_dim(n, 2 * n - k))


def integral_pairing(n: int, k: int, u: Vector, v: Vector) -> Fraction:
    """Integral of u ^ v for u a k-form and v a (2n-k)-form in monomial coordinates."""
    if not any(u) or not any(v):
        return Fraction(0)
    Wv = wedge_pairing_matrix(n, k).apply(v)
    return sum((a * b for a, b in zip(u, Wv) if a), Fraction(0))


def pairing_matrix(n: int, k: int, left: SubspaceBasis | list, right: SubspaceBasis | list) -> RationalMatrix:
    left, right = list(left), list(right)
    if not left or not right:
        return RationalMatrix.zeros(len(left), len(right))
    W = wedge_pairing_matrix(n, k)
    Wr = [W.apply(v) for v in right]
    return RationalMatrix.from_rows(
        [[sum((a * b for a, b in zip(u, w) if a), Fraction(0)) for w in Wr] for u in left],
        cols=len(right),
    )


# -- theta and the filtered pairing -----------------------------------------


def theta(model: SymplecticModel, p: int, a: Form) -> Fraction:
    """The trace on the top term F_p^{2n+2p+1} = Omega^0: a |-> integral of *_r a."""
    if any(k != 0 for k in a.degrees()):
        raise WrongDegree("theta is evaluated on constants (top complex degree)")
    return integrate(calculus(model).star_r(a))


def stokes_check(model: SymplecticModel, p: int, trials: int, rng: random.Random) -> list[dict]:
    """theta(d_{2n+2p} x) for random x in F_p^{2n+2p}; returns failures."""
    c = build_filtered_complex(model, p)
    k = c.top - 1
    failures = []
    for _ in range(trials):
        x = random_vector_in(c.spaces[k], rng)
        dx = Form.from_vector(model.n, 0, c.operator(k).apply(x))
        value = theta(model, p, dx)
        if value:
            failures.append({"x": [str(t) for t in x], "theta": str(value)})
    return failures


def filtered_pairing_value(c: FilteredComplex, j: int, u: Vector, v: Vector) -> Fraction:
    """g(u, v) for u at complex index j and v at index 2n+2p+1-j."""
    calc = c.calc
    n = c.model.n
    m = c.form_degrees[j]
    if c.is_ascending(j):
        return integral_pairing(n, m, u, calc.star_matrix(m).apply(v))
    return integral_pairing(n, 2 * n - m, calc.star_matrix(m).apply(u), v)


def _space_descriptor(theory: str, degree: int, dim: int, **kw) -> dict:
    return {"theory": theory, "degree": degree, "dim": dim, **kw}


def g_pairing(c: FilteredComplex, k: int) -> PairingReport:
    """g on F^pH^k x F^pH^{kbar} (k <= n + p): integral of A_i ^ *_r(Abar_j)."""
    n, p = c.model.n, c.p
    if not 0 <= k <= n + p:
        raise ValueError(f"complex degree {k} is not on the ascending half")
    plus = filtered_cohomology_space(c, k)
    minus = filtered_cohomology_space(c, c.bar(k))
    star = c.calc.star_matrix(k)
    mat = pairing_matrix(
        n, k, plus.representative_basis, [star.apply(v) for v in minus.representative_basis]
    )
    return PairingReport(
        _space_descriptor(f"F^{p}H", k, plus.dim),
        _space_descriptor(f"F^{p}H", c.bar(k), minus.dim),
        mat,
    )


def g_pairing_transposed(c: FilteredComplex, k: int) -> PairingReport:
    """g on F^pH^{kbar} x F^pH^k: integral of *_r(Abar_j) ^ A_i."""
    n, p = c.model.n, c.p
    plus = filtered_cohomology_space(c, k)
    minus = filtered_cohomology_space(c, c.bar(k))
    star = c.calc.star_matrix(k)
    mat = pairing_matrix(
        n, 2 * n - k, [star.apply(v) for v in minus.representative_basis], plus.representative_basis
    )
    return PairingReport(
        _space_descriptor(f"F^{p}H", c.bar(k), minus.dim),
        _space_descriptor(f"F^{p}H", k, plus.dim),
        mat,
    )


def _sign_relating(a: list[Fraction], b: list[Fraction]) -> int | None:
    """s in {+1, -1} with b = s * a entrywise, 0 if both vanish, None if neither works."""
    if not any(a) and not any(b):
        return 0
    for s in (1, -1):
        if all(y == s * x for x, y in zip(a, b)):
            return s
    return None


def phi_duality_check(c: FilteredComplex, trials: int = 20, seed: int = 0) -> dict:
    """Duality of F^pH^* on a closed model, with its chain-level prerequisites."""
    rng = random.Random(seed)
    n, p = c.model.n, c.p
    spaces = [filtered_cohomology_space(c, k) for k in range(c.length)]
    dims = [h.dim for h in spaces]
    palindromic = all(dims[k] == dims[c.bar(k)] for k in range(c.length))

    pairings = []
    for k in range(n + p + 1):
        g = g_pairing(c, k)
        gt = g_pairing_transposed(c, k)
        pairings.append({"k": k, "nondegenerate": g.nondegenerate and gt.nondegenerate,
                         "size": [g.matrix.rows, g.matrix.cols], "rank": g.rank})

    # trivial classes pair to zero against every cocycle, in both slots
    annihilation = True
    for j in range(c.length):
        jb = c.bar(j)
        for b in spaces[j].quotient.bottom:
            for z in spaces[jb].quotient.top:
                if filtered_pairing_value(c, j, b, z):
                    annihilation = False
                    break
            if not annihilation:
                break

    # g(d x, y) = s_j g(x, d y) for x in F^j, y in F^{2n+2p-j}
    adjoint_signs = {}
    adjoint_ok = True
    for j in range(c.length - 1):
        i = c.top - 1 - j
        sign = 0
        for _ in range(trials):
            x = random_vector_in(c.spaces[j], rng)
            y = random_vector_in(c.spaces[i], rng)
            lhs = filtered_pairing_value(c, j + 1, c.operator(j).apply(x), y)
            rhs = filtered_pairing_value(c, j, x, c.operator(i).apply(y))
            s = _sign_relating([rhs], [lhs])
            if s is None or (s and sign and s != sign):
                adjoint_ok = False
                break
            sign = sign or s
        adjoint_signs[j] = sign
    passed = palindromic and annihilation and adjoint_ok and all(x["nondegenerate"] for x in pairings)
    return {
        "p": p,
        "dims": dims,
        "palindromic": palindromic,
        "pairings": pairings,
        "coboundary_annihilation": annihilation,
        "adjointness": adjoint_ok,
        "adjoint_signs": adjoint_signs,
        "passed": passed,
    }


def frobenius_report(model: SymplecticModel, p: int) -> list[dict]:
    """Compare g(A, Abar) with g'(Abar, A) = integral of Abar ^ *_r A per degree pair."""
    c = build_filtered_complex(model, p)
    n = model.n
    rows = []
    for k in range(n + p + 1):
        g = g_pairing(c, k)
        plus = filtered_cohomology_space(c, k).representative_basis
        minus = filtered_cohomology_space(c, c.bar(k)).representative_basis
        star = c.calc.star_matrix(k)
        swapped = pairing_matrix(n, k, minus, [star.apply(v) for v in plus])
        sign = _sign_relating(list(g.matrix.transpose().entries), list(swapped.entries))
        rows.append({
            "k": k,
            "kbar": c.bar(k),
            "size": [g.matrix.rows, g.matrix.cols],
            "sign": sign,
            "graded_symmetric": sign is not None,
        })
    return rows


# -- support law for products of Lefschetz pieces ---------------------------


def support_tuples(n: int) -> list[tuple[int, int, int, int]]:
    """(s, r, s', r') with 2r + s + 2r' + s' = 2n, s, s' <= n, L^r, L^r' not forced zero."""
    out = []
    for s in range(n + 1):
        for r in range(n - s + 1):
            for s2 in range(n + 1):
                rem = 2 * n - 2 * r - s - s2
                if rem < 0 or rem % 2:
                    continue
                r2 = rem // 2
                if r2 <= n - s2:
                    out.append((s, r, s2, r2))
    return out


def _support_violation(calc, s, r, s2, r2, b1: Vector, b2: Vector) -> dict | None:
    n = calc.n
    if s2 == s and r2 == n - r - s:
        return None
    x = calc.L_power_matrix(s, r).apply(b1)
    y = calc.L_power_matrix(s2, r2).apply(b2)
    prod = Form.from_vector(n, 2 * r + s, x).wedge(Form.from_vector(n, 2 * r2 + s2, y))
    if prod:
        return {"s": s, "r": r, "s'": s2, "r'": r2,
                "B": [str(t) for t in b1], "B'": [str(t) for t in b2], "product": repr(prod)}
    return None


def product_support_test(model: SymplecticModel, trials: int, seed: int = 0) -> dict:
    rng = random.Random(seed)
    calc = calculus(model)
    tuples = support_tuples(model.n)
    counterexamples, allowed_nonzero = [], 0
    for t in range(trials):
        s, r, s2, r2 = rng.choice(tuples)
        b1 = random_vector_in(calc.primitive_basis(s), rng)
        b2 = random_vector_in(calc.primitive_basis(s2), rng)
        if t % 25 == 0:
            b1 = tuple(Fraction(0) for _ in b1)
        bad = _support_violation(calc, s, r, s2, r2, b1, b2)
        if bad:
            counterexamples.append(bad)
        elif s2 == s and r2 == model.n - r - s:
            x = calc.L_power_matrix(s, r).apply(b1)
            y = calc.L_power_matrix(s2, r2).apply(b2)
            allowed_nonzero += bool(integral_pairing(model.n, 2 * r + s, x, y))
    return {"trials": trials, "counterexamples": counterexamples,
            "allowed_nonzero": allowed_nonzero, "passed": not counterexamples}


def product_support_exhaustive(model: SymplecticModel) -> dict:
    calc = calculus(model)
    counterexamples, checked = [], 0
    for s, r, s2, r2 in support_tuples(model.n):
        for b1 in calc.primitive_basis(s):
            for b2 in calc.primitive_basis(s2):
                checked += 1
                bad = _support_violation(calc, s, r, s2, r2, b1, b2)
                if bad:
                    counterexamples.append(bad)
    return {"checked": checked, "counterexamples": counterexamples, "passed": not counterexamples}


# -- (d + d^Lambda) versus dd^Lambda --------------------------------------------


def _dd_report(model: SymplecticModel, k: int, left_theory: str) -> PairingReport:
    n = model.n
    right_theory = "ddLambda" if left_theory == "d+dLambda" else "d+dLambda"
    left = THEORIES[left_theory][0](model, k).quotient
    right = THEORIES[right_theory][0](model, 2 * n - k).quotient
    well_defined = (
        pairing_matrix(n, k, left.bottom, right.top).is_zero()
        and pairing_matrix(n, k, left.top, right.bottom).is_zero()
    )
    return PairingReport(
        _space_descriptor(f"H_{left_theory}", k, left.dim),
        _space_descriptor(f"H_{right_theory}", 2 * n - k, right.dim),
        pairing_matrix(n, k, left.representatives, right.representatives),
        extra={"well_defined": well_defined},
    )


def dd_pairing(model: SymplecticModel, k: int) -> PairingReport:
    """D : H^k_{d+d^Lambda} -> (H^{2n-k}_{dd^Lambda})^dual."""
    return _dd_report(model, k, "d+dLambda")


def dd_pairing_swapped(model: SymplecticModel, k: int) -> PairingReport:
    """H^k_{dd^Lambda} -> (H^{2n-k}_{d+d^Lambda})^dual."""
    return _dd_report(model, k, "ddLambda")


def _decomposed_basis(model, theory: str, k: int) -> list[tuple[int, int, Vector]]:
    """(r, s, L^r b) over representatives b of PH^s, s = k - 2r."""
    calc = calculus(model)
    ph_space = THEORIES[theory][1]
    out = []
    for r in calc.lefschetz_range(k):
        s = k - 2 * r
        Lr = calc.L_power_matrix(s, r)
        for b in ph_space(model, s).representative_basis:
            out.append((r, s, Lr.apply(b)))
    return out


def d_block_decomposition(model: SymplecticModel, k: int) -> dict:
    n = model.n
    left = _decomposed_basis(model, "d+dLambda", k)
    right = _decomposed_basis(model, "ddLambda", 2 * n - k)
    full = pairing_matrix(n, k, [v for *_, v in left], [v for *_, v in right])
    cross_zero = True
    blocks = []
    for r in calculus(model).lefschetz_range(k):
        s = k - 2 * r
        rows = [i for i, (rr, _, _) in enumerate(left) if rr == r]
        cols = [j for j, (rr, ss, _) in enumerate(right) if ss == s and rr == n - k + r]
        for i in rows:
            for j in range(len(right)):
                if j not in cols and full[i, j]:
                    cross_zero = False
        block = RationalMatrix.from_rows(
            [[full[i, j] for j in cols] for i in rows], cols=len(cols)
        )
        report = PairingReport(
            _space_descriptor("L^r PH_d+dLambda", k, len(rows), r=r, s=s),
            _space_descriptor("L^r' PH_ddLambda", 2 * n - k, len(cols), r=n - k + r, s=s),
            block,
        )
        blocks.append(report)
    passed = cross_zero and all(b.nondegenerate for b in blocks)
    return {"k": k, "blocks": blocks, "cross_blocks_zero": cross_zero, "passed": passed}


def admissible_diagram_pairs(n: int) -> list[tuple[int, int]]:
    """(k, r) with s = k - 2r in 0..n, r in the Lefschetz range and n-k+2r in 0..n."""
    out = []
    for k in range(2 * n + 1):
        for r in range(max(0, k - n), k // 2 + 1):
            s = k - 2 * r
            pp = n - k + 2 * r
            if 0 <= s <= n and 0 <= pp <= n:
                out.append((k, r))
    return out


def diagram_check(model: SymplecticModel, k: int, r: int) -> dict:
    n = model.n
    calc = calculus(model)
    s = k - 2 * r
    pp = n - k + 2 * r
    if not (0 <= s <= n and 0 <= pp <= n):
        raise ValueError(f"(k, r) = ({k}, {r}) is not admissible")
    PH = ph_d_plus_dlambda_space(model, s).quotient
    PHc = ph_ddlambda_space(model, s).quotient
    c = build_filtered_complex(model, pp)
    F_desc = filtered_cohomology_space(c, n + pp + 1).quotient
    F_mid = filtered_cohomology_space(c, n + pp).quotient
    Lpp = calc.L_power_matrix(s, pp)
    out = {"k": k, "r": r, "p": pp, "s": s}
    try:
        VL = PH.induced_matrix(F_desc, Lpp)
        VR = PHc.induced_matrix(F_mid, Lpp)
    except NotInCodomain as exc:
        out.update(vertical_bijective=False, commutes=False, passed=False, reason=str(exc))
        return out
    out["vertical_bijective"] = (
        VL.is_square() and VL.rank == VL.rows and VR.is_square() and VR.rank == VR.rows
    )
    B = list(PH.representatives)
    Bc = list(PHc.representatives)
    # top path: D_r followed by (L^{-r})^dual
    top = pairing_matrix(
        n, k,
        [calc.L_power_matrix(s, r).apply(b) for b in B],
        [calc.L_power_matrix(s, n - k + r).apply(b) for b in Bc],
    )
    # bottom path on the same representatives: integral of *_r(L^p B) ^ L^p B'
    star = calc.star_matrix(n + pp)
    bottom = pairing_matrix(
        n, n - pp, [star.apply(Lpp.apply(b)) for b in B], [Lpp.apply(b) for b in Bc]
    )
    # bottom path through the filtered classes: VL^T G VR
    G = pairing_matrix(
        n, n - pp, [star.apply(x) for x in F_desc.representatives], list(F_mid.representatives)
    )
    through_classes = VL.transpose() @ G @ VR if G.rows and G.cols else RationalMatrix.zeros(len(B), len(Bc))
    out["commutes"] = top == bottom
    out["commutes_on_classes"] = top == through_classes
    out["passed"] = out["vertical_bijective"] and out["commutes"] and out["commutes_on_classes"]
    return out
