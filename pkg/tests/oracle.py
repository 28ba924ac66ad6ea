"""Independent dense-matrix oracle built on sympy.

Shares nothing with the package except the model JSON files: the exterior
algebra uses bitmasks, linear algebra is sympy's, the filtered spaces are
characterised as ker Lambda^{p+1} (the package spans them by L^l P^{k-2l}),
and subquotient dimensions come from rank counts instead of explicit bases.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path

import sympy as sp

MODELS_DIR = Path(__file__).resolve().parents[1] / "src" / "leflab" / "models"


def _sign_insert(mask: int, i: int) -> int:
    """Sign of moving e^i past the generators of ``mask`` below it."""
    return -1 if bin(mask & ((1 << i) - 1)).count("1") % 2 else 1


class Oracle:
    def __init__(self, n: int, de: dict[int, dict[tuple[int, int], Fraction]],
                 omega: dict[tuple[int, int], Fraction]):
        self.n = n
        self.N = 2 * n
        self.de = de  # generator (0-based) -> {(i, j): c} with i < j, 0-based
        self.omega = omega

    @classmethod
    def from_file(cls, path) -> Oracle:
        data = json.loads(Path(path).read_text())
        n = data["n"]

        def rat(x):
            return Fraction(x) if isinstance(x, int) else Fraction(str(x))

        def parse_form(value):
            out = {}
            if isinstance(value, str):
                for term in value.replace("-", "+-").split("+"):
                    if not term:
                        continue
                    sgn = -1 if term.startswith("-") else 1
                    digits = term.lstrip("-")
                    i, j = int(digits[0]) - 1, int(digits[1]) - 1
                    out[(i, j)] = out.get((i, j), 0) + sgn
            else:
                for i, j, c in value:
                    out[(i - 1, j - 1)] = out.get((i - 1, j - 1), 0) + rat(c)
            return out

        de = {int(k) - 1: parse_form(v) for k, v in data.get("differential", {}).items()}
        return cls(n, de, parse_form(data["omega"]))

    @classmethod
    def builtin(cls, name: str) -> Oracle:
        return cls.from_file(MODELS_DIR / f"{name}.json")

    # -- bases ------------------------------------------------------------------

    def basis(self, k: int) -> list[int]:
        if not 0 <= k <= self.N:
            return []
        return [sum(1 << i for i in c) for c in combinations(range(self.N), k)]

    def index(self, k: int) -> dict[int, int]:
        return {m: a for a, m in enumerate(self.basis(k))}

    def dim(self, k: int) -> int:
        return len(self.basis(k))

    def _matrix(self, k: int, k_out: int, action) -> sp.Matrix:
        """Matrix of a linear map given on basis masks as {mask: coeff}."""
        rows, cols = self.dim(k_out), self.dim(k)
        M = sp.zeros(rows, cols)
        idx = self.index(k_out)
        for a, m in enumerate(self.basis(k)):
            for m2, c in action(m).items():
                if c:
                    M[idx[m2], a] += sp.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else c
        return M

    # -- operators on monomials ---------------------------------------------------

    def _wedge_2form(self, two: dict[tuple[int, int], Fraction], m: int) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (i, j), c in two.items():
            if m >> i & 1 or m >> j & 1:
                continue
            # e^i e^j e^m: move e^j into m, then e^i into (m | j)
            s = _sign_insert(m, j)
            m1 = m | 1 << j
            s *= _sign_insert(m1, i)
            m2 = m1 | 1 << i
            out[m2] = out.get(m2, 0) + s * c
        return out

    def _d_monomial(self, m: int) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for g in range(self.N):
            if m >> g & 1:
                for m2, c in self._replace_slot(m, g, self.de.get(g, {})).items():
                    out[m2] = out.get(m2, 0) + c
        return out

    def _replace_slot(self, m: int, g: int, two: dict) -> dict[int, Fraction]:
        """Replace the generator e^g in the monomial m by the 2-form ``two``."""
        below = bin(m & ((1 << g) - 1)).count("1")
        rest = m & ~(1 << g)
        out: dict[int, Fraction] = {}
        # e^{m} = (-1)^below e^g e^{rest}; replace e^g by two and wedge
        for m2, c in self._wedge_2form(two, rest).items():
            out[m2] = out.get(m2, 0) + (-1) ** below * c
        return out

    def _contract(self, i: int, m: int) -> tuple[int, int] | None:
        if not m >> i & 1:
            return None
        return m & ~(1 << i), _sign_insert(m, i)

    @cached_property
    def pi(self) -> sp.Matrix:
        W = sp.zeros(self.N, self.N)
        for (i, j), c in self.omega.items():
            W[i, j] += sp.Rational(c)
            W[j, i] -= sp.Rational(c)
        return W.inv()

    def _lambda_monomial(self, m: int) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        P = self.pi
        for i in range(self.N):
            for j in range(self.N):
                if P[i, j] == 0:
                    continue
                first = self._contract(j, m)
                if first is None:
                    continue
                second = self._contract(i, first[0])
                if second is None:
                    continue
                c = Fraction(str(P[i, j])) * first[1] * second[1] / 2
                out[second[0]] = out.get(second[0], 0) + c
        return out

    # -- matrices -------------------------------------------------------------------

    def d(self, k: int) -> sp.Matrix:
        return self._matrix(k, k + 1, self._d_monomial)

    def L(self, k: int) -> sp.Matrix:
        return self._matrix(k, k + 2, lambda m: self._wedge_2form(self.omega, m))

    def Lam(self, k: int) -> sp.Matrix:
        return self._matrix(k, k - 2, self._lambda_monomial)

    def L_pow(self, k: int, j: int) -> sp.Matrix:
        M = sp.eye(self.dim(k))
        for i in range(j):
            M = self.L(k + 2 * i) * M
        return M

    def Lam_pow(self, k: int, j: int) -> sp.Matrix:
        M = sp.eye(self.dim(k))
        for i in range(j):
            M = self.Lam(k - 2 * i) * M
        return M

    def d_lambda(self, k: int) -> sp.Matrix:
        """d Lambda - Lambda d : Omega^k -> Omega^{k-1}."""
        out = sp.zeros(self.dim(k - 1), self.dim(k))
        if k >= 2:
            out += self.d(k - 2) * self.Lam(k)
        if k + 1 <= self.N and k >= 1:
            out -= self.Lam(k + 1) * self.d(k)
        return out

    # -- Lefschetz data ---------------------------------------------------------------

    def primitive(self, s: int) -> list[sp.Matrix]:
        if s < 0 or s > self.n:
            return []
        if s < 2:
            return [sp.eye(self.dim(s))[:, a] for a in range(self.dim(s))]
        return self.Lam(s).nullspace()

    def _components(self, k: int):
        """(list of (l, primitive basis), inverse of the assembled basis matrix)."""
        blocks, cols = [], []
        for l in range(max(0, k - self.n), k // 2 + 1):
            P = self.primitive(k - 2 * l)
            blocks.append((l, P))
            cols.extend(self.L_pow(k - 2 * l, l) * b for b in P)
        A = sp.Matrix.hstack(*cols) if cols else sp.zeros(self.dim(k), 0)
        assert A.shape == (self.dim(k), self.dim(k)), "Lefschetz decomposition is not square"
        return blocks, A.inv()

    def lefschetz_op(self, k: int, k_out: int, rule) -> sp.Matrix:
        blocks, Ainv = self._components(k)
        out = sp.zeros(self.dim(k_out), self.dim(k))
        row = 0
        for l, P in blocks:
            s = k - 2 * l
            r = rule(l, s)
            for b in P:
                if r is not None:
                    out += (self.L_pow(s, r) * b) * Ainv[row, :]
                row += 1
        return out

    def star(self, k: int) -> sp.Matrix:
        return self.lefschetz_op(k, self.N - k, lambda l, s: self.n - l - s)

    def pi_p(self, k: int, p: int) -> sp.Matrix:
        return self.lefschetz_op(k, k, lambda l, s: l if l <= p else None)

    def l_inv(self, k: int, p: int) -> sp.Matrix:
        if k - 2 * p < 0:
            return sp.zeros(0, self.dim(k))
        return self.lefschetz_op(k, k - 2 * p, lambda l, s: l - p if l >= p else None)

    # -- cohomologies --------------------------------------------------------------------

    @staticmethod
    def _rank(M: sp.Matrix) -> int:
        return 0 if 0 in M.shape else M.rank()

    def betti(self) -> list[int]:
        out = []
        for k in range(self.N + 1):
            dk = self.d(k) if k < self.N else sp.zeros(0, self.dim(k))
            prev = self.d(k - 1) if k > 0 else sp.zeros(self.dim(k), 0)
            out.append(self.dim(k) - self._rank(dk) - self._rank(prev))
        return out

    def filtered_space(self, m: int, p: int) -> sp.Matrix:
        """F^p Omega^m = ker Lambda^{p+1}, as a column basis."""
        if 2 * (p + 1) > m:
            return sp.eye(self.dim(m))
        ns = self.Lam_pow(m, p + 1).nullspace()
        return sp.Matrix.hstack(*ns) if ns else sp.zeros(self.dim(m), 0)

    def filtered_operator(self, p: int, k: int) -> sp.Matrix:
        n = self.n
        if k < n + p:
            return self.pi_p(k + 1, p) * self.d(k)
        if k == n + p:
            return self.star(n - p) * self.d(n - p - 1) * self.l_inv(n + p + 1, p + 1) * self.d(n + p)
        m = 2 * n + 2 * p + 1 - k
        return self.star(self.N - m + 1) * self.d(self.N - m) * self.star(m)

    def filtered_dims(self, p: int) -> list[int]:
        n = self.n
        top = 2 * n + 2 * p + 1
        fdeg = [k if k <= n + p else top - k for k in range(top + 1)]
        spaces = [self.filtered_space(m, p) for m in fdeg]
        ranks = [self._rank(self.filtered_operator(p, k) * spaces[k]) for k in range(top)]
        return [
            spaces[k].shape[1] - (ranks[k] if k < top else 0) - (ranks[k - 1] if k > 0 else 0)
            for k in range(top + 1)
        ]

    def _d_or_zero(self, k: int) -> sp.Matrix:
        if 0 <= k < self.N:
            return self.d(k)
        return sp.zeros(max(self.dim(k + 1), 0), self.dim(k))

    def _dl_or_zero(self, k: int) -> sp.Matrix:
        if 1 <= k <= self.N:
            return self.d_lambda(k)
        return sp.zeros(self.dim(k - 1), self.dim(k))

    def _ddl(self, k: int) -> sp.Matrix:
        """d d^Lambda : Omega^k -> Omega^k."""
        if 1 <= k <= self.N:
            return self.d(k - 1) * self.d_lambda(k)
        return sp.zeros(self.dim(k), self.dim(k))

    def _nullity(self, *blocks: sp.Matrix) -> int:
        rows = [b for b in blocks if b.shape[0]]
        cols = blocks[0].shape[1]
        if not rows:
            return cols
        return cols - self._rank(sp.Matrix.vstack(*rows))

    def _sum_of_images(self, k: int) -> sp.Matrix:
        """Columns spanning Im d + Im d^Lambda inside Omega^k."""
        parts = []
        if k >= 1:
            parts.append(self.d(k - 1))
        if k + 1 <= self.N:
            parts.append(self.d_lambda(k + 1))
        parts = [p for p in parts if p.shape[1]]
        return sp.Matrix.hstack(*parts) if parts else sp.zeros(self.dim(k), 0)

    def h_d_plus_dl(self) -> list[int]:
        return [
            self._nullity(self._d_or_zero(k), self._dl_or_zero(k)) - self._rank(self._ddl(k))
            for k in range(self.N + 1)
        ]

    def h_ddl(self) -> list[int]:
        return [
            self._nullity(self._ddl(k)) - self._rank(self._sum_of_images(k))
            for k in range(self.N + 1)
        ]

    def _in_primitive(self, M: sp.Matrix, k: int) -> int:
        """dim(Im M intersect P^k) = rank M - rank(Lambda M)."""
        if k < 2:
            return self._rank(M)
        return self._rank(M) - self._rank(self.Lam(k) * M)

    def ph_d_plus_dl(self) -> list[int]:
        out = []
        for k in range(self.n + 1):
            lam = self.Lam(k) if k >= 2 else sp.zeros(0, self.dim(k))
            top = self._nullity(self._d_or_zero(k), lam)
            out.append(top - self._in_primitive(self._ddl(k), k))
        return out

    def ph_ddl(self) -> list[int]:
        out = []
        for k in range(self.n + 1):
            lam = self.Lam(k) if k >= 2 else sp.zeros(0, self.dim(k))
            top = self._nullity(self._ddl(k), lam)
            out.append(top - self._in_primitive(self._sum_of_images(k), k))
        return out

    # -- pairings ----------------------------------------------------------------------

    def integrate_pair(self, u: sp.Matrix, k: int, v: sp.Matrix) -> sp.Rational:
        """Integral of u ^ v for u a k-form, v a (2n-k)-form (column vectors)."""
        total = sp.Integer(0)
        full = (1 << self.N) - 1
        idx = self.index(self.N - k)
        for a, m in enumerate(self.basis(k)):
            if u[a] == 0:
                continue
            comp = full & ~m
            # sign of e^m e^comp relative to e^{1..2n}
            sign, seen = 1, m
            for g in range(self.N):
                if comp >> g & 1:
                    if bin(seen >> g).count("1") % 2:
                        sign = -sign
            total += u[a] * v[idx[comp]] * sign
        return total

    def _cohomology_reps(self, p: int, j: int, spaces, ops) -> list[sp.Matrix]:
        S = spaces[j]
        amb = S.shape[0]
        if j < len(ops):
            ker = (ops[j] * S).nullspace() if S.shape[1] else []
            Z = [S * v for v in ker]
        else:
            Z = [S[:, a] for a in range(S.shape[1])]
        B = []
        if j > 0 and spaces[j - 1].shape[1]:
            img = ops[j - 1] * spaces[j - 1]
            B = [img[:, a] for a in range(img.shape[1])]
        reps, current = [], sp.Matrix.hstack(*B) if B else sp.zeros(amb, 0)
        r = self._rank(current)
        for z in Z:
            trial = sp.Matrix.hstack(current, z)
            if trial.rank() > r:
                current, r = trial, r + 1
                reps.append(z)
        return reps

    def frobenius_signs(self, p: int) -> dict[int, int]:
        """Per ascending degree k: s with  int Abar ^ *A  =  s * int A ^ *Abar  (0 if empty)."""
        n = self.n
        top = 2 * n + 2 * p + 1
        fdeg = [k if k <= n + p else top - k for k in range(top + 1)]
        spaces = [self.filtered_space(m, p) for m in fdeg]
        ops = [self.filtered_operator(p, k) for k in range(top)]
        out = {}
        for k in range(n + p + 1):
            plus = self._cohomology_reps(p, k, spaces, ops)
            minus = self._cohomology_reps(p, top - k, spaces, ops)
            S = self.star(k)
            g = sp.Matrix(len(plus), len(minus),
                          lambda i, j: self.integrate_pair(plus[i], k, S * minus[j]))
            h = sp.Matrix(len(minus), len(plus),
                          lambda j, i: self.integrate_pair(minus[j], k, S * plus[i]))
            if not plus:
                out[k] = 0
            elif h == g.T:
                out[k] = 1
            elif h == -g.T:
                out[k] = -1
            else:
                out[k] = None
        return out

    def form_dict(self, k: int, v: sp.Matrix) -> dict[str, str]:
        """{'1234': '1/2', ...} with 1-based generator labels."""
        out = {}
        for a, m in enumerate(self.basis(k)):
            if v[a] != 0:
                label = "".join(str(g + 1) for g in range(self.N) if m >> g & 1)
                out[label] = str(v[a])
        return out


FIXTURE_MODELS = ("kodaira_thurston", "nil6_0000_12_13", "nil6_filiform", "nil6_free2step", "t4")


def canonical_dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def fixture_tables(o: Oracle, name: str) -> dict:
    n = o.n
    tables = {
        "model": name,
        "betti": o.betti(),
        "filtered": {str(p): o.filtered_dims(p) for p in range(n + 1)},
        "H_d+dLambda": o.h_d_plus_dl(),
        "H_ddLambda": o.h_ddl(),
        "PH_d+dLambda": o.ph_d_plus_dl(),
        "PH_ddLambda": o.ph_ddl(),
        "frobenius_signs": {
            str(p): {str(k): s for k, s in o.frobenius_signs(p).items()} for p in range(n + 1)
        },
    }
    top = sp.zeros(o.dim(o.N), 1)
    top[0] = 1
    tables["d_lambda_volume"] = o.form_dict(o.N - 1, o.d_lambda(o.N) * top)
    D3 = o.d_lambda(3)
    tables["d_lambda_on_3_forms"] = {
        "".join(str(g + 1) for g in range(o.N) if m >> g & 1): o.form_dict(2, D3[:, a])
        for a, m in enumerate(o.basis(3))
    }
    return tables
