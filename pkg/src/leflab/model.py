"""Symplectic Lie-algebra models.

A model is a nilpotent Lie algebra given by the differentials d e^i of a
dual basis together with an invariant symplectic form. Everything downstream
works with the finite-dimensional complex of invariant forms.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .exactlinalg import Quotient, RationalMatrix, SubspaceBasis, kernel
from .exterior import (
    Bivector,
    Form,
    contract,
    integrate,
    monomial_basis,
    omega_matrix,
    operator_matrix,
    space_dim,
    wedge,
)


class ModelSyntaxError(SyntaxError, ValueError):
    """Malformed model text. Also a SyntaxError, so callers may catch either."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class IndexOutOfRange(ModelSyntaxError):
    pass


class UnknownModel(KeyError):
    pass


class InvalidModel(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        failed = [name for name, c in report.checks.items() if not c.passed]
        super().__init__(f"model {report.model_name!r} failed validation: {', '.join(failed)}")


@dataclass(frozen=True)
class SymplecticModel:
    name: str
    n: int
    structure: tuple[Form, ...]  # structure[i - 1] = d e^i
    omega: Form

    def d_of_generator(self, i: int) -> Form:
        return self.structure[i - 1]

    @property
    def dim(self) -> int:
        return 2 * self.n

    def is_abelian(self) -> bool:
        return not any(self.structure)

    def canonical(self) -> dict:
        def triples(f: Form):
            return [[*m, _frac_str(c)] for m, c in sorted(f.items())]

        return {
            "n": self.n,
            "differential": {
                str(i + 1): triples(f) for i, f in enumerate(self.structure) if f
            },
            "omega": triples(self.omega),
        }

    def to_json(self) -> str:
        data = {"name": self.name, **self.canonical()}
        return json.dumps(data, sort_keys=True)

    def fingerprint(self) -> str:
        """sha256 of the canonical serialization (the name is not part of it)."""
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _frac_str(c: Fraction) -> str | int:
    return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# -- parsing ------------------------------------------------------------------


def _locate(text: str, key: str) -> tuple[int | None, int | None]:
    idx = text.find(f'"{key}"')
    if idx < 0:
        return None, None
    line = text.count("\n", 0, idx) + 1
    col = idx - (text.rfind("\n", 0, idx) + 1) + 1
    return line, col


def _rational(x, where: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise ValueError(f"{where}: rationals must be integers or 'p/q' strings, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str) and re.fullmatch(r"\s*-?\d+(\s*/\s*\d+)?\s*", x):
        return Fraction(x.replace(" ", ""))
    raise ValueError(f"{where}: cannot read rational {x!r}")


def _pairs_form(n: int, entries, where: str) -> Form:
    if not isinstance(entries, list):
        raise ValueError(f"{where}: expected a list of [i, j, coefficient] triples")
    seen = set()
    terms = {}
    for e in entries:
        if not (isinstance(e, list) and len(e) == 3):
            raise ValueError(f"{where}: malformed entry {e!r}")
        i, j, c = e
        if not (isinstance(i, int) and isinstance(j, int)) or isinstance(i, bool):
            raise ValueError(f"{where}: indices must be integers in {e!r}")
        if i >= j:
            raise ValueError(f"{where}: index pair ({i}, {j}) is not strictly increasing")
        if (i, j) in seen:
            raise ValueError(f"{where}: duplicate index pair ({i}, {j})")
        if i < 1 or j > 2 * n:
            raise IndexError(f"{where}: index pair ({i}, {j}) outside 1..{2 * n}")
        seen.add((i, j))
        terms[(i, j)] = _rational(c, where)
    return Form(n, terms)


def _salamon_form(n: int, text: str, where: str) -> Form:
    """Read '12', '-13', '12+34', '14-23' (single-digit indices)."""
    s = text.replace(" ", "")
    if s in ("", "0"):
        return Form.zero(n)
    tokens = re.findall(r"([+-]?)(\d+)", s)
    if "".join(sign + digits for sign, digits in tokens) != s:
        raise ValueError(f"{where}: cannot parse monomial string {text!r}")
    out = Form.zero(n)
    for sign, digits in tokens:
        idx = [int(ch) for ch in digits]
        if len(idx) != 2:
            raise ValueError(f"{where}: {digits!r} is not a 2-form monomial")
        if idx[0] >= idx[1]:
            raise ValueError(f"{where}: {digits!r} is not strictly increasing")
        if min(idx) < 1 or max(idx) > 2 * n:
            raise IndexError(f"{where}: {digits!r} has an index outside 1..{2 * n}")
        out = out + Form(n, {tuple(idx): -1 if sign == "-" else 1})
    return out


MODEL_KEYS = frozenset({"name", "n", "differential", "omega"})


def parse_model(text: str, name: str | None = None) -> SymplecticModel:
    """Read a model from its JSON text. The result is not validated."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise ModelSyntaxError("model must be a JSON object", 1, 1)
    unknown = sorted(set(data) - MODEL_KEYS)
    if unknown:
        line, col = _locate(text, unknown[0])
        raise ModelSyntaxError(f"unknown key {unknown[0]!r}", line, col)

    def fail(exc: Exception, key: str):
        line, col = _locate(text, key)
        cls = IndexOutOfRange if isinstance(exc, IndexError) else ModelSyntaxError
        raise cls(str(exc).strip("'\""), line, col) from None

    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        fail(ValueError("'n' must be a positive integer"), "n")
    model_name = data.get("name", name or "unnamed")
    if not isinstance(model_name, str):
        fail(ValueError("'name' must be a string"), "name")

    diff = data.get("differential", {})
    if not isinstance(diff, dict):
        fail(ValueError("'differential' must be an object"), "differential")
    structure = [Form.zero(n) for _ in range(2 * n)]
    for key, value in diff.items():
        try:
            gen = int(key)
        except ValueError:
            fail(ValueError(f"generator index {key!r} is not an integer"), "differential")
        if gen < 1 or gen > 2 * n:
            fail(IndexError(f"generator index {gen} outside 1..{2 * n}"), "differential")
        where = f"differential[{key}]"
        try:
            if isinstance(value, str):
                structure[gen - 1] = _salamon_form(n, value, where)
            else:
                structure[gen - 1] = _pairs_form(n, value, where)
        except (ValueError, IndexError) as exc:
            fail(exc, "differential")

    if "omega" not in data:
        raise ModelSyntaxError("missing 'omega'", 1, 1)
    try:
        omega = _pairs_form(n, data["omega"], "omega")
    except (ValueError, IndexError) as exc:
        fail(exc, "omega")
    return SymplecticModel(model_name, n, tuple(structure), omega)


# -- differential -------------------------------------------------------------


def ce_differential(model: SymplecticModel, a: Form) -> Form:
    """Chevalley-Eilenberg differential: the anti-derivation extending d e^i."""
    n = model.n
    out = Form.zero(n)
    for mono, c in a.items():
        for j, i in enumerate(mono):
            de = model.structure[i - 1]
            if not de:
                continue
            left = Form(n, {mono[:j]: 1})
            right = Form(n, {mono[j + 1:]: 1})
            term = wedge(wedge(left, de), right)
            out = out + term * (c if j % 2 == 0 else -c)
    return out


@lru_cache(maxsize=None)
def d_matrix(model: SymplecticModel, k: int) -> RationalMatrix:
    """d: Omega^k -> Omega^{k+1} in monomial bases (empty shapes outside range)."""
    return operator_matrix(model.n, k, k + 1, lambda f: ce_differential(model, f))


# -- validation ---------------------------------------------------------------


@dataclass
class CheckResult:
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    model_name: str
    checks: dict[str, CheckResult] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_dict(self) -> dict:
        return {
            name: {"passed": c.passed, "detail": c.detail} for name, c in self.checks.items()
        }


def _power(f, a: Form, times: int) -> Form:
    for _ in range(times):
        a = f(a)
    return a


def _sl2_calibration(model: SymplecticModel) -> CheckResult:
    n = model.n
    pi = Bivector.from_omega(model.omega)

    def L(a):
        return wedge(model.omega, a)

    def Lam(a):
        return contract(pi, a)

    def H(a):
        return sum((a.component(k) * (n - k) for k in range(2 * n + 1)), Form.zero(n))

    for k in range(2 * n + 1):
        for mono in monomial_basis(n, k):
            a = Form(n, {mono: 1})
            if Lam(L(a)) - L(Lam(a)) != H(a):
                return CheckResult(False, f"[Lambda, L] != H on {a!r}")
            if H(L(a)) - L(H(a)) != L(a) * -2:
                return CheckResult(False, f"[H, L] != -2L on {a!r}")
            if H(Lam(a)) - Lam(H(a)) != Lam(a) * 2:
                return CheckResult(False, f"[H, Lambda] != 2 Lambda on {a!r}")
    return CheckResult(True)


def validate(model: SymplecticModel) -> ValidationReport:
    n = model.n
    report = ValidationReport(model.name)
    checks = report.checks

    bad_degree = [i + 1 for i, f in enumerate(model.structure) if f and f.degrees() != [2]]
    checks["structure_degree"] = CheckResult(
        not bad_degree, f"d e^i not a 2-form for i in {bad_degree}" if bad_degree else ""
    )

    failures = []
    for i in range(1, 2 * n + 1):
        dd = ce_differential(model, ce_differential(model, Form(n, {(i,): 1})))
        if dd:
            failures.append(f"d(d e^{i}) = {dd!r}")
    checks["d_squared_zero"] = CheckResult(not failures, "; ".join(failures))

    d_omega = ce_differential(model, model.omega)
    checks["omega_closed"] = CheckResult(not d_omega, "" if not d_omega else f"d omega = {d_omega!r}")

    top = Form.constant(n)
    for _ in range(n):
        top = wedge(top, model.omega)
    checks["omega_nondegenerate"] = CheckResult(
        bool(top), f"omega^n = {top!r}"
    )

    # Integration by parts needs the integral of every exact top form to vanish.
    leaks = [
        m for m in monomial_basis(n, 2 * n - 1)
        if integrate(ce_differential(model, Form(n, {m: 1})))
    ]
    checks["unimodular"] = CheckResult(not leaks, f"integral of d e^{leaks[0]} != 0" if leaks else "")

    if checks["omega_nondegenerate"].passed and omega_matrix(model.omega).rank == 2 * n:
        checks["sl2_calibration"] = _sl2_calibration(model)
    else:
        checks["sl2_calibration"] = CheckResult(False, "omega is degenerate")
    return report


# -- catalog ------------------------------------------------------------------


def catalog() -> list[str]:
    files = resources.files("leflab").joinpath("models")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


@lru_cache(maxsize=None)
def builtin(name: str) -> SymplecticModel:
    if name not in catalog():
        raise UnknownModel(name)
    text = resources.files("leflab").joinpath("models", f"{name}.json").read_text()
    model = parse_model(text, name=name)
    report = validate(model)
    if not report.ok:
        raise InvalidModel(report)
    return model


def load_model(spec: str) -> SymplecticModel:
    """Catalog name or path to a model file. File models are parsed, not validated."""
    if spec in catalog():
        return builtin(spec)
    path = Path(spec)
    if not path.is_file():
        raise UnknownModel(spec)
    return parse_model(path.read_text(), name=path.stem)


# -- de Rham cohomology -------------------------------------------------------


@dataclass(frozen=True)
class DeRhamSummary:
    betti: tuple[int, ...]
    representatives: tuple[tuple[Form, ...], ...]


def closed_forms(model: SymplecticModel, k: int) -> SubspaceBasis:
    return kernel(d_matrix(model, k))


def exact_forms(model: SymplecticModel, k: int) -> SubspaceBasis:
    return SubspaceBasis.spanned_by(space_dim(model.n, k), d_matrix(model, k - 1).columns())


@lru_cache(maxsize=None)
def derham_space(model: SymplecticModel, k: int) -> Quotient:
    """H^k as closed / exact forms in the monomial coordinates of Omega^k."""
    return Quotient(closed_forms(model, k), exact_forms(model, k))


def derham(model: SymplecticModel) -> DeRhamSummary:
    n = model.n
    spaces = [derham_space(model, k) for k in range(2 * n + 1)]
    return DeRhamSummary(
        betti=tuple(h.dim for h in spaces),
        representatives=tuple(
            tuple(Form.from_vector(n, k, v) for v in h.representatives)
            for k, h in enumerate(spaces)
        ),
    )
