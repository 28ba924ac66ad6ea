"""Randomized law suites shared by the fuzz command and the acceptance tests.

Every check takes a ``Calculus`` so a deliberately mis-normalised Lambda can be
fed through the same code path. A law returns ``None`` when it holds and a
JSON-ready witness dict when it does not.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .cohomology import build_filtered_complex
from .duality import product_support_test, stokes_check
from .exterior import Form
from .sampling import random_form, random_vector_in
from .sl2ops import Calculus, DecompositionError

MAX_WITNESSES = 3


@dataclass
class LawOutcome:
    name: str
    checked: int = 0
    failures: int = 0
    witnesses: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, witness: dict | None) -> None:
        self.checked += 1
        if witness is not None:
            self.failures += 1
            if len(self.witnesses) < MAX_WITNESSES:
                self.witnesses.append(witness)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "checked": self.checked,
            "failures": self.failures,
            "passed": self.passed,
            "witnesses": self.witnesses,
        }


def _witness(a: Form, **values) -> dict:
    return {"form": repr(a), "degree": a.degree, **{k: repr(v) for k, v in values.items()}}


def commutator_lambda_l(calc: Calculus, a: Form):
    lhs = calc.Lambda(calc.L(a)) - calc.L(calc.Lambda(a))
    rhs = calc.H(a)
    return None if lhs == rhs else _witness(a, lhs=lhs, rhs=rhs)


def commutator_h_l(calc: Calculus, a: Form):
    lhs = calc.H(calc.L(a)) - calc.L(calc.H(a))
    rhs = calc.L(a) * -2
    return None if lhs == rhs else _witness(a, lhs=lhs, rhs=rhs)


def commutator_h_lambda(calc: Calculus, a: Form):
    lhs = calc.H(calc.Lambda(a)) - calc.Lambda(calc.H(a))
    rhs = calc.Lambda(a) * 2
    return None if lhs == rhs else _witness(a, lhs=lhs, rhs=rhs)


def weight(calc: Calculus, a: Form):
    k = a.degree
    if k is None:
        return None
    return None if calc.H(a) == a * (calc.n - k) else _witness(a, H=calc.H(a))


def pi_plus_lowered(calc: Calculus, a: Form):
    """Pi^p + L^{p+1} L^{-p-1} = 1 for every p <= n."""
    for p in range(calc.n + 1):
        back = calc.L_power(calc.l_inverse(a, p + 1), p + 1)
        total = calc.pi_p(a, p) + back
        if total != a:
            return _witness(a, p=p, total=total)
    return None


def star_involution(calc: Calculus, a: Form):
    twice = calc.star_r(calc.star_r(a))
    return None if twice == a else _witness(a, star_star=twice)


def star_is_signed_power(calc: Calculus, a: Form):
    k = a.degree
    if k is None:
        return None
    lhs = calc.star_r(a)
    rhs = calc.l_signed_power(a, calc.n - k)
    return None if lhs == rhs else _witness(a, star=lhs, power=rhs)


def decomposition_round_trip(calc: Calculus, a: Form):
    comps = calc.lefschetz_decompose(a)
    back = comps.reconstruct(calc)
    if back != a:
        return _witness(a, reconstructed=back)
    for l, b in comps.components.items():
        if calc.Lambda(b):
            return _witness(a, l=l, nonprimitive_component=b)
    return None


def criteria_agree(calc: Calculus, a: Form):
    """Primitivity and p-filteredness: kernel of Lambda^{p+1} vs of L^{n-k+1+p}."""
    k = a.degree
    if k is None:
        return None
    n = calc.n
    samples = [a]
    if k <= n:
        rng = random.Random(repr(a))
        b = Form.from_vector(n, k, random_vector_in(calc.primitive_basis(k), rng))
        samples.append(b)
    try:
        for f in samples:
            if k <= n:
                calc.is_primitive(f)
            for p in range(max(0, k - n), n + 1):
                calc.is_p_filtered(f, p)
    except DecompositionError as exc:
        return _witness(a, error=str(exc))
    return None


OPERATOR_LAWS: dict[str, Callable] = {
    "sl2 [Lambda,L]=H": commutator_lambda_l,
    "sl2 [H,L]=-2L": commutator_h_l,
    "sl2 [H,Lambda]=2Lambda": commutator_h_lambda,
    "H weight n-k": weight,
    "Pi^p + L^(p+1) L^-(p+1) = 1": pi_plus_lowered,
    "*_r involution": star_involution,
    "*_r = L^(n-k)": star_is_signed_power,
    "Lefschetz round trip": decomposition_round_trip,
    "criteria (i)<=>(ii)": criteria_agree,
}


def random_forms(n: int, trials: int, rng: random.Random) -> list[Form]:
    return [random_form(n, rng.randint(0, 2 * n), rng) for _ in range(trials)]


def operator_law_suite(calc: Calculus, trials: int, seed: int) -> list[LawOutcome]:
    rng = random.Random(seed)
    forms = random_forms(calc.n, trials, rng)
    out = []
    for name, law in OPERATOR_LAWS.items():
        outcome = LawOutcome(name)
        for a in forms:
            outcome.record(law(calc, a))
        out.append(outcome)
    return out


def complex_suite(calc: Calculus, trials: int, seed: int) -> list[LawOutcome]:
    """d d = 0 on random cochains of every filtered complex."""
    rng = random.Random(seed)
    model = calc.model
    outcome = LawOutcome("filtered d^2 = 0")
    for p in range(model.n + 1):
        try:
            c = build_filtered_complex(model, p, calc)
        except Exception as exc:  # a broken calculus can make the complex itself fail
            outcome.record({"p": p, "error": f"{type(exc).__name__}: {exc}"})
            continue
        for _ in range(max(1, trials // (model.n + 1))):
            k = rng.randrange(c.length - 2) if c.length > 2 else 0
            x = random_vector_in(c.spaces[k], rng)
            ddx = c.operator(k + 1).apply(c.operator(k).apply(x))
            outcome.record(None if not any(ddx) else {
                "p": p, "k": k, "x": [str(t) for t in x], "ddx": [str(t) for t in ddx]
            })
    return [outcome]


def stokes_suite(calc: Calculus, trials: int, seed: int) -> list[LawOutcome]:
    rng = random.Random(seed)
    outcome = LawOutcome("theta(d x) = 0")
    for p in range(calc.n + 1):
        failures = stokes_check(calc.model, p, trials, rng)
        for _ in range(trials - len(failures)):
            outcome.record(None)
        for f in failures:
            outcome.record({"p": p, **f})
    return [outcome]


def support_suite(calc: Calculus, trials: int, seed: int) -> list[LawOutcome]:
    res = product_support_test(calc.model, trials, seed)
    outcome = LawOutcome("product support")
    for _ in range(trials - len(res["counterexamples"])):
        outcome.record(None)
    for w in res["counterexamples"]:
        outcome.record(w)
    return [outcome]


def all_suites(calc: Calculus, trials: int, seed: int) -> list[LawOutcome]:
    return (
        operator_law_suite(calc, trials, seed)
        + complex_suite(calc, trials, seed + 1)
        + stokes_suite(calc, max(1, trials // 4), seed + 2)
        + support_suite(calc, trials, seed + 3)
    )


def mutated_calculus(model, kind: str) -> Calculus:
    """Calculus with a wrong Lambda normalisation: 'sign' flips it, 'half' drops the 1/2."""
    scales = {"sign": Fraction(-1, 2), "half": Fraction(1)}
    return Calculus(model, lambda_scale=scales[kind])
