"""Seeded random forms with small integer coefficients."""

from __future__ import annotations

import random
from fractions import Fraction

from .exactlinalg import SubspaceBasis, Vector, combine
from .exterior import Form, monomial_basis


def random_coefficients(rng: random.Random, size: int, density: float = 0.6, bound: int = 3) -> list[Fraction]:
    return [
        Fraction(rng.randint(-bound, bound)) if rng.random() < density else Fraction(0)
        for _ in range(size)
    ]


def random_form(n: int, k: int, rng: random.Random, density: float = 0.6) -> Form:
    basis = monomial_basis(n, k)
    coeffs = random_coefficients(rng, len(basis), density)
    return Form(n, dict(zip(basis, coeffs)))


def random_mixed_form(n: int, rng: random.Random) -> Form:
    out = Form.zero(n)
    for k in range(2 * n + 1):
        if rng.random() < 0.5:
            out = out + random_form(n, k, rng, density=0.4)
    return out


def random_vector_in(basis: SubspaceBasis, rng: random.Random) -> Vector:
    coeffs = random_coefficients(rng, basis.dim, density=0.7)
    return combine(coeffs, basis.vectors, basis.ambient_dim)
