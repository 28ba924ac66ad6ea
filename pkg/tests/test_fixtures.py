"""Byte-for-byte comparison of package tables against frozen oracle output."""

from pathlib import Path

import pytest

from leflab.cohomology import (
    d_lambda,
    filtered_dims,
    h_d_plus_dlambda,
    h_ddlambda,
    primitive_cohomologies,
)
from leflab.duality import frobenius_report
from leflab.exterior import Form, monomial_basis, volume
from leflab.model import builtin, derham
from oracle import FIXTURE_MODELS, canonical_dumps

FIXTURES = Path(__file__).parent / "fixtures"


def _labels(f: Form) -> dict[str, str]:
    return {"".join(map(str, m)): str(c) for m, c in f.items()}


def package_tables(name: str) -> dict:
    m = builtin(name)
    n = m.n
    ph = primitive_cohomologies(m)
    return {
        "model": name,
        "betti": list(derham(m).betti),
        "filtered": {str(p): list(filtered_dims(m, p)) for p in range(n + 1)},
        "H_d+dLambda": [h.dim for h in h_d_plus_dlambda(m)],
        "H_ddLambda": [h.dim for h in h_ddlambda(m)],
        "PH_d+dLambda": [h.dim for h in ph["d+dLambda"]],
        "PH_ddLambda": [h.dim for h in ph["ddLambda"]],
        "frobenius_signs": {
            str(p): {str(r["k"]): r["sign"] for r in frobenius_report(m, p)}
            for p in range(n + 1)
        },
        "d_lambda_volume": _labels(d_lambda(m, volume(n))),
        "d_lambda_on_3_forms": {
            "".join(map(str, mono)): _labels(d_lambda(m, Form(n, {mono: 1})))
            for mono in monomial_basis(n, 3)
        },
    }


@pytest.mark.parametrize("name", FIXTURE_MODELS)
def test_tables_match_frozen_fixture(name):
    frozen = (FIXTURES / f"{name}.json").read_bytes()
    assert canonical_dumps(package_tables(name)).encode() == frozen


def test_kt_d_lambda_fixture_content():
    import json

    data = json.loads((FIXTURES / "kodaira_thurston.json").read_text())
    assert data["d_lambda_volume"] == {}
    assert data["d_lambda_on_3_forms"]["234"] == {"12": "1"}
    assert data["frobenius_signs"]["0"] == {"0": 1, "1": -1, "2": 1}
