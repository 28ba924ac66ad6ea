"""Command-line front end.

Exit codes: 0 when every verdict passes, 1 when a verdict fails, 2 on usage
errors (bad arguments, unknown model, p out of range), 3 when the model file
does not parse or fails validation.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .cohomology import (
    ComplexPropertyViolation,
    NotFiltered,
    build_filtered_complex,
    h_d_plus_dlambda,
    h_ddlambda,
    lefschetz_decomp_check,
    primitive_cohomologies,
    resolution_check,
    strong_lefschetz_witness,
)
from .duality import (
    PairingReport,
    admissible_diagram_pairs,
    d_block_decomposition,
    dd_pairing,
    dd_pairing_swapped,
    diagram_check,
    frobenius_report,
    g_pairing,
    phi_duality_check,
    product_support_test,
    stokes_check,
)
from .exactlinalg import RationalMatrix
from .exterior import Form
from .laws import all_suites, mutated_calculus
from .model import (
    InvalidModel,
    ModelSyntaxError,
    SymplecticModel,
    UnknownModel,
    derham,
    load_model,
    validate,
)
from .sl2ops import Calculus

SCHEMA = "leflab.report/1"

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INVALID = 0, 1, 2, 3


class UsageError(Exception):
    pass


def jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, RationalMatrix):
        return [[str(v) for v in row] for row in x.to_rows()]
    if isinstance(x, PairingReport):
        return jsonable(x.to_dict())
    if isinstance(x, Form):
        return repr(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


@dataclass
class Report:
    command: str
    model: SymplecticModel
    args: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)

    def verdict(self, name: str, passed: bool, witness=None) -> None:
        entry = {"name": name, "passed": bool(passed)}
        if not passed:
            entry["witness"] = jsonable(witness) if witness is not None else "no witness recorded"
        self.verdicts.append(entry)

    @property
    def ok(self) -> bool:
        return all(v["passed"] for v in self.verdicts)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "tool_version": __version__,
            "command": self.command,
            "args": jsonable(self.args),
            "model": {
                "name": self.model.name,
                "n": self.model.n,
                "fingerprint": self.model.fingerprint(),
            },
            "tables": jsonable(self.tables),
            "verdicts": self.verdicts,
            "ok": self.ok,
        }


def worker_count() -> int:
    raw = os.environ.get("LEFLAB_THREADS", "")
    try:
        value = int(raw)
    except ValueError:
        value = os.cpu_count() or 1
    return max(1, value)


def parallel_map(fn, items):
    """Ordered map over items using at most LEFLAB_THREADS workers."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def p_values(model: SymplecticModel, p: int | None) -> list[int]:
    if p is None:
        return list(range(model.n + 1))
    if not 0 <= p <= model.n:
        raise UsageError(f"-p must lie in 0..{model.n} for {model.name} (n={model.n}), got {p}")
    return [p]


# -- commands -------------------------------------------------------------------


def cmd_check(model, args, report: Report):
    vr = validate(model)
    report.tables["validation"] = vr.to_dict()
    report.tables["canonical"] = model.canonical()
    for name, c in vr.checks.items():
        report.verdict(f"valid: {name}", c.passed, c.detail)
    return vr.ok


def cmd_betti(model, args, report: Report):
    summary = derham(model)
    report.tables["betti"] = list(summary.betti)
    report.tables["representatives"] = [list(reps) for reps in summary.representatives]
    witness = strong_lefschetz_witness(model)
    report.tables["strong_lefschetz"] = {
        "holds": witness is None,
        "witness": None if witness is None else {"degree": witness[0], "class": witness[1]},
    }


def _filtered_for_p(model, p):
    try:
        c = build_filtered_complex(model, p)
    except (ComplexPropertyViolation, NotFiltered) as exc:
        return p, None, f"{type(exc).__name__}: {exc}"
    return p, c, phi_duality_check(c)


def cmd_filtered(model, args, report: Report):
    dims = {}
    for p, c, phi in parallel_map(lambda p: _filtered_for_p(model, p), p_values(model, args.p)):
        if c is None:
            report.verdict(f"p={p}: filtered complex with d^2 = 0", False, phi)
            continue
        dims[f"p={p}"] = {"complex": list(c.dims()), "cohomology": phi["dims"]}
        report.verdict(f"p={p}: filtered complex with d^2 = 0", True)
        bad = [k for k in range(c.length) if phi["dims"][k] != phi["dims"][c.bar(k)]]
        report.verdict(f"p={p}: dim F^pH^k = dim F^pH^(2n+2p+1-k)", phi["palindromic"],
                       {"dims": phi["dims"], "asymmetric_k": bad})
        for row in phi["pairings"]:
            report.verdict(f"p={p}: g nondegenerate at k={row['k']}", row["nondegenerate"], row)
    report.tables["filtered"] = dims


def cmd_ddl(model, args, report: Report):
    report.tables["H_d+dLambda"] = [h.dim for h in h_d_plus_dlambda(model)]
    report.tables["H_ddLambda"] = [h.dim for h in h_ddlambda(model)]
    report.tables["PH"] = {k: [h.dim for h in v] for k, v in primitive_cohomologies(model).items()}
    rows = lefschetz_decomp_check(model)
    report.tables["lefschetz_decomposition"] = rows
    for row in rows:
        report.verdict(f"{row['theory']}: Lefschetz decomposition at k={row['k']}",
                       row["passed"], row)


def _duality_for_p(model, p, seed):
    c = build_filtered_complex(model, p)
    phi = phi_duality_check(c, seed=seed)
    gs = [g_pairing(c, k) for k in range(model.n + p + 1)]
    frob = frobenius_report(model, p)
    stokes = stokes_check(model, p, 25, random.Random(seed + p))
    return p, phi, gs, frob, stokes


def cmd_duality(model, args, report: Report):
    n = model.n
    results = parallel_map(lambda p: _duality_for_p(model, p, args.seed), p_values(model, args.p))
    for p, phi, gs, frob, stokes in results:
        report.tables[f"p={p}"] = {
            "dims": phi["dims"],
            "g": gs,
            "adjoint_signs": phi["adjoint_signs"],
            "frobenius_signs": {row["k"]: row["sign"] for row in frob},
        }
        report.verdict(f"p={p}: dimension symmetry", phi["palindromic"], phi["dims"])
        for g in gs:
            report.verdict(f"p={p}: g nondegenerate at k={g.left['degree']}", g.nondegenerate, g)
        report.verdict(f"p={p}: coboundaries pair to zero", phi["coboundary_annihilation"])
        report.verdict(f"p={p}: d adjoint up to sign", phi["adjointness"], phi["adjoint_signs"])
        report.verdict(f"p={p}: theta(d x) = 0", not stokes, stokes[:3])
    dd = {}
    for k in range(2 * n + 1):
        D, Ds = dd_pairing(model, k), dd_pairing_swapped(model, k)
        dd[k] = {"D": D, "D_swapped": Ds}
        report.verdict(f"D well defined at k={k}", D.extra["well_defined"] and Ds.extra["well_defined"])
        report.verdict(f"D nondegenerate at k={k}", D.nondegenerate, D)
        report.verdict(f"swapped D nondegenerate at k={k}", Ds.nondegenerate, Ds)
        blocks = d_block_decomposition(model, k)
        report.verdict(f"D block diagonal, blocks full rank at k={k}", blocks["passed"], blocks)
    report.tables["D"] = dd
    support = product_support_test(model, 100, args.seed)
    report.verdict("product support law", support["passed"], support["counterexamples"][:3])


def cmd_resolution(model, args, report: Report):
    table = {}
    for p, rows in parallel_map(lambda p: (p, resolution_check(model, p)), p_values(model, args.p)):
        table[f"p={p}"] = rows
        for row in rows:
            report.verdict(f"p={p} k={row['k']} sequence {row['sequence']}", row["passed"], row)
    report.tables["resolution"] = table


def cmd_diagram(model, args, report: Report):
    rows = parallel_map(lambda kr: diagram_check(model, *kr), admissible_diagram_pairs(model.n))
    report.tables["diagram"] = rows
    for row in rows:
        report.verdict(f"diagram commutes at k={row['k']} r={row['r']}", row["passed"], row)


def cmd_fuzz(model, args, report: Report):
    calc = mutated_calculus(model, args.mutate_lambda) if args.mutate_lambda else Calculus(model)
    report.args["mutate_lambda"] = args.mutate_lambda
    outcomes = all_suites(calc, args.trials, args.seed)
    report.tables["laws"] = [o.to_dict() for o in outcomes]
    for o in outcomes:
        report.verdict(f"law: {o.name}", o.passed, o.witnesses)


def cmd_report(model, args, report: Report):
    args.p = None
    for fn in (cmd_check, cmd_betti, cmd_filtered, cmd_ddl, cmd_duality, cmd_resolution,
               cmd_diagram, cmd_fuzz):
        fn(model, args, report)


COMMANDS = {
    "check": (cmd_check, "validate a model"),
    "betti": (cmd_betti, "de Rham Betti numbers and strong Lefschetz"),
    "filtered": (cmd_filtered, "filtered cohomology F^pH and its duality verdicts"),
    "ddl": (cmd_ddl, "(d + d^Lambda) and dd^Lambda cohomologies with Lefschetz checks"),
    "duality": (cmd_duality, "pairings g, D, Frobenius signs and the support law"),
    "resolution": (cmd_resolution, "exact sequences through the Lefschetz map"),
    "diagram": (cmd_diagram, "commutativity of the D / Phi diagram"),
    "fuzz": (cmd_fuzz, "seeded randomized law suites"),
    "report": (cmd_report, "everything"),
}
WITH_P = {"filtered", "duality", "resolution"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("model", help="catalog name or path to a model JSON file")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="leflab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"leflab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if name in WITH_P:
            sp.add_argument("-p", type=int, default=None, help="filtration index (default: all)")
        if name in ("fuzz", "report"):
            sp.add_argument("--trials", type=int, default=100)
            sp.add_argument("--mutate-lambda", choices=["sign", "half"], default=None,
                            help=argparse.SUPPRESS)
    return parser


def render_text(report: Report) -> str:
    d = report.to_dict()
    lines = [f"{d['command']} {d['model']['name']} (n={d['model']['n']}, "
             f"fingerprint {d['model']['fingerprint'][:12]})"]
    for name, value in d["tables"].items():
        if name in ("representatives", "canonical", "validation", "laws", "D", "diagram",
                    "resolution", "lefschetz_decomposition") or name.startswith("p="):
            continue
        lines.append(f"  {name}: {json.dumps(value)}")
    for v in d["verdicts"]:
        mark = "PASS" if v["passed"] else "FAIL"
        lines.append(f"  [{mark}] {v['name']}")
        if not v["passed"]:
            lines.append(f"         witness: {json.dumps(v['witness'])[:400]}")
    passed = sum(v["passed"] for v in d["verdicts"])
    lines.append(f"  {passed}/{len(d['verdicts'])} verdicts pass")
    return "\n".join(lines)


def _error(kind: str, message: str, as_json: bool, code: int, **extra) -> int:
    if as_json:
        payload = {"schema": SCHEMA, "tool_version": __version__,
                   "error": {"kind": kind, "message": message, **jsonable(extra)}}
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"leflab: {kind}: {message}", file=sys.stderr)
    return code


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    as_json = args.json
    if getattr(args, "trials", 1) < 1:
        return _error("usage", "--trials must be positive", as_json, EXIT_USAGE)
    try:
        model = load_model(args.model)
    except UnknownModel:
        return _error("usage", f"unknown model {args.model!r} (not in catalog, not a file)",
                      as_json, EXIT_USAGE)
    except ModelSyntaxError as exc:
        return _error("model-syntax", str(exc), as_json, EXIT_INVALID,
                      line=exc.line, column=exc.column)
    except InvalidModel as exc:
        return _error("model-invalid", str(exc), as_json, EXIT_INVALID,
                      checks=exc.report.to_dict())
    if args.command != "check":
        vr = validate(model)
        if not vr.ok:
            return _error("model-invalid", str(InvalidModel(vr)), as_json, EXIT_INVALID,
                          checks=vr.to_dict())
    report = Report(args.command, model, {"seed": args.seed})
    if hasattr(args, "p"):
        report.args["p"] = args.p
    if hasattr(args, "trials"):
        report.args["trials"] = args.trials
    try:
        valid = COMMANDS[args.command][0](model, args, report)
    except UsageError as exc:
        return _error("usage", str(exc), as_json, EXIT_USAGE)
    if as_json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(render_text(report))
    if args.command == "check" and valid is False:
        return EXIT_INVALID
    return EXIT_OK if report.ok else EXIT_FAILED


def main() -> None:
    sys.exit(run())
