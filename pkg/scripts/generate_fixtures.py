"""Regenerate tests/fixtures/*.json from the sympy oracle.

The fixtures are frozen: rerun this only when a model file changes, and
review the diff by hand.
"""

import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracle import FIXTURE_MODELS, Oracle, canonical_dumps, fixture_tables  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=ROOT / "tests" / "fixtures")
    ap.add_argument("models", nargs="*", default=list(FIXTURE_MODELS))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.models:
        text = canonical_dumps(fixture_tables(Oracle.builtin(name), name))
        path = args.out / f"{name}.json"
        path.write_text(text)
        print(f"wrote {path.relative_to(ROOT)}")


if __name__ == "__main__":
    main()
