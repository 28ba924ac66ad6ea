"""Print the cohomology tables of every catalog model (or the ones named)."""

import argparse
import time

from leflab.cohomology import filtered_dims, h_d_plus_dlambda, h_ddlambda, strong_lefschetz
from leflab.model import builtin, catalog, derham


def row(label: str, values) -> str:
    return f"  {label:<16} {' '.join(f'{v:>2}' for v in values)}"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("models", nargs="*", default=catalog())
    args = ap.parse_args()
    for name in args.models:
        start = time.perf_counter()
        m = builtin(name)
        print(f"{name}  (n={m.n}, strong Lefschetz: {strong_lefschetz(m)})")
        print(row("betti", derham(m).betti))
        print(row("H_d+dLambda", [h.dim for h in h_d_plus_dlambda(m)]))
        print(row("H_ddLambda", [h.dim for h in h_ddlambda(m)]))
        for p in range(m.n + 1):
            print(row(f"F^{p}H", filtered_dims(m, p)))
        print(f"  [{time.perf_counter() - start:.2f}s]\n")


if __name__ == "__main__":
    main()
