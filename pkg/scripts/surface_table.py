#!/usr/bin/env python3
"""Print the invariant affine fields of every cataloged flat affine surface.

    python scripts/surface_table.py            # plain table
    python scripts/surface_table.py --markdown
"""
import argparse
import time

from flataffine.deck import catalog_keys, surface_catalog


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--markdown", action="store_true")
    ap.add_argument("--include-example", action="store_true")
    args = ap.parse_args()

    rows = []
    for key in catalog_keys(args.include_example):
        entry = surface_catalog(key)
        t0 = time.perf_counter()
        basis = entry.invariant_basis()
        rows.append((key, str(entry.domain), len(basis), entry.expected_dim,
                     ", ".join(str(X) for X in basis), time.perf_counter() - t0))

    if args.markdown:
        print("| surface | domain | dim | expected | basis |")
        print("|---|---|---|---|---|")
        for key, dom, dim, exp, basis, _ in rows:
            print(f"| {key} | {dom} | {dim} | {exp} | {basis} |")
    else:
        for key, dom, dim, exp, basis, dt in rows:
            flag = "" if dim == exp else "  <-- MISMATCH"
            print(f"{key:<14}{dom:<16}{dim} (exp {exp})  {dt * 1e3:6.1f} ms  {basis}{flag}")
    bad = sum(r[2] != r[3] for r in rows)
    print(f"\n{len(rows)} surfaces, {bad} mismatches")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
