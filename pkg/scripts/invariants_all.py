"""Run the grading invariant suite for every root system through rank 8.

Weyl-group checks run where |W| is at most --weyl-limit (60000 by default,
so through E6); the root-table checks run everywhere, E8 included.
"""

import argparse
import time

from wengzeta.invariants import WEYL_SUITE_LIMIT, invariants_suite
from wengzeta.rootsys import all_specs, build_root_system


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-rank", type=int, default=8)
    ap.add_argument("--weyl-limit", type=int, default=WEYL_SUITE_LIMIT)
    ap.add_argument("-v", "--verbose", action="store_true", help="print every check")
    args = ap.parse_args()

    start = time.perf_counter()
    failed = 0
    for spec in all_specs(args.max_rank):
        rs = build_root_system(spec)
        t0 = time.perf_counter()
        skipped = bad = 0
        for p in range(1, rs.rank + 1):
            rep = invariants_suite(rs, p, weyl_limit=args.weyl_limit)
            skipped += sum(r.skipped for r in rep.results)
            if not rep.ok:
                bad += 1
            if args.verbose or not rep.ok:
                print(rep.text())
        print(f"{spec.label:4} {'ok' if not bad else 'FAIL'}  skipped {skipped:3}  {time.perf_counter() - t0:.1f}s", flush=True)
        failed += bad
    print(f"{failed} failing suites, {time.perf_counter() - start:.1f}s total")
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
