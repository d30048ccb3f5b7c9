"""Scan the critical line of the known-RH cases and compare with box counts.

    python scripts/zero_scan.py                # A1 A2 A3 C2 G2, every p
    python scripts/zero_scan.py B3 --t-max 40 --csv-dir out/
    python scripts/zero_scan.py A1 --t-max 120 --fit   # N(T) ~ C1 T log T + C2 T + C3
"""

import argparse
import time
from pathlib import Path

from wengzeta.grading import build_grading
from wengzeta.numerics import density_fit, scan_zeros_on_line, zeros_csv
from wengzeta.rootsys import RootSystemSpec, build_root_system
from wengzeta.symbolic import build_XEQD
from wengzeta.weyl import compute_frak_Wp, enumerate_weyl


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("labels", nargs="*", default=["A1", "A2", "A3", "C2", "G2"])
    ap.add_argument("--t-max", type=float, default=None, help="default 60 for A1, 30 otherwise")
    ap.add_argument("--csv-dir", type=Path)
    ap.add_argument("--fit", action="store_true", help="least-squares zero-density constants per case")
    args = ap.parse_args()

    print(f"{'case':8} {'c_p':>4} {'line':>5} {'box':>5} {'max re_dev':>11} {'max resid':>10} simple  secs")
    for label in args.labels:
        rs = build_root_system(RootSystemSpec.parse(label))
        group = enumerate_weyl(rs)
        t_max = args.t_max or (60.0 if label == "A1" else 30.0)
        for p in range(1, rs.rank + 1):
            rec = build_XEQD(rs, group, compute_frak_Wp(group, rs, p), build_grading(rs, p))
            t0 = time.perf_counter()
            rep = scan_zeros_on_line(rec, t_max, rectangle=True)
            dt = time.perf_counter() - t0
            re_dev = max((z.re_deviation for z in rep.zeros), default=0.0)
            resid = max((z.residual for z in rep.zeros), default=0.0)
            simple = all(z.simple for z in rep.zeros)
            print(f"{label} p={p:<3} {rec.c:>4} {rep.line_count:>5} {rep.rectangle_count:>5} "
                  f"{re_dev:>11.1e} {resid:>10.1e} {str(simple):6} {dt:5.1f}")
            if args.fit and rep.line_count >= 4:
                c1, c2, c3 = density_fit(rep.ordinates())
                print(f"         fit C1={c1:.4f} C2={c2:.4f} C3={c3:.3f}")
            if args.csv_dir:
                args.csv_dir.mkdir(parents=True, exist_ok=True)
                (args.csv_dir / f"{label}_p{p}.csv").write_text(zeros_csv(rep))


if __name__ == "__main__":
    main()
