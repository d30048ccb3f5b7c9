"""Exact symbolic checks over a set of root systems.

For each (Phi, p): the functional equation of zhat_p, the termwise pairing,
the E_p reconstruction of X_p, the quotient identity, the degree gap, the
leading constant against the Levi residue, and the zhat(n) multiplier
against a brute-force maximum.

    python scripts/symbolic_sweep.py             # rank <= 4 plus F4 and G2
    python scripts/symbolic_sweep.py A5 --skip-slow
"""

import argparse
import time

from wengzeta.grading import build_grading
from wengzeta.rootsys import RootSystemSpec, all_specs, build_root_system
from wengzeta.symbolic import (
    M0_bruteforce,
    build_XEQD,
    check_functional_equation,
    degree_gap_check,
    lemma_10_3_constant,
    levi_residue_oracle,
    omega_p,
    quotient_identity_holds,
    reconstruction_holds,
    termwise_pairing,
    zhat_p,
)
from wengzeta.weyl import compute_frak_Wp, enumerate_weyl


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("labels", nargs="*")
    ap.add_argument("--skip-slow", action="store_true", help="skip the reconstruction check (slow from rank 4)")
    args = ap.parse_args()
    labels = args.labels or [s.label for s in all_specs(4)] + ["F4"]

    start = time.perf_counter()
    all_ok = True
    for label in labels:
        rs = build_root_system(RootSystemSpec.parse(label))
        group = enumerate_weyl(rs)
        for p in range(1, rs.rank + 1):
            t0 = time.perf_counter()
            pd, t = compute_frak_Wp(group, rs, p), build_grading(rs, p)
            z = zhat_p(rs, t, omega_p(rs, group, pd, t), details=True)
            rec = build_XEQD(rs, group, pd, t)
            row = {
                "FE": check_functional_equation(z.expr, t.c_p, 1).ok,
                "pairing": termwise_pairing(rec)[0],
                "quotient": quotient_identity_holds(rec),
                "gap": degree_gap_check(rec),
                "constant": lemma_10_3_constant(rs, group, pd) == levi_residue_oracle(rs, group, pd),
                "M0": z.M0 == M0_bruteforce(rs, group, pd),
            }
            if not args.skip_slow:
                row["reconstruction"] = reconstruction_holds(rec)
            all_ok &= all(row.values())
            flags = " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in row.items())
            print(f"{label} p={p} terms={len(z.expr):<4} {flags}  {time.perf_counter() - t0:.2f}s", flush=True)
    print(f"{'all ok' if all_ok else 'FAILURES'} in {time.perf_counter() - start:.1f}s")
    raise SystemExit(0 if all_ok else 1)


if __name__ == "__main__":
    main()
