from functools import lru_cache

from wengzeta.grading import build_grading
from wengzeta.rootsys import RootSystemSpec, build_root_system
from wengzeta.symbolic import build_XEQD, omega_p, zhat_p
from wengzeta.weyl import compute_frak_Wp, enumerate_weyl


# Building Weyl groups and XEQD records is the slow part of most tests, so
# every builder is memoised per process.


@lru_cache(maxsize=None)
def rs_of(label):
    return build_root_system(RootSystemSpec.parse(label))


@lru_cache(maxsize=None)
def group_of(label):
    return enumerate_weyl(rs_of(label))


@lru_cache(maxsize=None)
def pd_of(label, p):
    return compute_frak_Wp(group_of(label), rs_of(label), p)


@lru_cache(maxsize=None)
def tables_of(label, p):
    return build_grading(rs_of(label), p)


@lru_cache(maxsize=None)
def zhat_of(label, p):
    rs, t = rs_of(label), tables_of(label, p)
    return zhat_p(rs, t, omega_p(rs, group_of(label), pd_of(label, p), t))


@lru_cache(maxsize=None)
def record_of(label, p):
    return build_XEQD(rs_of(label), group_of(label), pd_of(label, p), tables_of(label, p))


def cases(labels):
    """(label, p) for every p of every label."""
    return [(lab, p) for lab in labels for p in range(1, int(lab[1:]) + 1)]


# rank <= 4 plus F4 and G2, the symbolic sweep set
SWEEP = ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "F4", "G2"]


# criterion number -> (ok, detail); filled by test_acceptance, printed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
