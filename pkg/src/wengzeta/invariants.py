"""Structural invariants of the lambda_p-grading, checked with witnesses.

Each check returns an InvariantResult. The ones marked ``needs_weyl`` look
at every element of frak W_p and are skipped when the Weyl group is too
large to enumerate; the rest only read the root table and run through E8.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .grading import GradingTables, build_grading, chain_decomposition, chain_violations, closed_form_M
from .rootsys import RootSystem, build_root_system, fundamental_weight, levi_positive
from .weyl import classical_order, compute_frak_Wp, enumerate_weyl, simple_reflection_perms

WEYL_SUITE_LIMIT = 60_000


@dataclass
class InvariantResult:
    name: str
    ok: bool
    witness: str | None = None
    skipped: bool = False

    def line(self) -> str:
        state = "skip" if self.skipped else "pass" if self.ok else "FAIL"
        tail = f"  [{self.witness}]" if self.witness else ""
        return f"{state:4}  {self.name}{tail}"


@dataclass
class SuiteReport:
    label: str
    p: int
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok or r.skipped for r in self.results)

    def failures(self) -> list:
        return [r for r in self.results if not r.ok and not r.skipped]

    def text(self) -> str:
        head = f"{self.label} p={self.p}: {'all pass' if self.ok else 'FAILURES'}"
        return "\n".join([head] + ["  " + r.line() for r in self.results])

    def to_obj(self) -> dict:
        return {
            "root_system": self.label,
            "p": self.p,
            "ok": self.ok,
            "results": [
                {"name": r.name, "ok": r.ok, "skipped": r.skipped, "witness": r.witness} for r in self.results
            ],
        }


def _result(name, witnesses) -> InvariantResult:
    return InvariantResult(name, not witnesses, witnesses[0] if witnesses else None)


def _digits(rs, i) -> str:
    return "".join(str(x) for x in rs.coroots[i])


def _pair(rs: RootSystem, beta, coroot) -> Fraction:
    """<beta, alpha^vee> for beta in simple-root coordinates and alpha^vee in simple-coroot ones."""
    return sum(Fraction(a) * rs.pairing_simple_coroot(beta, i) for i, a in enumerate(coroot))


def two_rho_p(rs: RootSystem, p: int) -> tuple[int, ...]:
    out = [0] * rs.rank
    for i in levi_positive(rs, p):
        for j, c in enumerate(rs.roots[i]):
            out[j] += c
    return tuple(out)


def levi_longest_perm(rs: RootSystem, p: int) -> np.ndarray:
    """Root permutation of the longest element w_p of W_p, built from a reduced word."""
    gens = simple_reflection_perms(rs)
    n = rs.n_pos
    perm = np.arange(rs.n_roots)
    while True:
        # right-multiply by s_j while that lengthens w (i.e. w(alpha_j) > 0)
        js = [j for j in range(rs.rank) if j != p - 1 and perm[rs.simple[j]] < n]
        if not js:
            return perm
        perm = perm[gens[js[0]]]


# ---------------------------------------------------------------------------
# root-table checks


def check_negative_pairing_lifts(t: GradingTables):
    rs, p = t.rs, t.p
    r2 = two_rho_p(rs, p)
    outside = {rs.coroots[i] for i in range(rs.n_pos) if rs.roots[i][p - 1] > 0}
    bad = []
    for i in range(rs.n_pos):
        if rs.roots[i][p - 1] == 0 or _pair(rs, r2, rs.coroots[i]) >= 0:
            continue
        lifts = [
            j for j in range(rs.rank)
            if j != p - 1 and tuple(c + (k == j) for k, c in enumerate(rs.coroots[i])) in outside
        ]
        if not lifts:
            bad.append(f"no Delta_p lift of {_digits(rs, i)}")
    return _result("negative rho_p pairing lifts by a Levi simple coroot", bad)


def check_N_symmetric_unimodal(t: GradingTables):
    bad = []
    ks = sorted({k for k, _ in t.N})
    for k in ks:
        top = k * t.c_p
        for h in range(0, top + 2):
            if t.n(k, h) != t.n(k, top - h):
                bad.append(f"N({k},{h})={t.n(k, h)} but N({k},{top - h})={t.n(k, top - h)}")
            if 2 * h + 1 <= top and t.n(k, h) > t.n(k, h + 1):
                bad.append(f"N({k},{h})={t.n(k, h)} > N({k},{h + 1})={t.n(k, h + 1)}")
    return _result("N_p(k,h) symmetric and unimodal", bad)


def check_injective_lifts(t: GradingTables):
    rs, p = t.rs, t.p
    bad = []
    for (k, h), members in t.sigma.items():
        if 2 * h + 1 > k * t.c_p:
            continue
        targets = list(t.sigma.get((k, h + 1), ()))
        pos = {rs.coroots[b]: n for n, b in enumerate(targets)}
        rows, cols = [], []
        for m, a in enumerate(members):
            for j in range(rs.rank):
                if j == p - 1:
                    continue
                up = tuple(c + (x == j) for x, c in enumerate(rs.coroots[a]))
                if up in pos:
                    rows.append(m)
                    cols.append(pos[up])
        graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(members), max(1, len(targets))))
        match = maximum_bipartite_matching(graph, perm_type="column")
        if (match < 0).any():
            bad.append(f"Sigma({k},{h}) has no injective lift into Sigma({k},{h + 1})")
    return _result("injective Levi lifts below the middle", bad)


def check_grading_range(t: GradingTables):
    present = sorted({k for k, _ in t.N})
    ok = present == list(range(1, t.k_p + 1))
    return _result("Sigma_p(k) nonempty exactly for 1<=k<=k_p", [] if ok else [f"k values {present}, k_p={t.k_p}"])


def check_wp_swaps_extremes(t: GradingTables, wp_perm):
    rs = t.rs
    bad = []
    if t.lowest[1] != rs.simple[t.p - 1]:
        bad.append(f"lowest root of Sigma(1) is {_digits(rs, t.lowest[1])}")
    for k in range(1, t.k_p + 1):
        if wp_perm[t.lowest[k]] != t.highest[k]:
            bad.append(f"w_p does not swap the extremal roots of Sigma({k})")
    return _result("w_p exchanges lowest and highest roots", bad)


def check_levels_monotone(t: GradingTables):
    hp = [t.hbar_plus[k] for k in range(1, t.k_p + 1)]
    bad = [f"hbar+ {hp}"] if any(a > b for a, b in zip(hp, hp[1:])) else []
    return _result("highest levels nondecreasing in k", bad)


def _gamma(rs, t, i, k):
    c = list(rs.coroots[i])
    c[t.p - 1] -= k
    return c


def check_gamma_relation(t: GradingTables, wp_perm):
    rs, p = t.rs, t.p
    ap = rs.simple[p - 1]
    bad = []
    g1 = _gamma(rs, t, t.highest[1], 1)
    for k in range(1, t.k_p + 1):
        gm = _gamma(rs, t, t.lowest[k], k)
        wg = [a - k * b for a, b in zip(rs.coroots[wp_perm[t.highest[k]]], rs.coroots[wp_perm[ap]])]
        if [a - b for a, b in zip(gm, wg)] != [k * x for x in g1]:
            bad.append(f"k={k}")
    return _result("gamma^-(k) - w_p gamma^+(k) = k gamma^+(1)", bad)


def check_cp_from_levels(t: GradingTables, wp_perm):
    rs = t.rs
    vals = (
        t.c_p,
        2 + t.hbar_plus[1],
        1 + int(rs.heights[t.highest[1]]),
        1 + int(rs.heights[wp_perm[rs.simple[t.p - 1]]]),
    )
    return _result("c_p = 2 + hbar+_1 = 1 + ht w_p alpha_p", [] if len(set(vals)) == 1 else [str(vals)])


def check_height_pairing(t: GradingTables):
    rs = t.rs
    r2 = two_rho_p(rs, t.p)
    bad = []
    for (k, h), members in t.sigma.items():
        for i in members:
            m = _pair(rs, r2, rs.coroots[i])
            if 2 * h != k * t.c_p + m:
                bad.append(f"{_digits(rs, i)}: 2h={2 * h}, k c_p + <2rho_p,a>={k * t.c_p + m}")
    return _result("2h = k c_p + <2 rho_p, alpha^vee>", bad)


def check_level_sums(t: GradingTables):
    bad = []
    h1 = t.hbar_plus[1]
    for k in range(1, t.k_p + 1):
        if t.hbar_plus[k] + t.hbar_minus[k] != k * h1:
            bad.append(f"k={k}: hbar+ + hbar- = {t.hbar_plus[k] + t.hbar_minus[k]} != {k * h1}")
        if k < t.k_p and not t.hbar_plus[k] <= t.hbar_plus[k + 1] <= (k + 1) * h1 - 1:
            bad.append(f"k={k}: hbar+ chain {t.hbar_plus[k]}, {t.hbar_plus[k + 1]} vs {(k + 1) * h1 - 1}")
        if t.c_p >= 3:
            lo, hi = (1, t.c_p - 1) if k == 1 else (k + 1, k * t.c_p - k - 1)
            for h in t.heights(k):
                if not lo <= h <= hi:
                    bad.append(f"k={k}: height {h} outside [{lo},{hi}]")
    return _result("level sums and height window", bad)


def check_chains(t: GradingTables):
    bad = []
    for k in range(1, t.k_p + 1):
        try:
            dec = chain_decomposition(t, k)
        except Exception as exc:  # DecompositionNotFound is the expected failure
            bad.append(f"k={k}: {exc}")
            continue
        bad += [f"k={k}: {v}" for v in chain_violations(t, dec)]
    return _result("chain decomposition of every Sigma_p(k)", bad)


def check_anticanonical_sum(t: GradingTables):
    rs, p = t.rs, t.p
    total = [0] * rs.rank
    for i in range(rs.n_pos):
        if rs.roots[i][p - 1] > 0:
            total = [a + b for a, b in zip(total, rs.roots[i])]
    lam = fundamental_weight(rs, p)
    ok = all(Fraction(a) == t.c_p * b for a, b in zip(total, lam))
    return _result("anticanonical sum: sum of Phi+ minus Phi_p+ equals c_p lambda_p", [] if ok else [f"{total} vs {t.c_p}*{lam}"])


# ---------------------------------------------------------------------------
# frak W_p checks


def _neg_rows(pd):
    return pd.group.negative_mask[list(pd.frak_Wp)]


def check_inversions_climb(t: GradingTables, pd):
    rs, p = t.rs, t.p
    neg = _neg_rows(pd)
    pairs = []
    for a in range(rs.n_pos):
        if rs.roots[a][p - 1] == 0:
            continue
        for j in range(rs.rank):
            if j == p - 1:
                continue
            b = rs.find(tuple(c + (x == j) for x, c in enumerate(rs.roots[a])))
            if b is not None:
                pairs.append((a, b))
    if not pairs:
        return _result("inversions climb along Delta_p", [])
    A = np.array([a for a, _ in pairs])
    B = np.array([b for _, b in pairs])
    viol = neg[:, A] & ~neg[:, B]
    bad = []
    if viol.any():
        row, col = map(int, np.argwhere(viol)[0])
        w = pd.frak_Wp[row]
        bad.append(f"w={pd.group.word(w)}: {_digits(rs, pairs[col][0])} -> {_digits(rs, pairs[col][1])}")
    return _result("inversions climb along Delta_p", bad)


def _npw_matrix(t: GradingTables, pd):
    neg = _neg_rows(pd)
    keys = sorted(t.sigma)
    cols = {key: neg[:, list(t.sigma[key])].sum(axis=1) for key in keys}
    return cols


def check_Npw_unimodal(t: GradingTables, pd):
    cols = _npw_matrix(t, pd)
    zero = np.zeros(len(pd.frak_Wp), dtype=int)
    bad = []
    for (k, h) in cols:
        if 2 * h + 1 <= k * t.c_p:
            up = cols.get((k, h + 1), zero)
            viol = np.nonzero(cols[(k, h)] > up)[0]
            if len(viol):
                bad.append(f"w={pd.group.word(pd.frak_Wp[viol[0]])}, k={k}, h={h}")
    return _result("N_{p,w}(k,h) unimodal below the middle", bad)


def check_M_closed_form(t: GradingTables, pd):
    cols = _npw_matrix(t, pd)
    zero = np.zeros(len(pd.frak_Wp), dtype=int)
    bad = []
    keys = {(k, h) for (k, h) in cols} | {(k, h + 1) for (k, h) in cols}
    for (k, h) in sorted(keys):
        brute = int((cols.get((k, h - 1), zero) - cols.get((k, h), zero)).max())
        closed = closed_form_M(t.N, t.c_p, k, h)
        if brute != closed:
            bad.append(f"M({k},{h}): max over frak W_p {brute}, closed form {closed}")
    return _result("closed form of M_p(k,h) equals the max over frak W_p", bad)


def check_w0_attains_M(t: GradingTables, pd):
    cols = _npw_matrix(t, pd)
    w0_row = pd.frak_Wp.index(pd.group.w0) if pd.group.w0 in pd.frak_Wp else None
    if w0_row is None:
        return _result("w_0 attains M_p(k,h)", ["w_0 not in frak W_p"])
    zero = np.zeros(len(pd.frak_Wp), dtype=int)
    bad = []
    for (k, h) in sorted(set(cols) | {(k, h + 1) for (k, h) in cols}):
        diff = cols.get((k, h - 1), zero) - cols.get((k, h), zero)
        # below the middle the maximum is the identity's 0, so only the upper range is claimed
        if 2 * h - 1 > k * t.c_p and diff[w0_row] != diff.max():
            bad.append(f"k={k}, h={h}")
        if (k, h) in cols and cols[(k, h)][w0_row] != t.n(k, h):
            bad.append(f"N_(p,w0)({k},{h}) != N_p({k},{h})")
    return _result("w_0 attains M_p(k,h)", bad)


ROOT_CHECKS = (
    check_negative_pairing_lifts,
    check_N_symmetric_unimodal,
    check_injective_lifts,
    check_grading_range,
    check_levels_monotone,
    check_height_pairing,
    check_level_sums,
    check_chains,
    check_anticanonical_sum,
)
WP_CHECKS = (check_wp_swaps_extremes, check_gamma_relation, check_cp_from_levels)
WEYL_CHECKS = (check_inversions_climb, check_Npw_unimodal, check_M_closed_form, check_w0_attains_M)


def invariants_suite(rs: RootSystem, p: int, tables: GradingTables | None = None, group=None,
                     weyl_limit: int = WEYL_SUITE_LIMIT) -> SuiteReport:
    """Run every check for (rs, p). ``tables`` may be a doctored copy (negative controls)."""
    t = tables if tables is not None else build_grading(rs, p)
    report = SuiteReport(rs.spec.label, p)
    for chk in ROOT_CHECKS:
        report.results.append(chk(t))
    wp_perm = levi_longest_perm(rs, p)
    for chk in WP_CHECKS:
        report.results.append(chk(t, wp_perm))
    if group is None and classical_order(rs) <= weyl_limit:
        group = enumerate_weyl(rs)
    if group is None:
        note = f"skipped: |W| = {classical_order(rs)} above limit {weyl_limit}"
        for chk in WEYL_CHECKS:
            name = chk.__name__.removeprefix("check_").replace("_", " ")
            report.results.append(InvariantResult(name, True, note, True))
        return report
    pd = compute_frak_Wp(group, rs, p)
    for chk in WEYL_CHECKS:
        report.results.append(chk(t, pd))
    return report


def suite_json(reports) -> str:
    return json.dumps([r.to_obj() for r in reports], indent=2)


def run_suite(label_or_spec, p, **kw) -> SuiteReport:
    from .rootsys import RootSystemSpec

    spec = label_or_spec if isinstance(label_or_spec, RootSystemSpec) else RootSystemSpec.parse(label_or_spec)
    return invariants_suite(build_root_system(spec), p, **kw)
