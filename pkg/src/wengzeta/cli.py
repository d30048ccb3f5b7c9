"""Command-line front end: ``wengzeta <command> SERIES RANK [options]``.

Exit status: 0 success, 1 a checked claim failed, 2 usage error,
3 an internal consistency check tripped. Errors are also reported as one
JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .errors import CapExceeded, InternalInconsistency, InvalidSpec, NotInFrakWp, WengError
from .fixtures import appendix1_tables, chain_table, compare_chains, reference_cp
from .grading import build_grading, chain_decomposition
from .invariants import invariants_suite
from .numerics import EvalContext, count_zeros_rectangle, eval_expression, scan_zeros_on_line, zeros_csv
from .rootsys import RootSystemSpec, build_root_system
from .symbolic import build_XEQD, check_functional_equation, omega_p, render, to_json_obj, zhat_p
from .weyl import classical_order, compute_frak_Wp, enumerate_weyl

COMMANDS = ("formula", "fe-check", "tables", "chains", "zeros", "count", "invariants")
OUTPUTS = ("text", "latex", "json", "csv")
WEYL_SOFT_CAP = 1_000_000
WEYL_HARD_CAP = 1_000_000_000

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class JobSpec:
    command: str
    series: str
    rank: int
    p: int | None = None
    all_p: bool = False
    output: str = "text"
    t_max: float = 30.0
    precision: int = 53
    compare: str | None = None
    threads: int = 1
    allow_e8_weyl: bool = False
    k: int = 1
    window: tuple | None = None  # (re_lo, re_hi, t_lo) for count
    rectangle: bool = True

    def validate(self) -> "JobSpec":
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.output not in OUTPUTS:
            raise UsageError(f"unknown output format {self.output!r}")
        spec = RootSystemSpec(self.series, self.rank)  # raises InvalidSpec
        if self.p is not None and not 1 <= self.p <= spec.rank:
            raise UsageError(f"--p must lie in 1..{spec.rank}")
        if self.p is not None and self.all_p:
            raise UsageError("--p and --all-p are exclusive")
        if self.command not in ("tables",) and self.p is None and not self.all_p:
            raise UsageError("give --p or --all-p")
        if not 0 < self.t_max <= 200:
            raise UsageError("--t-max must lie in (0, 200]")
        if self.precision < 53:
            raise UsageError("--precision must be at least 53")
        if self.threads < 1:
            raise UsageError("--threads must be positive")
        if self.k < 1:
            raise UsageError("--k must be positive")
        if self.output == "latex" and self.command != "formula":
            raise UsageError("latex output is only available for formula")
        if self.output == "csv" and self.command not in ("zeros", "count"):
            raise UsageError("csv output is only available for zeros and count")
        return self

    @property
    def spec(self) -> RootSystemSpec:
        return RootSystemSpec(self.series, self.rank)

    def ps(self) -> list[int]:
        return list(range(1, self.rank + 1)) if self.all_p or self.p is None else [self.p]


class Pipeline:
    """Lazily built objects for one root system."""

    def __init__(self, spec: RootSystemSpec, allow_e8_weyl: bool = False):
        self.spec = spec
        self.rs = build_root_system(spec)
        self.allow = allow_e8_weyl

    @cached_property
    def group(self):
        cap = WEYL_HARD_CAP if self.allow else WEYL_SOFT_CAP
        order = classical_order(self.rs)
        if order > cap:
            hint = "" if self.allow else " (pass --allow-e8-weyl to try anyway)"
            raise CapExceeded(order, cap) if self.allow else UsageError(
                f"{self.spec.label}: Weyl group of order {order} is above {cap}{hint}"
            )
        return enumerate_weyl(self.rs, cap=cap)

    def tables(self, p):
        return build_grading(self.rs, p)

    def pd(self, p):
        return compute_frak_Wp(self.group, self.rs, p)

    def zhat(self, p):
        t = self.tables(p)
        return zhat_p(self.rs, t, omega_p(self.rs, self.group, self.pd(p), t)), t

    def record(self, p):
        return build_XEQD(self.rs, self.group, self.pd(p), self.tables(p))


# ---------------------------------------------------------------------------
# per-p work units (top level so a process pool can pickle them)


def _formula(job: JobSpec, p: int):
    expr, t = Pipeline(job.spec, job.allow_e8_weyl).zhat(p)
    if job.output == "json":
        return {"root_system": job.spec.label, "p": p, "c_p": t.c_p, "zhat_p": to_json_obj(expr)}, True
    return render(expr, job.output), True


def _numeric_fe(expr, c, seed: int) -> float:
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(3):
        s = complex(rng.uniform(-3, 3), rng.uniform(0.5, 10))
        a, b = eval_expression(expr, s), eval_expression(expr, -c - s)
        worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return worst


def _fe_check(job: JobSpec, p: int):
    expr, t = Pipeline(job.spec, job.allow_e8_weyl).zhat(p)
    fe = check_functional_equation(expr, t.c_p, 1)
    resid = _numeric_fe(expr, t.c_p, seed=p)
    if fe.ok and not resid < 1e-9:
        raise InternalInconsistency(
            f"{job.spec.label} p={p}: symbolic check passed but numeric residual is {resid:.3e}"
        )
    obj = {"p": p, "c_p": t.c_p, "ok": fe.ok, "numeric_residual": float(f"{resid:.3e}"), "report": fe.report}
    return obj, fe.ok


def _zeros(job: JobSpec, p: int):
    rec = Pipeline(job.spec, job.allow_e8_weyl).record(p)
    ctx = EvalContext(precision=job.precision)
    rep = scan_zeros_on_line(rec, job.t_max, ctx, rectangle=job.rectangle)
    ok = all(z.residual < ctx.tol_zero and z.re_deviation < ctx.tol_online for z in rep.zeros)
    if rep.rectangle_count is not None:
        ok = ok and rep.rectangle_count == rep.line_count
    return rep, ok


def _count(job: JobSpec, p: int):
    rec = Pipeline(job.spec, job.allow_e8_weyl).record(p)
    ctx = EvalContext(precision=job.precision)
    centre = -rec.c / 2
    re_lo, re_hi, t_lo = job.window if job.window else (centre - 2, centre + 2, 0.0)
    n = count_zeros_rectangle(rec, re_lo, re_hi, t_lo, job.t_max, ctx)
    return {"p": p, "c_p": rec.c, "box": [re_lo, re_hi, t_lo, job.t_max], "count": n}, True


def _invariants(job: JobSpec, p: int):
    pipe = Pipeline(job.spec, job.allow_e8_weyl)
    limit = WEYL_HARD_CAP if job.allow_e8_weyl else 60_000
    rep = invariants_suite(pipe.rs, p, weyl_limit=limit)
    return rep, rep.ok


def _fan_out(fn, job: JobSpec):
    ps = job.ps()
    if job.threads > 1 and len(ps) > 1:
        with ProcessPoolExecutor(max_workers=min(job.threads, len(ps))) as pool:
            return list(zip(ps, pool.map(fn, [job] * len(ps), ps)))
    return [(p, fn(job, p)) for p in ps]


# ---------------------------------------------------------------------------
# commands


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _load_compare(name: str, kind: str):
    if name in ("appendix1", "appendix2"):
        if (kind, name) not in (("chains", "appendix1"), ("tables", "appendix2")):
            raise UsageError(f"--compare {name} does not apply to {kind}")
        return name
    path = Path(name)
    if not path.is_file():
        raise UsageError(f"--compare: no fixture named {name!r}")
    with path.open() as fh:
        return json.load(fh)


def cmd_formula(job, out):
    results = _fan_out(_formula, job)
    if job.output == "json":
        out.write(_dump([r for _, (r, _) in results]) + "\n")
    elif len(results) == 1:
        out.write(results[0][1][0] + "\n")
    else:
        for p, (text, _) in results:
            out.write(f"p={p}: {text}\n")
    return EXIT_OK


def cmd_fe_check(job, out):
    results = _fan_out(_fe_check, job)
    ok = all(flag for _, (_, flag) in results)
    if job.output == "json":
        out.write(_dump({"root_system": job.spec.label, "ok": ok, "cases": [r for _, (r, _) in results]}) + "\n")
    else:
        for p, (r, flag) in results:
            out.write(f"{job.spec.label} p={p} c_p={r['c_p']}: {'ok' if flag else 'FAILED'}\n")
            for line in r["report"]:
                out.write(f"  {line}\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_tables(job, out):
    pipe = Pipeline(job.spec)
    ps = job.ps()
    tabs = {p: pipe.tables(p) for p in ps}
    obj = {
        "root_system": job.spec.label,
        "p": ps,
        "c_p": [tabs[p].c_p for p in ps],
        "k_p": [tabs[p].k_p for p in ps],
        "N": {str(p): [[k, h, n] for (k, h), n in sorted(tabs[p].N.items())] for p in ps},
        "M": {str(p): [[k, h, m] for (k, h), m in sorted(tabs[p].M.items())] for p in ps},
    }
    status = EXIT_OK
    if job.compare:
        ref = _load_compare(job.compare, "tables")
        if ref == "appendix2":
            want = [reference_cp(job.series, job.rank, p) for p in ps]
        else:
            want = [ref["c_p"][p - 1] for p in ps]
        obj["compare"] = {"reference": want, "match": want == obj["c_p"]}
        status = EXIT_OK if want == obj["c_p"] else EXIT_FAIL
    if job.output == "json":
        out.write(_dump(obj) + "\n")
    else:
        out.write(f"{job.spec.label}\n")
        out.write("c_p: " + " ".join(map(str, obj["c_p"])) + "\n")
        out.write("k_p: " + " ".join(map(str, obj["k_p"])) + "\n")
        for p in ps:
            row = " ".join(f"N({k},{h})={n}" for k, h, n in obj["N"][str(p)])
            out.write(f"p={p}: {row}\n")
        if "compare" in obj:
            out.write(f"compare: {'match' if obj['compare']['match'] else 'MISMATCH'} {obj['compare']['reference']}\n")
    return status


def cmd_chains(job, out):
    pipe = Pipeline(job.spec)
    ref = _load_compare(job.compare, "chains") if job.compare else None
    entries, status = [], EXIT_OK
    for p in job.ps():
        dec = chain_decomposition(pipe.tables(p), job.k)
        ours = [list(reversed(ch)) for ch in dec.digits(pipe.rs)]
        entry = {"p": p, "k": job.k, "chains": ours}
        if ref is not None:
            if ref == "appendix1":
                if job.spec.label not in appendix1_tables() or job.k != 1:
                    raise UsageError(f"no published chain table for {job.spec.label} with k={job.k}")
                published = chain_table(job.spec.label, p)
            else:
                published = ref[str(p)]
            same, _, pub = compare_chains(pipe.rs, dec, published)
            entry["compare"] = {"match": same, "published": pub}
            if not same:
                status = EXIT_FAIL
        entries.append(entry)
    if job.output == "json":
        out.write(_dump({"root_system": job.spec.label, "cases": entries}) + "\n")
        return status
    for e in entries:
        out.write(f"{job.spec.label} p={e['p']} k={e['k']}\n")
        for m, ch in enumerate(e["chains"], start=1):
            out.write(f"  L{m}: {' '.join(ch)}\n")
        if "compare" in e:
            out.write(f"  published: {'identical' if e['compare']['match'] else 'DIFFERENT'}\n")
            if not e["compare"]["match"]:
                for m, ch in enumerate(e["compare"]["published"], start=1):
                    out.write(f"  P{m}: {' '.join(ch)}\n")
    return status


def cmd_zeros(job, out):
    results = _fan_out(_zeros, job)
    ok = all(flag for _, (_, flag) in results)
    if job.output == "csv":
        many = len(results) > 1
        for i, (p, (rep, _)) in enumerate(results):
            text = zeros_csv(rep)
            if many:
                lines = text.splitlines()
                head = "p," + lines[0]
                body = [f"{p},{line}" for line in lines[1:]]
                text = "\n".join(([head] if i == 0 else []) + body) + ("\n" if body or i == 0 else "")
            out.write(text)
    elif job.output == "json":
        out.write("[" + ",\n".join(rep.to_json() for _, (rep, _) in results) + "]\n")
    else:
        for p, (rep, flag) in results:
            rc = "" if rep.rectangle_count is None else f", box count {rep.rectangle_count}"
            out.write(f"{job.spec.label} p={p} c_p={rep.c:g}: {rep.line_count} zeros on the line up to t={rep.t_max:g}{rc}\n")
            for z in rep.zeros:
                out.write(f"  t={z.t:.12f}  residual={z.residual:.2e}  re_dev={z.re_deviation:.2e}  simple={z.simple}\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_count(job, out):
    results = _fan_out(_count, job)
    if job.output == "json":
        out.write(_dump([r for _, (r, _) in results]) + "\n")
    elif job.output == "csv":
        out.write("p,re_lo,re_hi,t_lo,t_hi,count\n")
        for p, (r, _) in results:
            out.write(",".join([str(p)] + [f"{x:.17g}" for x in r["box"]] + [str(r["count"])]) + "\n")
    else:
        for p, (r, _) in results:
            lo, hi, tl, th = r["box"]
            out.write(f"{job.spec.label} p={p}: {r['count']} zeros in [{lo:g},{hi:g}] x [{tl:g},{th:g}]\n")
    return EXIT_OK


def cmd_invariants(job, out):
    results = _fan_out(_invariants, job)
    ok = all(flag for _, (_, flag) in results)
    if job.output == "json":
        out.write(_dump([rep.to_obj() for _, (rep, _) in results]) + "\n")
    else:
        for _, (rep, _) in results:
            out.write(rep.text() + "\n")
    return EXIT_OK if ok else EXIT_FAIL


HANDLERS = {
    "formula": cmd_formula,
    "fe-check": cmd_fe_check,
    "tables": cmd_tables,
    "chains": cmd_chains,
    "zeros": cmd_zeros,
    "count": cmd_count,
    "invariants": cmd_invariants,
}


def run(job: JobSpec, out=None) -> int:
    out = out or sys.stdout
    job.validate()
    return HANDLERS[job.command](job, out)


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="wengzeta", description="Weng zeta functions of (G, P): formulas, checks and zeros.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("series", help="A, B, C, D, E, F or G")
    ap.add_argument("rank", type=int)
    ap.add_argument("--p", type=int, help="maximal parabolic index (1-based)")
    ap.add_argument("--all-p", action="store_true", help="run for every p = 1..rank")
    ap.add_argument("--output", default="text", choices=OUTPUTS)
    ap.add_argument("--t-max", type=float, default=30.0)
    ap.add_argument("--precision", type=int, default=53, help="working bits; above 53 switches to mpmath")
    ap.add_argument("--compare", help="appendix1 (chains), appendix2 (tables) or a JSON fixture path")
    ap.add_argument("--threads", type=int, default=1, help="worker processes for --all-p")
    ap.add_argument("--allow-e8-weyl", action="store_true", help="enumerate Weyl groups above 10^6 elements")
    ap.add_argument("--k", type=int, default=1, help="grading degree for chains")
    ap.add_argument("--re-lo", type=float)
    ap.add_argument("--re-hi", type=float)
    ap.add_argument("--t-lo", type=float, default=0.0)
    ap.add_argument("--no-rectangle", action="store_true", help="zeros: skip the box count")
    return ap


def parse_job(argv) -> JobSpec:
    a = build_parser().parse_args(argv)
    window = None
    if a.re_lo is not None or a.re_hi is not None:
        if a.re_lo is None or a.re_hi is None or not a.re_lo < a.re_hi:
            raise UsageError("--re-lo and --re-hi go together with re-lo < re-hi")
        window = (a.re_lo, a.re_hi, a.t_lo)
    return JobSpec(
        command=a.command,
        series=a.series.upper(),
        rank=a.rank,
        p=a.p,
        all_p=a.all_p,
        output=a.output,
        t_max=a.t_max,
        precision=a.precision,
        compare=a.compare,
        threads=a.threads,
        allow_e8_weyl=a.allow_e8_weyl,
        k=a.k,
        window=window,
        rectangle=not a.no_rectangle,
    )


def _error(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit": code}) + "\n")
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        job = parse_job(argv)
        return run(job)
    except (UsageError, InvalidSpec, NotInFrakWp, CapExceeded) as exc:
        return _error(EXIT_USAGE, exc)
    except InternalInconsistency as exc:
        return _error(EXIT_INTERNAL, exc)
    except WengError as exc:
        return _error(EXIT_FAIL, exc)


if __name__ == "__main__":
    raise SystemExit(main())
