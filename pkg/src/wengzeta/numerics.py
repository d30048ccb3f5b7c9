"""Numerical evaluation of zhat, xi and zeta expressions, and zero location.

Every xi(a) is evaluated after reflecting a into Re a >= 1/2 and split as
``exp(G(a)) * Z(a)`` with G(a) = log(a pi^{-a/2} Gamma(a/2)) smooth and
zero free, and Z(a) = (a - 1) zeta(a) holding the zeros. Sums of many such
products are formed relative to the largest ``exp(Re G)`` envelope, which
keeps the result finite for large |Im s| while preserving its sign and
argument.
"""

from __future__ import annotations

import cmath
import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from scipy.optimize import brentq

from .errors import (
    ContourTooClose,
    NearPole,
    NotRealOnLine,
    PoleAtNonpositiveInteger,
    PoleAtOne,
    PoleAtZeroOrOne,
)
from .symbolic import LinearFactor, ZetaExpression, XEQDRecord


@dataclass(frozen=True)
class EvalContext:
    precision: int = 53
    em_terms: int = 12
    tol_online: float = 1e-8
    tol_zero: float = 1e-10

    def __post_init__(self):
        if self.precision < 53:
            raise ValueError("precision must be at least 53 bits")
        if self.tol_online <= 0 or self.tol_zero <= 0:
            raise ValueError("tolerances must be positive")
        if not 1 <= self.em_terms <= 30:
            raise ValueError("em_terms out of range")

    @property
    def extended(self) -> bool:
        return self.precision > 53


DEFAULT = EvalContext()

# ---------------------------------------------------------------------------
# special functions

_LOG_PI = math.log(math.pi)
_PI_LD = np.longdouble("3.14159265358979323846264338327950288")
_LOG_2PI_HALF_LD = np.longdouble("0.918938533204672741780329736405617640")
_LOG2_LD = np.longdouble("0.693147180559945309417232121458176568")
_STIRLING_MIN = 16.0


@lru_cache(maxsize=None)
def _em_coefficients(terms: int) -> tuple:
    """B_{2j} / (2j)! for j = 1..terms."""
    with mpmath.workdps(30):
        return tuple(
            np.longdouble(mpmath.nstr(mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j), 25))
            for j in range(1, terms + 1)
        )


@lru_cache(maxsize=None)
def _stirling_coefficients(terms: int = 10) -> tuple:
    """B_{2j} / (2j (2j - 1)) in long double."""
    with mpmath.workdps(30):
        return tuple(
            np.longdouble(mpmath.nstr(mpmath.bernoulli(2 * j) / (2 * j * (2 * j - 1)), 25))
            for j in range(1, terms + 1)
        )


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == round(z.real)


def _sin_pi_ld(z):
    """sin(pi z) in long double, reduced by the nearest integer first so zeros stay sharp."""
    z = np.clongdouble(z)
    n = np.round(z.real)
    f = z - n  # exact
    v = np.sin(_PI_LD * f)
    return -v if int(n) % 2 else v


def _loggamma_ld(z):
    """log Gamma(z) for Re z > 0 in long double: shift until |z| >= 16, then Stirling.

    The long double working type keeps the phase of log Gamma accurate to
    ~1e-16 absolute even when it is ~1e3 in size.
    """
    z = np.clongdouble(z)
    shift = np.clongdouble(0)
    while abs(z) < _STIRLING_MIN:
        shift -= np.log(z)
        z += 1
    inv = 1 / z
    inv2 = inv * inv
    series = np.clongdouble(0)
    p = inv
    for b in _stirling_coefficients():
        series += b * p
        p *= inv2
    return (z - np.longdouble("0.5")) * np.log(z) - z + _LOG_2PI_HALF_LD + series + shift


def loggamma_complex(z: complex) -> complex:
    """log Gamma(z), possibly off the principal branch by a multiple of 2 pi i."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleAtNonpositiveInteger(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        zl = np.clongdouble(z)
        return complex(np.log(_PI_LD) - np.log(_sin_pi_ld(zl)) - _loggamma_ld(1 - zl))
    return complex(_loggamma_ld(z))


def _log_chi_ld(s: complex):
    """log of 2^s pi^{s-1} sin(pi s/2) Gamma(1-s), for Re s < 0."""
    sl = np.clongdouble(s)
    return sl * _LOG2_LD + (sl - 1) * np.log(_PI_LD) + np.log(_sin_pi_ld(sl / 2)) + _loggamma_ld(1 - sl)


def gamma_complex(s, ctx: EvalContext = DEFAULT) -> complex:
    s = complex(s)
    if _is_nonpositive_integer(s):
        raise PoleAtNonpositiveInteger(f"Gamma has a pole at {s.real:g}")
    if ctx.extended:
        with mpmath.workprec(ctx.precision):
            return complex(mpmath.gamma(mpmath.mpc(s.real, s.imag)))
    return cmath.exp(loggamma_complex(s))


def _em_count(s: complex) -> int:
    return max(20, math.ceil(2 * abs(s.imag)))


def _zeta_times_pole(s: complex, ctx: EvalContext) -> complex:
    """(s - 1) zeta(s) by Euler-Maclaurin; finite at s = 1 (value 1). Intended for Re s >= -1/2."""
    if ctx.extended:
        with mpmath.workprec(ctx.precision):
            if s == 1:
                return 1 + 0j
            ms = mpmath.mpc(s.real, s.imag)
            return complex((ms - 1) * mpmath.zeta(ms))
    N = _em_count(s)
    # the phase t log n reaches ~1e3, so the whole sum runs in long double
    sl = np.clongdouble(s)
    logn = np.log(np.arange(1, N + 1, dtype=np.longdouble))
    mag = np.exp(-sl.real * logn)
    phase = sl.imag * logn
    terms = mag * (np.cos(phase) - 1j * np.sin(phase)).astype(np.clongdouble)
    head = terms[:-1].sum()
    N_s = terms[-1]
    NL = np.longdouble(N)
    tail = N_s / 2
    rising = sl  # s (s+1) ... (s + 2j - 2)
    power = N_s / NL  # N^{-s-1}
    for j, b in enumerate(_em_coefficients(ctx.em_terms), start=1):
        tail += b * rising * power
        rising *= (sl + 2 * j - 1) * (sl + 2 * j)
        power /= NL * NL
    return complex((sl - 1) * (head + tail) + N_s * NL)


def zeta_complex(s, ctx: EvalContext = DEFAULT) -> complex:
    s = complex(s)
    if s == 1:
        raise PoleAtOne("zeta has a pole at s = 1")
    # Euler-Maclaurin stays accurate a little left of 0; reflecting there would
    # multiply a vanishing chi(s) by the pole of zeta(1 - s).
    if s.real < -0.5:
        # zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1 - s) zeta(1 - s)
        if s.imag == 0 and s.real == round(s.real) and int(s.real) % 2 == 0:
            return 0j
        if ctx.extended:
            with mpmath.workprec(ctx.precision):
                return complex(mpmath.zeta(mpmath.mpc(s.real, s.imag)))
        return complex(np.exp(_log_chi_ld(s))) * zeta_complex(1 - s, ctx)
    return _zeta_times_pole(s, ctx) / (s - 1)


def _loggamma(z: complex, ctx: EvalContext) -> complex:
    if ctx.extended:
        with mpmath.workprec(ctx.precision):
            return complex(mpmath.loggamma(mpmath.mpc(z.real, z.imag)))
    return loggamma_complex(z)


def xi_parts(a, ctx: EvalContext = DEFAULT) -> tuple[complex, complex]:
    """(G, Z) with xi(a) = exp(G) * Z, after reflecting a to Re a >= 1/2."""
    a = complex(a)
    if a.real < 0.5:
        a = 1 - a
    G = cmath.log(a) - 0.5 * a * _LOG_PI + _loggamma(a / 2, ctx)
    return G, _zeta_times_pole(a, ctx)


def zhat_parts(a, ctx: EvalContext = DEFAULT) -> tuple[complex, complex]:
    """(G, Z) with zhat(a) = exp(G) * Z."""
    a = complex(a)
    if a.real < 0.5:
        a = 1 - a
    if a == 1:
        raise PoleAtZeroOrOne("zhat has poles at 0 and 1")
    G = -0.5 * a * _LOG_PI + _loggamma(a / 2, ctx) - cmath.log(a - 1)
    return G, _zeta_times_pole(a, ctx)


def zhat_xi(s, ctx: EvalContext = DEFAULT) -> tuple[complex, complex]:
    """(zhat(s), xi(s)); xi(s) = s (s - 1) zhat(s)."""
    s = complex(s)
    G, Z = xi_parts(s, ctx)
    xi = cmath.exp(G) * Z
    if s == 0 or s == 1:
        raise PoleAtZeroOrOne("zhat has poles at 0 and 1")
    return xi / (s * (s - 1)), xi


def xi_value(s, ctx: EvalContext = DEFAULT) -> complex:
    G, Z = xi_parts(s, ctx)
    return cmath.exp(G) * Z


@lru_cache(maxsize=4096)
def _const_value(n, basis: str, precision: int) -> float:
    ctx = EvalContext(precision=precision)
    if basis == "xi":
        return xi_value(complex(n), ctx).real
    return zhat_xi(complex(n), ctx)[0].real


# ---------------------------------------------------------------------------
# expressions


def _term_parts(expr: ZetaExpression, s: complex, ctx: EvalContext, check_poles: bool = True):
    """Per term: (sign-carrying scalar, complex log envelope, zeta-part product)."""
    parts_fn = xi_parts if expr.basis == "xi" else zhat_parts
    cache: dict = {}
    out = []
    for coeff, rat, mono in expr.terms:
        cval = coeff.evaluate(lambda n: _const_value(n, expr.basis, ctx.precision))
        if cval == 0:
            continue
        cval *= float(rat.scalar)
        L = complex(math.log(abs(cval)))
        for f, m in rat.num:
            L += m * cmath.log(f(s)) if f(s) != 0 else -math.inf
        for f, m in rat.den:
            v = f(s)
            if check_poles and abs(v) < 1e-9:
                raise NearPole(f"s = {s} is within 1e-9 of a zero of {f.text()}")
            L -= m * cmath.log(v)
        Zprod = 1 + 0j
        for f, e in mono.items:
            a = f(s)
            if a not in cache:
                if expr.basis == "zhat" and check_poles and (abs(a) < 1e-9 or abs(a - 1) < 1e-9):
                    raise NearPole(f"zhat argument {a} is within 1e-9 of a pole")
                cache[a] = parts_fn(a, ctx)
            G, Z = cache[a]
            L += e * G
            if e < 0 and Z == 0:
                raise NearPole("division by a zeta zero")
            Zprod *= Z**e
        out.append((math.copysign(1.0, cval), L, Zprod))
    return out


def _scaled_sum(parts, M=None):
    """(sum / exp(M), M); M defaults to the largest real envelope."""
    if not parts:
        return 0j, 0.0
    if M is None:
        M = max(L.real for _, L, _ in parts if L.real != -math.inf)
    total = 0j
    for sgn, L, Z in parts:
        if L.real == -math.inf:
            continue
        total += sgn * cmath.exp(L - M) * Z
    return total, M


def eval_expression(expr: ZetaExpression, s, ctx: EvalContext = DEFAULT) -> complex:
    """Value of expr at s (may overflow for very large |Im s|; use eval_scaled there)."""
    if expr.is_zero():
        return 0j
    total, M = _scaled_sum(_term_parts(expr, complex(s), ctx))
    return total * math.exp(M)


def eval_scaled(expr: ZetaExpression, s, ctx: EvalContext = DEFAULT, M=None):
    """(value / exp(M), M) with M the largest term envelope unless given."""
    return _scaled_sum(_term_parts(expr, complex(s), ctx), M)


def _relative_value(expr, s, ctx):
    """value / (sum of term magnitudes); its size says how close s is to a zero."""
    parts = _term_parts(expr, complex(s), ctx)
    val, M = _scaled_sum(parts)
    scale = sum(math.exp(L.real - M) * abs(Z) for _, L, Z in parts if L.real != -math.inf)
    return val / scale if scale else 0j


# ---------------------------------------------------------------------------
# functions on the critical line


@dataclass(frozen=True)
class LineProblem:
    """An entire function f (as an expression) with f(-c - s) = sign * f(s)."""

    expr: ZetaExpression
    c: float
    sign: int
    label: str = ""

    @property
    def m(self) -> int:
        return 0 if self.sign == 1 else 1

    @property
    def center(self) -> float:
        return -self.c / 2


def line_problem(obj) -> LineProblem:
    if isinstance(obj, LineProblem):
        return obj
    if isinstance(obj, XEQDRecord):
        return LineProblem(obj.xi_p, obj.c, obj.line_sign, f"{obj.rs.spec.label} p={obj.pd.p}")
    raise TypeError(f"cannot build a line problem from {type(obj).__name__}")


def riemann_xi_problem() -> LineProblem:
    """xi(s) itself: symmetric about Re s = 1/2."""
    from .symbolic import ConstantCombo, FactoredRational, ZhatMonomial

    expr = ZetaExpression.from_terms(
        [(ConstantCombo.scalar(1), FactoredRational(), ZhatMonomial.single(1, 0))], "xi"
    )
    return LineProblem(expr, -1, 1, "xi")


def shifted_xi_problem(shift) -> LineProblem:
    """xi(s + shift), symmetric about Re s = 1/2 - shift. ``shift`` may be a Fraction."""
    from .symbolic import ConstantCombo, FactoredRational, ZhatMonomial

    expr = ZetaExpression.from_terms(
        [(ConstantCombo.scalar(1), FactoredRational(), ZhatMonomial.single(1, shift))], "xi"
    )
    return LineProblem(expr, float(2 * shift - 1), 1, f"xi(s+{shift})")


def _line_value(prob: LineProblem, t: float, ctx: EvalContext, check: bool = True) -> tuple[float, float, float]:
    s = complex(prob.center, t)
    parts = _term_parts(prob.expr, s, ctx)
    val, M = _scaled_sum(parts)
    phi = val * (1j) ** (-prob.m)
    # cancellation between terms sets the rounding floor, so measure against their total size
    scale = sum(math.exp(L.real - M) * abs(Z) for _, L, Z in parts if L.real != -math.inf)
    if check and abs(phi.imag) > 1e-9 * max(1.0, scale):
        raise NotRealOnLine(f"{prob.label}: imaginary part {phi.imag:.3e} at t = {t}")
    return phi.real, M, scale


def line_function(record, t: float, ctx: EvalContext = DEFAULT, normalized: bool = True) -> float:
    """phi(t) = f(-c/2 + it) i^{-m}, real. Normalized by the largest term envelope unless asked otherwise."""
    prob = line_problem(record)
    val, M, _ = _line_value(prob, t, ctx)
    return val if normalized else val * math.exp(M)


# ---------------------------------------------------------------------------
# zeros


@dataclass
class Zero:
    t: float
    residual: float
    re_deviation: float
    simple: bool
    slope: float = 0.0
    winding: int = 0


@dataclass
class ZeroReport:
    label: str
    c: float
    t_max: float
    zeros: list = field(default_factory=list)
    rectangle_count: int | None = None
    line_count: int = 0
    center_zero: bool = False
    rectangle: tuple | None = None

    def ordinates(self) -> list[float]:
        return [z.t for z in self.zeros]

    def to_json(self) -> str:
        d = asdict(self)
        return json.dumps(_round17(d), indent=2)


def _round17(obj):
    if isinstance(obj, float):
        return float(f"{obj:.17g}")
    if isinstance(obj, dict):
        return {k: _round17(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round17(v) for v in obj]
    return obj


def _newton(prob: LineProblem, s0: complex, ctx: EvalContext, iters: int = 30) -> complex:
    _, M0 = eval_scaled(prob.expr, s0, ctx)
    s = s0
    h = 1e-6
    for _ in range(iters):
        f = eval_scaled(prob.expr, s, ctx, M0)[0]
        df = (eval_scaled(prob.expr, s + h, ctx, M0)[0] - eval_scaled(prob.expr, s - h, ctx, M0)[0]) / (2 * h)
        if df == 0:
            break
        step = f / df
        s -= step
        if abs(step) < 1e-15 * max(1.0, abs(s)):
            break
    return s


_CONTOUR_FLOOR = 1e-9


def _arg_increment(prob, path, ctx, min_step=1e-9):
    """Total change of arg f along a polyline, with adaptive subdivision."""
    total = 0.0
    for a, b in zip(path, path[1:]):
        length = abs(b - a)
        n0 = max(4, math.ceil(length / 0.05))
        pts = [a + (b - a) * i / n0 for i in range(n0 + 1)]
        vals = [_relative_value(prob.expr, z, ctx) for z in pts]
        stack = list(zip(zip(pts, pts[1:]), zip(vals, vals[1:])))
        stack.reverse()
        while stack:
            (z1, z2), (v1, v2) = stack.pop()
            if abs(v1) < _CONTOUR_FLOOR or abs(v2) < _CONTOUR_FLOOR:
                raise ContourTooClose(f"zero on the contour near {z1}")
            d = cmath.phase(v2 / v1)
            zm = (z1 + z2) / 2
            vm = _relative_value(prob.expr, zm, ctx)
            if abs(vm) < _CONTOUR_FLOOR:
                raise ContourTooClose(f"zero on the contour near {zm}")
            halves = cmath.phase(vm / v1) + cmath.phase(v2 / vm)
            # a step is trusted only when it is small and its halves agree with it
            if abs(d) < math.pi / 4 and abs(halves - d) < 1e-6:
                total += d
                continue
            if abs(z2 - z1) < min_step:
                raise ContourTooClose(f"argument jumps near {z1}")
            stack.append(((zm, z2), (vm, v2)))
            stack.append(((z1, zm), (v1, vm)))
    return total


def _winding(prob, re_lo, re_hi, t_lo, t_hi, ctx) -> int:
    corners = [complex(re_lo, t_lo), complex(re_hi, t_lo), complex(re_hi, t_hi), complex(re_lo, t_hi), complex(re_lo, t_lo)]
    total = _arg_increment(prob, corners, ctx)
    n = total / (2 * math.pi)
    if abs(n - round(n)) > 0.1:
        raise ContourTooClose(f"non-integral winding {n:.3f}")
    return int(round(n))


def count_zeros_rectangle(record, re_lo, re_hi, t_lo, t_hi, ctx: EvalContext = DEFAULT) -> int:
    """Zeros of the entire function inside the box, by the argument principle."""
    prob = line_problem(record)
    nudges = (0.0, 1e-3, 3e-3, 1e-2)
    last = None
    for d in nudges:
        try:
            return _winding(prob, re_lo - d, re_hi + d, t_lo + d, t_hi + d, ctx)
        except ContourTooClose as exc:
            last = exc
    raise ContourTooClose(f"contour stays too close to a zero after nudging: {last}")


def _refine_brackets(fn, ts, vals, depth=2):
    """Sign-change brackets, subdividing around small local minima of |f|."""
    out = []
    for i in range(len(ts) - 1):
        if vals[i] == 0:
            out.append((ts[i], ts[i]))
        elif vals[i] * vals[i + 1] < 0:
            out.append((ts[i], ts[i + 1]))
    if depth == 0:
        return out
    for i in range(1, len(ts) - 1):
        a, b, c = abs(vals[i - 1]), abs(vals[i]), abs(vals[i + 1])
        if b < a and b < c and vals[i - 1] * vals[i] > 0 and vals[i] * vals[i + 1] > 0:
            sub = np.linspace(ts[i - 1], ts[i + 1], 21)
            sv = [fn(t) for t in sub]
            for br in _refine_brackets(fn, list(sub), sv, depth - 1):
                out.append(br)
    out = sorted(set(out))
    return out


def scan_zeros_on_line(record, t_max: float, ctx: EvalContext = DEFAULT, step: float = 0.05,
                       t_min: float = 1e-3, rectangle: bool = False, box_halfwidth: float = 2.0) -> ZeroReport:
    """Zeros of phi on (t_min, t_max] by sign changes, refined by Brent's method."""
    prob = line_problem(record)

    def fn(t):
        return _line_value(prob, t, ctx)[0]

    ts = list(np.arange(t_min, t_max + step / 2, step))
    if ts[-1] < t_max:
        ts.append(t_max)
    vals = [fn(t) for t in ts]
    brackets = _refine_brackets(fn, ts, vals)
    roots = []
    for a, b in brackets:
        r = a if a == b else brentq(fn, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
        if not roots or abs(r - roots[-1]) > 1e-9:
            roots.append(r)
    report = ZeroReport(prob.label, prob.c, t_max)
    try:
        v, _, scale = _line_value(prob, 0.0, ctx)
        report.center_zero = abs(v) < ctx.tol_zero * max(scale, 1e-300)
    except NearPole:
        report.center_zero = False
    for i, t in enumerate(roots):
        v, _, scale = _line_value(prob, t, ctx)
        residual = abs(v) / scale
        rho = _newton(prob, complex(prob.center, t), ctx)
        h = 1e-6
        slope = (fn(t + h) - fn(t - h)) / (2 * h)
        gaps = [abs(t - u) for j, u in enumerate(roots) if j != i] + [t]
        r = min(0.05, 0.3 * min(gaps))
        try:
            wind = _winding(prob, prob.center - r, prob.center + r, t - r, t + r, ctx)
        except ContourTooClose:
            wind = -1
        report.zeros.append(
            Zero(
                t=float(t),
                residual=float(residual),
                re_deviation=float(abs(rho.real - prob.center)),
                simple=bool(wind == 1 and abs(slope) > 1e-10),
                slope=float(slope),
                winding=wind,
            )
        )
    report.line_count = len(report.zeros)
    if rectangle:
        box = (prob.center - box_halfwidth, prob.center + box_halfwidth, 0.0, t_max)
        report.rectangle = box
        report.rectangle_count = count_zeros_rectangle(prob, *box, ctx)
    return report


def riemann_zero_ordinates(count: int, ctx: EvalContext = DEFAULT, t_max: float | None = None) -> list[float]:
    """Ordinates of the first ``count`` zeros of xi on Re s = 1/2, from this engine's own scan."""
    t_max = t_max or 10.0 + 6.0 * count
    rep = scan_zeros_on_line(riemann_xi_problem(), t_max, ctx)
    return rep.ordinates()[:count]


def density_fit(ordinates) -> tuple[float, float, float]:
    """Least-squares (C1, C2, C3) in N(T) ~ C1 T log T + C2 T + C3.

    N is sampled at each ordinate (midway through its jump). Empirical only:
    the asymptotic constants are not known in closed form in general.
    """
    t = np.asarray(sorted(ordinates), dtype=float)
    if len(t) < 4:
        raise ValueError("need at least 4 ordinates for a 3-parameter fit")
    n = np.arange(len(t)) + 0.5
    A = np.column_stack([t * np.log(t), t, np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(A, n, rcond=None)
    return tuple(float(c) for c in coef)


# ---------------------------------------------------------------------------
# ratio bound and zero-freeness checks


def _log_abs_X(args, s, ctx):
    out = 0.0
    for f, e in args.items():
        G, Z = xi_parts(f(s), ctx)
        out += e * (G.real + (math.log(abs(Z)) if Z != 0 else -math.inf))
    return out


@dataclass
class RatioBoundResult:
    ok: bool
    max_ratio_off_line: float
    max_ratio_on_line: float
    witnesses: list = field(default_factory=list)
    equality_on_line: bool = False

    def __bool__(self):
        return self.ok


def check_prop_6_6(record: XEQDRecord, w, ctx: EvalContext = DEFAULT, samples: int = 100, seed: int = 0) -> RatioBoundResult:
    """|X_{p,w}(s) / X_p^ddagger(s)| < 1 right of the line and <= 1 on it, sampled."""
    rng = np.random.default_rng(seed)
    c = record.c
    res = [-c / 2, -c / 2 + 0.1, 0.0, 5.0]
    Xw = record.Xw[w]
    Xd = record.Xdd
    worst_off, worst_on = 0.0, 0.0
    witnesses = []
    for i in range(samples):
        sigma = res[i % len(res)]
        t = float(rng.uniform(-50, 50))
        s = complex(sigma, t)
        ratio = math.exp(_log_abs_X(Xw, s, ctx) - _log_abs_X(Xd, s, ctx))
        on_line = sigma == -c / 2
        if on_line:
            worst_on = max(worst_on, ratio)
        else:
            worst_off = max(worst_off, ratio)
        if ratio > 1 + 1e-12 or (not on_line and ratio >= 1 + 1e-12):
            witnesses.append((sigma, t, ratio))
    equality = abs(worst_on - 1) < 1e-9
    return RatioBoundResult(not witnesses, worst_off, worst_on, witnesses, equality)


@dataclass
class ZeroFreeResult:
    ok: bool
    symbolic: bool
    min_log_modulus: float
    witnesses: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_prop_6_7(record: XEQDRecord, ctx: EvalContext = DEFAULT, exponents=None) -> ZeroFreeResult:
    """X^ddagger / D_p zero free on Re s >= -c_p/2: exponent bound plus a numeric grid."""
    from .symbolic import quotient_exponents, exponents_zero_free

    exps = exponents if exponents is not None else quotient_exponents(record.tables)
    symbolic_ok = exponents_zero_free(exps, record.c)
    c = record.c
    worst = math.inf
    witnesses = []
    for sigma in (-c / 2, -c / 2 + 0.5, 0.0, 2.0):
        for t in np.linspace(-30, 30, 61):
            s = complex(sigma, float(t))
            lm = _log_abs_X(exps, s, ctx)
            worst = min(worst, lm)
            if not math.isfinite(lm):
                witnesses.append((sigma, float(t)))
    return ZeroFreeResult(symbolic_ok and not witnesses, symbolic_ok, worst, witnesses)


# ---------------------------------------------------------------------------
# emitters


def zeros_csv(report: ZeroReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "residual", "re_deviation", "simple"])
    for z in report.zeros:
        w.writerow([f"{z.t:.17g}", f"{z.residual:.17g}", f"{z.re_deviation:.17g}", int(z.simple)])
    return buf.getvalue()


def trace_csv(record, ts, ctx: EvalContext = DEFAULT) -> str:
    """(t, phi(t)) samples of the normalized line function."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "phi"])
    for t in ts:
        w.writerow([f"{float(t):.17g}", f"{line_function(record, float(t), ctx):.17g}"])
    return buf.getvalue()
