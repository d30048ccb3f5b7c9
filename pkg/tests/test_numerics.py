import cmath
import math
from collections import Counter
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from wengzeta.errors import NearPole, PoleAtNonpositiveInteger, PoleAtOne, PoleAtZeroOrOne
from wengzeta.numerics import (
    EvalContext,
    check_prop_6_6,
    check_prop_6_7,
    count_zeros_rectangle,
    density_fit,
    eval_expression,
    gamma_complex,
    line_function,
    loggamma_complex,
    riemann_xi_problem,
    riemann_zero_ordinates,
    scan_zeros_on_line,
    shifted_xi_problem,
    trace_csv,
    xi_value,
    zeros_csv,
    zeta_complex,
    zhat_xi,
)
from wengzeta.symbolic import LinearFactor, ZetaExpression, quotient_exponents

from conftest import cases, record_of, zhat_of

mpmath.mp.dps = 30


def rel(a, b):
    return abs(a - b) / abs(b)


def test_zeta_special_values():
    assert abs(zeta_complex(2) - math.pi**2 / 6) < 1e-14
    assert abs(zeta_complex(0) + 0.5) < 1e-15
    assert zeta_complex(-2) == 0
    assert abs(zeta_complex(complex(0.5, 14.134725))) < 1e-6


def test_zeta_pole():
    with pytest.raises(PoleAtOne):
        zeta_complex(1)


def test_zeta_near_zero_does_not_reflect_into_the_pole():
    assert zeta_complex(-1e-70) == pytest.approx(-0.5, abs=1e-15)
    assert zeta_complex(complex(-2e-65, 2e-65)) == pytest.approx(-0.5, abs=1e-15)


@settings(max_examples=80, deadline=None)
@given(st.floats(-6, 6), st.floats(-150, 150))
def test_zeta_against_mpmath(x, y):
    s = complex(x, y)
    if abs(s - 1) < 1e-3:
        return
    ref = complex(mpmath.zeta(mpmath.mpc(x, y)))
    if abs(ref) < 1e-8:
        return
    assert rel(zeta_complex(s), ref) < 2.0**-44


def test_gamma_values():
    assert abs(gamma_complex(1) - 1) < 1e-15
    assert abs(gamma_complex(0.5) - math.sqrt(math.pi)) < 1e-14
    assert abs(gamma_complex(5) - 24) < 1e-12
    with pytest.raises(PoleAtNonpositiveInteger):
        gamma_complex(-3)


@settings(max_examples=80, deadline=None)
@given(st.floats(-10, 30), st.floats(-100, 100))
def test_gamma_against_mpmath(x, y):
    z = complex(x, y)
    if abs(z - round(x)) < 1e-3 and round(x) <= 0:
        return
    ref = complex(mpmath.gamma(mpmath.mpc(x, y)))
    if ref == 0 or not math.isfinite(abs(ref)) or abs(ref) < 1e-250:
        return
    assert rel(gamma_complex(z), ref) < 1e-12
    # the log may differ by a multiple of 2 pi i
    d = loggamma_complex(z) - complex(mpmath.loggamma(mpmath.mpc(x, y)))
    assert abs(d.real) < 1e-11
    assert abs(d.imag / (2 * math.pi) - round(d.imag / (2 * math.pi))) < 1e-11


def test_zhat_values():
    zh, xi = zhat_xi(2)
    assert abs(zh - math.pi / 6) < 1e-15
    assert abs(xi - 2 * math.pi / 6) < 1e-14
    with pytest.raises(PoleAtZeroOrOne):
        zhat_xi(1)


def test_xi_functional_equation():
    assert abs(xi_value(2) - xi_value(-1)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 6), st.floats(-60, 60))
def test_xi_symmetric(x, y):
    s = complex(x, y)
    a, b = xi_value(s), xi_value(1 - s)
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_extended_precision_path():
    ctx = EvalContext(precision=120)
    s = complex(0.3, 40)
    assert rel(zeta_complex(s, ctx), zeta_complex(s)) < 1e-13
    assert rel(gamma_complex(s, ctx), gamma_complex(s)) < 1e-12
    with pytest.raises(ValueError):
        EvalContext(precision=30)


def test_eval_a1_by_hand():
    z = zhat_of("A1", 1)
    zh3, _ = zhat_xi(3)
    zh2, _ = zhat_xi(2)
    assert abs(eval_expression(z, 1) - (zh3 - zh2 / 3)) < 1e-14
    assert eval_expression(ZetaExpression.zero(), 1.5) == 0


def test_near_pole():
    with pytest.raises(NearPole):
        eval_expression(zhat_of("A1", 1), 1e-12)


@pytest.mark.parametrize("label,p", cases(["A1", "A2", "A3", "C2", "G2"]))
def test_numeric_functional_equation(label, p):
    rec = record_of(label, p)
    z = zhat_of(label, p)
    for s in (complex(0.3, 7), complex(-2.2, 15.5), complex(1.7, -3.1)):
        a, b = eval_expression(z, s), eval_expression(z, -rec.c - s)
        assert abs(a - b) < 1e-10 * max(1.0, abs(a))


@pytest.mark.parametrize("label,p", cases(["A1", "A2", "G2"]))
def test_line_function_real(label, p):
    rec = record_of(label, p)
    for t in (0.0, 3.3, 17.9, 29.0):
        v = line_function(rec, t)
        assert isinstance(v, float)
    if rec.line_sign == -1:
        # phi is odd, so t = 0 is a forced zero
        assert abs(line_function(rec, 0.0)) < 1e-12
        assert line_function(rec, 5.0) == pytest.approx(-line_function(rec, -5.0), rel=1e-9)
    else:
        assert line_function(rec, 5.0) == pytest.approx(line_function(rec, -5.0), rel=1e-9)


def test_riemann_zeros_self_consistent():
    ours = riemann_zero_ordinates(10)
    for n, t in enumerate(ours, start=1):
        assert abs(t - float(mpmath.zetazero(n).imag)) < 1e-8


def test_a1_zeros_on_line():
    rep = scan_zeros_on_line(record_of("A1", 1), 30, rectangle=True)
    assert rep.line_count == rep.rectangle_count >= 1
    for z in rep.zeros:
        assert z.re_deviation < 1e-8
        assert z.simple
        assert z.residual < 1e-10


def test_a1_box_count():
    # the box [-2.5, 0.5] x [0, 30] holds the ordinates below 30 of the A1 line scan
    rep = scan_zeros_on_line(record_of("A1", 1), 30)
    n = count_zeros_rectangle(record_of("A1", 1), -2.5, 0.5, 0.0, 30.0)
    assert n == rep.line_count
    assert count_zeros_rectangle(record_of("A1", 1), -2.5, 0.5, 0.0, 10.0) == 0


def test_rectangle_counts_riemann_zeros():
    prob = riemann_xi_problem()
    assert count_zeros_rectangle(prob, 0.0, 1.0, 0.0, 30.0) == 3
    assert count_zeros_rectangle(prob, 0.0, 1.0, 0.0, 14.0) == 0


def test_shifted_problem_moves_the_line():
    prob = shifted_xi_problem(Fraction(3, 2))
    assert prob.center == -1
    rep = scan_zeros_on_line(prob, 26)
    assert rep.ordinates() == pytest.approx(riemann_zero_ordinates(3), abs=1e-10)


def test_csv_emitters():
    rep = scan_zeros_on_line(record_of("A1", 1), 20)
    lines = zeros_csv(rep).strip().splitlines()
    assert lines[0] == "t,residual,re_deviation,simple"
    assert len(lines) == 1 + rep.line_count
    tr = trace_csv(record_of("A1", 1), [0.0, 1.0, 2.0]).strip().splitlines()
    assert len(tr) == 4


@pytest.mark.parametrize("label,p", cases(["A1", "A2", "A3", "C2", "G2"]))
def test_modulus_ratio_bound(label, p):
    rec = record_of(label, p)
    res = check_prop_6_6(rec, rec.pd.group.w0)
    assert res.ok, res.witnesses
    assert res.max_ratio_off_line < 1
    for w in rec.pd.frak_Wp:
        assert check_prop_6_6(rec, w, samples=20).ok


@pytest.mark.parametrize("label,p", cases(["A1", "A2", "A3", "B3", "C2", "G2"]))
def test_zero_free_quotient(label, p):
    res = check_prop_6_7(record_of(label, p))
    assert res.ok and res.symbolic and math.isfinite(res.min_log_modulus)


def test_zero_free_negative_control():
    rec = record_of("A2", 1)
    exps = quotient_exponents(rec.tables)
    lowered = Counter({LinearFactor(f.k, f.c - 1): e for f, e in exps.items()})
    assert not check_prop_6_7(rec, exponents=lowered).ok


def test_zero_report_json_round_trips_17_digits():
    import json

    rep = scan_zeros_on_line(record_of("A1", 1), 20)
    back = json.loads(rep.to_json())
    assert back["zeros"][0]["t"] == rep.zeros[0].t
    assert cmath.isfinite(back["zeros"][0]["residual"])


def test_a1_first_zero_against_mpmath_root():
    mpmath.mp.dps = 30

    def zh(s):
        return mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2) * mpmath.zeta(s)

    ref = mpmath.findroot(lambda s: zh(s + 2) / s - zh(s + 1) / (s + 2), mpmath.mpc(-1, 15.5))
    assert abs(float(ref.real) + 1) < 1e-20
    rep = scan_zeros_on_line(record_of("A1", 1), 20)
    assert abs(rep.zeros[0].t - float(ref.imag)) < 1e-10


def test_shifted_xi_reproduces_ten_riemann_zeros():
    # xi(s + 3/2) has its zeros on Re s = -1, at the Riemann ordinates
    rep = scan_zeros_on_line(shifted_xi_problem(Fraction(3, 2)), 52)
    ours = rep.ordinates()[:10]
    assert len(ours) == 10
    assert max(abs(a - b) for a, b in zip(ours, riemann_zero_ordinates(10))) < 1e-8


def test_density_fit_recovers_riemann_von_mangoldt():
    # N(T) = T/(2 pi) log(T/(2 pi)) - T/(2 pi) + 7/8 + small
    c1, c2, c3 = density_fit(riemann_zero_ordinates(58, t_max=160))
    assert c1 == pytest.approx(1 / (2 * math.pi), rel=1e-2)
    assert c2 == pytest.approx(-(1 + math.log(2 * math.pi)) / (2 * math.pi), rel=1e-2)
    assert c3 == pytest.approx(7 / 8, abs=0.1)
    with pytest.raises(ValueError):
        density_fit([14.1, 21.0, 25.0])
