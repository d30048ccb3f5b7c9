from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from wengzeta.symbolic import (
    ConstantCombo,
    FactoredRational,
    LinearFactor,
    ZetaExpression,
    ZhatMonomial,
    M0_bruteforce,
    P_polynomials,
    R_coefficients,
    canonical_form,
    check_functional_equation,
    constant_index_sets,
    degree_gap_check,
    exponents_zero_free,
    from_json,
    lemma_10_3_constant,
    levi_residue_oracle,
    omega_p,
    quotient_exponents,
    quotient_identity_holds,
    reconstruction_holds,
    render,
    substitute_reflect,
    termwise_pairing,
    zhat_p,
)

from conftest import SWEEP, cases, group_of, pd_of, record_of, rs_of, tables_of, zhat_of


def term(scalar=1, const=(), num=(), den=(), mono=()):
    """One term: scalar * prod zhat(n) * prod(num)/prod(den) * prod zhat(k s + c)^e.

    Linear factors are (k, c) pairs, zhat arguments (k, c, e) triples.
    """
    coeff = ConstantCombo.monomial(ZhatMonomial.from_map([(LinearFactor(0, n), 1) for n in const]))
    rat = FactoredRational.build(scalar, [LinearFactor(*f) for f in num], [LinearFactor(*f) for f in den])
    m = ZhatMonomial.from_map([(LinearFactor(k, c), e) for k, c, e in mono])
    return coeff, rat, m


def expr(*terms):
    return ZetaExpression.from_terms(terms)


# zhat(s+2)/s - zhat(s+1)/(s+2)
SL2 = expr(term(den=[(1, 0)], mono=[(1, 2, 1)]), term(-1, den=[(1, 2)], mono=[(1, 1, 1)]))

# (zhat(2)/s - 1/(2(s+1))) zhat(s+3) - zhat(s+2)/(s(s+3)) - (zhat(2)/(s+3) - 1/(2(s+2))) zhat(s+1)
SL3 = expr(
    term(const=[2], den=[(1, 0)], mono=[(1, 3, 1)]),
    term(Fraction(-1, 2), den=[(1, 1)], mono=[(1, 3, 1)]),
    term(-1, den=[(1, 0), (1, 3)], mono=[(1, 2, 1)]),
    term(-1, const=[2], den=[(1, 3)], mono=[(1, 1, 1)]),
    term(Fraction(1, 2), den=[(1, 2)], mono=[(1, 1, 1)]),
)


def test_omega_a1():
    got = omega_p(rs_of("A1"), group_of("A1"), pd_of("A1", 1))
    want = expr(term(den=[(1, 0)]), term(-1, den=[(1, 2)], mono=[(1, 1, 1), (1, 2, -1)]))
    assert got.equals(want)


def test_zhat_a1_matches_sl2_display():
    assert zhat_of("A1", 1).equals(SL2)
    assert render(zhat_of("A1", 1)) == "zhat(s+2)/s - zhat(s+1)/(s+2)"


@pytest.mark.parametrize("p", [1, 2])
def test_zhat_a2_matches_sl3_display(p):
    assert zhat_of("A2", p).equals(SL3)


def test_equals_is_not_fooled_by_a_changed_constant():
    wrong = SL3 + expr(term(Fraction(1, 100), den=[(1, 1)], mono=[(1, 3, 1)]))
    assert not zhat_of("A2", 1).equals(wrong)


def test_reflect_constant_unchanged():
    c = ZetaExpression.constant(Fraction(3, 7))
    assert substitute_reflect(c, 5).equals(c)


def test_reflect_by_hand():
    # zhat(s+1)/(s+2) under s -> -2 - s is zhat(-s-1)/(-s) = zhat(s+2)/(-s)
    got = substitute_reflect(expr(term(den=[(1, 2)], mono=[(1, 1, 1)])), 2)
    assert got.equals(expr(term(-1, den=[(1, 0)], mono=[(1, 2, 1)])))


def test_fe_a1():
    z = zhat_of("A1", 1)
    assert check_functional_equation(z, 2).ok
    bad = check_functional_equation(z, 3)
    assert not bad.ok and bad.report


@pytest.mark.parametrize("label,p", cases(SWEEP))
def test_fe_sweep(label, p):
    z = zhat_of(label, p)
    assert check_functional_equation(z, tables_of(label, p).c_p, 1).ok


def test_render_empty_and_latex():
    assert render(ZetaExpression.zero()) == "0"
    tex = render(SL2, "latex")
    assert "\\hat{\\zeta}(s+2)" in tex
    with pytest.raises(ValueError):
        render(SL2, "rtf")


@pytest.mark.parametrize("label,p", [("A1", 1), ("A2", 1), ("B3", 2), ("G2", 1)])
def test_json_round_trip(label, p):
    z = zhat_of(label, p)
    back = from_json(render(z, "json"))
    assert back == z
    assert back.equals(z)


@pytest.mark.parametrize("label,p", cases(["A1", "A2", "A3", "B3", "C2", "G2"]))
def test_zhat_has_no_denominator_zeta(label, p):
    for coeff, _, mono in zhat_of(label, p).terms:
        assert mono.min_exponent() >= 0
        for cm, _ in coeff.items:
            assert cm.min_exponent() >= 0


@pytest.mark.parametrize("label,p", cases(["A1", "A2", "A3", "B2", "B3", "C3", "G2"]))
def test_constant_multiplier_is_minimal(label, p):
    rs, g, pd, t = rs_of(label), group_of(label), pd_of(label, p), tables_of(label, p)
    z = zhat_p(rs, t, omega_p(rs, g, pd, t), details=True)
    assert z.M0 == M0_bruteforce(rs, g, pd)


@pytest.mark.parametrize("label,p", cases(["A1", "A2", "A3", "B2", "B3", "C2", "C3", "G2"]))
def test_termwise_pairing(label, p):
    ok, report = termwise_pairing(record_of(label, p))
    assert ok, report


@pytest.mark.parametrize("label,p", cases(["A1", "A2", "A3", "B2", "B3", "C2", "C3", "G2"]))
def test_reconstruction_and_quotient(label, p):
    rec = record_of(label, p)
    assert reconstruction_holds(rec)
    assert quotient_identity_holds(rec)
    assert exponents_zero_free(rec)


def test_zero_free_negative_control():
    t = tables_of("A2", 1)
    exps = quotient_exponents(t)
    assert exponents_zero_free(exps, t.c_p)
    # lowering every h by one pushes a factor across the line
    lowered = Counter({LinearFactor(f.k, f.c - 1): e for f, e in exps.items()})
    assert not exponents_zero_free(lowered, t.c_p)


def test_a1_quotient_exponent():
    t = tables_of("A1", 1)
    # N(1,1) - N(1,2) = 1 at h = 2, and (1 - 2)/1 = -1 = -c_p/2 sits on the boundary
    assert quotient_exponents(t) == Counter({LinearFactor(1, 2): 1})
    assert exponents_zero_free(quotient_exponents(t), t.c_p)


def test_leading_constant_a1():
    c = lemma_10_3_constant(rs_of("A1"), group_of("A1"), pd_of("A1", 1))
    assert c.as_scalar() == 1


@pytest.mark.parametrize("label,p", cases(SWEEP))
def test_leading_constant_matches_levi_residue(label, p):
    rs, g, pd = rs_of(label), group_of(label), pd_of(label, p)
    left, right = constant_index_sets(rs, g, pd)
    assert left == right
    assert lemma_10_3_constant(rs, g, pd) == levi_residue_oracle(rs, g, pd)


@pytest.mark.parametrize("label,p", cases(SWEEP))
def test_degree_gap(label, p):
    assert degree_gap_check(record_of(label, p))


def test_xi_basis_agrees_with_zhat_basis():
    rec = record_of("A2", 1)
    assert rec.xi_p.to_zhat().basis == "zhat"
    # the xi form of the line function is a rescaling of zhat_p by a fixed rational
    assert check_functional_equation(rec.xi_p, rec.c, rec.line_sign).ok


# ---------------------------------------------------------------------------
# properties

small = st.integers(-6, 6)
factor = st.tuples(st.integers(1, 3), small)
zhat_arg = st.tuples(st.integers(1, 3), small, st.integers(-2, 2))
terms = st.lists(
    st.tuples(
        st.builds(Fraction, st.integers(-20, 20), st.integers(1, 6)),
        st.lists(st.integers(2, 5), max_size=2),
        st.lists(factor, max_size=2),
        st.lists(factor, max_size=2),
        st.lists(zhat_arg, max_size=2),
    ),
    max_size=4,
)


def build(ts):
    return expr(*[term(sc, const, num, den, mono) for sc, const, num, den, mono in ts])


@settings(max_examples=80, deadline=None)
@given(terms, st.integers(-4, 6))
def test_reflection_is_an_involution(ts, c):
    e = build(ts)
    assert substitute_reflect(substitute_reflect(e, c), c).equals(e)


@settings(max_examples=80, deadline=None)
@given(terms, st.integers(-4, 6))
def test_symmetrized_expression_satisfies_fe(ts, c):
    e = build(ts)
    sym = e + substitute_reflect(e, c)
    assert check_functional_equation(sym, c, 1).ok
    anti = e - substitute_reflect(e, c)
    assert check_functional_equation(anti, c, -1).ok


@settings(max_examples=80, deadline=None)
@given(terms, terms)
def test_canonical_form_ignores_term_order(a, b):
    x, y = build(a), build(b)
    assert (x + y).equals(y + x)
    assert canonical_form(x - x) == {}


@settings(max_examples=60, deadline=None)
@given(terms)
def test_json_round_trip_random(ts):
    e = build(ts)
    assert from_json(render(e, "json")).equals(e)


@settings(max_examples=60, deadline=None)
@given(st.integers(-3, 3).filter(bool), small)
def test_canonical_argument_uses_zhat_symmetry(k, c):
    f = LinearFactor(k, c)
    g = f.canonical_arg()
    assert g.k > 0
    assert g == LinearFactor(-k, 1 - c).canonical_arg()


def _eval_R(parts, s):
    out = {}
    for cm, (num, den) in parts.items():
        v = sum(c * s**i for i, c in enumerate(num))
        for f, m in den:
            v /= f(s) ** m
        out[cm] = v
    return out


@pytest.mark.parametrize("n", range(2, 7))
def test_sl_n_P_h_are_polynomials_of_bounded_degree(n):
    # SL(n) with the (n-1, 1) parabolic; p = 1 and p = n - 1 give the same function
    for p in {1, n - 1}:
        P = P_polynomials(zhat_of(f"A{n - 1}", p), n)
        assert sorted(P) == list(range(1, n + 1))
        assert len(P[n]) - 1 == n - 2
        for h in range(2, n):
            assert len(P[h]) - 1 <= n - 3


@pytest.mark.parametrize("n", range(2, 7))
def test_sl_n_R_h_reflect_onto_R_n_plus_1_minus_h(n):
    R = R_coefficients(zhat_of(f"A{n - 1}", 1))
    s = Fraction(3, 7)
    for h in R:
        assert _eval_R(R[h], -n - s) == _eval_R(R[n + 1 - h], s)
    # the unswapped symmetry fails already for SL(2)
    assert any(_eval_R(R[h], -n - s) != _eval_R(R[h], s) for h in R)


def test_R_coefficients_rejects_other_arguments():
    with pytest.raises(ValueError):
        R_coefficients(expr(term(mono=[(2, 1, 1)])))
