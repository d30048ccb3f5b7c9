import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wengzeta.errors import CapExceeded, NotInFrakWp
from wengzeta.weyl import (
    classical_order,
    classify,
    delta_indicator,
    enumerate_weyl,
    involution,
    inversion_set,
    l_p,
)

from conftest import group_of, pd_of, rs_of

SMALL = ["A1", "A2", "A3", "B2", "B3", "C3", "G2"]


@pytest.mark.parametrize("label,order", [("A1", 2), ("A2", 6), ("A3", 24), ("B3", 48), ("G2", 12), ("F4", 1152), ("D4", 192)])
def test_group_order(label, order):
    g = group_of(label)
    assert g.order == order == classical_order(rs_of(label))


def test_cap():
    with pytest.raises(CapExceeded):
        enumerate_weyl(rs_of("F4"), cap=1000)


def test_inversion_sets():
    g = group_of("A2")
    rs = rs_of("A2")
    assert inversion_set(g, g.identity) == []
    assert inversion_set(g, g.w0) == list(range(rs.n_pos))
    s1 = next(w for w in range(g.order) if g.word(w) == (1,))
    assert inversion_set(g, s1) == [rs.index_of((1, 0))]
    assert delta_indicator(g, s1, rs.index_of((1, 0))) == 0
    assert delta_indicator(g, g.identity, 0) == 1
    assert delta_indicator(g, g.w0, 0) == 0


@pytest.mark.parametrize("label", SMALL)
def test_lengths_equal_inversion_counts(label):
    g = group_of(label)
    for w in range(g.order):
        assert len(inversion_set(g, w)) == g.lengths[w] == len(g.word(w))


def test_frak_wp_brute_force_a2():
    rs, g = rs_of("A2"), group_of("A2")
    for p in (1, 2):
        pd = pd_of("A2", p)
        simple = set(rs.simple)
        other = rs.simple[2 - p]
        brute = [w for w in range(g.order) if g.perms[w][other] in simple or g.perms[w][other] >= rs.n_pos]
        assert list(pd.frak_Wp) == brute
        assert {g.identity, g.w0, pd.wp} <= set(pd.frak_Wp)
    # Delta_p empty: every element qualifies
    assert len(pd_of("A1", 1).frak_Wp) == 2


def test_lp_endpoints():
    for label in SMALL:
        for p in range(1, rs_of(label).rank + 1):
            pd = pd_of(label, p)
            g = pd.group
            assert l_p(pd, g.identity) == 0
            assert l_p(pd, g.w0) == len(pd.outside_levi)


@pytest.mark.parametrize("label", ["A3", "B3", "G2"])
def test_lp_constant_on_cosets(label):
    g = group_of(label)
    for p in range(1, rs_of(label).rank + 1):
        pd = pd_of(label, p)
        for w in pd.frak_Wp[:20]:
            for v in pd.Wp_members:
                assert l_p(pd, g.mul(w, v)) == l_p(pd, w)


def test_classes_a1():
    pd = pd_of("A1", 1)
    g = pd.group
    c = classify(pd)
    assert c["plus"] == (g.identity,)
    assert c["minus"] == (g.w0,)
    assert c["zero"] == ()
    assert c["ddagger"] == (g.identity,)


@pytest.mark.parametrize("label", SMALL)
def test_involution_swaps_plus_and_minus(label):
    for p in range(1, rs_of(label).rank + 1):
        pd = pd_of(label, p)
        c = classify(pd)
        total = len(pd.outside_levi)
        assert {involution(pd, w) for w in c["minus"]} == set(c["plus"])
        assert {involution(pd, w) for w in c["zero"]} == set(c["zero"])
        for w in pd.frak_Wp:
            v = involution(pd, w)
            assert v in pd.lp
            assert involution(pd, v) == w
            assert l_p(pd, w) + l_p(pd, v) == total
        g = pd.group
        assert involution(pd, g.identity) == g.mul(g.w0, pd.wp)


def test_involution_rejects_outsiders():
    pd = pd_of("A2", 1)
    outside = next(w for w in range(pd.group.order) if w not in pd.lp)
    with pytest.raises(NotInFrakWp):
        involution(pd, outside)


def test_wp_is_longest_of_levi():
    for label in SMALL:
        for p in range(1, rs_of(label).rank + 1):
            pd = pd_of(label, p)
            g = pd.group
            assert set(inversion_set(g, pd.wp)) == set(pd.phi_p_plus)
            assert g.lengths[pd.wp] == max(g.lengths[w] for w in pd.Wp_members)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_multiplication_matches_permutations(label, data):
    g = group_of(label)
    a = data.draw(st.integers(0, g.order - 1))
    b = data.draw(st.integers(0, g.order - 1))
    ab = g.mul(a, b)
    assert np.array_equal(g.perms[ab], g.perms[a][g.perms[b]])
    assert g.mul(a, g.inverse(a)) == g.identity


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_word_reconstructs_element(label, data):
    g = group_of(label)
    w = data.draw(st.integers(0, g.order - 1))
    cur = g.identity
    gens = {g.word(x)[0]: x for x in range(g.order) if len(g.word(x)) == 1}
    for i in g.word(w):
        cur = g.mul(cur, gens[i])
    assert cur == w


def test_parabolic_json():
    import json

    d = json.loads(pd_of("A2", 2).to_json())
    assert d["weyl_order"] == 6
    assert d["frak_Wp_size"] == len(pd_of("A2", 2).frak_Wp)
    assert sum(d["class_sizes"][k] for k in ("plus", "zero", "minus")) == d["frak_Wp_size"]


def test_perm_rows_are_permutations():
    g = group_of("B3")
    n = g.rs.n_roots
    for row in itertools.islice(g.perms, 0, g.order, 7):
        assert sorted(row) == list(range(n))
