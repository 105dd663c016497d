from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from altcsit.errors import InvalidPmf
from altcsit.region import (Case, CsitState, DofPoint, DofRegion, LambdaPmf,
                            Marginals, as_fraction, case_of, contains,
                            convex_order, corner_points, marginals, min_csit,
                            region_from_marginals, region_from_pmf,
                            regions_equal, sum_dof)
from conftest import pmf, pmfs


def ineq(a, b, c):
    return (F(a), F(b), F(c))


def oracle_region(lp, ld):
    # the five bounds written out directly
    return DofRegion((ineq(1, 0, 1), ineq(0, 1, 1), ineq(1, 2, 2 + lp),
                      ineq(2, 1, 2 + lp), ineq(1, 1, 1 + lp + ld)))


def M(p, d, n):
    return Marginals(F(p), F(d), F(n))


# --- construction -----------------------------------------------------------

def test_pmf_rejects_bad_input():
    with pytest.raises(InvalidPmf):
        LambdaPmf.from_mapping({'PD': '1/2', 'NN': '1/2'})            # DP missing
    with pytest.raises(InvalidPmf):
        pmf(PP='1/2')                                                 # sums to 1/2
    with pytest.raises(InvalidPmf):
        pmf(PP='3/2', NN='-1/2')
    with pytest.raises(InvalidPmf):
        LambdaPmf.from_mapping({'PD': '1/4', 'DP': '1/3', 'NN': '5/12'}, mirror=True)
    with pytest.raises(TypeError):
        as_fraction(0.5)


def test_pmf_mirroring_and_lookup():
    p = pmf(PD='1/2')
    assert p['DP'] == F(1, 2) and p[CsitState.PD] == F(1, 2)
    assert LambdaPmf.from_mapping({'PD': '1/2', 'DP': '1/2'}) == p


def test_state_dominance():
    assert CsitState.PD.dominates(CsitState.DN)
    assert CsitState.DD.dominates(CsitState.ND)
    assert not CsitState.DN.dominates(CsitState.PN)
    assert CsitState.PN.swap() is CsitState.NP


# --- marginals --------------------------------------------------------------

@pytest.mark.parametrize('kw, expected', [
    (dict(PD='1/2'), (F(1, 2), F(1, 2), F(0))),
    (dict(DD='1/5', PN='2/5'), (F(2, 5), F(1, 5), F(2, 5))),
    (dict(NN=1), (F(0), F(0), F(1))),
])
def test_marginals_examples(kw, expected):
    m = marginals(pmf(**kw))
    assert (m.lambda_p, m.lambda_d, m.lambda_n) == expected


def test_marginals_must_sum_to_one():
    with pytest.raises(InvalidPmf):
        M(F(1, 2), F(1, 2), F(1, 2))


# --- region -----------------------------------------------------------------

@pytest.mark.parametrize('kw, lp, ld', [
    (dict(PP=1), 1, 0),
    (dict(NN=1), 0, 0),
    (dict(PN='1/2'), F(1, 2), 0),
])
def test_region_from_pmf_examples(kw, lp, ld):
    assert regions_equal(region_from_pmf(pmf(**kw)), oracle_region(F(lp), F(ld)))


def test_region_from_pmf_pp_text():
    # d1+2d2<=3, 2d1+d2<=3, d1+d2<=2 alongside the unit box
    r = region_from_pmf(pmf(PP=1))
    for p in [DofPoint(1, 1)]:
        assert r.contains(p)
    assert not r.contains(DofPoint(F(11, 10), 0))


@pytest.mark.parametrize('m, lp, ld', [
    (M(1, 0, 0), 1, 0),
    (M(F(1, 2), 0, F(1, 2)), F(1, 2), 0),
    (M(0, F(1, 3), F(2, 3)), 0, F(1, 3)),
])
def test_region_from_marginals_examples(m, lp, ld):
    assert regions_equal(region_from_marginals(m), oracle_region(F(lp), F(ld)))


def test_region_from_marginals_pp_matches_pmf():
    assert regions_equal(region_from_marginals(M(1, 0, 0)), region_from_pmf(pmf(PP=1)))


def test_mat_region_sum_bound():
    # listed, though redundant on the case boundary: the apex already sums to 4/3
    r = region_from_marginals(M(0, F(1, 3), F(2, 3)))
    assert ineq(1, 1, F(4, 3)) in r.inequalities
    assert ineq(1, 1, F(4, 3)) not in r.irredundant().inequalities
    assert DofPoint(F(2, 3), F(2, 3)) in r.vertices()


def test_regions_equal_examples():
    r = region_from_pmf(pmf(PD='1/2'))
    assert regions_equal(r, r)
    assert regions_equal(r, region_from_pmf(pmf(PP='1/2', DD='1/2')))
    assert not regions_equal(region_from_pmf(pmf(PP=1)), region_from_pmf(pmf(NN=1)))


def test_regions_equal_ignores_scaling_and_redundancy():
    r = oracle_region(F(1, 2), F(1, 2))
    scaled = DofRegion(tuple((3 * a, 3 * b, 3 * c) for a, b, c in r.inequalities) + (ineq(1, 1, 5),))
    assert regions_equal(r, scaled)


# --- sum-DoF, case, corners -------------------------------------------------

@pytest.mark.parametrize('m, expected', [
    (M(F(1, 2), F(1, 2), 0), F(5, 3)),
    (M(F(2, 5), F(1, 5), F(2, 5)), F(8, 5)),
    (M(F(1, 2), 0, F(1, 2)), F(3, 2)),
    (M(0, 0, 1), F(1)),
    (M(F(1, 4), F(1, 4), F(1, 2)), F(3, 2)),
])
def test_sum_dof_examples(m, expected):
    assert sum_dof(m) == expected


@pytest.mark.parametrize('m, expected', [
    (M(F(1, 2), F(1, 2), 0), Case.A),
    (M(F(1, 2), 0, F(1, 2)), Case.B),
    (M(0, F(1, 3), F(2, 3)), Case.A),
])
def test_case_examples(m, expected):
    assert case_of(m) is expected


def test_corner_examples():
    pts = corner_points(M(F(2, 5), F(1, 5), F(2, 5)))
    assert DofPoint(1, F(2, 5)) in pts and DofPoint(F(4, 5), F(4, 5)) in pts
    assert set(corner_points(M(1, 0, 0))) == {DofPoint(0, 0), DofPoint(1, 0), DofPoint(0, 1), DofPoint(1, 1)}
    pts = corner_points(M(F(1, 2), 0, F(1, 2)))
    assert DofPoint(1, F(1, 2)) in pts and DofPoint(F(1, 2), 1) in pts


def test_contains_examples():
    assert contains(region_from_marginals(M(F(2, 5), F(1, 5), F(2, 5))), DofPoint(F(4, 5), F(4, 5)))
    assert not contains(region_from_pmf(pmf(NN=1)), DofPoint(1, 1))
    assert contains(region_from_marginals(M(F(1, 2), F(1, 2), 0)), DofPoint(1, F(1, 2)))


@pytest.mark.parametrize('dof, expected', [
    (F(8, 5), (F(2, 5), F(1, 5))),
    (F(2), (F(1), F(0))),
    (F(4, 3), (F(0), F(1, 3))),
    (F(1, 2), (F(0), F(0))),
])
def test_min_csit_examples(dof, expected):
    assert min_csit(dof) == expected


def test_min_csit_rejects_out_of_range():
    with pytest.raises(ValueError):
        min_csit(F(21, 10))
    with pytest.raises(ValueError):
        min_csit(F(-1, 10))


# --- properties -------------------------------------------------------------

@given(pmfs())
def test_same_marginals(p):
    assert regions_equal(region_from_pmf(p), region_from_marginals(marginals(p)))


@given(pmfs())
def test_region_symmetric(p):
    r = region_from_pmf(p)
    assert regions_equal(r, r.swapped())


@given(pmfs())
def test_region_matches_oracle(p):
    m = marginals(p)
    assert regions_equal(region_from_pmf(p), oracle_region(m.lambda_p, m.lambda_d))


@given(pmfs())
def test_sum_dof_is_max_over_corners(p):
    m = marginals(p)
    assert sum_dof(m) == max(c.d1 + c.d2 for c in corner_points(m))


@given(pmfs())
def test_sum_dof_range(p):
    m = marginals(p)
    s = sum_dof(m)
    assert s >= 1
    assert (s == 2) == (m.lambda_p == 1)


@given(st.integers(60, 120))
def test_min_csit_round_trip(k):
    dof = F(k, 60)
    lp, ld = min_csit(dof)
    assert sum_dof(Marginals(lp, ld, 1 - lp - ld)) == dof


@given(pmfs(), st.integers(-30, 30))
def test_cost_of_delay_dichotomy(p, k):
    m = marginals(p)
    shift = F(k, 60)
    if case_of(m) is Case.A:
        # move mass between D and N with P fixed, staying in case A
        d, n = m.lambda_d + shift, m.lambda_n - shift
        if d >= 0 and n >= 0 and n <= 2 * d:
            assert sum_dof(Marginals(m.lambda_p, d, n)) == sum_dof(m)
    else:
        assert sum_dof(m) == 1 + m.lambda_p + m.lambda_d
        # trade D for P one for one
        pp, d = m.lambda_p + shift, m.lambda_d - shift
        if pp >= 0 and d >= 0 and m.lambda_n > 2 * d:
            assert sum_dof(Marginals(pp, d, m.lambda_n)) == sum_dof(m)


@given(pmfs())
def test_corners_lie_on_two_boundaries(p):
    r = region_from_pmf(p)
    lines = list(r.inequalities) + [ineq(-1, 0, 0), ineq(0, -1, 0)]
    for c in corner_points(marginals(p)):
        tight = {(a, b) for a, b, rhs in lines if a * c.d1 + b * c.d2 == rhs}
        assert len(tight) >= 2


@given(pmfs())
@settings(max_examples=50)
def test_convex_order_is_counter_clockwise(p):
    pts = convex_order(corner_points(marginals(p)))
    n = len(pts)
    for i in range(n):
        a, b, c = pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
        cross = (b.d1 - a.d1) * (c.d2 - b.d2) - (b.d2 - a.d2) * (c.d1 - b.d1)
        assert cross > 0


def test_all_arithmetic_exact():
    m = marginals(pmf(DD='1/5', PN='2/5'))
    assert all(isinstance(x, F) for x in (m.lambda_p, m.lambda_d, sum_dof(m)))
    for a, b, c in region_from_marginals(m).inequalities:
        assert all(isinstance(x, F) for x in (a, b, c))


small = st.fractions(min_value=-3, max_value=4, max_denominator=3)


@given(st.lists(st.tuples(small, small, st.fractions(0, 6, max_denominator=3)), max_size=5),
       st.integers(0, 5), st.integers(0, 5))
@settings(max_examples=300)
def test_irredundant_is_minimal(rows, cap1, cap2):
    r = DofRegion(tuple(rows) + (ineq(1, 0, cap1), ineq(0, 1, cap2)))
    try:
        verts = r.vertices()
    except ValueError:
        return
    kept = r.irredundant()
    assert kept.vertices() == verts
    # every kept row is needed: removing it changes the polygon
    for row in kept.inequalities:
        rest = DofRegion(tuple(x for x in kept.inequalities if x != row))
        try:
            assert rest.vertices() != verts
        except ValueError:
            pass


def test_unbounded_rejected():
    with pytest.raises(ValueError):
        DofRegion((ineq(1, -1, 1),)).vertices()


@given(st.integers(81, 120))
def test_min_csit_is_minimal(k):
    # giving up 1/600 of either kind of CSIT (to no CSIT) drops below the target
    dof = F(k, 60)
    lp, ld = min_csit(dof)
    eps = F(1, 600)
    if lp >= eps:
        assert sum_dof(Marginals(lp - eps, ld, 1 - lp - ld + eps)) < dof
    if ld >= eps:
        assert sum_dof(Marginals(lp, ld - eps, 1 - lp - ld + eps)) < dof
