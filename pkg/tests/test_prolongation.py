from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weilcalc.harness.sampling import Sampler
from weilcalc.perm import Permutation
from weilcalc.prolongation import (
    AgreementViolation,
    Microcube,
    ProlongedPoint,
    TaylorTable,
    assemble,
    constant_point,
    d2_axis_hom,
    e_axis_hom,
    extract_d,
    extract_d_slot,
    from_taylor,
    general_jacobi_residual,
    glue,
    inclusion_hom,
    permutation_hom,
    phi_hom,
    psi_hom,
    restrict_along,
    scaling_hom,
    square_hom,
    strong_diff,
    strong_diff_slot,
    to_taylor,
)
from weilcalc.weil import FLOAT, RATIONAL, Context, D2_plus_D, W_D, WeilElement, WeilError, build_algebra

R = Context((), RATIONAL)


def cube1(entries: dict, n: int) -> Microcube:
    """m = 1 microcube from {subset: scalar}."""
    return assemble(R, n, {S: (Fraction(v),) for S, v in entries.items()})


def scalars(vec):
    return [v.scalar_part for v in vec]


def test_to_taylor_of_microsquare():
    g = cube1({(): 2, (1,): 3, (2,): 5, (1, 2): 7}, 2)
    t = to_taylor(g)
    assert {"".join(map(str, sorted(S))): scalars(v) for S, v in t.entries.items()} == {
        "": [2], "1": [3], "2": [5], "12": [7]}


def test_constant_point_has_zero_table():
    t = to_taylor(constant_point(R, [Fraction(4), Fraction(-1)], 3))
    for S, vec in t.entries.items():
        assert scalars(vec) == ([4, -1] if not S else [0, 0])


def test_taylor_of_d2_plus_d_point():
    w = build_algebra(D2_plus_D())
    ctx = R.extend(w)
    data = [Fraction(v) for v in (1, 2, 3, 4, 5)]  # basis 1, x1, x2, x3, x1x2
    p = ProlongedPoint((WeilElement(ctx, data),))
    t = to_taylor(p)
    assert len(t.entries) == 5
    assert sorted(scalars(v)[0] for v in t.entries.values()) == [1, 2, 3, 4, 5]
    assert from_taylor(t).coords[0] == p.coords[0]


def test_from_taylor_examples():
    t = TaylorTable.from_json({"m": 1, "n": 1, "table": {"": [3], "1": [5]}})
    g = from_taylor(t)
    assert g.coords[0] == WeilElement(R.extend(W_D), [Fraction(3), Fraction(5)])
    z = TaylorTable.from_json({"m": 2, "n": 2, "table": {}} | {"table": {"": [0, 0]}})
    assert from_taylor(z) == constant_point(R, [0, 0], 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 3), st.integers(0, 4))
def test_taylor_roundtrip(seed, m, n):
    s = Sampler(seed, RATIONAL)
    g = s.cube(m, n)
    t = to_taylor(g)
    assert from_taylor(t) == g
    assert TaylorTable.from_json(json.loads(json.dumps(t.to_json()))) == t


def test_table_json_rejects_bad_keys():
    with pytest.raises(WeilError):
        TaylorTable.from_json({"m": 1, "n": 1, "table": {"": [0], "2": [1]}})
    with pytest.raises(WeilError):
        TaylorTable.from_json({"m": 1, "n": 1, "table": {"": [0.5]}})


def test_restrictions():
    g = cube1({(): 1, (1,): 3}, 1)
    assert scalars(restrict_along(g, scaling_hom(1, 1, 2)).b({1})) == [6]
    sq = cube1({(): 1, (1,): 2, (2,): 3, (1, 2): 4}, 2)
    swapped = restrict_along(sq, permutation_hom(Permutation((2, 1))))
    assert [scalars(swapped.b(S))[0] for S in [(), (1,), (2,), (1, 2)]] == [1, 3, 2, 4]
    jet = restrict_along(g, square_hom())
    assert list(jet.coords[0].data) == [1, 0, 3]


def test_fast_paths_match_homs(rsampler):
    g = rsampler.cube(2, 3)
    sigma = Permutation((3, 1, 2))
    assert g.permute(sigma) == restrict_along(g, permutation_hom(sigma))
    assert g.scale(2, Fraction(-3, 2)) == restrict_along(g, scaling_hom(3, 2, Fraction(-3, 2)))


def test_extract_d():
    assert scalars(extract_d(cube1({(): 3, (1,): 5}, 1))) == [5]
    assert scalars(extract_d(constant_point(R, [Fraction(2)], 1))) == [0]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 3))
def test_d_of_d_slots_is_b12(seed, m):
    g = Sampler(seed, RATIONAL).cube(m, 2)
    d2 = extract_d(extract_d_slot(2, g))
    d1 = extract_d(extract_d_slot(1, g))
    assert d1 == d2 == g.b({1, 2})


def test_strong_difference_examples():
    g1 = cube1({(): 1, (1,): 2, (2,): 3, (1, 2): 7}, 2)
    g2 = cube1({(): 1, (1,): 2, (2,): 3, (1, 2): 3}, 2)
    for method in ("taylor", "glue"):
        t = strong_diff(g1, g2, method=method)
        assert scalars(t.base) == [1] and scalars(extract_d(t)) == [4]
        assert scalars(extract_d(strong_diff(g1, g1, method=method))) == [0]
    with pytest.raises(AgreementViolation):
        strong_diff(g1, cube1({(): 1, (1,): 9, (2,): 3, (1, 2): 3}, 2))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 3))
def test_strong_difference_is_top_coefficient_difference(seed, m):
    g1, g2 = Sampler(seed, RATIONAL).agreeing_pair(m)
    want = tuple(a - b for a, b in zip(g1.b({1, 2}), g2.b({1, 2})))
    assert extract_d(strong_diff(g1, g2, method="glue")) == want
    assert extract_d(strong_diff(g1, g2)) == want


def test_glue_is_inverse_of_restriction(rsampler):
    """Gluing two microsquares and restricting back recovers both."""
    g1, g2 = rsampler.agreeing_pair(2)
    from weilcalc.prolongation import _as_shape_point

    glued = glue([_as_shape_point(g2), _as_shape_point(g1)], [phi_hom(), psi_hom()])
    assert restrict_along(glued, phi_hom()) == g2
    assert restrict_along(glued, psi_hom()) == g1
    # the two axes of D(2) restrict to the common faces
    on_d2 = restrict_along(g1, inclusion_hom())
    assert restrict_along(on_d2, d2_axis_hom(1)).b({1}) == g1.b({1})


def test_strong_diff_slot_examples():
    common = {(): 1, (1,): 2, (2,): 3, (3,): 4, (1, 2): 6, (1, 3): 8}
    g1 = cube1(common | {(2, 3): 5, (1, 2, 3): 9}, 3)
    g2 = cube1(common | {(2, 3): 2, (1, 2, 3): 4}, 3)
    t = strong_diff_slot(1, g1, g2)
    got = {S: scalars(t.b(S))[0] for S in [(), (1,), (2,), (1, 2)]}
    assert got == {(): 1, (1,): 2, (2,): 3, (1, 2): 5}
    z = strong_diff_slot(2, g1, g1)
    assert scalars(z.b({2})) == [0] and scalars(z.b({1, 2})) == [0]
    common2 = {(): 1, (1,): 2, (2,): 3, (3,): 4, (1, 2): 6, (2, 3): 8}
    h1 = cube1(common2 | {(1, 3): 5, (1, 2, 3): 9}, 3)
    h2 = cube1(common2 | {(1, 3): 2, (1, 2, 3): 4}, 3)
    t = strong_diff_slot(2, h1, h2)
    assert {S: scalars(t.b(S))[0] for S in [(), (1,), (2,), (1, 2)]} == {(): 1, (1,): 3, (2,): 3, (1, 2): 5}


def test_general_jacobi_examples():
    same = cube1({(): 1, (1,): 2, (2,): 3, (3,): 4, (1, 2): 5, (1, 3): 6, (2, 3): 7, (1, 2, 3): 8}, 3)
    res = general_jacobi_residual({k: same for k in ("123", "132", "213", "231", "312", "321")})
    assert all(scalars(extract_d(e)) == [0] for e in (res.e1, res.e2, res.e3))
    base = {(): 1, (1,): 2, (2,): 3, (3,): 4, (1, 2): 5, (1, 3): 6, (2, 3): 7}
    fam = {k: cube1(base | {(1, 2, 3): v}, 3) for k, v in zip(("123", "132", "213", "231", "312", "321"), range(1, 7))}
    res = general_jacobi_residual(fam)
    assert [scalars(extract_d(e))[0] for e in (res.e1, res.e2, res.e3)] == [1, -2, 1]
    assert scalars(res.residual) == [0]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 3))
def test_general_jacobi_vanishes(seed, m):
    res = general_jacobi_residual(Sampler(seed, RATIONAL).jacobi_family(m))
    assert all(v == 0 for v in res.residual)


def test_general_jacobi_float_within_tolerance():
    s = Sampler(5, FLOAT)
    for _ in range(20):
        res = general_jacobi_residual(s.jacobi_family(2))
        assert max(v.max_abs() for v in res.residual) <= 1e-9


def test_inadmissible_family_is_rejected(rsampler):
    fam = rsampler.jacobi_family(2)
    fam["231"] = rsampler.cube(2, 3)
    with pytest.raises(AgreementViolation, match="expression"):
        general_jacobi_residual(fam)


def test_e_axis_reads_the_glued_difference(rsampler):
    g1, g2 = rsampler.agreeing_pair(1)
    from weilcalc.prolongation import _as_shape_point

    glued = glue([_as_shape_point(g2), _as_shape_point(g1)], [phi_hom(), psi_hom()])
    t = restrict_along(glued, e_axis_hom())
    assert extract_d(t) == extract_d(strong_diff(g1, g2))
