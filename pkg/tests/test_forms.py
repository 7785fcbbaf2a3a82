from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weilcalc.forms import (
    antisymmetrize_form,
    check_form_properties,
    make_semiform,
    normalization_factor,
    random_cube,
    tensor_semiforms,
    wedge,
    zero_form,
)
from weilcalc.harness.sampling import Sampler
from weilcalc.perm import all_permutations
from weilcalc.prolongation import assemble
from weilcalc.weil import FLOAT, RATIONAL, Context, WeilElement, WeilError

R = Context((), RATIONAL)
dx = make_semiform(1, components={(0,): 1}, m=2, label="dx")
dy = make_semiform(1, components={(1,): 1}, m=2, label="dy")
SQUARE = assemble(R, 2, {(): (0, 0), (1,): (1, 0), (2,): (0, 2), (1, 2): (5, 7)})


def test_component_semiform_examples():
    tangent = assemble(R, 1, {(): (3, 4), (1,): (1, 0)})
    assert dx(tangent) == 1
    one = make_semiform(0, components={(): 1}, m=2)
    assert one(assemble(R, 0, {(): (Fraction(1, 3), 9)})) == 1
    dxdy = make_semiform(2, components={(0, 1): 1}, m=2)
    assert dxdy(SQUARE) == 2


def test_tensor_examples():
    assert tensor_semiforms(dx, dy)(SQUARE) == 2
    one = make_semiform(0, components={(): 1}, m=2)
    s = Sampler(3, RATIONAL)
    theta = s.semiform(2, 2)
    g = s.cube(2, 2)
    assert tensor_semiforms(theta, one)(g) == theta(g)
    assert tensor_semiforms(one, theta)(g) == theta(g)


def test_antisymmetrize_examples():
    s = Sampler(4, RATIONAL)
    theta = s.semiform(2, 2)
    g = s.cube(2, 2)
    swap = all_permutations(2)[1]
    assert antisymmetrize_form(theta)(g) == theta(g) - theta(g.permute(swap))
    assert antisymmetrize_form(antisymmetrize_form(theta))(g) == 2 * antisymmetrize_form(theta)(g)
    assert antisymmetrize_form(tensor_semiforms(dx, dy), (1, 1))(g) == wedge(dx, dy)(g)


def test_wedge_examples():
    assert wedge(dx, dy)(SQUARE) == 2
    s = Sampler(5, RATIONAL)
    theta = s.semiform(2, 1)
    for _ in range(5):
        assert wedge(theta, theta)(s.cube(2, 2)) == 0


def test_normalization_factor():
    assert normalization_factor("raw", 4) == 1
    assert normalization_factor((2, 1), 3) == Fraction(1, 2)
    assert normalization_factor((2, 1, 2), 5) == Fraction(1, 4)
    with pytest.raises(WeilError):
        normalization_factor((1, 1), 3)


def _flags(props):
    return props.homogeneous, props.alternating


def test_check_form_properties_examples():
    assert _flags(check_form_properties(wedge(dx, dy))) == (True, True)
    assert _flags(check_form_properties(tensor_semiforms(dx, dy))) == (True, False)
    assert _flags(check_form_properties(zero_form(2, 2))) == (True, True)
    assert _flags(check_form_properties(wedge(dx, dy), kind=RATIONAL, tol=0)) == (True, True)
    with pytest.raises(WeilError):
        check_form_properties(dx, trials=0)


def _classical_wedge_value(forms, vectors):
    """Oracle: alternating sum over S_n of prod omega_a(v_sigma(a)), scaled by 1/prod(deg!) for 1-forms."""
    n = len(forms)
    total = 0.0
    for sigma in itertools.permutations(range(n)):
        sign = np.linalg.det(np.eye(n)[list(sigma)])
        total += sign * np.prod([f @ vectors[s] for f, s in zip(forms, sigma)])
    return total


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_wedge_of_constant_covectors_is_a_determinant(seed):
    rng = np.random.default_rng(seed)
    cov = rng.uniform(-2, 2, (3, 3))
    forms = [make_semiform(1, components={(j,): float(c[j]) for j in range(3)}, m=3) for c in cov]
    g = random_cube(rng, 3, 3)
    vecs = [np.array([v.scalar_part for v in g.b({a})]) for a in (1, 2, 3)]
    got = wedge(wedge(forms[0], forms[1]), forms[2])(g).scalar_part
    assert got == pytest.approx(_classical_wedge_value(cov, vecs), rel=1e-12, abs=1e-12)
    assert got == pytest.approx(np.linalg.det(cov @ np.array(vecs).T), rel=1e-12, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 2), st.integers(0, 2), st.integers(0, 1))
def test_alternation_identities(seed, p, q, r):
    s = Sampler(seed, RATIONAL)
    t1, t2, t3 = s.semiform(2, p), s.semiform(2, q), s.semiform(2, r)
    g = s.cube(2, p + q + r)
    full = antisymmetrize_form(tensor_semiforms(tensor_semiforms(t1, t2), t3), (p, q, r))(g)
    inner = antisymmetrize_form(tensor_semiforms(t2, t3), (q, r))
    assert antisymmetrize_form(tensor_semiforms(t1, inner), (p, q + r))(g) == full
    inner = antisymmetrize_form(tensor_semiforms(t1, t2), (p, q))
    assert antisymmetrize_form(tensor_semiforms(inner, t3), (p + q, r))(g) == full
    assert wedge(wedge(t1, t2), t3)(g) == wedge(t1, wedge(t2, t3))(g)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 3))
def test_alternation_produces_forms(seed, n):
    s = Sampler(seed, RATIONAL)
    theta = s.nonlinear_semiform(2, n)
    at = antisymmetrize_form(theta)
    g = s.cube(2, n)
    for sigma in all_permutations(n):
        assert at(g.permute(sigma)) == at(g) * sigma.sign
    i = s.integer(1, n)
    alpha = s.scalar()
    assert at(g.scale(i, alpha)) == at(g) * alpha


def test_semiform_linear_structure(rsampler):
    a, b = rsampler.semiform(2, 2), rsampler.semiform(2, 2)
    g = rsampler.cube(2, 2)
    assert (a + b)(g) == a(g) + b(g)
    assert (a - b)(g) == a(g) - b(g)
    assert (-a)(g) == -a(g)
    assert (Fraction(3, 2) * a)(g) == a(g) * Fraction(3, 2)
    swap = all_permutations(2)[1]
    assert a.reparametrize(swap)(g) == a(g.permute(swap))
    with pytest.raises(WeilError):
        a + rsampler.semiform(2, 1)
    with pytest.raises(WeilError):
        a(rsampler.cube(2, 1))


def test_evaluation_in_extended_context(fsampler):
    """Semiforms are context-generic: evaluating over W_D coefficients commutes with taking parts."""
    from weilcalc.weil import W_D

    theta = fsampler.semiform(2, 1)
    g0, g1 = fsampler.cube(2, 1), fsampler.cube(2, 1)
    ctx = Context((W_D,), FLOAT)
    entries = {}
    for S in ((), (1,)):
        entries[S] = tuple(WeilElement(ctx, [a.scalar_part, b.scalar_part]) for a, b in zip(g0.b(S), g1.b(S)))
    g = assemble(ctx, 1, entries)
    v = theta(g)
    assert v.coeffs[0].scalar_part == pytest.approx(theta(g0).scalar_part)
    eps = 1e-6
    bumped = assemble(Context((), FLOAT), 1, {S: tuple(a + eps * b for a, b in zip(g0.b(S), g1.b(S)))
                                             for S in ((), (1,))})
    fd = (theta(bumped).scalar_part - theta(g0).scalar_part) / eps
    assert v.coeffs[1].scalar_part == pytest.approx(fd, rel=1e-4, abs=1e-4)
