from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from weilcalc.forms import antisymmetrize_form, make_semiform, tensor_semiforms, wedge
from weilcalc.harness.sampling import Sampler
from weilcalc.icons import Icon, NotAForm, dirac, fn_bracket, lie_bracket_L, vector_field
from weilcalc.lie import convolve_with_form, lie_derivative, lie_hat
from weilcalc.perm import sigma_pq_r
from weilcalc.prolongation import Microcube, assemble
from weilcalc.smooth import const, eval_map, make_smooth_map, variables
from weilcalc.weil import FLOAT, RATIONAL, Context

R = Context((), RATIONAL)


def test_dirac_convolution_reads_last_face(rsampler):
    theta = rsampler.semiform(2, 2)
    g = rsampler.cube(2, 3)
    assert convolve_with_form(dirac(1, 2), theta)(g) == theta(g.face([2, 3]))


def test_degree_zero_distribution_pushes_the_cube_forward(rsampler):
    F = make_smooth_map(2, 2, [rsampler.polynomial(2) for _ in range(2)])
    eta = Icon(0, 0, lambda g: Microcube(tuple(eval_map(F, list(g.base), ctx=g.base_ctx)), 0), "F")
    theta = rsampler.semiform(2, 2)
    g = rsampler.cube(2, 2)
    pushed = Microcube(tuple(eval_map(F, list(g.coords))), 2)
    assert convolve_with_form(eta, theta)(g) == theta(pushed)


def test_functions_compose_with_distributions(rsampler):
    eta = Icon(0, 1, lambda g: Microcube(tuple(a + b for a, b in zip(g.base, g.b({1}))), 0), "shift")
    f = rsampler.semiform(2, 0)
    g = rsampler.cube(2, 1)
    assert convolve_with_form(eta, f)(g) == f(eta(g))


def test_lie_hat_examples():
    x = variables(1)[0]
    d_x = vector_field(1, [const(1)])
    f = make_semiform(0, components={(): x * x}, m=1)
    assert lie_hat(d_x, f)(assemble(R, 0, {(): (3,)})) == 6
    c = make_semiform(1, components={(0,): 5}, m=1)
    assert lie_hat(d_x, c)(assemble(R, 1, {(): (3,), (1,): (2,)})) == 0


def test_lie_derivative_examples(rsampler):
    x = variables(1)[0]
    X = vector_field(1, [x])
    dx = make_semiform(1, components={(0,): 1}, m=1)
    assert lie_derivative(X, dx)(assemble(R, 1, {(): (Fraction(2, 3),), (1,): (7,)})) == 7
    Y = rsampler.vector_field(2)
    theta = rsampler.semiform(2, 2, alternating=True)
    g = rsampler.cube(2, 2)
    assert lie_derivative(Y, theta)(g) == lie_hat(Y, theta)(g)
    with pytest.raises(NotAForm):
        lie_derivative(lie_bracket_L(Y, Y), theta)


def _sympy_lie_of_one_form(Xs, ws, xs, point, v):
    """(L_X w)(v) with (L_X w)_j = X^k d_k w_j + w_k d_j X^k."""
    m = len(xs)
    sub = dict(zip(xs, point))
    comps = [sum(Xs[k] * sp.diff(ws[j], xs[k]) + ws[k] * sp.diff(Xs[k], xs[j]) for k in range(m)) for j in range(m)]
    return float(sum(c.subs(sub) * vj for c, vj in zip(comps, v)))


def _node_to_sympy(node, xs):
    op = node.op
    if op == "const":
        return sp.nsimplify(node.value)
    if op == "var":
        return xs[node.value]
    args = [_node_to_sympy(a, xs) for a in node.args]
    if op == "add":
        return sp.Add(*args)
    if op == "mul":
        return sp.Mul(*args)
    if op == "neg":
        return -args[0]
    if op == "scale":
        return sp.nsimplify(node.value) * args[0]
    if op == "pow":
        return args[0] ** node.value
    return getattr(sp, node.value)(args[0])


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32))
def test_lie_derivative_of_one_forms_matches_cartan(seed):
    s = Sampler(seed, FLOAT)
    xs = sp.symbols("x0 x1")
    X = s.vector_field(2)
    theta = s.semiform(2, 1, alternating=True)
    Xs = [_node_to_sympy(X.components[(i,)], xs) for i in range(2)]
    ws = [_node_to_sympy(theta.components[(j,)], xs) for j in range(2)]
    point = [float(v) for v in s.rng.uniform(-1, 1, 2)]
    v = [float(u) for u in s.rng.uniform(-1, 1, 2)]
    g = assemble(Context((), FLOAT), 1, {(): tuple(point), (1,): tuple(v)})
    got = lie_derivative(X, theta)(g).scalar_part
    assert got == pytest.approx(_sympy_lie_of_one_form(Xs, ws, xs, point, v), rel=1e-10, abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32))
def test_lie_derivative_of_functions_along_one_forms(seed):
    """For a vector-valued 1-form K and a function f: (L_K f)(v) = df(K v)."""
    s = Sampler(seed, FLOAT)
    xs = sp.symbols("x0 x1")
    K = s.vvform(2, 1)
    f = s.semiform(2, 0)
    F = _node_to_sympy(f.components[()], xs)
    point = [float(u) for u in s.rng.uniform(-1, 1, 2)]
    v = [float(u) for u in s.rng.uniform(-1, 1, 2)]
    sub = dict(zip(xs, point))
    Kv = [sum(float(_node_to_sympy(K.components[(i, j)], xs).subs(sub)) * v[j] for j in range(2)) for i in range(2)]
    want = sum(float(sp.diff(F, xs[i]).subs(sub)) * Kv[i] for i in range(2))
    g = assemble(Context((), FLOAT), 1, {(): tuple(point), (1,): tuple(v)})
    assert lie_derivative(K, f)(g).scalar_part == pytest.approx(want, rel=1e-10, abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 2), st.integers(0, 2), st.integers(0, 1))
def test_product_rule(seed, p, q, r):
    s = Sampler(seed, RATIONAL)
    xi = s.vvform(2, p)
    t1, t2 = s.semiform(2, q), s.semiform(2, r)
    g = s.cube(2, p + q + r)
    lhs = lie_hat(xi, tensor_semiforms(t1, t2))(g)
    rhs = tensor_semiforms(lie_hat(xi, t1), t2)(g) + \
        tensor_semiforms(t1, lie_hat(xi, t2)).reparametrize(sigma_pq_r(p, q, r))(g)
    assert lhs == rhs


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 2), st.integers(0, 1), st.integers(0, 1))
def test_wedge_rule(seed, p, q, r):
    s = Sampler(seed, RATIONAL)
    xi = s.vvform(2, p)
    t1, t2 = s.semiform(2, q, alternating=True), s.semiform(2, r, alternating=True)
    g = s.cube(2, p + q + r)
    lhs = lie_derivative(xi, wedge(t1, t2))(g)
    rhs = wedge(lie_derivative(xi, t1), t2)(g) + wedge(t1, lie_derivative(xi, t2))(g) * (-1) ** (p * q)
    assert lhs == rhs


def test_lie_hat_is_bilinear(rsampler):
    xi, xi2 = rsampler.vvform(2, 1), rsampler.vvform(2, 1)
    t, t2 = rsampler.semiform(2, 1), rsampler.semiform(2, 1)
    g = rsampler.cube(2, 2)
    a = Fraction(5, 3)
    assert lie_hat(xi + xi2, t)(g) == lie_hat(xi, t)(g) + lie_hat(xi2, t)(g)
    assert lie_hat(a * xi, t)(g) == lie_hat(xi, t)(g) * a
    assert lie_hat(xi, t + t2)(g) == lie_hat(xi, t)(g) + lie_hat(xi, t2)(g)
    assert lie_hat(xi, t.scale(a))(g) == lie_hat(xi, t)(g) * a


@pytest.mark.parametrize("p,q,r", [(1, 1, 0), (1, 1, 1), (2, 1, 0), (1, 2, 1), (2, 2, 1)])
def test_lie_hat_of_bracket_with_block_realignment(p, q, r):
    s = Sampler(100 + p + 3 * q + 9 * r, RATIONAL)
    x1, x2 = s.vvform(2, p), s.vvform(2, q)
    theta = s.nonlinear_semiform(2, r)
    g = s.cube(2, p + q + r)
    lhs = lie_hat(lie_bracket_L(x1, x2), theta)(g)
    second = lie_hat(x2, lie_hat(x1, theta)).reparametrize(sigma_pq_r(p, q, r))(g)
    assert lhs == lie_hat(x1, lie_hat(x2, theta))(g) - second


@pytest.mark.parametrize("p,q,r", [(1, 1, 0), (2, 1, 1)])
def test_lie_hat_of_bracket_without_realignment_differs(p, q, r):
    """Multiplying the swapped composite by (-1)^pq instead of realigning its slots is not an identity."""
    s = Sampler(7, RATIONAL)
    x1, x2 = s.vvform(2, p), s.vvform(2, q)
    theta = s.semiform(2, r)
    g = s.cube(2, p + q + r)
    lhs = lie_hat(lie_bracket_L(x1, x2), theta)(g)
    rhs = lie_hat(x1, lie_hat(x2, theta))(g) - lie_hat(x2, lie_hat(x1, theta))(g) * (-1) ** (p * q)
    assert lhs != rhs


@pytest.mark.parametrize("p,q,r", [(0, 0, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1), (2, 1, 0), (0, 2, 2)])
def test_lie_derivative_of_fn_bracket(p, q, r):
    s = Sampler(40 + p + 3 * q + 9 * r, RATIONAL)
    x1, x2 = s.vvform(2, p), s.vvform(2, q)
    theta = s.semiform(2, r, alternating=True)
    g = s.cube(2, p + q + r)
    lhs = lie_derivative(fn_bracket(x1, x2), theta)(g)
    rhs = lie_derivative(x1, lie_derivative(x2, theta))(g) - \
        lie_derivative(x2, lie_derivative(x1, theta))(g) * (-1) ** (p * q)
    assert lhs == rhs


def test_shuffle_identities(rsampler):
    p, q, r = 1, 1, 1
    xi = rsampler.vvform(2, p)
    t, w = rsampler.semiform(2, q), rsampler.semiform(2, r)
    g = rsampler.cube(2, p + q + r)
    lhs = antisymmetrize_form(tensor_semiforms(lie_hat(xi, t), w), (p, q, r))(g)
    rhs = antisymmetrize_form(tensor_semiforms(antisymmetrize_form(lie_hat(xi, t), (p, q)), w), (p + q, r))(g)
    assert lhs == rhs
