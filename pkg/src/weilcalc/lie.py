"""Convolution of icons with scalar semiforms and the two Lie derivations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .forms import Semiform, antisymmetrize_form
from .icons import Icon, NotAForm, VVForm, _reorder
from .prolongation import Microcube
from .weil import WeilElement, WeilError


@dataclass(frozen=True, eq=False)
class ScalarIcon:
    """A semiform of degree p+q carrying n extra output directions in its value's context."""

    n: int
    q: int
    fn: Callable[[Microcube], WeilElement]

    def __call__(self, g: Microcube) -> WeilElement:
        if g.n != self.q:
            raise WeilError(f"expected a {self.q}-cube, got n={g.n}")
        return self.fn(g)


def convolve_with_form(eta: Icon, theta: Semiform):
    """eta (*~) theta: eta consumes the first p slots under the last q, theta evaluates the rest.

    For a distribution (n = 0) the result is a (p+q)-semiform. For an
    (n,p)-icon the value lies in E (x) W_D^n, the icon's output directions
    riding along as trailing factors of the scalar's context.
    """
    n, p, q = eta.n, eta.p, theta.q

    def fn(g: Microcube) -> WeilElement:
        k = g.base_ctx.depth
        h = _reorder(g, k, [(k + p, q), (k, p)], p)  # E + [q] + [p]
        y = eta(h)  # E + [q] + [n]
        y = _reorder(y, k, [(k + q, n), (k, q)], q)  # E + [n] + [q]
        return theta(y)

    if n == 0:
        return Semiform(p + q, fn, f"({eta.label}*~{theta.label})", eta.m or theta.m)
    return ScalarIcon(n, p + q, fn)


def lie_hat(xi: Icon, theta: Semiform) -> Semiform:
    """L^_xi theta = D(xi (*~) theta) for a (1,p)-icon xi."""
    if xi.n != 1:
        raise WeilError("the first-type Lie derivation takes a (1,p)-icon")
    conv = convolve_with_form(xi, theta)

    def fn(g: Microcube) -> WeilElement:
        return conv(g).coeffs[1]

    return Semiform(xi.p + theta.q, fn, f"L^[{xi.label}]{theta.label}", xi.m or theta.m)


def lie_derivative(xi: VVForm, theta: Semiform, check: bool = True) -> Semiform:
    """L_xi theta = A_{p,q}(L^_xi theta)."""
    if check and (not isinstance(xi, VVForm) or not xi.alternating):
        raise NotAForm(f"{xi.label} is not a tangent-vector-valued form")
    out = antisymmetrize_form(lie_hat(xi, theta), (xi.p, theta.q))
    return Semiform(out.q, out.fn, f"L[{xi.label}]{theta.label}", out.m)
