"""Distributions, (n,p)-icons, their convolutions and the Lie / Frolicher-Nijenhuis brackets.

An (n,p)-icon is a context-generic evaluator taking a p-microcube over any
base context E to an n-microcube over the same E. Distributions are the
case n = 0. Convolutions run one icon "under" the slots consumed by the
other, which in the stacked-factor representation is a reordering of
context factors between the two evaluations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .forms import _compile_components, component_sum, normalization_factor
from .perm import Permutation, all_permutations, sigma_pq
from .prolongation import (
    DEFAULT_TOL,
    AgreementViolation,
    Microcube,
    ProlongedPoint,
    assemble,
    d2_axis_hom,
    diagonal_hom,
    glue,
    restrict_along,
    strong_diff,
)
from .smooth import PRIMITIVES, Node, SmoothMap, _walk, const, eval_map, make_smooth_map, neg
from .weil import FLOAT, RATIONAL, Context, WeilElement, WeilError

# [X, Y]_L at p = q = 0 equals CLASSICAL_SIGN * (X.grad Y - Y.grad X); calibrated by
# comparing with the Jacobian formula (see tests/test_icons.py).
CLASSICAL_SIGN = 1


class NotAForm(WeilError):
    pass


@dataclass(frozen=True, eq=False)
class Icon:
    n: int
    p: int
    fn: Callable[[Microcube], Microcube]
    label: str = "xi"
    m: int | None = None

    def __call__(self, g: Microcube) -> Microcube:
        if g.n != self.p:
            raise WeilError(f"{self.label} is a ({self.n},{self.p})-icon, got a {g.n}-cube")
        out = self.fn(g)
        if out.n != self.n or out.base_ctx != g.base_ctx:
            raise WeilError(f"{self.label} returned a {out.n}-cube over {out.base_ctx}")
        return out

    @property
    def is_distribution(self) -> bool:
        return self.n == 0

    def reparametrize(self, sigma: Permutation) -> "Icon":
        return icon_reparametrize(self, sigma)

    def __add__(self, other: "Icon") -> "Icon":
        return add_icons(self, other)

    def __sub__(self, other: "Icon") -> "Icon":
        return add_icons(self, scale_icon(other, -1))

    def __neg__(self) -> "Icon":
        return scale_icon(self, -1)

    def __rmul__(self, alpha) -> "Icon":
        return scale_icon(self, alpha)


Distribution = Icon


@dataclass(frozen=True, eq=False)
class VVForm(Icon):
    """A tangent-vector-valued p-form: a (1,p)-icon, optionally with its components.

    ``components`` maps (i, j1, .., jp) (0-based) to the map K^i_{j1..jp}.
    """

    components: dict | None = field(default=None, repr=False)
    alternating: bool = True


def _reorder(g: Microcube, k: int, blocks: list[tuple[int, int]], n: int) -> Microcube:
    """Keep the first k factors, then concatenate the factor blocks [(start, length), ...]."""
    order = list(range(k))
    for start, length in blocks:
        order.extend(range(start, start + length))
    return Microcube(tuple(c.permute(order) for c in g.coords), n)


def dirac(p: int, m: int | None = None) -> Icon:
    """delta^p: gamma -> b_0."""
    return Icon(0, p, lambda g: Microcube(g.base, 0), f"delta^{p}", m)


def icon_convolve(x1: Icon, x2: Icon, order: str = "star") -> Icon:
    """x1 (*) x2 (``star``) or x1 (*~) x2 (``tilde``); output directions are x1's first."""
    m1, p, n1, q = x1.n, x1.p, x2.n, x2.p

    def star(g: Microcube) -> Microcube:
        k = g.base_ctx.depth
        y = x2(g.view(q))  # over E + [p slots]
        y = _reorder(y, k, [(k + p, n1), (k, p)], p)  # E + [n1] + [p]
        z = x1(y)  # E + [n1] + [m1]
        return _reorder(z, k, [(k + n1, m1), (k, n1)], m1 + n1)

    def tilde(g: Microcube) -> Microcube:
        k = g.base_ctx.depth
        h = _reorder(g, k, [(k + p, q), (k, p)], p)  # E + [q] + [p]
        y = x1(h)  # E + [q] + [m1]
        y = _reorder(y, k, [(k + q, m1), (k, q)], q)  # E + [m1] + [q]
        return Microcube(x2(y).coords, m1 + n1)

    if order == "star":
        fn, sym = star, "(*)"
    elif order == "tilde":
        fn, sym = tilde, "(*~)"
    else:
        raise ValueError(f"order must be 'star' or 'tilde', got {order!r}")
    return Icon(m1 + n1, p + q, fn, f"({x1.label}{sym}{x2.label})", x1.m or x2.m)


def convolve(e1: Icon, e2: Icon, order: str = "star") -> Icon:
    if e1.n or e2.n:
        raise WeilError("convolve takes distributions; use icon_convolve for icons")
    return icon_convolve(e1, e2, order)


def icon_reparametrize(xi: Icon, sigma: Permutation) -> Icon:
    """xi^sigma(gamma) = xi(gamma^sigma)."""
    if sigma.n != xi.p:
        raise WeilError(f"permutation of {sigma.n} points for an icon with p={xi.p}")
    fn = lambda g: xi(g.permute(sigma))  # noqa: E731
    label = f"{xi.label}^{sigma.images}"
    if isinstance(xi, VVForm):
        return VVForm(1, xi.p, fn, label, xi.m, alternating=xi.alternating)
    return Icon(xi.n, xi.p, fn, label, xi.m)


# ---------------------------------------------------------------- tangent-vector-valued forms


def _tangent(base: tuple, direction) -> Microcube:
    ctx = base[0].ctx
    return assemble(ctx, 1, {(): tuple(base), (1,): tuple(direction)})


def _exact(F: SmoothMap) -> bool:
    return all(node.op != "prim" or PRIMITIVES[node.value][2] for out in F.outputs for node in _walk(out, set()))


def check_component_alternation(m: int, p: int, components: Mapping, samples: int = 3, seed: int = 0,
                                tol: float = 1e-12) -> bool:
    """K^i_{..a..b..} = -K^i_{..b..a..} at sample points (exact when the maps are polynomial)."""
    if p < 2:
        return True
    order = [(i,) + J for i in range(m) for J in itertools.product(range(m), repeat=p)]
    bodies = []
    for key in order:
        body = components.get(key, 0)
        if isinstance(body, SmoothMap):
            body = body.outputs[0]
        elif isinstance(body, str):
            body = make_smooth_map(m, 1, body).outputs[0]
        elif not isinstance(body, Node):
            body = const(body)
        bodies.append(body)
    G = make_smooth_map(m, len(bodies), bodies)
    exact = _exact(G)
    rng = np.random.default_rng(seed)
    pos = {k: j for j, k in enumerate(order)}
    for _ in range(samples):
        if exact:
            x = [Fraction(int(a), int(b)) for a, b in zip(rng.integers(-5, 6, m), rng.integers(1, 4, m))]
        else:
            x = [float(v) for v in rng.uniform(-2, 2, m)]
        vals = eval_map(G, x)
        for key in order:
            i, J = key[0], key[1:]
            for a in range(p - 1):
                swapped = list(J)
                swapped[a], swapped[a + 1] = swapped[a + 1], swapped[a]
                total = vals[pos[key]] + vals[pos[(i,) + tuple(swapped)]]
                if abs(float(total)) > (0 if exact else tol):
                    return False
    return True


def compile_vvform(m: int, p: int, components: Mapping, label: str = "K", check: bool = True) -> VVForm:
    """(1,p)-icon gamma -> tangent at b_0 with direction sum_J K^i_J(b_0) b_1^{j1} .. b_p^{jp}.

    ``components`` maps (i, j1..jp) to a map R^m -> R (SmoothMap, node, number
    or S-expression text). Components must be alternating in the lower indices.
    """
    per_output: list[dict] = [dict() for _ in range(m)]
    for key, body in components.items():
        key = tuple(int(x) for x in key)
        if len(key) != p + 1 or not 0 <= key[0] < m:
            raise WeilError(f"component key {key} invalid for m={m}, p={p}")
        per_output[key[0]][key[1:]] = body
    components = {tuple(int(x) for x in k): v for k, v in components.items()}
    if check and not check_component_alternation(m, p, components):
        raise NotAForm(f"components of {label} are not alternating in the lower indices")
    compiled = [_compile_components(m, p, comps) for comps in per_output]

    def fn(g: Microcube) -> Microcube:
        if g.m != m:
            raise WeilError(f"{label} lives on R^{m}, got a point of R^{g.m}")
        base = list(g.base)
        vectors = [g.b({a}) for a in range(1, p + 1)]
        direction = [component_sum(F, index, base, vectors) for F, index in compiled]
        return _tangent(tuple(base), direction)

    return VVForm(1, p, fn, label, m, dict(components))


def vector_field(m: int, body, label: str = "X") -> VVForm:
    """A (1,0)-icon from a map R^m -> R^m (SmoothMap or list of component bodies)."""
    if isinstance(body, SmoothMap):
        outs = body.outputs
    else:
        outs = list(body)
    return compile_vvform(m, 0, {(i,): b for i, b in enumerate(outs)}, label)


def alternating_components(m: int, p: int, free: Mapping) -> dict:
    """Extend {(i, j1<..<jp): body} to all index orders with the permutation sign."""
    out = {}
    for key, body in free.items():
        i, J = key[0], tuple(key[1:])
        if list(J) != sorted(set(J)):
            raise WeilError(f"free components need strictly increasing lower indices, got {J}")
        for s in all_permutations(p):
            K = tuple(J[s(a) - 1] for a in range(1, p + 1))
            out[(i,) + K] = body if s.sign > 0 else _negate(body)
    return out


def _negate(body):
    if isinstance(body, SmoothMap):
        return neg(body.outputs[0])
    if isinstance(body, (int, float, Fraction)):
        return -body
    return neg(body)


def identity_form(m: int) -> VVForm:
    """The identity (1,1)-form I: tangent (a, b) -> (a, b)."""
    return compile_vvform(m, 1, {(i, i): 1 for i in range(m)}, "I")


def zero_icon(p: int, m: int | None = None) -> VVForm:
    def fn(g):
        return _tangent(g.base, [WeilElement.constant(g.base_ctx, 0)] * g.m)

    return VVForm(1, p, fn, "0", m)


# ---------------------------------------------------------------- linear structure


def add_icons(x1: Icon, x2: Icon) -> Icon:
    """Fiberwise sum of (1,p)-icons: same base point, directions added."""
    _check_tangent_pair(x1, x2)

    def fn(g):
        a, b = x1(g), x2(g)
        return _tangent(a.base, [u + v for u, v in zip(a.b({1}), b.b({1}))])

    return _like(x1, x2, fn, f"({x1.label}+{x2.label})")


def add_icons_d2(x1: Icon, x2: Icon, tol: float = DEFAULT_TOL) -> Icon:
    """Sum via the D(2) gluing: glue the two outputs along the axes, restrict to the diagonal."""
    _check_tangent_pair(x1, x2)
    axes = (d2_axis_hom(1), d2_axis_hom(2))

    def fn(g):
        a, b = x1(g), x2(g)
        glued = glue([ProlongedPoint(a.coords), ProlongedPoint(b.coords)], axes, tol)
        return restrict_along(glued, diagonal_hom())

    return _like(x1, x2, fn, f"({x1.label}+_D(2){x2.label})")


def scale_icon(xi: Icon, alpha) -> Icon:
    """alpha xi: scale the output direction."""
    if xi.n != 1:
        raise WeilError("scaling is defined for (1,p)-icons")

    def fn(g):
        return xi(g).scale(1, alpha)

    if isinstance(xi, VVForm):
        return VVForm(1, xi.p, fn, f"{alpha}*{xi.label}", xi.m, alternating=xi.alternating)
    return Icon(1, xi.p, fn, f"{alpha}*{xi.label}", xi.m)


def linear_combination(terms) -> Callable[[Microcube], Microcube]:
    """Evaluator for sum_k c_k xi_k over (1,p)-icons, c_k exact scalars."""
    terms = list(terms)

    def fn(g):
        base = None
        total = None
        for c, xi in terms:
            out = xi(g)
            d = out.b({1})
            c = g.base_ctx.scalar(c)
            d = [x * c for x in d]
            if total is None:
                base, total = out.base, d
            else:
                total = [u + v for u, v in zip(total, d)]
        return _tangent(base, total)

    return fn


def _check_tangent_pair(x1: Icon, x2: Icon):
    if x1.n != 1 or x2.n != 1 or x1.p != x2.p:
        raise WeilError(f"cannot add a ({x1.n},{x1.p})-icon and a ({x2.n},{x2.p})-icon")


def _like(x1: Icon, x2: Icon, fn, label: str) -> Icon:
    if isinstance(x1, VVForm) and isinstance(x2, VVForm):
        return VVForm(1, x1.p, fn, label, x1.m or x2.m, alternating=x1.alternating and x2.alternating)
    return Icon(1, x1.p, fn, label, x1.m or x2.m)


def check_projection_law(xi: Icon, g: Microcube) -> bool:
    """pi(xi) = delta^p: collapsing the output directions returns b_0 (exact comparison)."""
    out = xi(g)
    collapsed = out.face([])
    return all(a == b for a, b in zip(collapsed.coords, g.base))


# ---------------------------------------------------------------- brackets


def lie_bracket_L(x1: Icon, x2: Icon, tol: float = DEFAULT_TOL) -> Icon:
    """[x1, x2]_L = x1 (*~) x2  -.  x1 (*) x2, evaluated lazily."""
    if x1.n != 1 or x2.n != 1:
        raise WeilError("the Lie bracket takes (1,p)- and (1,q)-icons")
    tilde = icon_convolve(x1, x2, "tilde")
    star = icon_convolve(x1, x2, "star")

    def fn(g):
        try:
            return strong_diff(tilde(g), star(g), tol)
        except AgreementViolation as exc:
            raise AgreementViolation(f"[{x1.label}, {x2.label}]_L: {exc}") from None

    label = f"[{x1.label},{x2.label}]_L"
    if isinstance(x1, VVForm) and isinstance(x2, VVForm):
        return VVForm(1, x1.p + x2.p, fn, label, x1.m or x2.m, alternating=False)
    return Icon(1, x1.p + x2.p, fn, label, x1.m or x2.m)


def antisymmetrize_icon(xi: Icon, normalization="raw") -> Icon:
    """sum_sigma eps_sigma xi^sigma, scaled by 1 (raw), 1/(p!q!) or 1/(p!q!r!)."""
    if xi.n != 1:
        raise WeilError("alternation is defined for (1,p)-icons")
    c = normalization_factor(normalization, xi.p)
    terms = [(c * s.sign, icon_reparametrize(xi, s)) for s in all_permutations(xi.p)]
    fn = linear_combination(terms)
    tag = "A" if normalization in (None, "raw") else f"A{tuple(normalization)}"
    return VVForm(1, xi.p, fn, f"{tag}({xi.label})", xi.m, alternating=True)


def fn_bracket(x1: VVForm, x2: VVForm, tol: float = DEFAULT_TOL) -> VVForm:
    """[x1, x2]_FN = A_{p,q}([x1, x2]_L)."""
    for x in (x1, x2):
        if not isinstance(x, VVForm) or not x.alternating:
            raise NotAForm(f"{getattr(x, 'label', x)} is not a tangent-vector-valued form")
    out = antisymmetrize_icon(lie_bracket_L(x1, x2, tol), (x1.p, x2.p))
    return VVForm(1, out.p, out.fn, f"[{x1.label},{x2.label}]_FN", out.m, alternating=True)


def probe_cube(x, vectors, kind: str = FLOAT) -> Microcube:
    """The microcube with b_0 = x, b_{a} = vectors[a-1] and all higher coefficients zero."""
    base = Context((), kind)
    entries = {(): tuple(x)}
    for a, v in enumerate(vectors, start=1):
        entries[(a,)] = tuple(v)
    return assemble(base, len(vectors), entries)


def icon_components(xi: Icon, x, m: int, kind: str = FLOAT) -> dict:
    """Read K^i_J(x) off an alternating (1,p)-icon by probing with basis vectors."""
    eye = np.eye(m, dtype=int)
    out = {}
    for J in itertools.product(range(m), repeat=xi.p):
        d = xi(probe_cube(x, [eye[j] for j in J], kind)).b({1})
        for i in range(m):
            out[(i,) + J] = d[i].scalar_part
    return out


def sigma_sign_check(p: int, q: int) -> bool:
    """eps(sigma_{p,q}) = (-1)^{pq}."""
    return sigma_pq(p, q).sign == (-1) ** (p * q)
