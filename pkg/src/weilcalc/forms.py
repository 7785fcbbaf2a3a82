"""Scalar semiforms and forms on R^m evaluated on microcubes.

A q-semiform is any context-generic map from q-microcubes to scalars of
the base context. Component forms sum_J w_J(b_0) b_1^{j1} ... b_q^{jq}
are the concrete family used for comparisons with classical formulas.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .perm import Permutation, all_permutations
from .prolongation import Microcube, assemble
from .smooth import SmoothMap, const, eval_map, make_smooth_map
from .weil import Context, WeilElement, WeilError

__all__ = [
    "Semiform", "Permutation", "make_semiform", "zero_form", "tensor_semiforms",
    "antisymmetrize_form", "wedge", "check_form_properties", "normalization_factor",
]


@dataclass(frozen=True, eq=False)
class Semiform:
    q: int
    fn: Callable[[Microcube], WeilElement]
    label: str = "theta"
    m: int | None = None
    components: dict | None = field(default=None, repr=False)

    def __call__(self, g: Microcube) -> WeilElement:
        if g.n != self.q:
            raise WeilError(f"{self.label} has degree {self.q}, got a {g.n}-cube")
        return self.fn(g)

    def __add__(self, other: "Semiform") -> "Semiform":
        _same_degree(self, other)
        return Semiform(self.q, lambda g: self(g) + other(g), f"({self.label}+{other.label})", self.m)

    def __sub__(self, other: "Semiform") -> "Semiform":
        _same_degree(self, other)
        return Semiform(self.q, lambda g: self(g) - other(g), f"({self.label}-{other.label})", self.m)

    def __neg__(self) -> "Semiform":
        return self.scale(-1)

    def scale(self, alpha) -> "Semiform":
        return Semiform(self.q, lambda g: self(g) * g.ctx.drop(g.n).scalar(alpha), f"{alpha}*{self.label}", self.m)

    __rmul__ = scale

    def reparametrize(self, sigma: Permutation) -> "Semiform":
        """theta^sigma(gamma) = theta(gamma^sigma)."""
        if sigma.n != self.q:
            raise WeilError(f"permutation of {sigma.n} points for a {self.q}-semiform")
        return Semiform(self.q, lambda g: self(g.permute(sigma)), f"{self.label}^{sigma.images}", self.m)


def _same_degree(a: Semiform, b: Semiform):
    if a.q != b.q:
        raise WeilError(f"degrees differ: {a.q} vs {b.q}")


def _compile_components(m: int, q: int, components: Mapping) -> tuple[SmoothMap, list]:
    """One multi-output map holding every nonzero component; returns it with the index list."""
    index = []
    bodies = []
    for J, body in components.items():
        J = tuple(int(j) for j in J)
        if len(J) != q or any(not 0 <= j < m for j in J):
            raise WeilError(f"component index {J} invalid for m={m}, q={q}")
        if isinstance(body, SmoothMap):
            if body.m != m or body.k != 1:
                raise WeilError(f"component {J} must map R^{m} -> R, got {body.m}->{body.k}")
            body = body.outputs[0]
        elif isinstance(body, (int, float, Fraction)):
            body = const(body)
        elif isinstance(body, str):
            body = make_smooth_map(m, 1, body).outputs[0]
        if body.op == "const" and body.value == 0:
            continue
        index.append(J)
        bodies.append(body)
    return make_smooth_map(m, len(bodies), bodies), index


def component_sum(F: SmoothMap, index: list, base, vectors) -> list | WeilElement:
    """sum_J F_J(base) prod_a vectors[a][J_a], with F's outputs aligned to ``index``."""
    ctx = base[0].ctx
    if not index:
        return WeilElement.constant(ctx, 0)
    vals = eval_map(F, base, ctx=ctx)
    total = WeilElement.constant(ctx, 0)
    for J, v in zip(index, vals):
        term = v
        for a, j in enumerate(J):
            term = term * vectors[a][j]
        total = total + term
    return total


def make_semiform(q: int, evaluator: Callable | None = None, components: Mapping | None = None,
                  m: int | None = None, label: str = "theta") -> Semiform:
    """From an evaluator, or from components {J: map R^m -> R} (J a length-q index tuple, 0-based)."""
    if (evaluator is None) == (components is None):
        raise WeilError("give exactly one of evaluator or components")
    if evaluator is not None:
        return Semiform(q, evaluator, label, m)
    if m is None:
        raise WeilError("component semiforms need the model dimension m")
    F, index = _compile_components(m, q, components)

    def fn(g: Microcube) -> WeilElement:
        if g.m != m:
            raise WeilError(f"{label} lives on R^{m}, got a point of R^{g.m}")
        vectors = [g.b({a}) for a in range(1, q + 1)]
        return component_sum(F, index, list(g.base), vectors)

    return Semiform(q, fn, label, m, dict(components))


def zero_form(q: int, m: int | None = None) -> Semiform:
    return Semiform(q, lambda g: WeilElement.constant(g.base_ctx, 0), "0", m)


def tensor_semiforms(t1: Semiform, t2: Semiform) -> Semiform:
    """(t1 (x) t2)(gamma) = t1(first-p face) * t2(last-q face)."""
    p, q = t1.q, t2.q

    def fn(g: Microcube) -> WeilElement:
        left = t1(g.face(range(1, p + 1)))
        right = t2(g.face(range(p + 1, p + q + 1)))
        return left * right

    return Semiform(p + q, fn, f"({t1.label}(x){t2.label})", t1.m or t2.m)


def normalization_factor(normalization, degree: int) -> Fraction:
    """1 for ``raw``, 1/(p!q!..) for a degree tuple summing to ``degree``."""
    if normalization in (None, "raw"):
        return Fraction(1)
    parts = tuple(int(x) for x in normalization)
    if len(parts) not in (2, 3) or any(x < 0 for x in parts):
        raise WeilError(f"normalization must be 'raw', (p,q) or (p,q,r); got {normalization!r}")
    if sum(parts) != degree:
        raise WeilError(f"normalization {parts} does not sum to degree {degree}")
    denom = 1
    for x in parts:
        denom *= math.factorial(x)
    return Fraction(1, denom)


def antisymmetrize_form(theta: Semiform, normalization="raw") -> Semiform:
    """A theta = sum_sigma eps_sigma theta^sigma, optionally scaled by 1/(p!q!) or 1/(p!q!r!)."""
    n = theta.q
    c = normalization_factor(normalization, n)
    perms = all_permutations(n)

    def fn(g: Microcube) -> WeilElement:
        base = g.base_ctx
        total = WeilElement.constant(base, 0)
        for s in perms:
            v = theta(g.permute(s))
            total = total + v if s.sign > 0 else total - v
        return total * base.scalar(c) if c != 1 else total

    tag = "A" if c == 1 else f"A{tuple(normalization)}"
    return Semiform(n, fn, f"{tag}({theta.label})", theta.m)


def wedge(t1: Semiform, t2: Semiform) -> Semiform:
    out = antisymmetrize_form(tensor_semiforms(t1, t2), (t1.q, t2.q))
    return Semiform(out.q, out.fn, f"({t1.label}^{t2.label})", out.m)


@dataclass(frozen=True)
class FormProperties:
    homogeneous: bool
    alternating: bool
    max_residual: float


def random_cube(rng: np.random.Generator, m: int, n: int, kind: str = "float") -> Microcube:
    base = Context((), kind)
    entries = {}
    for r in range(n + 1):
        for S in itertools.combinations(range(1, n + 1), r):
            if kind == "float":
                entries[S] = tuple(float(x) for x in rng.uniform(-2, 2, size=m))
            else:
                entries[S] = tuple(Fraction(int(a), int(b)) for a, b in
                                   zip(rng.integers(-9, 10, size=m), rng.integers(1, 6, size=m)))
    return assemble(base, n, entries)


def check_form_properties(theta: Semiform, trials: int = 20, tol: float = 1e-9, m: int | None = None,
                          kind: str = "float", seed: int = 0) -> FormProperties:
    """Sample theta(alpha ._i gamma) = alpha theta(gamma) and theta(gamma^sigma) = eps_sigma theta(gamma)."""
    if trials < 1:
        raise WeilError("trials must be >= 1")
    m = m or theta.m
    if m is None:
        raise WeilError("model dimension unknown; pass m")
    rng = np.random.default_rng(seed)
    perms = all_permutations(theta.q)[1:] or all_permutations(theta.q)  # skip the identity
    homogeneous = alternating = True
    worst = 0.0
    for _ in range(trials):
        g = random_cube(rng, m, theta.q, kind)
        v = theta(g)
        scale_v = max(1.0, v.max_abs())
        if theta.q:
            i = int(rng.integers(1, theta.q + 1))
            alpha = float(rng.uniform(-2, 2)) if kind == "float" else Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
            r = (theta(g.scale(i, alpha)) - v * alpha).max_abs()
            worst = max(worst, r)
            homogeneous &= r <= tol * scale_v
            s = perms[int(rng.integers(len(perms)))]
            r = (theta(g.permute(s)) - v * s.sign).max_abs()
            worst = max(worst, r)
            alternating &= r <= tol * scale_v
    return FormProperties(bool(homogeneous), bool(alternating), worst)
