"""Monomial Weil algebras, nested coefficient contexts and their elements.

A Weil algebra here is always R[x_1..x_k] modulo a monomial ideal that
contains a pure power of every generator. Elements of a *context*, i.e. a
tower W_1 (x) W_2 (x) ... (x) W_r of such algebras over the base scalars, are
stored as one flat coefficient vector over the product basis, first factor
outermost.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import linalg

RATIONAL = "rational"
FLOAT = "float"

Monomial = tuple[int, ...]


class WeilError(ValueError):
    pass


class ContextMismatch(WeilError):
    pass


class IllDefinedHom(WeilError):
    pass


class NonCommutingSquare(WeilError):
    pass


class FloatContextRejected(WeilError):
    pass


def _divides(g: Monomial, e: Monomial) -> bool:
    return all(gi <= ei for gi, ei in zip(g, e))


def _minimal(gens: Iterable[Monomial]) -> frozenset[Monomial]:
    gens = set(gens)
    return frozenset(g for g in gens if not any(h != g and _divides(h, g) for h in gens))


@dataclass(frozen=True)
class InfinitesimalObject:
    """Formal dual of a monomial Weil algebra: k generators and the ideal.

    Equality ignores ``name`` so that e.g. D (x) D and D^2 compare equal.
    """

    k: int
    ideal_gens: frozenset
    name: str = field(default="", compare=False)

    def __str__(self) -> str:
        return self.name or f"Inf(k={self.k})"


def make_infinitesimal_object(k: int, ideal_gens: Iterable[Sequence[int]], name: str = "") -> InfinitesimalObject:
    gens = []
    for g in ideal_gens:
        g = tuple(int(x) for x in g)
        if len(g) != k:
            raise WeilError(f"ideal generator {g} has length {len(g)}, expected {k}")
        if any(x < 0 for x in g):
            raise WeilError(f"negative exponent in {g}")
        if sum(g) < 2:
            raise WeilError(f"ideal generator {g} has degree < 2")
        gens.append(g)
    for i in range(k):
        if not any(g[i] > 0 and sum(g) == g[i] for g in gens):
            raise WeilError(f"generator x{i + 1} is not nilpotent: no pure power of it lies in the ideal")
    return InfinitesimalObject(k, _minimal(gens), name)


def _unit(k: int, i: int, power: int = 1) -> Monomial:
    return tuple(power if j == i else 0 for j in range(k))


def D() -> InfinitesimalObject:
    return make_infinitesimal_object(1, [(2,)], "D")


def D_k(order: int) -> InfinitesimalObject:
    """D_order = {d | d^(order+1) = 0}."""
    return make_infinitesimal_object(1, [(order + 1,)], f"D_{order}")


def D_power(n: int) -> InfinitesimalObject:
    """D^n."""
    return make_infinitesimal_object(n, [_unit(n, i, 2) for i in range(n)], f"D^{n}")


def D_sum(n: int) -> InfinitesimalObject:
    """D(n): all products of two generators vanish."""
    gens = [tuple(a + b for a, b in zip(_unit(n, i), _unit(n, j))) for i in range(n) for j in range(i, n)]
    return make_infinitesimal_object(n, gens, f"D({n})")


def D2_plus_D() -> InfinitesimalObject:
    """D^2 (+) D = {(d1, d2, e) in D^3 | d1 e = d2 e = 0}."""
    return make_infinitesimal_object(3, [(2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 0, 1), (0, 1, 1)], "D^2+D")


def _gradlex_key(e: Monomial):
    return (sum(e), tuple(-x for x in e))


class WeilAlgebra:
    """R[x]/I with its graded-lex monomial basis and multiplication table."""

    def __init__(self, obj: InfinitesimalObject):
        self.source = obj
        bounds = []
        for i in range(obj.k):
            bounds.append(min(g[i] for g in obj.ideal_gens if g[i] > 0 and sum(g) == g[i]))
        basis = [
            e
            for e in itertools.product(*(range(b) for b in bounds))
            if not any(_divides(g, e) for g in obj.ideal_gens)
        ]
        basis.sort(key=_gradlex_key)
        self.basis: list[Monomial] = basis
        self.index = {e: i for i, e in enumerate(basis)}
        table = {}
        for (i, a), (j, b) in itertools.product(enumerate(basis), repeat=2):
            c = tuple(x + y for x, y in zip(a, b))
            table[i, j] = self.index.get(c)
        self.mult_table: dict[tuple[int, int], int | None] = table
        self._pairs = np.array([(i, j, c) for (i, j), c in table.items() if c is not None], dtype=np.intp)

    @property
    def k(self) -> int:
        return self.source.k

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def degree(self) -> int:
        """Largest total degree of a surviving monomial (nilpotency index of the augmentation ideal)."""
        return max(sum(e) for e in self.basis)

    def __eq__(self, other):
        return isinstance(other, WeilAlgebra) and self.source == other.source

    def __hash__(self):
        return hash(self.source)

    def __repr__(self):
        return f"WeilAlgebra({self.source}, dim={self.dim})"

    def monomial_str(self, e: Monomial) -> str:
        parts = []
        for i, x in enumerate(e):
            if x == 1:
                parts.append(f"x{i + 1}")
            elif x > 1:
                parts.append(f"x{i + 1}^{x}")
        return "*".join(parts) or "1"


@lru_cache(maxsize=None)
def build_algebra(obj: InfinitesimalObject) -> WeilAlgebra:
    return WeilAlgebra(obj)


def tensor(w1: WeilAlgebra, w2: WeilAlgebra) -> WeilAlgebra:
    """W1 (x) W2: generators concatenated, ideals placed on disjoint variables."""
    k1, k2 = w1.k, w2.k
    gens = [g + (0,) * k2 for g in w1.source.ideal_gens] + [(0,) * k1 + g for g in w2.source.ideal_gens]
    name = f"({w1.source}x{w2.source})"
    return build_algebra(make_infinitesimal_object(k1 + k2, gens, name))


W_D = build_algebra(D())


# ---------------------------------------------------------------- contexts


@lru_cache(maxsize=None)
def _flat_structure(factors: tuple[WeilAlgebra, ...]):
    """Product-basis multiplication pairs (I, J, K) and the nilpotency index."""
    I = np.zeros(1, dtype=np.intp)
    J = np.zeros(1, dtype=np.intp)
    K = np.zeros(1, dtype=np.intp)
    for w in factors:
        d = w.dim
        p = w._pairs
        I = (I[:, None] * d + p[None, :, 0]).ravel()
        J = (J[:, None] * d + p[None, :, 1]).ravel()
        K = (K[:, None] * d + p[None, :, 2]).ravel()
    return I, J, K


@dataclass(frozen=True)
class Context:
    """Coefficient tower: base scalars (exact rationals or floats) with stacked algebras."""

    factors: tuple = ()
    kind: str = FLOAT

    def __post_init__(self):
        if self.kind not in (RATIONAL, FLOAT):
            raise WeilError(f"unknown scalar kind {self.kind!r}")

    @property
    def depth(self) -> int:
        return len(self.factors)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(w.dim for w in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.shape, dtype=np.intp)) if self.factors else 1

    @property
    def nilpotency(self) -> int:
        """Smallest r such that every product of r+1 nilpotent elements vanishes."""
        return sum(w.degree for w in self.factors)

    @property
    def dtype(self):
        return object if self.kind == RATIONAL else np.float64

    @property
    def top(self) -> WeilAlgebra:
        return self.factors[-1]

    def extend(self, *algebras: WeilAlgebra) -> "Context":
        return Context(self.factors + tuple(algebras), self.kind)

    def drop(self, n: int) -> "Context":
        return Context(self.factors[: len(self.factors) - n], self.kind)

    def permuted(self, order: Sequence[int]) -> "Context":
        return Context(tuple(self.factors[i] for i in order), self.kind)

    def scalar(self, value):
        if self.kind == RATIONAL:
            if isinstance(value, float):
                raise ContextMismatch("float scalar in exact rational context")
            return Fraction(value)
        return float(value)

    def zeros(self) -> np.ndarray:
        if self.kind == RATIONAL:
            return np.full(self.dim, Fraction(0), dtype=object)
        return np.zeros(self.dim)

    def __repr__(self):
        inner = " x ".join(str(w.source) for w in self.factors) or "R"
        return f"Context[{self.kind}: {inner}]"


BASE_FLOAT = Context((), FLOAT)
BASE_RATIONAL = Context((), RATIONAL)


class WeilElement:
    """An element of a context, stored as a flat coefficient vector."""

    __slots__ = ("ctx", "data")

    def __init__(self, ctx: Context, data):
        data = np.asarray(data, dtype=ctx.dtype)
        if data.shape != (ctx.dim,):
            raise ContextMismatch(f"coefficient vector of shape {data.shape} for {ctx}")
        self.ctx = ctx
        self.data = data

    # construction
    @classmethod
    def constant(cls, ctx: Context, value=0) -> "WeilElement":
        data = ctx.zeros()
        data[0] = ctx.scalar(value)
        return cls(ctx, data)

    @classmethod
    def generator(cls, ctx: Context, factor: int, gen: int, coeff=1) -> "WeilElement":
        """The variable x_{gen+1} of factor ``factor``, embedded in ``ctx``."""
        w = ctx.factors[factor]
        idx = w.index[_unit(w.k, gen)]
        grid = [0] * ctx.depth
        grid[factor] = idx
        data = ctx.zeros()
        data[np.ravel_multi_index(grid, ctx.shape)] = ctx.scalar(coeff)
        return cls(ctx, data)

    @classmethod
    def from_coeffs(cls, ctx: Context, coeffs: Sequence["WeilElement"]) -> "WeilElement":
        """Inverse of :attr:`coeffs`: lower-context elements aligned with the top basis."""
        lower = ctx.drop(1)
        if len(coeffs) != ctx.top.dim:
            raise ContextMismatch("coefficient count does not match top algebra dimension")
        for c in coeffs:
            if c.ctx != lower:
                raise ContextMismatch(f"coefficient in {c.ctx}, expected {lower}")
        return cls(ctx, np.stack([c.data for c in coeffs], axis=1).ravel())

    # views
    @property
    def coeffs(self) -> list["WeilElement"]:
        lower = self.ctx.drop(1)
        block = self.data.reshape(lower.dim, self.ctx.top.dim)
        return [WeilElement(lower, block[:, i].copy()) for i in range(self.ctx.top.dim)]

    @property
    def scalar_part(self):
        return self.data[0]

    def nilpotent_part(self) -> "WeilElement":
        data = self.data.copy()
        data[0] = self.ctx.scalar(0)
        return WeilElement(self.ctx, data)

    def tensor(self) -> np.ndarray:
        return self.data.reshape(self.ctx.shape) if self.ctx.factors else self.data

    # arithmetic
    def _coerce(self, other) -> "WeilElement":
        if isinstance(other, WeilElement):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, (int, float, Rational, np.integer, np.floating)):
            return WeilElement.constant(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return WeilElement(self.ctx, self.data + other.data)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return WeilElement(self.ctx, self.data - other.data)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return WeilElement(self.ctx, other.data - self.data)

    def __neg__(self):
        return WeilElement(self.ctx, -self.data)

    def __mul__(self, other):
        if isinstance(other, WeilElement):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return WeilElement(self.ctx, _multiply(self.ctx, self.data, other.data))
        if isinstance(other, (int, float, Rational, np.integer, np.floating)):
            return WeilElement(self.ctx, self.data * self.ctx.scalar(other))
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise WeilError("only non-negative integer powers are supported")
        result = WeilElement.constant(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, WeilElement):
            return self.ctx == other.ctx and bool(np.all(self.data == other.data))
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return bool(np.all(self.data == other.data))

    __hash__ = None

    def max_abs(self) -> float:
        return float(max(abs(x) for x in self.data)) if len(self.data) else 0.0

    def close_to(self, other: "WeilElement", tol: float) -> bool:
        if self.ctx.kind == RATIONAL and other.ctx.kind == RATIONAL:
            return self == other
        return (self - other).max_abs() <= tol

    # change of context
    def lift(self, ctx: Context) -> "WeilElement":
        """Embed into ``ctx``, which must extend this context by trailing factors."""
        if ctx.factors[: self.ctx.depth] != self.ctx.factors or ctx.kind != self.ctx.kind:
            raise ContextMismatch(f"cannot lift {self.ctx} into {ctx}")
        extra = ctx.dim // self.ctx.dim
        data = ctx.zeros().reshape(self.ctx.dim, extra)
        data[:, 0] = self.data
        return WeilElement(ctx, data.ravel())

    def permute(self, order: Sequence[int]) -> "WeilElement":
        """Reorder factors: new factor j is old factor ``order[j]``."""
        ctx = self.ctx.permuted(order)
        if not self.ctx.factors:
            return self
        data = np.ascontiguousarray(self.tensor().transpose(order)).ravel()
        return WeilElement(ctx, data)

    def to_kind(self, kind: str) -> "WeilElement":
        ctx = Context(self.ctx.factors, kind)
        if kind == self.ctx.kind:
            return self
        if kind == FLOAT:
            return WeilElement(ctx, self.data.astype(np.float64))
        return WeilElement(ctx, np.array([Fraction(x) for x in self.data], dtype=object))

    def __repr__(self):
        return f"WeilElement({self.ctx}, {self.format()})"

    def format(self) -> str:
        if not self.ctx.factors:
            return str(self.data[0])
        terms = []
        for flat, c in enumerate(self.data):
            if c == 0:
                continue
            grid = np.unravel_index(flat, self.ctx.shape)
            mono = []
            for depth, (w, i) in enumerate(zip(self.ctx.factors, grid)):
                s = w.monomial_str(w.basis[i])
                if s != "1":
                    mono.append(s.replace("x", f"x[{depth}]") if self.ctx.depth > 1 else s)
            terms.append(f"{c}" + ("*" + "*".join(mono) if mono else ""))
        return " + ".join(terms) or "0"


def _multiply(ctx: Context, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if not ctx.factors:
        return a * b
    I, J, K = _flat_structure(ctx.factors)
    if ctx.kind == FLOAT:
        return np.bincount(K, weights=a[I] * b[J], minlength=ctx.dim)
    out = ctx.zeros()
    np.add.at(out, K, a[I] * b[J])
    return out


def mul(a: WeilElement, b: WeilElement) -> WeilElement:
    return a * b


def element(w: WeilAlgebra, coeffs: Mapping[Monomial, object] | Sequence, kind: str = RATIONAL) -> WeilElement:
    """Element of the single-factor context (w,) from a monomial->coefficient map or a coefficient list."""
    ctx = Context((w,), kind)
    data = ctx.zeros()
    if isinstance(coeffs, Mapping):
        for e, c in coeffs.items():
            e = tuple(e)
            if e in w.index:
                data[w.index[e]] += ctx.scalar(c)
            elif not any(_divides(g, e) for g in w.source.ideal_gens):
                raise WeilError(f"monomial {e} outside the basis of {w}")
    else:
        for i, c in enumerate(coeffs):
            data[i] = ctx.scalar(c)
    return WeilElement(ctx, data)


# ---------------------------------------------------------------- homomorphisms


class AlgebraHom:
    """Unital algebra homomorphism W_src -> W_tgt fixed by the images of the generators."""

    def __init__(self, src: WeilAlgebra, tgt: WeilAlgebra, gen_images: Sequence, name: str = ""):
        if len(gen_images) != src.k:
            raise IllDefinedHom(f"{len(gen_images)} generator images for {src.k} generators")
        images = []
        kind = RATIONAL
        for g in gen_images:
            if isinstance(g, WeilElement):
                if g.ctx.factors != (tgt,):
                    raise ContextMismatch(f"generator image lives in {g.ctx}, expected {tgt}")
                if g.ctx.kind == FLOAT:
                    kind = FLOAT
                images.append(g)
            else:
                images.append(element(tgt, g) if isinstance(g, Mapping) else parse_polynomial(str(g), tgt))
        images = [im.to_kind(kind) for im in images]
        for i, im in enumerate(images):
            if im.scalar_part != 0:
                raise IllDefinedHom(f"image of x{i + 1} has nonzero constant term")
        self.src, self.tgt, self.name, self.kind = src, tgt, name, kind
        self.gen_images = tuple(images)

        def image_of(e: Monomial) -> WeilElement:
            out = WeilElement.constant(images[0].ctx if images else Context((tgt,), kind), 1)
            for im, power in zip(images, e):
                if power:
                    out = out * im**power
            return out

        for g in src.source.ideal_gens:
            if image_of(g).max_abs() != 0:
                raise IllDefinedHom(f"ideal generator {src.monomial_str(g)} does not map to zero")
        cols = [image_of(e).data for e in src.basis]
        self.matrix = np.stack(cols, axis=1)  # tgt.dim x src.dim

    def __call__(self, a: WeilElement) -> WeilElement:
        return apply_hom(self, a)

    def compose(self, first: "AlgebraHom") -> "AlgebraHom":
        """self o first."""
        if first.tgt != self.src:
            raise ContextMismatch("homs do not compose")
        return AlgebraHom(first.src, self.tgt, [apply_hom(self, g) for g in first.gen_images])

    def float_matrix(self) -> np.ndarray:
        return self.matrix.astype(np.float64)

    def __repr__(self):
        imgs = ", ".join(f"x{i + 1} -> {g.format()}" for i, g in enumerate(self.gen_images))
        return f"AlgebraHom({self.src.source} -> {self.tgt.source}: {imgs})"


def make_hom(src: WeilAlgebra, tgt: WeilAlgebra, gen_images: Sequence, name: str = "") -> AlgebraHom:
    return AlgebraHom(src, tgt, gen_images, name)


def identity_hom(w: WeilAlgebra) -> AlgebraHom:
    return AlgebraHom(w, w, [{_unit(w.k, i): 1} for i in range(w.k)], "id")


def apply_hom(h: AlgebraHom, a: WeilElement) -> WeilElement:
    """Apply h to the top factor of ``a``; lower coefficients ride along."""
    if not a.ctx.factors or a.ctx.top != h.src:
        raise ContextMismatch(f"hom source {h.src} is not the top factor of {a.ctx}")
    ctx = a.ctx.drop(1).extend(h.tgt)
    if a.ctx.kind == FLOAT:
        mat = h.float_matrix()
    elif h.kind == FLOAT:
        raise ContextMismatch("float hom applied in exact rational context")
    else:
        mat = h.matrix
    block = a.data.reshape(-1, h.src.dim)
    return WeilElement(ctx, (block @ mat.T).ravel())


# ---------------------------------------------------------------- pullbacks


@dataclass(frozen=True)
class PullbackReport:
    is_limit: bool
    pullback_dim: int
    cone_rank: int
    apex_dim: int


def check_pullback_square(legs: tuple[AlgebraHom, AlgebraHom], apex: WeilAlgebra,
                          cone: tuple[AlgebraHom, AlgebraHom]) -> PullbackReport:
    """Decide whether ``apex`` with ``cone`` is the pullback of ``legs``.

    legs = (f: U -> B, g: V -> B); cone = (c1: apex -> U, c2: apex -> V).
    The fibered product {(u, v) | f(u) = g(v)} is a subalgebra of U x V, so
    the square is a limit exactly when (c1, c2) maps apex isomorphically
    onto that linear subspace.
    """
    f, g = legs
    c1, c2 = cone
    for h in (f, g, c1, c2):
        if h.kind != RATIONAL:
            raise FloatContextRejected("pullback checks require exact rational homs")
    if f.tgt != g.tgt or c1.src != apex or c2.src != apex or c1.tgt != f.src or c2.tgt != g.src:
        raise ContextMismatch("homs do not form a square")
    top = linalg.matmul(f.matrix.tolist(), c1.matrix.tolist())
    bottom = linalg.matmul(g.matrix.tolist(), c2.matrix.tolist())
    if top != bottom:
        raise NonCommutingSquare("f o c1 != g o c2")
    constraint = [list(rf) + [-x for x in rg] for rf, rg in zip(f.matrix.tolist(), g.matrix.tolist())]
    pb_dim = f.src.dim + g.src.dim - linalg.rank(constraint)
    stacked = c1.matrix.tolist() + c2.matrix.tolist()
    cone_rank = linalg.rank(stacked)
    return PullbackReport(cone_rank == pb_dim == apex.dim, pb_dim, cone_rank, apex.dim)


# ---------------------------------------------------------------- polynomial text

_TERM = re.compile(r"\s*([+-])?\s*([^+-]+)")


def parse_polynomial(text: str, w: WeilAlgebra, kind: str = RATIONAL) -> WeilElement:
    """Parse e.g. ``2*x1 - x1*x2^2 + 1/2*x3`` into an element of ``w``."""
    text = text.strip()
    if not text:
        raise WeilError("empty polynomial")
    coeffs: dict[Monomial, Fraction] = {}
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise WeilError(f"cannot parse polynomial at column {pos + 1}: {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        c = Fraction(sign)
        e = [0] * w.k
        for factor in m.group(2).strip().split("*"):
            factor = factor.strip()
            if not factor:
                raise WeilError(f"empty factor in {text!r}")
            fm = re.fullmatch(r"x(\d+)(?:\^(\d+))?", factor)
            if fm:
                i = int(fm.group(1)) - 1
                if not 0 <= i < w.k:
                    raise WeilError(f"variable x{i + 1} out of range for {w.k} generators")
                e[i] += int(fm.group(2) or 1)
            else:
                try:
                    c *= Fraction(factor)
                except ValueError:
                    raise WeilError(f"bad factor {factor!r} in {text!r}") from None
        coeffs[tuple(e)] = coeffs.get(tuple(e), Fraction(0)) + c
        pos = m.end()
    return element(w, coeffs, kind)
