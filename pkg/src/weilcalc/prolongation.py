"""Points of R^m (x) W, microcubes and their Taylor tables, strong differences.

A point of R^m (x) W over a coefficient context C is an m-tuple of elements
of C (x) W. For a microcube (W = W_{D^n}) the n cube slots are kept as n
separate trailing W_D factors of the context, so moving a slot into the
coefficient context, permuting slots, or appending new directions are plain
axis manipulations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .perm import Permutation, move_last
from .weil import (
    FLOAT,
    RATIONAL,
    AlgebraHom,
    Context,
    ContextMismatch,
    WeilAlgebra,
    WeilElement,
    WeilError,
    W_D,
    D2_plus_D,
    D_k,
    D_power,
    D_sum,
    _unit,
    apply_hom,
    build_algebra,
    make_hom,
    make_infinitesimal_object,
)

DEFAULT_TOL = 1e-9


class AgreementViolation(WeilError):
    pass


def _subset_index(S, n: int) -> int:
    """Flat index of the monomial prod_{i in S} x_i in n stacked W_D factors (slots 1-based)."""
    return sum(1 << (n - i) for i in S)


def _subsets(n: int):
    for mask in range(1 << n):
        yield frozenset(i for i in range(1, n + 1) if mask & (1 << (n - i)))


def subset_key(S) -> str:
    return "".join(str(i) for i in sorted(S))


# ---------------------------------------------------------------- merging tail factors


@lru_cache(maxsize=None)
def _merge_map(factors: tuple[WeilAlgebra, ...]):
    algebra = factors[0]
    for w in factors[1:]:
        from .weil import tensor

        algebra = tensor(algebra, w)
    shape = tuple(w.dim for w in factors)
    perm = np.empty(int(np.prod(shape)), dtype=np.intp)
    for flat in range(len(perm)):
        grid = np.unravel_index(flat, shape)
        e = sum((w.basis[i] for w, i in zip(factors, grid)), ())
        perm[flat] = algebra.index[e]
    return algebra, perm


def merge_tail(x: WeilElement, n: int) -> WeilElement:
    """Re-express the last n factors of x's context as their single tensor-product algebra."""
    if n == 1:
        return x
    if n == 0:
        raise WeilError("nothing to merge")
    tail = x.ctx.factors[-n:]
    algebra, perm = _merge_map(tail)
    base = x.ctx.drop(n)
    block = x.data.reshape(base.dim, -1)
    out = np.empty_like(block)
    out[:, perm] = block
    return WeilElement(base.extend(algebra), out.ravel())


def split_top(x: WeilElement, factors: Sequence[WeilAlgebra]) -> WeilElement:
    """Inverse of :func:`merge_tail`: expand the top factor into ``factors``."""
    factors = tuple(factors)
    if len(factors) == 1:
        if x.ctx.top != factors[0]:
            raise ContextMismatch("top factor does not match")
        return x
    algebra, perm = _merge_map(factors)
    if x.ctx.top != algebra:
        raise ContextMismatch(f"top factor {x.ctx.top} is not {algebra}")
    base = x.ctx.drop(1)
    block = x.data.reshape(base.dim, -1)
    return WeilElement(base.extend(*factors), block[:, perm].ravel())


# ---------------------------------------------------------------- points


@dataclass(frozen=True, eq=False)
class ProlongedPoint:
    """A point of R^m (x) W over a context; W is the top factor of the coordinates' context."""

    coords: tuple

    def __post_init__(self):
        if not self.coords:
            raise WeilError("a point needs at least one coordinate")
        ctx = self.coords[0].ctx
        if any(c.ctx != ctx for c in self.coords):
            raise ContextMismatch("coordinates live in different contexts")

    @property
    def ctx(self) -> Context:
        return self.coords[0].ctx

    @property
    def m(self) -> int:
        return len(self.coords)

    @property
    def shape(self) -> WeilAlgebra:
        return self.ctx.top

    @property
    def base_ctx(self) -> Context:
        return self.ctx.drop(1)

    def close_to(self, other: "ProlongedPoint", tol: float = DEFAULT_TOL) -> bool:
        return self.ctx == other.ctx and all(a.close_to(b, tol) for a, b in zip(self.coords, other.coords))


@dataclass(frozen=True, eq=False)
class Microcube:
    """A point of R^m (x) W_{D^n}; the last n context factors are the cube slots."""

    coords: tuple
    n: int

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if not self.coords:
            raise WeilError("a microcube needs at least one coordinate")
        ctx = self.coords[0].ctx
        if any(c.ctx != ctx for c in self.coords):
            raise ContextMismatch("coordinates live in different contexts")
        if self.n > ctx.depth or any(w != W_D for w in ctx.factors[ctx.depth - self.n:]):
            raise ContextMismatch(f"context {ctx} does not end in {self.n} copies of W_D")

    @property
    def ctx(self) -> Context:
        return self.coords[0].ctx

    @property
    def m(self) -> int:
        return len(self.coords)

    @property
    def base_ctx(self) -> Context:
        return self.ctx.drop(self.n)

    @property
    def kind(self) -> str:
        return self.ctx.kind

    def _blocks(self):
        return [c.data.reshape(self.base_ctx.dim, 1 << self.n) for c in self.coords]

    def b(self, S=()) -> tuple[WeilElement, ...]:
        """Taylor coefficient b_S (slots 1-based) as an m-tuple over the base context."""
        idx = _subset_index(S, self.n)
        base = self.base_ctx
        return tuple(WeilElement(base, blk[:, idx].copy()) for blk in self._blocks())

    @property
    def base(self) -> tuple[WeilElement, ...]:
        return self.b(())

    def close_to(self, other: "Microcube", tol: float = DEFAULT_TOL) -> bool:
        return (self.n == other.n and self.ctx == other.ctx
                and all(a.close_to(b, tol) for a, b in zip(self.coords, other.coords)))

    def __eq__(self, other):
        return (isinstance(other, Microcube) and self.n == other.n and self.ctx == other.ctx
                and all(a == b for a, b in zip(self.coords, other.coords)))

    __hash__ = None

    # --- slot manipulation (fast paths of restrict_along)
    def reorder(self, order: Sequence[int]) -> "Microcube":
        """Reorder the whole factor list (new factor j = old ``order[j]``); n is kept."""
        return Microcube(tuple(c.permute(order) for c in self.coords), self.n)

    def permute(self, sigma: Permutation) -> "Microcube":
        """gamma^sigma: the content of slot i moves to slot sigma(i)."""
        if sigma.n != self.n:
            raise WeilError(f"permutation of {sigma.n} points on a {self.n}-cube")
        k = self.base_ctx.depth
        inv = sigma.inverse()
        order = list(range(k)) + [k + inv(j) - 1 for j in range(1, self.n + 1)]
        return self.reorder(order)

    def scale(self, i: int, alpha) -> "Microcube":
        """alpha ._i gamma: multiply every b_S with i in S by alpha."""
        factor = np.ones(1 << self.n, dtype=object if self.kind == RATIONAL else np.float64)
        a = self.ctx.scalar(alpha)
        for S in _subsets(self.n):
            if i in S:
                factor[_subset_index(S, self.n)] = a
        return Microcube(tuple(WeilElement(self.ctx, (blk * factor).ravel()) for blk in self._blocks()), self.n)

    def face(self, keep: Sequence[int]) -> "Microcube":
        """Restrict along D^k -> D^n inserting the kept slots (in order), zeros elsewhere."""
        keep = list(keep)
        k = self.base_ctx.depth
        idx = [slice(None)] * k
        out = []
        for c in self.coords:
            t = c.tensor() if self.ctx.factors else c.data
            sel = tuple(idx) + tuple(slice(None) if s in keep else 0 for s in range(1, self.n + 1))
            sub = t[sel]
            # remaining slot axes are in increasing order; reorder to ``keep``
            ranks = sorted(keep)
            perm = list(range(k)) + [k + ranks.index(s) for s in keep]
            sub = np.ascontiguousarray(np.transpose(sub, perm)) if keep else sub
            ctx = self.base_ctx.extend(*([W_D] * len(keep)))
            out.append(WeilElement(ctx, np.asarray(sub).ravel()))
        return Microcube(tuple(out), len(keep))

    def view(self, n: int) -> "Microcube":
        """Same coordinates, with only the last n slots treated as cube slots."""
        return Microcube(self.coords, n)

    def extend_context(self, *algebras: WeilAlgebra) -> "Microcube":
        """Insert extra factors into the base context (just below the cube slots)."""
        k = self.base_ctx.depth
        ctx = self.ctx.extend(*algebras)
        lifted = [c.lift(ctx) for c in self.coords]
        depth = ctx.depth
        extra = len(algebras)
        order = list(range(k)) + list(range(depth - extra, depth)) + list(range(k, k + self.n))
        return Microcube(tuple(c.permute(order) for c in lifted), self.n)


def assemble(base: Context, n: int, entries: Mapping) -> Microcube:
    """Build a microcube from Taylor coefficients {S: m-tuple over ``base``}; missing S are zero."""
    entries = {frozenset(S): v for S, v in entries.items()}
    if frozenset() not in entries:
        raise WeilError("Taylor table needs the base point")
    m = len(entries[frozenset()])
    ctx = base.extend(*([W_D] * n))
    blocks = [np.empty((base.dim, 1 << n), dtype=base.dtype) for _ in range(m)]
    zero = base.zeros()
    for S in _subsets(n):
        vec = entries.get(S)
        if vec is not None and len(vec) != m:
            raise WeilError("inconsistent coordinate count in Taylor table")
        idx = _subset_index(S, n)
        for j in range(m):
            if vec is None:
                blocks[j][:, idx] = zero
            else:
                v = vec[j]
                if isinstance(v, WeilElement):
                    if v.ctx != base:
                        raise ContextMismatch(f"coefficient over {v.ctx}, expected {base}")
                    blocks[j][:, idx] = v.data
                else:
                    col = base.zeros()
                    col[0] = base.scalar(v)
                    blocks[j][:, idx] = col
    return Microcube(tuple(WeilElement(ctx, blk.ravel()) for blk in blocks), n)


def constant_point(base: Context, values: Sequence, n: int = 0) -> Microcube:
    return assemble(base, n, {(): tuple(values)})


# ---------------------------------------------------------------- Taylor tables


@dataclass(frozen=True, eq=False)
class TaylorTable:
    """Taylor coefficients of a point, keyed by subsets of slots (cubes) or basis monomials."""

    m: int
    n: int
    base_ctx: Context
    entries: dict
    shape: WeilAlgebra | None = None  # None for cubes

    def __eq__(self, other):
        return (isinstance(other, TaylorTable) and self.m == other.m and self.n == other.n
                and self.shape == other.shape and self.base_ctx == other.base_ctx
                and self.entries.keys() == other.entries.keys()
                and all(tuple(a) == tuple(b) for k in self.entries for a, b in [(self.entries[k], other.entries[k])]))

    __hash__ = None

    def __getitem__(self, key):
        if self.shape is None:
            return self.entries[frozenset(key)]
        return self.entries[tuple(key)]

    def to_json(self) -> dict:
        """JSON object keyed by sorted subset strings; values are m-lists of scalars (base context R only)."""
        if self.base_ctx.factors:
            raise WeilError("only tables over the base scalars serialize")
        out = {}
        for S, vec in self.entries.items():
            key = subset_key(S) if self.shape is None else self.shape.monomial_str(S)
            out[key] = [_json_scalar(v.scalar_part) for v in vec]
        return {"m": self.m, "n": self.n, "kind": self.base_ctx.kind, "table": out}

    @classmethod
    def from_json(cls, obj: Mapping) -> "TaylorTable":
        kind = obj.get("kind", RATIONAL)
        base = Context((), kind)
        m, n = int(obj["m"]), int(obj["n"])
        entries = {}
        for key, vec in obj["table"].items():
            if not all(ch.isdigit() for ch in key):
                raise WeilError(f"bad subset key {key!r}")
            S = frozenset(int(ch) for ch in key)
            if any(not 1 <= i <= n for i in S) or len(S) != len(key):
                raise WeilError(f"subset key {key!r} invalid for n={n}")
            if len(vec) != m:
                raise WeilError(f"entry {key!r} has {len(vec)} coordinates, expected {m}")
            entries[S] = tuple(WeilElement.constant(base, _parse_scalar(v, kind)) for v in vec)
        zero = tuple(WeilElement.constant(base, 0) for _ in range(m))
        for S in _subsets(n):
            entries.setdefault(S, zero)
        return cls(m, n, base, entries)


def _json_scalar(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    return float(v)


def _parse_scalar(v, kind):
    if kind == RATIONAL:
        if isinstance(v, float):
            raise WeilError("float value in a rational table")
        return Fraction(v)
    return float(Fraction(v)) if isinstance(v, str) else float(v)


def table_from_json(text: str) -> TaylorTable:
    return TaylorTable.from_json(json.loads(text))


def to_taylor(point) -> TaylorTable:
    if isinstance(point, Microcube):
        entries = {S: point.b(S) for S in _subsets(point.n)}
        return TaylorTable(point.m, point.n, point.base_ctx, entries)
    if isinstance(point, ProlongedPoint):
        w = point.shape
        base = point.base_ctx
        blocks = [c.data.reshape(base.dim, w.dim) for c in point.coords]
        entries = {e: tuple(WeilElement(base, blk[:, i].copy()) for blk in blocks) for i, e in enumerate(w.basis)}
        return TaylorTable(point.m, w.k, base, entries, shape=w)
    raise TypeError(f"unsupported point {point!r}")


def from_taylor(t: TaylorTable):
    if t.shape is None:
        expected = set(_subsets(t.n))
        if set(t.entries) != expected:
            raise WeilError("Taylor table does not have exactly 2^n entries")
        return assemble(t.base_ctx, t.n, t.entries)
    w = t.shape
    ctx = t.base_ctx.extend(w)
    coords = []
    for j in range(t.m):
        blk = np.empty((t.base_ctx.dim, w.dim), dtype=ctx.dtype)
        for i, e in enumerate(w.basis):
            blk[:, i] = t.entries[e][j].data
        coords.append(WeilElement(ctx, blk.ravel()))
    return ProlongedPoint(tuple(coords))


# ---------------------------------------------------------------- restriction along homs


def _is_cube_algebra(w: WeilAlgebra) -> bool:
    return w == build_algebra(D_power(w.k))


def restrict_along(point, h: AlgebraHom):
    """(id (x) h)(point): apply h to the shape of the point, coordinatewise."""
    if isinstance(point, Microcube):
        if point.n == 0:
            raise WeilError("a 0-cube has no shape to restrict")
        coords = [merge_tail(c, point.n) for c in point.coords]
    else:
        coords = list(point.coords)
    if coords[0].ctx.top != h.src:
        raise ContextMismatch(f"hom source {h.src} does not match point shape {coords[0].ctx.top}")
    images = [apply_hom(h, c) for c in coords]
    if _is_cube_algebra(h.tgt):
        k = h.tgt.k
        return Microcube(tuple(split_top(c, [W_D] * k) for c in images), k)
    return ProlongedPoint(tuple(images))


def _cube(n: int) -> WeilAlgebra:
    return build_algebra(D_power(n))


def scaling_hom(n: int, i: int, alpha) -> AlgebraHom:
    """Induced by (d_1..d_n) -> (.., alpha d_i, ..)."""
    w = _cube(n)
    if isinstance(alpha, float):
        from .weil import element

        images = [element(w, {_unit(n, j): (alpha if j == i - 1 else 1)}, FLOAT) for j in range(n)]
    else:
        images = [{_unit(n, j): (alpha if j == i - 1 else 1)} for j in range(n)]
    return make_hom(w, w, images, f"scale_{i}({alpha})")


def permutation_hom(sigma: Permutation) -> AlgebraHom:
    """Induced by (d_1..d_n) -> (d_sigma(1)..d_sigma(n)): x_j -> x_sigma(j)."""
    n = sigma.n
    w = _cube(n)
    return make_hom(w, w, [{_unit(n, sigma(j) - 1): 1} for j in range(1, n + 1)], f"perm{sigma.images}")


def face_hom(n: int, i: int) -> AlgebraHom:
    """Induced by D^(n-1) -> D^n inserting 0 at slot i."""
    src, tgt = _cube(n), _cube(n - 1)
    images = []
    for j in range(1, n + 1):
        if j == i:
            images.append({})
        else:
            images.append({_unit(n - 1, j - 1 if j < i else j - 2): 1})
    return make_hom(src, tgt, images, f"face_{i}")


def inclusion_hom() -> AlgebraHom:
    """W_{D^2} -> W_{D(2)} induced by the canonical injection D(2) -> D^2."""
    return make_hom(_cube(2), build_algebra(D_sum(2)), [{(1, 0): 1}, {(0, 1): 1}], "i")


def square_hom() -> AlgebraHom:
    """W_D -> W_{D_2} induced by d -> d^2, i.e. X -> X^2."""
    return make_hom(W_D, build_algebra(D_k(2)), [{(2,): 1}], "square")


def phi_hom() -> AlgebraHom:
    """W_phi for phi(d1, d2) = (d1, d2, 0)."""
    return make_hom(build_algebra(D2_plus_D()), _cube(2), [{(1, 0): 1}, {(0, 1): 1}, {}], "W_phi")


def psi_hom() -> AlgebraHom:
    """W_psi for psi(d1, d2) = (d1, d2, d1 d2)."""
    return make_hom(build_algebra(D2_plus_D()), _cube(2), [{(1, 0): 1}, {(0, 1): 1}, {(1, 1): 1}], "W_psi")


def e_axis_hom() -> AlgebraHom:
    """W_{D^2(+)D} -> W_D induced by d -> (0, 0, d)."""
    return make_hom(build_algebra(D2_plus_D()), W_D, [{}, {}, {(1,): 1}], "e-axis")


def d2_axis_hom(i: int) -> AlgebraHom:
    """W_{D(2)} -> W_D induced by the i-th axis D -> D(2)."""
    return make_hom(build_algebra(D_sum(2)), W_D, [{(1,): 1} if j == i else {} for j in (1, 2)], f"axis_{i}")


def diagonal_hom() -> AlgebraHom:
    """W_{D(2)} -> W_D induced by d -> (d, d)."""
    return make_hom(build_algebra(D_sum(2)), W_D, [{(1,): 1}, {(1,): 1}], "diagonal")


# ---------------------------------------------------------------- gluing


@lru_cache(maxsize=None)
def _glue_solver(homs: tuple):
    stacked = []
    for h in homs:
        stacked.extend(h.matrix.tolist())
    return linalg.left_inverse(stacked), stacked


def glue(points: Sequence[ProlongedPoint], homs: Sequence[AlgebraHom], tol: float = DEFAULT_TOL) -> ProlongedPoint:
    """The unique point g with restrict_along(g, homs[k]) == points[k] for all k.

    This is the limit property of a quasi-colimit diagram made computational:
    the stacked hom matrices are injective, so g is read off with an exact
    left inverse and the remaining equations are the agreement conditions.
    """
    homs = tuple(homs)
    src = homs[0].src
    if any(h.src != src for h in homs):
        raise WeilError("gluing homs must share a source")
    L, stacked = _glue_solver(homs)
    base = points[0].base_ctx
    m = points[0].m
    float_mode = base.kind == FLOAT
    Lm = np.array(L, dtype=np.float64 if float_mode else object)
    S = np.array(stacked, dtype=np.float64 if float_mode else object)
    coords = []
    for j in range(m):
        rhs = np.concatenate([p.coords[j].data.reshape(base.dim, -1) for p in points], axis=1)
        sol = rhs @ Lm.T
        back = sol @ S.T
        diff = back - rhs
        scale = max(1.0, float(np.max(np.abs(rhs.astype(np.float64)))) if rhs.size else 1.0)
        bad = (np.any(diff != 0) if not float_mode else float(np.max(np.abs(diff))) > tol * scale)
        if bad:
            raise AgreementViolation("points do not agree on the overlap; no gluing exists")
        coords.append(WeilElement(base.extend(src), sol.ravel()))
    return ProlongedPoint(tuple(coords))


def _as_shape_point(g: Microcube) -> ProlongedPoint:
    return ProlongedPoint(tuple(merge_tail(c, g.n) for c in g.coords))


# ---------------------------------------------------------------- D and strong differences


def extract_d(g: Microcube) -> tuple[WeilElement, ...]:
    """D(gamma) = b_1 for a tangent vector."""
    if g.n != 1:
        raise WeilError(f"D needs a 1-cube, got n={g.n}")
    return g.b({1})


def extract_d_slot(i: int, g: Microcube) -> Microcube:
    """D_i(gamma): move slot i to the end, then take D over the remaining (n-1)-cube."""
    if g.n < 1:
        raise WeilError("D_i needs a cube of degree >= 1")
    if not 1 <= i <= g.n:
        raise WeilError(f"slot {i} out of range 1..{g.n}")
    moved = g.permute(move_last(g.n, i))
    # last slot into coefficient view: (E (x) W_{D^{n-1}}) (x) W_D
    tangent = moved.view(1)
    d = extract_d(tangent)
    return Microcube(d, g.n - 1)


def _agree(u: Sequence[WeilElement], v: Sequence[WeilElement], tol: float) -> bool:
    for a, b in zip(u, v):
        if a.ctx.kind == RATIONAL:
            if a != b:
                return False
        else:
            scale = max(1.0, a.max_abs(), b.max_abs())
            if (a - b).max_abs() > tol * scale:
                return False
    return True


def strong_diff(g1: Microcube, g2: Microcube, tol: float = DEFAULT_TOL, method: str = "taylor") -> Microcube:
    """gamma1 -. gamma2 for microsquares agreeing on D(2).

    ``method="taylor"`` uses the closed form (base b_0, direction b12 - b12');
    ``method="glue"`` solves for the D^2(+)D point through W_phi / W_psi and
    restricts along d -> (0, 0, d).
    """
    if g1.n != 2 or g2.n != 2:
        raise WeilError("strong difference needs two microsquares")
    if g1.ctx != g2.ctx:
        raise ContextMismatch(f"{g1.ctx} vs {g2.ctx}")
    for S in ((), (1,), (2,)):
        if not _agree(g1.b(S), g2.b(S), tol):
            raise AgreementViolation(f"microsquares differ at b_{subset_key(S) or '0'}")
    if method == "taylor":
        top = tuple(a - b for a, b in zip(g1.b({1, 2}), g2.b({1, 2})))
        return assemble(g1.base_ctx, 1, {(): g1.base, (1,): top})
    if method == "glue":
        glued = glue([_as_shape_point(g2), _as_shape_point(g1)], [phi_hom(), psi_hom()], tol)
        return restrict_along(glued, e_axis_hom())
    raise ValueError(f"unknown method {method!r}")


def strong_diff_slot(i: int, g1: Microcube, g2: Microcube, tol: float = DEFAULT_TOL) -> Microcube:
    """gamma1 -._i gamma2 on 3-cubes.

    Slot i joins the coefficient context, turning both cubes into
    microsquares over N = R^m (x) W_D; their strong difference over N is a
    microsquare with slots (i, new).
    """
    if g1.n != 3 or g2.n != 3:
        raise WeilError("slot strong difference needs two 3-cubes")
    if not 1 <= i <= 3:
        raise WeilError(f"slot {i} out of range")
    k = g1.base_ctx.depth
    rest = [s for s in (1, 2, 3) if s != i]
    order = list(range(k)) + [k + i - 1] + [k + s - 1 for s in rest]
    a, b = g1.reorder(order).view(2), g2.reorder(order).view(2)
    try:
        t = strong_diff(a, b, tol)
    except AgreementViolation as exc:
        raise AgreementViolation(f"-._{i}: {exc}") from None
    return Microcube(t.coords, 2)


JACOBI_KEYS = ("123", "132", "213", "231", "312", "321")


@dataclass(frozen=True)
class JacobiResult:
    e1: Microcube
    e2: Microcube
    e3: Microcube
    residual: tuple


def general_jacobi_residual(cubes: Mapping[str, Microcube], tol: float = DEFAULT_TOL) -> JacobiResult:
    """The three expressions of the general Jacobi identity and the sum of their directions."""
    g = cubes
    exprs = [
        (1, ("123", "132"), ("231", "321")),
        (2, ("231", "213"), ("312", "132")),
        (3, ("312", "321"), ("123", "213")),
    ]
    out = []
    for number, (i, (a, b), (c, d)) in enumerate(exprs, start=1):
        try:
            left = strong_diff_slot(i, g[a], g[b], tol)
            right = strong_diff_slot(i, g[c], g[d], tol)
            out.append(strong_diff(left, right, tol))
        except AgreementViolation as exc:
            raise AgreementViolation(f"expression {number} is not well defined: {exc}") from None
    residual = tuple(sum((extract_d(e)[j] for e in out[1:]), extract_d(out[0])[j]) for j in range(out[0].m))
    return JacobiResult(out[0], out[1], out[2], residual)
