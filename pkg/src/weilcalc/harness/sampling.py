"""Seeded random data: scalars, microcubes, polynomial maps, forms and Jacobi families.

All randomness flows through one numpy ``Generator`` on the PCG64 bit
generator, so a (seed, call sequence) pair reproduces every sample.
Rationals have numerators in [-9, 9] and denominators in [1, 5]; floats
are uniform on [-2, 2].
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from ..forms import Semiform, make_semiform
from ..icons import VVForm, alternating_components, compile_vvform, vector_field
from ..perm import all_permutations
from ..prolongation import JACOBI_KEYS, Microcube, TaylorTable, assemble, to_taylor
from ..smooth import Node, add, const, neg, sin, exp, variables
from ..weil import FLOAT, RATIONAL, Context

# For each two-element Taylor coefficient, the cube keys that must share it
# in an admissible general-Jacobi family (the other three share a second value).
_JACOBI_GROUPS = {
    frozenset({1, 2}): ("123", "132", "312"),
    frozenset({1, 3}): ("123", "132", "213"),
    frozenset({2, 3}): ("123", "213", "231"),
}


class Sampler:
    def __init__(self, seed: int, kind: str = RATIONAL, transcendental: bool = False):
        self.seed = seed
        self.kind = kind
        self.transcendental = transcendental and kind == FLOAT
        self.rng = np.random.Generator(np.random.PCG64(seed))

    @property
    def base(self) -> Context:
        return Context((), self.kind)

    def scalar(self, nonzero: bool = False):
        while True:
            if self.kind == RATIONAL:
                v = Fraction(int(self.rng.integers(-9, 10)), int(self.rng.integers(1, 6)))
            else:
                v = float(self.rng.uniform(-2, 2))
            if v != 0 or not nonzero:
                return v

    def small(self):
        """Coefficient for polynomial maps: keeps exact brackets of modest height."""
        if self.kind == RATIONAL:
            return Fraction(int(self.rng.integers(-3, 4)), int(self.rng.integers(1, 3)))
        return float(self.rng.uniform(-1, 1))

    def vector(self, m: int) -> tuple:
        return tuple(self.scalar() for _ in range(m))

    def integer(self, lo: int, hi: int) -> int:
        return int(self.rng.integers(lo, hi + 1))

    def choice(self, seq):
        return seq[int(self.rng.integers(len(seq)))]

    # ---- microcubes
    def entries(self, m: int, n: int) -> dict:
        return {S: self.vector(m) for r in range(n + 1) for S in itertools.combinations(range(1, n + 1), r)}

    def cube(self, m: int, n: int) -> Microcube:
        return assemble(self.base, n, self.entries(m, n))

    def table(self, m: int, n: int) -> TaylorTable:
        return to_taylor(self.cube(m, n))

    def agreeing_pair(self, m: int) -> tuple[Microcube, Microcube]:
        """Two microsquares equal on D(2), differing at b_12."""
        e = self.entries(m, 2)
        f = dict(e)
        f[(1, 2)] = self.vector(m)
        return assemble(self.base, 2, e), assemble(self.base, 2, f)

    def jacobi_family(self, m: int) -> dict[str, Microcube]:
        """Six 3-cubes for which every strong difference in the general Jacobi identity is defined."""
        shared = {S: self.vector(m) for S in [(), (1,), (2,), (3,)]}
        pair_values = {S: (self.vector(m), self.vector(m)) for S in _JACOBI_GROUPS}
        family = {}
        for key in JACOBI_KEYS:
            e = dict(shared)
            for S, group in _JACOBI_GROUPS.items():
                e[tuple(sorted(S))] = pair_values[S][0 if key in group else 1]
            e[(1, 2, 3)] = self.vector(m)
            family[key] = assemble(self.base, 3, e)
        return family

    # ---- maps and forms
    def polynomial(self, m: int, terms: int = 3, degree: int = 2) -> Node:
        xs = variables(m)
        out = []
        for _ in range(terms):
            t = const(self.small())
            for _ in range(self.integer(0, degree)):
                t = t * xs[self.integer(0, m - 1)]
            out.append(t)
        if self.transcendental and self.rng.uniform() < 0.5:
            wrap = sin if self.rng.uniform() < 0.5 else exp
            out.append(const(self.small()) * wrap(xs[self.integer(0, m - 1)] * const(self.small())))
        return add(*out)

    def vvform(self, m: int, p: int, label: str = "K") -> VVForm:
        free = {(i,) + J: self.polynomial(m) for i in range(m) for J in itertools.combinations(range(m), p)}
        return compile_vvform(m, p, alternating_components(m, p, free), label, check=False)

    def vector_field(self, m: int, label: str = "X") -> VVForm:
        return vector_field(m, [self.polynomial(m) for _ in range(m)], label)

    def semiform(self, m: int, q: int, alternating: bool = False, label: str = "theta") -> Semiform:
        """Component q-form (alternating) or q-semiform with independent components."""
        if not alternating:
            comps = {J: self.polynomial(m) for J in itertools.product(range(m), repeat=q)}
            return make_semiform(q, components=comps, m=m, label=label)
        comps = {}
        for J in itertools.combinations(range(m), q):
            body = self.polynomial(m)
            for s in all_permutations(q):
                K = tuple(J[s(a) - 1] for a in range(1, q + 1))
                comps[K] = body if s.sign > 0 else neg(body)
        return make_semiform(q, components=comps, m=m, label=label)

    def nonlinear_semiform(self, m: int, q: int, label: str = "theta") -> Semiform:
        """A q-semiform that also reads the higher Taylor coefficients b_S (|S| >= 2).

        theta(gamma) = f(b_0) * prod_a <c_a, b_a> + g(b_0) * <c, b_{1..q}>: each term is
        homogeneous of degree one in every slot.
        """
        f, g = self.polynomial(m), self.polynomial(m)
        from ..smooth import make_smooth_map, eval_map

        F = make_smooth_map(m, 2, [f, g])
        cs = [[self.small() for _ in range(m)] for _ in range(q + 1)]

        def fn(cube: Microcube):
            ctx = cube.base_ctx
            fv, gv = eval_map(F, list(cube.base), ctx=ctx)
            out = fv
            for a in range(1, q + 1):
                b = cube.b({a})
                out = out * sum((x * c for x, c in zip(b, cs[a - 1])), start=0 * b[0])
            top = cube.b(set(range(1, q + 1)))
            return out + gv * sum((x * c for x, c in zip(top, cs[q])), start=0 * top[0]) if q else out + gv

        return Semiform(q, fn, label, m)
