"""Coordinate formula for the Frolicher-Nijenhuis bracket, used as an independent oracle.

Forms are arrays with omega(e_J) = omega[J]. For constant coordinate
fields the bracket of decomposable terms is

    [phi (x) d_i, psi (x) d_j] = phi ^ L_{d_i} psi (x) d_j - L_{d_j} phi ^ psi (x) d_i
                                 + (-1)^k (d phi ^ i_{d_i} psi (x) d_j + i_{d_j} phi ^ d psi (x) d_i)

with k = deg phi, wedge normalized by 1/(k! l!) and i_X contracting the
first slot. First derivatives come from one evaluation over W_{D(m)}.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .perm import all_permutations
from .smooth import SmoothMap, const, eval_map, make_smooth_map
from .weil import FLOAT, Context, WeilElement, build_algebra, D_sum


def _full_map(m: int, p: int, components: dict) -> SmoothMap:
    bodies = []
    for key in itertools.product(range(m), repeat=p + 1):
        body = components.get(key, 0)
        if isinstance(body, SmoothMap):
            body = body.outputs[0]
        elif isinstance(body, str):
            body = make_smooth_map(m, 1, body).outputs[0]
        elif not hasattr(body, "op"):
            body = const(body)
        bodies.append(body)
    return make_smooth_map(m, len(bodies), bodies)


def values_and_gradients(m: int, p: int, components: dict, x) -> tuple[np.ndarray, np.ndarray]:
    """K[i, J] and dK[a, i, J] = d_a K^i_J at x."""
    F = _full_map(m, p, components)
    w = build_algebra(D_sum(m))
    ctx = Context((w,), FLOAT)
    point = [WeilElement.constant(ctx, float(xi)) + WeilElement.generator(ctx, 0, a) for a, xi in enumerate(x)]
    out = eval_map(F, point, ctx=ctx)
    shape = (m,) * (p + 1)
    vals = np.array([o.data[0] for o in out]).reshape(shape)
    # the D(m) basis is 1, x1, .., xm in graded-lex order
    grads = np.array([[o.data[w.index[tuple(int(b == a) for b in range(m))]] for o in out] for a in range(m)])
    return vals, grads.reshape((m,) + shape)


def wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    k, l = a.ndim, b.ndim
    n = k + l
    m = (a.shape + b.shape)[0] if n else 0
    if n == 0:
        return a * b
    out = np.zeros((m,) * n)
    perms = all_permutations(n)
    c = 1.0 / (math.factorial(k) * math.factorial(l))
    for J in itertools.product(range(m), repeat=n):
        s = 0.0
        for sigma in perms:
            idx = [J[sigma(t) - 1] for t in range(1, n + 1)]
            s += sigma.sign * a[tuple(idx[:k])] * b[tuple(idx[k:])]
        out[J] = c * s
    return out


def exterior_d(grad: np.ndarray) -> np.ndarray:
    """(d omega)_{j0..jk} = sum_a (-1)^a d_{ja} omega_{j0..^ja..jk} from grad[a, J] = d_a omega_J."""
    m = grad.shape[0]
    k = grad.ndim - 1
    out = np.zeros((m,) * (k + 1))
    for J in itertools.product(range(m), repeat=k + 1):
        out[J] = sum((-1) ** a * grad[(J[a],) + J[:a] + J[a + 1:]] for a in range(k + 1))
    return out


def interior(i: int, omega: np.ndarray) -> np.ndarray:
    return omega[i]


def classical_fn_oracle(K, L, points) -> list[np.ndarray]:
    """Components [K, L]^i_J at each probe point, from the coordinate formula.

    K and L are component-built tangent-vector-valued forms (``VVForm`` with
    ``components``); returns one array of shape (m,)*(1+p+q) per point.
    """
    if K.components is None or L.components is None:
        raise ValueError("the classical oracle needs component-built forms")
    m, p, q = K.m, K.p, L.p
    results = []
    for x in points:
        phi, dphi = values_and_gradients(m, p, K.components, x)
        psi, dpsi = values_and_gradients(m, q, L.components, x)
        out = np.zeros((m,) * (1 + p + q))
        sign = (-1) ** p
        for i in range(m):
            d_phi_i = exterior_d(dphi[:, i])
            for j in range(m):
                d_psi_j = exterior_d(dpsi[:, j])
                # terms along d_j
                out[j] += wedge(phi[i], dpsi[i, j])
                if q:
                    out[j] += sign * wedge(d_phi_i, interior(i, psi[j]))
                # terms along d_i
                out[i] -= wedge(dphi[j, i], psi[j])
                if p:
                    out[i] += sign * wedge(interior(j, phi[i]), d_psi_j)
        results.append(out)
    return results
