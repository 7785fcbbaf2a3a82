"""Smooth maps R^m -> R^k as expression DAGs, evaluable in any context.

Ring nodes evaluate with context arithmetic. A primitive g applied to an
element a + n (a scalar, n nilpotent) is lifted through its Taylor series
sum_j g^(j)(a)/j! n^j, truncated at the nilpotency index of the context, so
the same map evaluates over plain scalars, dual numbers, or any tower of
Weil algebras.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Sequence

from .weil import FLOAT, RATIONAL, WeilElement, WeilError


class MalformedMap(WeilError):
    pass


def _exp_series(a: float, r: int) -> list[float]:
    return [math.exp(a)] * (r + 1)


def _sin_series(a: float, r: int) -> list[float]:
    cycle = [math.sin(a), math.cos(a), -math.sin(a), -math.cos(a)]
    return [cycle[j % 4] for j in range(r + 1)]


def _cos_series(a: float, r: int) -> list[float]:
    cycle = [math.cos(a), -math.sin(a), -math.cos(a), math.sin(a)]
    return [cycle[j % 4] for j in range(r + 1)]


def _id_series(a, r: int) -> list:
    return ([a, 1] + [0] * r)[: r + 1]


# name -> (scalar function, all-order derivative values, is exact over Q)
PRIMITIVES: dict[str, tuple[Callable, Callable, bool]] = {
    "exp": (math.exp, _exp_series, False),
    "sin": (math.sin, _sin_series, False),
    "cos": (math.cos, _cos_series, False),
    "id": (lambda a: a, _id_series, True),
}


@dataclass(frozen=True, eq=False)
class Node:
    op: str
    args: tuple = ()
    value: object = None

    # operator sugar so maps can be written as Python expressions
    def __add__(self, other):
        return add(self, _node(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, neg(_node(other)))

    def __rsub__(self, other):
        return add(_node(other), neg(self))

    def __mul__(self, other):
        if isinstance(other, (int, float, Rational)):
            return scale(other, self)
        return mul(self, _node(other))

    __rmul__ = __mul__

    def __neg__(self):
        return neg(self)

    def __pow__(self, n: int):
        return power(self, n)

    def __repr__(self):
        return to_sexpr(self)


def _node(x) -> Node:
    if isinstance(x, Node):
        return x
    if isinstance(x, (int, float, Rational)):
        return const(x)
    raise MalformedMap(f"cannot use {x!r} as an expression")


def _num(v):
    return v if isinstance(v, float) else Fraction(v)


def const(v) -> Node:
    return Node("const", (), _num(v))


def var(i: int) -> Node:
    if i < 0:
        raise MalformedMap("negative variable index")
    return Node("var", (), int(i))


def add(*args: Node) -> Node:
    args = tuple(_node(a) for a in args)
    if all(a.op == "const" for a in args):
        return const(sum((a.value for a in args), Fraction(0)))
    return Node("add", args)


def neg(a: Node) -> Node:
    a = _node(a)
    if a.op == "const":
        return const(-a.value)
    return Node("neg", (a,))


def mul(*args: Node) -> Node:
    args = tuple(_node(a) for a in args)
    if all(a.op == "const" for a in args):
        out = Fraction(1)
        for a in args:
            out = out * a.value
        return const(out)
    return Node("mul", args)


def scale(c, a: Node) -> Node:
    a = _node(a)
    if a.op == "const":
        return const(_num(c) * a.value)
    return Node("scale", (a,), _num(c))


def power(a: Node, n: int) -> Node:
    if not isinstance(n, int) or n < 0:
        raise MalformedMap("power exponent must be a non-negative integer")
    a = _node(a)
    if a.op == "const":
        return const(a.value**n)
    return Node("pow", (a,), n)


def prim(name: str, a: Node) -> Node:
    if name not in PRIMITIVES:
        raise MalformedMap(f"unknown primitive {name!r}")
    return Node("prim", (_node(a),), name)


def exp(a):
    return prim("exp", a)


def sin(a):
    return prim("sin", a)


def cos(a):
    return prim("cos", a)


def variables(m: int) -> list[Node]:
    return [var(i) for i in range(m)]


def _walk(node: Node, seen: set):
    if id(node) in seen:
        return
    seen.add(id(node))
    yield node
    for a in node.args:
        yield from _walk(a, seen)


@dataclass(frozen=True, eq=False)
class SmoothMap:
    m: int
    k: int
    outputs: tuple

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = tuple(point[0])
        return eval_map(self, point)

    def __repr__(self):
        return f"SmoothMap({self.m}->{self.k}: {to_sexpr_map(self)})"


def make_smooth_map(m: int, k: int, body) -> SmoothMap:
    """Validate a body (list of nodes, a single node, or S-expression text)."""
    if isinstance(body, str):
        body = parse_sexpr(body)
    if isinstance(body, Node):
        body = [body]
    outputs = tuple(_node(b) for b in body)
    if len(outputs) != k:
        raise MalformedMap(f"body has {len(outputs)} outputs, expected {k}")
    seen: set = set()
    for out in outputs:
        for node in _walk(out, seen):
            if node.op == "var" and not 0 <= node.value < m:
                raise MalformedMap(f"variable {node.value} out of range for m={m}")
            if node.op == "prim" and node.value not in PRIMITIVES:
                raise MalformedMap(f"unknown primitive {node.value!r}")
    return SmoothMap(m, k, outputs)


def _lift_primitive(name: str, x):
    func, series, exact = PRIMITIVES[name]
    if not isinstance(x, WeilElement):
        if isinstance(x, Fraction) and not exact:
            x = float(x)
        return func(x)
    ctx = x.ctx
    if ctx.kind == RATIONAL and not exact:
        raise WeilError(f"primitive {name!r} is transcendental; use a float context")
    a = x.scalar_part
    n = x.nilpotent_part()
    r = ctx.nilpotency
    derivs = series(float(a) if ctx.kind == FLOAT else a, r)
    coeffs = [ctx.scalar(d) / math.factorial(j) if ctx.kind == FLOAT else Fraction(d) / math.factorial(j)
              for j, d in enumerate(derivs)]
    # Horner in the nilpotent part; n^(r+1) = 0 so this is exact truncation.
    out = WeilElement.constant(ctx, coeffs[r])
    for c in reversed(coeffs[:r]):
        out = out * n + c
    return out


def _eval_node(node: Node, point: Sequence, memo: dict):
    key = id(node)
    if key in memo:
        return memo[key]
    op = node.op
    if op == "const":
        v = node.value
        ctx = memo.get("ctx")
        if ctx is not None:
            v = WeilElement.constant(ctx, v)
        elif point and isinstance(point[0], float):
            v = float(v)
    elif op == "var":
        v = point[node.value]
    else:
        args = [_eval_node(a, point, memo) for a in node.args]
        if op == "add":
            v = args[0]
            for a in args[1:]:
                v = v + a
        elif op == "neg":
            v = -args[0]
        elif op == "mul":
            v = args[0]
            for a in args[1:]:
                v = v * a
        elif op == "scale":
            c = node.value
            v = args[0] * (float(c) if _is_float(args[0]) else c)
        elif op == "pow":
            v = args[0] ** node.value
        elif op == "prim":
            v = _lift_primitive(node.value, args[0])
        else:
            raise MalformedMap(f"unknown node {op!r}")
    memo[key] = v
    return v


def _is_float(x) -> bool:
    if isinstance(x, WeilElement):
        return x.ctx.kind == FLOAT
    return isinstance(x, float)


def eval_map(f: SmoothMap, p: Sequence, ctx=None) -> list:
    """Evaluate f at a point whose coordinates share one context (or are scalars).

    ``ctx`` fixes the context of constant outputs when the point has no
    Weil-element coordinates (e.g. m = 0).
    """
    p = list(p)
    if len(p) != f.m:
        raise MalformedMap(f"point has {len(p)} coordinates, map expects {f.m}")
    elems = [x for x in p if isinstance(x, WeilElement)]
    if elems:
        ctx = elems[0].ctx
        for x in elems:
            if x.ctx != ctx:
                raise WeilError("point coordinates live in different contexts")
    if ctx is not None:
        p = [x if isinstance(x, WeilElement) else WeilElement.constant(ctx, x) for x in p]
    memo: dict = {"ctx": ctx}
    return [_eval_node(out, p, memo) for out in f.outputs]


def compose(g: SmoothMap, f: SmoothMap) -> SmoothMap:
    """g o f as a single DAG."""
    if g.m != f.k:
        raise MalformedMap("arity mismatch in composition")
    memo: dict = {}

    def sub(node: Node) -> Node:
        key = id(node)
        if key not in memo:
            if node.op == "var":
                memo[key] = f.outputs[node.value]
            elif node.op == "const":
                memo[key] = node
            else:
                memo[key] = Node(node.op, tuple(sub(a) for a in node.args), node.value)
        return memo[key]

    return SmoothMap(f.m, g.k, tuple(sub(o) for o in g.outputs))


def identity_map(m: int) -> SmoothMap:
    return make_smooth_map(m, m, variables(m))


# ---------------------------------------------------------------- S-expressions

_UNARY = {"neg", "exp", "sin", "cos", "id"}


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            tokens.append((ch, i))
            i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            tokens.append((text[i:j], i))
            i = j
    return tokens


def _parse_number(tok: str, pos: int):
    try:
        if any(c in tok for c in ".eE") and "/" not in tok:
            return float(tok)
        return Fraction(tok)
    except ValueError:
        raise MalformedMap(f"expected a number at column {pos + 1}, got {tok!r}") from None


def parse_sexpr(text: str) -> list[Node]:
    """Parse ``(vec e1 e2 ...)`` (or a single expression) into output nodes."""
    tokens = _tokenize(text)
    if not tokens:
        raise MalformedMap("empty expression")
    pos = 0

    def expect(tok):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos][0] != tok:
            where = tokens[pos][1] + 1 if pos < len(tokens) else len(text) + 1
            raise MalformedMap(f"expected {tok!r} at column {where}")
        pos += 1

    def expr() -> Node | list:
        nonlocal pos
        if pos >= len(tokens):
            raise MalformedMap("unexpected end of expression")
        tok, at = tokens[pos]
        if tok == ")":
            raise MalformedMap(f"unexpected ')' at column {at + 1}")
        if tok != "(":
            pos += 1
            return const(_parse_number(tok, at))
        pos += 1
        if pos >= len(tokens):
            raise MalformedMap("unexpected end of expression")
        head, hat = tokens[pos]
        pos += 1
        if head == "var":
            tok, at = tokens[pos]
            pos += 1
            n = _parse_number(tok, at)
            if isinstance(n, float) or n.denominator != 1:
                raise MalformedMap(f"variable index must be an integer at column {at + 1}")
            node = var(int(n))
        elif head == "const":
            tok, at = tokens[pos]
            pos += 1
            node = const(_parse_number(tok, at))
        elif head in ("scale", "pow"):
            tok, at = tokens[pos]
            pos += 1
            n = _parse_number(tok, at)
            child = expr()
            if head == "scale":
                node = scale(n, child)
            else:
                if isinstance(n, float) or n.denominator != 1:
                    raise MalformedMap(f"pow exponent must be an integer at column {at + 1}")
                node = power(child, int(n))
        elif head in ("add", "mul", "sub", "vec") or head in _UNARY:
            args = []
            while pos < len(tokens) and tokens[pos][0] != ")":
                args.append(expr())
            if head == "vec":
                expect(")")
                return args
            if head in _UNARY:
                if len(args) != 1:
                    raise MalformedMap(f"{head} takes one argument (column {hat + 1})")
                node = neg(args[0]) if head == "neg" else prim(head, args[0])
            elif head == "sub":
                if len(args) != 2:
                    raise MalformedMap(f"sub takes two arguments (column {hat + 1})")
                node = args[0] - args[1]
            else:
                if not args:
                    raise MalformedMap(f"{head} needs arguments (column {hat + 1})")
                node = add(*args) if head == "add" else mul(*args)
        else:
            raise MalformedMap(f"unknown operator {head!r} at column {hat + 1}")
        expect(")")
        return node

    result = expr()
    if pos != len(tokens):
        raise MalformedMap(f"trailing input at column {tokens[pos][1] + 1}")
    return result if isinstance(result, list) else [result]


def _fmt_num(v) -> str:
    if isinstance(v, Fraction) and v.denominator == 1:
        return str(v.numerator)
    return repr(v) if isinstance(v, float) else str(v)


def to_sexpr(node: Node) -> str:
    op = node.op
    if op == "const":
        return _fmt_num(node.value)
    if op == "var":
        return f"(var {node.value})"
    if op == "scale":
        return f"(scale {_fmt_num(node.value)} {to_sexpr(node.args[0])})"
    if op == "pow":
        return f"(pow {node.value} {to_sexpr(node.args[0])})"
    if op == "prim":
        return f"({node.value} {to_sexpr(node.args[0])})"
    return f"({op} " + " ".join(to_sexpr(a) for a in node.args) + ")"


def to_sexpr_map(f: SmoothMap) -> str:
    return "(vec " + " ".join(to_sexpr(o) for o in f.outputs) + ")"
