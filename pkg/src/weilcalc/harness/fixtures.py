"""Fixture formats: algebra-spec text, vector-valued form JSON, Taylor tables.

Algebra spec (one block per declaration, ``#`` starts a comment)::

    object D2 { gens = 2; ideal = x1^2, x2^2 }
    hom inc : D2 -> D2sum { x1 -> x1; x2 -> x2 }
    square diagram { legs = inc, inc; apex = D2plusD; cone = phi, psi }
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..icons import VVForm, compile_vvform
from ..prolongation import TaylorTable
from ..smooth import make_smooth_map
from ..weil import AlgebraHom, WeilAlgebra, WeilError, build_algebra, make_hom, make_infinitesimal_object


class FixtureError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:{column}: "
        super().__init__(where + message)
        self.line, self.column = line, column


@dataclass
class AlgebraSpec:
    objects: dict[str, WeilAlgebra] = field(default_factory=dict)
    homs: dict[str, AlgebraHom] = field(default_factory=dict)
    squares: dict[str, dict] = field(default_factory=dict)


_HEADER = re.compile(
    r"(?P<kw>object|hom|square)\s+(?P<name>[A-Za-z_][\w]*)"
    r"(?:\s*:\s*(?P<src>[A-Za-z_]\w*)\s*->\s*(?P<tgt>[A-Za-z_]\w*))?\s*\{"
)
_MONO = re.compile(r"x(\d+)(?:\^(\d+))?")


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0].ljust(len(line)) for line in text.split("\n"))


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _parse_monomial(token: str, k: int, err) -> tuple[int, ...]:
    e = [0] * k
    for factor in token.split("*"):
        factor = factor.strip()
        m = _MONO.fullmatch(factor)
        if not m:
            raise err(f"bad monomial {token.strip()!r}")
        i = int(m.group(1)) - 1
        if not 0 <= i < k:
            raise err(f"variable x{i + 1} out of range for {k} generators")
        e[i] += int(m.group(2) or 1)
    return tuple(e)


def _fields(body: str, start: int, text: str, path) -> list[tuple[str, str, int]]:
    """Split a block body on ';' / newlines into (key, value, offset) or (lhs, rhs) pairs."""
    out = []
    pos = 0
    for piece in re.split(r"[;\n]", body):
        offset = start + pos
        pos += len(piece) + 1
        if piece.strip():
            out.append((piece, offset))
    return out


def parse_algebra_spec(text: str, path=None) -> AlgebraSpec:
    spec = AlgebraSpec()
    text = _strip_comments(text)
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _HEADER.match(text, pos)
        if not m:
            line, col = _position(text, pos)
            raise FixtureError("expected 'object', 'hom' or 'square' declaration", line, col, path)
        close = text.find("}", m.end())
        if close < 0:
            line, col = _position(text, m.start())
            raise FixtureError("unterminated block (missing '}')", line, col, path)
        body_start = m.end()
        body = text[body_start:close]
        kw, name = m.group("kw"), m.group("name")

        def err_at(offset):
            line, col = _position(text, offset)
            return lambda msg: FixtureError(msg, line, col, path)

        try:
            if kw == "object":
                spec.objects[name] = _object_block(name, body, body_start, text, err_at)
            elif kw == "hom":
                if not m.group("src"):
                    raise err_at(m.start())("hom needs ': <src> -> <tgt>'")
                spec.homs[name] = _hom_block(name, m, spec, body, body_start, text, err_at)
            else:
                spec.squares[name] = _square_block(body, body_start, text, err_at)
        except WeilError as exc:
            raise err_at(m.start())(str(exc)) from None
        pos = close + 1
    return spec


def _object_block(name, body, start, text, err_at) -> WeilAlgebra:
    gens = None
    ideal_text = None
    for piece, offset in _fields(body, start, text, None):
        key, eq, value = piece.partition("=")
        err = err_at(offset + len(piece) - len(piece.lstrip()))
        if not eq:
            raise err(f"expected 'key = value', got {piece.strip()!r}")
        key = key.strip()
        if key == "gens":
            try:
                gens = int(value.strip())
            except ValueError:
                raise err(f"gens must be an integer, got {value.strip()!r}") from None
        elif key == "ideal":
            ideal_text = (value, offset + len(key) + 1, err)
        else:
            raise err(f"unknown object field {key!r}")
    if gens is None or ideal_text is None:
        raise err_at(start)(f"object {name} needs both 'gens' and 'ideal'")
    value, _, err = ideal_text
    monos = [_parse_monomial(tok, gens, err) for tok in value.split(",") if tok.strip()]
    return build_algebra(make_infinitesimal_object(gens, monos, name))


def _hom_block(name, m, spec, body, start, text, err_at) -> AlgebraHom:
    src_name, tgt_name = m.group("src"), m.group("tgt")
    for n in (src_name, tgt_name):
        if n not in spec.objects:
            raise err_at(m.start())(f"unknown object {n!r}")
    src, tgt = spec.objects[src_name], spec.objects[tgt_name]
    images = {}
    for piece, offset in _fields(body.replace(",", ";"), start, text, None):
        err = err_at(offset + len(piece) - len(piece.lstrip()))
        lhs, arrow, rhs = piece.partition("->")
        if not arrow:
            raise err(f"expected 'xi -> polynomial', got {piece.strip()!r}")
        g = _MONO.fullmatch(lhs.strip())
        if not g or g.group(2):
            raise err(f"left side must be a generator, got {lhs.strip()!r}")
        i = int(g.group(1)) - 1
        if not 0 <= i < src.k:
            raise err(f"generator x{i + 1} out of range for {src_name}")
        images[i] = rhs.strip()
    gen_images = [images.get(i, "0*x1") for i in range(src.k)]
    return make_hom(src, tgt, gen_images, name)


def _square_block(body, start, text, err_at) -> dict:
    out = {}
    for piece, offset in _fields(body, start, text, None):
        key, eq, value = piece.partition("=")
        err = err_at(offset + len(piece) - len(piece.lstrip()))
        if not eq:
            raise err(f"expected 'key = value', got {piece.strip()!r}")
        out[key.strip()] = [v.strip() for v in value.split(",")]
    for key in ("legs", "apex", "cone"):
        if key not in out:
            raise err_at(start)(f"square needs '{key}'")
    return out


def load_algebra_spec(path) -> AlgebraSpec:
    path = Path(path)
    return parse_algebra_spec(path.read_text(), path)


def load_vvform(path) -> VVForm:
    """JSON: {"m": 2, "p": 1, "label": "K", "components": {"0,0": "(var 0)", ...}}."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FixtureError(exc.msg, exc.lineno, exc.colno, path) from None
    try:
        m, p = int(obj["m"]), int(obj["p"])
        comps = {}
        for key, text in obj["components"].items():
            idx = tuple(int(x) for x in key.split(",")) if key else ()
            comps[idx] = make_smooth_map(m, 1, str(text))
        return compile_vvform(m, p, comps, obj.get("label", path.stem))
    except (KeyError, ValueError) as exc:
        raise FixtureError(f"bad form fixture: {exc}", path=path) from None


def load_taylor_table(path) -> TaylorTable:
    path = Path(path)
    try:
        return TaylorTable.from_json(json.loads(path.read_text()))
    except json.JSONDecodeError as exc:
        raise FixtureError(exc.msg, exc.lineno, exc.colno, path) from None
    except (KeyError, ValueError) as exc:
        raise FixtureError(f"bad Taylor table: {exc}", path=path) from None


BUNDLED = Path(__file__).parent / "fixtures"
