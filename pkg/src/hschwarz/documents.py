"""Map documents: JSON Lines files declaring named harmonic maps.

Each non-blank line is one document::

    {"maps": {"f": {"h": <expr>, "g": <expr>},
              "k": {"h": {"poly": [[0, 0], [1, 0]]}, "omega": {"poly": [[0, 0], [1, 0]]}}}}

Expressions are single-key tagged objects. Complex numbers are ``[re, im]``
(a bare real number is also accepted on input).

=============  ==============================================
tag            payload
=============  ==============================================
``poly``       list of coefficients, ascending powers
``mobius``     ``{"a": c, "b": c, "c": c, "d": c}``
``exp``        ``{}``
``identity``   ``{}``
``const``      complex number
``add``        list of expressions (at least one)
``mul``        ``[left, right]``
``div``        ``[numerator, denominator]``
``compose``    ``[outer, inner]``
``scale``      ``[factor, expr]``
=============  ==============================================

Lines starting with ``#`` are comments. Floats are written with 17
significant digits, so parse -> emit -> parse is lossless.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Union

from .analytic import (
    Add,
    AnalyticExpr,
    Compose,
    Constant,
    Div,
    Exp,
    Identity,
    Mobius,
    MobiusLeaf,
    Mul,
    Polynomial,
    Scale,
)
from .errors import DocumentError, HSchwarzError
from .harmonic import HarmonicMap

LEAF_TAGS = ("poly", "mobius", "exp", "identity", "const")
NODE_TAGS = ("add", "mul", "div", "compose", "scale")


@dataclass(frozen=True)
class MapSpec:
    """A declared map, remembering the form it was written in."""

    h: AnalyticExpr
    g: AnalyticExpr = None
    omega: Polynomial = None

    @property
    def omega_form(self) -> bool:
        return self.omega is not None

    def build(self) -> HarmonicMap:
        if self.omega_form:
            return HarmonicMap.from_dilatation(self.h, self.omega)
        return HarmonicMap(self.g, self.h)


@dataclass(frozen=True)
class MapDocument:
    maps: Dict[str, MapSpec]
    line: int = None

    def harmonic(self, name: str) -> HarmonicMap:
        if name not in self.maps:
            known = ", ".join(sorted(self.maps)) or "none"
            raise KeyError(f"no map named {name!r} (known: {known})")
        return self.maps[name].build()

    def names(self) -> List[str]:
        return list(self.maps)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _complex(x, path):
    if isinstance(x, bool):
        raise DocumentError("expected a complex number [re, im]", path)
    if isinstance(x, (int, float)):
        return complex(float(x), 0.0)
    if isinstance(x, list) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(float(x[0]), float(x[1]))
    raise DocumentError("expected a complex number [re, im]", path)


def _list(x, path, n=None):
    if not isinstance(x, list) or (n is not None and len(x) != n):
        want = f"a list of {n} items" if n else "a list"
        raise DocumentError(f"expected {want}", path)
    return x


def parse_expr(obj, path: str = "$") -> AnalyticExpr:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise DocumentError("expression must be an object with exactly one tag", path)
    (tag, body), = obj.items()
    sub = f"{path}.{tag}"
    try:
        if tag == "poly":
            coeffs = _list(body, sub)
            if not coeffs:
                raise DocumentError("polynomial needs at least one coefficient", sub)
            return Polynomial(tuple(_complex(c, f"{sub}[{i}]") for i, c in enumerate(coeffs)))
        if tag == "mobius":
            if not isinstance(body, dict) or set(body) != set("abcd"):
                raise DocumentError("mobius needs keys a, b, c, d", sub)
            return MobiusLeaf(Mobius(*(_complex(body[k], f"{sub}.{k}") for k in "abcd")))
        if tag in ("exp", "identity"):
            if body not in ({}, None):
                raise DocumentError(f"{tag} takes an empty object", sub)
            return Exp() if tag == "exp" else Identity()
        if tag == "const":
            return Constant(_complex(body, sub))
        if tag == "add":
            terms = _list(body, sub)
            if not terms:
                raise DocumentError("add needs at least one term", sub)
            return Add(tuple(parse_expr(t, f"{sub}[{i}]") for i, t in enumerate(terms)))
        if tag in ("mul", "div", "compose"):
            a, b = _list(body, sub, 2)
            cls = {"mul": Mul, "div": Div, "compose": Compose}[tag]
            return cls(parse_expr(a, f"{sub}[0]"), parse_expr(b, f"{sub}[1]"))
        if tag == "scale":
            k, e = _list(body, sub, 2)
            return Scale(_complex(k, f"{sub}[0]"), parse_expr(e, f"{sub}[1]"))
    except DocumentError:
        raise
    except (HSchwarzError, ValueError) as exc:
        raise DocumentError(str(exc), sub) from exc
    raise DocumentError(f"unknown tag {tag!r} (expected one of {', '.join(LEAF_TAGS + NODE_TAGS)})", path)


def parse_map(obj, path: str) -> MapSpec:
    if not isinstance(obj, dict):
        raise DocumentError("map must be an object", path)
    keys = set(obj)
    if keys == {"h", "g"}:
        spec = MapSpec(h=parse_expr(obj["h"], f"{path}.h"), g=parse_expr(obj["g"], f"{path}.g"))
    elif keys == {"h", "omega"}:
        h = parse_expr(obj["h"], f"{path}.h")
        om = parse_expr(obj["omega"], f"{path}.omega")
        for name, e in (("h", h), ("omega", om)):
            if not isinstance(e, Polynomial):
                raise DocumentError("omega-form maps need polynomial h and omega", f"{path}.{name}")
        spec = MapSpec(h=h, omega=om)
    else:
        raise DocumentError("map needs keys {h, g} or {h, omega}", path)
    try:
        spec.build()
    except HSchwarzError as exc:
        raise DocumentError(str(exc), path) from exc
    return spec


def parse_document(obj, line: int = None) -> MapDocument:
    try:
        if not isinstance(obj, dict) or set(obj) != {"maps"} or not isinstance(obj["maps"], dict):
            raise DocumentError('document must be {"maps": {name: map, ...}}', "$")
        maps = {name: parse_map(m, f"$.maps.{name}") for name, m in obj["maps"].items()}
    except DocumentError as exc:
        raise DocumentError(exc.message, exc.path, line) from None
    return MapDocument(maps, line)


def parse_text(text: str) -> List[MapDocument]:
    docs = []
    for k, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"invalid JSON: {exc.msg} (column {exc.colno})", "$", k) from None
        docs.append(parse_document(obj, k))
    return docs


def load(path) -> List[MapDocument]:
    with open(path, encoding="utf-8") as fh:
        return parse_text(fh.read())


def merged(docs: Iterable[MapDocument]) -> Dict[str, MapSpec]:
    """All maps of several documents by name; later documents win on clashes."""
    out: Dict[str, MapSpec] = {}
    for d in docs:
        out.update(d.maps)
    return out


# ---------------------------------------------------------------------------
# emitting
# ---------------------------------------------------------------------------


def fmt_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("documents cannot hold non-finite numbers")
    s = "%.17g" % x
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def _c(z: complex) -> str:
    z = complex(z)
    return f"[{fmt_float(z.real)}, {fmt_float(z.imag)}]"


def emit_expr(e: AnalyticExpr) -> str:
    if isinstance(e, Polynomial):
        return '{"poly": [' + ", ".join(_c(c) for c in e.coefficients) + "]}"
    if isinstance(e, MobiusLeaf):
        T = e.transform
        return '{"mobius": {' + ", ".join(f'"{k}": {_c(getattr(T, k))}' for k in "abcd") + "}}"
    if isinstance(e, Exp):
        return '{"exp": {}}'
    if isinstance(e, Identity):
        return '{"identity": {}}'
    if isinstance(e, Constant):
        return '{"const": ' + _c(e.value) + "}"
    if isinstance(e, Add):
        return '{"add": [' + ", ".join(emit_expr(t) for t in e.terms) + "]}"
    if isinstance(e, Mul):
        return '{"mul": [' + emit_expr(e.left) + ", " + emit_expr(e.right) + "]}"
    if isinstance(e, Div):
        return '{"div": [' + emit_expr(e.numerator) + ", " + emit_expr(e.denominator) + "]}"
    if isinstance(e, Compose):
        return '{"compose": [' + emit_expr(e.outer) + ", " + emit_expr(e.inner) + "]}"
    if isinstance(e, Scale):
        return '{"scale": [' + _c(e.factor) + ", " + emit_expr(e.expr) + "]}"
    raise TypeError(f"cannot serialize {type(e).__name__}")


def emit_map(m: Union[MapSpec, HarmonicMap]) -> str:
    if isinstance(m, MapSpec) and m.omega_form:
        return '{"h": ' + emit_expr(m.h) + ', "omega": ' + emit_expr(m.omega) + "}"
    return '{"h": ' + emit_expr(m.h) + ', "g": ' + emit_expr(m.g) + "}"


def emit_document(maps) -> str:
    """One JSON line for ``{name: MapSpec | HarmonicMap}`` or a MapDocument."""
    if isinstance(maps, MapDocument):
        maps = maps.maps
    body = ", ".join(f"{json.dumps(name)}: {emit_map(m)}" for name, m in maps.items())
    return '{"maps": {' + body + "}}"


def emit_text(docs: Iterable[MapDocument]) -> str:
    return "".join(emit_document(d) + "\n" for d in docs)


__all__ = [
    "MapDocument",
    "MapSpec",
    "emit_document",
    "emit_expr",
    "emit_map",
    "emit_text",
    "fmt_float",
    "load",
    "merged",
    "parse_document",
    "parse_expr",
    "parse_map",
    "parse_text",
]
