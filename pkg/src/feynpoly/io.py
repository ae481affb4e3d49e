"""Graph and kinematic point file formats.

JSON graphs::

    {"vertices": 3, "edges": [[1, 2, 1], [1, 3, 0]], "legs": [[1, 1], [2, 2]],
     "momenta": 2, "masses": 1}

``momenta`` and ``masses`` are optional and default to the largest index in
use.  The line-oriented text form carries the same data::

    # comment
    vertices 3
    momenta 2
    masses 1
    edge 1 2 m1
    edge 1 3
    leg 1 q1

Kinematic points are JSON objects ``{"momenta": 2, "masses": 1,
"s": {"1,1": 1.0}, "msq": {"1": 1.0}}`` where ``s["i,j"]`` is the scalar
product q_i . q_j; complex values may be given as ``[re, im]``.
"""

from __future__ import annotations

import json
import os
import re
import tempfile

from .errors import InvalidGraph, ParseError
from .graph import FeynmanGraph
from .symanzik import KinPoint

SCHEMA = "feynpoly/1"


def _renumber(g: FeynmanGraph) -> tuple:
    order = {v: i for i, v in enumerate(sorted(g.vertices), start=1)}
    edges = [(order[e.u], order[e.v], e.mass) for e in g.edges]
    legs = [(order[v], i) for v, ix in g.legs for i in ix]
    return len(order), edges, legs


def graph_to_dict(g: FeynmanGraph) -> dict:
    n, edges, legs = _renumber(g)
    return {"vertices": n, "edges": [list(e) for e in edges], "legs": [list(l) for l in legs],
            "momenta": g.nq, "masses": g.nm}


def _build(n, edges, legs, nq, nm) -> FeynmanGraph:
    for u, v, _ in edges:
        for x in (u, v):
            if not 1 <= x <= n:
                raise InvalidGraph(f"edge endpoint {x} is not a vertex 1..{n}")
    for v, _ in legs:
        if not 1 <= v <= n:
            raise InvalidGraph(f"leg vertex {v} is not a vertex 1..{n}")
    g = FeynmanGraph.build(n, edges, legs, nq=nq, nm=nm)
    if not g.legs_connected:
        raise InvalidGraph("external legs lie in different connected components")
    return g


def graph_from_dict(d: dict) -> FeynmanGraph:
    try:
        n = int(d["vertices"])
        edges = [tuple(int(x) for x in (e if len(e) == 3 else list(e) + [0])) for e in d.get("edges", [])]
        legs = [(int(v), int(i)) for v, i in d.get("legs", [])]
        nq = d.get("momenta")
        nm = d.get("masses")
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed graph document: {exc}") from None
    return _build(n, edges, legs, nq, nm)


def emit_graph_json(g: FeynmanGraph) -> str:
    return json.dumps(graph_to_dict(g), sort_keys=True) + "\n"


def emit_graph_text(g: FeynmanGraph) -> str:
    d = graph_to_dict(g)
    lines = [f"vertices {d['vertices']}", f"momenta {d['momenta']}", f"masses {d['masses']}"]
    for u, v, m in d["edges"]:
        lines.append(f"edge {u} {v}" + (f" m{m}" if m else ""))
    for v, i in d["legs"]:
        lines.append(f"leg {v} q{i}")
    return "\n".join(lines) + "\n"


_INT = re.compile(r"\d+$")


def _parse_text(text: str) -> FeynmanGraph:
    n = None
    nq = nm = None
    edges, legs = [], []

    def num(tok, lineno, col, prefix=""):
        body = tok[len(prefix):] if prefix and tok.startswith(prefix) else tok
        if (prefix and not tok.startswith(prefix)) or not _INT.match(body):
            want = f"'{prefix}<n>'" if prefix else "an integer"
            raise ParseError(f"expected {want}, got {tok!r}", lineno, col)
        return int(body)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]
        if not toks:
            continue
        head, col = toks[0]
        args = toks[1:]
        if head == "vertices" and len(args) == 1:
            n = num(args[0][0], lineno, args[0][1])
        elif head == "momenta" and len(args) == 1:
            nq = num(args[0][0], lineno, args[0][1])
        elif head == "masses" and len(args) == 1:
            nm = num(args[0][0], lineno, args[0][1])
        elif head == "edge" and len(args) in (2, 3):
            u = num(args[0][0], lineno, args[0][1])
            v = num(args[1][0], lineno, args[1][1])
            m = num(args[2][0], lineno, args[2][1], "m") if len(args) == 3 else 0
            edges.append((u, v, m))
        elif head == "leg" and len(args) == 2:
            v = num(args[0][0], lineno, args[0][1])
            i = num(args[1][0], lineno, args[1][1], "q")
            legs.append((v, i))
        else:
            raise ParseError(f"unrecognised statement {line.strip()!r}", lineno, col)
    if n is None:
        raise ParseError("missing 'vertices' statement")
    return _build(n, edges, legs, nq, nm)


def parse_graph(text: str) -> FeynmanGraph:
    """Parse a graph from JSON or the line-oriented text form."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
        return graph_from_dict(d)
    return _parse_text(text)


def load_graph(path: str) -> FeynmanGraph:
    """Read a graph file; ``builtin:NAME`` selects a named example graph."""
    if path.startswith("builtin:"):
        from .corpus import named

        try:
            return named(path.split(":", 1)[1])
        except KeyError as exc:
            raise ParseError(str(exc.args[0])) from None
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


# kinematic points -----------------------------------------------------------------

def _number(x):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ParseError("complex values are written as [re, im]")
        return complex(float(x[0]), float(x[1]))
    return float(x)


def kinpoint_from_dict(d: dict, nq: int | None = None, nm: int | None = None) -> KinPoint:
    try:
        nq = int(d.get("momenta", nq or 0))
        nm = int(d.get("masses", nm or 0))
        s = {}
        for k, v in d.get("s", {}).items():
            i, j = (int(x) for x in k.split(","))
            s[(min(i, j), max(i, j))] = _number(v)
        msq = {int(k): _number(v) for k, v in d.get("msq", {}).items()}
    except (TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed kinematic point: {exc}") from None
    return KinPoint(nq, nm, s, msq)


def kinpoint_to_dict(p: KinPoint) -> dict:
    def enc(v):
        return [v.real, v.imag] if isinstance(v, complex) else v

    return {"momenta": p.nq, "masses": p.nm,
            "s": {f"{i},{j}": enc(v) for (i, j), v in sorted(p.s.items())},
            "msq": {str(k): enc(v) for k, v in sorted(p.msq.items())}}


def load_kinpoint(spec: str, nq: int | None = None, nm: int | None = None) -> KinPoint:
    """From a JSON file path or an inline JSON object."""
    text = spec if spec.lstrip().startswith("{") else open(spec, encoding="utf-8").read()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return kinpoint_from_dict(d, nq, nm)


# reports -------------------------------------------------------------------------

def report(command: str, result) -> dict:
    return {"schema": SCHEMA, "command": command, "result": result}


def error_report(command: str, exc: Exception, exit_code: int) -> dict:
    return {"schema": SCHEMA, "command": command,
            "error": {"type": type(exc).__name__, "message": str(exc), "exit_code": exit_code}}


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".feynpoly-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
