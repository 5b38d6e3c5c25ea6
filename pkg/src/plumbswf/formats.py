"""Input parsing (JSON graphs and Brieskorn/Seifert shorthand) and the DOT,
SVG and CSV emitters."""

from __future__ import annotations

import csv
import io
import json
import re
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .errors import GraphError, ParseError, ValidationError
from .plumbing import PlumbingGraph, from_brieskorn, from_seifert
from .roots import GradedRoot, _build_tree, _Node, normalize

_INT = re.compile(r"^[+-]?\d+$")
_PAIR = re.compile(r"\(\s*([+-]?\d+)\s*,\s*([+-]?\d+)\s*\)")


def _int(text: str, where: str) -> int:
    text = text.strip()
    if not _INT.match(text):
        raise ParseError(f"expected an integer, got {text!r}", where)
    return int(text)


def _shorthand_error(where: str, exc: GraphError) -> ParseError:
    return ParseError(f"{type(exc).__name__}: {exc}", where)


def _parse_brieskorn(body: str) -> PlumbingGraph:
    parts = [p for p in body.split(",")]
    exps = [_int(p, f"brieskorn[{i}]") for i, p in enumerate(parts)]
    try:
        return from_brieskorn(exps)
    except GraphError as e:
        raise _shorthand_error("brieskorn", e) from e


def _parse_seifert(body: str) -> PlumbingGraph:
    if ";" not in body:
        raise ParseError("expected 'e0;(a,b),(a,b),...'", "seifert")
    head, tail = body.split(";", 1)
    e0 = _int(head, "seifert.e0")
    pairs = []
    pos = 0
    tail = tail.strip()
    for k, m in enumerate(_PAIR.finditer(tail)):
        gap = tail[pos:m.start()].strip()
        if gap not in ("", ","):
            raise ParseError(f"unexpected text {gap!r}", f"seifert.legs[{k}]")
        pairs.append((int(m.group(1)), int(m.group(2))))
        pos = m.end()
    if tail[pos:].strip() or not pairs:
        raise ParseError("malformed leg list", "seifert.legs")
    try:
        return from_seifert(e0, pairs)
    except GraphError as e:
        raise _shorthand_error("seifert", e) from e


def _field(obj: Any, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"missing field {key!r}", where)
    return obj[key]


def _json_int(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"expected an integer, got {json.dumps(x)}", where)
    return x


def graph_from_json(data: Any) -> PlumbingGraph:
    verts = _field(data, "vertices", "$")
    if not isinstance(verts, list):
        raise ParseError("expected a list", "vertices")
    vs = []
    for i, v in enumerate(verts):
        where = f"vertices[{i}]"
        vs.append((_json_int(_field(v, "id", where), f"{where}.id"),
                   _json_int(_field(v, "framing", where), f"{where}.framing")))
    edges = data.get("edges", [])
    if not isinstance(edges, list):
        raise ParseError("expected a list", "edges")
    es = []
    for i, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2:
            raise ParseError("an edge is a pair of vertex ids", f"edges[{i}]")
        es.append((_json_int(e[0], f"edges[{i}][0]"), _json_int(e[1], f"edges[{i}][1]")))
    g = PlumbingGraph(vs, es)
    if list(g.ids) != list(range(g.n)):
        raise ValidationError("vertex ids must be 0..n-1")
    return g


def parse_input(text: str) -> PlumbingGraph:
    """Graph from JSON text or from 'brieskorn:a,b,c' / 'seifert:e0;(a,b),...'."""
    s = text.strip()
    if s.startswith("brieskorn:"):
        return _parse_brieskorn(s[len("brieskorn:"):])
    if s.startswith("seifert:"):
        return _parse_seifert(s[len("seifert:"):])
    try:
        data = json.loads(s)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, f"line {e.lineno} column {e.colno}") from e
    return graph_from_json(data)


# ---------------------------------------------------------------------------
# root emitters

SCALE_Y = 20
STEP_X = 40
MARGIN = 30


def _fmt(x: Fraction) -> str:
    return str(x)


def root_to_dot(R: GradedRoot) -> str:
    """Graphviz tree of a complete root; vertices labelled by grading, edges
    by their length in U-steps."""
    R = normalize(R)
    tree = _build_tree(R)
    lines = ["digraph graded_root {", "  rankdir=BT;", "  node [shape=circle, fontsize=10];"]
    counter = [0]

    def emit(node: _Node) -> str:
        name = f"n{counter[0]}"
        counter[0] += 1
        if node.leaf is not None:
            ids = ",".join(str(m) for m in node.members)
            lines.append(f'  {name} [label="{_fmt(node.grading)}", xlabel="leaf {ids}"];')
        else:
            lines.append(f'  {name} [label="{_fmt(node.grading)}"];')
        for c in node.children:
            cname = emit(c)
            steps = (c.grading - node.grading) / 2
            lines.append(f'  {name} -> {cname} [label="{_fmt(steps)}"];')
        return name

    top = emit(tree)
    if R.h is not None and R.h < tree.grading:
        lines.append(f'  stem [label="{_fmt(R.h)}", shape=point];')
        lines.append(f'  stem -> {top} [label="{_fmt((tree.grading - R.h) / 2)}"];')
    if R.J is not None:
        for a, b in R.J:
            if a != b:
                lines.append(f"  // J swaps leaves {a} and {b}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def root_to_svg(R: GradedRoot) -> str:
    """Planar drawing: leaf k at x = k, height proportional to grading.  Each
    leaf stem runs down to its angle and joins the nearest stem on its left
    that is still alive there."""
    L, A = R.leaf_gradings, R.angle_gradings
    m = len(L)
    known = [g for g in L] + [a for a in A if a is not None]
    bottom = R.h if R.h is not None else min(known)
    top = max(L)
    width = 2 * MARGIN + STEP_X * max(m - 1, 0) + 40
    height = 2 * MARGIN + int((top - bottom) * SCALE_Y)

    def X(k: int) -> int:
        return MARGIN + 40 + STEP_X * k

    def Y(g: Fraction) -> str:
        return _fmt(Fraction(MARGIN) + (top - g) * SCALE_Y)

    ends = [bottom] + [bottom if a is None else a for a in A]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<g stroke="black" stroke-width="2" fill="none">']
    for k in range(m):
        out.append(f'<line x1="{X(k)}" y1="{Y(L[k])}" x2="{X(k)}" y2="{Y(ends[k])}"/>')
        if k and A[k - 1] is not None:
            q = k - 1
            while q > 0 and ends[q] >= A[k - 1]:
                q -= 1
            out.append(f'<line x1="{X(q)}" y1="{Y(A[k - 1])}" x2="{X(k)}" y2="{Y(A[k - 1])}"/>')
    out.append("</g>")
    out.append('<g font-family="monospace" font-size="10">')
    g = top
    while g >= bottom:
        out.append(f'<text x="4" y="{Y(g)}">{_fmt(g)}</text>')
        g -= 2
    for k in range(m):
        out.append(f'<circle cx="{X(k)}" cy="{Y(L[k])}" r="3" fill="black"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# atlas CSV

CSV_COLUMNS = ("family", "params", "vertices", "det", "d", "delta", "alpha", "beta", "gamma",
               "mu_bar", "kappa", "projective_n")


def parse_params(text: str) -> list[tuple[int, ...]]:
    """One parameter tuple per line ('2,3,7'); blank lines and '#' comments
    are skipped."""
    out = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        out.append(tuple(_int(p, f"line {ln}") for p in line.split(",")))
    return out


def rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: "" if r.get(k) is None else r[k] for k in CSV_COLUMNS})
    return buf.getvalue()


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def params_label(params: Sequence[int]) -> str:
    return ",".join(str(p) for p in params)
