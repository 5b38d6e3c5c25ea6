"""Plumbing trees: the data model, the intersection form, Seifert/Brieskorn
generators, blow-downs, Laufer's fundamental cycle and (almost-)rationality."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from math import gcd, prod
from typing import Iterable, Sequence

from .errors import (
    InvalidSeifertPair,
    NotBlowdownable,
    NotCoprime,
    NotNegativeDefinite,
    TooFewFibers,
    ValidationError,
)
from .intlin import bareiss_leading_minors, determinant as _det

IntMatrix = tuple[tuple[int, ...], ...]

AR_CAP = 64


@dataclass(frozen=True)
class PlumbingGraph:
    """A weighted tree.  Vertices are (id, framing) pairs kept sorted by id;
    edges are sorted pairs.  Matrix rows follow the vertex order."""

    vertices: tuple[tuple[int, int], ...]
    edges: tuple[tuple[int, int], ...] = ()

    def __init__(self, vertices: Iterable[tuple[int, int]], edges: Iterable[Sequence[int]] = ()):
        verts = tuple(sorted((int(i), int(f)) for i, f in vertices))
        es = tuple(sorted(tuple(sorted((int(a), int(b)))) for a, b in edges))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", es)
        self._validate()

    def _validate(self) -> None:
        ids = [i for i, _ in self.vertices]
        if not ids:
            raise ValidationError("graph has no vertices")
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate vertex ids")
        idset = set(ids)
        if len(set(self.edges)) != len(self.edges):
            raise ValidationError("duplicate edge")
        for a, b in self.edges:
            if a == b:
                raise ValidationError(f"self-loop at vertex {a}")
            if a not in idset or b not in idset:
                raise ValidationError(f"edge ({a}, {b}) refers to a missing vertex")
        if len(self.edges) != len(ids) - 1:
            raise ValidationError("edge set is not a tree (wrong edge count)")
        adj = {i: [] for i in ids}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen = {ids[0]}
        stack = [ids[0]]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(ids):
            raise ValidationError("edge set is not a tree (disconnected)")

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.vertices)

    @property
    def framings(self) -> tuple[int, ...]:
        return tuple(f for _, f in self.vertices)

    @cached_property
    def index(self) -> dict[int, int]:
        return {v: k for k, v in enumerate(self.ids)}

    def framing(self, v: int) -> int:
        return self.vertices[self.index[v]][1]

    def neighbors(self, v: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return sorted(out)

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    @cached_property
    def matrix(self) -> IntMatrix:
        n = self.n
        M = [[0] * n for _ in range(n)]
        for k, (_, f) in enumerate(self.vertices):
            M[k][k] = f
        for a, b in self.edges:
            i, j = self.index[a], self.index[b]
            M[i][j] = M[j][i] = 1
        return tuple(tuple(r) for r in M)

    def with_framing(self, v: int, framing: int) -> "PlumbingGraph":
        return PlumbingGraph([(i, framing if i == v else f) for i, f in self.vertices], self.edges)

    def to_dict(self) -> dict:
        return {
            "vertices": [{"id": i, "framing": f} for i, f in self.vertices],
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlumbingGraph":
        verts = [(v["id"], v["framing"]) for v in d["vertices"]]
        g = cls(verts, [tuple(e) for e in d.get("edges", [])])
        if list(g.ids) != list(range(g.n)):
            raise ValidationError("vertex ids must be 0..n-1")
        return g


@dataclass(frozen=True)
class Cycle:
    """A divisor sum m_i v_i, coefficients in vertex order."""

    coefficients: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.coefficients)


def intersection_matrix(g: PlumbingGraph) -> IntMatrix:
    return g.matrix


def determinant(g: PlumbingGraph) -> int:
    return _det(g.matrix)


def is_negative_definite(g: PlumbingGraph) -> bool:
    neg = [[-x for x in row] for row in g.matrix]
    return all(m > 0 for m in bareiss_leading_minors(neg))


def _require_nd(g: PlumbingGraph) -> None:
    if not is_negative_definite(g):
        raise NotNegativeDefinite("intersection form is not negative definite")


def negative_continued_fraction(p: int, q: int) -> list[int]:
    """[c_1, ..., c_s] with p/q = c_1 - 1/(c_2 - 1/(...)), all c_j >= 2 when p > q > 0."""
    out = []
    while q:
        c = -((-p) // q)  # ceil
        out.append(c)
        p, q = q, c * q - p
    return out


def star_graph(e0: int, legs: Sequence[Sequence[int]]) -> PlumbingGraph:
    """Central vertex 0 with framing e0; each leg is a chain of framings listed
    outward from the centre."""
    verts = [(0, e0)]
    edges = []
    nxt = 1
    for leg in legs:
        prev = 0
        for f in leg:
            verts.append((nxt, f))
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return PlumbingGraph(verts, edges)


def from_seifert(e0: int, legs: Sequence[tuple[int, int]]) -> PlumbingGraph:
    chains = []
    for alpha, beta in legs:
        if alpha < 2 or not 0 < beta < alpha or gcd(alpha, beta) != 1:
            raise InvalidSeifertPair(f"invalid Seifert pair ({alpha}, {beta})")
        chains.append([-c for c in negative_continued_fraction(alpha, beta)])
    g = star_graph(e0, chains)
    if not is_negative_definite(g):
        warnings.warn("Seifert plumbing is not negative definite", stacklevel=2)
    return g


def from_brieskorn(a: Sequence[int]) -> PlumbingGraph:
    a = [int(x) for x in a]
    if len(a) < 3:
        raise TooFewFibers(f"need at least three fibers, got {len(a)}")
    if any(x < 2 for x in a):
        raise NotCoprime("Brieskorn exponents must be >= 2")
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            if gcd(a[i], a[j]) != 1:
                raise NotCoprime(f"gcd({a[i]}, {a[j]}) = {gcd(a[i], a[j])}")
    A = prod(a)
    bs = []
    for ai in a:
        c = A // ai
        b = (-pow(c, -1, ai)) % ai
        bs.append(b)
    num = 1 + sum(b * (A // ai) for b, ai in zip(bs, a))
    assert num % A == 0
    e0 = -num // A
    return from_seifert(e0, list(zip(a, bs)))


def blow_down(g: PlumbingGraph, v: int) -> PlumbingGraph:
    """Remove a -1 leaf, raising its neighbour's framing by one.  Remaining
    vertices are relabelled 0..n-2 in their original order."""
    if v not in g.index:
        raise NotBlowdownable(f"no vertex {v}")
    if g.n < 2 or g.degree(v) != 1:
        raise NotBlowdownable(f"vertex {v} is not a leaf")
    if g.framing(v) != -1:
        raise NotBlowdownable(f"vertex {v} has framing {g.framing(v)}, not -1")
    (u,) = g.neighbors(v)
    keep = [i for i in g.ids if i != v]
    relabel = {old: new for new, old in enumerate(keep)}
    verts = [(relabel[i], g.framing(i) + (1 if i == u else 0)) for i in keep]
    edges = [(relabel[a], relabel[b]) for a, b in g.edges if v not in (a, b)]
    return PlumbingGraph(verts, edges)


def blow_up_leaf(g: PlumbingGraph, u: int) -> PlumbingGraph:
    """Inverse of blow_down: attach a new -1 leaf to u and lower u's framing by one."""
    new = max(g.ids) + 1
    verts = [(i, f - (1 if i == u else 0)) for i, f in g.vertices] + [(new, -1)]
    return PlumbingGraph(verts, list(g.edges) + [(u, new)])


def pairing(g: PlumbingGraph, x: Sequence[int], y: Sequence[int]) -> int:
    M = g.matrix
    return sum(x[i] * M[i][j] * y[j] for i in range(g.n) for j in range(g.n) if M[i][j])


def canonical_class(g: PlumbingGraph) -> tuple[int, ...]:
    """K(E_v) = -E_v^2 - 2 from adjunction for sphere vertices."""
    return tuple(-f - 2 for f in g.framings)


def chi(g: PlumbingGraph, x: Sequence[int]) -> int:
    K = canonical_class(g)
    val = pairing(g, x, x) + sum(k * c for k, c in zip(K, x))
    assert val % 2 == 0
    return -val // 2


def _laufer(g: PlumbingGraph, start: int) -> tuple[list[int], bool]:
    """Run the Laufer loop from E_start.  Also reports whether every step added
    E_u with (x, E_u) = 1, which is the rationality test along the sequence."""
    M = g.matrix
    n = g.n
    x = [0] * n
    x[start] = 1
    Mx = [M[i][start] for i in range(n)]
    unit_steps = True
    limit = 10_000_000
    while limit:
        limit -= 1
        u = next((i for i in range(n) if Mx[i] > 0), None)
        if u is None:
            return x, unit_steps
        if Mx[u] > 1:
            unit_steps = False
        x[u] += 1
        for i in range(n):
            Mx[i] += M[i][u]
    raise NotNegativeDefinite("Laufer loop did not terminate")


def laufer_fundamental_cycle(g: PlumbingGraph, start: int | None = None) -> Cycle:
    _require_nd(g)
    s = 0 if start is None else g.index[start]
    x, _ = _laufer(g, s)
    return Cycle(tuple(x))


def is_rational(g: PlumbingGraph) -> bool:
    _require_nd(g)
    x, unit_steps = _laufer(g, 0)
    rational = chi(g, x) == 1
    # the step criterion and the chi criterion must agree
    assert rational == unit_steps
    return rational


def is_almost_rational(g: PlumbingGraph, cap: int = AR_CAP) -> tuple[bool | None, int | None]:
    """(True, witness) if lowering one framing makes the graph rational.

    Vertices are tried in order of decreasing valency, then id.  Returns
    (None, None) when no witness appears up to the cap.
    """
    _require_nd(g)
    if is_rational(g):
        order = sorted(g.ids, key=lambda v: (-g.degree(v), v))
        return True, order[0]
    for v in sorted(g.ids, key=lambda v: (-g.degree(v), v)):
        f = g.framing(v)
        # rationality is monotone in the decrement, so the cap decides
        if not is_rational(g.with_framing(v, f - cap)):
            continue
        return True, v
    return None, None


def minimal_ar_decrement(g: PlumbingGraph, v: int, cap: int = AR_CAP) -> int | None:
    f = g.framing(v)
    for N in range(0, cap + 1):
        if is_rational(g.with_framing(v, f - N)):
            return N
    return None


def _rooted_code(g: PlumbingGraph, root: int, parent: int | None) -> str:
    kids = sorted(_rooted_code(g, w, root) for w in g.neighbors(root) if w != parent)
    return f"({g.framing(root)}" + "".join(kids) + ")"


def canonical_form(g: PlumbingGraph) -> str:
    """Isomorphism invariant of framed trees (min over all rootings)."""
    return min(_rooted_code(g, r, None) for r in g.ids)


def isomorphic(g1: PlumbingGraph, g2: PlumbingGraph) -> bool:
    return g1.n == g2.n and canonical_form(g1) == canonical_form(g2)


def e8_graph() -> PlumbingGraph:
    """Hand-built E8: a path of seven -2 vertices with an eighth attached to
    the third one."""
    verts = [(i, -2) for i in range(8)]
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)]
    return PlumbingGraph(verts, edges)
