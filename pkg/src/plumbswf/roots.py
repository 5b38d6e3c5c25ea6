"""Graded roots: presentations, normalization, the tree and module views,
delta/beta/alpha/gamma, X_n, local maps, monotone subroots and projectivity.

A root is stored as a planar presentation: leaves x_0..x_m with gradings and
one angle between each pair of consecutive leaves.  The grading at which two
leaves meet is the minimum of the angles between them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import (
    CertificationFailed,
    GradingCosetMismatch,
    IncompleteRoot,
    NotSymmetric,
    RootError,
)
from .intlin import extended_gcd, integer_kernel


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def same_coset(a, b) -> bool:
    d = _q(a) - _q(b)
    return d.denominator == 1 and d.numerator % 2 == 0


@dataclass(frozen=True)
class GradedRoot:
    """Planar presentation of a graded root.

    ``angles[i]`` sits between ``leaves[i]`` and ``leaves[i+1]``; a grading of
    None means the two sides have not met above the truncation ``h``.  ``J``
    (optional) lists the involution on leaf ids as sorted pairs (a, J(a)).
    """

    leaves: tuple[tuple[int, Fraction], ...]
    angles: tuple[tuple[int, int, Fraction | None], ...]
    h: Fraction | None = None
    J: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if not self.leaves:
            raise RootError("a root needs at least one leaf")
        if len(self.angles) != len(self.leaves) - 1:
            raise RootError("need exactly one angle between consecutive leaves")
        g0 = self.leaves[0][1]
        for i, (lid, g) in enumerate(self.leaves):
            if not same_coset(g, g0):
                raise GradingCosetMismatch("leaf gradings are not in one coset of 2Z")
        ids = [lid for lid, _ in self.leaves]
        if len(set(ids)) != len(ids):
            raise RootError("duplicate leaf id")
        for i, (l, r, a) in enumerate(self.angles):
            if (l, r) != (ids[i], ids[i + 1]):
                raise RootError("angle does not join consecutive leaves")
            if a is None:
                continue
            if not same_coset(a, g0):
                raise GradingCosetMismatch("angle grading outside the coset")
            if a > self.leaves[i][1] or a > self.leaves[i + 1][1]:
                raise RootError("angle above an adjacent leaf")
        if self.J is not None:
            jm = dict(self.J)
            jm.update({b: a for a, b in self.J})
            if set(jm) != set(ids):
                raise RootError("J must be defined on every leaf")
            grade = dict(self.leaves)
            for a, b in jm.items():
                if jm[b] != a or grade[a] != grade[b]:
                    raise RootError("J is not a grading-preserving involution")

    # construction helpers -------------------------------------------------
    @classmethod
    def from_gradings(cls, leaf_gr: Sequence, angle_gr: Sequence, h=None,
                      J: dict[int, int] | Sequence[int] | None = None,
                      ids: Sequence[int] | None = None) -> "GradedRoot":
        ids = list(range(len(leaf_gr))) if ids is None else list(ids)
        leaves = tuple((i, _q(g)) for i, g in zip(ids, leaf_gr))
        angles = tuple((ids[i], ids[i + 1], None if a is None else _q(a)) for i, a in enumerate(angle_gr))
        jp = None
        if J is not None:
            jm = dict(J) if isinstance(J, dict) else {ids[i]: ids[j] for i, j in enumerate(J)}
            jp = tuple(sorted({(min(a, b), max(a, b)) for a, b in jm.items()}))
        return cls(leaves, angles, None if h is None else _q(h), jp)

    @property
    def leaf_ids(self) -> list[int]:
        return [i for i, _ in self.leaves]

    @property
    def leaf_gradings(self) -> list[Fraction]:
        return [g for _, g in self.leaves]

    @property
    def angle_gradings(self) -> list[Fraction | None]:
        return [a for _, _, a in self.angles]

    @property
    def symmetric(self) -> bool:
        return self.J is not None

    @property
    def complete(self) -> bool:
        return all(a is not None for _, _, a in self.angles)

    def jmap(self) -> dict[int, int]:
        if self.J is None:
            raise NotSymmetric("root carries no involution")
        jm = {}
        for a, b in self.J:
            jm[a] = b
            jm[b] = a
        return jm

    def require_complete(self) -> None:
        if not self.complete:
            raise IncompleteRoot("some leaves do not meet above the truncation grading")

    def lowest(self) -> Fraction:
        """Lowest grading carrying structure (smallest angle, or the leaf)."""
        self.require_complete()
        vals = self.angle_gradings or self.leaf_gradings
        return min(vals)

    def merge_grading(self, i: int, j: int) -> Fraction:
        """Grading where the leaves at planar positions i and j meet."""
        if i == j:
            return self.leaves[i][1]
        lo, hi = min(i, j), max(i, j)
        vals = self.angle_gradings[lo:hi]
        if any(v is None for v in vals):
            raise IncompleteRoot("leaves meet below the truncation")
        return min(vals)

    def vertices_at(self, g) -> list[tuple[int, int]]:
        """Tree vertices at grading g as maximal runs (start, end) of positions."""
        g = _q(g)
        L, A = self.leaf_gradings, self.angle_gradings
        runs = []
        start = None
        for i in range(len(L)):
            if L[i] >= g:
                if start is None:
                    start = i
                elif A[i - 1] is None or A[i - 1] < g:
                    runs.append((start, i - 1))
                    start = i
            elif start is not None:
                runs.append((start, i - 1))
                start = None
        if start is not None:
            runs.append((start, len(L) - 1))
        return runs

    def rank_at(self, g) -> int:
        return len(self.vertices_at(g))

    def shifted(self, s) -> "GradedRoot":
        s = _q(s)
        return GradedRoot(
            tuple((i, g + s) for i, g in self.leaves),
            tuple((l, r, None if a is None else a + s) for l, r, a in self.angles),
            None if self.h is None else self.h + s,
            self.J,
        )

    def with_h(self, h) -> "GradedRoot":
        return GradedRoot(self.leaves, self.angles, None if h is None else _q(h), self.J)

    def forget_j(self) -> "GradedRoot":
        return GradedRoot(self.leaves, self.angles, self.h, None)

    # serialization --------------------------------------------------------
    def to_dict(self) -> dict:
        d = {
            "leaves": [{"id": i, "gr": str(g)} for i, g in self.leaves],
            "angles": [{"l": l, "r": r, "gr": None if a is None else str(a)} for l, r, a in self.angles],
        }
        if self.J is not None:
            d["J"] = [list(p) for p in self.J]
        if self.h is not None:
            d["h"] = str(self.h)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GradedRoot":
        leaves = tuple((int(x["id"]), Fraction(x["gr"])) for x in d["leaves"])
        angles = tuple((int(x["l"]), int(x["r"]), None if x["gr"] is None else Fraction(x["gr"]))
                       for x in d["angles"])
        J = tuple(sorted(tuple(sorted(map(int, p))) for p in d["J"])) if d.get("J") is not None else None
        h = Fraction(d["h"]) if d.get("h") is not None else None
        return cls(leaves, angles, h, J)


SymmetricGradedRoot = GradedRoot


# ---------------------------------------------------------------------------
# tree view


@dataclass
class _Node:
    grading: Fraction
    children: list["_Node"] = field(default_factory=list)
    leaf: int | None = None  # leaf id for tree leaves
    members: tuple[int, ...] = ()  # original leaf ids owned by a tree leaf

    def leaves(self) -> list["_Node"]:
        if self.leaf is not None:
            return [self]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out


def _build_tree(R: GradedRoot) -> _Node:
    R.require_complete()
    L, A, ids = R.leaf_gradings, R.angle_gradings, R.leaf_ids

    def build(i: int, j: int) -> _Node:
        if i == j:
            return _Node(L[i], leaf=ids[i], members=(ids[i],))
        m = min(A[i:j])
        blocks = []
        s = i
        for t in range(i, j):
            if A[t] == m:
                blocks.append((s, t))
                s = t + 1
        blocks.append((s, j))
        kids = []
        absorbed = []
        for a, b in blocks:
            if a == b and L[a] == m:
                absorbed.append(ids[a])
            else:
                kids.append(build(a, b))
        if not kids:
            return _Node(m, leaf=absorbed[0], members=tuple(absorbed))
        if len(kids) == 1:
            return kids[0]
        return _Node(m, kids)

    return build(0, len(L) - 1)


def _tree_to_root(tree: _Node, h, J: dict[int, int] | None) -> GradedRoot:
    leaves: list[tuple[int, Fraction]] = []
    angles: list[Fraction] = []

    def walk(node: _Node) -> None:
        if node.leaf is not None:
            leaves.append((node.leaf, node.grading))
            return
        for k, c in enumerate(node.children):
            if k:
                angles.append(node.grading)
            walk(c)

    walk(tree)
    ids = [i for i, _ in leaves]
    jp = None
    if J is not None:
        owner = {}
        for tl in tree.leaves():
            for mbr in tl.members:
                owner[mbr] = tl.leaf
        newj = {}
        for tl in tree.leaves():
            img = J[tl.leaf]
            if img not in owner:
                raise NotSymmetric("involution does not respect the tree")
            newj[tl.leaf] = owner[img]
        for a, b in newj.items():
            if newj.get(b) != a:
                raise NotSymmetric("involution does not respect the tree")
        jp = tuple(sorted({(min(a, b), max(a, b)) for a, b in newj.items()}))
    return GradedRoot(tuple(leaves), tuple((ids[i], ids[i + 1], a) for i, a in enumerate(angles)),
                      None if h is None else _q(h), jp)


def normalize(R: GradedRoot) -> GradedRoot:
    """Remove degenerate leaves (towers contained in a neighbour's)."""
    if not R.complete:
        return _normalize_partial(R)
    return _tree_to_root(_build_tree(R), R.h, R.jmap() if R.J is not None else None)


def _normalize_partial(R: GradedRoot) -> GradedRoot:
    # normalise each connected block separately; blocks stay apart
    L, A, ids = R.leaf_gradings, R.angle_gradings, R.leaf_ids
    blocks = []
    s = 0
    for t, a in enumerate(A):
        if a is None:
            blocks.append((s, t))
            s = t + 1
    blocks.append((s, len(L) - 1))
    leaves, angles = [], []
    owner_j = R.jmap() if R.J is not None else None
    for b, (i, j) in enumerate(blocks):
        sub = GradedRoot.from_gradings(L[i:j + 1], A[i:j], ids=ids[i:j + 1])
        ns = normalize(sub)
        if b:
            angles.append(None)
        leaves.extend(ns.leaves)
        angles.extend(ns.angle_gradings)
    lids = [i for i, _ in leaves]
    jp = None
    if owner_j is not None:
        keep = set(lids)
        jp = tuple(sorted({(min(a, owner_j[a]), max(a, owner_j[a])) for a in lids if owner_j[a] in keep}))
        if sum(1 if a == b else 2 for a, b in jp) != len(lids):
            raise NotSymmetric("involution does not survive normalization")
    return GradedRoot(tuple(leaves), tuple((lids[i], lids[i + 1], a) for i, a in enumerate(angles)), R.h, jp)


def is_normalized(R: GradedRoot) -> bool:
    L, A = R.leaf_gradings, R.angle_gradings
    for i, g in enumerate(L):
        if i > 0 and A[i - 1] == g:
            return False
        if i < len(A) and A[i] == g:
            return False
    return True


def _canon(node: _Node, jnode=None):
    if node.leaf is not None:
        return ("L", node.grading)
    return ("N", node.grading, tuple(sorted(_canon(c) for c in node.children)))


def canonical_form(R: GradedRoot):
    """Isomorphism invariant of the (unordered) tree; ignores the truncation h."""
    return _canon(_build_tree(normalize(R)))


def _leafset(node: _Node) -> frozenset[int]:
    return frozenset(x for tl in node.leaves() for x in tl.members)


def symmetric_canonical_form(R: GradedRoot):
    """Invariant of the tree together with its involution."""
    R = normalize(R)
    J = R.jmap()
    tree = _build_tree(R)

    def canon(node: _Node):
        if node.leaf is not None:
            return ("L", node.grading, J[node.leaf] == node.leaf)
        ls = _leafset(node)
        if frozenset(J[x] for x in ls) != ls:
            return _canon(node)
        fixed, pairs = [], []
        sets = [(_leafset(c), c) for c in node.children]
        seen = set()
        for k, (s, c) in enumerate(sets):
            if k in seen:
                continue
            img = frozenset(J[x] for x in s)
            if img == s:
                fixed.append(canon(c))
                continue
            k2 = next(t for t, (s2, _) in enumerate(sets) if s2 == img)
            seen.add(k2)
            pairs.append(tuple(sorted((_canon(c), _canon(sets[k2][1])))))
        return ("F", node.grading, tuple(sorted(fixed)), tuple(sorted(pairs)))

    return canon(tree)


def isomorphic(R1: GradedRoot, R2: GradedRoot, equivariant: bool = False) -> bool:
    if equivariant:
        return symmetric_canonical_form(R1) == symmetric_canonical_form(R2)
    return canonical_form(R1) == canonical_form(R2)


def reembed(R: GradedRoot, key=None) -> GradedRoot:
    """Re-embed the tree in the plane by reordering children at every branch
    node (reversed order by default, or sorted by ``key`` on child leaf ids)."""
    R = normalize(R)
    tree = _build_tree(R)

    def visit(node: _Node) -> None:
        for c in node.children:
            visit(c)
        if key is None:
            node.children.reverse()
        else:
            node.children.sort(key=lambda c: key(sorted(_leafset(c))))

    visit(tree)
    return _tree_to_root(tree, R.h, R.jmap() if R.J is not None else None)


def barcode(R: GradedRoot) -> list[tuple[Fraction, int | None]]:
    """Decomposition of the H_0 module into towers by the elder rule:
    (top grading, length) with length None for the infinite tower."""
    R = normalize(R)
    if not R.complete:
        raise IncompleteRoot("barcode needs a complete root")
    tree = _build_tree(R)
    bars: list[tuple[Fraction, int | None]] = []

    def oldest(node: _Node) -> Fraction:
        if node.leaf is not None:
            return node.grading
        tops = sorted((oldest(c) for c in node.children), reverse=True)
        for t in tops[1:]:
            bars.append((t, int((t - node.grading) / 2)))
        return tops[0]

    bars.append((oldest(tree), None))
    return sorted(bars, key=lambda b: (-b[0], b[1] is not None, b[1] or 0))


def module_isomorphic(R1: GradedRoot, R2: GradedRoot) -> bool:
    return barcode(R1) == barcode(R2)


# ---------------------------------------------------------------------------
# numerical invariants


def delta(R: GradedRoot) -> Fraction:
    return max(R.leaf_gradings) / 2


def top_invariant_grading(R: GradedRoot) -> Fraction:
    J = R.jmap()
    pos = {lid: p for p, lid in enumerate(R.leaf_ids)}
    return max(R.merge_grading(p, pos[J[lid]]) for p, lid in enumerate(R.leaf_ids))


def beta(R: GradedRoot) -> Fraction:
    return top_invariant_grading(R) / 2


def alpha_gamma(R: GradedRoot) -> tuple[Fraction, Fraction]:
    d, b = delta(R), beta(R)
    diff = d - b
    assert diff.denominator == 1
    a = d if diff.numerator % 2 == 0 else d + 1
    return a, b


def make_Xn(n: int, shift=0) -> GradedRoot:
    if n < 0:
        raise ValueError("n must be non-negative")
    s = _q(shift)
    if n == 0:
        return GradedRoot.from_gradings([s], [], J=[0])
    return GradedRoot.from_gradings([2 * n + s, 2 * n + s], [s], J=[1, 0])


# ---------------------------------------------------------------------------
# local maps


class _Basis:
    """Vertex bases of a root per grading, with U and J actions."""

    def __init__(self, R: GradedRoot):
        R.require_complete()
        self.R = R
        self._cache: dict[Fraction, list[tuple[int, int]]] = {}
        self.pos = {lid: p for p, lid in enumerate(R.leaf_ids)}

    def runs(self, g) -> list[tuple[int, int]]:
        g = _q(g)
        r = self._cache.get(g)
        if r is None:
            r = self.R.vertices_at(g)
            self._cache[g] = r
        return r

    def dim(self, g) -> int:
        return len(self.runs(g))

    def find(self, g, p: int) -> int | None:
        for k, (s, e) in enumerate(self.runs(g)):
            if s <= p <= e:
                return k
        return None

    def U(self, g, k: int) -> list[list[int]]:
        """Matrix of U^k from grading g to g - 2k (rows: target basis)."""
        g = _q(g)
        src, tgt = self.runs(g), self.runs(g - 2 * k)
        P = [[0] * len(src) for _ in tgt]
        for c, (s, _) in enumerate(src):
            P[self.find(g - 2 * k, s)][c] = 1
        return P

    def Jmat(self, g) -> list[list[int]]:
        J = self.R.jmap()
        ids = self.R.leaf_ids
        src = self.runs(g)
        P = [[0] * len(src) for _ in src]
        for c, (s, _) in enumerate(src):
            P[self.find(g, self.pos[J[ids[s]]])][c] = 1
        return P


def _matvec(P, v):
    return [sum(a * b for a, b in zip(row, v)) for row in P]


@dataclass(frozen=True)
class RootHom:
    """A Z[U]-map given by the image of each source leaf, as an integer vector
    over the target's vertices at that leaf's grading."""

    source: GradedRoot
    target: GradedRoot
    images: tuple[tuple[int, ...], ...]  # one per source leaf, planar order

    def image_of_vertex(self, g, p: int) -> list[int]:
        """Image of the source vertex at grading g containing position p."""
        src = self.source
        L = src.leaf_gradings
        k = (L[p] - _q(g)) / 2
        assert k.denominator == 1 and k >= 0
        return _matvec(_Basis(self.target).U(L[p], int(k)), list(self.images[p]))

    def degree(self) -> int:
        """Coefficient of the induced map after inverting U."""
        return sum(self.images[0])

    def verify(self, equivariant: bool = False) -> bool:
        S, T = self.source, self.target
        bt = _Basis(T)
        L, A = S.leaf_gradings, S.angle_gradings
        if len(self.images) != len(L):
            return False
        for p, g in enumerate(L):
            if len(self.images[p]) != bt.dim(g):
                return False
        for i, a in enumerate(A):
            k1, k2 = (L[i] - a) / 2, (L[i + 1] - a) / 2
            lhs = _matvec(bt.U(L[i], int(k1)), list(self.images[i]))
            rhs = _matvec(bt.U(L[i + 1], int(k2)), list(self.images[i + 1]))
            if lhs != rhs:
                return False
        degs = set()
        deep = min(min(L), min(T.leaf_gradings), *(x for x in A), *(x for x in T.angle_gradings)) - 2
        for p, g in enumerate(L):
            v = _matvec(bt.U(g, int((g - deep) / 2)), list(self.images[p]))
            degs.add(v[0])
        if len(degs) != 1 or degs.pop() not in (1, -1):
            return False
        if equivariant:
            J1 = S.jmap()
            pos = {lid: p for p, lid in enumerate(S.leaf_ids)}
            for p, lid in enumerate(S.leaf_ids):
                q = pos[J1[lid]]
                if list(self.images[q]) != _matvec(bt.Jmat(L[p]), list(self.images[p])):
                    return False
        return True

    def compose(self, other: "RootHom") -> "RootHom":
        """other o self."""
        assert other.source == self.target
        T = self.target
        bt = _Basis(T)
        out = []
        for p, g in enumerate(self.source.leaf_gradings):
            acc = [0] * _Basis(other.target).dim(g)
            for c, (s, _) in enumerate(bt.runs(g)):
                coef = self.images[p][c]
                if coef:
                    img = other.image_of_vertex(g, s)
                    acc = [a + coef * b for a, b in zip(acc, img)]
            out.append(tuple(acc))
        return RootHom(self.source, other.target, tuple(out))


def identity_hom(R: GradedRoot) -> RootHom:
    b = _Basis(R)
    imgs = []
    for p, g in enumerate(R.leaf_gradings):
        v = [0] * b.dim(g)
        v[b.find(g, p)] = 1
        imgs.append(tuple(v))
    return RootHom(R, R, tuple(imgs))


def local_map_exists(R1: GradedRoot, R2: GradedRoot, equivariant: bool = False) -> tuple[bool, RootHom | None]:
    """Decide whether a local map R1 -> R2 exists; return a witness if so."""
    if not same_coset(R1.leaf_gradings[0], R2.leaf_gradings[0]):
        raise GradingCosetMismatch("roots live in different grading cosets")
    R1.require_complete()
    R2.require_complete()
    if equivariant and (R1.J is None or R2.J is None):
        raise NotSymmetric("equivariant maps need symmetric roots")
    b2 = _Basis(R2)
    L, A = R1.leaf_gradings, R1.angle_gradings
    dims = [b2.dim(g) for g in L]
    offs = [0]
    for d in dims:
        offs.append(offs[-1] + d)
    nvar = offs[-1]
    if dims[0] == 0:
        return False, None
    eqs: list[list[int]] = []
    for i, a in enumerate(A):
        P1 = b2.U(L[i], int((L[i] - a) / 2))
        P2 = b2.U(L[i + 1], int((L[i + 1] - a) / 2))
        for r in range(len(P1)):
            row = [0] * nvar
            for c, v in enumerate(P1[r]):
                row[offs[i] + c] += v
            for c, v in enumerate(P2[r]):
                row[offs[i + 1] + c] -= v
            eqs.append(row)
    if equivariant:
        J1 = R1.jmap()
        pos = {lid: p for p, lid in enumerate(R1.leaf_ids)}
        for p, lid in enumerate(R1.leaf_ids):
            q = pos[J1[lid]]
            Jm = b2.Jmat(L[p])
            for r in range(dims[p]):
                row = [0] * nvar
                row[offs[q] + r] += 1
                for c, v in enumerate(Jm[r]):
                    row[offs[p] + c] -= v
                eqs.append(row)
    kernel = integer_kernel(eqs, nvar) if eqs else [[int(i == j) for j in range(nvar)] for i in range(nvar)]
    # degree functional: coefficient sum of the first leaf's image
    vals = [sum(v[offs[0]:offs[1]]) for v in kernel]
    g, coeffs = extended_gcd(vals)
    if g != 1:
        return False, None
    f = [0] * nvar
    for c, v in zip(coeffs, kernel):
        if c:
            f = [a + c * b for a, b in zip(f, v)]
    hom = RootHom(R1, R2, tuple(tuple(f[offs[p]:offs[p + 1]]) for p in range(len(L))))
    if not hom.verify(equivariant):
        raise CertificationFailed("local-map witness failed re-verification")
    return True, hom


def locally_equivalent(R1: GradedRoot, R2: GradedRoot, equivariant: bool = True) -> bool:
    return local_map_exists(R1, R2, equivariant)[0] and local_map_exists(R2, R1, equivariant)[0]


# ---------------------------------------------------------------------------
# symmetric embeddings, monotone subroots, projectivity


def symmetric_embedding(R: GradedRoot, canonical: bool = False) -> GradedRoot:
    """Re-embed a symmetric root so that J acts by reversing the planar order.

    With ``canonical`` the branches at every vertex are also sorted by their
    isomorphism type, so isomorphic roots get identical gradings lists.
    """
    R = normalize(R)
    J = R.jmap()
    tree = _build_tree(R)

    def order(node: _Node) -> list[int]:
        if node.leaf is not None:
            return [node.leaf]
        sets = [(_leafset(c), c) for c in node.children]
        fixed, left = [], []
        used = set()
        for k, (s, c) in enumerate(sets):
            if k in used:
                continue
            img = frozenset(J[x] for x in s)
            if img == s:
                fixed.append(c)
                continue
            k2 = next((t for t, (s2, _) in enumerate(sets) if s2 == img), None)
            if k2 is None:
                raise NotSymmetric("involution does not permute branches")
            used.add(k2)
            left.append(c)
        if len(fixed) > 1:
            raise NotSymmetric("involution fixes more than one branch at a vertex")
        if canonical:
            left.sort(key=_canon)
        ls = []
        for c in left:
            ls.extend(_plain_order(c, canonical))
        mid = order(fixed[0]) if fixed else []
        right = [J[x] for x in reversed(ls)]
        return ls + mid + right

    ids = order(tree)
    return _reorder(R, ids)


def _plain_order(node: _Node, canonical: bool = False) -> list[int]:
    if node.leaf is not None:
        return [node.leaf]
    kids = sorted(node.children, key=_canon) if canonical else node.children
    out = []
    for c in kids:
        out.extend(_plain_order(c, canonical))
    return out


def canonical_presentation(R: GradedRoot) -> GradedRoot:
    """Normalized root in a canonical planar embedding with leaves relabelled
    0..m-1 from left to right (J-symmetric embedding when J is present)."""
    if R.J is not None:
        S = symmetric_embedding(R, canonical=True)
    else:
        N = normalize(R)
        S = _reorder(N, _plain_order(_build_tree(N), canonical=True))
    new = {lid: i for i, lid in enumerate(S.leaf_ids)}
    J = None if S.J is None else {new[a]: new[b] for a, b in S.jmap().items()}
    return GradedRoot.from_gradings(S.leaf_gradings, S.angle_gradings, h=S.h, J=J,
                                    ids=list(range(len(new))))


def _reorder(R: GradedRoot, ids: list[int]) -> GradedRoot:
    pos = {lid: p for p, lid in enumerate(R.leaf_ids)}
    grade = dict(R.leaves)
    angles = [R.merge_grading(pos[ids[i]], pos[ids[i + 1]]) for i in range(len(ids) - 1)]
    return GradedRoot(tuple((i, grade[i]) for i in ids),
                      tuple((ids[i], ids[i + 1], a) for i, a in enumerate(angles)), R.h, R.J)


def leaf_pairs(R: GradedRoot) -> list[tuple[Fraction, Fraction, int]]:
    """(d, b, leaf id) for each leaf: leaf grading 2d, meets its J-image at 2b."""
    J = R.jmap()
    pos = {lid: p for p, lid in enumerate(R.leaf_ids)}
    out = []
    for p, (lid, g) in enumerate(R.leaves):
        out.append((g / 2, R.merge_grading(p, pos[J[lid]]) / 2, lid))
    return out


def monotone_root(pairs: Sequence[tuple]) -> GradedRoot:
    """Monotone symmetric root from staircase parameters: d strictly
    decreasing, b strictly increasing, b <= d (b = d marks a J-fixed leaf)."""
    pairs = sorted(((_q(d), _q(b)) for d, b in pairs), key=lambda t: -t[0])
    for (d1, b1), (d2, b2) in zip(pairs, pairs[1:]):
        if not (d1 > d2 and b1 < b2):
            raise RootError("parameters do not form a staircase")
    central = pairs[-1][0] == pairs[-1][1]
    left = pairs[:-1] if central else pairs
    gr = [2 * d for d, _ in left]
    ang = [2 * b for _, b in left[:-1]] if left else []
    if central:
        cg = 2 * pairs[-1][0]
        if left:
            ang = ang + [2 * left[-1][1], 2 * left[-1][1]]
        leaves = gr + [cg] + gr[::-1]
        angles = ang + [2 * b for _, b in reversed(left[:-1])]
    else:
        leaves = gr + gr[::-1]
        angles = ang + [2 * left[-1][1]] + [2 * b for _, b in reversed(left[:-1])]
    m = len(leaves)
    J = [m - 1 - i for i in range(m)]
    return GradedRoot.from_gradings(leaves, angles, J=J)


def _staircase(pairs) -> list[tuple[Fraction, Fraction]]:
    """Pareto-maximal (d, b) pairs."""
    uniq = sorted({(d, b) for d, b, _ in pairs}, key=lambda t: (-t[0], -t[1]))
    out = []
    best_b = None
    for d, b in uniq:
        if best_b is None or b > best_b:
            out.append((d, b))
            best_b = b
    return out


def monotone_subroot(R: GradedRoot) -> GradedRoot:
    R = normalize(R)
    pairs = leaf_pairs(R)
    stair = _staircase(pairs)
    M = monotone_root(stair)
    if locally_equivalent(R, M):
        return M
    # exhaustive fallback over staircases drawn from the leaf parameters
    cands = sorted({(d, b) for d, b, _ in pairs})
    for size in range(1, min(len(cands), 12) + 1):
        for sub in combinations(cands, size):
            try:
                M = monotone_root(sub)
            except RootError:
                continue
            if locally_equivalent(R, M):
                return M
    raise CertificationFailed("no monotone subroot certified")


def is_projective(R: GradedRoot) -> tuple[int, Fraction] | None:
    R = normalize(R)
    d, b = delta(R), beta(R)
    n = d - b
    assert n.denominator == 1 and n >= 0
    X = make_Xn(int(n), 2 * b)
    if locally_equivalent(R, X):
        return int(n), 2 * b
    return None
