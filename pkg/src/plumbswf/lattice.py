"""Lattice homology of a spin^c class: superlevel sets of the weight function,
the H_0 graded root by a merge tree, a cubical chain-complex oracle for all
H_d, and path lattice homology.

Points of the class are handled in y-coordinates (see ``spinc.ClassLattice``);
two points are joined by a lattice edge iff their y differ by a unit vector.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Sequence

import numpy as np

from .errors import NotAPath, RegionTooLarge, TruncationTooSmall, VerificationFailed
from .intlin import adjugate, sparse_smith
from .plumbing import PlumbingGraph
from .roots import GradedRoot, canonical_form
from .spinc import DEFAULT_CAP, CharVector, ClassLattice, SpinCClass, _GraphData, _values, weight


@dataclass(frozen=True)
class LatticeCube:
    base: CharVector
    directions: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.directions)

    def vertices(self, g: PlumbingGraph) -> list[tuple[int, ...]]:
        M = g.matrix
        base = list(self.base.values)
        idx = [g.index[v] for v in self.directions]
        out = []
        for eps in product((0, 1), repeat=len(idx)):
            k = list(base)
            for e, i in zip(eps, idx):
                if e:
                    for r in range(g.n):
                        k[r] += 2 * M[r][i]
            out.append(tuple(k))
        return out


def cube_weight(g: PlumbingGraph, cube: LatticeCube) -> Fraction:
    return min(weight(g, k) for k in cube.vertices(g))


@dataclass(frozen=True)
class GradedModule:
    """Towers of one homological degree: (id, top grading, length or None)."""

    d: int
    towers: tuple[tuple[int, Fraction, int | None], ...]
    torsion: tuple[tuple[Fraction, tuple[int, ...]], ...] = ()

    def bars(self) -> list[tuple[Fraction, int | None]]:
        return sorted(((t, l) for _, t, l in self.towers),
                      key=lambda b: (-b[0], b[1] is not None, b[1] or 0))

    def is_zero(self) -> bool:
        return not self.towers and not self.torsion

    def to_dict(self) -> dict:
        return {"d": self.d,
                "towers": [{"top": str(t), "len": "inf" if l is None else l} for _, t, l in self.towers]}


def _lattice(g: PlumbingGraph, cls) -> ClassLattice:
    k = cls.rep if isinstance(cls, SpinCClass) else _values(cls)
    return ClassLattice(g, k)


def enumerate_superlevel_points(g: PlumbingGraph, cls, h, cap: int = DEFAULT_CAP) -> list[CharVector]:
    lat = _lattice(g, cls)
    return [CharVector(lat.k_of(y), g) for y in lat.points_above(h, cap)]


# ---------------------------------------------------------------------------
# merge tree


class _MergeTree:
    """Union-find over points added level by level (decreasing weight)."""

    def __init__(self):
        self.parent: dict = {}
        self.leaves: dict = {}  # root -> planar list of leaf ids
        self.angles: dict[tuple[int, int], int] = {}
        self.leaf_level: list[int] = []
        self.leaf_points: list[list] = []

    def find(self, x):
        p = self.parent
        r = x
        while p[r] != r:
            r = p[r]
        while p[x] != r:
            p[x], x = r, p[x]
        return r

    def union(self, a, b, level: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        la, lb = self.leaves[ra], self.leaves[rb]
        if la and lb:
            if la[0] > lb[0]:
                ra, rb, la, lb = rb, ra, lb, la
            self.angles[(la[-1], lb[0])] = level
        self.parent[rb] = ra
        self.leaves[ra] = la + lb
        del self.leaves[rb]

    def run(self, levels: Sequence[tuple[int, list]], neighbours) -> None:
        for level, pts in levels:
            for p in pts:
                self.parent[p] = p
                self.leaves[p] = []
            for p in pts:
                for q in neighbours(p):
                    if q in self.parent:
                        self.union(p, q, level)
            births: dict = {}
            for p in pts:
                r = self.find(p)
                if not self.leaves[r]:
                    births.setdefault(r, []).append(p)
            for r, members in births.items():
                lid = len(self.leaf_level)
                self.leaf_level.append(level)
                self.leaf_points.append(members)
                self.leaves[r] = [lid]

    def presentation(self) -> tuple[list[int], list[int | None]]:
        comps = sorted(self.leaves.values(), key=lambda l: l[0])
        order: list[int] = []
        angles: list[int | None] = []
        for c in comps:
            if order:
                angles.append(None)
            for i, lid in enumerate(c):
                if i:
                    angles.append(self.angles[(c[i - 1], lid)])
                order.append(lid)
        return order, angles


def _levels(lat: ClassLattice, pts: list[tuple[int, ...]], order: str = "lex"):
    by: dict[int, list] = {}
    for y in pts:
        by.setdefault(lat.f(y), []).append(y)
    out = []
    for f in sorted(by, reverse=True):
        lst = sorted(by[f], key=lambda y: lat.k_of(y), reverse=(order == "reverse"))
        out.append((f, lst))
    return out


def _unit_neighbours(n: int):
    def nb(y):
        for i in range(n):
            yield y[:i] + (y[i] + 1,) + y[i + 1:]
            yield y[:i] + (y[i] - 1,) + y[i + 1:]
    return nb


def _conj_offset(g: PlumbingGraph, lat: ClassLattice) -> tuple[int, ...] | None:
    Minv = _GraphData.of(g).Minv
    c = [sum(Minv[i][j] * lat.k0[j] for j in range(lat.n)) for i in range(lat.n)]
    if any(x.denominator != 1 for x in c):
        return None
    return tuple(int(x) for x in c)


def _root_from_tree(lat: ClassLattice, mt: _MergeTree, h, conj: tuple[int, ...] | None) -> GradedRoot:
    order, angles = mt.presentation()
    gr = {lid: lat.w0 + mt.leaf_level[lid] for lid in order}
    J = None
    if conj is not None:
        owner = {}
        for lid, members in enumerate(mt.leaf_points):
            for p in members:
                owner[p] = lid
        J = {}
        for lid in order:
            p = mt.leaf_points[lid][0]
            img = tuple(-a - b for a, b in zip(conj, p))
            if img not in owner:
                raise VerificationFailed("conjugation does not map births to births")
            J[lid] = owner[img]
    return GradedRoot.from_gradings([gr[i] for i in order],
                                    [None if a is None else lat.w0 + a for a in angles],
                                    h=h, J=J, ids=order)


def _tree_and_lattice(g, cls, h, cap, order="lex"):
    lat = _lattice(g, cls)
    pts = lat.points_above(h, cap)
    mt = _MergeTree()
    mt.run(_levels(lat, pts, order), _unit_neighbours(lat.n))
    return lat, mt


def h0_graded_root(g: PlumbingGraph, cls, h=None, cap: int = DEFAULT_CAP, order: str = "lex") -> GradedRoot:
    """H_0 graded root truncated at h.  With h=None the truncation is lowered
    until every leaf is born and all components have merged."""
    if h is None:
        h = complete_level(g, cls, cap)
    h = Fraction(h)
    lat, mt = _tree_and_lattice(g, cls, h, cap, order)
    if not mt.leaf_level:
        raise RegionTooLarge(f"superlevel set above h={h} is empty")
    conj = _conj_offset(g, lat)
    return _root_from_tree(lat, mt, h, conj)


def _birth_plateaus(lat: ClassLattice) -> list[tuple[int, list[tuple[int, ...]]]]:
    """All plateaus of weak local maxima that have no equal-weight exit.

    A point with no strictly better neighbour has v = Q y confined to a box;
    we enumerate that box and keep the integral preimages.
    """
    n, Q, k0 = lat.n, lat.Q, lat.k0
    lo = [-((Q[i][i] - k0[i]) // 2) for i in range(n)]
    hi = [(k0[i] + Q[i][i]) // 2 for i in range(n)]
    adj, det = adjugate(Q)
    A = np.array(adj, dtype=object if max(abs(x) for r in adj for x in r) > 2**40 else np.int64)
    ranges = [np.arange(lo[i], hi[i] + 1, dtype=np.int64) for i in range(n)]
    total = 1
    for r in ranges:
        total *= len(r)
    if total > 5 * 10**7:
        raise RegionTooLarge("critical-point box too large")
    cand: dict[tuple[int, ...], tuple[int, ...]] = {}
    # chunk over the first coordinate to bound memory
    rest = np.array(np.meshgrid(*ranges[1:], indexing="ij")).reshape(n - 1, -1) if n > 1 else np.zeros((0, 1), np.int64)
    for v0 in ranges[0]:
        V = np.vstack([np.full((1, rest.shape[1]), v0, dtype=np.int64), rest])
        Y = A @ V
        ok = np.all(Y % det == 0, axis=0)
        for col in np.nonzero(ok)[0]:
            cand[tuple(int(x) // det for x in Y[:, col])] = tuple(int(x) for x in V[:, col])
    # f(y) = k0.y - y.Qy, and the change along +-e_i is read off v = Qy
    fval = {y: sum(a * (b - c) for a, b, c in zip(y, k0, v)) for y, v in cand.items()}
    seen: set = set()
    out = []
    for y in sorted(cand):
        if y in seen:
            continue
        fy = fval[y]
        comp = [y]
        seen.add(y)
        closed = True
        queue = deque([y])
        while queue:
            p = queue.popleft()
            v = cand[p]
            for i in range(n):
                for sgn in (1, -1):
                    q = p[:i] + (p[i] + sgn,) + p[i + 1:]
                    if q in cand:
                        if fval[q] == fy and q not in seen:
                            seen.add(q)
                            comp.append(q)
                            queue.append(q)
                    elif sgn * (k0[i] - 2 * v[i]) - Q[i][i] == 0:
                        closed = False
        if closed:
            out.append((fy, sorted(comp)))
    return out


def birth_levels(g: PlumbingGraph, cls) -> list[Fraction]:
    """Weights of all local-maximum plateaus (one per leaf of the full root)."""
    lat = _lattice(g, cls)
    return sorted((lat.w0 + f for f, _ in _birth_plateaus(lat)), reverse=True)


def complete_level(g: PlumbingGraph, cls, cap: int = DEFAULT_CAP) -> Fraction:
    """Highest truncation at which the root is complete."""
    lat = _lattice(g, cls)
    births = _birth_plateaus(lat)
    T = min(f for f, _ in births)
    while True:
        h = lat.w0 + T
        _, mt = _tree_and_lattice(g, cls, h, cap)
        if len(mt.leaves) == 1:
            if len(mt.leaf_level) != len(births):
                raise VerificationFailed("merge-tree leaves disagree with local-maximum plateaus")
            return h
        T -= 2


# ---------------------------------------------------------------------------
# chain-complex oracle


def _cubes(lat: ClassLattice, pts: list[tuple[int, ...]], max_dim: int):
    """Cubes (base, dirs) with every vertex in pts, graded by min vertex level."""
    fval = {y: lat.f(y) for y in pts}
    levels = [dict(((y, ()), f) for y, f in fval.items())]
    n = lat.n
    for d in range(1, max_dim + 1):
        nxt = {}
        for (y, dirs), f in levels[-1].items():
            start = dirs[-1] + 1 if dirs else 0
            for t in range(start, n):
                y2 = y[:t] + (y[t] + 1,) + y[t + 1:]
                f2 = levels[-1].get((y2, dirs))
                if f2 is not None:
                    nxt[(y, dirs + (t,))] = min(f, f2)
        levels.append(nxt)
        if not nxt:
            break
    return levels


def _faces(cube):
    y, dirs = cube
    for s, t in enumerate(dirs):
        rest = dirs[:s] + dirs[s + 1:]
        up = y[:t] + (y[t] + 1,) + y[t + 1:]
        sign = -1 if s % 2 else 1
        yield (up, rest), sign
        yield (y, rest), -sign


class _Persistence:
    """Column reduction of the filtered boundary matrix (decreasing levels)."""

    def __init__(self, cubes, max_dim: int):
        self.nonunit = False
        cells = []
        for d, lv in enumerate(cubes):
            for c, f in lv.items():
                cells.append((-f, d, c))
        cells.sort()
        self.index = {c: i for i, (_, _, c) in enumerate(cells)}
        self.level = [-nf for nf, _, _ in cells]
        self.dim = [d for _, d, _ in cells]
        self.cells = [c for _, _, c in cells]
        self.max_dim = max_dim
        self.pairs: list[tuple[int, int]] = []
        self.paired: set[int] = set()

    def reduce(self) -> None:
        idx = self.index
        pivot_col: dict[int, dict] = {}
        top = max(self.dim) if self.dim else 0
        cleared: set[int] = set()
        by_dim: list[list[int]] = [[] for _ in range(top + 1)]
        for j, d in enumerate(self.dim):
            by_dim[d].append(j)
        cells = self.cells
        for d in range(top, 0, -1):
            for j in by_dim[d]:
                if j in cleared:
                    continue
                c = cells[j]
                col: dict[int, object] = {}
                for face, s in _faces(c):
                    col[idx[face]] = col.get(idx[face], 0) + s
                col = {i: v for i, v in col.items() if v}
                while col:
                    low = max(col)
                    other = pivot_col.get(low)
                    if other is None:
                        break
                    a, b = col[low], other[low]
                    if b == 1 or b == -1:
                        q = a * b
                    else:
                        q = Fraction(a) / b
                        if q.denominator != 1:
                            self.nonunit = True
                        else:
                            q = int(q)
                    for i, v in other.items():
                        nv = col.get(i, 0) - q * v
                        if nv:
                            col[i] = nv
                        else:
                            col.pop(i, None)
                if col:
                    low = max(col)
                    if col[low] not in (1, -1):
                        self.nonunit = True
                    pivot_col[low] = col
                    self.pairs.append((low, j))
                    self.paired.add(low)
                    self.paired.add(j)
                    cleared.add(low)

    def bars(self, d: int) -> list[tuple[int, int | None]]:
        out = []
        for b, e in self.pairs:
            if self.dim[b] == d and self.level[b] != self.level[e]:
                out.append((self.level[b], self.level[e]))
        for j in range(len(self.cells)):
            if self.dim[j] == d and j not in self.paired:
                out.append((self.level[j], None))
        return out


def _level_torsion(cubes, levels: list[int], max_dim: int) -> dict[tuple[int, int], list[int]]:
    """Torsion of H_d(S_q) from a sparse Smith reduction at every level."""
    out = {}
    for q in levels:
        idx = [{c: i for i, c in enumerate(c for c, f in lv.items() if f >= q)} for lv in cubes]
        for d in range(max_dim + 1):
            if d + 1 >= len(cubes):
                break
            cols = []
            for c, f in cubes[d + 1].items():
                if f < q:
                    continue
                col: dict[int, int] = {}
                for face, s in _faces(c):
                    r = idx[d][face]
                    col[r] = col.get(r, 0) + s
                cols.append({r: v for r, v in col.items() if v})
            _, tors = sparse_smith(cols)
            if tors:
                out[(q, d)] = tors
    return out


def full_homology_oracle(g: PlumbingGraph, cls, h, max_dim: int = 2, u_trunc: int | None = None,
                         cap: int = DEFAULT_CAP) -> list[GradedModule]:
    """Lattice homology H_0..H_max_dim from the cubical chain complex of S_h.

    H_d in grading q + d is H_d of the superlevel set S_q; U maps S_q into
    S_{q-2}.  Towers alive at h are reported as infinite.
    """
    lat = _lattice(g, cls)
    h = Fraction(h)
    pts = lat.points_above(h, cap)
    if not pts:
        return [GradedModule(d, ()) for d in range(max_dim + 1)]
    T = lat.level_threshold(h)
    top = max(lat.f(y) for y in pts)
    span = (top - T) // 2 + 1
    if u_trunc is None:
        u_trunc = span + 1
    if u_trunc < 1:
        raise ValueError("U-truncation must be at least 1")
    if span > u_trunc:
        raise TruncationTooSmall(f"window spans {span} U-steps but U^{u_trunc} = 0 was requested")
    cubes = _cubes(lat, pts, max_dim + 1)
    total = sum(len(c) for c in cubes)
    if total > 20 * cap:
        raise RegionTooLarge(f"{total} cubes exceed the cap")
    P = _Persistence(cubes, max_dim)
    P.reduce()
    torsion = {}
    if P.nonunit:
        levels = sorted({f for lv in cubes for f in lv.values()}, reverse=True)
        torsion = _level_torsion(cubes, levels, max_dim)
    out = []
    for d in range(max_dim + 1):
        towers = []
        for k, (b, e) in enumerate(sorted(P.bars(d), key=lambda t: (-t[0], t[1] is not None, -(t[1] or 0)))):
            top_gr = lat.w0 + b + d
            ln = None if e is None else (b - e) // 2
            towers.append((k, top_gr, ln))
        tors = tuple((lat.w0 + q + d, tuple(v)) for (q, dd), v in sorted(torsion.items()) if dd == d)
        out.append(GradedModule(d, tuple(towers), tors))
    return out


def lattice_cells(g: PlumbingGraph, cls, h, max_dim: int = 2,
                  cap: int = DEFAULT_CAP) -> list[tuple[LatticeCube, Fraction]]:
    """All cubes of S_h up to dimension max_dim with their weights, for
    inspection only.  Sorted by dimension, then by decreasing weight."""
    lat = _lattice(g, cls)
    pts = lat.points_above(Fraction(h), cap)
    out = []
    for lv in _cubes(lat, pts, max_dim) if pts else []:
        for (y, dirs), f in lv.items():
            cube = LatticeCube(CharVector(lat.k_of(y), g), tuple(g.ids[t] for t in dirs))
            out.append((cube, lat.w0 + f))
    out.sort(key=lambda t: (t[0].dim, -t[1], t[0].base.values, t[0].directions))
    return out


def oracle_root_agrees(root: GradedRoot, h0: GradedModule) -> bool:
    from .roots import barcode
    return barcode(root) == h0.bars()


# ---------------------------------------------------------------------------
# paths


def path_root(g: PlumbingGraph, path: Sequence) -> GradedRoot:
    """Graded root of the path subcomplex (points and consecutive edges)."""
    if not path:
        raise NotAPath("empty path")
    ks = [tuple(_values(k)) for k in path]
    if len(set(ks)) != len(ks):
        raise NotAPath("path revisits a lattice point")
    M = g.matrix
    cols = [tuple(2 * M[r][i] for r in range(g.n)) for i in range(g.n)]
    steps = set(cols) | {tuple(-x for x in c) for c in cols}
    for a, b in zip(ks, ks[1:]):
        if tuple(y - x for x, y in zip(a, b)) not in steps:
            raise NotAPath("consecutive entries do not differ by 2v*")
    w = [weight(g, k) for k in ks]
    base = w[0]
    rel = [int(x - base) for x in w]
    by: dict[int, list[int]] = {}
    for i, r in enumerate(rel):
        by.setdefault(r, []).append(i)
    levels = [(r, by[r]) for r in sorted(by, reverse=True)]
    m = len(ks)

    def nb(i):
        if i > 0:
            yield i - 1
        if i + 1 < m:
            yield i + 1

    mt = _MergeTree()
    mt.run(levels, nb)
    # leaves in path order; consecutive leaves meet at the lowest weight between them
    firsts = sorted((min(mem), lid) for lid, mem in enumerate(mt.leaf_points))
    order = [lid for _, lid in firsts]
    angles = [min(rel[p:q + 1]) for (p, _), (q, _) in zip(firsts, firsts[1:])]
    J = None
    pos = {k: i for i, k in enumerate(ks)}
    owner = {p: lid for lid, mem in enumerate(mt.leaf_points) for p in mem}
    imgs = {}
    for lid in order:
        i = mt.leaf_points[lid][0]
        neg = tuple(-x for x in ks[i])
        if neg in pos and pos[neg] in owner:
            imgs[lid] = owner[pos[neg]]
    if len(imgs) == len(order) and all(imgs[imgs[l]] == l for l in order):
        J = imgs
    return GradedRoot.from_gradings([base + mt.leaf_level[i] for i in order],
                                    [base + a for a in angles], J=J, ids=order)


def find_representative_path(g: PlumbingGraph, cls, cap: int = DEFAULT_CAP,
                             max_orders: int = 5040) -> list[CharVector]:
    """A simple lattice path whose path root equals the H_0 root.

    Consecutive leaf plateaus are joined by valley corridors (first
    non-increasing, then non-decreasing in weight) that never drop below the
    grading where the two leaves meet.  Several planar leaf orders are tried.
    """
    h = complete_level(g, cls, cap)
    lat, mt = _tree_and_lattice(g, cls, h, cap)
    base_order, _ = mt.presentation()
    full = _root_from_tree(lat, mt, h, None).with_h(None)
    target = canonical_form(full)
    pos = {lid: p for p, lid in enumerate(base_order)}
    fval = {y: lat.f(y) for y in lat.points_above(h, cap)}
    for k, order in enumerate(permutations(base_order)):
        if k >= max_orders:
            break
        floors = [int(full.merge_grading(pos[a], pos[b]) - lat.w0) for a, b in zip(order, order[1:])]
        path = _valley_path(lat, fval, [set(mt.leaf_points[lid]) for lid in order], floors)
        if path is None:
            continue
        ks = [CharVector(lat.k_of(y), g) for y in path]
        if canonical_form(path_root(g, ks).forget_j()) == target:
            return ks
    raise VerificationFailed("no simple path reproduces the lattice root")


def _valley_path(lat: ClassLattice, fval: dict, plateau: list[set], floors: list[int]):
    nb = _unit_neighbours(lat.n)
    births = set().union(*plateau)
    path: list[tuple[int, ...]] = []
    used: set = set()
    for i, floor in enumerate(floors):
        own = plateau[i] | plateau[i + 1]
        sources = sorted(plateau[0]) if i == 0 else [path[-1]]
        # BFS on (point, phase): phase 0 descends, phase 1 ascends
        prev = {(a, 0): None for a in sources}
        queue = deque(prev)
        end = None
        while queue and end is None:
            p, ph = queue.popleft()
            for q in nb(p):
                fq = fval.get(q)
                if fq is None or fq < floor or q in used:
                    continue
                if q in births and q not in own:
                    continue
                for nph in ((0, 1) if ph == 0 else (1,)):
                    if (nph == 0 and fq > fval[p]) or (nph == 1 and fq < fval[p]):
                        continue
                    st = (q, nph)
                    if st in prev:
                        continue
                    prev[st] = (p, ph)
                    if q in plateau[i + 1]:
                        end = st
                        break
                    queue.append(st)
                if end is not None:
                    break
        if end is None:
            return None
        seg = []
        st = end
        while st is not None:
            seg.append(st[0])
            st = prev[st]
        seg.reverse()
        if path:
            seg = seg[1:]
        if any(y in used for y in seg) or len(set(seg)) != len(seg):
            return None
        path.extend(seg)
        used.update(seg)
    if not path:
        path = [min(plateau[0])]
    return path
