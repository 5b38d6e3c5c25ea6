"""Cell models of the S^1 and Pin(2) spectra attached to a graded root.

A model records spheres S(C^d) by their complex dimensions, the common
subspheres along which consecutive cells are glued, and the formal
suspension triple (m, n).  Nothing here builds point sets.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import CutTooHigh, GradingCosetMismatch, InconsistentDirections, NotSymmetric, NotTypeSWF
from .intlin import smith_invariants
from .roots import GradedRoot, beta, normalize, same_coset, symmetric_embedding


@dataclass(frozen=True)
class SpectrumModel:
    cells: tuple[tuple[int, int], ...]  # (id, complex dimension)
    glue: tuple[tuple[int, int, int], ...]  # (a, b, complex dimension of common subsphere)
    triple: tuple[int, Fraction]
    h: Fraction | None = None
    theta: tuple[int, ...] = ()
    pairs: tuple[tuple[int, int], ...] = ()
    pin2: bool = False
    rtilde: int = 0

    def __post_init__(self):
        dims = dict(self.cells)
        for a, b, e in self.glue:
            if e < 0 or e > min(dims[a], dims[b]):
                raise ValueError("gluing sphere larger than a cell")
        if any(d < 0 for _, d in self.cells):
            raise ValueError("negative cell dimension")

    def dims(self) -> dict[int, int]:
        return dict(self.cells)

    def theta_quaternionic(self) -> dict[int, int]:
        dims = self.dims()
        return {t: dims[t] // 2 for t in self.theta}

    def forget_j(self) -> "SpectrumModel":
        """Underlying S^1 model, with degenerate (inserted) cells removed."""
        R = normalize(coborel(self))
        return build_s1_model(R, self.h)

    def to_dict(self) -> dict:
        d = {
            "cells": [{"id": i, "dimC": k} for i, k in self.cells],
            "glue": [{"a": a, "b": b, "dimC": e} for a, b, e in self.glue],
            "triple": {"m": self.triple[0], "n": str(self.triple[1])},
        }
        if self.h is not None:
            d["h"] = str(self.h)
        if self.pin2:
            d["j"] = {"theta": list(self.theta), "pairs": [list(p) for p in self.pairs]}
        if self.rtilde:
            d["rtilde"] = self.rtilde
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumModel":
        j = d.get("j")
        return cls(
            tuple((int(c["id"]), int(c["dimC"])) for c in d["cells"]),
            tuple((int(g["a"]), int(g["b"]), int(g["dimC"])) for g in d["glue"]),
            (int(d["triple"]["m"]), Fraction(d["triple"]["n"])),
            Fraction(d["h"]) if d.get("h") is not None else None,
            tuple(int(t) for t in j["theta"]) if j else (),
            tuple((int(a), int(b)) for a, b in j["pairs"]) if j else (),
            j is not None,
            int(d.get("rtilde", 0)),
        )


def _check_cut(R: GradedRoot, h: Fraction) -> None:
    R.require_complete()
    if not same_coset(h, R.leaf_gradings[0]):
        raise GradingCosetMismatch(f"cut {h} is not in the grading coset of the root")
    bound = min(R.angle_gradings) if R.angles else R.leaf_gradings[0]
    if h > bound:
        raise CutTooHigh(f"cut {h} lies above the grading {bound}")


def build_s1_model(R: GradedRoot, h) -> SpectrumModel:
    h = Fraction(h)
    _check_cut(R, h)
    cells = tuple((i, int((g - h) / 2)) for i, g in R.leaves)
    glue = tuple((l, r, int((a - h) / 2)) for l, r, a in R.angles)
    return SpectrumModel(cells, glue, (0, -h / 2), h)


def coborel(model: SpectrumModel) -> GradedRoot:
    """Read the co-Borel homology back as a graded root.

    Each cell contributes a tower with top 2*dim - 2n; the glued space's
    group in each grading is the cokernel of the Mayer-Vietoris map from the
    gluing spheres, computed by Smith form and checked against the tree.
    """
    n = model.triple[1]
    off = -2 * n
    ids = [i for i, _ in model.cells]
    dims = model.dims()
    order = {i: p for p, i in enumerate(ids)}
    for p, (a, b, _) in enumerate(model.glue):
        if (order[a], order[b]) != (p, p + 1):
            raise ValueError("gluings must join consecutive cells")
    R = GradedRoot.from_gradings([2 * dims[i] + off for i in ids], [2 * e + off for _, _, e in model.glue],
                                 ids=ids)
    for g in mayer_vietoris_profile(model):
        grading, rank, torsion = g
        if torsion or rank != R.rank_at(grading):
            raise AssertionError("Mayer-Vietoris read-back disagrees with the tree")
    return R


def mayer_vietoris_profile(model: SpectrumModel) -> list[tuple[Fraction, int, list[int]]]:
    """(grading, rank, torsion) of the co-Borel homology at every grading from
    the top cell down to two steps below the lowest gluing."""
    n = model.triple[1]
    dims = model.dims()
    ids = [i for i, _ in model.cells]
    top = max(dims.values())
    low = min([e for _, _, e in model.glue] + [top]) - 1
    out = []
    for k in range(top, low - 1, -1):
        act = [i for i in ids if dims[i] >= k]
        pos = {i: p for p, i in enumerate(act)}
        cols = [(a, b) for a, b, e in model.glue if e >= k]
        if cols:
            D = [[0] * len(cols) for _ in act]
            for c, (a, b) in enumerate(cols):
                D[pos[a]][c] += 1
                D[pos[b]][c] -= 1
            inv = smith_invariants(D)
        else:
            inv = []
        rank = len(act) - len(inv)
        out.append((2 * k - 2 * n, rank, [d for d in inv if d > 1]))
    return out


def recut(model: SpectrumModel, h) -> SpectrumModel:
    """Same spectrum materialized at a different cut."""
    R = coborel(model)
    if model.pin2:
        return build_pin2_model(_with_j(R, model), h)
    return build_s1_model(R, h)


def _with_j(R: GradedRoot, model: SpectrumModel) -> GradedRoot:
    J = {t: t for t in model.theta}
    for a, b in model.pairs:
        J[a], J[b] = b, a
    return GradedRoot.from_gradings(R.leaf_gradings, R.angle_gradings, J=J, ids=R.leaf_ids)


def suspend(model: SpectrumModel, r) -> SpectrumModel:
    """Formal complex suspension: n decreases by r, cells untouched."""
    m, n = model.triple
    return replace(model, triple=(m, n - Fraction(r)))


def desuspend(model: SpectrumModel, r) -> SpectrumModel:
    return suspend(model, -Fraction(r))


def suspend_rtilde(model: SpectrumModel, k: int = 1) -> SpectrumModel:
    return replace(model, rtilde=model.rtilde + k)


def swf_type_level(model) -> int:
    """Level l with fixed-point set S^{l R~}.

    Every cell S(C^d) has fixed set S^0 and gluings identify these, so the
    fixed set of a model is S^0 before any R~-suspension.
    """
    if isinstance(model, ProductCellModel):
        return 0
    if not model.cells:
        raise NotTypeSWF("empty model")
    dims = model.dims()
    for a, b, e in model.glue:
        if e > min(dims[a], dims[b]):
            raise NotTypeSWF("gluing is not along a common subsphere")
    return model.rtilde


def build_pin2_model(R: GradedRoot, h) -> SpectrumModel:
    """Pin(2) cell model: a central theta cell at the top J-invariant grading
    and mirrored pairs of cells exchanged by j.  The cut is lowered by 2
    until (2*beta - h) is divisible by 4."""
    if R.J is None:
        raise NotSymmetric("Pin(2) model needs a symmetric root")
    R = symmetric_embedding(R)
    h = Fraction(h)
    b2 = 2 * beta(R)
    if not same_coset(h, b2):
        raise GradingCosetMismatch("cut outside the grading coset")
    while (b2 - h) % 4:
        h -= 2
    ids, L, A = R.leaf_ids, R.leaf_gradings, R.angle_gradings
    m = len(ids)
    J = R.jmap()
    if any(J[ids[p]] != ids[m - 1 - p] for p in range(m)):
        raise NotSymmetric("involution is not the planar reflection")
    if m % 2:
        c = m // 2
        if L[c] != b2:
            raise NotSymmetric("central leaf is not the top invariant vertex")
        theta = ids[c]
        leaves, angles, order = L, A, ids
    else:
        c = m // 2
        theta = max(ids) + 1
        if A[c - 1] != b2:
            raise NotSymmetric("central angle is not the top invariant vertex")
        order = ids[:c] + [theta] + ids[c:]
        leaves = L[:c] + [b2] + L[c:]
        angles = A[:c - 1] + [b2, b2] + A[c:]
    Rt = GradedRoot.from_gradings(leaves, angles, ids=order)
    base = build_s1_model(Rt, h)
    k = len(order)
    pairs = tuple((order[p], order[k - 1 - p]) for p in range(k // 2))
    model = replace(base, theta=(theta,), pairs=pairs, pin2=True)
    if (dict(model.cells)[theta]) % 2:
        raise NotSymmetric("theta cell is not quaternionic")
    return model


# ---------------------------------------------------------------------------
# products and formal differences


@dataclass(frozen=True)
class ProductCellModel:
    """Product of interval models of A_{n_i} on the grid [-1, 1]^k.

    A factor cell is an integer c in {-2..2}: even c is the vertex c/2, odd c
    the edge between (c-1)/2 and (c+1)/2.  A factor vertex at +-1 weighs 2n_i,
    everything else 0; product cells weigh the sum over factors.
    """

    ns: tuple[int, ...]
    triple: tuple[int, Fraction] = (0, Fraction(0))

    @staticmethod
    def factor_weight(n: int, c: int) -> int:
        return 2 * n if abs(c) == 2 else 0

    def weight(self, cell: Sequence[int]) -> int:
        return sum(self.factor_weight(n, c) for n, c in zip(self.ns, cell))

    def cells(self) -> dict[tuple[int, ...], int]:
        return {c: self.weight(c) for c in product(range(-2, 3), repeat=len(self.ns))}

    def vertex_grid(self) -> dict[tuple[int, ...], int]:
        return {c: self.weight(c) for c in product((-2, 0, 2), repeat=len(self.ns))}

    def cell_vertices(self, cell: Sequence[int]) -> list[tuple[int, ...]]:
        opts = [(c,) if c % 2 == 0 else (c - 1, c + 1) for c in cell]
        return list(product(*opts))

    def root(self) -> GradedRoot:
        """H_0 graded root of the weighted grid (merge tree over grid edges)."""
        grid = self.vertex_grid()
        parent = {v: v for v in grid}
        leaves: dict = {}
        angles: dict = {}
        births: list[int] = []

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        present: set = set()
        for lvl in sorted(set(grid.values()), reverse=True):
            pts = sorted(v for v, w in grid.items() if w == lvl)
            for p in pts:
                present.add(p)
                leaves[p] = []
            for p in pts:
                for i in range(len(p)):
                    for s in (-2, 2):
                        q = p[:i] + (p[i] + s,) + p[i + 1:]
                        if q in present:
                            ra, rb = find(p), find(q)
                            if ra == rb:
                                continue
                            la, lb = leaves[ra], leaves[rb]
                            if la and lb:
                                if la[0] > lb[0]:
                                    ra, rb, la, lb = rb, ra, lb, la
                                angles[(la[-1], lb[0])] = lvl
                            parent[rb] = ra
                            leaves[ra] = la + lb
                            del leaves[rb]
            for p in pts:
                r = find(p)
                if not leaves[r]:
                    leaves[r] = [len(births)]
                    births.append(lvl)
        (order,) = leaves.values()
        return GradedRoot.from_gradings([births[i] for i in order],
                                        [angles[(a, b)] for a, b in zip(order, order[1:])], ids=order)


def smash(ns: Sequence[int]) -> ProductCellModel:
    for n in ns:
        if n < 0:
            raise ValueError("factor parameters must be non-negative")
    return ProductCellModel(tuple(int(n) for n in ns))


@dataclass(frozen=True)
class FormalDifference:
    plus_dim: int
    minus_dim: int

    @property
    def dim(self) -> int:
        return self.plus_dim - self.minus_dim


def contracted_mapping_cone(diffs: Sequence[FormalDifference], inclusions: Sequence[str]) -> SpectrumModel:
    """Glue formal differences A_i - B_i along inclusions.

    ``inclusions[i]`` is ">" when A_i - B_i maps into A_{i+1} - B_{i+1}, and
    "<" for the other direction.  After stabilizing by the B's every entry
    becomes an honest space V_i = A_i + sum_{j != i} B_j; the model records
    the formal desuspension by the sum of the B's.
    """
    if len(inclusions) != len(diffs) - 1:
        raise InconsistentDirections("need one direction per consecutive pair")
    a = [d.plus_dim for d in diffs]
    b = [d.minus_dim for d in diffs]
    for i, arrow in enumerate(inclusions):
        if arrow == ">":
            src, tgt = i, i + 1
        elif arrow == "<":
            src, tgt = i + 1, i
        else:
            raise InconsistentDirections(f"unknown direction {arrow!r}")
        if a[src] > a[tgt] or b[tgt] > b[src]:
            raise InconsistentDirections(f"no inclusion between entries {i} and {i + 1}")
    B = sum(b)
    V = [a[i] + B - b[i] for i in range(len(diffs))]
    cells = tuple(enumerate(V))
    glue = tuple((i, i + 1, min(V[i], V[i + 1])) for i in range(len(V) - 1))
    return SpectrumModel(cells, glue, (0, Fraction(B)))
