"""Characteristic vectors, spin^c classes, Wu elements, weights and the
Neumann-Siebenmann invariant.

Inside a class [k] we work in integer coordinates y with k = k0 + 2 M y.  Then
w(k) = w(k0) + k0.y + y^T M y, so weight differences are exact integers and the
lattice edges k -> k + 2v* are unit steps in y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil, isqrt, prod
from typing import Sequence

from .errors import NotNegativeDefinite, NotSelfConjugate, RegionTooLarge
from .intlin import hnf, inverse, mat_vec, smith_invariants
from .plumbing import PlumbingGraph, determinant, is_negative_definite

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class CharVector:
    values: tuple[int, ...]
    graph: PlumbingGraph | None = field(default=None, compare=False, repr=False)

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __neg__(self) -> "CharVector":
        return CharVector(tuple(-v for v in self.values), self.graph)


def char_vector(g: PlumbingGraph, values: Sequence[int]) -> CharVector:
    vals = tuple(int(v) for v in values)
    if len(vals) != g.n:
        raise ValueError("characteristic vector has wrong length")
    for v, f in zip(vals, g.framings):
        if (v - f) % 2:
            raise ValueError(f"value {v} has the wrong parity for framing {f}")
    return CharVector(vals, g)


def _values(k) -> tuple[int, ...]:
    return tuple(k.values) if isinstance(k, CharVector) else tuple(int(x) for x in k)


class _GraphData:
    """Per-graph cached linear algebra."""

    _cache: dict[PlumbingGraph, "_GraphData"] = {}

    def __init__(self, g: PlumbingGraph):
        self.g = g
        self.M = [list(r) for r in g.matrix]
        self.Minv = inverse(self.M)
        self.det = determinant(g)
        self.lattice2M = hnf([[2 * x for x in row] for row in self.M])
        self.latticeM = hnf(self.M)

    @classmethod
    def of(cls, g: PlumbingGraph) -> "_GraphData":
        d = cls._cache.get(g)
        if d is None:
            if not is_negative_definite(g):
                raise NotNegativeDefinite("intersection form is not negative definite")
            d = cls(g)
            if len(cls._cache) > 256:
                cls._cache.clear()
            cls._cache[g] = d
        return d


def char_square(g: PlumbingGraph, k) -> Fraction:
    vals = _values(k)
    Minv = _GraphData.of(g).Minv
    n = g.n
    return sum((vals[i] * Minv[i][j] * vals[j] for i in range(n) for j in range(n)), Fraction(0))


def weight(g: PlumbingGraph, k) -> Fraction:
    return (char_square(g, k) + g.n) / 4


def class_residue(g: PlumbingGraph, k) -> tuple[int, ...]:
    """Canonical residue of k modulo the column lattice of 2M (Hermite-reduced)."""
    v = list(_values(k))
    for t, row in enumerate(_GraphData.of(g).lattice2M):
        q = v[t] // row[t]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return tuple(v)


def same_class(g: PlumbingGraph, k1, k2) -> bool:
    return class_residue(g, k1) == class_residue(g, k2)


class ClassLattice:
    """The affine lattice [k] in y-coordinates with its weight function."""

    def __init__(self, g: PlumbingGraph, k0: Sequence[int]):
        self.g = g
        data = _GraphData.of(g)
        self.M = data.M
        self.n = g.n
        self.k0 = tuple(_values(k0))
        self.w0 = weight(g, self.k0)
        self._diag = [(self.k0[i], self.M[i][i]) for i in range(self.n)]
        self._edges = [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if self.M[i][j]]
        assert all(self.M[i][j] == 1 for i, j in self._edges)
        n = self.n
        Q = [[-x for x in row] for row in self.M]
        self.Q = Q
        Qinv = [[-x for x in row] for row in data.Minv]
        # centre of the concave quadratic f(y) = k0.y - y^T Q y
        self.center = [sum(Qinv[i][j] * self.k0[j] for j in range(n)) / 2 for i in range(n)]
        self.fmax = sum(self.center[i] * Q[i][j] * self.center[j]
                        for i in range(n) for j in range(n))
        # Q = U^T D U with U unit upper triangular
        A = [[Fraction(x) for x in row] for row in Q]
        self.d: list[Fraction] = []
        self.mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            piv = A[i][i]
            self.d.append(piv)
            for j in range(i + 1, n):
                self.mu[i][j] = A[i][j] / piv
            for r in range(i + 1, n):
                f = A[r][i] / piv
                if f:
                    for c in range(i + 1, n):
                        A[r][c] -= f * A[i][c]

    def f(self, y: Sequence[int]) -> int:
        s = 0
        for i, (ki, mi) in enumerate(self._diag):
            yi = y[i]
            if yi:
                s += yi * (ki + mi * yi)
        for i, j in self._edges:
            s += 2 * y[i] * y[j]
        return s

    def weight(self, y: Sequence[int]) -> Fraction:
        return self.w0 + self.f(y)

    def k_of(self, y: Sequence[int]) -> tuple[int, ...]:
        My = mat_vec(self.M, y)
        return tuple(a + 2 * b for a, b in zip(self.k0, My))

    def y_of(self, k: Sequence[int]) -> tuple[int, ...]:
        Minv = _GraphData.of(self.g).Minv
        diff = [a - b for a, b in zip(_values(k), self.k0)]
        y = [sum(Minv[i][j] * diff[j] for j in range(self.n)) / 2 for i in range(self.n)]
        if any(v.denominator != 1 for v in y):
            raise ValueError("vector is not in this class")
        return tuple(int(v) for v in y)

    def level_threshold(self, h) -> int:
        """Smallest integer T with w0 + T >= h."""
        return ceil(Fraction(h) - self.w0)

    def max_weight(self) -> Fraction:
        """Upper bound for the weight on this class (attained only at the centre)."""
        return self.w0 + self.fmax

    def points_above(self, h, cap: int = DEFAULT_CAP) -> list[tuple[int, ...]]:
        """All y with w(y) >= h, by exact Fincke-Pohst enumeration."""
        T = self.level_threshold(h)
        R = self.fmax - T
        out: list[tuple[int, ...]] = []
        if R < 0:
            return out
        n = self.n
        c, d, mu = self.center, self.d, self.mu
        y = [0] * n

        def bounds(i: int, rem: Fraction) -> range:
            a = c[i] - sum(mu[i][j] * (y[j] - c[j]) for j in range(i + 1, n))
            r = rem / d[i]
            p, q = a.numerator, a.denominator
            u, v = r.numerator, r.denominator
            S = isqrt(u * q * q // v)
            lo = -((S - p) // q)
            hi = (p + S) // q
            return a, range(lo, hi + 1)

        def rec(i: int, rem: Fraction) -> None:
            a, rng = bounds(i, rem)
            for yi in rng:
                used = d[i] * (yi - a) ** 2
                if used > rem:
                    continue
                y[i] = yi
                if i == 0:
                    if self.f(y) >= T:
                        out.append(tuple(y))
                        if len(out) > cap:
                            raise RegionTooLarge(f"more than {cap} lattice points above h={h}")
                else:
                    rec(i - 1, rem - used)
            y[i] = 0

        rec(n - 1, R)
        out.sort()
        return out


@dataclass(frozen=True)
class SpinCClass:
    residue: tuple[int, ...]
    rep: tuple[int, ...]
    self_conjugate: bool
    wu: tuple[int, ...] | None

    def to_dict(self) -> dict:
        return {"rep": list(self.rep), "self_conjugate": self.self_conjugate,
                "wu": list(self.wu) if self.wu is not None else None}

    @property
    def representative(self) -> CharVector:
        return CharVector(self.rep)


def _wu_of(g: PlumbingGraph, k: Sequence[int]) -> tuple[int, ...]:
    Minv = _GraphData.of(g).Minv
    c = [sum(Minv[i][j] * k[j] for j in range(g.n)) for i in range(g.n)]
    if any(x.denominator != 1 for x in c):
        raise NotSelfConjugate("class is not self-conjugate")
    w = tuple(int(x) % 2 for x in c)
    Mw = mat_vec(g.matrix, w)
    assert all((a - f) % 2 == 0 for a, f in zip(Mw, g.framings))
    return w


def _best_representative(g: PlumbingGraph, k: Sequence[int]) -> tuple[int, ...]:
    lat = ClassLattice(g, k)
    top = lat.max_weight()
    # first level of the class coset not above the maximum
    h = lat.w0 + ((top - lat.w0) // 2) * 2
    while True:
        pts = lat.points_above(h)
        if pts:
            best = max(lat.f(y) for y in pts)
            return min(lat.k_of(y) for y in pts if lat.f(y) == best)
        h -= 2


def make_class(g: PlumbingGraph, k) -> SpinCClass:
    vals = _values(k)
    for v, f in zip(vals, g.framings):
        if (v - f) % 2:
            raise ValueError("not a characteristic vector")
    rep = _best_representative(g, vals)
    res = class_residue(g, rep)
    sc = class_residue(g, [-x for x in rep]) == res
    wu = _wu_of(g, rep) if sc else None
    return SpinCClass(res, rep, sc, wu)


def enumerate_spinc_classes(g: PlumbingGraph) -> list[SpinCClass]:
    data = _GraphData.of(g)
    size = abs(data.det)
    # the group Z^n / M Z^n has order prod(invariant factors) = |det M|
    assert prod(smith_invariants(data.M)) == size
    H = data.latticeM
    k0 = [f % 2 for f in g.framings]
    residues = {}
    for y in product(*[range(H[t][t]) for t in range(g.n)]):
        k = [a + 2 * b for a, b in zip(k0, y)]
        residues.setdefault(class_residue(g, k), k)
    assert len(residues) == size
    classes = [make_class(g, k) for k in residues.values()]
    classes.sort(key=lambda c: (not c.self_conjugate, c.residue))
    return classes


def is_self_conjugate(g: PlumbingGraph, c: SpinCClass) -> bool:
    return class_residue(g, [-x for x in c.rep]) == class_residue(g, c.rep)


def wu_element(g: PlumbingGraph, c: SpinCClass) -> tuple[int, ...]:
    if not is_self_conjugate(g, c):
        raise NotSelfConjugate("Wu element requires a self-conjugate class")
    return _wu_of(g, c.rep)


def neumann_siebenmann(g: PlumbingGraph, c: SpinCClass) -> Fraction:
    w = wu_element(g, c)
    M = g.matrix
    wsq = sum(w[i] * M[i][j] * w[j] for i in range(g.n) for j in range(g.n))
    return Fraction(-g.n - wsq, 8)


def wu_cube(g: PlumbingGraph, c: SpinCClass) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The J-invariant cube: base vector sum(-w_i v_i*) and its directions.

    Its vertices are sum(eps_i w_i v_i*) with eps_i = +-1, i.e. the base plus
    2 v_i* moves along the Wu directions.
    """
    w = wu_element(g, c)
    M = g.matrix
    base = tuple(-sum(M[i][j] * w[j] for j in range(g.n)) for i in range(g.n))
    dirs = tuple(i for i in range(g.n) if w[i])
    return base, dirs


def class_of_k(g: PlumbingGraph, classes: Sequence[SpinCClass], k) -> SpinCClass:
    res = class_residue(g, k)
    for c in classes:
        if c.residue == res:
            return c
    raise KeyError("no matching class")
