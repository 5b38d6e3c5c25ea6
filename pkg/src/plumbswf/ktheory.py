"""Arithmetic in R(Pin(2)) = Z[z, w]/(2w - zw, w^2 - 2w) and R(S^1), the
K-theory ideals of A_n and of smash products, and kappa.

Every element has the normal form p(z) + a*w: since zw = 2w, a polynomial
acts on w through its value at z = 2.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Sequence

from .errors import ExactHypothesisViolated, HypothesisViolated, NotNormalized, NotProjective, ParseError
from .intlin import hnf, integer_kernel, lattice_contains


def _trim(p: Sequence[int]) -> tuple[int, ...]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _peval(p: Sequence[int], x: int) -> int:
    v = 0
    for c in reversed(p):
        v = v * x + c
    return v


def _pmul(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return _trim(out)


def _padd(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


@dataclass(frozen=True)
class RGElement:
    """p(z) + a*w, with p as a coefficient tuple (constant term first)."""

    p: tuple[int, ...] = ()
    a: int = 0

    def __post_init__(self):
        object.__setattr__(self, "p", _trim(self.p))

    @classmethod
    def z_power(cls, t: int) -> "RGElement":
        return cls((0,) * t + (1,))

    @classmethod
    def const(cls, c: int) -> "RGElement":
        return cls((c,))

    W = None  # set below

    def __add__(self, other) -> "RGElement":
        other = _coerce(other)
        return RGElement(_padd(self.p, other.p), self.a + other.a)

    __radd__ = __add__

    def __neg__(self) -> "RGElement":
        return RGElement(tuple(-c for c in self.p), -self.a)

    def __sub__(self, other) -> "RGElement":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "RGElement":
        return _coerce(other) - self

    def __mul__(self, other) -> "RGElement":
        o = _coerce(other)
        a = self.a * _peval(o.p, 2) + o.a * _peval(self.p, 2) + 2 * self.a * o.a
        return RGElement(_pmul(self.p, o.p), a)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RGElement":
        if k < 0:
            raise ValueError("negative power")
        out = RGElement((1,))
        for _ in range(k):
            out = out * self
        return out

    @property
    def degree(self) -> int:
        return len(self.p) - 1

    def __str__(self) -> str:
        terms = []
        for t in range(len(self.p) - 1, -1, -1):
            c = self.p[t]
            if not c:
                continue
            mono = "" if t == 0 else ("z" if t == 1 else f"z^{t}")
            if mono:
                coef = "" if c == 1 else "-" if c == -1 else str(c)
                terms.append(f"{coef}{mono}")
            else:
                terms.append(str(c))
        if self.a:
            terms.append("w" if self.a == 1 else "-w" if self.a == -1 else f"{self.a}w")
        if not terms:
            return "0"
        s = terms[0]
        for t in terms[1:]:
            s += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return s


RGElement.W = RGElement((), 1)


def _coerce(x) -> RGElement:
    if isinstance(x, RGElement):
        return x
    if isinstance(x, int):
        return RGElement((x,))
    raise TypeError(f"cannot use {x!r} in R(Pin(2))")


def rg_normalize(expr) -> RGElement:
    """Normal form of an expression in z, w and integers (+, -, *, ^ or **)."""
    if isinstance(expr, RGElement):
        return expr
    if isinstance(expr, int):
        return RGElement((expr,))
    text = str(expr).replace("^", "**")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as e:
        raise ParseError(f"bad expression: {e.msg}", f"col {e.offset}") from None

    def ev(node) -> RGElement:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return RGElement((node.value,))
        if isinstance(node, ast.Name):
            if node.id == "z":
                return RGElement((0, 1))
            if node.id == "w":
                return RGElement.W
            raise ParseError(f"unknown symbol {node.id!r}", f"col {node.col_offset + 1}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                e = node.right
                if not (isinstance(e, ast.Constant) and isinstance(e.value, int) and e.value >= 0):
                    raise ParseError("exponents must be non-negative integers", f"col {e.col_offset + 1}")
                return ev(node.left) ** e.value
            ops = {ast.Add: RGElement.__add__, ast.Sub: RGElement.__sub__, ast.Mult: RGElement.__mul__}
            for k, f in ops.items():
                if isinstance(node.op, k):
                    return f(ev(node.left), ev(node.right))
        raise ParseError(f"unsupported syntax {type(node).__name__}", f"col {getattr(node, 'col_offset', 0) + 1}")

    return ev(tree)


# ---------------------------------------------------------------------------
# R(S^1)


@dataclass(frozen=True)
class LaurentPoly:
    """Finite-support integer Laurent polynomial in theta."""

    coeffs: tuple[tuple[int, int], ...]  # sorted (exponent, coefficient), nonzero only

    @classmethod
    def of(cls, d: dict[int, int]) -> "LaurentPoly":
        return cls(tuple(sorted((k, v) for k, v in d.items() if v)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.coeffs)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        d = self.as_dict()
        for k, v in other.coeffs:
            d[k] = d.get(k, 0) + v
        return LaurentPoly.of(d)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        d: dict[int, int] = {}
        for k1, v1 in self.coeffs:
            for k2, v2 in other.coeffs:
                d[k1 + k2] = d.get(k1 + k2, 0) + v1 * v2
        return LaurentPoly.of(d)

    def scale(self, c: int) -> "LaurentPoly":
        return LaurentPoly.of({k: c * v for k, v in self.coeffs})

    def __pow__(self, t: int) -> "LaurentPoly":
        out = LaurentPoly.of({0: 1})
        for _ in range(t):
            out = out * self
        return out

    def divisible_by_c_power(self, n: int) -> bool:
        """Whether (1 - theta)^n divides this element."""
        if not self.coeffs or n == 0:
            return True
        low = self.coeffs[0][0]
        return not any(_rem_mod_c_power([(k - low, v) for k, v in self.coeffs], n))


def _rem_mod_c_power(terms: Sequence[tuple[int, int]], n: int) -> list[int]:
    """Remainder of sum v*theta^k (k >= 0) modulo the monic (theta - 1)^n."""
    deg = max((k for k, _ in terms), default=0)
    p = [0] * (max(deg, n) + 1)
    for k, v in terms:
        p[k] += v
    m = [1]
    for _ in range(n):
        m = [0] + m
        for i in range(len(m) - 1):
            m[i] -= m[i + 1]
    for top in range(len(p) - 1, n - 1, -1):
        c = p[top]
        if c:
            for i in range(n + 1):
                p[top - n + i] -= c * m[i]
    return p[:n]


def restriction_r(x) -> LaurentPoly:
    """Ring map to R(S^1): z -> 2 - theta - theta^{-1}, w -> 0."""
    x = rg_normalize(x)
    rz = LaurentPoly.of({0: 2, 1: -1, -1: -1})
    out = LaurentPoly.of({})
    for t, c in enumerate(x.p):
        if c:
            out = out + (rz ** t).scale(c)
    return out


# ---------------------------------------------------------------------------
# ideals


class RGIdeal:
    """Finitely generated ideal of R(Pin(2)).

    As a Z-module it is spanned by z^k g_i (k >= 0) and (p_i(2) + 2 a_i) w,
    so membership is an integer lattice question in a truncated window.
    """

    def __init__(self, gens: Sequence):
        self.gens = tuple(rg_normalize(g) for g in gens)
        self._bases: dict[int, list[list[int]]] = {}

    def __repr__(self) -> str:
        return "(" + ", ".join(str(g) for g in self.gens) + ")"

    @property
    def max_degree(self) -> int:
        return max((g.degree for g in self.gens), default=0)

    def basis(self, window: int) -> list[list[int]]:
        """Hermite basis of the degree <= window part; vectors are
        (z^0..z^window coefficients, w coefficient)."""
        B = self._bases.get(window)
        if B is None:
            rows = []
            for g in self.gens:
                if g.p:
                    for k in range(window - g.degree + 1):
                        zk = RGElement.z_power(k) * g
                        rows.append(list(zk.p) + [0] * (window + 1 - len(zk.p)) + [zk.a])
                else:
                    rows.append([0] * (window + 1) + [g.a])
                rows.append([0] * (window + 1) + [_peval(g.p, 2) + 2 * g.a])
            B = hnf(rows, window + 2) if rows else []
            self._bases[window] = B
        return B

    def window_for(self, x: RGElement) -> int:
        return self.max_degree + max(x.degree, 0) + 1

    def contains(self, x, window: int | None = None) -> bool:
        x = rg_normalize(x)
        W = self.window_for(x) if window is None else window
        if x.degree > W:
            return False
        v = list(x.p) + [0] * (W + 1 - len(x.p)) + [x.a]
        return lattice_contains(self.basis(W), v)

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def same_as(self, other: "RGIdeal", window: int | None = None) -> bool:
        W = window if window is not None else max(self.max_degree, other.max_degree) + 2
        return self.basis(W) == other.basis(W)


def ideal_contains(I: RGIdeal, x) -> bool:
    return I.contains(x)


def _closed_form_An(n: int) -> RGIdeal:
    return RGIdeal([RGElement.z_power(ceil(n / 2)), RGElement.W])


def divisibility_lattice(n: int, D: int) -> list[list[int]]:
    """Hermite basis of {p in Z[z], deg p <= D : (1 - theta)^n divides r(p)}."""
    # column t: theta^D r(z^t) reduced modulo (theta - 1)^n
    cols = []
    for t in range(D + 1):
        r = restriction_r(RGElement.z_power(t))
        pairs = [(k + D, v) for k, v in r.coeffs]
        cols.append(_rem_mod_c_power(pairs, n) if n else [])
    if n == 0:
        return hnf([[int(i == j) for j in range(D + 1)] for i in range(D + 1)])
    A = [[cols[t][i] for t in range(D + 1)] for i in range(n)]
    return hnf(integer_kernel(A, D + 1), D + 1)


def ideal_of_An(n: int, window: int | None = None) -> RGIdeal:
    """K-theory ideal of A_n, computed by divisibility and checked against
    the closed form (z^ceil(n/2), w)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    D = window if window is not None else n + 2
    computed = divisibility_lattice(n, D)
    # the ideal also contains all of Z w, since r(w) = 0
    closed = _closed_form_An(n)
    zpart = [row[:D + 1] for row in closed.basis(D) if any(row[:D + 1])]
    if hnf(zpart, D + 1) != computed:
        raise AssertionError(f"divisibility ideal of A_{n} disagrees with the closed form")
    if not closed.contains(RGElement.W):
        raise AssertionError("w must lie in the ideal")
    return closed


def ideal_of_smash(ns: Sequence[int]) -> RGIdeal:
    ns = [int(x) for x in ns]
    problems = []
    if len(ns) % 2:
        problems.append("n odd")
    if any(x % 2 for x in ns):
        problems.append("some n_i odd")
    if any(x < 2 for x in ns):
        problems.append("some n_i < 2")
    if problems:
        raise HypothesisViolated("; ".join(problems))
    k = len(ns) // 2
    return RGIdeal([RGElement.z_power(sum(ns) // 2), RGElement((), 2 ** (k - 1))])


def ideal_shape(I: RGIdeal) -> tuple[int, int]:
    """(s, j) with I = (z^s, 2^j w); NotNormalized otherwise."""
    s = next((t for t in range(I.max_degree + 1) if I.contains(RGElement.z_power(t))), None)
    if s is None:
        raise NotNormalized("no power of z lies in the ideal")
    j = next((t for t in range(64) if I.contains(RGElement((), 2 ** t))), None)
    if j is None:
        raise NotNormalized("no 2-power multiple of w lies in the ideal")
    model = RGIdeal([RGElement.z_power(s), RGElement((), 2 ** j)])
    W = max(I.max_degree, s) + 2
    if not model.same_as(I, W):
        raise NotNormalized(f"ideal {I!r} is not of the form (z^s, 2^j w)")
    return s, j


def kappa_from_ideal(I: RGIdeal) -> int:
    s, j = ideal_shape(I)
    t = min(s, j + 1)
    return 2 * t


def ideal_json(I: RGIdeal) -> dict:
    s, j = ideal_shape(I)
    return {"z_power": s, "w_gen": f"2^{j} w"}


# ---------------------------------------------------------------------------
# kappa of roots and connected sums


def kappa_report(delta_val, mu_bar) -> int | Fraction:
    """kappa of an almost-rational manifold from delta and mu-bar.

    Integral answers come back as int; rational homology spheres can give a
    Fraction.
    """
    m = -Fraction(mu_bar)
    k = m if m == Fraction(delta_val) else m + 2
    return int(k) if k.denominator == 1 else k


@dataclass(frozen=True)
class SummandData:
    mu_bar: Fraction
    delta: Fraction
    n: int | None  # projective parameter, None if not projective


def _summands(inputs) -> list[SummandData]:
    out = []
    for x in inputs:
        if isinstance(x, SummandData):
            s = x
        else:
            mu, dl, n = x
            s = SummandData(Fraction(mu), Fraction(dl), None if n is None else int(n))
        if s.n is None:
            raise NotProjective("a summand is not projective")
        if s.n < 0 or s.n != s.delta + s.mu_bar:
            raise NotProjective("projective parameter must equal delta + mu-bar")
        out.append(s)
    return out


def kappa_connected_sum(inputs, mode: str = "bound") -> int:
    """Upper bound (mode 'bound') or exact value (mode 'exact') of kappa for a
    connected sum of projective almost-rational summands."""
    S = _summands(inputs)
    k = len(S)
    total = -sum(s.mu_bar for s in S)
    if total.denominator != 1:
        raise ValueError("kappa needs an integral sum of mu-bars")
    if mode == "bound":
        return int(total) + 2 * ceil(k / 2)
    if mode == "exact":
        bad = []
        if k % 2:
            bad.append("number of summands is odd")
        if any(s.n < 2 for s in S):
            bad.append("some summand has delta + mu-bar < 2")
        if bad:
            raise ExactHypothesisViolated("; ".join(bad))
        return int(total) + k
    raise ValueError(f"unknown mode {mode!r}")
