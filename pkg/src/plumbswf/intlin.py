"""Exact integer linear algebra: Bareiss elimination, Hermite and Smith forms,
integer kernels, and a sparse unit-pivot Smith reduction for large boundary
matrices.

Matrices are lists of rows of Python ints; nothing here touches floats.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterable, Sequence

Matrix = list[list[int]]


def copy_matrix(A: Sequence[Sequence[int]]) -> Matrix:
    return [list(map(int, row)) for row in A]


def bareiss_leading_minors(A: Sequence[Sequence[int]]) -> list[int]:
    """Leading principal minors of a square matrix by fraction-free elimination.

    No pivoting is done, so the k-th pivot is exactly the k-th leading minor.
    If a minor vanishes the elimination cannot continue and the remaining
    entries are reported as 0.
    """
    n = len(A)
    M = copy_matrix(A)
    minors: list[int] = []
    prev = 1
    for k in range(n):
        piv = M[k][k]
        minors.append(piv)
        if piv == 0:
            minors.extend([0] * (n - k - 1))
            return minors
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * piv - M[i][k] * M[k][j]) // prev
        prev = piv
    return minors


def determinant(A: Sequence[Sequence[int]]) -> int:
    """Bareiss determinant with row pivoting."""
    n = len(A)
    if n == 0:
        return 1
    M = copy_matrix(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        piv = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * piv - M[i][k] * M[k][j]) // prev
        prev = piv
    return sign * M[n - 1][n - 1]


def inverse(A: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Exact inverse over the rationals (Gauss-Jordan)."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[p] = M[p], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def adjugate(A: Sequence[Sequence[int]]) -> tuple[Matrix, int]:
    """Integer adjugate and determinant, so that A^{-1} = adj / det."""
    det = determinant(A)
    inv = inverse(A)
    adj = [[int(x * det) for x in row] for row in inv]
    return adj, det


def mat_vec(A: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, v)) for row in A]


def _row_echelon(rows: Matrix, ncols: int, transform: Matrix | None = None) -> int:
    """In-place integer row echelon form restricted to the first ``ncols`` columns.

    Returns the rank.  Pivots are made positive and entries above each pivot are
    reduced into [0, pivot).  If ``transform`` is given, the same unimodular row
    operations are applied to it.
    """
    m = len(rows)
    r = 0
    pivots = []
    for c in range(ncols):
        if r >= m:
            break
        while True:
            best = None
            for i in range(r, m):
                v = rows[i][c]
                if v != 0 and (best is None or abs(v) < abs(rows[best][c])):
                    best = i
            if best is None:
                break
            if best != r:
                rows[r], rows[best] = rows[best], rows[r]
                if transform is not None:
                    transform[r], transform[best] = transform[best], transform[r]
            piv = rows[r][c]
            done = True
            for i in range(r + 1, m):
                v = rows[i][c]
                if v != 0:
                    q = v // piv
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
                    if transform is not None:
                        transform[i] = [a - q * b for a, b in zip(transform[i], transform[r])]
                    if rows[i][c] != 0:
                        done = False
            if done:
                break
        if r < m and rows[r][c] != 0:
            if rows[r][c] < 0:
                rows[r] = [-a for a in rows[r]]
                if transform is not None:
                    transform[r] = [-a for a in transform[r]]
            piv = rows[r][c]
            for i in range(r):
                q = rows[i][c] // piv
                if q:
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
                    if transform is not None:
                        transform[i] = [a - q * b for a, b in zip(transform[i], transform[r])]
            pivots.append(c)
            r += 1
    return r


def hnf(rows: Iterable[Sequence[int]], ncols: int | None = None) -> Matrix:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    The result lists the nonzero rows only; it is unique for the lattice.
    """
    R = copy_matrix(rows)
    if not R:
        return []
    if ncols is None:
        ncols = len(R[0])
    rank = _row_echelon(R, ncols)
    return R[:rank]


def lattice_coordinates(basis: Matrix, v: Sequence[int]) -> list[int] | None:
    """Coefficients expressing ``v`` in an HNF basis, or None if v is outside."""
    v = list(v)
    coeffs = []
    col = 0
    for row in basis:
        while row[col] == 0:
            if v[col] != 0:
                return None
            col += 1
        q, rem = divmod(v[col], row[col])
        if rem:
            return None
        coeffs.append(q)
        if q:
            v = [a - q * b for a, b in zip(v, row)]
        col += 1
    if any(v):
        return None
    return coeffs


def lattice_contains(basis: Matrix, v: Sequence[int]) -> bool:
    return lattice_coordinates(basis, v) is not None


def integer_kernel(A: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    """A Z-basis of {x in Z^n : A x = 0}, one basis vector per row."""
    m = len(A)
    n = ncols if ncols is not None else (len(A[0]) if m else 0)
    if n == 0:
        return []
    # rows of A^T, echelonised with a tracked transform
    At = [[A[i][j] for i in range(m)] for j in range(n)]
    T = [[int(i == j) for j in range(n)] for i in range(n)]
    rank = _row_echelon(At, m, T)
    return [T[i] for i in range(rank, n)]


def extended_gcd(values: Sequence[int]) -> tuple[int, list[int]]:
    """gcd g >= 0 and coefficients u with sum(u_i * values_i) = g."""
    g = 0
    coeffs = [0] * len(values)
    for idx, a in enumerate(values):
        if a == 0:
            continue
        # combine g with a
        old_r, r = g, a
        old_s, s = 1, 0
        old_t, t = 0, 1
        while r != 0:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
            old_t, t = t, old_t - q * t
        coeffs = [c * old_s for c in coeffs]
        coeffs[idx] = old_t
        g = old_r
        if g < 0:
            g = -g
            coeffs = [-c for c in coeffs]
    return g, coeffs


def smith_invariants(A: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero invariant factors of a dense integer matrix (d_1 | d_2 | ...)."""
    M = copy_matrix(A)
    m = len(M)
    n = len(M[0]) if m else 0
    diag = []
    t = 0
    while t < m and t < n:
        # pick smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = M[i][j]
                if v != 0 and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        M[t], M[i] = M[i], M[t]
        for row in M:
            row[t], row[j] = row[j], row[t]
        while True:
            piv = M[t][t]
            clean = True
            for i in range(t + 1, m):
                if M[i][t]:
                    q = M[i][t] // piv
                    M[i] = [a - q * b for a, b in zip(M[i], M[t])]
                    if M[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if M[t][j]:
                    q = M[t][j] // piv
                    for row in M:
                        row[j] -= q * row[t]
                    if M[t][j]:
                        clean = False
            if clean:
                # divisibility condition for the rest of the block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if M[i][j] % piv:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                M[t] = [a + b for a, b in zip(M[t], M[bad])]
                continue
            # move a smaller remainder into the pivot position
            best = None
            for i in range(t, m):
                if M[i][t] and (best is None or abs(M[i][t]) < abs(M[best][t])):
                    best = i
            M[t], M[best] = M[best], M[t]
            bestj = None
            for j in range(t, n):
                if M[t][j] and (bestj is None or abs(M[t][j]) < abs(M[t][bestj])):
                    bestj = j
            for row in M:
                row[t], row[bestj] = row[bestj], row[t]
        diag.append(abs(M[t][t]))
        t += 1
    return diag


class SparseReduction:
    """Smith reduction of a sparse integer matrix given by columns.

    Unit pivots are eliminated greedily (each one is an invariant factor 1);
    whatever survives is handed to the dense Smith routine.  Returns rank and
    the invariant factors larger than 1.
    """

    def __init__(self, columns: Sequence[dict[int, int]]):
        self.cols = [dict(c) for c in columns]
        self.rows: dict[int, set[int]] = {}
        for j, col in enumerate(self.cols):
            for i in col:
                self.rows.setdefault(i, set()).add(j)

    def run(self) -> tuple[int, list[int]]:
        cols, rows = self.cols, self.rows
        alive = set(j for j, c in enumerate(cols) if c)
        heap = [(len(cols[j]), j) for j in alive]
        heapq.heapify(heap)
        rank = 0
        stuck: set[int] = set()
        while heap:
            size, j = heapq.heappop(heap)
            if j not in alive:
                continue
            col = cols[j]
            if size != len(col):
                if col:
                    heapq.heappush(heap, (len(col), j))
                else:
                    alive.discard(j)
                continue
            piv_row = None
            best = None
            for i, v in col.items():
                if v == 1 or v == -1:
                    load = len(rows[i])
                    if best is None or load < best:
                        best, piv_row = load, i
            if piv_row is None:
                stuck.add(j)
                continue
            val = col[piv_row]
            for j2 in list(rows[piv_row]):
                if j2 == j:
                    continue
                col2 = cols[j2]
                f = col2[piv_row] * val
                for i, v in col.items():
                    nv = col2.get(i, 0) - f * v
                    if nv:
                        if i not in col2:
                            rows[i].add(j2)
                        col2[i] = nv
                    elif i in col2:
                        del col2[i]
                        rows[i].discard(j2)
                if j2 in stuck:
                    stuck.discard(j2)
                if col2:
                    heapq.heappush(heap, (len(col2), j2))
                else:
                    alive.discard(j2)
            for i in col:
                rows[i].discard(j)
            del rows[piv_row]
            cols[j] = {}
            alive.discard(j)
            rank += 1
        rest = [j for j in alive if cols[j]]
        torsion: list[int] = []
        if rest:
            row_ids = sorted(set(i for j in rest for i in cols[j]))
            pos = {i: k for k, i in enumerate(row_ids)}
            dense = [[0] * len(rest) for _ in row_ids]
            for c, j in enumerate(rest):
                for i, v in cols[j].items():
                    dense[pos[i]][c] = v
            inv = smith_invariants(dense)
            rank += len(inv)
            torsion = [d for d in inv if d > 1]
        return rank, torsion


def sparse_smith(columns: Sequence[dict[int, int]]) -> tuple[int, list[int]]:
    return SparseReduction(columns).run()
