from fractions import Fraction
from functools import reduce
from math import gcd

import pytest
import sympy
from hypothesis import assume, given, strategies as st
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_form

from plumbswf.intlin import (
    adjugate,
    determinant,
    extended_gcd,
    hnf,
    integer_kernel,
    inverse,
    lattice_contains,
    lattice_coordinates,
    smith_invariants,
    sparse_smith,
)

small = st.integers(-6, 6)


def matrices(rows=st.integers(1, 4), cols=st.integers(1, 4)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(small, min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0]))


def square(n=st.integers(1, 4)):
    return n.flatmap(lambda k: st.lists(st.lists(small, min_size=k, max_size=k), min_size=k, max_size=k))


@given(square())
def test_determinant_matches_sympy(A):
    assert determinant(A) == sympy.Matrix(A).det()


@given(square())
def test_inverse_and_adjugate(A):
    d = determinant(A)
    assume(d != 0)
    adj, dd = adjugate(A)
    assert dd == d
    n = len(A)
    prod = [[sum(A[i][k] * adj[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    assert prod == [[d * (i == j) for j in range(n)] for i in range(n)]
    inv = inverse(A)
    one = [[sum(Fraction(A[i][k]) * inv[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    assert one == [[int(i == j) for j in range(n)] for i in range(n)]


def test_inverse_of_singular_matrix_raises():
    with pytest.raises(ZeroDivisionError):
        inverse([[1, 2], [2, 4]])


@given(matrices())
def test_smith_matches_sympy(A):
    ours = smith_invariants(A)
    S = smith_normal_form(sympy.Matrix(A), domain=sympy.ZZ)
    theirs = sorted(abs(S[i, i]) for i in range(min(S.shape)) if S[i, i] != 0)
    assert sorted(ours) == theirs
    for a, b in zip(ours, ours[1:]):
        assert b % a == 0


@given(matrices())
def test_sparse_smith_matches_dense(A):
    cols = [{i: A[i][j] for i in range(len(A)) if A[i][j]} for j in range(len(A[0]))]
    rank, torsion = sparse_smith(cols)
    inv = smith_invariants(A)
    assert rank == len(inv)
    assert sorted(torsion) == sorted(d for d in inv if d > 1)


@given(matrices())
def test_hnf_same_lattice_as_sympy(A):
    ncols = len(A[0])
    H = hnf(A, ncols)
    M = sympy.Matrix(A)
    if M.rank() == 0:
        assert H == []
        return
    # sympy works with column lattices; transpose to compare row lattices
    S = hermite_normal_form(M.T)
    rows = [list(S[:, j]) for j in range(S.shape[1])]
    assert hnf([[int(x) for x in r] for r in rows], ncols) == H


@given(matrices(), st.lists(small, min_size=4, max_size=4))
def test_lattice_membership(A, coeffs):
    ncols = len(A[0])
    H = hnf(A, ncols)
    v = [sum(c * row[j] for c, row in zip(coeffs, A)) for j in range(ncols)]
    assert lattice_contains(H, v)
    co = lattice_coordinates(H, v)
    assert [sum(c * row[j] for c, row in zip(co, H)) for j in range(ncols)] == v


def test_membership_rejects():
    H = hnf([[2, 0], [0, 3]])
    assert not lattice_contains(H, [1, 0])
    assert lattice_contains(H, [4, -3])


@given(matrices())
def test_integer_kernel(A):
    n = len(A[0])
    K = integer_kernel(A, n)
    for row in K:
        assert all(sum(a * x for a, x in zip(r, row)) == 0 for r in A)
    assert len(K) == n - sympy.Matrix(A).rank()


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=5))
def test_extended_gcd(vals):
    g, u = extended_gcd(vals)
    assert g == reduce(gcd, vals, 0)
    assert sum(a * b for a, b in zip(u, vals)) == g


def test_smith_known():
    assert smith_invariants([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]
    assert smith_invariants([[0, 0], [0, 0]]) == []


@pytest.mark.parametrize("A,d", [([[-2, 1], [1, -2]], 3), ([[-1]], -1)])
def test_determinant_examples(A, d):
    assert determinant(A) == d
