import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fixtures import all_fixtures
from plumbswf.errors import NotSelfConjugate
from plumbswf.plumbing import PlumbingGraph, determinant, e8_graph, from_brieskorn
from plumbswf.spinc import (
    ClassLattice,
    char_square,
    char_vector,
    class_residue,
    enumerate_spinc_classes,
    is_self_conjugate,
    make_class,
    neumann_siebenmann,
    same_class,
    weight,
    wu_cube,
    wu_element,
)

FIX = all_fixtures()


def test_weight_examples():
    g1 = PlumbingGraph([(0, -1)])
    assert char_square(g1, [1]) == -1 and weight(g1, [1]) == 0
    assert char_square(g1, [3]) == -9 and weight(g1, [-3]) == -2
    assert char_square(e8_graph(), [0] * 8) == 0
    assert weight(e8_graph(), [0] * 8) == 2


def test_char_vector_parity():
    g = PlumbingGraph([(0, -2)])
    char_vector(g, [2])
    with pytest.raises(ValueError):
        char_vector(g, [1])


@pytest.mark.parametrize("name", sorted(FIX))
def test_class_count_is_det(name):
    g = FIX[name]
    classes = enumerate_spinc_classes(g)
    assert len(classes) == abs(determinant(g))
    assert len({c.residue for c in classes}) == len(classes)


def test_minus_two_classes():
    g = PlumbingGraph([(0, -2)])
    classes = enumerate_spinc_classes(g)
    assert sorted(c.rep for c in classes) == [(-2,), (0,)] or sorted(abs(c.rep[0]) for c in classes) == [0, 2]
    assert all(c.self_conjugate for c in classes)
    zero = make_class(g, [0])
    assert wu_element(g, zero) == (0,)
    assert neumann_siebenmann(g, zero) == Fraction(-1, 8)


def test_single_class_examples():
    (c,) = enumerate_spinc_classes(PlumbingGraph([(0, -1)]))
    assert abs(c.rep[0]) == 1
    (c8,) = enumerate_spinc_classes(e8_graph())
    assert c8.self_conjugate and c8.wu == (0,) * 8
    assert neumann_siebenmann(e8_graph(), c8) == -1


def test_s237_wu_and_mu_bar():
    g = from_brieskorn([2, 3, 7])
    (c,) = enumerate_spinc_classes(g)
    assert wu_element(g, c) == (0, 1, 1, 1)
    assert neumann_siebenmann(g, c) == 1


def test_wu_requires_self_conjugate():
    g = FIX["chain22"]
    bad = [c for c in enumerate_spinc_classes(g) if not c.self_conjugate]
    assert bad
    with pytest.raises(NotSelfConjugate):
        wu_element(g, bad[0])
    assert not is_self_conjugate(g, bad[0])


@pytest.mark.parametrize("name", sorted(FIX))
def test_wu_solves_mod_two_system(name):
    g = FIX[name]
    M = g.matrix
    for c in enumerate_spinc_classes(g):
        if c.self_conjugate:
            w = c.wu
            assert all((sum(M[i][j] * w[j] for j in range(g.n)) - M[i][i]) % 2 == 0 for i in range(g.n))


@pytest.mark.parametrize("name", sorted(FIX))
def test_weight_symmetric_and_edges_even(name):
    g = FIX[name]
    for c in enumerate_spinc_classes(g):
        k = list(c.rep)
        assert weight(g, k) == weight(g, [-x for x in k])
        for v in range(g.n):
            k2 = [a + 2 * m for a, m in zip(k, [row[v] for row in g.matrix])]
            diff = weight(g, k2) - weight(g, k)
            assert diff == k[v] + g.matrix[v][v]
            assert diff.denominator == 1 and diff % 2 == 0
            assert same_class(g, k, k2)


def _box_points(lat, h, R):
    T = lat.level_threshold(h)
    return sorted(y for y in itertools.product(range(-R, R + 1), repeat=lat.n) if lat.f(y) >= T)


@pytest.mark.parametrize("name,h,R", [("s3", -6, 4), ("minus2", -3, 4), ("chain22", -4, 4),
                                       ("s237", 0, 11), ("seifert_qhs", -2, 4)])
def test_points_above_matches_box(name, h, R):
    g = FIX[name]
    for c in enumerate_spinc_classes(g):
        lat = ClassLattice(g, c.rep)
        pts = lat.points_above(h)
        assert pts == _box_points(lat, h, R)
        # the box is large enough: nothing sits on its boundary
        assert all(max(abs(x) for x in y) < R for y in pts)


def test_superlevel_examples():
    lat = ClassLattice(PlumbingGraph([(0, -1)]), [1])
    ks = sorted(lat.k_of(y)[0] for y in lat.points_above(-2))
    assert ks == [-3, -1, 1, 3]
    assert sorted(lat.k_of(y)[0] for y in lat.points_above(0)) == [-1, 1]
    e8 = ClassLattice(e8_graph(), [0] * 8)
    assert [e8.k_of(y) for y in e8.points_above(2)] == [(0,) * 8]


@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_y_coordinates_round_trip(y):
    g = from_brieskorn([2, 3, 7])
    (c,) = enumerate_spinc_classes(g)
    lat = ClassLattice(g, c.rep)
    k = lat.k_of(y)
    assert lat.y_of(k) == tuple(y)
    assert lat.weight(y) == weight(g, k)
    assert class_residue(g, k) == c.residue


@pytest.mark.parametrize("name", sorted(FIX))
def test_wu_cube_constant_weight(name):
    g = FIX[name]
    for c in enumerate_spinc_classes(g):
        if not c.self_conjugate:
            continue
        base, dirs = wu_cube(g, c)
        assert same_class(g, base, c.rep)
        ws = set()
        for eps in itertools.product((0, 1), repeat=len(dirs)):
            k = list(base)
            for e, v in zip(eps, dirs):
                if e:
                    k = [a + 2 * row[v] for a, row in zip(k, g.matrix)]
            ws.add(weight(g, k))
        assert len(ws) == 1
