import json
from dataclasses import replace
from fractions import Fraction

import pytest

from fixtures import BLOWN_UP_BASES, all_fixtures, graph
from plumbswf.invariants import FAIL, NA, PASS, InvariantReport, analyze, graph_hash, verify_report
from plumbswf.plumbing import PlumbingGraph, blow_down, blow_up_leaf, e8_graph, from_brieskorn
from plumbswf.spinc import enumerate_spinc_classes

FIX = all_fixtures()


def _status(checks):
    return {c.name: c.status for c in checks}


def test_e8_report():
    r = analyze(e8_graph(), oracle=True)
    assert (r.d, r.delta, r.alpha, r.beta, r.gamma, r.mu_bar, r.kappa) == (2, 1, 1, 1, 1, -1, 1)
    assert r.projective == (0, 2)
    assert r.root.leaf_gradings == [2]
    assert all(c.status == PASS for c in r.checks)
    assert all(c.status == PASS for c in verify_report(r))


def test_s237_report():
    r = analyze(from_brieskorn([2, 3, 7]), oracle=True)
    assert (r.d, r.delta, r.alpha, r.beta, r.gamma, r.mu_bar, r.kappa) == (0, 0, 1, -1, -1, 1, 1)
    assert r.projective == (1, -2)


def test_s3_report():
    r = analyze(PlumbingGraph([(0, -1)]))
    assert (r.d, r.delta, r.alpha, r.beta, r.gamma, r.mu_bar, r.kappa) == (0, 0, 0, 0, 0, 0, 0)


def test_tampered_kappa_fails():
    r = analyze(from_brieskorn([2, 3, 7]))
    bad = replace(r, kappa=5)
    st = _status(verify_report(bad))
    assert st["kappa_dichotomy"] == FAIL and st["kappa_rule"] == FAIL
    assert st["root_recomputed"] == PASS


def test_tampered_root_fails():
    r = analyze(from_brieskorn([2, 3, 13]))
    other = analyze(from_brieskorn([2, 3, 7])).root
    st = _status(verify_report(replace(r, root=other), oracle=False))
    assert st["root_recomputed"] == FAIL


def test_non_self_conjugate_class_is_na():
    g = FIX["chain22"]
    c = [c for c in enumerate_spinc_classes(g) if not c.self_conjugate][0]
    r = analyze(g, c, oracle=True)
    assert r.kappa is None and r.mu_bar is None and r.beta is None
    assert r.d == 2 * r.delta == Fraction(-1, 6)
    st = _status(verify_report(r))
    for name in ("kappa_dichotomy", "kappa_rule", "beta_equals_minus_mu_bar", "alpha_parity"):
        assert st[name] == NA
    assert FAIL not in st.values()


@pytest.mark.parametrize("name", sorted(FIX))
def test_every_self_conjugate_class_passes(name):
    g = FIX[name]
    for c in enumerate_spinc_classes(g):
        if not c.self_conjugate:
            continue
        r = analyze(g, c, oracle=True)
        assert r.ok(), [x for x in r.checks if x.status == FAIL]
        assert r.beta == -r.mu_bar
        assert Fraction(r.kappa) + r.mu_bar in (0, 2)
        assert r.alpha - r.delta in (0, 1)


@pytest.mark.parametrize("name", ["e8", "s237", "seifert_qhs", "chain22"])
def test_reports_are_deterministic_and_round_trip(name):
    g = FIX[name]
    a = analyze(g).to_json()
    b = analyze(g).to_json()
    assert a == b
    r = InvariantReport.from_json(a)
    assert r.to_json() == a
    d = json.loads(a)
    assert d["schema"] == "plumb-swf/1"
    assert isinstance(d["delta"], str)


@pytest.mark.parametrize("name", BLOWN_UP_BASES)
def test_blow_down_invariance(name):
    g = graph(name)
    for u in g.ids[:3]:
        big = blow_up_leaf(g, u)
        before = analyze(big)
        after = analyze(blow_down(big, max(big.ids)))
        assert before.invariants() == after.invariants()
        assert before.graph_hash != after.graph_hash


def test_graph_hash_is_stable():
    assert graph_hash(e8_graph()) == graph_hash(e8_graph())
    assert len(graph_hash(e8_graph())) == 64


def test_ar_warning():
    verts = [(0, -2), (1, -2)]
    edges = [(0, 1)]
    k = 2
    for node in (0, 1):
        for f in (-2, -4, -5):
            verts.append((k, f))
            edges.append((node, k))
            k += 1
    g = PlumbingGraph(verts, edges)
    with pytest.warns(UserWarning, match="almost-rationality"):
        r = analyze(g)
    assert r.d == 2 * r.delta


def test_report_without_graph():
    r = replace(analyze(from_brieskorn([2, 3, 7])), graph=None)
    st = _status(verify_report(r))
    assert st["root_recomputed"] == NA
    assert FAIL not in st.values()
