"""Fixture graphs shared by the test modules, with frozen expected roots.

Expected roots were produced by brute force (connected components of the
superlevel sets, checked against the chain-complex oracle) and written down
by hand.
"""

from plumbswf.plumbing import PlumbingGraph, e8_graph, from_brieskorn, from_seifert

# name -> (graph factory, leaf gradings, angle gradings) of the complete root
# of the first self-conjugate class, in canonical presentation
EXPECTED = {
    "s3": (lambda: PlumbingGraph([(0, -1)]), ["0"], []),
    "e8": (e8_graph, ["2"], []),
    "s237": (lambda: from_brieskorn([2, 3, 7]), ["0", "0"], ["-2"]),
    "s2313": (lambda: from_brieskorn([2, 3, 13]), ["0", "0", "0"], ["-2", "-2"]),
    "s257": (lambda: from_brieskorn([2, 5, 7]), ["0", "0", "0"], ["-2", "-2"]),
    "s345": (lambda: from_brieskorn([3, 4, 5]), ["0", "0", "0"], ["-2", "-2"]),
    "s2319": (lambda: from_brieskorn([2, 3, 19]), ["0", "0", "0", "0"], ["-2", "-2", "-2"]),
}

# small graphs with a -1 leaf, for blow-down tests
BLOWN_UP_BASES = ["s3", "e8", "s237", "s2313", "s257"]


def graph(name):
    return EXPECTED[name][0]()


def all_fixtures():
    out = {k: v[0]() for k, v in EXPECTED.items()}
    out["minus2"] = PlumbingGraph([(0, -2)])
    out["chain22"] = PlumbingGraph([(0, -2), (1, -2)], [(0, 1)])
    out["seifert_qhs"] = from_seifert(-2, [(2, 1), (3, 1), (3, 1)])
    return out
