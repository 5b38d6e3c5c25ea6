"""End-to-end invariant reports for one (graph, spin^c class) pair."""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction

from .ktheory import kappa_report
from .lattice import full_homology_oracle, h0_graded_root, oracle_root_agrees
from .plumbing import PlumbingGraph, is_almost_rational
from .roots import (
    GradedRoot,
    alpha_gamma,
    beta,
    canonical_presentation,
    delta,
    is_projective,
    monotone_subroot,
)
from .spinc import SpinCClass, enumerate_spinc_classes, make_class, neumann_siebenmann

SCHEMA = "plumb-swf/1"
ORACLE_MAX_VERTICES = 8

PASS, FAIL, NA = "pass", "fail", "n/a"


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}

    @classmethod
    def from_dict(cls, d: dict) -> "Check":
        return cls(d["name"], d["status"], d.get("detail", ""))


def _q(x) -> str | None:
    return None if x is None else str(Fraction(x))


def _unq(x) -> Fraction | None:
    return None if x is None else Fraction(x)


def graph_hash(g: PlumbingGraph) -> str:
    blob = json.dumps(g.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class InvariantReport:
    graph: dict | None
    graph_hash: str
    spinc: dict
    d: Fraction
    delta: Fraction
    alpha: Fraction | None
    beta: Fraction | None
    gamma: Fraction | None
    mu_bar: Fraction | None
    kappa: int | Fraction | None
    projective: tuple[int, Fraction] | None
    root: GradedRoot
    checks: tuple[Check, ...] = ()

    @property
    def self_conjugate(self) -> bool:
        return bool(self.spinc.get("self_conjugate"))

    @property
    def class_id(self) -> tuple[int, ...]:
        return tuple(self.spinc["residue"])

    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def invariants(self) -> dict:
        """Everything except graph metadata."""
        d = self.to_dict()
        for key in ("graph", "graph_hash", "spinc"):
            d.pop(key)
        return d

    def to_dict(self) -> dict:
        kap = self.kappa
        if isinstance(kap, Fraction):
            kap = int(kap) if kap.denominator == 1 else str(kap)
        return {
            "schema": SCHEMA,
            "graph": self.graph,
            "graph_hash": self.graph_hash,
            "spinc": self.spinc,
            "d": _q(self.d),
            "delta": _q(self.delta),
            "alpha": _q(self.alpha),
            "beta": _q(self.beta),
            "gamma": _q(self.gamma),
            "mu_bar": _q(self.mu_bar),
            "kappa": kap,
            "projective": None if self.projective is None
            else [self.projective[0], _q(self.projective[1])],
            "root": self.root.to_dict(),
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "InvariantReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        kap = d.get("kappa")
        if isinstance(kap, str):
            kap = Fraction(kap)
        proj = d.get("projective")
        return cls(
            d.get("graph"),
            d["graph_hash"],
            d["spinc"],
            Fraction(d["d"]),
            Fraction(d["delta"]),
            _unq(d.get("alpha")),
            _unq(d.get("beta")),
            _unq(d.get("gamma")),
            _unq(d.get("mu_bar")),
            kap,
            None if proj is None else (int(proj[0]), Fraction(proj[1])),
            GradedRoot.from_dict(d["root"]),
            tuple(Check.from_dict(c) for c in d.get("checks", [])),
        )

    @classmethod
    def from_json(cls, text: str) -> "InvariantReport":
        return cls.from_dict(json.loads(text))


def _resolve_class(g: PlumbingGraph, cls) -> SpinCClass:
    if cls is None:
        return enumerate_spinc_classes(g)[0]
    if isinstance(cls, SpinCClass):
        return cls
    return make_class(g, cls)


def _oracle_check(g: PlumbingGraph, c: SpinCClass, R: GradedRoot, h=None, max_dim: int = 2) -> list[Check]:
    h = R.h if h is None else Fraction(h)
    fast = R if h == R.h else h0_graded_root(g, c, h)
    mods = full_homology_oracle(g, c, h, max_dim=max_dim)
    agree = oracle_root_agrees(fast, mods[0])
    higher = [m.d for m in mods[1:] if not m.is_zero()]
    return [
        Check("oracle_root", PASS if agree else FAIL, f"H_0 barcode at h={h}"),
        Check("higher_homology_vanishes", FAIL if higher else PASS,
              f"nonzero in degrees {higher}" if higher else f"H_1..H_{max_dim} = 0"),
    ]


def _arith_checks(r: InvariantReport) -> list[Check]:
    out = [Check("d_is_twice_delta", PASS if r.d == 2 * r.delta else FAIL, f"d={r.d}, delta={r.delta}")]
    if not r.self_conjugate or r.beta is None:
        for name in ("gamma_equals_beta", "alpha_parity", "beta_equals_minus_mu_bar",
                     "kappa_dichotomy", "kappa_rule", "projective_parameters"):
            out.append(Check(name, NA, "class is not self-conjugate"))
        return out
    out.append(Check("gamma_equals_beta", PASS if r.gamma == r.beta else FAIL,
                     f"gamma={r.gamma}, beta={r.beta}"))
    a_ok = r.alpha is not None and r.alpha - r.delta in (0, 1)
    a_ok = a_ok and ((r.alpha - r.beta) / 2).denominator == 1
    out.append(Check("alpha_parity", PASS if a_ok else FAIL,
                     f"alpha={r.alpha}, delta={r.delta}, beta={r.beta}"))
    if r.mu_bar is None:
        out.append(Check("beta_equals_minus_mu_bar", NA, "mu-bar unavailable"))
    else:
        out.append(Check("beta_equals_minus_mu_bar", PASS if r.beta == -r.mu_bar else FAIL,
                         f"beta={r.beta}, mu_bar={r.mu_bar}"))
    if r.kappa is None or r.mu_bar is None:
        out.append(Check("kappa_dichotomy", NA, "kappa unavailable"))
        out.append(Check("kappa_rule", NA, "kappa unavailable"))
    else:
        s = Fraction(r.kappa) + r.mu_bar
        out.append(Check("kappa_dichotomy", PASS if s in (0, 2) else FAIL, f"kappa + mu_bar = {s}"))
        want = kappa_report(r.delta, r.mu_bar)
        out.append(Check("kappa_rule", PASS if Fraction(r.kappa) == want else FAIL,
                         f"kappa={r.kappa}, expected {want}"))
    if r.projective is None:
        out.append(Check("projective_parameters", NA, "not projective"))
    else:
        n, shift = r.projective
        ok = n == r.delta - r.beta and shift == 2 * r.beta
        out.append(Check("projective_parameters", PASS if ok else FAIL, f"n={n}, shift={shift}"))
    return out


def _monotone_check(R: GradedRoot) -> Check:
    M = monotone_subroot(R)
    ok = delta(M) == delta(R) and beta(M) == beta(R)
    return Check("monotone_invariants", PASS if ok else FAIL,
                 f"monotone subroot delta={delta(M)}, beta={beta(M)}")


def analyze(g: PlumbingGraph, cls=None, oracle: bool = False, h=None, max_dim: int = 2) -> InvariantReport:
    """Compute the graded root and all numerical invariants of (g, cls).

    ``cls`` is a SpinCClass, a characteristic vector, or None for the first
    class (self-conjugate classes sort first).  With ``oracle`` the root is
    compared with the chain-complex homology at truncation ``h`` (default:
    the level where the root is complete).
    """
    ar, _ = is_almost_rational(g)
    if not ar:
        warnings.warn("almost-rationality undetermined; invariants assume it", stacklevel=2)
    c = _resolve_class(g, cls)
    R = h0_graded_root(g, c)
    checks: list[Check] = []
    if oracle:
        checks += _oracle_check(g, c, R, h, max_dim)
    else:
        checks.append(Check("oracle_root", NA, "oracle not requested"))
    root = canonical_presentation(R)
    dl = delta(root)
    spinc = {"residue": list(c.residue), **c.to_dict()}
    if c.self_conjugate:
        al, ga = alpha_gamma(root)
        be = beta(root)
        mu = neumann_siebenmann(g, c)
        kap = kappa_report(dl, mu)
        proj = is_projective(root)
        checks.append(_monotone_check(root))
    else:
        al = be = ga = mu = kap = proj = None
        checks.append(Check("monotone_invariants", NA, "class is not self-conjugate"))
    report = InvariantReport(g.to_dict(), graph_hash(g), spinc, 2 * dl, dl, al, be, ga, mu, kap,
                             proj, root)
    checks += _arith_checks(report)
    checks.sort(key=lambda ch: ch.name)
    return replace(report, checks=tuple(checks))


def verify_report(r: InvariantReport, oracle: bool | None = None) -> list[Check]:
    """Re-run the cross-checks on a (possibly edited) report.

    When the report carries its graph the root is recomputed and compared;
    the oracle runs by default for graphs with at most eight vertices.
    """
    out = _arith_checks(r)
    if r.self_conjugate and r.beta is not None:
        out.append(_monotone_check(r.root))
        dl, be = delta(r.root), beta(r.root)
        ok = dl == r.delta and be == r.beta
        out.append(Check("root_invariants", PASS if ok else FAIL,
                         f"root gives delta={dl}, beta={be}"))
    else:
        ok = delta(r.root) == r.delta
        out.append(Check("root_invariants", PASS if ok else FAIL, f"root gives delta={delta(r.root)}"))
    if r.graph is None:
        out.append(Check("root_recomputed", NA, "report has no graph"))
        out.append(Check("oracle_root", NA, "report has no graph"))
    else:
        g = PlumbingGraph.from_dict(r.graph)
        if graph_hash(g) != r.graph_hash:
            out.append(Check("graph_hash", FAIL, "hash does not match graph"))
        c = make_class(g, r.spinc["rep"])
        R = h0_graded_root(g, c)
        same = canonical_presentation(R).to_dict() == r.root.to_dict()
        out.append(Check("root_recomputed", PASS if same else FAIL, "fast root from graph"))
        if oracle is None:
            oracle = g.n <= ORACLE_MAX_VERTICES
        if oracle:
            out += _oracle_check(g, c, R)
        else:
            out.append(Check("oracle_root", NA, "oracle skipped"))
        if r.self_conjugate and r.mu_bar is not None:
            mu = neumann_siebenmann(g, c)
            out.append(Check("mu_bar_recomputed", PASS if mu == r.mu_bar else FAIL,
                             f"Wu element gives {mu}"))
    out.sort(key=lambda ch: ch.name)
    return out
