"""Invariant suite over the built-in example graphs."""

from __future__ import annotations

from itertools import combinations

from .blowup import (
    UnionClosedFamily,
    affine_ring_check,
    cooccurrence,
    divisor_incidence,
    enumerate_flags,
    product_identity,
    transitions_consistent,
)
from .convergence import chart_pole_orders, pole_order
from .corpus import NAMED
from .errors import FeynpolyError
from .graph import all_edge_subsets, is_mm, is_momentum_spanning, motic_subgraphs
from .hopf import (
    antipode_identity,
    coassociativity_defect,
    coradical_bound,
    coradical_degree,
    counit_defect,
    grading_additive,
    all_or_nothing,
)
from .strata import max_chain_length
from .symanzik import KINDS, factorization_remainder, phi, psi, reconstruct_polynomials, xi


def _polys_agree(g):
    p = psi(g)
    return p == psi(g, "trees") == psi(g, "kirchhoff") and phi(g) == phi(g, "trees")


def _factorizations(g):
    for gamma in all_edge_subsets(g):
        for kind in KINDS:
            if kind == "PhiIR" and not (g.has_kinematics and is_momentum_spanning(g, gamma)):
                continue
            if kind == "XiIR" and not (g.has_kinematics and is_mm(g, gamma)):
                continue
            if not factorization_remainder(g, gamma, kind).holds:
                return False
    return True


def _reconstruction(g):
    return reconstruct_polynomials(g) == (psi(g), xi(g))


def _hopf(g):
    return (not coassociativity_defect(g) and all(counit_defect(g)) and grading_additive(g)
            and all_or_nothing(g) and not antipode_identity(g, "left") and not antipode_identity(g, "right")
            and coradical_degree(g) <= coradical_bound(g))


def _atlas(g):
    B = UnionClosedFamily.from_graph(g)
    charts = enumerate_flags(B)
    co = cooccurrence(B, charts)
    if not all((frozenset({x, y}) in co) == divisor_incidence(B, x, y) for x, y in combinations(B.divisors, 2)):
        return False
    if not transitions_consistent(charts):
        return False
    which = ("psi", "xi") if g.has_kinematics else ("psi",)
    for c in charts:
        for r in range(1, c.k + 1):
            for w in which:
                lhs, rhs = product_identity(g, c, r, w)
                if lhs != rhs:
                    return False
    return affine_ring_check(B).ok


def _power_counting(g):
    for d in (2, 4, 6):
        from .convergence import sd

        if not g.has_kinematics and sd(g, d) != 0:
            continue
        orders = chart_pole_orders(g, d)
        for gamma in motic_subgraphs(g, include_self=False):
            if frozenset(gamma) in orders and orders[frozenset(gamma)] != pole_order(g, gamma, d):
                return False
    return True


def _chains(g):
    return max_chain_length(g) + 1 == coradical_degree(g)


CHECKS = [
    ("polynomial routes agree", _polys_agree, 7),
    ("factorization", _factorizations, 7),
    ("reconstruction", _reconstruction, 6),
    ("hopf axioms", _hopf, 7),
    ("atlas", _atlas, 6),
    ("power counting", _power_counting, 6),
    ("chain length", _chains, 7),
]


def run_selfcheck(quick: bool = False) -> dict:
    rows = []
    for name, make in NAMED.items():
        g = make()
        for check, fn, max_edges in CHECKS:
            if len(g.edges) > max_edges or (quick and len(g.edges) > 4):
                continue
            try:
                ok = bool(fn(g))
                msg = None
            except FeynpolyError as exc:
                ok, msg = False, f"{type(exc).__name__}: {exc}"
            row = {"graph": name, "check": check, "ok": ok}
            if msg:
                row["error"] = msg
            rows.append(row)
    return {"ok": all(r["ok"] for r in rows), "checks": rows}
