"""Acceptance criteria 1 to 11, one PASS/FAIL line each."""

import time
from itertools import combinations

import pytest
from scipy import integrate as spi

from feynpoly import corpus as C
from feynpoly.blowup import (
    UnionClosedFamily,
    affine_ring_check,
    chart_pullback,
    cooccurrence,
    divisor_incidence,
    enumerate_flags,
    product_identity,
    transitions_consistent,
)
from feynpoly.convergence import chart_pole_orders, is_convergent, pole_order, sd
from feynpoly.graph import (
    all_edge_subsets,
    is_mm,
    is_momentum_spanning,
    is_motic,
    motic_subgraphs,
    restrict,
    subgraph_loops,
)
from feynpoly.hopf import (
    all_or_nothing,
    antipode_identity,
    check_differential_compat,
    coassociativity_defect,
    coradical_bound,
    coradical_degree,
    counit_defect,
    grading_additive,
)
from feynpoly.integrate import Integrand, affine_chart_integral, integrate
from feynpoly.poly import parse_poly
from feynpoly.strata import e1_vanishing_bounds, max_chain_length, nested_chains
from feynpoly.symanzik import (
    KINDS,
    KinPoint,
    factorization_remainder,
    order_of_vanishing,
    phi,
    psi,
    reconstruct_polynomials,
    space_of,
    xi,
)

ZETA3 = 1.2020569031595942


@pytest.fixture(scope="module")
def corpus7():
    return C.corpus(max_edges=7)


@pytest.fixture(scope="module")
def corpus6(corpus7):
    return [g for g in corpus7 if len(g.edges) <= 6]


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line for a criterion, then fail the test if needed."""

    def report(number, title, ok, seconds, limit=None, detail=""):
        timed_ok = limit is None or seconds < limit
        status = "PASS" if ok and timed_ok else "FAIL"
        extra = f" [{detail}]" if detail else ""
        budget = f" (limit {limit:g} s)" if limit is not None else ""
        with capsys.disabled():
            print(f"\ncriterion {number:2d} {status}: {title} in {seconds:.2f} s{budget}{extra}")
        assert ok, f"criterion {number} failed: {detail}"
        assert timed_ok, f"criterion {number} took {seconds:.1f} s, limit {limit} s"

    return report


def poly(g, text):
    return parse_poly(text, g.nalpha, space_of(g))


def test_golden_polynomials(verdict):
    t0 = time.perf_counter()
    d, b, box, ban, tri, t2 = C.dunce_cap(), C.massive_bubble(), C.box(), C.banana(3), C.triangle(), \
        C.one_loop_massive_triangle()
    cases = [
        (psi(d), poly(d, "a1*a3 + a1*a4 + a2*a3 + a2*a4 + a3*a4")),
        (phi(d), poly(d, "q1^2*(a1*a2*a3 + a1*a2*a4 + a1*a3*a4)")),
        (xi(d), poly(d, "q1^2*(a1*a2*a3 + a1*a2*a4 + a1*a3*a4)"
                        " + m1^2*a1*(a1*a3 + a1*a4 + a2*a3 + a2*a4 + a3*a4)")),
        (psi(b), poly(b, "a1 + a2")),
        (xi(b), poly(b, "q^2*a1*a2 + m^2*(a1+a2)^2")),
        (psi(box), poly(box, "a1 + a2 + a3 + a4")),
        (phi(box), poly(box, "(q2+q3)^2*a1*a3 + (q1+q2)^2*a2*a4 + q1^2*a1*a4 + q2^2*a1*a2"
                             " + q3^2*a2*a3 + q4^2*a3*a4")),
        (psi(ban), poly(ban, "a1*a2 + a1*a3 + a2*a3")),
        (psi(tri), poly(tri, "a1 + a2 + a3")),
        (psi(t2), poly(t2, "a1 + a2 + a3")),
        (xi(t2), poly(t2, "q^2*a3*(a1+a2) + (m1^2*a1 + m2^2*a2)*(a1+a2+a3)")),
    ]
    bad = [i for i, (got, want) in enumerate(cases) if got.to_string() != want.to_string()]
    verdict(1, "golden polynomials", not bad, time.perf_counter() - t0, 1.0, f"mismatch {bad}" if bad else "")


def test_motic_classification(verdict):
    t0 = time.perf_counter()
    dunce = {frozenset(s) for s in motic_subgraphs(C.dunce_cap(), include_self=True)}
    want = {frozenset(s) for s in ({1}, {3, 4}, {1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {1, 2, 3, 4})}
    tri2 = list(motic_subgraphs(C.one_loop_massive_triangle(), include_self=False))
    ok = dunce == want and tri2 == [frozenset({1, 2})]
    verdict(2, "motic classification", ok, time.perf_counter() - t0, 1.0)


def test_factorization_suite(verdict, corpus7):
    t0 = time.perf_counter()
    kinds = {(g.nq, g.nm) for g in corpus7}
    failures, checks = [], 0
    for g in corpus7:
        for gamma in all_edge_subsets(g):
            for kind in KINDS:
                if kind == "PhiIR" and not (g.has_kinematics and is_momentum_spanning(g, gamma)):
                    continue
                if kind == "XiIR" and not (g.has_kinematics and is_mm(g, gamma)):
                    continue
                checks += 1
                if not factorization_remainder(g, gamma, kind).holds:
                    failures.append((g, gamma, kind))
    ok = not failures and len(corpus7) >= 200 and kinds >= {(0, 0), (2, 1), (2, 2)}
    verdict(3, "factorization suite", ok, time.perf_counter() - t0, 300.0,
            f"{len(corpus7)} graphs, {checks} checks, {len(failures)} failures")


def _valuation_motic(P, gamma):
    vg = order_of_vanishing(P, gamma)
    items = sorted(gamma)
    return all(order_of_vanishing(P, frozenset(s)) < vg
               for r in range(len(items)) for s in combinations(items, r))


def test_valuation_equivalence(verdict, corpus6):
    t0 = time.perf_counter()
    failures = 0
    for g in corpus6:
        P = xi(g) if g.has_kinematics else psi(g)
        for gamma in all_edge_subsets(g):
            if gamma and is_motic(g, gamma) != _valuation_motic(P, gamma):
                failures += 1
    verdict(4, "valuation equivalence", failures == 0, time.perf_counter() - t0,
            detail=f"{len(corpus6)} graphs, {failures} failures")


def test_hopf_suite(verdict, corpus7):
    t0 = time.perf_counter()
    motic = [g for g in corpus7 if is_motic(g, frozenset(g.labels))]
    failures = []
    for g in motic:
        ok = (not coassociativity_defect(g) and all(counit_defect(g)) and grading_additive(g)
              and all_or_nothing(g) and coradical_degree(g) <= coradical_bound(g)
              and not antipode_identity(g) and not antipode_identity(g, "right"))
        if not ok:
            failures.append(g)
    dunce = C.dunce_cap()
    detected = not check_differential_compat(restrict(dunce, frozenset({1, 3, 4})), 1)
    verdict(5, "Hopf suite", not failures and detected, time.perf_counter() - t0,
            detail=f"{len(motic)} motic graphs, {len(failures)} failures, counterexample detected: {detected}")


def test_atlas_suite(verdict, corpus6):
    t0 = time.perf_counter()
    failures = []
    for g in corpus6:
        B = UnionClosedFamily.from_graph(g)
        charts = enumerate_flags(B)
        co = cooccurrence(B, charts)
        if not all((frozenset({x, y}) in co) == divisor_incidence(B, x, y)
                   for x, y in combinations(B.divisors, 2)):
            failures.append((g, "incidence"))
        if not transitions_consistent(charts):
            failures.append((g, "transitions"))
        P, X = psi(g), (xi(g) if g.has_kinematics else None)
        for c in charts:
            if any(e != subgraph_loops(g, I) for I, e in chart_pullback(c, P).exceptional.items()):
                failures.append((g, "psi exponents"))
            if X is not None and any(e != subgraph_loops(g, I) + is_mm(g, I)
                                     for I, e in chart_pullback(c, X).exceptional.items()):
                failures.append((g, "xi exponents"))
            for r in range(1, c.k + 1):
                for which in ("psi", "xi") if X is not None else ("psi",):
                    lhs, rhs = product_identity(g, c, r, which)
                    if lhs != rhs:
                        failures.append((g, "product identity"))
    verdict(6, "atlas suite", not failures, time.perf_counter() - t0, 600.0,
            f"{len(corpus6)} graphs, {len(failures)} failures")


def test_affine_model_suite(verdict, corpus6):
    t0 = time.perf_counter()
    bad = [g for g in corpus6 if not affine_ring_check(UnionClosedFamily.from_graph(g)).ok]
    two = affine_ring_check(UnionClosedFamily(frozenset({1, 2}), [frozenset({1, 2})]))
    verdict(7, "affine model suite", not bad and two.ok, time.perf_counter() - t0,
            detail=f"{len(corpus6)} graphs, {len(bad)} failures")


def test_uniqueness_reconstruction(verdict, corpus6):
    t0 = time.perf_counter()
    motic = [g for g in corpus6 if is_motic(g, frozenset(g.labels))]
    bad = []
    for g in motic:
        P, Cg = reconstruct_polynomials(g)
        if P != psi(g) or (g.has_kinematics and Cg != xi(g)) or (not g.has_kinematics and not Cg.is_zero()):
            bad.append(g)
    verdict(8, "uniqueness reconstruction", not bad, time.perf_counter() - t0,
            detail=f"{len(motic)} motic graphs, {len(bad)} failures")


def test_convergence(verdict, corpus7):
    t0 = time.perf_counter()
    w3 = is_convergent(C.wheel_three_spokes(), 4)
    dunce = is_convergent(C.dunce_cap(), 4)
    mismatches = compared = 0
    for g in corpus7:
        for d in (2, 4, 6):
            if not g.has_kinematics and sd(g, d) != 0:
                # the projective integrand is not defined; nothing to compare
                continue
            orders = chart_pole_orders(g, d)
            for div, order in orders.items():
                if is_motic(g, div) and div != frozenset(g.labels):
                    compared += 1
                    mismatches += order != pole_order(g, div, d)
                else:
                    mismatches += order > 0
    ok = w3[0] and not dunce[0] and dunce[1] == frozenset({3, 4}) and mismatches == 0
    verdict(9, "convergence", ok, time.perf_counter() - t0,
            detail=f"{compared} pole orders compared, {mismatches} mismatches")


def test_numerics(verdict):
    t0 = time.perf_counter()
    ban = C.banana(3)
    P = parse_poly("a1*a2*a3", 3, space_of(ban))
    half = integrate(ban, 4, integrand=Integrand(P, 3, 0)).value
    t_half = time.perf_counter() - t0

    t1 = time.perf_counter()
    w3 = integrate(C.wheel_three_spokes(), 4, seed=1, rtol=2e-3).value
    t_w3 = time.perf_counter() - t1

    b = C.massive_bubble()
    point = KinPoint(2, 1, {(1, 1): 1.0}, {1: 1.0})
    oracle, _ = spi.quad(lambda a: 1.0 / (a + (a + 1) ** 2), 0, float("inf"), epsabs=1e-13, epsrel=1e-13)
    bub = integrate(b, 2, point).value
    charts = [affine_chart_integral(b, 2, e, point)[0] for e in (1, 2)]

    ok = (abs(half - 0.5) < 1e-6 and t_half < 10
          and abs(w3 - 6 * ZETA3) / (6 * ZETA3) < 0.01 and t_w3 < 300
          and abs(bub - oracle) < 1e-6 and all(abs(c - bub) < 1e-6 for c in charts))
    verdict(10, "numerics", ok, time.perf_counter() - t0,
            detail=f"banana {half:.9f} ({t_half:.1f} s), W3 {w3:.6f} vs {6 * ZETA3:.6f} ({t_w3:.1f} s), "
                   f"bubble {bub:.10f} vs {oracle:.10f}")


def test_strata(verdict, corpus7):
    t0 = time.perf_counter()
    tri2 = C.one_loop_massive_triangle()
    chains_ok = [r.chain for r in nested_chains(tri2)] == [(), (frozenset({1, 2}),)]
    table = e1_vanishing_bounds(tri2)
    # only columns 0 and 1 can be nonzero, and nothing at q >= N
    window_ok = (not any(v for (p, q), v in table.items() if p >= 2 or q >= 3)
                 and table[(0, 0)] and table[(1, 1)])
    bad = [g for g in corpus7 if is_motic(g, frozenset(g.labels))
           and max_chain_length(g) + 1 != coradical_degree(g)]
    verdict(11, "strata", chains_ok and window_ok and not bad, time.perf_counter() - t0,
            detail=f"{len(bad)} chain-length mismatches")
