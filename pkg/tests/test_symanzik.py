from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings

from feynpoly.corpus import banana, bubble_with_tadpole, box, massive_bubble, rose, triangle
from feynpoly.errors import NotMassMomentumSpanning
from feynpoly.graph import (
    all_edge_subsets,
    is_momentum_spanning,
    is_mm,
    is_motic,
)
from feynpoly.poly import parse_poly
from feynpoly.symanzik import (
    KINDS,
    KinPoint,
    contraction_deletion,
    factorization_remainder,
    order_of_vanishing,
    phi,
    psi,
    reconstruct_polynomials,
    space_of,
    xi,
)

from strategies import graphs


def poly(g, text):
    return parse_poly(text, g.nalpha, space_of(g))


# goldens --------------------------------------------------------------------

def test_dunce_cap_polynomials(dunce):
    assert psi(dunce) == poly(dunce, "a1*a3 + a1*a4 + a2*a3 + a2*a4 + a3*a4")
    assert phi(dunce) == poly(dunce, "q1^2*(a1*a2*a3 + a1*a2*a4 + a1*a3*a4)")
    assert xi(dunce) == phi(dunce) + poly(dunce, "m1^2*a1") * psi(dunce)


def test_massive_bubble():
    g = massive_bubble()
    assert xi(g) == poly(g, "q^2*a1*a2 + m^2*(a1+a2)^2")


def test_box():
    g = box()
    want = ("(q2+q3)^2*a1*a3 + (q1+q2)^2*a2*a4 + q1^2*a1*a4 + q2^2*a1*a2"
            " + q3^2*a2*a3 + q4^2*a3*a4")
    assert phi(g) == poly(g, want)


def test_massive_triangle(tri2):
    want = "q^2*a3*(a1+a2) + (m1^2*a1 + m2^2*a2)*(a1+a2+a3)"
    assert xi(tri2) == poly(tri2, want)


@pytest.mark.parametrize("g, want", [
    (triangle(), "a1+a2+a3"),
    (banana(3), "a1*a2+a1*a3+a2*a3"),
    (bubble_with_tadpole(), "a1*(a2+a3)"),
    (rose(3), "a1*a2*a3"),
])
def test_psi_small(g, want):
    assert psi(g) == poly(g, want)
    assert phi(g).is_zero() and xi(g).is_zero()


# independent oracle: brute-force spanning forests with numeric momenta ------

def _components(vertices, edges):
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    ok = True
    for u, v in edges:
        a, b = find(u), find(v)
        if a == b:
            ok = False
        parent[a] = b
    groups = {}
    for v in vertices:
        groups.setdefault(find(v), set()).add(v)
    return ok, list(groups.values())


def oracle_values(g, alphas, qvecs, msq):
    """Psi, Phi, Xi at numeric alphas from the forest formulas."""
    V = sorted(g.vertices)
    inflow = {v: np.zeros(qvecs.shape[1]) for v in V}
    for v, ix in g.legs:
        for i in ix:
            inflow[v] = inflow[v] + qvecs[i - 1]
    psi_v = phi_v = 0.0
    for F in (combinations(g.edges, len(V) - 2) if len(V) >= 2 else ()):
        ok, parts = _components(V, [(e.u, e.v) for e in F])
        if ok and len(parts) == 2:
            mono = np.prod([alphas[e.label - 1] for e in g.edges if e not in F])
            p = sum(inflow[v] for v in parts[0])
            phi_v += mono * float(p @ p)
    for T in combinations(g.edges, len(V) - 1):
        ok, parts = _components(V, [(e.u, e.v) for e in T])
        if ok and len(parts) == 1:
            psi_v += np.prod([alphas[e.label - 1] for e in g.edges if e not in T])
    mass = sum(alphas[e.label - 1] * msq.get(e.mass, 0.0) for e in g.edges if e.mass)
    return psi_v, phi_v, phi_v + mass * psi_v


def _numeric_point(g, rng):
    qvecs = rng.normal(size=(max(g.nq, 1), 4))
    if g.nq:
        qvecs[g.nq - 1] = -qvecs[: g.nq - 1].sum(axis=0)
    msq = {k: float(rng.uniform(0.5, 2)) for k in range(1, g.nm + 1)}
    vals = []
    for i, j in space_of(g).pairs:
        vals.append(msq[j] if i == 0 else float(qvecs[i - 1] @ qvecs[j - 1]))
    return qvecs, msq, vals


@settings(max_examples=60, deadline=None)
@given(graphs(max_edges=6))
def test_routes_agree_with_forest_oracle(g):
    rng = np.random.default_rng(len(g.edges))
    qvecs, msq, vals = _numeric_point(g, rng)
    alphas = rng.uniform(0.1, 2, size=g.nalpha)
    ps, ph, xs = oracle_values(g, alphas, qvecs, msq)
    for method in ("deletion", "trees", "kirchhoff"):
        assert psi(g, method).evaluate(alphas, vals) == pytest.approx(ps, rel=1e-9, abs=1e-12)
    for method in ("deletion", "trees"):
        assert phi(g, method).evaluate(alphas, vals) == pytest.approx(ph, rel=1e-9, abs=1e-9)
    assert xi(g).evaluate(alphas, vals) == pytest.approx(xs, rel=1e-9, abs=1e-9)


def test_routes_agree_on_corpus(small_graphs):
    for g in small_graphs:
        assert psi(g, "deletion") == psi(g, "trees") == psi(g, "kirchhoff")
        assert phi(g, "deletion") == phi(g, "trees")


@settings(max_examples=60, deadline=None)
@given(graphs(max_edges=6))
def test_degrees_and_coefficients(g):
    h = g.loop_number
    p = psi(g)
    assert p.is_homogeneous() and p.degree() == h
    assert set(p.terms.values()) == {1}
    assert all(max(a) <= 1 for a, _ in p.terms)
    if g.has_kinematics:
        assert xi(g).is_homogeneous() and xi(g).degree() == h + 1
    f = phi(g)
    if not f.is_zero():
        assert f.degree() == h + 1


@settings(max_examples=40, deadline=None)
@given(graphs(max_edges=6))
def test_contraction_deletion(g):
    for e in g.labels:
        p0, pc, f0, fc = contraction_deletion(g, e)
        a = poly(g, f"a{e}")
        assert psi(g) == p0 * a + pc
        assert phi(g) == f0 * a + fc


def test_order_of_vanishing(dunce):
    assert order_of_vanishing(xi(dunce), {1}) == 1
    assert order_of_vanishing(psi(dunce), {3, 4}) == 1
    assert order_of_vanishing(psi(dunce), {1, 2}) == 0


# factorization -----------------------------------------------------------------

def test_dunce_ultraviolet_remainder(dunce):
    f = factorization_remainder(dunce, {3, 4}, "PsiUV")
    assert f.remainder == poly(dunce, "a3*a4")
    assert f.min_degree == 2 and f.bound == 1 and f.holds


def test_massive_triangle_infrared(tri2):
    f = factorization_remainder(tri2, {1, 2}, "XiIR")
    assert f.bound == 1 and f.holds
    assert f.min_degree == 2


def test_infrared_preconditions(dunce):
    with pytest.raises(NotMassMomentumSpanning):
        factorization_remainder(dunce, {3, 4}, "XiIR")


def test_factorization_on_corpus(small_graphs):
    checked = 0
    for g in small_graphs:
        for gamma in all_edge_subsets(g):
            for kind in KINDS:
                if kind == "PhiIR" and not (g.has_kinematics and is_momentum_spanning(g, gamma)):
                    continue
                if kind == "XiIR" and not (g.has_kinematics and is_mm(g, gamma)):
                    continue
                assert factorization_remainder(g, gamma, kind).holds, (g, gamma, kind)
                checked += 1
    assert checked > 1000


# valuation criterion and reconstruction --------------------------------------------

def valuation_says_motic(P, gamma):
    vg = order_of_vanishing(P, gamma)
    return all(order_of_vanishing(P, s) < vg for s in map(frozenset, _proper_subsets(gamma)))


def _proper_subsets(gamma):
    items = sorted(gamma)
    for r in range(len(items)):
        yield from combinations(items, r)


def test_motic_valuation_criterion(small_graphs):
    for g in small_graphs:
        # Xi vanishes without kinematics; Psi carries the same information there
        P = xi(g) if g.has_kinematics else psi(g)
        for gamma in all_edge_subsets(g):
            if gamma:
                assert is_motic(g, gamma) == valuation_says_motic(P, gamma), (g, gamma)


def test_reconstruction_matches(small_graphs):
    for g in small_graphs:
        if not is_motic(g, frozenset(g.labels)) or len(g.edges) > 5:
            continue
        P, C = reconstruct_polynomials(g)
        assert P == psi(g)
        assert C == (xi(g) if g.has_kinematics else C.like())


def test_reconstruction_uses_banana_coefficient():
    g = massive_bubble()
    P, C = reconstruct_polynomials(g)
    assert C == xi(g)
    assert C.alpha_coefficient((1, 1)) == poly(g, "q^2 + 2*m^2")


# kinematic points --------------------------------------------------------------------

def test_kinpoint_genericity():
    pt = KinPoint(2, 1, {(1, 1): 1.0}, {1: 1.0})
    assert pt.is_generic() and pt.in_generic_region()
    assert not KinPoint(2, 1, {(1, 1): -1.0}, {1: 1.0}).is_generic()
    assert not KinPoint(2, 1, {(1, 1): -0.5}, {1: 1.0}).in_generic_region()
    assert not KinPoint(3, 0, {(1, 1): 1.0, (2, 2): 1.0, (1, 2): -1.0}, {}).is_generic()
    rnd = KinPoint.random(4, 2, rng=7)
    assert rnd.is_generic() and rnd.in_generic_region()


def test_xi_positive_in_generic_region(small_graphs):
    rng = np.random.default_rng(3)
    for g in small_graphs:
        if not g.has_kinematics:
            continue
        pt = KinPoint.random(g.nq, g.nm, rng)
        for _ in range(3):
            alphas = rng.uniform(0.01, 1, size=g.nalpha)
            assert xi(g).evaluate(alphas, pt.values()).real > 0
