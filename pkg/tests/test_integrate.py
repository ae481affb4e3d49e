import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as spi

from feynpoly import corpus as C
from feynpoly.blowup import UnionClosedFamily
from feynpoly.errors import BudgetExceeded, DivergentIntegrand, NonGenericPoint
from feynpoly.integrate import Integrand, affine_chart_integral, build_sectors, integrate, polytope_volume
from feynpoly.poly import parse_poly
from feynpoly.symanzik import KinPoint, space_of

ZETA3 = 1.2020569031595942


def bubble_point(qsq=1.0, msq=1.0):
    return KinPoint(2, 1, {(1, 1): qsq}, {1: msq})


def bubble_oracle():
    # alpha_2 = 1: Psi = a + 1, Xi = q^2 a + m^2 (a + 1)^2, exponents (0, 1)
    val, _ = spi.quad(lambda a: 1.0 / (a + (a + 1) ** 2), 0, np.inf, epsabs=1e-13, epsrel=1e-13)
    return val


def test_banana_numerator_gives_half(banana3):
    P = parse_poly("a1*a2*a3", 3, space_of(banana3))
    res = integrate(banana3, 4, integrand=Integrand(P, Fraction(3), Fraction(0)))
    assert abs(res.value - 0.5) < 1e-6


def test_bubble_matches_one_dimensional_oracle(bubble):
    ref = bubble_oracle()
    assert abs(ref - 0.8608178819280081) < 1e-10
    res = integrate(bubble, 2, bubble_point())
    assert abs(res.value - ref) < 1e-6
    assert len(res.sectors) == 2


def test_affine_charts_agree(bubble):
    res = integrate(bubble, 2, bubble_point())
    for e in (1, 2):
        val, err = affine_chart_integral(bubble, 2, e, bubble_point())
        assert abs(val - res.value) < 1e-6 + err + res.error


def test_wheel_gives_six_zeta_three(w3):
    res = integrate(w3, 4, seed=1, rtol=2e-3)
    assert abs(res.value - 6 * ZETA3) / (6 * ZETA3) < 0.01


def test_sector_counts(tri2, bubble):
    assert len(build_sectors(tri2, 4)) == 4
    assert len(build_sectors(bubble, 2)) == 2


def test_triangle_sectors_without_kinematics():
    g = C.triangle()
    P = parse_poly("1", 3, space_of(g))
    assert len(build_sectors(g, 6, Integrand(P, Fraction(3), Fraction(0)))) == 3


@pytest.mark.parametrize("n", [2, 3, 4])
def test_polytope_volume(n):
    B = UnionClosedFamily(frozenset(range(1, n + 1)), [frozenset(range(1, n + 1))])
    assert abs(polytope_volume(B) - 1 / math.factorial(n - 1)) < 1e-8


def test_polytope_volume_with_blowups(tri2, dunce):
    for g in (tri2, dunce):
        B = UnionClosedFamily.from_graph(g)
        n = len(g.edges)
        assert abs(polytope_volume(B, rtol=1e-6) - 1 / math.factorial(n - 1)) < 1e-8


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0))
def test_sectors_positive_on_the_open_cube(qsq, msq):
    g = C.one_loop_massive_triangle()
    point = KinPoint(2, 2, {(1, 1): qsq}, {1: msq, 2: msq * 1.3})
    rng = np.random.default_rng(0)
    for sec in build_sectors(g, 4):
        f = sec.compile(point.values())
        x = rng.uniform(0.01, 0.99, size=(64, sec.dim))
        v = np.asarray(f(x))
        assert np.all(np.real(v) > 0)


def test_seed_determinism(w3):
    a = integrate(w3, 4, seed=7, rtol=1e-2)
    b = integrate(w3, 4, seed=7, rtol=1e-2)
    assert a.value == b.value and a.error == b.error


def test_budget_exceeded(tri2, w3):
    point = KinPoint(2, 2, {(1, 1): 1.0}, {1: 1.0, 2: 2.0})
    with pytest.raises(BudgetExceeded):
        integrate(tri2, 4, point, rtol=1e-14, max_subdivisions=2)
    with pytest.raises(BudgetExceeded):
        integrate(w3, 4, rtol=1e-9, max_samples=5000)


def test_non_generic_point(bubble):
    with pytest.raises(NonGenericPoint):
        integrate(bubble, 2, bubble_point(qsq=-1.0))
    with pytest.raises(NonGenericPoint):
        integrate(bubble, 2, None)
    with pytest.raises(NonGenericPoint):
        integrate(bubble, 2, KinPoint(2, 2, {(1, 1): 1.0}, {1: 1.0, 2: 1.0}))


def test_divergent_integrand(dunce, w3):
    point = KinPoint(2, 1, {(1, 1): 1.0}, {1: 1.0})
    with pytest.raises(DivergentIntegrand):
        integrate(dunce, 6, point)
    with pytest.raises(DivergentIntegrand):
        integrate(w3, 6)
