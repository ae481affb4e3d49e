"""Numerical evaluation of convergent parametric integrals by sectors.

Each maximal flag chart of the blow-up along B_G contributes the unit cube in
its coordinates (the sectors for z = (1 : ... : 1) tile the Feynman
polytope).  On a sector the pulled back integrand is

    P~ * prod beta^e / (Psi~^A * Xi~^B)

with strict transforms P~, Psi~, Xi~ and integer exponents e >= 0 (the
Jacobian included), so for convergent inputs it is bounded on the closed cube.
Sectors up to dimension 4 use adaptive cubature, higher ones randomised
quasi-Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as spi
from scipy.stats import qmc

from .blowup import FlagChart, UnionClosedFamily, chart_pullback, enumerate_flags
from .convergence import chart_exponents, integrand_exponents, is_convergent, numerator_admissible
from .errors import BudgetExceeded, DivergentIntegrand, NonGenericPoint
from .graph import FeynmanGraph
from .poly import CompiledPoly, KinPoly
from .symanzik import KinPoint, psi, space_of, xi

ADAPTIVE_MAX_DIM = 4


@dataclass
class Integrand:
    """Numerator P and exponents (A, B) of P / (Psi^A Xi^B)."""

    P: KinPoly
    A: object
    B: object

    @classmethod
    def plain(cls, g: FeynmanGraph, d: int) -> "Integrand":
        A, B = integrand_exponents(g, d)
        return cls(KinPoly.const(g.nalpha, space_of(g), 1), A, B)


@dataclass
class SectorIntegrand:
    chart: FlagChart
    numerator: KinPoly
    monomial: dict  # coordinate -> exponent, Jacobian included
    factors: list  # (strict transform, power) pairs in the denominator

    @property
    def dim(self) -> int:
        return len(self.chart.coordinates)

    def compile(self, point_values):
        """A vectorised function of (npts, dim) arrays at a kinematic point."""
        coords = self.chart.coordinates
        num = CompiledPoly(self.numerator, point_values, coords)
        dens = [(CompiledPoly(p, point_values, coords), float(a)) for p, a in self.factors if a]
        mono = np.array([self.monomial.get(x, 0) for x in coords], dtype=float)

        def f(x):
            x = np.atleast_2d(x)
            val = num(x) * np.prod(x ** mono, axis=1) if coords else num(x)
            for p, a in dens:
                val = val / p(x) ** a
            return val

        return f

    def to_json(self) -> dict:
        return {
            "chart": self.chart.to_json(),
            "monomial": {str(x): int(e) for x, e in sorted(self.monomial.items())},
            "numerator": self.numerator.to_string(),
            "denominator": [[p.to_string(), str(a)] for p, a in self.factors],
        }


def build_sectors(g: FeynmanGraph, d: int, integrand: Integrand | None = None) -> list:
    """One sector per maximal flag chart of B_G."""
    if integrand is None:
        integrand = Integrand.plain(g, d)
        if not g.has_kinematics and integrand.B != 0:
            raise DivergentIntegrand("a graph without kinematics needs sd_G = 0 in the chosen dimension")
        ok, wit = is_convergent(g, d)
        if not ok:
            raise DivergentIntegrand(f"divergent: subgraph {sorted(wit)} has a pole")
    elif not numerator_admissible(g, integrand.P, integrand.A, integrand.B, d):
        raise DivergentIntegrand("numerator fails the degree or valuation bounds")
    A, B = integrand.A, integrand.B
    polys = (psi(g), xi(g) if B else None)
    sectors = []
    for chart in enumerate_flags(UnionClosedFamily.from_graph(g)):
        ex = chart_exponents(g, chart, A, B, integrand.P, polys=polys)
        if any(e < 0 for e in ex.values()):
            raise DivergentIntegrand(f"negative exponent in chart {chart.label()}")
        factors = [(chart_pullback(chart, polys[0]).strict, A)]
        if B:
            factors.append((chart_pullback(chart, polys[1]).strict, B))
        num = chart_pullback(chart, integrand.P).strict
        sectors.append(SectorIntegrand(chart, num, {x: int(e) for x, e in ex.items()}, factors))
    return sectors


@dataclass
class SectorResult:
    value: complex
    error: float
    evaluations: int
    method: str


@dataclass
class IntegrationResult:
    value: complex
    error: float
    sectors: list = field(default_factory=list)

    @property
    def samples(self) -> int:
        return sum(s.evaluations for s in self.sectors)

    def to_json(self) -> dict:
        def num(v):
            v = complex(v)
            return v.real if v.imag == 0 else {"re": v.real, "im": v.imag}

        return {"value": num(self.value), "error": self.error, "sectors": len(self.sectors),
                "samples": self.samples,
                "per_sector": [{"value": num(s.value), "error": s.error, "evaluations": s.evaluations,
                                "method": s.method} for s in self.sectors]}


def _cubature(f, dim, rtol, atol, max_subdivisions):
    rule = "gk21" if dim == 1 else "genz-malik"
    res = spi.cubature(f, np.zeros(dim), np.ones(dim), rule=rule, rtol=rtol, atol=atol,
                       max_subdivisions=max_subdivisions)
    npts = {1: 21}.get(dim, 2 ** dim + 2 * dim * dim + 2 * dim + 1)
    evals = npts * (res.subdivisions + 1) * (2 if dim == 1 else 1)
    if res.status != "converged":
        raise BudgetExceeded(f"cubature did not converge within {max_subdivisions} subdivisions "
                             f"(estimate {res.estimate}, error {res.error})")
    return SectorResult(res.estimate, float(res.error), evals, rule)


def _qmc(f, dim, rtol, atol, seed, max_samples, replicates=8):
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seeds = ss.spawn(replicates)
    engines = [qmc.Sobol(dim, scramble=True, seed=np.random.default_rng(s)) for s in seeds]
    sums = np.zeros(replicates, dtype=complex)
    n = 0
    m = 10
    while True:
        batch = 2 ** m - n
        for r, eng in enumerate(engines):
            sums[r] += np.sum(f(eng.random(batch)))
        n += batch
        means = sums / n
        est = means.mean()
        err = float(np.std(means, ddof=1) / math.sqrt(replicates))
        if err <= max(atol, rtol * abs(est)):
            return SectorResult(est, err, n * replicates, "sobol")
        if 2 * n * replicates > max_samples:
            raise BudgetExceeded(f"quasi-Monte Carlo error {err:.3g} above tolerance after {n * replicates} samples")
        m += 1


def _check_point(g: FeynmanGraph, point: KinPoint | None):
    if not g.has_kinematics:
        return [0] * len(space_of(g))
    if point is None:
        raise NonGenericPoint("a kinematic point is required")
    if (point.nq, point.nm) != (g.nq, g.nm):
        raise NonGenericPoint("kinematic point does not match the graph")
    if not point.in_generic_region():
        raise NonGenericPoint("kinematic point is outside the region Re s_I > 0, Re m^2 > 0")
    return point.values()


def integrate(g: FeynmanGraph, d: int, point: KinPoint | None = None, integrand: Integrand | None = None,
              rtol: float = 1e-8, atol: float = 0.0, seed: int = 0, max_subdivisions: int = 20000,
              max_samples: int = 2 ** 26, sectors=None) -> IntegrationResult:
    """Sum of per-sector integrals; errors are combined in quadrature."""
    values = _check_point(g, point)
    sectors = build_sectors(g, d, integrand) if sectors is None else sectors
    results = []
    seeds = np.random.SeedSequence(seed).spawn(max(len(sectors), 1))
    for sec, ss in zip(sectors, seeds):
        f = sec.compile(values)
        if sec.dim == 0:
            results.append(SectorResult(complex(f(np.zeros((1, 0)))[0]), 0.0, 1, "point"))
        elif sec.dim <= ADAPTIVE_MAX_DIM:
            results.append(_cubature(f, sec.dim, rtol, atol / max(len(sectors), 1), max_subdivisions))
        else:
            results.append(_qmc(f, sec.dim, rtol, atol, ss, max_samples))
    total = sum(complex(r.value) for r in results)
    err = math.sqrt(sum(r.error ** 2 for r in results))
    if total.imag == 0:
        total = total.real
    return IntegrationResult(total, err, results)


# cross-checks ------------------------------------------------------------------------

def affine_chart_integral(g: FeynmanGraph, d: int, e: int, point: KinPoint | None = None,
                          integrand: Integrand | None = None, rtol: float = 1e-10) -> tuple:
    """The projective integral in the affine chart alpha_e = 1.

    The other parameters range over [0, inf); the substitution
    alpha = t / (1 - t) maps them to the unit cube.  Meant for small graphs.
    """
    values = _check_point(g, point)
    integrand = integrand or Integrand.plain(g, d)
    others = [x for x in g.labels if x != e]
    ps = psi(g).evaluate_kin(values)
    xs = xi(g).evaluate_kin(values) if integrand.B else None
    pn = integrand.P.evaluate_kin(values)

    def ev(poly, alphas):
        tot = 0
        for a, c in poly.items():
            term = c
            for i, p in enumerate(a):
                if p:
                    term = term * alphas[i] ** p
            tot = tot + term
        return tot

    def f(t):
        t = np.atleast_2d(t)
        a = t / (1 - t)
        jac = np.prod(1 / (1 - t) ** 2, axis=1)
        alphas = [np.ones(t.shape[0]) for _ in range(g.nalpha)]
        for col, x in enumerate(others):
            alphas[x - 1] = a[:, col]
        val = ev(pn, alphas) * jac / ev(ps, alphas) ** float(integrand.A)
        if xs is not None:
            val = val / ev(xs, alphas) ** float(integrand.B)
        return val

    dim = len(others)
    rule = "gk21" if dim == 1 else "genz-malik"
    res = spi.cubature(f, np.zeros(dim), np.ones(dim), rule=rule, rtol=rtol, max_subdivisions=50000)
    return res.estimate, float(res.error)


def polytope_volume(B: UnionClosedFamily, rtol: float = 1e-10) -> float:
    """Sum over sectors of the integral of Omega / (sum alpha)^n; equals 1/(n-1)!."""
    S = sorted(B.ground)
    n = len(S)
    nal = max(S)
    from .poly import kin_space

    space = kin_space(0, 0)
    total_alpha = KinPoly.zero(nal, space)
    for i in S:
        total_alpha = total_alpha + KinPoly.alpha(nal, space, i)
    tot = 0.0
    for c in enumerate_flags(B):
        pb = chart_pullback(c, total_alpha)
        exps = c.jacobian_exponents()
        for x, e in pb.exponents.items():
            exps[x] = exps.get(x, 0) - n * e
        sec = SectorIntegrand(c, KinPoly.const(nal, space, 1), exps, [(pb.strict, n)])
        f = sec.compile([])
        if sec.dim == 0:
            tot += float(np.real(f(np.zeros((1, 0)))[0]))
        else:
            tot += float(np.real(_cubature(f, sec.dim, rtol, 0.0, 20000).value))
    return tot
