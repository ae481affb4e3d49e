"""Power counting for parametric Feynman integrals.

The integrand in projective Schwinger parameters is

    omega = P / (Psi^A * Xi^B) * Omega,

homogeneous of degree zero when deg P = A h + B (h + 1) - N.  For P = 1 in
dimension d this means B = N - h d / 2 = -sd_G and A = d/2 - B.  Along the
exceptional divisor of a motic subgraph gamma the form has a pole of order

    1 + sd_gamma            (gamma not mass-momentum spanning)
    1 + sd_gamma - sd_G     (gamma mass-momentum spanning),

and it converges when no strict motic subgraph has a positive pole order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .blowup import FlagChart, UnionClosedFamily, chart_pullback, enumerate_flags
from .errors import DivergentIntegrand, InhomogeneousNumerator, NotMotic, OddDimension, ZeroPolynomial
from .graph import FeynmanGraph, _edges_of, is_mm, is_motic, motic_subgraphs, subgraph_loops
from .poly import KinPoly
from .symanzik import psi, xi


def _check_d(d: int):
    if d <= 0 or d % 2:
        raise OddDimension(f"spacetime dimension must be a positive even integer, got {d}")


def sd(g: FeynmanGraph, d: int, gamma=None) -> int:
    """Superficial degree of divergence d h / 2 - N (of g, or of gamma inside g)."""
    _check_d(d)
    gamma = frozenset(g.labels) if gamma is None else _edges_of(gamma)
    return d * subgraph_loops(g, gamma) // 2 - len(gamma)


def mm_indicator(g: FeynmanGraph, gamma) -> bool:
    """Whether the infrared branch of the power counting applies.

    Graphs without kinematics count every subgraph as mass-momentum spanning.
    """
    return not g.has_kinematics or is_mm(g, gamma)


def pole_order(g: FeynmanGraph, gamma, d: int) -> int:
    """Order of the pole of omega_G along D_gamma."""
    gamma = _edges_of(gamma)
    if not gamma or not is_motic(g, gamma):
        raise NotMotic(f"{sorted(gamma)} is not a motic subgraph")
    s = sd(g, d, gamma)
    if mm_indicator(g, gamma):
        return 1 + s - sd(g, d)
    return 1 + s


def integrand_exponents(g: FeynmanGraph, d: int) -> tuple:
    """(A, B) for the plain integrand 1 / (Psi^A Xi^B) in dimension d."""
    _check_d(d)
    b = -sd(g, d)
    return Fraction(d, 2) - b, b


@dataclass
class SubgraphRecord:
    gamma: frozenset
    loops: int
    edges: int
    mm: bool
    sd: int
    pole_order: int

    def to_json(self) -> dict:
        return {"gamma": sorted(self.gamma), "loops": self.loops, "edges": self.edges,
                "mm": self.mm, "sd": self.sd, "pole_order": self.pole_order}


@dataclass
class PowerCountReport:
    d: int
    sd_graph: int
    records: list = field(default_factory=list)
    convergent: bool = True
    witness: frozenset | None = None

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "sd": self.sd_graph,
            "convergent": self.convergent,
            "witness": None if self.witness is None else sorted(self.witness),
            "subgraphs": [r.to_json() for r in self.records],
        }


def power_count(g: FeynmanGraph, d: int) -> PowerCountReport:
    """Pole orders of every strict motic subgraph and the resulting verdict."""
    rep = PowerCountReport(d, sd(g, d))
    for gamma in sorted(motic_subgraphs(g, include_self=False), key=lambda s: tuple(sorted(s))):
        rec = SubgraphRecord(gamma, subgraph_loops(g, gamma), len(gamma), mm_indicator(g, gamma),
                             sd(g, d, gamma), pole_order(g, gamma, d))
        rep.records.append(rec)
        if rec.pole_order > 0 and rep.convergent:
            rep.convergent = False
            rep.witness = gamma
    return rep


def is_convergent(g: FeynmanGraph, d: int) -> tuple:
    """(verdict, lexicographically least divergent strict motic subgraph or None)."""
    rep = power_count(g, d)
    return rep.convergent, rep.witness


def numerator_admissible(g: FeynmanGraph, P: KinPoly, A, B, d: int | None = None) -> bool:
    """Degree and valuation conditions for P / (Psi^A Xi^B) to converge.

    deg P must equal A h + B (h + 1) - N, and for every strict motic gamma
    v_gamma(P) >= A h_gamma + B (h_gamma + mm_gamma) - N_gamma + 1.
    """
    if d is not None:
        _check_d(d)
    if not P:
        raise ZeroPolynomial("numerator is zero")
    if not P.is_homogeneous():
        raise InhomogeneousNumerator("numerator is not homogeneous in the Schwinger parameters")
    if not g.has_kinematics and B != 0:
        raise InhomogeneousNumerator("graphs without kinematics admit no power of Xi")
    h, n = g.loop_number, len(g.edges)
    if P.degree() != A * h + B * (h + 1) - n:
        return False
    for gamma in motic_subgraphs(g, include_self=False):
        hg = subgraph_loops(g, gamma)
        ind = 1 if mm_indicator(g, gamma) else 0
        if P.valuation(gamma) < A * hg + B * (hg + ind) - len(gamma) + 1:
            return False
    return True


# exponents read off the blow-up charts ---------------------------------------------------

def chart_exponents(g: FeynmanGraph, chart: FlagChart, A, B, P: KinPoly | None = None, polys=None) -> dict:
    """Exponent of each chart coordinate in pi^*(P Omega / Psi^A Xi^B).

    Includes the Jacobian; an exponent of -1 or less is a non-integrable pole.
    """
    ps, xs = polys if polys is not None else (psi(g), xi(g) if B else None)
    jac = chart.jacobian_exponents()
    e_psi = chart_pullback(chart, ps).exponents
    e_xi = chart_pullback(chart, xs).exponents if B else {}
    e_p = chart_pullback(chart, P).exponents if P is not None else {}
    out = {}
    for x in chart.coordinates:
        out[x] = jac.get(x, 0) + e_p.get(x, 0) - A * e_psi.get(x, 0) - B * e_xi.get(x, 0)
    return out


def chart_pole_orders(g: FeynmanGraph, d: int, charts=None) -> dict:
    """{divisor: pole order} read from the atlas of B_G for the plain integrand."""
    A, B = integrand_exponents(g, d)
    if not g.has_kinematics and B != 0:
        raise DivergentIntegrand("graphs without kinematics need sd_G = 0")
    charts = enumerate_flags(UnionClosedFamily.from_graph(g)) if charts is None else charts
    polys = (psi(g), xi(g) if B else None)
    out = {}
    for c in charts:
        for x, e in chart_exponents(g, c, A, B, polys=polys).items():
            e = -e
            out[c.divisor_of(x)] = int(e) if e == int(e) else e
    return out
