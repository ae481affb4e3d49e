"""Feynman graph polynomials, motic subgraphs and their Hopf algebra,
blow-up atlases, power counting and sector integration."""

__version__ = "0.1.0"

from .errors import (
    BudgetExceeded,
    DivergentIntegrand,
    FeynpolyError,
    InhomogeneousNumerator,
    InvalidGraph,
    NonGenericPoint,
    NotMassMomentumSpanning,
    NotMotic,
    NotUnionClosed,
    OddDimension,
    ParseError,
    ReconstructionStuck,
    ZeroPolynomial,
)
from .graph import FeynmanGraph, is_mm, is_motic, motic_subgraphs, quotient, restrict
from .poly import KinPoly, format_poly, parse_poly
from .symanzik import KinPoint, factorization_remainder, phi, psi, reconstruct_polynomials, xi
from .canon import canonical_key
from .hopf import antipode, coproduct, coradical_degree, descendants
from .blowup import UnionClosedFamily, chart_pullback, enumerate_flags, face_poset
from .convergence import is_convergent, pole_order, power_count, sd
from .integrate import Integrand, build_sectors, integrate
from .strata import nested_chains
from .io import load_graph, parse_graph
