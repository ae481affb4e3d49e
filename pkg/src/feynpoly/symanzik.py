"""Graph polynomials Psi, Phi and Xi.

Psi_G is the sum over spanning trees T of prod_{e not in T} alpha_e, Phi_G
the sum over spanning 2-trees weighted by the squared momentum flowing into
one of the two trees, and Xi_G = Phi_G + (sum_e m_e^2 alpha_e) Psi_G.  For
disconnected graphs Psi is the product over components and Phi is Phi of the
component carrying the momenta times Psi of the others.

The default evaluation uses contraction-deletion with memoisation.  Spanning
forest enumeration and, for Psi, the matrix-tree determinant are kept as
independent routes for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import NotMassMomentumSpanning, ReconstructionStuck
from .graph import (
    EMPTY,
    FeynmanGraph,
    _DSU,
    _edges_of,
    contract_edge,
    delete,
    forest_parts,
    is_mm,
    is_momentum_spanning,
    momentum_vector,
    motic_subgraphs,
    quotient,
    restrict,
    spanning_k_trees,
    subgraph_loops,
)
from .poly import KinPoly, KinSpace, all_monomials, kin_space, square_of_vector


def space_of(g: FeynmanGraph) -> KinSpace:
    return kin_space(g.nq, g.nm)


def _one(g):
    return KinPoly.const(g.nalpha, space_of(g), 1)


def _zero(g):
    return KinPoly.zero(g.nalpha, space_of(g))


# contraction-deletion route -------------------------------------------------

def _connected(vertices, edges) -> bool:
    dsu = _DSU(vertices)
    for _, u, v in edges:
        dsu.union(u, v)
    return len({dsu.find(x) for x in vertices}) <= 1


def _contract(edges, e):
    _, a, b = e
    keep, drop = (a, b) if a < b else (b, a)
    out = []
    for lab, u, v in edges:
        if lab == e[0]:
            continue
        u = keep if u == drop else u
        v = keep if v == drop else v
        out.append((lab, u, v))
    return tuple(out), keep, drop


def _verts(edges):
    out = set()
    for _, u, v in edges:
        out.add(u)
        out.add(v)
    return out


@lru_cache(maxsize=None)
def _psi_conn(edges: tuple, nalpha: int, space: KinSpace) -> KinPoly:
    """Psi of a connected graph given by its edge triples."""
    if not edges:
        return KinPoly.const(nalpha, space, 1)
    e = edges[0]
    rest = edges[1:]
    if e[1] == e[2]:
        return KinPoly.alpha(nalpha, space, e[0]) * _psi_conn(rest, nalpha, space)
    cont, _, _ = _contract(edges, e)
    out = _psi_conn(cont, nalpha, space)
    if _connected(_verts(edges), rest):
        out = out + KinPoly.alpha(nalpha, space, e[0]) * _psi_conn(rest, nalpha, space)
    return out


def _split(vertices, edges):
    """Connected components of (vertices, edges) as (vertex set, edge tuple)."""
    dsu = _DSU(vertices)
    for _, u, v in edges:
        dsu.union(u, v)
    comps = {}
    for x in vertices:
        comps.setdefault(dsu.find(x), (set(), []))[0].add(x)
    for t in edges:
        comps[dsu.find(t[1])][1].append(t)
    return [(frozenset(a), tuple(b)) for a, b in comps.values()]


def _sq(vec, nalpha, space):
    return square_of_vector(vec, nalpha, space)


@lru_cache(maxsize=None)
def _phi_conn(edges: tuple, moms: tuple, nalpha: int, space: KinSpace) -> KinPoly:
    """Phi of a connected graph; moms is a sorted tuple of (vertex, vector)."""
    if not edges or not moms:
        return KinPoly.zero(nalpha, space)
    e = edges[0]
    rest = edges[1:]
    a_e = KinPoly.alpha(nalpha, space, e[0])
    if e[1] == e[2]:
        return a_e * _phi_conn(rest, moms, nalpha, space)
    cont, keep, drop = _contract(edges, e)
    merged = {}
    for v, vec in moms:
        v = keep if v == drop else v
        merged[v] = tuple(x + y for x, y in zip(merged.get(v, (0,) * len(vec)), vec))
    cmoms = tuple(sorted((v, vec) for v, vec in merged.items() if any(vec)))
    out = _phi_conn(cont, cmoms, nalpha, space)
    verts = _verts(edges) | {v for v, _ in moms}
    parts = _split(verts, rest)
    if len(parts) == 1:
        return out + a_e * _phi_conn(rest, moms, nalpha, space)
    # bridge: Psi_G1 Psi_G2 (q^{G1})^2
    (v1, e1), (v2, e2) = parts
    dim = len(moms[0][1])
    q1 = [0] * dim
    for v, vec in moms:
        if v in v1:
            q1 = [x + y for x, y in zip(q1, vec)]
    if any(q1):
        term = _psi_conn(e1, nalpha, space) * _psi_conn(e2, nalpha, space) * _sq(tuple(q1), nalpha, space)
        out = out + a_e * term
    return out


def _triples(g: FeynmanGraph, labels=None):
    em = g.edge_map
    labs = g.labels if labels is None else sorted(labels)
    return tuple((k, em[k].u, em[k].v) for k in labs)


def _psi_deletion(g: FeynmanGraph) -> KinPoly:
    space = space_of(g)
    out = KinPoly.const(g.nalpha, space, 1)
    for _, labs in g.components:
        if labs:
            out = out * _psi_conn(_triples(g, labs), g.nalpha, space)
    return out


def _phi_deletion(g: FeynmanGraph) -> KinPoly:
    space = space_of(g)
    moms = g.vertex_momenta
    if not moms:
        return KinPoly.zero(g.nalpha, space)
    out = KinPoly.const(g.nalpha, space, 1)
    for verts, labs in g.components:
        tr = _triples(g, labs)
        cm = tuple(sorted((v, vec) for v, vec in moms.items() if v in verts))
        if cm:
            out = out * _phi_conn(tr, cm, g.nalpha, space)
        elif labs:
            out = out * _psi_conn(tr, g.nalpha, space)
    return out


# spanning forest route --------------------------------------------------------

def _complement_monomial(g: FeynmanGraph, labels, forest) -> tuple:
    a = [0] * g.nalpha
    for k in labels:
        if k not in forest:
            a[k - 1] = 1
    return tuple(a)


def _component_graph(g: FeynmanGraph, verts, labs) -> FeynmanGraph:
    em = g.edge_map
    legs = tuple((v, ix) for v, ix in g.legs if v in verts)
    return g.replace(vertices=verts, edges=tuple(em[k] for k in sorted(labs)), legs=legs)


def _psi_trees(g: FeynmanGraph) -> KinPoly:
    space = space_of(g)
    zk = (0,) * len(space)
    out = _one(g)
    for verts, labs in g.components:
        c = _component_graph(g, verts, labs)
        terms = {(_complement_monomial(g, labs, t), zk): 1 for t in spanning_k_trees(c, 1)}
        out = out * KinPoly(g.nalpha, space, terms)
    return out


def _phi_trees(g: FeynmanGraph) -> KinPoly:
    space = space_of(g)
    moms = g.vertex_momenta
    if not moms:
        return _zero(g)
    out = _one(g)
    dim = max(g.nq - 1, 0)
    for verts, labs in g.components:
        c = _component_graph(g, verts, labs)
        if not (verts & set(moms)):
            out = out * _psi_trees(c)
            continue
        acc = _zero(g)
        for t in spanning_k_trees(c, 2):
            part = forest_parts(c, t)[0]
            q = [0] * dim
            for v in part:
                if v in moms:
                    q = [x + y for x, y in zip(q, moms[v])]
            if any(q):
                mono = KinPoly.const(g.nalpha, space, 1).times_monomial(_complement_monomial(g, labs, t))
                acc = acc + mono * _sq(tuple(q), g.nalpha, space)
        out = out * acc
    return out


# matrix-tree route for Psi ------------------------------------------------------

def _det_dp(matrix) -> KinPoly:
    """Determinant by expansion along rows with memoisation on used columns."""
    n = len(matrix)
    memo = {}

    def rec(row, used):
        if row == n:
            return None  # unit
        key = (row, used)
        if key in memo:
            return memo[key]
        total = None
        for j in range(n):
            if used >> j & 1:
                continue
            entry = matrix[row][j]
            if entry is None or entry.is_zero():
                continue
            sub = rec(row + 1, used | (1 << j))
            if sub is not None and sub.is_zero():
                continue
            term = entry if sub is None else entry * sub
            # sign: number of used columns to the right of j
            if bin(used >> (j + 1)).count("1") % 2:
                term = -term
            total = term if total is None else total + term
        memo[key] = total if total is not None else matrix[0][0].like()
        return memo[key]

    return rec(0, 0)


def _psi_kirchhoff(g: FeynmanGraph) -> KinPoly:
    space = space_of(g)
    zk = (0,) * len(space)
    out = _one(g)
    for verts, labs in g.components:
        vs = sorted(verts)
        if len(vs) == 1:
            a = [0] * g.nalpha
            for k in labs:
                a[k - 1] = 1
            out = out * KinPoly(g.nalpha, space, {(tuple(a), zk): 1})
            continue
        idx = {v: i for i, v in enumerate(vs[1:])}
        n = len(idx)
        zero = _zero(g)
        mat = [[zero for _ in range(n)] for _ in range(n)]
        for k in labs:
            e = g.edge_map[k]
            if e.is_tadpole:
                continue
            x = KinPoly.alpha(g.nalpha, space, k)
            for a, b in ((e.u, e.v), (e.v, e.u)):
                if a in idx:
                    mat[idx[a]][idx[a]] = mat[idx[a]][idx[a]] + x
                    if b in idx:
                        mat[idx[a]][idx[b]] = mat[idx[a]][idx[b]] - x
        det = _det_dp(mat)
        terms = {}
        for (a, _), c in det.terms.items():
            if c != 1:
                raise ArithmeticError("matrix-tree determinant is not a 0/1 tree sum")
            forest = {k for k in labs if a[k - 1]}
            terms[(_complement_monomial(g, labs, forest), zk)] = 1
        out = out * KinPoly(g.nalpha, space, terms)
    return out


# public polynomials ---------------------------------------------------------------

def psi(g: FeynmanGraph, method: str = "deletion") -> KinPoly:
    """First Symanzik polynomial.  method: deletion, trees or kirchhoff."""
    if method == "deletion":
        return _psi_deletion(g)
    if method == "trees":
        return _psi_trees(g)
    if method == "kirchhoff":
        return _psi_kirchhoff(g)
    raise ValueError(f"unknown method {method!r}")


def phi(g: FeynmanGraph, method: str = "deletion") -> KinPoly:
    """Second Symanzik polynomial, momentum part only."""
    if method == "deletion":
        return _phi_deletion(g)
    if method == "trees":
        return _phi_trees(g)
    raise ValueError(f"unknown method {method!r}")


def mass_form(g: FeynmanGraph) -> KinPoly:
    """sum_e m_e^2 alpha_e."""
    space = space_of(g)
    out = _zero(g)
    for e in g.edges:
        if e.mass:
            out = out + KinPoly.kin_var(g.nalpha, space, space.msq_index(e.mass)) * KinPoly.alpha(
                g.nalpha, space, e.label
            )
    return out


def xi(g: FeynmanGraph, method: str = "deletion") -> KinPoly:
    """Xi = Phi + (sum_e m_e^2 alpha_e) Psi."""
    return phi(g, method) + mass_form(g) * psi(g, method)


def momentum_square(g: FeynmanGraph, vertices) -> KinPoly:
    """(q^V)^2 for the total momentum entering a vertex set."""
    dim = max(g.nq - 1, 0)
    q = [0] * dim
    for v, vec in g.vertex_momenta.items():
        if v in vertices:
            q = [x + y for x, y in zip(q, vec)]
    return square_of_vector(tuple(q), g.nalpha, space_of(g))


def contraction_deletion(g: FeynmanGraph, e: int):
    """(Psi0_{G\\e}, Psi_{G//e}, Phi0_{G\\e}, Phi_{G//e}).

    Psi_G = Psi0 alpha_e + Psi_{G//e} and Phi_G = Phi0 alpha_e + Phi_{G//e}.
    When e is a bridge, Psi0 = 0 and Phi0 = Psi_{G1} Psi_{G2} (q^{G1})^2.
    """
    gd = delete(g, e)
    gc = contract_edge(g, e)
    psi_c = psi(gc) if gc is not EMPTY else _zero(g)
    phi_c = phi(gc) if gc is not EMPTY else _zero(g)
    if gd.n_components == g.n_components:
        return psi(gd), psi_c, phi(gd), phi_c
    edge = g.edge_map[e]
    side = next(vs for vs, _ in gd.components if edge.u in vs)
    return _zero(g), psi_c, psi(gd) * momentum_square(g, side), phi_c


def order_of_vanishing(P: KinPoly, gamma) -> int:
    """Minimum over monomials of the degree in the alphas of gamma."""
    return P.valuation(_edges_of(gamma))


# factorization ------------------------------------------------------------------

KINDS = ("PsiUV", "PhiUV", "XiUV", "PhiIR", "XiIR")


@dataclass
class Factorization:
    kind: str
    gamma: frozenset
    product: KinPoly
    remainder: KinPoly
    min_degree: Optional[int]  # None when the remainder vanishes
    bound: int  # the remainder must have gamma-degree > bound

    @property
    def holds(self) -> bool:
        return self.min_degree is None or self.min_degree > self.bound


def factorization_remainder(g: FeynmanGraph, gamma, kind: str) -> Factorization:
    """Split a graph polynomial into the factorised part and its remainder."""
    gamma = _edges_of(gamma)
    h = subgraph_loops(g, gamma)
    q = quotient(g, gamma)
    if kind == "PsiUV":
        whole, prod, bound = psi(g), psi(restrict(g, gamma)) * psi(q), h
    elif kind == "PhiUV":
        whole, prod, bound = phi(g), psi(restrict(g, gamma)) * phi(q), h
    elif kind == "XiUV":
        whole, prod, bound = xi(g), psi(restrict(g, gamma)) * xi(q), h
    elif kind == "PhiIR":
        if not is_momentum_spanning(g, gamma):
            raise NotMassMomentumSpanning("infrared factorization of Phi needs a momentum-spanning subgraph")
        whole, prod, bound = phi(g), phi(restrict(g, gamma, "momenta")) * psi(q), h + 1
    elif kind == "XiIR":
        if not is_mm(g, gamma):
            raise NotMassMomentumSpanning("infrared factorization of Xi needs a mass-momentum spanning subgraph")
        whole, prod, bound = xi(g), xi(restrict(g, gamma)) * psi(q), h + 1
    else:
        raise ValueError(f"unknown factorization kind {kind!r}")
    rem = whole - prod
    md = rem.valuation(gamma) if rem else None
    return Factorization(kind, gamma, prod, rem, md, bound)


# kinematic points ------------------------------------------------------------------

@dataclass
class KinPoint:
    """Numeric values for s_ij and m_k^2."""

    nq: int
    nm: int
    s: dict
    msq: dict

    @property
    def space(self) -> KinSpace:
        return kin_space(self.nq, self.nm)

    def values(self) -> list:
        out = []
        for i, j in self.space.pairs:
            out.append(self.msq.get(j, 0) if i == 0 else self.s.get((i, j), self.s.get((j, i), 0)))
        return out

    def s_of(self, subset) -> complex:
        """s_I = (sum_{i in I} q_i)^2."""
        vec = momentum_vector(tuple(subset), self.nq)
        total = 0
        for a in range(len(vec)):
            for b in range(len(vec)):
                if vec[a] and vec[b]:
                    i, j = min(a, b) + 1, max(a, b) + 1
                    total += vec[a] * vec[b] * self.s.get((i, j), 0)
        return total

    def _subsets(self):
        idx = range(1, self.nq + 1)
        for r in range(1, self.nq):
            yield from combinations(idx, r)

    def is_generic(self, tol: float = 1e-12) -> bool:
        """No s_I + m_j^2 vanishes (m_0 = 0), I a nonempty proper subset."""
        masses = [0] + [self.msq.get(k, 0) for k in range(1, self.nm + 1)]
        for sub in self._subsets():
            s = self.s_of(sub)
            for m in masses:
                if abs(s + m) <= tol:
                    return False
        return True

    def in_generic_region(self) -> bool:
        """Re s_I > 0 for every nonempty proper I and Re m_k^2 > 0."""
        for sub in self._subsets():
            if np.real(self.s_of(sub)) <= 0:
                return False
        return all(np.real(self.msq.get(k, 0)) > 0 for k in range(1, self.nm + 1))

    @classmethod
    def random(cls, nq: int, nm: int, rng=None, dim: int = 4) -> "KinPoint":
        """Euclidean momenta and positive masses; resamples off degenerate loci."""
        rng = np.random.default_rng(rng)
        while True:
            vecs = rng.normal(size=(max(nq - 1, 0), dim))
            s = {}
            for i in range(1, nq):
                for j in range(i, nq):
                    s[(i, j)] = float(vecs[i - 1] @ vecs[j - 1])
            msq = {k: float(rng.uniform(0.5, 2.0)) for k in range(1, nm + 1)}
            pt = cls(nq, nm, s, msq)
            if pt.is_generic(1e-6) and (nq < 2 or pt.in_generic_region()):
                return pt


# reconstruction from the factorization axioms ------------------------------------------

def _graph_key(g: FeynmanGraph):
    return (tuple(g.edges), g.legs, g.nq, g.nm, g.nalpha)


class _Reconstructor:
    """Rebuild (P_G, C_G) from partial factorisation, edge contraction and
    the single-edge and massive-banana initial conditions only."""

    def __init__(self):
        self.memo = {}

    def run(self, g: FeynmanGraph):
        key = _graph_key(g)
        if key not in self.memo:
            self.memo[key] = self._compute(g)
        return self.memo[key]

    def _compute(self, g: FeynmanGraph):
        space = space_of(g)
        n, nk = g.nalpha, len(space)
        if not g.edges:
            return _one(g), _zero(g)
        if len(g.edges) == 1:
            return psi(g), xi(g)
        labels = g.labels
        h = g.loop_number
        strict = [s for s in motic_subgraphs(g, include_self=False)]
        pieces = {}

        def factors(gamma):
            if gamma not in pieces:
                sub = restrict(g, gamma)
                quo = quotient(g, gamma)
                ps, cs = self.run(sub)
                pq, cq = self.run(quo)
                hg = subgraph_loops(g, gamma)
                mm = g.has_kinematics and is_mm(g, gamma)
                # (P product, P degree bound, C product, C degree bound)
                if mm:
                    pieces[gamma] = (ps * pq, hg, cs * pq, hg + 1)
                else:
                    pieces[gamma] = (ps * pq, hg, ps * cq, hg)
            return pieces[gamma]

        contracted = {}

        def contraction(e):
            if e not in contracted:
                gc = contract_edge(g, e)
                contracted[e] = (_zero(g), _zero(g)) if gc is EMPTY else self.run(gc)
            return contracted[e]

        banana = self._massive_banana_coefficient(g)
        result = []
        for which, deg in ((0, h), (1, h + 1)):
            terms = {}
            if which == 1 and not g.has_kinematics:
                # without masses or momenta the second polynomial vanishes
                result.append(KinPoly(n, space, terms))
                continue
            for mono in all_monomials(labels, deg):
                a = [0] * n
                for k, p in mono.items():
                    a[k - 1] = p
                a = tuple(a)
                coeff = self._coefficient(g, which, a, labels, strict, factors, contraction, banana)
                for (aa, kk), c in coeff.terms.items():
                    terms[(a, kk)] = c
            result.append(KinPoly(n, space, terms))
        return tuple(result)

    @staticmethod
    def _massive_banana_coefficient(g):
        if len(g.vertices) != 2 or g.n_components != 1:
            return None
        if any(e.is_tadpole or not e.mass for e in g.edges):
            return None
        space = space_of(g)
        out = momentum_square(g, {min(g.vertices)})
        for e in g.edges:
            out = out + KinPoly.kin_var(g.nalpha, space, space.msq_index(e.mass))
        return out

    @staticmethod
    def _coefficient(g, which, a, labels, strict, factors, contraction, banana):
        missing = [k for k in labels if a[k - 1] == 0]
        if missing:
            return contraction(missing[0])[which].alpha_coefficient(a)
        for gamma in strict:
            pp, pb, cp, cb = factors(gamma)
            prod, bound = (pp, pb) if which == 0 else (cp, cb)
            d = sum(a[k - 1] for k in gamma)
            if d < bound:
                return prod.like()
            if d == bound:
                return prod.alpha_coefficient(a)
        if which == 1 and banana is not None and all(x == 1 for x in (a[k - 1] for k in labels)):
            return banana
        raise ReconstructionStuck(f"no axiom determines the coefficient of {a} in {g!r}")


def reconstruct_polynomials(g: FeynmanGraph):
    """(P_G, C_G) rebuilt from the uniqueness axioms; equals (psi, xi) for motic g."""
    return _Reconstructor().run(g)
