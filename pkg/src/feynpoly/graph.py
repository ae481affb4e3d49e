"""Feynman graphs with labelled edges, masses and external momenta.

A graph has a vertex set, internal edges labelled by positive integers, a
mass label per edge (0 for massless, k for the mass m_k) and external legs.
A leg is a pair (vertex, momentum indices): the incoming momentum at the
vertex is the formal sum of the generators q_i listed.  The generators obey
q_1 + ... + q_Q = 0, and q_Q is eliminated whenever a momentum has to be
written in coordinates.

Subgraphs are always edge subgraphs, given as a set of edge labels.  Their
vertices are the endpoints of the chosen edges.  Quotients and deletions keep
the original edge labels, so that polynomials of subgraphs and quotients live
in the same ring as those of the parent graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator

from .errors import InvalidGraph

EMPTY = None  # sentinel for the empty graph G//e when e is a tadpole


@dataclass(frozen=True, order=True)
class Edge:
    label: int
    u: int
    v: int
    mass: int = 0

    @property
    def is_tadpole(self) -> bool:
        return self.u == self.v


class _DSU:
    """Union-find on hashable vertex ids."""

    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def find(self, x):
        p = self.parent
        p.setdefault(x, x)
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def momentum_vector(indices: Iterable[int], nq: int) -> tuple[int, ...]:
    """Coordinates of sum(q_i for i in indices) in the basis q_1..q_{nq-1}."""
    vec = [0] * max(nq - 1, 0)
    for i in indices:
        if i < nq:
            vec[i - 1] += 1
        else:
            for j in range(nq - 1):
                vec[j] -= 1
    return tuple(vec)


@dataclass(frozen=True)
class FeynmanGraph:
    """A labelled Feynman graph.

    ``nq`` and ``nm`` fix the kinematic ring (momentum generators and mass
    labels), ``nalpha`` the number of Schwinger parameters of the ambient
    graph.  All three are inherited by subgraphs and quotients.
    """

    vertices: frozenset
    edges: tuple
    legs: tuple = ()
    nq: int = 0
    nm: int = 0
    nalpha: int = 0

    # construction -------------------------------------------------------

    @classmethod
    def build(cls, vertices, edges, legs=(), nq=None, nm=None) -> "FeynmanGraph":
        """Build a graph with edges labelled 1..N in the given order.

        ``vertices`` is a vertex count (ids 1..n) or an iterable of ids,
        ``edges`` a sequence of (u, v) or (u, v, mass), ``legs`` a sequence
        of (vertex, momentum index).
        """
        if isinstance(vertices, int):
            vset = frozenset(range(1, vertices + 1))
        else:
            vset = frozenset(vertices)
        elist = []
        for k, e in enumerate(edges, start=1):
            u, v = e[0], e[1]
            mass = e[2] if len(e) > 2 else 0
            elist.append(Edge(k, u, v, int(mass)))
        leglist = tuple(sorted((int(v), (int(i),)) for v, i in legs))
        if nq is None:
            nq = max((i for _, ix in leglist for i in ix), default=0)
        if nm is None:
            nm = max((e.mass for e in elist), default=0)
        g = cls(vset, tuple(elist), leglist, nq, nm, len(elist))
        g.validate()
        return g

    def validate(self) -> None:
        for e in self.edges:
            if e.u not in self.vertices or e.v not in self.vertices:
                raise InvalidGraph(f"edge {e.label} has an endpoint outside the vertex set")
            if e.mass < 0 or e.mass > self.nm:
                raise InvalidGraph(f"edge {e.label} has mass label {e.mass} outside 0..{self.nm}")
        for v, ix in self.legs:
            if v not in self.vertices:
                raise InvalidGraph(f"leg at unknown vertex {v}")
            if any(i < 1 or i > self.nq for i in ix):
                raise InvalidGraph(f"leg at vertex {v} has a momentum index outside 1..{self.nq}")
        if not self.legs_connected:
            raise InvalidGraph("external legs lie in more than one connected component")

    def replace(self, **kw) -> "FeynmanGraph":
        d = dict(vertices=self.vertices, edges=self.edges, legs=self.legs,
                 nq=self.nq, nm=self.nm, nalpha=self.nalpha)
        d.update(kw)
        return FeynmanGraph(**d)

    # basic data ---------------------------------------------------------

    @cached_property
    def edge_map(self) -> dict:
        return {e.label: e for e in self.edges}

    @cached_property
    def labels(self) -> tuple:
        return tuple(e.label for e in self.edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def massive(self) -> frozenset:
        return frozenset(e.label for e in self.edges if e.mass)

    @cached_property
    def vertex_momenta(self) -> dict:
        """Nonzero incoming momentum per vertex, as a coefficient vector."""
        merged = {}
        for v, ix in self.legs:
            merged.setdefault(v, []).extend(ix)
        out = {}
        for v, ix in merged.items():
            vec = momentum_vector(ix, self.nq)
            if any(vec):
                out[v] = vec
        return out

    @cached_property
    def leg_vertices(self) -> frozenset:
        return frozenset(self.vertex_momenta)

    @property
    def has_kinematics(self) -> bool:
        return bool(self.leg_vertices) or bool(self.massive)

    @property
    def kind(self) -> tuple:
        """(has momenta, has masses)."""
        return (bool(self.leg_vertices), bool(self.massive))

    @cached_property
    def components(self) -> list:
        """Connected components as (vertex set, edge label set), sorted."""
        dsu = _DSU(self.vertices)
        for e in self.edges:
            dsu.union(e.u, e.v)
        comps = {}
        for v in self.vertices:
            comps.setdefault(dsu.find(v), (set(), set()))[0].add(v)
        for e in self.edges:
            comps[dsu.find(e.u)][1].add(e.label)
        out = [(frozenset(a), frozenset(b)) for a, b in comps.values()]
        return sorted(out, key=lambda c: min(c[0]))

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def legs_connected(self) -> bool:
        lv = self.leg_vertices
        return sum(1 for vs, _ in self.components if vs & lv) <= 1

    @cached_property
    def loop_number(self) -> int:
        return len(self.edges) - len(self.vertices) + self.n_components

    def __repr__(self) -> str:
        es = ", ".join(f"{e.label}:{e.u}-{e.v}" + (f"m{e.mass}" if e.mass else "") for e in self.edges)
        ls = ", ".join(f"{v}:" + "+".join(f"q{i}" for i in ix) for v, ix in self.legs)
        return f"FeynmanGraph(V={sorted(self.vertices)}, E=[{es}], legs=[{ls}])"


@dataclass(frozen=True)
class EdgeSubgraph:
    """An edge subgraph of ``parent`` given by its edge labels."""

    parent: FeynmanGraph
    edge_set: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "edge_set", frozenset(self.edge_set))
        if not self.edge_set <= set(self.parent.labels):
            raise InvalidGraph("subgraph edges are not edges of the parent graph")

    @property
    def vertices(self) -> frozenset:
        return subgraph_vertices(self.parent, self.edge_set)

    @property
    def loop_number(self) -> int:
        return subgraph_loops(self.parent, self.edge_set)

    @property
    def is_mm(self) -> bool:
        return is_mm(self.parent, self.edge_set)

    @property
    def is_motic(self) -> bool:
        return is_motic(self.parent, self.edge_set)

    def as_graph(self) -> FeynmanGraph:
        return restrict(self.parent, self.edge_set)


def _edges_of(gamma) -> frozenset:
    if isinstance(gamma, EdgeSubgraph):
        return gamma.edge_set
    return frozenset(gamma)


# invariants ---------------------------------------------------------------

def subgraph_vertices(g: FeynmanGraph, gamma) -> frozenset:
    em = g.edge_map
    out = set()
    for k in _edges_of(gamma):
        e = em[k]
        out.add(e.u)
        out.add(e.v)
    return frozenset(out)


def _forest_data(g: FeynmanGraph, gamma):
    """(dsu, number of components, loop number) of the edge subgraph."""
    em = g.edge_map
    dsu = _DSU()
    verts = set()
    cycles = 0
    for k in gamma:
        e = em[k]
        verts.add(e.u)
        verts.add(e.v)
        if not dsu.union(e.u, e.v):
            cycles += 1
    kappa = len({dsu.find(v) for v in verts})
    return dsu, verts, kappa, cycles


def subgraph_loops(g: FeynmanGraph, gamma) -> int:
    return _forest_data(g, _edges_of(gamma))[3]


def loop_number(g, gamma=None) -> int:
    """Loop number h = N - |V| + kappa of a graph or of an edge subgraph."""
    if isinstance(g, EdgeSubgraph):
        return g.loop_number
    if gamma is None:
        return g.loop_number
    return subgraph_loops(g, gamma)


def is_momentum_spanning(g: FeynmanGraph, gamma) -> bool:
    lv = g.leg_vertices
    if not lv:
        return True
    dsu, verts, _, _ = _forest_data(g, _edges_of(gamma))
    if not lv <= verts:
        return False
    return len({dsu.find(v) for v in lv}) == 1


def is_mass_spanning(g: FeynmanGraph, gamma) -> bool:
    return g.massive <= _edges_of(gamma)


def is_mm(g: FeynmanGraph, gamma) -> bool:
    """Mass-momentum spanning: contains every massive edge and connects all legs."""
    return is_mass_spanning(g, gamma) and is_momentum_spanning(g, gamma)


# graph operations -----------------------------------------------------------

def restrict(g: FeynmanGraph, gamma, kinematics=None) -> FeynmanGraph:
    """The edge subgraph gamma as a Feynman graph.

    By default it keeps the masses and external momenta of g when gamma is
    mass-momentum spanning and is massless without legs otherwise.
    ``kinematics="momenta"`` keeps only the legs, for momentum-spanning
    gamma.
    """
    gamma = _edges_of(gamma)
    em = g.edge_map
    verts = subgraph_vertices(g, gamma)
    if kinematics is None:
        kinematics = "all" if is_mm(g, gamma) else "none"
    keep_mass = kinematics == "all"
    keep_legs = kinematics in ("all", "momenta")
    edges = tuple(
        em[k] if keep_mass else Edge(k, em[k].u, em[k].v, 0) for k in sorted(gamma)
    )
    legs = ()
    if keep_legs and g.leg_vertices:
        if not g.leg_vertices <= verts:
            raise InvalidGraph("cannot keep legs on a subgraph that misses a leg vertex")
        legs = tuple((v, ix) for v, ix in g.legs if v in verts)
    return g.replace(vertices=verts, edges=edges, legs=legs)


def _merge_legs(legs, nq) -> tuple:
    merged = {}
    for v, ix in legs:
        merged.setdefault(v, []).extend(ix)
    out = []
    for v in sorted(merged):
        ix = tuple(sorted(merged[v]))
        if any(momentum_vector(ix, nq)):
            out.append((v, ix))
    return tuple(out)


def quotient(g: FeynmanGraph, gamma) -> FeynmanGraph:
    """Contract every connected component of gamma to a vertex."""
    gamma = _edges_of(gamma)
    em = g.edge_map
    dsu = _DSU(g.vertices)
    for k in gamma:
        dsu.union(em[k].u, em[k].v)
    verts = frozenset(dsu.find(v) for v in g.vertices)
    edges = tuple(
        Edge(e.label, dsu.find(e.u), dsu.find(e.v), e.mass) for e in g.edges if e.label not in gamma
    )
    legs = _merge_legs(((dsu.find(v), ix) for v, ix in g.legs), g.nq)
    return g.replace(vertices=verts, edges=edges, legs=legs)


def delete(g: FeynmanGraph, e: int) -> FeynmanGraph:
    """Remove edge e and keep its endpoints.

    The result may have legs in several components, in which case it is
    not a Feynman graph (``legs_connected`` is false).
    """
    return g.replace(edges=tuple(x for x in g.edges if x.label != e))


def contract_forest(g: FeynmanGraph, gamma):
    """G//gamma: the quotient when gamma is a forest, EMPTY otherwise."""
    gamma = _edges_of(gamma)
    if subgraph_loops(g, gamma) > 0:
        return EMPTY
    return quotient(g, gamma)


def contract_edge(g: FeynmanGraph, e: int):
    return contract_forest(g, (e,))


def normalize_equivalence(g: FeynmanGraph) -> FeynmanGraph:
    """Merge legs per vertex, drop zero momenta and isolated bare vertices."""
    legs = _merge_legs(g.legs, g.nq)
    leg_vs = {v for v, _ in legs}
    used = set(leg_vs)
    for e in g.edges:
        used.add(e.u)
        used.add(e.v)
    return g.replace(vertices=frozenset(used), legs=legs)


def is_1pi(g: FeynmanGraph, gamma=None) -> bool:
    """True when no edge is a bridge, i.e. deleting any edge drops h."""
    edges = g.labels if gamma is None else tuple(sorted(_edges_of(gamma)))
    h = subgraph_loops(g, edges)
    for k in edges:
        rest = [x for x in edges if x != k]
        if subgraph_loops(g, rest) == h:
            return False
    return True


# motic subgraphs ------------------------------------------------------------

def _motic_fast(g: FeynmanGraph, gamma: frozenset, carry: bool) -> bool:
    h = subgraph_loops(g, gamma)
    for k in gamma:
        rest = gamma - {k}
        if subgraph_loops(g, rest) == h and (not carry or is_mm(g, rest)):
            return False
    return True


def is_motic(g: FeynmanGraph, gamma, method: str = "fast") -> bool:
    """Every strict mass-momentum spanning subgraph has fewer loops.

    Spanning is measured inside gamma: if gamma is not mass-momentum
    spanning in g it carries no kinematics and every subgraph qualifies,
    so gamma is motic exactly when it is 1PI.  ``method="definition"``
    runs over all strict subgraphs, ``"fast"`` only over single-edge
    deletions.
    """
    gamma = _edges_of(gamma)
    carry = g.has_kinematics and is_mm(g, gamma)
    if method == "fast":
        return _motic_fast(g, gamma, carry)
    h = subgraph_loops(g, gamma)
    items = sorted(gamma)
    for r in range(len(items)):
        for sub in combinations(items, r):
            sub = frozenset(sub)
            if subgraph_loops(g, sub) >= h and (not carry or is_mm(g, sub)):
                return False
    return True


def all_edge_subsets(g: FeynmanGraph) -> Iterator[frozenset]:
    """Every edge subset, in lexicographic order of sorted label tuples."""
    labels = g.labels
    subsets = []
    for r in range(len(labels) + 1):
        subsets.extend(combinations(labels, r))
    subsets.sort()
    for s in subsets:
        yield frozenset(s)


def motic_subgraphs(g: FeynmanGraph, include_self: bool = True) -> list:
    """All nonempty motic edge subgraphs in lexicographic order."""
    full = frozenset(g.labels)
    out = []
    for s in all_edge_subsets(g):
        if not s or (s == full and not include_self):
            continue
        if is_motic(g, s):
            out.append(s)
    return out


def spanning_k_trees(g: FeynmanGraph, k: int) -> Iterator[frozenset]:
    """Spanning forests of g with exactly k trees covering every vertex."""
    if k < 1:
        raise ValueError("k must be at least 1")
    size = len(g.vertices) - k
    if size < 0:
        return
    cand = [e for e in g.edges if not e.is_tadpole]
    for combo in combinations(cand, size):
        dsu = _DSU(g.vertices)
        if all(dsu.union(e.u, e.v) for e in combo):
            yield frozenset(e.label for e in combo)


def forest_parts(g: FeynmanGraph, forest) -> list:
    """Vertex sets of the trees of a spanning forest."""
    em = g.edge_map
    dsu = _DSU(g.vertices)
    for k in forest:
        dsu.union(em[k].u, em[k].v)
    parts = {}
    for v in g.vertices:
        parts.setdefault(dsu.find(v), set()).add(v)
    return sorted((frozenset(p) for p in parts.values()), key=min)
