"""Canonical keys for unlabelled Feynman graphs.

Two graphs get the same key exactly when they are isomorphic as graphs with
mass labels and momentum labels, after merging legs per vertex and dropping
isolated vertices without momentum.  Edge labels are forgotten.

A key is a sorted tuple of component keys; a component key is
``(n_vertices, legs, edges)`` with vertices renumbered 0..n-1, ``legs`` a
tuple of (vertex, momentum indices) and ``edges`` a sorted tuple of
(u, v, mass) with u <= v.  The canonical numbering minimises this tuple over
all numberings compatible with a colour refinement of the vertices.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product

from .graph import Edge, FeynmanGraph, normalize_equivalence


def _refine(verts, adj, init):
    """Colour refinement; returns {vertex: rank}."""
    colour = dict(init)
    while True:
        sig = {}
        for v in verts:
            nb = tuple(sorted((colour[w], m) for w, m in adj[v]))
            sig[v] = (colour[v], nb)
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {v: ranks[sig[v]] for v in verts}
        if len(set(new.values())) == len(set(colour.values())):
            return new
        colour = new


def _component_key(verts, edges, legs):
    verts = sorted(verts)
    adj = {v: [] for v in verts}
    loops = {v: [] for v in verts}
    for e in edges:
        if e.u == e.v:
            loops[e.u].append(e.mass)
        else:
            adj[e.u].append((e.v, e.mass))
            adj[e.v].append((e.u, e.mass))
    init_sig = {v: (legs.get(v, ()), tuple(sorted(loops[v])), len(adj[v]),
                    tuple(sorted(m for _, m in adj[v]))) for v in verts}
    ranks = {s: i for i, s in enumerate(sorted(set(init_sig.values())))}
    colour = _refine(verts, adj, {v: ranks[init_sig[v]] for v in verts})
    cells = {}
    for v in verts:
        cells.setdefault(colour[v], []).append(v)
    ordered_cells = [cells[c] for c in sorted(cells)]
    best = None
    for choice in product(*(permutations(c) for c in ordered_cells)):
        order = [v for cell in choice for v in cell]
        pos = {v: i for i, v in enumerate(order)}
        ekey = tuple(sorted((min(pos[e.u], pos[e.v]), max(pos[e.u], pos[e.v]), e.mass) for e in edges))
        lkey = tuple(sorted((pos[v], ix) for v, ix in legs.items()))
        cand = (lkey, ekey)
        if best is None or cand < best:
            best = cand
    return (len(verts), best[0], best[1])


@lru_cache(maxsize=None)
def _graph_key(edges: tuple, legs: tuple, vertices: frozenset):
    from .graph import _DSU

    dsu = _DSU(vertices)
    for e in edges:
        dsu.union(e.u, e.v)
    comps = {}
    for v in vertices:
        comps.setdefault(dsu.find(v), set()).add(v)
    legmap = dict(legs)
    out = []
    for root, vs in comps.items():
        es = [e for e in edges if dsu.find(e.u) == root]
        lg = {v: legmap[v] for v in vs if v in legmap}
        out.append(_component_key(vs, es, lg))
    return tuple(sorted(out))


def canonical_key(g: FeynmanGraph) -> tuple:
    """Isomorphism-invariant key of g (edge labels forgotten)."""
    g = normalize_equivalence(g)
    return _graph_key(tuple(g.edges), g.legs, g.vertices)


def graph_from_key(key: tuple, nq: int | None = None, nm: int | None = None) -> FeynmanGraph:
    """A labelled representative of a key, edges labelled 1..N."""
    verts, edges, legs = [], [], []
    offset = 0
    for n, lkey, ekey in key:
        verts.extend(range(offset + 1, offset + n + 1))
        for u, v, m in ekey:
            edges.append((u + offset + 1, v + offset + 1, m))
        for v, ix in lkey:
            legs.append((v + offset + 1, ix))
        offset += n
    if nq is None:
        nq = max((i for _, ix in legs for i in ix), default=0)
    if nm is None:
        nm = max((m for _, _, m in edges), default=0)
    elist = tuple(Edge(k, u, v, m) for k, (u, v, m) in enumerate(edges, start=1))
    g = FeynmanGraph(frozenset(verts), elist, tuple(sorted(legs)), nq, nm, len(elist))
    g.validate()
    return g


def key_edges(key: tuple) -> int:
    return sum(len(c[2]) for c in key)


def key_loops(key: tuple) -> int:
    return sum(len(c[2]) - c[0] + 1 for c in key)


def key_has_kinematics(key: tuple) -> bool:
    return any(c[1] or any(m for _, _, m in c[2]) for c in key)


def key_product(*keys) -> tuple:
    """Disjoint union of graphs, as keys."""
    out = []
    for k in keys:
        out.extend(k)
    return tuple(sorted(out))


def key_to_text(key: tuple) -> str:
    """Compact printable form, e.g. ``[2|0-1,0-1m1|0:q1,1:q2]``."""
    parts = []
    for n, lkey, ekey in key:
        es = ",".join(f"{u}-{v}" + (f"m{m}" if m else "") for u, v, m in ekey)
        ls = ",".join(f"{v}:" + "+".join(f"q{i}" for i in ix) for v, ix in lkey)
        parts.append(f"[{n}|{es}|{ls}]")
    return "".join(parts) if parts else "1"
