"""Named example graphs and a reproducible random corpus."""

from __future__ import annotations

import numpy as np

from .canon import canonical_key
from .graph import FeynmanGraph


def dunce_cap() -> FeynmanGraph:
    """Massive edge 1 between the two leg vertices, a bubble 3,4 and edge 2."""
    return FeynmanGraph.build(3, [(1, 2, 1), (1, 3), (3, 2), (3, 2)], [(1, 1), (2, 2)])


def one_loop_massive_triangle() -> FeynmanGraph:
    """Two massive edges from a massless vertex, closed by a massless edge."""
    return FeynmanGraph.build(3, [(3, 1, 1), (3, 2, 2), (1, 2)], [(1, 1), (2, 2)])


def wheel_three_spokes() -> FeynmanGraph:
    """The complete graph on four vertices."""
    return FeynmanGraph.build(4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)], [])


def massive_bubble() -> FeynmanGraph:
    """Two edges of equal mass between the two leg vertices."""
    return FeynmanGraph.build(2, [(1, 2, 1), (1, 2, 1)], [(1, 1), (2, 2)])


def box() -> FeynmanGraph:
    """Massless four-cycle with one leg on each corner."""
    return FeynmanGraph.build(4, [(1, 2), (2, 3), (3, 4), (4, 1)], [(1, 1), (2, 2), (3, 3), (4, 4)])


def banana(n: int = 3) -> FeynmanGraph:
    return FeynmanGraph.build(2, [(1, 2)] * n, [])


def triangle() -> FeynmanGraph:
    return FeynmanGraph.build(3, [(1, 2), (2, 3), (3, 1)], [])


def bubble_with_tadpole() -> FeynmanGraph:
    """A self-loop (edge 1) attached to a vertex of a two-edge bubble."""
    return FeynmanGraph.build(2, [(1, 1), (1, 2), (1, 2)], [])


def rose(n: int = 3) -> FeynmanGraph:
    """n self-loops at a single vertex."""
    return FeynmanGraph.build(1, [(1, 1)] * n, [])


def tadpole() -> FeynmanGraph:
    return FeynmanGraph.build(1, [(1, 1)], [])


NAMED = {
    "dunce": dunce_cap,
    "massive-triangle": one_loop_massive_triangle,
    "w3": wheel_three_spokes,
    "bubble": massive_bubble,
    "box": box,
    "banana3": banana,
    "triangle": triangle,
    "bubble-tadpole": bubble_with_tadpole,
    "rose3": rose,
    "tadpole": tadpole,
}


def named(name: str) -> FeynmanGraph:
    try:
        return NAMED[name]()
    except KeyError:
        raise KeyError(f"unknown graph {name!r}; known: {', '.join(sorted(NAMED))}") from None


KINDS = ((0, 0), (2, 1), (2, 2))


def random_graph(rng: np.random.Generator, max_edges: int, kind: tuple) -> FeynmanGraph | None:
    """A connected multigraph (loops allowed) with the requested (legs, masses) type."""
    nq, nm = kind
    n_edges = int(rng.integers(1, max_edges + 1))
    n_vert = int(rng.integers(1, min(n_edges, 5) + 1 + (1 if n_edges < 5 else 0)))
    n_vert = max(1, min(n_vert, n_edges + 1))
    if nq and n_vert < 2:
        n_vert = 2
    if n_vert - 1 > n_edges:
        return None
    # random spanning tree then extra edges
    edges = []
    order = list(rng.permutation(n_vert) + 1)
    for i in range(1, n_vert):
        edges.append((int(order[i]), int(order[int(rng.integers(0, i))])))
    while len(edges) < n_edges:
        u, v = (int(x) for x in rng.integers(1, n_vert + 1, size=2))
        if u == v and rng.random() > 0.15:
            continue
        edges.append((u, v))
    perm = rng.permutation(len(edges))
    edges = [edges[i] for i in perm]
    masses = [0] * len(edges)
    if nm:
        idx = rng.permutation(len(edges))
        if len(edges) < nm:
            return None
        for k in range(nm):
            masses[idx[k]] = k + 1
        for j in idx[nm:]:
            if rng.random() < 0.3:
                masses[j] = int(rng.integers(1, nm + 1))
    legs = []
    if nq:
        a, b = (int(x) for x in rng.choice(np.arange(1, n_vert + 1), size=2, replace=False))
        legs = [(a, 1), (b, 2)]
    spec = [(u, v, m) for (u, v), m in zip(edges, masses)]
    return FeynmanGraph.build(n_vert, spec, legs, nq=nq, nm=nm)


def random_corpus(size: int = 240, max_edges: int = 7, seed: int = 20240611, kinds=KINDS) -> list:
    """Distinct connected graphs, cycling through the kinematic types."""
    rng = np.random.default_rng(seed)
    seen = set()
    out = []
    attempts = 0
    while len(out) < size:
        attempts += 1
        if attempts > 200 * size:
            break
        kind = kinds[len(out) % len(kinds)]
        g = random_graph(rng, max_edges, kind)
        if g is None:
            continue
        key = (canonical_key(g), kind)
        if key in seen:
            continue
        seen.add(key)
        out.append(g)
    return out


def corpus(max_edges: int = 7, size: int = 240, seed: int = 20240611) -> list:
    """Named graphs followed by the random corpus, all within the edge bound."""
    base = [f() for f in NAMED.values()]
    return [g for g in base if len(g.edges) <= max_edges] + [
        g for g in random_corpus(size, 7, seed) if len(g.edges) <= max_edges
    ]
