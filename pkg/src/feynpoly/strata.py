"""Boundary strata of the motic blow-up and their combinatorics.

Strata of the exceptional locus are indexed by strictly increasing chains of
strict nonempty motic subgraphs gamma_1 < ... < gamma_r.  Each stratum is a
product of graph hypersurface complements of the successive quotients
gamma_i / gamma_{i-1} and of G / gamma_r.
"""

from __future__ import annotations

from dataclasses import dataclass

from .canon import canonical_key, key_to_text
from .graph import FeynmanGraph, motic_subgraphs, quotient, restrict
from .hopf import descendants, word_degree


@dataclass(frozen=True)
class StratumRecord:
    chain: tuple  # strictly increasing frozensets of edge labels
    factors: tuple  # (edges, loops, kind) per successive quotient, last one G/gamma_r

    @property
    def codim(self) -> int:
        return len(self.chain)

    def to_json(self) -> dict:
        return {
            "chain": [sorted(c) for c in self.chain],
            "codim": self.codim,
            "factors": [{"edges": n, "loops": h, "has_momenta": k[0], "has_masses": k[1]} for n, h, k in self.factors],
        }


def _factor(g: FeynmanGraph, inner: frozenset, outer: frozenset) -> tuple:
    """(edges, loops, kind) of outer / inner inside g."""
    sub = restrict(g, outer) if outer != frozenset(g.labels) else g
    q = quotient(sub, inner)
    return len(q.edges), q.loop_number, q.kind


def nested_chains(g: FeynmanGraph) -> list:
    """All chains of strict nonempty motic subgraphs, the empty chain first."""
    strict = sorted(motic_subgraphs(g, include_self=False), key=lambda s: (len(s), sorted(s)))
    full = frozenset(g.labels)
    chains = []

    def grow(chain):
        chains.append(tuple(chain))
        last = chain[-1] if chain else frozenset()
        for s in strict:
            if last < s:
                grow(chain + [s])

    grow([])
    out = []
    for ch in chains:
        steps = (frozenset(),) + ch + (full,)
        factors = tuple(_factor(g, steps[i], steps[i + 1]) for i in range(len(steps) - 1))
        out.append(StratumRecord(ch, factors))
    out.sort(key=lambda r: (r.codim, [sorted(c) for c in r.chain]))
    return out


def max_chain_length(g: FeynmanGraph) -> int:
    return max(r.codim for r in nested_chains(g))


def column_bound(g: FeynmanGraph) -> int:
    """E1^{p,q} vanishes for p at or above this bound."""
    return g.loop_number + 1 if g.has_kinematics else g.loop_number


def e1_vanishing_bounds(g: FeynmanGraph, chains=None) -> dict:
    """Table {(p, q): possibly nonzero} for 0 <= p <= bound, 0 <= q <= N.

    A slot is guaranteed zero when q >= N, p >= the column bound, p exceeds
    the longest chain, or q < p (a codimension p stratum has no cohomology
    in degree below p in this indexing).
    """
    chains = nested_chains(g) if chains is None else chains
    n = len(g.edges)
    pmax = column_bound(g)
    longest = max(r.codim for r in chains)
    table = {}
    for p in range(pmax + 1):
        for q in range(n + 1):
            zero = q >= n or p >= pmax or p > longest or q < p
            table[(p, q)] = not zero
    return table


def descendants_by_degree(g: FeynmanGraph, k: int) -> dict:
    """Descendant words of degree at most k, as {word: degree}."""
    if k < 0:
        raise ValueError("degree bound must be non-negative")
    return {w: d for w, d in descendants(g).items() if d <= k}


def face_map_targets(g: FeynmanGraph) -> list:
    """(source word, target) pairs for the face maps G/e -> G and (gamma, G/gamma) -> G."""
    key = canonical_key(g)
    out = []
    for e in g.labels:
        out.append(((canonical_key(quotient(g, {e})),), (key,), ("edge", (e,))))
    for gamma in motic_subgraphs(g, include_self=False):
        out.append(((canonical_key(restrict(g, gamma)), canonical_key(quotient(g, gamma))), (key,),
                    ("subgraph", tuple(sorted(gamma)))))
    return out


def face_maps_json(g: FeynmanGraph) -> list:
    return [{"kind": kind, "edges": list(lab), "source": [key_to_text(k) for k in src],
             "target": [key_to_text(k) for k in tgt]} for src, tgt, (kind, lab) in face_map_targets(g)]


def chain_loop_sum(g: FeynmanGraph, record: StratumRecord) -> int:
    return sum(h for _, h, _ in record.factors)


__all__ = [
    "StratumRecord", "nested_chains", "max_chain_length", "column_bound", "e1_vanishing_bounds",
    "descendants_by_degree", "face_map_targets", "face_maps_json", "chain_loop_sum", "word_degree",
]
