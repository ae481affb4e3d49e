from itertools import combinations

import pytest

from feynpoly import corpus as C
from feynpoly.graph import is_motic, motic_subgraphs
from feynpoly.hopf import coradical_degree
from feynpoly.strata import (
    chain_loop_sum,
    column_bound,
    descendants_by_degree,
    e1_vanishing_bounds,
    face_map_targets,
    max_chain_length,
    nested_chains,
)


def brute_force_chains(g):
    strict = list(motic_subgraphs(g, include_self=False))
    out = {()}
    for r in range(1, len(strict) + 1):
        for combo in combinations(strict, r):
            ordered = sorted(combo, key=len)
            if all(a < b for a, b in zip(ordered, ordered[1:])):
                out.add(tuple(ordered))
    return out


@pytest.fixture(scope="module")
def motic_small(small_graphs):
    return [g for g in small_graphs if is_motic(g, frozenset(g.labels))]


def test_massive_triangle_chains(tri2):
    chains = nested_chains(tri2)
    assert [r.chain for r in chains] == [(), (frozenset({1, 2}),)]
    assert max_chain_length(tri2) == 1


def test_dunce_chains(dunce):
    chains = {r.chain for r in nested_chains(dunce)}
    assert chains == brute_force_chains(dunce)
    assert (frozenset({1}), frozenset({1, 3, 4})) in chains
    assert len(chains) == 10


def test_tree_has_only_empty_chain():
    g = C.FeynmanGraph.build(3, [(1, 2), (2, 3)], [(1, 1), (3, 2)])
    assert [r.chain for r in nested_chains(g)] == [()]


def test_chains_match_brute_force(motic_small):
    checked = 0
    for g in motic_small:
        if len(motic_subgraphs(g, include_self=False)) > 12:
            continue
        checked += 1
        assert {r.chain for r in nested_chains(g)} == brute_force_chains(g)
    assert checked > 20


def test_loop_sums_and_chain_length(motic_small):
    for g in motic_small:
        chains = nested_chains(g)
        for r in chains:
            assert chain_loop_sum(g, r) == g.loop_number
            assert len(r.factors) == r.codim + 1
        assert max(r.codim for r in chains) + 1 == coradical_degree(g)
        assert max(r.codim for r in chains) <= column_bound(g)


def test_e1_table(tri2):
    table = e1_vanishing_bounds(tri2)
    nonzero = {k for k, v in table.items() if v}
    assert nonzero == {(0, 0), (0, 1), (0, 2), (1, 1), (1, 2)}
    # columns at or above h + 1 vanish
    assert not any(v for (p, q), v in table.items() if p >= 2)


def test_e1_type_00_bound(w3):
    assert column_bound(w3) == 3
    table = e1_vanishing_bounds(w3)
    assert not any(v for (p, q), v in table.items() if p >= 3 or q >= 6)


def test_face_maps(dunce, tri2):
    assert len(face_map_targets(dunce)) == 4 + 5
    assert len(face_map_targets(tri2)) == 3 + 1
    kinds = [lab[0] for _, _, lab in face_map_targets(dunce)]
    assert kinds.count("edge") == 4 and kinds.count("subgraph") == 5


def test_descendants_by_degree(tri2):
    assert len(descendants_by_degree(tri2, 1)) == 9
    assert all(d <= 1 for d in descendants_by_degree(tri2, 1).values())
    with pytest.raises(ValueError):
        descendants_by_degree(tri2, -1)
