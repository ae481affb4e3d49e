"""The Hopf algebra of motic graphs.

Elements are rational combinations of tensor words whose letters are
canonical graph keys (see :mod:`feynpoly.canon`); a letter with several
components is the product of those components, and the empty key is the
unit.  The coproduct of a connected motic graph is

    Delta(G) = sum over motic gamma of  gamma (x) G/gamma,

including gamma = empty and gamma = G, extended multiplicatively.

The factors of that product are the massless components of a key, one at
a time, and the union of all components carrying masses or legs taken
together.  A mass-momentum spanning subgraph can be disconnected, and
whether its pieces are motic depends on the whole union, so those
components do not split into independent letters.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache

from .canon import (
    canonical_key,
    graph_from_key,
    key_edges,
    key_has_kinematics,
    key_loops,
    key_product,
    key_to_text,
)
from .graph import EMPTY, FeynmanGraph, contract_edge, motic_subgraphs, quotient, restrict

UNIT = ()


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class GraphTensor:
    """Sparse rational combination of tensor words of graph keys."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for w, c in (terms or {}).items():
            if c:
                self.terms[tuple(w)] = _norm(c)

    @classmethod
    def word(cls, *letters, coeff=1):
        return cls({tuple(letters): coeff})

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w, 0) + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return GraphTensor(out)

    def __neg__(self):
        return GraphTensor({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return GraphTensor({w: c * v for w, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, GraphTensor) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def to_json(self) -> list:
        rows = []
        for w in sorted(self.terms):
            rows.append({"word": [key_to_text(k) for k in w], "coeff": str(self.terms[w])})
        return rows

    def __repr__(self):
        body = " + ".join(f"{c}*" + "(x)".join(key_to_text(k) for k in w) for w, c in sorted(self.terms.items()))
        return f"GraphTensor({body or '0'})"


def _as_key(G) -> tuple:
    if isinstance(G, FeynmanGraph):
        return canonical_key(G)
    return tuple(G)


# coproduct -------------------------------------------------------------------

def _blocks(key: tuple) -> list:
    """Multiplicative factors of a key: massless components and the kinematic part."""
    kin = tuple(c for c in key if key_has_kinematics((c,)))
    out = [(c,) for c in key if not key_has_kinematics((c,))]
    return out + [kin] if kin else out


@lru_cache(maxsize=None)
def _delta_block(key: tuple) -> dict:
    g = graph_from_key(key)
    out = {(UNIT, key): 1}
    for gamma in motic_subgraphs(g, include_self=True):
        pair = (canonical_key(restrict(g, gamma)), canonical_key(quotient(g, gamma)))
        out[pair] = out.get(pair, 0) + 1
    return out


@lru_cache(maxsize=None)
def delta_key(key: tuple) -> dict:
    """Coproduct of a key as {(left key, right key): coefficient}."""
    if key == UNIT:
        return {(UNIT, UNIT): 1}
    acc = {(UNIT, UNIT): 1}
    for block in _blocks(key):
        d = _delta_block(block)
        nxt = {}
        for (a1, b1), c1 in acc.items():
            for (a2, b2), c2 in d.items():
                k = (key_product(a1, a2), key_product(b1, b2))
                nxt[k] = nxt.get(k, 0) + c1 * c2
        acc = nxt
    return acc


def coproduct(G) -> GraphTensor:
    """Delta(G) in F (x) F."""
    return GraphTensor(delta_key(_as_key(G)))


def reduced_delta_key(key: tuple) -> dict:
    """Delta' = Delta - 1 (x) id - id (x) 1, zero on scalars."""
    if key == UNIT:
        return {}
    return {(a, b): c for (a, b), c in delta_key(key).items() if a != UNIT and b != UNIT}


def _apply_at(t: GraphTensor, pos: int, op) -> GraphTensor:
    out = {}
    for w, c in t.items():
        i = pos if pos >= 0 else len(w) + pos
        for (a, b), d in op(w[i]).items():
            nw = w[:i] + (a, b) + w[i + 1:]
            out[nw] = out.get(nw, 0) + c * d
    return GraphTensor(out)


def reduced_coproduct_power(G, n: int, position: int = -1) -> GraphTensor:
    """(Delta')^n G, always splitting the letter at ``position``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    key = _as_key(G)
    t = GraphTensor({(key,): 1})
    for _ in range(n):
        t = _apply_at(t, position, reduced_delta_key)
    return t


def coradical_degree(G) -> int:
    """Least n with (Delta')^n G = 0 (0 for the unit)."""
    key = _as_key(G)
    if key == UNIT:
        return 0
    t = GraphTensor({(key,): 1})
    n = 0
    while t:
        t = _apply_at(t, -1, reduced_delta_key)
        n += 1
    return n


def coradical_bound(G) -> int:
    """h_G for graphs without kinematics, h_G + 1 otherwise."""
    key = _as_key(G)
    h = key_loops(key)
    return h + 1 if key_has_kinematics(key) else h


def counit(key: tuple) -> int:
    return 1 if tuple(key) == UNIT else 0


# antipode ---------------------------------------------------------------------

def _mul(x: dict, y: dict) -> dict:
    out = {}
    for a, c in x.items():
        for b, d in y.items():
            k = key_product(a, b)
            out[k] = out.get(k, 0) + c * d
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _antipode_block(key: tuple) -> tuple:
    out = {key: -1}
    for (a, b), c in reduced_delta_key(key).items():
        for k, v in _mul(_antipode_dict(a), {b: c}).items():
            out[k] = out.get(k, 0) - v
    return tuple(sorted((k, v) for k, v in out.items() if v))


def _antipode_dict(key: tuple) -> dict:
    acc = {UNIT: 1}
    for block in _blocks(key):
        acc = _mul(acc, dict(_antipode_block(block)))
    return acc


def antipode(G) -> GraphTensor:
    """S(G) by the recursion S(G) = -G - sum S(gamma) G/gamma over proper gamma."""
    return GraphTensor({(k,): c for k, c in _antipode_dict(_as_key(G)).items()})


def antipode_identity(G, side: str = "left") -> GraphTensor:
    """m(S (x) id)Delta(G) - eps(G) 1 (or the right-hand version); zero when the axiom holds."""
    key = _as_key(G)
    out = {}
    for (a, b), c in delta_key(key).items():
        prod = _mul(_antipode_dict(a), {b: c}) if side == "left" else _mul({a: c}, _antipode_dict(b))
        for k, v in prod.items():
            out[k] = out.get(k, 0) + v
    out[UNIT] = out.get(UNIT, 0) - counit(key)
    return GraphTensor({(k,): v for k, v in out.items() if v})


# structural checks used by tests and selfcheck -------------------------------------

def coassociativity_defect(G) -> GraphTensor:
    """(Delta (x) id)Delta G - (id (x) Delta)Delta G."""
    t = GraphTensor(delta_key(_as_key(G)))
    return _apply_at(t, 0, delta_key) - _apply_at(t, 1, delta_key)


def counit_defect(G) -> tuple:
    key = _as_key(G)
    d = delta_key(key)
    left = {b: c for (a, b), c in d.items() if a == UNIT}
    right = {a: c for (a, b), c in d.items() if b == UNIT}
    return left == {key: 1}, right == {key: 1}


def grading_additive(G) -> bool:
    key = _as_key(G)
    n, h = key_edges(key), key_loops(key)
    return all(key_edges(a) + key_edges(b) == n and key_loops(a) + key_loops(b) == h
               for (a, b) in delta_key(key))


def all_or_nothing(G) -> bool:
    """Kinematics land entirely on one side of each coproduct term."""
    return all(not (key_has_kinematics(a) and key_has_kinematics(b)) for (a, b) in delta_key(_as_key(G)))


# descendants ---------------------------------------------------------------------

def word_degree(word) -> int:
    return sum(key_edges(k) - 1 for k in word)


@lru_cache(maxsize=None)
def _letter_moves(key: tuple) -> tuple:
    """Letters or letter pairs reachable from one letter by d_e or d_gamma."""
    g = graph_from_key(key)
    moves = set()
    if key_edges(key) >= 2:
        for e in g.labels:
            moves.add((canonical_key(quotient(g, {e})),))
        for gamma in motic_subgraphs(g, include_self=False):
            moves.add((canonical_key(restrict(g, gamma)), canonical_key(quotient(g, gamma))))
    return tuple(sorted(moves))


def descendants(G) -> dict:
    """All motic descendants of G as {word: degree}."""
    start = (_as_key(G),)
    seen = {start}
    todo = [start]
    while todo:
        w = todo.pop()
        for i, letter in enumerate(w):
            for rep in _letter_moves(letter):
                nw = w[:i] + rep + w[i + 1:]
                if nw not in seen:
                    seen.add(nw)
                    todo.append(nw)
    return {w: word_degree(w) for w in sorted(seen)}


# compatibility with edge contraction -------------------------------------------------

def differential_sides(g: FeynmanGraph, e: int) -> tuple:
    """Both sides of Delta c_e = (c_e (x) id + id (x) c_e) Delta on g, with c_e(H) = H//e.

    Terms are compared with their edge labels: each side is a Counter of
    (left edge set, left factor carries kinematics), the right factor
    being determined by the left one.  Comparing canonical keys instead
    would conflate a one-vertex join with the disjoint union it comes from.
    """
    gc = contract_edge(g, e)
    lhs = Counter()
    if gc is not EMPTY:
        lhs[(frozenset(), False)] += 1
        for gamma in motic_subgraphs(gc, include_self=True):
            lhs[(gamma, restrict(gc, gamma).has_kinematics)] += 1
    rhs = Counter()
    for gamma in [frozenset()] + motic_subgraphs(g, include_self=True):
        sub = restrict(g, gamma)
        if e in gamma:
            sc = contract_edge(sub, e)
            if sc is not EMPTY:
                rhs[(gamma - {e}, sc.has_kinematics)] += 1
        elif contract_edge(quotient(g, gamma), e) is not EMPTY:
            rhs[(gamma, sub.has_kinematics)] += 1
    return lhs, rhs


def check_differential_compat(g: FeynmanGraph, e: int) -> bool:
    """Does Delta c_e = (c_e (x) id + id (x) c_e) Delta hold on g?"""
    lhs, rhs = differential_sides(g, e)
    return lhs == rhs
