"""Iterated blow-ups of projective space along coordinate subspaces.

For a ground set S and a union-closed family B of subsets of S (containing S),
the blow-up P^B of P^{S} along the linear spaces L_I = {alpha_i = 0, i in I},
I in B, is described purely through its atlas.  Charts are indexed by maximal
flags

    empty = I_0 < I_1 < ... < I_{k+1} = S,   I_r in B,

with choices j_n in I_n minus I_{n-1}.  The chart coordinates are beta_x for
x in S other than j_{k+1}, and

    alpha_{j_n} = beta_{j_n} beta_{j_{n+1}} ... beta_{j_{k+1}},
    alpha_i     = beta_i beta_{j_n} ... beta_{j_{k+1}}   (i in I_n \\ I_{n-1}, i != j_n),

with beta_{j_{k+1}} = 1.  The coordinate beta_{j_r} (r <= k) cuts out the
exceptional divisor D_{I_r}; every other beta_i cuts out the strict transform
D_i of the coordinate hyperplane alpha_i = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import NotUnionClosed
from .graph import FeynmanGraph, motic_subgraphs
from .poly import KinPoly, kin_space


def _fs(x) -> frozenset:
    return frozenset(x)


def set_text(s) -> str:
    return "{" + ",".join(str(i) for i in sorted(s)) + "}"


class UnionClosedFamily:
    """A union-closed family of subsets of a ground set, singletons removed."""

    def __init__(self, ground, members=()):
        self.ground = _fs(ground)
        mem = {_fs(m) for m in members if len(m) >= 2}
        for m in mem:
            if not m <= self.ground:
                raise NotUnionClosed(f"member {set_text(m)} is not inside the ground set")
        if len(self.ground) >= 2:
            mem.add(self.ground)
        for a, b in combinations(list(mem), 2):
            if a | b not in mem:
                raise NotUnionClosed(f"union of {set_text(a)} and {set_text(b)} is missing")
        self.members = frozenset(mem)

    @classmethod
    def from_graph(cls, g: FeynmanGraph) -> "UnionClosedFamily":
        """B_G: the strict motic subgraphs of g, plus the full edge set."""
        return cls(g.labels, motic_subgraphs(g, include_self=False))

    def __contains__(self, s):
        return _fs(s) in self.members

    def __eq__(self, other):
        return isinstance(other, UnionClosedFamily) and (self.ground, self.members) == (other.ground, other.members)

    def __hash__(self):
        return hash((self.ground, self.members))

    def sorted_members(self) -> list:
        return sorted(self.members, key=lambda m: (len(m), sorted(m)))

    def largest_inside(self, t) -> frozenset | None:
        """The largest member contained in t, or None."""
        best = frozenset()
        for m in self.members:
            if m <= t:
                best |= m
        return best if best else None

    @property
    def divisors(self) -> list:
        """Divisor labels: singletons of S and the proper members."""
        singles = [frozenset({i}) for i in sorted(self.ground)]
        proper = [m for m in self.sorted_members() if m != self.ground]
        return singles + proper

    def __repr__(self):
        return f"UnionClosedFamily(S={set_text(self.ground)}, B=[{', '.join(set_text(m) for m in self.sorted_members())}])"


@dataclass(frozen=True)
class FlagChart:
    """A maximal flag (I_1 < ... < I_{k+1} = S) with choices (j_1, ..., j_{k+1})."""

    ground: frozenset
    flag: tuple
    choices: tuple

    @property
    def k(self) -> int:
        return len(self.flag) - 1

    @property
    def top(self) -> int:
        return self.choices[-1]

    @property
    def coordinates(self) -> tuple:
        return tuple(sorted(self.ground - {self.top}))

    def block_index(self, i: int) -> int:
        """n with i in I_n minus I_{n-1} (1-based)."""
        for n, I in enumerate(self.flag, start=1):
            if i in I:
                return n
        raise KeyError(i)

    def level(self, J) -> int:
        """Least l with J inside I_l (1-based)."""
        J = _fs(J)
        for n, I in enumerate(self.flag, start=1):
            if J <= I:
                return n
        raise KeyError(J)

    def exponent_row(self, i: int) -> dict:
        """alpha_i as {beta coordinate: exponent}."""
        n = self.block_index(i)
        row = {}
        if i != self.choices[n - 1]:
            row[i] = 1
        for r in range(n, self.k + 1):  # j_n .. j_k; j_{k+1} is set to one
            row[self.choices[r - 1]] = row.get(self.choices[r - 1], 0) + 1
        return row

    def rows(self, nalpha: int) -> dict:
        """Monomial substitution rows for KinPoly.monomial_map."""
        out = {}
        for i in range(1, nalpha + 1):
            vec = [0] * nalpha
            if i in self.ground:
                for x, p in self.exponent_row(i).items():
                    vec[x - 1] = p
            else:
                vec[i - 1] = 1
            out[i] = tuple(vec)
        return out

    def divisor_of(self, x: int) -> frozenset:
        for r in range(1, self.k + 1):
            if self.choices[r - 1] == x:
                return self.flag[r - 1]
        return frozenset({x})

    @property
    def exceptional(self) -> dict:
        """{I_r: j_r} for r = 1..k."""
        return {self.flag[r - 1]: self.choices[r - 1] for r in range(1, self.k + 1)}

    @property
    def visible_divisors(self) -> frozenset:
        return frozenset(self.divisor_of(x) for x in self.coordinates)

    def jacobian_exponents(self) -> dict:
        """pi^*(prod dalpha) = prod_r beta_{j_r}^{|I_r| - 1} prod dbeta."""
        return {self.choices[r - 1]: len(self.flag[r - 1]) - 1 for r in range(1, self.k + 1)}

    def image(self, point: dict) -> dict:
        """alpha values (with alpha_top = 1) at numeric beta values."""
        out = {}
        for i in self.ground:
            v = 1
            for x, p in self.exponent_row(i).items():
                v = v * point[x] ** p
            out[i] = v
        return out

    def inverse(self, alpha: dict) -> dict:
        """beta values from alpha values (projective; any scaling)."""
        out = {}
        for x in self.coordinates:
            n = self.block_index(x)
            jn = self.choices[n - 1]
            if x == jn:
                out[x] = alpha[x] / alpha[self.choices[n]]
            else:
                out[x] = alpha[x] / alpha[jn]
        return out

    def inverse_vectors(self) -> dict:
        """beta_x = alpha_a / alpha_b as {x: (a, b)}."""
        out = {}
        for x in self.coordinates:
            n = self.block_index(x)
            jn = self.choices[n - 1]
            out[x] = (x, self.choices[n]) if x == jn else (x, jn)
        return out

    def label(self) -> str:
        fl = " < ".join(set_text(I) for I in self.flag)
        return f"[{fl}; j=({','.join(map(str, self.choices))})]"

    def to_json(self) -> dict:
        return {
            "flag": [sorted(I) for I in self.flag],
            "choices": list(self.choices),
            "coordinates": list(self.coordinates),
            "map": {str(i): {str(x): p for x, p in sorted(self.exponent_row(i).items())} for i in sorted(self.ground)},
            "divisors": {str(x): sorted(self.divisor_of(x)) for x in self.coordinates},
        }


def _chart_key(c: FlagChart):
    return (tuple(tuple(sorted(I)) for I in c.flag), c.choices)


def enumerate_flags(B: UnionClosedFamily) -> list:
    """All maximal flag charts of B, sorted lexicographically by (flag, choices).

    Reading a flag downwards, maximality forces I_{n-1} to be the largest
    member of B inside I_n minus j_n, so each chart is determined by its
    sequence of choices.
    """
    out = []
    S = B.ground
    if not S:
        return out

    def grow(top_set, chain, picks):
        for j in sorted(top_set):
            below = B.largest_inside(top_set - {j})
            if below is None:
                flag = tuple(reversed(chain))
                out.append(FlagChart(S, flag, tuple(reversed(picks + [j]))))
            else:
                grow(below, chain + [below], picks + [j])

    grow(S, [S], [])
    out.sort(key=_chart_key)
    return out


def is_maximal(B: UnionClosedFamily, chart: FlagChart) -> bool:
    """No member of B fits strictly between consecutive flag sets avoiding j."""
    prev = frozenset()
    for I, j in zip(chart.flag, chart.choices):
        if j not in I or j in prev:
            return False
        for m in B.members:
            if prev < m < I and j not in m:
                return False
        prev = I
    return True


# pullbacks ------------------------------------------------------------------

@dataclass
class ChartPullback:
    chart: FlagChart
    exponents: dict  # coordinate -> exponent of beta_x in the monomial factor
    strict: KinPoly

    @property
    def exceptional(self) -> dict:
        """{I_r: exponent along D_{I_r}}."""
        return {I: self.exponents.get(j, 0) for I, j in self.chart.exceptional.items()}

    @property
    def hyperplane(self) -> dict:
        """{i: exponent along D_i} for the non-exceptional coordinates."""
        ex = set(self.chart.choices)
        return {x: self.exponents.get(x, 0) for x in self.chart.coordinates if x not in ex}

    def by_divisor(self) -> dict:
        return {self.chart.divisor_of(x): self.exponents.get(x, 0) for x in self.chart.coordinates}


def chart_pullback(chart: FlagChart, P: KinPoly) -> ChartPullback:
    """Substitute the chart map and factor out the largest coordinate monomial."""
    Q = P.monomial_map(chart.rows(P.nalpha))
    content = list(Q.monomial_content())
    coords = set(chart.coordinates)
    for i in range(len(content)):
        if (i + 1) not in coords:
            content[i] = 0
    strict = Q.divide_monomial(tuple(content))
    exps = {x: content[x - 1] for x in chart.coordinates}
    return ChartPullback(chart, exps, strict)


def set_coordinate_zero(P: KinPoly, x: int) -> KinPoly:
    return P.set_zero(x)


# incidence and faces ---------------------------------------------------------------

def divisor_incidence(B: UnionClosedFamily, X, Y) -> bool:
    """D_X meets D_Y iff X, Y are nested, or disjoint with union outside B."""
    X, Y = _fs(X), _fs(Y)
    if X <= Y or Y <= X:
        return True
    return not (X & Y) and (X | Y) not in B.members


def cooccurrence(B: UnionClosedFamily, charts=None) -> set:
    """Pairs of divisors that are coordinate hyperplanes of a common chart."""
    charts = enumerate_flags(B) if charts is None else charts
    pairs = set()
    for c in charts:
        vis = sorted(c.visible_divisors, key=lambda s: (len(s), sorted(s)))
        for a, b in combinations(vis, 2):
            pairs.add(frozenset({a, b}))
    return pairs


def face_decomposition(B: UnionClosedFamily, I):
    """(B^I over I, B_I over S minus I); for a singleton {i}, (None, B_i)."""
    I = _fs(I)
    S = B.ground
    if len(I) == 1:
        (i,) = I
        return None, UnionClosedFamily(S - I, [m - I for m in B.members])
    upper = UnionClosedFamily(I, [m for m in B.members if m <= I])
    lower = UnionClosedFamily(S - I, [m - I for m in B.members if m >= I])
    return upper, lower


@dataclass
class FacePoset:
    ground: frozenset
    nodes: dict  # frozenset of divisor labels -> product factors
    covers: list  # (smaller stratum closure, larger): X ∪ {d} covers X

    def dimension(self, node) -> int:
        return len(self.ground) - 1 - len(node)

    def factor_dimension(self, node) -> int:
        return sum(len(f) - 1 for f in self.nodes[node])

    def to_json(self) -> dict:
        def lab(node):
            return [sorted(d) for d in sorted(node, key=lambda s: (len(s), sorted(s)))]

        order = sorted(self.nodes, key=lambda n: (len(n), sorted(tuple(sorted(d)) for d in n)))
        return {
            "nodes": [{"divisors": lab(n), "codim": len(n), "factors": [sorted(f) for f in self.nodes[n]]}
                      for n in order],
            "covers": [[lab(a), lab(b)] for a, b in self.covers],
        }


def product_factors(S: frozenset, node) -> list:
    """Ground sets of the product decomposition of a stratum closure."""
    chain = sorted((d for d in node if len(d) >= 2), key=len)
    points = set().union(*[d for d in node if len(d) == 1]) if node else set()
    out = []
    prev = frozenset()
    for I in chain + [S]:
        out.append(frozenset(I - prev - points))
        prev = I
    return out


def face_poset(B: UnionClosedFamily, charts=None) -> FacePoset:
    """Strata of the boundary of the B-polytope, keyed by divisor sets."""
    charts = enumerate_flags(B) if charts is None else charts
    nodes = {}
    for c in charts:
        vis = sorted(c.visible_divisors, key=lambda s: (len(s), sorted(s)))
        for r in range(len(vis) + 1):
            for sub in combinations(vis, r):
                node = frozenset(sub)
                if node not in nodes:
                    nodes[node] = product_factors(B.ground, node)
    covers = []
    for node in nodes:
        for d in B.divisors:
            if d not in node and (node | {d}) in nodes:
                covers.append((node, node | {d}))
    covers.sort(key=lambda p: (len(p[0]), sorted(sorted(d) for d in p[0]), sorted(sorted(d) for d in p[1])))
    return FacePoset(B.ground, nodes, covers)


# transitions -------------------------------------------------------------------------

def _det(mat) -> Fraction:
    m = [[Fraction(x) for x in row] for row in mat]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


def transition_consistent(a: FlagChart, b: FlagChart) -> bool:
    """The change of coordinates a -> b is a unimodular monomial map that
    reproduces the alphas up to the projective scaling of chart b."""
    S = sorted(a.ground)
    ea = {i: a.exponent_row(i) for i in S}
    eb = {i: b.exponent_row(i) for i in S}

    def vec_a(row):
        return {x: row.get(x, 0) for x in a.coordinates}

    # beta^b_x = alpha_p / alpha_q as exponents over beta^a
    trans = {}
    for x, (p, q) in b.inverse_vectors().items():
        trans[x] = {y: ea[p].get(y, 0) - ea[q].get(y, 0) for y in a.coordinates}
    for i in S:
        got = {y: 0 for y in a.coordinates}
        for x, e in eb[i].items():
            for y in a.coordinates:
                got[y] += e * trans[x][y]
        want = {y: ea[i].get(y, 0) - ea[b.top].get(y, 0) for y in a.coordinates}
        if got != want:
            return False
    mat = [[trans[x][y] for y in a.coordinates] for x in b.coordinates]
    return abs(_det(mat)) == 1 if mat else True


def _transition_arrays(c: FlagChart, index: dict) -> tuple:
    """Exponent matrix E (alpha_i over beta, beta_top = 1) and inverse matrix M (beta over alpha)."""
    n = len(index)
    E = np.zeros((n, n), dtype=np.int64)
    for i in c.ground:
        for x, p in c.exponent_row(i).items():
            E[index[i], index[x]] = p
    M = np.zeros((n, n), dtype=np.int64)
    for x, (p, q) in c.inverse_vectors().items():
        M[index[x], index[p]] += 1
        M[index[x], index[q]] -= 1
    return E, M


def transitions_consistent(charts: list) -> bool:
    """transition_consistent for every ordered pair of charts, batched with numpy."""
    if not charts:
        return True
    ground = sorted(charts[0].ground)
    index = {i: k for k, i in enumerate(ground)}
    arrays = [_transition_arrays(c, index) for c in charts]
    Es = np.stack([E for E, _ in arrays])
    Ms = np.stack([M for _, M in arrays])
    tops = np.array([index[c.top] for c in charts])
    nb = len(charts)
    for a, (Ea, _) in enumerate(arrays):
        trans = Ms @ Ea  # (b, x, y): beta^b_x over beta^a_y
        got = Es @ trans
        want = Ea[None, :, :] - Ea[tops][:, None, :]
        if not np.array_equal(got, want):
            return False
        # row top_b and column top_a of trans vanish; a 1 there leaves |det| unchanged
        full = trans.copy()
        full[np.arange(nb), tops, tops[a]] = 1
        if not np.all(np.rint(np.abs(np.linalg.det(full.astype(float)))) == 1):
            return False
    return True


def strict_transform_meets(chart: FlagChart, I) -> bool:
    """Whether the strict transform of L_I meets the chart (no j_r in I)."""
    return not (_fs(I) & set(chart.choices))


# the affine model ---------------------------------------------------------------------

@dataclass
class AffineRingReport:
    generators: int = 0
    linear: int = 0
    unit: int = 0
    multiplicative: int = 0
    partition: int = 0
    localisation: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"generators": self.generators, "linear": self.linear, "unit": self.unit,
                "multiplicative": self.multiplicative, "partition_of_unity": self.partition,
                "localisation": self.localisation, "ok": self.ok, "failures": self.failures[:20]}


class _Frac:
    """Quotient of two KinPolys, compared by cross multiplication."""

    def __init__(self, num, den):
        self.num, self.den = num, den

    def __add__(self, o):
        return _Frac(self.num * o.den + o.num * self.den, self.den * o.den)

    def __mul__(self, o):
        return _Frac(self.num * o.num, self.den * o.den)

    def equals(self, o) -> bool:
        return self.num * o.den == o.num * self.den


def affine_ring_check(B: UnionClosedFamily) -> AffineRingReport:
    """Verify the relations of the ring generated by b_{I/J} = alpha_I / alpha_J."""
    S = sorted(B.ground)
    n = max(S) if S else 0
    space = kin_space(0, 0)
    rep = AffineRingReport()

    def alpha_sum(I):
        out = KinPoly.zero(n, space)
        for i in I:
            out = out + KinPoly.alpha(n, space, i)
        return out

    one = KinPoly.const(n, space, 1)

    def b(I, J):
        return _Frac(alpha_sum(I), alpha_sum(J))

    members = B.sorted_members()
    subsets = {J: [frozenset(c) for r in range(1, len(J) + 1) for c in combinations(sorted(J), r)] for J in members}
    for J in members:
        for I in subsets[J]:
            rep.generators += 1
            total = _Frac(KinPoly.zero(n, space), one)
            for i in I:
                total = total + b({i}, J)
            if not b(I, J).equals(total):
                rep.failures.append(f"linear {set_text(I)}/{set_text(J)}")
            rep.linear += 1
        if not b(J, J).equals(_Frac(one, one)):
            rep.failures.append(f"unit {set_text(J)}")
        rep.unit += 1
    for J in members:
        for K in members:
            if not J <= K:
                continue
            for I in subsets[J]:
                if not (b(I, J) * b(J, K)).equals(b(I, K)):
                    rep.failures.append(f"product {set_text(I)}/{set_text(J)}/{set_text(K)}")
                rep.multiplicative += 1
    charts = enumerate_flags(B)
    for c in charts:
        rows = c.rows(n)

        def pull(I):
            return alpha_sum(I).monomial_map(rows)

        I1 = c.flag[0]
        tot = _Frac(KinPoly.zero(n, space), one)
        for i in I1:
            tot = tot + _Frac(pull({i}), pull(I1))
        if not tot.equals(_Frac(one, one)):
            rep.failures.append(f"partition of unity in chart {c.label()}")
        rep.partition += 1
        for J in members:
            # pi^* alpha_J = P_J * prod_{r >= l(J)} beta_{j_r}, with P_J(0) = 1
            pj = pull(J)
            lvl = c.level(J)
            mono = [0] * n
            for r in range(lvl, c.k + 1):
                mono[c.choices[r - 1] - 1] += 1
            content = pj.monomial_content()
            exc = set(c.choices[:-1])
            ok = all(content[x - 1] == mono[x - 1] for x in exc)
            PJ = pj.divide_monomial(tuple(mono))
            zero_key = ((0,) * n, ())
            ok = ok and PJ.terms.get(zero_key, 0) == 1
            if not ok:
                rep.failures.append(f"localisation of {set_text(J)} in chart {c.label()}")
            rep.localisation += 1
    return rep


# restriction of charts to exceptional divisors ----------------------------------------

def sub_chart(chart: FlagChart, r: int) -> FlagChart:
    """The chart (I_1 < ... < I_r; j_1..j_r) of B^{I_r}."""
    return FlagChart(chart.flag[r - 1], chart.flag[:r], chart.choices[:r])


def quotient_chart(chart: FlagChart, r: int) -> FlagChart:
    """The chart (I_{r+1}/I_r < ... < S/I_r; j_{r+1}..j_{k+1}) of B_{I_r}."""
    gam = chart.flag[r - 1]
    flag, choices = tuple(I - gam for I in chart.flag[r:]), chart.choices[r:]
    if len(flag) > 1 and len(flag[0]) == 1:
        # a singleton first level is not a member of the stripped family;
        # dropping it leaves the monomial map unchanged
        flag, choices = flag[1:], choices[1:]
    return FlagChart(chart.ground - gam, flag, choices)


def product_identity(g: FeynmanGraph, chart: FlagChart, r: int, which: str = "psi") -> tuple:
    """Both sides of the restriction of a strict transform to D_{I_r}.

    Returns (strict(pi^* P_G) at beta_{j_r} = 0,
             strict(pi^* P_gamma) * strict(pi^* P_{G/gamma})) for gamma = I_r,
    where for Xi the factors are (Xi_gamma, Psi_{G/gamma}) if gamma is
    mass-momentum spanning and (Psi_gamma, Xi_{G/gamma}) otherwise.
    """
    from .graph import is_mm, quotient, restrict
    from .symanzik import psi, xi

    gam = chart.flag[r - 1]
    sub, quo = restrict(g, gam), quotient(g, gam)
    if which == "psi":
        whole, a, b = psi(g), psi(sub), psi(quo)
    elif which == "xi":
        whole = xi(g)
        a, b = (xi(sub), psi(quo)) if is_mm(g, gam) else (psi(sub), xi(quo))
    else:
        raise ValueError(f"unknown polynomial {which!r}")
    lhs = chart_pullback(chart, whole).strict.set_zero(chart.choices[r - 1])
    rhs = chart_pullback(sub_chart(chart, r), a).strict * chart_pullback(quotient_chart(chart, r), b).strict
    return lhs, rhs
