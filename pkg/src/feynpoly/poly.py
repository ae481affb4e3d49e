"""Sparse polynomials in Schwinger parameters with kinematic coefficients.

A :class:`KinPoly` is a polynomial in alpha_1..alpha_n whose coefficients are
polynomials with rational coefficients in the kinematic indeterminates
s_ij (1 <= i <= j <= Q-1) and msq_k = m_k^2.  Terms are stored in one flat
dictionary keyed by the pair (alpha exponent tuple, kinematic exponent tuple)
so that products reduce to tuple additions.  Zero coefficients are never
stored.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

from .errors import ParseError, ZeroPolynomial


class KinSpace:
    """The kinematic indeterminates for Q momenta and M masses."""

    __slots__ = ("nq", "nm", "names", "pairs", "_index")

    def __init__(self, nq: int, nm: int):
        self.nq = nq
        self.nm = nm
        names, pairs = [], []
        for i in range(1, nq):
            for j in range(i, nq):
                names.append(f"s{i}{j}" if nq <= 10 else f"s{i}_{j}")
                pairs.append((i, j))
        for k in range(1, nm + 1):
            names.append(f"msq{k}")
            pairs.append((0, k))
        self.names = tuple(names)
        self.pairs = tuple(pairs)
        self._index = {p: n for n, p in enumerate(pairs)}

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, KinSpace) and (self.nq, self.nm) == (other.nq, other.nm)

    def __hash__(self):
        return hash((self.nq, self.nm))

    def __repr__(self):
        return f"KinSpace(nq={self.nq}, nm={self.nm})"

    def s_index(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        return self._index[(i, j)]

    def msq_index(self, k: int) -> int:
        return self._index[(0, k)]


@lru_cache(maxsize=None)
def kin_space(nq: int, nm: int) -> KinSpace:
    return KinSpace(nq, nm)


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class KinPoly:
    """Polynomial in alpha_1..alpha_n over Q[s_ij, msq_k]."""

    __slots__ = ("nalpha", "space", "terms")

    def __init__(self, nalpha: int, space: KinSpace, terms=None):
        self.nalpha = nalpha
        self.space = space
        self.terms = {} if terms is None else terms

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nalpha, space):
        return cls(nalpha, space)

    @classmethod
    def const(cls, nalpha, space, c=1):
        if c == 0:
            return cls(nalpha, space)
        return cls(nalpha, space, {((0,) * nalpha, (0,) * len(space)): _norm(c)})

    @classmethod
    def alpha(cls, nalpha, space, label, power=1):
        a = [0] * nalpha
        a[label - 1] = power
        return cls(nalpha, space, {(tuple(a), (0,) * len(space)): 1})

    @classmethod
    def kin_var(cls, nalpha, space, index, power=1):
        k = [0] * len(space)
        k[index] = power
        return cls(nalpha, space, {((0,) * nalpha, tuple(k)): 1})

    @classmethod
    def from_kin_vector(cls, nalpha, space, coeffs: dict):
        """Alpha-free polynomial from {kinematic exponent tuple: coefficient}."""
        z = (0,) * nalpha
        return cls(nalpha, space, {(z, k): _norm(c) for k, c in coeffs.items() if c != 0})

    def like(self, terms=None):
        return KinPoly(self.nalpha, self.space, {} if terms is None else terms)

    # arithmetic ---------------------------------------------------------

    def _check(self, other):
        if self.nalpha != other.nalpha or self.space != other.space:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other):
        if isinstance(other, (int, Rational)):
            other = KinPoly.const(self.nalpha, self.space, other)
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = _norm(v)
            else:
                out.pop(k, None)
        return self.like(out)

    __radd__ = __add__

    def __neg__(self):
        return self.like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            if other == 0:
                return self.like()
            return self.like({k: _norm(c * other) for k, c in self.terms.items()})
        self._check(other)
        out = {}
        for (a1, k1), c1 in self.terms.items():
            for (a2, k2), c2 in other.terms.items():
                key = (_add(a1, a2), _add(k1, k2))
                out[key] = out.get(key, 0) + c1 * c2
        return self.like({k: _norm(c) for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = KinPoly.const(self.nalpha, self.space, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            other = KinPoly.const(self.nalpha, self.space, other)
        if not isinstance(other, KinPoly):
            return NotImplemented
        return self.nalpha == other.nalpha and self.space == other.space and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    # degrees --------------------------------------------------------------

    def alpha_monomials(self) -> set:
        return {a for a, _ in self.terms}

    def degree(self) -> int:
        if not self.terms:
            raise ZeroPolynomial("degree of the zero polynomial")
        return max(sum(a) for a, _ in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(a) for a, _ in self.terms}) <= 1

    def max_degree_in(self, label: int) -> int:
        return max((a[label - 1] for a, _ in self.terms), default=0)

    def subset_degree(self, alpha: tuple, labels) -> int:
        return sum(alpha[i - 1] for i in labels)

    def valuation(self, labels) -> int:
        """Minimum over monomials of the total degree in the given alphas."""
        if not self.terms:
            raise ZeroPolynomial("order of vanishing of the zero polynomial")
        idx = [i - 1 for i in labels]
        return min(sum(a[i] for i in idx) for a, _ in self.terms)

    # substitution ---------------------------------------------------------

    def set_zero(self, label: int):
        """The polynomial with alpha_label = 0."""
        i = label - 1
        return self.like({k: c for k, c in self.terms.items() if k[0][i] == 0})

    def coefficient_of_power(self, label: int, power: int):
        """Coefficient of alpha_label**power, as a polynomial free of alpha_label."""
        i = label - 1
        out = {}
        for (a, k), c in self.terms.items():
            if a[i] == power:
                b = list(a)
                b[i] = 0
                out[(tuple(b), k)] = c
        return self.like(out)

    def alpha_coefficient(self, alpha: tuple):
        """Kinematic coefficient of one alpha monomial, as an alpha-free polynomial."""
        z = (0,) * self.nalpha
        return self.like({(z, k): c for (a, k), c in self.terms.items() if a == alpha})

    def by_alpha(self) -> dict:
        """{alpha exponent tuple: {kin exponent tuple: coefficient}}."""
        out = {}
        for (a, k), c in self.terms.items():
            out.setdefault(a, {})[k] = c
        return out

    def monomial_map(self, rows: dict):
        """Substitute alpha_i -> prod beta_x^rows[i][x] (rows: label -> exponent tuple)."""
        out = {}
        n = self.nalpha
        for (a, k), c in self.terms.items():
            b = [0] * n
            for i, p in enumerate(a):
                if p:
                    r = rows[i + 1]
                    for x in range(n):
                        if r[x]:
                            b[x] += p * r[x]
            key = (tuple(b), k)
            out[key] = out.get(key, 0) + c
        return self.like({k: c for k, c in out.items() if c})

    def monomial_content(self) -> tuple:
        """Componentwise minimum of the alpha exponents over all terms."""
        if not self.terms:
            raise ZeroPolynomial("content of the zero polynomial")
        it = iter(self.terms)
        lo = list(next(it)[0])
        for a, _ in it:
            for i, p in enumerate(a):
                if p < lo[i]:
                    lo[i] = p
        return tuple(lo)

    def divide_monomial(self, mono: tuple):
        return self.like({(tuple(p - q for p, q in zip(a, mono)), k): c for (a, k), c in self.terms.items()})

    def times_monomial(self, mono: tuple):
        return self.like({(_add(a, mono), k): c for (a, k), c in self.terms.items()})

    def evaluate_kin(self, point) -> dict:
        """Alpha polynomial with numeric coefficients at a kinematic point.

        ``point`` is a sequence of values for the kinematic indeterminates in
        the order of ``space.names``.  Returns {alpha tuple: number}.
        """
        vals = list(point)
        out = {}
        for (a, k), c in self.terms.items():
            v = complex(c) if any(isinstance(x, complex) for x in vals) else float(c)
            for x, p in zip(vals, k):
                if p:
                    v *= x ** p
            out[a] = out.get(a, 0) + v
        return out

    def evaluate(self, alphas, point):
        """Numeric value at alpha values (indexed by label - 1) and a kinematic point."""
        total = 0
        for a, c in self.evaluate_kin(point).items():
            v = c
            for x, p in zip(alphas, a):
                if p:
                    v *= x ** p
            total += v
        return total

    def kin_constant(self):
        """The rational value of an alpha-free, kinematics-free polynomial."""
        if not self.terms:
            return 0
        if len(self.terms) != 1:
            raise ValueError("not a constant")
        (a, k), c = next(iter(self.terms.items()))
        if any(a) or any(k):
            raise ValueError("not a constant")
        return c

    # output -------------------------------------------------------------

    def to_string(self) -> str:
        return format_poly(self)

    __str__ = to_string

    def __repr__(self):
        return f"KinPoly({format_poly(self)!r})"

    def to_json(self) -> dict:
        terms = []
        for (a, k), c in sorted(self.terms.items(), key=lambda t: _sort_key(t[0]), reverse=True):
            terms.append([list(a), list(k), str(c)])
        return {"nalpha": self.nalpha, "nq": self.space.nq, "nm": self.space.nm, "terms": terms}

    @classmethod
    def from_json(cls, d: dict) -> "KinPoly":
        space = kin_space(d["nq"], d["nm"])
        terms = {}
        for a, k, c in d["terms"]:
            terms[(tuple(a), tuple(k))] = _norm(Fraction(c))
        return cls(d["nalpha"], space, terms)


def _sort_key(key):
    a, k = key
    return (sum(a), a, sum(k), k)


def _coef_str(c) -> str:
    return str(c) if not isinstance(c, Fraction) else f"{c.numerator}/{c.denominator}"


def _mono_str(names, exps) -> list:
    out = []
    for name, p in zip(names, exps):
        if p == 1:
            out.append(name)
        elif p > 1:
            out.append(f"{name}^{p}")
    return out


def format_poly(p: KinPoly) -> str:
    """Canonical text: alpha monomials in descending order, each with its
    kinematic coefficient; compound coefficients are parenthesised."""
    if not p.terms:
        return "0"
    anames = [f"a{i}" for i in range(1, p.nalpha + 1)]
    knames = p.space.names
    groups = p.by_alpha()
    pieces = []
    for a in sorted(groups, key=lambda x: (sum(x), x), reverse=True):
        coeff = groups[a]
        amono = _mono_str(anames, a)
        ckeys = sorted(coeff, key=lambda x: (sum(x), x), reverse=True)
        if len(ckeys) == 1:
            k = ckeys[0]
            c = coeff[k]
            factors = _mono_str(knames, k) + amono
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if mag != 1 or not factors:
                factors = [_coef_str(mag)] + factors
            pieces.append((sign, "*".join(factors)))
        else:
            inner = []
            for k in ckeys:
                c = coeff[k]
                factors = _mono_str(knames, k)
                mag = abs(c)
                if mag != 1 or not factors:
                    factors = [_coef_str(mag)] + factors
                inner.append(("-" if c < 0 else "+", "*".join(factors)))
            text = _join(inner)
            pieces.append(("+", "*".join(["(" + text + ")"] + amono)))
    return _join(pieces)


def _join(pieces) -> str:
    out = []
    for n, (sign, body) in enumerate(pieces):
        if n == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class _Sym:
    """Scratch polynomial over named symbols, used only while parsing."""

    def __init__(self, terms=None):
        self.terms = terms or {}

    @classmethod
    def const(cls, c):
        return cls({(): Fraction(c)} if c else {})

    @classmethod
    def var(cls, name):
        return cls({((name, 1),): Fraction(1)})

    def __add__(self, o):
        out = dict(self.terms)
        for k, c in o.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return _Sym(out)

    def __neg__(self):
        return _Sym({k: -c for k, c in self.terms.items()})

    def __mul__(self, o):
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in o.terms.items():
                d = dict(k1)
                for n, p in k2:
                    d[n] = d.get(n, 0) + p
                key = tuple(sorted(d.items()))
                out[key] = out.get(key, 0) + c1 * c2
        return _Sym({k: c for k, c in out.items() if c})


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character {text[pos]!r} in polynomial", 1, pos + 1)
            self.toks.append((m.group(1), m.group(2), m.group(3), m.start() + 1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, None, len(self.text) + 1)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expr(self):
        sign = 1
        t = self.peek()
        if t[2] in ("+", "-"):
            self.take()
            sign = -1 if t[2] == "-" else 1
        val = self.term()
        if sign < 0:
            val = -val
        while self.peek()[2] in ("+", "-"):
            op = self.take()[2]
            rhs = self.term()
            val = val + (rhs if op == "+" else -rhs)
        return val

    def term(self):
        val = self.power()
        while True:
            t = self.peek()
            if t[2] in ("*", "/"):
                self.take()
                rhs = self.power()
                if t[2] == "/":
                    c = rhs.terms.get(()) if len(rhs.terms) == 1 else None
                    if c is None:
                        raise ParseError("division only by a nonzero number", 1, t[3])
                    rhs = _Sym.const(1 / c)
                val = val * rhs
            elif t[0] is not None or t[1] is not None or t[2] == "(":
                val = val * self.power()  # implicit product
            else:
                return val

    def power(self):
        base = self.atom()
        t = self.peek()
        if t[2] in ("^", "**"):
            self.take()
            e = self.take()
            if e[0] is None:
                raise ParseError("exponent must be a nonnegative integer", 1, e[3])
            out = _Sym.const(1)
            for _ in range(int(e[0])):
                out = out * base
            return out
        return base

    def atom(self):
        t = self.take()
        num, name, op, col = t
        if num is not None:
            return _Sym.const(int(num))
        if name is not None:
            return _Sym.var(name)
        if op == "(":
            val = self.expr()
            if self.take()[2] != ")":
                raise ParseError("missing closing parenthesis", 1, col)
            return val
        raise ParseError("unexpected end of polynomial" if op is None and num is None and name is None
                         else f"unexpected token {op!r}", 1, col)


_NAME = re.compile(r"^(?:(a|alpha|b|beta)_?(\d+)|s_?(\d)(\d)|s(\d+)_(\d+)|msq_?(\d+)|m_?(\d*)|q_?(\d*))$")


def parse_poly(text: str, nalpha: int, space: KinSpace) -> KinPoly:
    """Parse text such as ``q1^2*a1*a2 + m1^2*a1*(a1+a2)`` into a KinPoly.

    Momenta q_i may appear only in products of total degree two, which
    are read as scalar products and rewritten in the s_ij basis with q_Q
    eliminated.  Masses m_k must appear to even powers.  ``q`` and ``m``
    without an index mean q_1 and m_1.
    """
    p = _Parser(text)
    sym = p.expr()
    if p.i != len(p.toks):
        raise ParseError("trailing input in polynomial", 1, p.peek()[3])
    nq = space.nq
    out = KinPoly.zero(nalpha, space)
    for mono, c in sym.terms.items():
        term = KinPoly.const(nalpha, space, c)
        bare = []
        for name, e in mono:
            m = _NAME.match(name)
            if not m:
                raise ParseError(f"unknown symbol {name!r}")
            g = m.groups()
            if g[1] is not None:
                lab = int(g[1])
                if not 1 <= lab <= nalpha:
                    raise ParseError(f"variable {name} outside 1..{nalpha}")
                term = term * KinPoly.alpha(nalpha, space, lab, e)
            elif g[2] is not None or g[4] is not None:
                i, j = (int(g[2]), int(g[3])) if g[2] is not None else (int(g[4]), int(g[5]))
                if not (1 <= i <= nq and 1 <= j <= nq):
                    raise ParseError(f"invariant {name} outside the momentum range")
                term = term * (_dot(i, j, nalpha, space) ** e)
            elif g[6] is not None or g[7] is not None:
                k = int(g[6] or g[7] or 1)
                if g[7] is not None and e % 2:
                    raise ParseError(f"mass {name} must appear squared")
                power = e if g[6] is not None else e // 2
                if not 1 <= k <= space.nm:
                    raise ParseError(f"mass index {k} outside 1..{space.nm}")
                term = term * KinPoly.kin_var(nalpha, space, space.msq_index(k), power)
            else:
                i = int(g[8] or 1)
                if not 1 <= i <= nq:
                    raise ParseError(f"momentum index {i} outside 1..{nq}")
                bare.extend([i] * e)
        if bare:
            if len(bare) != 2:
                raise ParseError("momenta must appear in scalar products of degree two")
            term = term * _dot(bare[0], bare[1], nalpha, space)
        out = out + term
    return out


def _dot(i: int, j: int, nalpha: int, space: KinSpace) -> KinPoly:
    """q_i . q_j in the s basis, with q_Q = -(q_1 + ... + q_{Q-1})."""
    nq = space.nq

    def vec(x):
        if x < nq:
            return {x: 1}
        return {y: -1 for y in range(1, nq)}

    coeffs = {}
    for a, ca in vec(i).items():
        for b, cb in vec(j).items():
            k = [0] * len(space)
            k[space.s_index(a, b)] = 1
            key = tuple(k)
            coeffs[key] = coeffs.get(key, 0) + ca * cb
    return KinPoly.from_kin_vector(nalpha, space, coeffs)


def square_of_vector(vec: tuple, nalpha: int, space: KinSpace) -> KinPoly:
    """(sum c_i q_i)^2 in the s basis, for a coefficient vector over q_1..q_{Q-1}."""
    coeffs = {}
    n = len(vec)
    for a in range(n):
        if not vec[a]:
            continue
        for b in range(a, n):
            if not vec[b]:
                continue
            c = vec[a] * vec[b] * (1 if a == b else 2)
            k = [0] * len(space)
            k[space.s_index(a + 1, b + 1)] = 1
            key = tuple(k)
            coeffs[key] = coeffs.get(key, 0) + c
    return KinPoly.from_kin_vector(nalpha, space, coeffs)


class CompiledPoly:
    """Numeric evaluation plan for a KinPoly at a fixed kinematic point.

    Only the coordinates listed in ``variables`` (labels) are free; the
    polynomial is evaluated on arrays of shape (npoints, len(variables)).
    """

    def __init__(self, p: KinPoly, point, variables):
        vals = p.evaluate_kin(point)
        self.variables = tuple(variables)
        idx = [v - 1 for v in self.variables]
        mons = [(a, c) for a, c in vals.items() if c != 0]
        for a, _ in mons:
            extra = [i for i, e in enumerate(a) if e and i not in idx]
            if extra:
                raise ValueError("polynomial depends on a coordinate that is not free")
        self.exps = np.array([[a[i] for i in idx] for a, _ in mons], dtype=np.int64).reshape(len(mons), len(idx))
        self.coeffs = np.array([c for _, c in mons])
        self.maxexp = int(self.exps.max()) if self.exps.size else 0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        if self.coeffs.size == 0:
            return np.zeros(x.shape[0])
        # powers[e][:, i] = x[:, i] ** e
        powers = [np.ones_like(x)]
        for _ in range(self.maxexp):
            powers.append(powers[-1] * x)
        powers = np.stack(powers)  # (maxexp+1, npts, nvar)
        out = np.zeros(x.shape[0], dtype=np.result_type(x, self.coeffs))
        cols = np.arange(x.shape[1])
        for row, c in zip(self.exps, self.coeffs):
            out += c * np.prod(powers[row, :, cols], axis=0)
        return out


def all_monomials(nvars_labels, degree: int):
    """Exponent dictionaries of all monomials of the given degree."""
    labels = list(nvars_labels)
    if not labels:
        if degree == 0:
            yield {}
        return
    first, rest = labels[0], labels[1:]
    for e in range(degree, -1, -1):
        for tail in all_monomials(rest, degree - e):
            d = {first: e} if e else {}
            d.update(tail)
            yield d
