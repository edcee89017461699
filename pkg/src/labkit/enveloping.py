"""Universal enveloping algebra: words, PBW normal ordering, symmetrization.

An :class:`NCPoly` maps words (tuples of generator indices) to exact
coefficients.  ``normal_order`` rewrites ``X_a X_b -> X_b X_a + [X_a, X_b]``
for adjacent ``a > b`` until every word is non-decreasing, which by PBW is
a unique representative.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from gmpy2 import mpq

from .algebra import LieAlgebra
from .poly import BITS, Poly, _clean
from .scalar import demote, format_scalar, scalar, to_gauss
from .text import ParseError, parse_expression

__all__ = [
    "NCPoly",
    "normal_order",
    "nc_mul",
    "nc_commutator",
    "symmetrize",
    "project",
    "filtration_degree",
    "leading_symbol",
    "Factorizability",
    "FactorizabilityResult",
    "certify_nonfactorizable",
    "parse_ncpoly",
    "format_ncpoly",
]

_ZERO = mpq(0)

Word = tuple[int, ...]


def is_pbw(word: Word) -> bool:
    return all(a <= b for a, b in zip(word, word[1:]))


class NCPoly:
    """Noncommutative polynomial in the generators of an ``nvars``-dim algebra.

    ``normalized`` is True when every word is non-decreasing; only then is
    equality of two elements of U(g) coefficient-wise.
    """

    __slots__ = ("nvars", "terms", "normalized")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        t: dict[Word, object] = {}
        for w, c in (terms or {}).items():
            w = tuple(w)
            if any(not 0 <= a < nvars for a in w):
                raise ValueError(f"word {w} uses a generator index >= {nvars}")
            c = t.get(w, _ZERO) + scalar(c)
            if c:
                t[w] = demote(c)
            else:
                t.pop(w, None)
        self.nvars = nvars
        self.terms = t
        self.normalized = all(is_pbw(w) for w in t)

    @classmethod
    def _raw(cls, nvars: int, t: dict) -> NCPoly:
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = t
        p.normalized = all(is_pbw(w) for w in t)
        return p

    @classmethod
    def generator(cls, nvars: int, i: int) -> NCPoly:
        return cls(nvars, {(i,): 1})

    @classmethod
    def const(cls, nvars: int, c) -> NCPoly:
        return cls(nvars, {(): c})

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, int) and other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def _lift(self, other):
        if isinstance(other, NCPoly):
            if other.nvars != self.nvars:
                raise ValueError("generator count mismatch")
            return other
        try:
            return NCPoly.const(self.nvars, other)
        except TypeError:
            return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return NCPoly._raw(self.nvars, _accumulate([(self.terms, 1), (o.terms, 1)]))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return NCPoly._raw(self.nvars, _accumulate([(self.terms, 1), (o.terms, -1)]))

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return NCPoly._raw(self.nvars, {w: -c for w, c in self.terms.items()})

    def __mul__(self, other):
        """Product in the free algebra (concatenation); not normal-ordered."""
        if not isinstance(other, NCPoly):
            try:
                c = scalar(other)
            except TypeError:
                return NotImplemented
            return NCPoly._raw(self.nvars, _clean({w: v * c for w, v in self.terms.items()}))
        o = self._lift(other)
        t: dict[Word, object] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in o.terms.items():
                w = w1 + w2
                t[w] = t.get(w, _ZERO) + c1 * c2
        return NCPoly._raw(self.nvars, _clean(t))

    def __rmul__(self, other):
        try:
            c = scalar(other)
        except TypeError:
            return NotImplemented
        return NCPoly._raw(self.nvars, _clean({w: c * v for w, v in self.terms.items()}))

    def __pow__(self, e: int):
        out = NCPoly.const(self.nvars, 1)
        for _ in range(e):
            out = out * self
        return out

    def constant_value(self):
        if not self.terms:
            return _ZERO
        if set(self.terms) == {()}:
            return self.terms[()]
        return None

    def __repr__(self):
        return f"NCPoly({self.nvars}, {format_ncpoly(self)!r})"

    def __str__(self):
        return format_ncpoly(self)


def _accumulate(parts) -> dict:
    t: dict = {}
    for terms, sign in parts:
        for w, c in terms.items():
            t[w] = t.get(w, _ZERO) + (c if sign > 0 else -c)
    return _clean(t)


# -- normal ordering ------------------------------------------------------------

class _Normalizer:
    """Memoized leftmost-descent rewriting for one algebra (per invocation)."""

    def __init__(self, alg: LieAlgebra):
        self.alg = alg
        self.memo: dict[Word, dict[Word, object]] = {}

    def word(self, w: Word) -> dict[Word, object]:
        hit = self.memo.get(w)
        if hit is not None:
            return hit
        stack = [w]
        # iterative post-order so long words cannot hit the recursion limit
        while stack:
            cur = stack[-1]
            if cur in self.memo:
                stack.pop()
                continue
            pos = _first_descent(cur)
            if pos is None:
                self.memo[cur] = {cur: mpq(1)}
                stack.pop()
                continue
            deps = self._rewrites(cur, pos)
            missing = [d for d, _ in deps if d not in self.memo]
            if missing:
                stack.extend(missing)
                continue
            acc: dict[Word, object] = {}
            for d, c in deps:
                for ww, cc in self.memo[d].items():
                    acc[ww] = acc.get(ww, _ZERO) + c * cc
            self.memo[cur] = _clean(acc)
            stack.pop()
        return self.memo[w]

    def _rewrites(self, w: Word, pos: int) -> list[tuple[Word, object]]:
        a, b = w[pos], w[pos + 1]
        out = [(w[:pos] + (b, a) + w[pos + 2:], mpq(1))]
        for k, c in self.alg.bracket(a, b).items():
            out.append((w[:pos] + (k,) + w[pos + 2:], c))
        return out

    def poly(self, p: NCPoly) -> NCPoly:
        t: dict[Word, object] = {}
        for w, c in p.terms.items():
            for ww, cc in self.word(w).items():
                t[ww] = t.get(ww, _ZERO) + c * cc
        return NCPoly._raw(p.nvars, _clean(t))


def _first_descent(w: Word) -> int | None:
    for i in range(len(w) - 1):
        if w[i] > w[i + 1]:
            return i
    return None


def _check(alg: LieAlgebra, p: NCPoly):
    if p.nvars != alg.dim:
        raise ValueError(f"NCPoly over {p.nvars} generators, algebra has {alg.dim}")


def normal_order(alg: LieAlgebra, p: NCPoly, *, strategy: str = "leftmost",
                 rng: random.Random | None = None) -> NCPoly:
    """PBW normal form of ``p``.

    ``strategy="random"`` picks the descent to rewrite at random and skips
    memoization; it exists to exercise confluence.
    """
    _check(alg, p)
    if strategy == "leftmost":
        return _Normalizer(alg).poly(p)
    if strategy != "random":
        raise ValueError(f"unknown strategy {strategy!r}")
    rng = rng or random.Random(0)
    pending = dict(p.terms)
    done: dict[Word, object] = {}
    while pending:
        w, c = pending.popitem()
        descents = [i for i in range(len(w) - 1) if w[i] > w[i + 1]]
        if not descents:
            done[w] = done.get(w, _ZERO) + c
            continue
        pos = rng.choice(descents)
        a, b = w[pos], w[pos + 1]
        targets = [(w[:pos] + (b, a) + w[pos + 2:], c)]
        targets += [(w[:pos] + (k,) + w[pos + 2:], c * ck) for k, ck in alg.bracket(a, b).items()]
        for ww, cc in targets:
            v = pending.get(ww, _ZERO) + cc
            if v:
                pending[ww] = v
            else:
                pending.pop(ww, None)
    return NCPoly._raw(p.nvars, _clean(done))


def nc_mul(alg: LieAlgebra, a: NCPoly, b: NCPoly) -> NCPoly:
    _check(alg, a)
    return normal_order(alg, a * b)


def nc_commutator(alg: LieAlgebra, a: NCPoly, b: NCPoly) -> NCPoly:
    """Normal-ordered ``ab - ba``."""
    _check(alg, a)
    _check(alg, b)
    norm = _Normalizer(alg)
    return norm.poly(a * b - b * a)


# -- symmetrization and projection ----------------------------------------------

def _distinct_permutations(letters: Sequence[int]):
    """Distinct orderings of a multiset, in lexicographic order."""
    seq = sorted(letters)
    n = len(seq)
    while True:
        yield tuple(seq)
        i = n - 2
        while i >= 0 and seq[i] >= seq[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while seq[j] <= seq[i]:
            j -= 1
        seq[i], seq[j] = seq[j], seq[i]
        seq[i + 1:] = reversed(seq[i + 1:])


def symmetrize(alg: LieAlgebra, f: Poly) -> NCPoly:
    """``Lambda(f)``: average of every monomial over the orderings of its factors.

    Each distinct ordering of a monomial with exponents ``a_i`` and degree
    ``p`` carries weight ``prod(a_i!) / p!``; the result is normal-ordered.
    """
    if f.nvars != alg.dim:
        raise ValueError("polynomial variable count differs from the algebra dimension")
    t: dict[Word, object] = {}
    for mono, c in f.items():
        letters = [i for i, e in sorted(mono.exponents.items()) for _ in range(e)]
        weight = mpq(math.prod(math.factorial(e) for e in mono.exponents.values()),
                     math.factorial(len(letters)))
        cw = demote(c) * weight
        for w in _distinct_permutations(letters):
            t[w] = t.get(w, _ZERO) + cw
    return normal_order(alg, NCPoly._raw(alg.dim, _clean(t)))


def project(p: NCPoly) -> Poly:
    """Commutative image: each word becomes the monomial of its letter multiset."""
    t: dict[int, object] = {}
    for w, c in p.terms.items():
        key = 0
        for a in w:
            key += 1 << (BITS * a)
        t[key] = t.get(key, _ZERO) + c
    return Poly._raw(p.nvars, _clean(t))


def filtration_degree(p: NCPoly) -> int | None:
    """Longest word length present; None for the zero element."""
    if not p.terms:
        return None
    return max(len(w) for w in p.terms)


def leading_symbol(p: NCPoly, d: int) -> Poly:
    """Commutative image of the length-``d`` words of a normal-ordered element."""
    return project(NCPoly._raw(p.nvars, {w: c for w, c in p.terms.items() if len(w) == d}))


# -- factorizability ------------------------------------------------------------

class Factorizability(enum.Enum):
    NON_FACTORIZABLE = "NonFactorizable"
    POSSIBLY_FACTORIZABLE = "PossiblyFactorizable"


@dataclass(frozen=True)
class FactorizabilityResult:
    status: Factorizability
    # witness: (monomial of f, monomial of g, shared multiset), as exponent dicts
    witness: tuple[dict, dict, dict] | None = None

    @property
    def nonfactorizable(self) -> bool:
        return self.status is Factorizability.NON_FACTORIZABLE

    def to_json(self) -> dict:
        out = {"status": self.status.value}
        if self.witness is not None:
            out["witness"] = {
                name: {str(k): v for k, v in sorted(part.items())}
                for name, part in zip(("f_monomial", "g_monomial", "shared"), self.witness)
            }
        return out


def _pair_witness(alg: LieAlgebra, e1: dict, e2: dict) -> dict | None:
    common = sorted(set(e1) & set(e2))
    if not common:
        return None
    # with a fixed shared support, taking full shared multiplicity leaves the
    # smallest residuals, which only weakens the commutation constraints
    for r in range(1, len(common) + 1):
        for support in itertools.combinations(common, r):
            shared = {v: min(e1[v], e2[v]) for v in support}
            res1 = [v for v, e in e1.items() if e - shared.get(v, 0) > 0]
            res2 = [v for v, e in e2.items() if e - shared.get(v, 0) > 0]
            residual = set(res1) | set(res2)
            if not all(alg.commutes(s, t) for s in support for t in residual):
                continue
            if not all(alg.commutes(s, t) for s in res1 for t in res2):
                continue
            return shared
    return None


def certify_nonfactorizable(alg: LieAlgebra, f: Poly, g: Poly) -> FactorizabilityResult:
    """Conservative check that no monomial pair of (f, g) has a factorizable shape.

    A pair of monomials is flagged when some nonempty shared variable
    multiset commutes with all residual generators of both monomials and
    the residuals commute generator-wise.  Equal monomials are always
    flagged.  ``NON_FACTORIZABLE`` is therefore a sufficient certificate.
    """
    if not f or not g:
        raise ValueError("factorizability is only defined for nonzero polynomials")
    gm = [m.exponents for m in g.monomials()]
    for m1 in f.monomials():
        e1 = m1.exponents
        for e2 in gm:
            shared = _pair_witness(alg, e1, e2)
            if shared is not None:
                return FactorizabilityResult(Factorizability.POSSIBLY_FACTORIZABLE,
                                             (dict(e1), dict(e2), shared))
    return FactorizabilityResult(Factorizability.NON_FACTORIZABLE)


# -- text ------------------------------------------------------------------------

_XNAME = re.compile(r"X(\d+)$")


def parse_ncpoly(text: str, nvars: int, names: Sequence[str] | None = None) -> NCPoly:
    """Parse e.g. ``"2*X0 X1 - (1/2)*X2"``; factor order is kept."""
    lookup = {n: i for i, n in enumerate(names)} if names else {}

    def var(name, pos):
        if name in lookup:
            return NCPoly.generator(nvars, lookup[name])
        m = _XNAME.match(name)
        if m and int(m.group(1)) < nvars:
            return NCPoly.generator(nvars, int(m.group(1)))
        raise ParseError(f"unknown generator {name!r}", pos, text)

    return parse_expression(text, const=lambda c: NCPoly.const(nvars, c), var=var,
                            as_constant=lambda p: p.constant_value())


def format_ncpoly(p: NCPoly, names: Sequence[str] | None = None) -> str:
    """Terms ordered by descending length, then lexicographically."""
    if not p.terms:
        return "0"
    out = []
    for w in sorted(p.terms, key=lambda w: (-len(w), w)):
        c = p.terms[w]
        g = to_gauss(c)
        neg = (g.re < 0) if not g.im else (not g.re and g.im < 0)
        cs = format_scalar(-c if neg else c)
        word = " ".join(names[a] if names else f"X{a}" for a in w)
        if not word:
            body = cs
        elif cs == "1":
            body = word
        else:
            body = f"{cs}*{word}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)
