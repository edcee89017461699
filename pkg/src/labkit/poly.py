"""Sparse commutative polynomials over the Gaussian rationals.

Monomials are packed into a single Python int, 16 bits per variable, so
monomial multiplication is integer addition and a polynomial is a plain
``dict[int, coefficient]``.  Coefficients are ``gmpy2.mpq`` when real and
:class:`~labkit.scalar.GaussScalar` otherwise.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping, Sequence

from gmpy2 import mpq

from .scalar import GaussScalar, demote, format_scalar, scalar, to_gauss
from .text import ParseError, parse_expression

__all__ = [
    "Monomial",
    "Poly",
    "parse_poly",
    "format_poly",
    "parse_scalar",
    "char_poly_det",
    "substitute_linear",
]

BITS = 16
MASK = (1 << BITS) - 1
MAX_EXP = MASK

_ZERO = mpq(0)


def pack(exps: Mapping[int, int] | Sequence[int]) -> int:
    items = exps.items() if isinstance(exps, Mapping) else enumerate(exps)
    key = 0
    for i, e in items:
        if e < 0 or e > MAX_EXP:
            raise OverflowError(f"exponent {e} out of range")
        if e:
            key |= e << (BITS * i)
    return key


def unpack(key: int) -> dict[int, int]:
    out = {}
    i = 0
    while key:
        e = key & MASK
        if e:
            out[i] = e
        key >>= BITS
        i += 1
    return out


def key_degree(key: int) -> int:
    d = 0
    while key:
        d += key & MASK
        key >>= BITS
    return d


def grlex_key(key: int) -> tuple[int, tuple[int, ...]]:
    """Sort key: total degree, then lexicographic with x0 most significant."""
    exps = []
    d = 0
    while key:
        e = key & MASK
        exps.append(e)
        d += e
        key >>= BITS
    return d, tuple(exps)


class Monomial:
    """Immutable commutative monomial ``prod x_i^e_i`` (0-based indices)."""

    __slots__ = ("key", "exponents", "degree")

    def __init__(self, exponents: Mapping[int, int] | Sequence[int] = ()):
        key = pack(exponents)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "exponents", unpack(key))
        object.__setattr__(self, "degree", sum(self.exponents.values()))

    @classmethod
    def from_key(cls, key: int) -> Monomial:
        m = object.__new__(cls)
        object.__setattr__(m, "key", key)
        object.__setattr__(m, "exponents", unpack(key))
        object.__setattr__(m, "degree", sum(m.exponents.values()))
        return m

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    def __mul__(self, other: Monomial) -> Monomial:
        return Monomial({i: self.exponents.get(i, 0) + other.exponents.get(i, 0)
                         for i in set(self.exponents) | set(other.exponents)})

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other: Monomial):
        return grlex_key(self.key) < grlex_key(other.key)

    def __repr__(self):
        return f"Monomial({self.exponents})"


def _term_key(m) -> int:
    if isinstance(m, Monomial):
        return m.key
    if isinstance(m, int):
        return m
    return pack(m)


class Poly:
    """Sparse polynomial in ``nvars`` variables with exact coefficients.

    Construct with a mapping from monomials (``Monomial``, exponent dict or
    exponent tuple) to coefficients, or use :meth:`var` / :meth:`const`.
    Instances are immutable; all arithmetic returns new polynomials.
    """

    __slots__ = ("nvars", "_t", "_deg")

    def __init__(self, nvars: int, terms: Mapping | None = None):
        t = {}
        if terms:
            for m, c in terms.items():
                k = _term_key(m)
                c = scalar(c)
                if c:
                    c = t.get(k, _ZERO) + c
                    if c:
                        t[k] = demote(c)
                    else:
                        t.pop(k, None)
        self._init(nvars, t)

    def _init(self, nvars, t):
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_deg", None)
        if t:
            top = max(t) >> (BITS * nvars)
            if top:
                raise ValueError(f"monomial uses a variable index >= {nvars}")

    @classmethod
    def _raw(cls, nvars: int, t: dict) -> Poly:
        p = object.__new__(cls)
        object.__setattr__(p, "nvars", nvars)
        object.__setattr__(p, "_t", t)
        object.__setattr__(p, "_deg", None)
        return p

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> Poly:
        c = scalar(c)
        return cls._raw(nvars, {0: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int, coeff=1) -> Poly:
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        c = scalar(coeff)
        return cls._raw(nvars, {1 << (BITS * i): c} if c else {})

    @classmethod
    def linear(cls, nvars: int, coeffs: Mapping[int, object] | Sequence) -> Poly:
        items = coeffs.items() if isinstance(coeffs, Mapping) else enumerate(coeffs)
        return cls(nvars, {1 << (BITS * i): c for i, c in items})

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- inspection ----------------------------------------------------------
    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def items(self) -> Iterator[tuple[Monomial, GaussScalar]]:
        """Terms in descending graded-lex order with GaussScalar coefficients."""
        for k in sorted(self._t, key=grlex_key, reverse=True):
            yield Monomial.from_key(k), to_gauss(self._t[k])

    def monomials(self) -> list[Monomial]:
        return [m for m, _ in self.items()]

    def coeff(self, m) -> GaussScalar:
        return to_gauss(self._t.get(_term_key(m), _ZERO))

    @property
    def degree(self) -> int | None:
        """Total degree, or None for the zero polynomial."""
        if self._deg is None and self._t:
            object.__setattr__(self, "_deg", max(key_degree(k) for k in self._t))
        return self._deg

    def support(self) -> set[int]:
        """Indices of variables that occur."""
        acc = 0
        for k in self._t:
            acc |= k
        out = set()
        i = 0
        while acc:
            if acc & MASK:
                out.add(i)
            acc >>= BITS
            i += 1
        return out

    def is_homogeneous(self) -> bool:
        if not self._t:
            return True
        return len({key_degree(k) for k in self._t}) == 1

    def homogeneous_components(self) -> dict[int, Poly]:
        parts: dict[int, dict] = {}
        for k, c in self._t.items():
            parts.setdefault(key_degree(k), {})[k] = c
        return {d: Poly._raw(self.nvars, t) for d, t in sorted(parts.items())}

    def is_real(self) -> bool:
        return all(type(c) is not GaussScalar for c in self._t.values())

    def real_part(self) -> Poly:
        return Poly._raw(self.nvars, {k: to_gauss(c).re for k, c in self._t.items()
                                      if to_gauss(c).re})

    def imag_part(self) -> Poly:
        return Poly._raw(self.nvars, {k: c.im for k, c in self._t.items()
                                      if type(c) is GaussScalar})

    def constant_value(self):
        """The scalar value if this is a constant polynomial, else None."""
        if not self._t:
            return _ZERO
        if len(self._t) == 1 and 0 in self._t:
            return self._t[0]
        return None

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> Poly | None:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        try:
            return Poly.const(self.nvars, other)
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _combine(self, o, 1)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _combine(self, o, -1)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _combine(o, self, -1)

    def __neg__(self):
        return Poly._raw(self.nvars, {k: -c for k, c in self._t.items()})

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return _mul(self, other)
        try:
            c = scalar(other)
        except TypeError:
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def scale(self, c) -> Poly:
        c = scalar(c)
        if not c:
            return Poly.zero(self.nvars)
        t = {k: v * c for k, v in self._t.items()}
        return Poly._raw(self.nvars, _clean(t) if type(c) is GaussScalar else t)

    def __truediv__(self, other):
        c = scalar(other)
        return self.scale(1 / c)

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.const(self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._t == other._t
        try:
            o = Poly.const(self.nvars, other)
        except TypeError:
            return NotImplemented
        return self._t == o._t

    def __hash__(self):
        return hash((self.nvars, frozenset(self._t.items())))

    # -- calculus and evaluation ---------------------------------------------
    def diff(self, i: int) -> Poly:
        """Formal partial derivative with respect to x_i."""
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for {self.nvars} variables")
        shift = BITS * i
        unit = 1 << shift
        out = {}
        for k, c in self._t.items():
            e = (k >> shift) & MASK
            if e:
                out[k - unit] = c * e
        return Poly._raw(self.nvars, out)

    def shift_mul(self, i: int, c=1) -> Poly:
        """Multiply by ``c * x_i`` (cheap: no dictionary merges)."""
        unit = 1 << (BITS * i)
        c = scalar(c)
        if not c:
            return Poly.zero(self.nvars)
        t = {k + unit: v * c for k, v in self._t.items()}
        return Poly._raw(self.nvars, _clean(t) if type(c) is GaussScalar else t)

    def evaluate(self, point: Sequence):
        """Exact value at ``point`` (scalars); returns mpq or GaussScalar."""
        vals = [scalar(v) for v in point]
        total = _ZERO
        for k, c in self._t.items():
            term = c
            for i, e in unpack(k).items():
                term = term * vals[i] ** e
            total = total + term
        return demote(total)

    def evaluate_mod(self, point: Sequence[int], p: int, sqrt_m1: int) -> int:
        """Value modulo the prime ``p``; ``i`` maps to ``sqrt_m1``."""
        total = 0
        for k, c in self._t.items():
            term = scalar_mod(c, p, sqrt_m1)
            i = 0
            while k:
                e = k & MASK
                if e:
                    term = term * pow(point[i], e, p) % p
                k >>= BITS
                i += 1
            total += term
        return total % p

    def __repr__(self):
        return f"Poly({self.nvars}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def scalar_mod(c, p: int, sqrt_m1: int) -> int:
    if type(c) is GaussScalar:
        return (scalar_mod(c.re, p, sqrt_m1) + sqrt_m1 * scalar_mod(c.im, p, sqrt_m1)) % p
    return int(c.numerator) * pow(int(c.denominator), -1, p) % p


def _clean(t: dict) -> dict:
    out = {}
    for k, c in t.items():
        if c:
            out[k] = demote(c)
    return out


def _combine(a: Poly, b: Poly, sign: int) -> Poly:
    t = dict(a._t)
    get = t.get
    complex_ = False
    for k, c in b._t.items():
        v = get(k, _ZERO) + c if sign > 0 else get(k, _ZERO) - c
        if v:
            if type(v) is GaussScalar:
                complex_ = True
            t[k] = v
        else:
            del t[k]
    return Poly._raw(a.nvars, _clean(t) if complex_ else t)


def _mul(a: Poly, b: Poly) -> Poly:
    if not a._t or not b._t:
        return Poly.zero(a.nvars)
    if a.degree + b.degree > MAX_EXP:
        raise OverflowError("product degree exceeds the packed exponent range")
    if len(a._t) > len(b._t):
        a, b = b, a
    t: dict = {}
    get = t.get
    bt = list(b._t.items())
    for k1, c1 in a._t.items():
        for k2, c2 in bt:
            k = k1 + k2
            t[k] = get(k, _ZERO) + c1 * c2
    return Poly._raw(a.nvars, _clean(t))


def add_many(nvars: int, polys: Iterable[Poly]) -> Poly:
    """Sum of many polynomials with a single accumulator."""
    t: dict = {}
    get = t.get
    for p in polys:
        for k, c in p._t.items():
            t[k] = get(k, _ZERO) + c
    return Poly._raw(nvars, _clean(t))


# -- text format ---------------------------------------------------------------

_XNAME = re.compile(r"x(\d+)$")


def _resolver(nvars: int, names: Sequence[str] | None, pattern=_XNAME):
    lookup = {n: i for i, n in enumerate(names)} if names else None

    def resolve(name: str, pos: int, text: str = "") -> int:
        if lookup is not None and name in lookup:
            return lookup[name]
        m = pattern.match(name)
        if m and int(m.group(1)) < nvars:
            return int(m.group(1))
        raise ParseError(f"unknown variable {name!r}", pos, text)

    return resolve


def parse_poly(text: str, nvars: int, names: Sequence[str] | None = None) -> Poly:
    """Parse polynomial text; variables are ``x<k>`` or entries of ``names``."""
    resolve = _resolver(nvars, names)

    def var(name, pos):
        return Poly.var(nvars, resolve(name, pos, text))

    return parse_expression(
        text,
        const=lambda c: Poly.const(nvars, c),
        var=var,
        as_constant=lambda p: p.constant_value(),
    )


def parse_scalar(text: str):
    p = parse_poly(text, 0)
    c = p.constant_value()
    return c


def _format_monomial(key: int, names: Sequence[str] | None) -> str:
    parts = []
    for i, e in sorted(unpack(key).items()):
        n = names[i] if names else f"x{i}"
        parts.append(n if e == 1 else f"{n}^{e}")
    return "*".join(parts)


def format_poly(p: Poly, names: Sequence[str] | None = None) -> str:
    """Canonical text: terms in descending graded-lex order."""
    if not p._t:
        return "0"
    out = []
    for k in sorted(p._t, key=grlex_key, reverse=True):
        c = p._t[k]
        neg = False
        if type(c) is not GaussScalar:
            neg = c < 0
            c = -c if neg else c
        elif not c.re and c.im < 0:
            neg = True
            c = -c
        mono = _format_monomial(k, names)
        cs = format_scalar(c)
        if not mono:
            body = cs
        elif cs == "1":
            body = mono
        else:
            body = f"{cs}*{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


# -- linear substitution -------------------------------------------------------

def substitute_linear(f: Poly, rows: Mapping[int, Poly]) -> Poly:
    """Replace x_v by the degree <= 1 polynomial ``rows[v]``.

    Variables not in ``rows`` pass through unchanged.
    """
    for v, img in rows.items():
        if not 0 <= v < f.nvars:
            raise IndexError(f"variable index {v} out of range")
        if img.nvars != f.nvars:
            raise ValueError("image polynomial has a different variable count")
        if img.degree is not None and img.degree > 1:
            raise ValueError(f"image of x{v} has degree {img.degree} > 1")
    if not rows:
        return f
    sub_mask = 0
    for v in rows:
        sub_mask |= MASK << (BITS * v)
    powers: dict[tuple[int, int], Poly] = {}

    def power(v, e):
        key = (v, e)
        if key not in powers:
            powers[key] = rows[v] if e == 1 else power(v, e - 1) * rows[v]
        return powers[key]

    # group terms by their substituted part so each product is built once
    groups: dict[int, dict[int, object]] = {}
    for k, c in f._t.items():
        groups.setdefault(k & sub_mask, {})[k & ~sub_mask] = c
    pieces = []
    for sk, rest in groups.items():
        image = Poly.const(f.nvars, 1)
        for v, e in unpack(sk).items():
            image = image * power(v, e)
        pieces.append(image * Poly._raw(f.nvars, rest))
    return add_many(f.nvars, pieces)


# -- characteristic polynomial ------------------------------------------------

def char_poly_det(mat: Sequence[Sequence[Poly]]) -> list[Poly]:
    """Coefficients of ``det(mat - T*Id)`` by power of T, division-free.

    Uses Berkowitz's algorithm, so only ring operations on the entries are
    needed.  ``result[k]`` is the coefficient of ``T**k``; the leading
    coefficient is ``(-1)**n``.
    """
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix is not square")
    if n == 0:
        return []
    nvars = mat[0][0].nvars
    one = Poly.const(nvars, 1)
    # c holds det(T*Id - A_k) coefficients, highest power first
    c = [one]
    for k in range(1, n + 1):
        a = mat[k - 1][k - 1]
        r = [mat[k - 1][j] for j in range(k - 1)]
        s = [mat[j][k - 1] for j in range(k - 1)]
        q = [one, -a]
        v = s
        for _ in range(k - 1):
            q.append(-add_many(nvars, (r[j] * v[j] for j in range(k - 1))))
            v = [add_many(nvars, (mat[i][j] * v[j] for j in range(k - 1))) for i in range(k - 1)]
        new = []
        for i in range(k + 1):
            new.append(add_many(nvars, (q[i - j] * c[j] for j in range(min(i, k - 1) + 1))))
        c = new
    sign = -1 if n % 2 else 1
    return [c[n - t].scale(sign) if sign < 0 else c[n - t] for t in range(n + 1)]
