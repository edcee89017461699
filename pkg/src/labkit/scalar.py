"""Exact Gaussian-rational scalars.

Polynomial kernels keep purely real coefficients as ``gmpy2.mpq`` and only
promote to :class:`GaussScalar` when an imaginary part is present, so the
common rational case runs at mpq speed.  :func:`scalar` and
:func:`demote` convert between the two views.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

__all__ = ["GaussScalar", "scalar", "demote", "to_gauss", "format_scalar", "I"]


def _q(x) -> mpq:
    if isinstance(x, GaussScalar):
        if x.im:
            raise ValueError(f"{x} has a nonzero imaginary part")
        return x.re
    if type(x) is mpq:
        return x
    if isinstance(x, (int, Fraction, Rational)):
        return mpq(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return mpq(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class GaussScalar:
    """Element ``re + im*i`` of Q(i) with reduced rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _q(re))
        object.__setattr__(self, "im", _q(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussScalar is immutable")

    # -- arithmetic ---------------------------------------------------------
    @staticmethod
    def _parts(x):
        if isinstance(x, GaussScalar):
            return x.re, x.im
        if isinstance(x, (int, Rational)) or type(x) is mpq:
            return _q(x), mpq(0)
        return None

    def __add__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return GaussScalar(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return GaussScalar(self.re - p[0], self.im - p[1])

    def __rsub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return GaussScalar(p[0] - self.re, p[1] - self.im)

    def __mul__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b = self.re, self.im
        c, d = p
        return GaussScalar(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return self * GaussScalar(*p).inverse()

    def __rtruediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return GaussScalar(*p) * self.inverse()

    def __neg__(self):
        return GaussScalar(-self.re, -self.im)

    def __pos__(self):
        return self

    def inverse(self) -> GaussScalar:
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero")
        return GaussScalar(self.re / n, -self.im / n)

    def conjugate(self) -> GaussScalar:
        return GaussScalar(self.re, -self.im)

    # -- comparison ---------------------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return self.re == p[0] and self.im == p[1]

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    @property
    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussScalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


I = GaussScalar(0, 1)


def scalar(x) -> mpq | GaussScalar:
    """Coerce ``x`` to the internal coefficient form (mpq, or GaussScalar if complex)."""
    if isinstance(x, GaussScalar):
        return x.re if not x.im else x
    if isinstance(x, str):
        from .poly import parse_scalar

        return parse_scalar(x)
    return _q(x)


def demote(c):
    if type(c) is GaussScalar and not c.im:
        return c.re
    return c


def to_gauss(c) -> GaussScalar:
    return c if isinstance(c, GaussScalar) else GaussScalar(c)


def _fmt_q(q: mpq) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(c) -> str:
    """Render a coefficient in the polynomial text grammar."""
    g = to_gauss(c)
    if not g.im:
        return _fmt_q(g.re)
    if g.im == 1:
        im = "i"
    elif g.im == -1:
        im = "-i"
    else:
        im = f"{_fmt_q(g.im)}*i"
    if not g.re:
        return im
    sign = "-" if im.startswith("-") else "+"
    return f"({_fmt_q(g.re)}{sign}{im.lstrip('-')})"
