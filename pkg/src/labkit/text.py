"""Shared tokenizer and recursive-descent parser for polynomial text.

Grammar (whitespace ignored, juxtaposition means ``*``)::

    expr    := ['+'|'-'] term (('+'|'-') term)*
    term    := power (('*'|'/'|<juxtaposition>) power)*
    power   := primary ['^' INT]
    primary := INT | NAME | 'i' | '(' expr ')'

``/`` is only allowed with a nonzero constant on the right.  ``i`` is the
imaginary unit and can never be a variable name.  The same parser builds
commutative polynomials and noncommutative ones; factor order is kept
left to right, so it is safe for words.
"""

from __future__ import annotations

import re
from typing import Callable

__all__ = ["ParseError", "parse_expression"]


class ParseError(ValueError):
    """Malformed polynomial text; ``pos`` is the 0-based character offset."""

    def __init__(self, msg: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{msg} at position {pos}")


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace remains
            break
        if m.group(1) is not None:
            out.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", m.start(3), text)
            out.append(("op", ch, m.start(3)))
        pos = m.end()
    out.append(("end", "", n))
    return out


def parse_expression(
    text: str,
    *,
    const: Callable,
    var: Callable[[str, int], object],
    as_constant: Callable[[object], object | None],
):
    """Parse ``text`` into a ring element.

    ``const(c)`` lifts an exact scalar, ``var(name, pos)`` resolves a
    variable (raising :class:`ParseError` if unknown) and ``as_constant``
    returns the scalar value of a constant element or None.
    """
    from .scalar import I

    toks = _tokenize(text)
    idx = 0

    def peek():
        return toks[idx]

    def take():
        nonlocal idx
        t = toks[idx]
        idx += 1
        return t

    def expect(kind, value=None):
        t = take()
        if t[0] != kind or (value is not None and t[1] != value):
            want = value or kind
            raise ParseError(f"expected {want!r}, found {t[1] or 'end of input'!r}", t[2], text)
        return t

    def starts_primary(t):
        return t[0] in ("int", "name") or (t[0] == "op" and t[1] == "(")

    def primary():
        t = take()
        if t[0] == "int":
            return const(int(t[1]))
        if t[0] == "name":
            if t[1] == "i":
                return const(I)
            return var(t[1], t[2])
        if t[0] == "op" and t[1] == "(":
            e = expr()
            expect("op", ")")
            return e
        raise ParseError(f"unexpected {t[1] or 'end of input'!r}", t[2], text)

    def power():
        base = primary()
        t = peek()
        if t[0] == "op" and t[1] == "^":
            take()
            e = expect("int")
            return base ** int(e[1])
        return base

    def term():
        acc = power()
        while True:
            t = peek()
            if t[0] == "op" and t[1] == "*":
                take()
                acc = acc * power()
            elif t[0] == "op" and t[1] == "/":
                take()
                pos = peek()[2]
                d = as_constant(power())
                if d is None:
                    raise ParseError("division by a non-constant", pos, text)
                if not d:
                    raise ParseError("division by zero", pos, text)
                acc = acc * const(1 / d)
            elif starts_primary(t):
                acc = acc * power()
            else:
                return acc

    def expr():
        t = peek()
        neg = False
        if t[0] == "op" and t[1] in "+-":
            take()
            neg = t[1] == "-"
        acc = term()
        if neg:
            acc = -acc
        while True:
            t = peek()
            if t[0] == "op" and t[1] in "+-":
                take()
                rhs = term()
                acc = acc + rhs if t[1] == "+" else acc - rhs
            else:
                return acc

    if toks[0][0] == "end":
        raise ParseError("empty input", 0, text)
    result = expr()
    t = peek()
    if t[0] != "end":
        raise ParseError(f"unexpected {t[1]!r}", t[2], text)
    return result
