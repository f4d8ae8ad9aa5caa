"""Mini expression grammar for polynomial surface specs.

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' uint)?
    base   := 's' | 't' | number | '(' expr ')'

Numbers are integer or rational literals (e.g. ``3``, ``-2``, ``3/4``).
The result is an exact Poly2; anything non-polynomial is a parse error.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import SchemaError
from .polynomial import Poly2

_TOKEN = re.compile(r"\s*(?:(\d+/\d+|\d+)|([st()+\-*^]))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise SchemaError(f"unexpected character at position {pos}: {text[pos:]!r}")
            if m.group(1):
                self.tokens.append(("num", m.group(1)))
            else:
                self.tokens.append((m.group(2), m.group(2)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expr(self) -> Poly2:
        sign = 1
        if self.peek() == "-":
            self.next()
            sign = -1
        acc = self.term() * sign
        while self.peek() in ("+", "-"):
            op, _ = self.next()
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Poly2:
        acc = self.factor()
        while self.peek() == "*":
            self.next()
            acc = acc * self.factor()
        return acc

    def factor(self) -> Poly2:
        base = self.base()
        if self.peek() == "^":
            self.next()
            kind, val = self.next() if self.i < len(self.tokens) else (None, None)
            if kind != "num" or "/" in (val or ""):
                raise SchemaError("exponent must be a nonnegative integer")
            out = Poly2.constant(1)
            for _ in range(int(val)):
                out = out * base
            return out
        return base

    def base(self) -> Poly2:
        if self.peek() is None:
            raise SchemaError("unexpected end of expression")
        kind, val = self.next()
        if kind == "num":
            return Poly2.constant(Fraction(val))
        if kind == "s":
            return Poly2.monomial(1, 0)
        if kind == "t":
            return Poly2.monomial(0, 1)
        if kind == "(":
            inner = self.expr()
            if self.peek() != ")":
                raise SchemaError("missing closing parenthesis")
            self.next()
            return inner
        raise SchemaError(f"unexpected token {val!r}")


def parse_polynomial(text: str) -> Poly2:
    parser = _Parser(text)
    out = parser.expr()
    if parser.i != len(parser.tokens):
        raise SchemaError(f"trailing input from token {parser.i}")
    return out
