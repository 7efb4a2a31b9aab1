"""Polynomial expressions in ``z`` and ``w`` with complex coefficients.

Grammar (whitespace is insignificant)::

    expr   := ('+' | '-')? term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' uint)?
    base   := number | number 'i' | 'z' | 'w' | '(' expr ')'

Numbers are decimal floats with an optional exponent (``1.5e-3``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .series import W, Z, Series2

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_UINT = re.compile(r"\d+")
_BASE_START = frozenset({"number", "z", "w", "("})


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        m = _NUMBER.match(text, pos)
        if m:
            out.append(Token("number", m.group(), pos))
            pos = m.end()
            continue
        if ch in "+-*^()zwi":
            out.append(Token(ch, ch, pos))
            pos += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", pos,
                         _BASE_START | {"+", "-", "*", "^", ")", "i"})
    out.append(Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, order: int):
        self.toks = tokenize(text)
        self.i = 0
        self.n = order

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, expected) -> ParseError:
        t = self.tok
        what = "end of input" if t.kind == "end" else repr(t.text)
        return ParseError(f"unexpected {what}", t.pos, frozenset(expected))

    def expr(self) -> Series2:
        sign = 1
        if self.tok.kind in ("+", "-"):
            sign = -1 if self.take().kind == "-" else 1
        out = sign * self.term()
        while self.tok.kind in ("+", "-"):
            op = self.take().kind
            t = self.term()
            out = out + t if op == "+" else out - t
        return out

    def term(self) -> Series2:
        out = self.factor()
        while self.tok.kind == "*":
            self.take()
            out = out * self.factor()
        return out

    def factor(self) -> Series2:
        base = self.base()
        if self.tok.kind != "^":
            return base
        self.take()
        t = self.tok
        if t.kind != "number" or not _UINT.fullmatch(t.text):
            raise self.fail({"uint"})
        self.take()
        return base ** int(t.text)

    def base(self) -> Series2:
        t = self.tok
        if t.kind == "number":
            self.take()
            value = complex(float(t.text))
            if self.tok.kind == "i":
                self.take()
                value = 1j * value.real
            return Series2.const(value, self.n)
        if t.kind in ("z", "w"):
            self.take()
            return Series2.var(Z if t.kind == "z" else W, self.n)
        if t.kind == "(":
            self.take()
            inner = self.expr()
            if self.tok.kind != ")":
                raise self.fail({")", "+", "-", "*", "^"})
            self.take()
            return inner
        raise self.fail(_BASE_START)

    def parse(self) -> Series2:
        out = self.expr()
        if self.tok.kind != "end":
            raise self.fail({"+", "-", "*", "^", "end"})
        return out


def parse_expression(text: str, order: int = 12) -> Series2:
    """Parse ``text`` into a series truncated at total degree ``order``.

    >>> parse_expression("(2+3i)*z", 4)[1, 0]
    (2+3j)
    """
    return _Parser(text, order).parse()


def format_complex(c: complex) -> str:
    """``(a+bi)`` with 17 significant digits, readable by the parser."""
    re_, im = float(np.real(c)), float(np.imag(c))
    # 0.0 and -0.0 both print as 0 so the output is sign-stable
    re_s = format(re_ + 0.0, ".17g")
    im_s = format(abs(im), ".17g")
    op = "-" if im < 0 else "+"
    return f"({re_s}{op}{im_s}i)"


def format_series(s: Series2, up_to: int | None = None) -> str:
    """Sum of ``(a+bi)*z^i*w^j`` terms over nonzero coefficients."""
    parts = []
    for i, j, c in s.terms(up_to):
        if c == 0:
            continue
        piece = format_complex(c)
        if i:
            piece += "*z" + (f"^{i}" if i > 1 else "")
        if j:
            piece += "*w" + (f"^{j}" if j > 1 else "")
        parts.append(piece)
    return " + ".join(parts) if parts else "0"
