"""Element expressions: ``expr := term ('*' term)*``,
``term := (ident | '1' | '(' expr ')') ('^' int)?``.

Columns in error messages are 1-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ExprSyntaxError, UnknownGenerator


@dataclass(frozen=True)
class Ident:
    name: str
    column: int


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Power:
    base: object
    exp: int


@dataclass(frozen=True)
class Product:
    terms: tuple


_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>\d+)|(?P<op>[*^()\-+]))")


def _tokenize(src):
    toks = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m:
            col = pos + 1 + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {src[col - 1]!r}", col)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start + 1))
        pos = m.end()
    toks.append(("end", "", len(src) + 1))
    return toks


class _Parser:
    def __init__(self, src):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        kind, val, col = self.take()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", col)

    def expr(self):
        terms = [self.term()]
        while self.peek()[:2] == ("op", "*"):
            self.take()
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Product(tuple(terms))

    def term(self):
        kind, val, col = self.take()
        if kind == "ident":
            base = Ident(val, col)
        elif kind == "int" and val == "1":
            base = One()
        elif (kind, val) == ("op", "("):
            base = self.expr()
            self.expect_op(")")
        else:
            raise ExprSyntaxError(f"expected a generator or '(' but found {val or 'end of input'!r}", col)
        if self.peek()[:2] == ("op", "^"):
            self.take()
            base = Power(base, self.integer())
        return base

    def integer(self):
        kind, val, col = self.take()
        paren = (kind, val) == ("op", "(")
        if paren:
            kind, val, col = self.take()
        sign = 1
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            kind, val, col = self.take()
        if kind != "int":
            raise ExprSyntaxError("expected an integer exponent", col)
        if paren:
            self.expect_op(")")
        return sign * int(val)


def parse_element(src: str):
    p = _Parser(src)
    ast = p.expr()
    kind, val, col = p.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected {val!r}", col)
    return ast


def resolve(ast, gens: dict, identity):
    """Evaluate an AST against a name -> element map."""
    if isinstance(ast, One):
        return identity
    if isinstance(ast, Ident):
        if ast.name not in gens:
            raise UnknownGenerator(f"unknown generator {ast.name!r} at column {ast.column}")
        return gens[ast.name]
    if isinstance(ast, Power):
        return resolve(ast.base, gens, identity) ** ast.exp
    out = identity
    for t in ast.terms:
        out = out * resolve(t, gens, identity)
    return out


def resolve_word(ast, names):
    """Evaluate an AST to a free word (1-based signed letters) over ``names``."""
    from .freegroup import free_mul, free_pow

    if isinstance(ast, One):
        return ()
    if isinstance(ast, Ident):
        if ast.name not in names:
            raise UnknownGenerator(f"unknown generator {ast.name!r} at column {ast.column}")
        return (list(names).index(ast.name) + 1,)
    if isinstance(ast, Power):
        return free_pow(resolve_word(ast.base, names), ast.exp)
    return free_mul(*(resolve_word(t, names) for t in ast.terms))


def parse_word(src: str, names):
    return resolve_word(parse_element(src), names)


def parse_in(family, src: str):
    """Parse ``src`` as an element of a group family."""
    return resolve(parse_element(src), family.generators(), family.identity())
