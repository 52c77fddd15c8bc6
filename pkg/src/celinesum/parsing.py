"""Tokenizer and recursive-descent parser for rational expressions.

The same grammar serves operator text (``(k+2)*N^2 - (2*k+3)*N - 3*(k+1)``),
polynomial arguments of term factors, and integer-affine index expressions::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" exponent)?
    atom   := INT | NAME | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Function calls are not evaluated here; :func:`parse_tree` returns nested
tuples that callers interpret.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .arith import RatFunc
from .errors import TermSyntaxError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^(),]))")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise TermSyntaxError("unexpected character", text, pos + stripped)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(Token("int", m.group(1), start))
        elif m.group(2):
            out.append(Token("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            out.append(Token("op", op, start))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


# Tree nodes: ("int", value) ("name", id) ("neg", x) ("add"|"sub"|"mul"|"div", a, b)
# ("pow", base, exponent_tree) ("call", name, [args])
class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, message, tok=None):
        tok = tok or self.tok
        raise TermSyntaxError(message, self.text, tok.pos)

    def eat(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.eat(text):
            self.error(f"expected {text!r}")

    def parse(self):
        if self.tok.kind == "end":
            self.error("empty expression")
        node = self.expr()
        if self.tok.kind != "end":
            self.error("unexpected token")
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = "add" if self.tok.text == "+" else "sub"
            self.i += 1
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = "mul" if self.tok.text == "*" else "div"
            self.i += 1
            node = (op, node, self.unary())
        return node

    def unary(self):
        if self.eat("-"):
            return ("neg", self.unary())
        if self.eat("+"):
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.eat("^"):
            if self.tok.kind == "op" and self.tok.text == "-":
                self.i += 1
                return ("pow", base, ("neg", self.atom()))
            return ("pow", base, self.atom())
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return ("int", int(tok.text))
        if tok.kind == "name":
            self.i += 1
            if self.eat("("):
                args = [self.expr()]
                while self.eat(","):
                    args.append(self.expr())
                self.expect(")")
                return ("call", tok.text, args, tok.pos)
            return ("name", tok.text, tok.pos)
        if self.eat("("):
            node = self.expr()
            self.expect(")")
            return node
        self.error("unexpected token")


def parse_tree(text: str):
    return _Parser(text).parse()


def evaluate(node, ctx, text: str = "", allowed: set[str] | None = None) -> RatFunc:
    """Evaluate a call-free tree to a :class:`RatFunc` in ``ctx``."""
    names = set(ctx.names()) if allowed is None else allowed
    kind = node[0]
    if kind == "int":
        return RatFunc.const(ctx, node[1])
    if kind == "name":
        if node[1] not in names:
            raise TermSyntaxError(f"unknown symbol {node[1]!r}", text, node[2])
        return RatFunc.var(ctx, node[1])
    if kind == "neg":
        return -evaluate(node[1], ctx, text, names)
    if kind in ("add", "sub", "mul", "div"):
        a = evaluate(node[1], ctx, text, names)
        b = evaluate(node[2], ctx, text, names)
        if kind == "add":
            return a + b
        if kind == "sub":
            return a - b
        if kind == "mul":
            return a * b
        if b.is_zero():
            raise TermSyntaxError("division by zero", text, 0)
        return a / b
    if kind == "pow":
        e = evaluate(node[2], ctx, text, names)
        if not e.is_constant() or e.value().denominator != 1:
            raise TermSyntaxError("exponent must be an integer constant", text, 0)
        return evaluate(node[1], ctx, text, names) ** int(e.value())
    if kind == "call":
        raise TermSyntaxError(f"function {node[1]!r} not allowed here", text, node[3])
    raise TermSyntaxError("malformed expression", text, 0)


def parse_rational(text: str, ctx) -> RatFunc:
    return evaluate(parse_tree(text), ctx, text)


def affine_coefficients(f: RatFunc, var_names: tuple[str, ...]) -> tuple[dict[str, int], int] | None:
    """Integer linear form ``sum c_v*v + c0`` of ``f`` or None if not affine-integer."""
    if not f.is_poly() or f.num.total_degree() > 1:
        return None
    ctx = f.ctx
    names = ctx.names()
    coeffs = {v: 0 for v in var_names}
    const = 0
    for exps, c in f.num.to_dict().items():
        c = int(c)
        if sum(exps) == 0:
            const = c
            continue
        (idx,) = [i for i, e in enumerate(exps) if e]
        if names[idx] not in coeffs:
            return None
        coeffs[names[idx]] = c
    return coeffs, const


def to_fraction(f: RatFunc) -> Fraction:
    return f.value()
