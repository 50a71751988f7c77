"""Expression mini-language for elements of the dense *-algebra.

    expr   := ['-'] term (('+' | '-') term)*
    term   := postfix+                      juxtaposition is the product
    postfix:= atom '*'*                     each '*' takes an adjoint
    atom   := NUM ['/' NUM] | 'i' | 's(' word ')' ['@' NAME] | 'p(' word ')' ['@' NAME]
            | 'phi(' expr ')' | '(' expr ')'
    word   := NAME ('.' NAME)* | empty

``s(e.f)`` is ``s_{ef}``, ``p(λ)`` is ``s_λ s_λ*`` and ``s()@v`` is the vertex
projection (plain ``s()`` is allowed when the graph has one vertex).
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import AlgebraElement, GaussianRational, expectation, multiply
from .core import KGraph, format_id
from .errors import FileSyntaxError, UnknownName

_TOKEN = re.compile(r"\s*(?:(\d+)|(phi\(|s\(|p\()|([()*+\-/.@])|([^\s()*+\-/.@]+))")


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FileSyntaxError(f"cannot read {text[pos:]!r}")
        num, fn, op, name = m.groups()
        if num is not None:
            out.append(("num", num))
        elif fn is not None:
            out.append(("fn", fn[:-1]))
        elif op is not None:
            out.append(("op", op))
        else:
            out.append(("name", name))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, L: KGraph, text):
        self.L = L
        self.toks = _tokenize(text)
        self.i = 0
        self.vnames = {format_id(v): v for v in L.vertices}
        self.enames = {format_id(e): e for e in L.edges}

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val and tok[1] != val):
            want = val or kind or "more input"
            raise FileSyntaxError(f"expected {want!r} at token {self.i + 1}, got {tok[1]!r}")
        self.i += 1
        return tok

    # values are GaussianRational scalars or AlgebraElements
    def lift(self, x):
        if isinstance(x, AlgebraElement):
            return x
        return AlgebraElement.unit(self.L).scale(x)

    def add(self, x, y):
        if isinstance(x, GaussianRational) and isinstance(y, GaussianRational):
            return x + y
        return self.lift(x) + self.lift(y)

    def mul(self, x, y):
        if isinstance(x, GaussianRational):
            return x * y if isinstance(y, GaussianRational) else y.scale(x)
        if isinstance(y, GaussianRational):
            return x.scale(y)
        return multiply(x, y)

    def parse(self):
        x = self.expr()
        if self.i != len(self.toks):
            raise FileSyntaxError(f"unexpected {self.peek()[1]!r} at token {self.i + 1}")
        return self.lift(x)

    def expr(self):
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        x = self.term()
        if sign < 0:
            x = -x
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            y = self.term()
            x = self.add(x, y if op == "+" else -y)
        return x

    def starts_atom(self):
        kind, val = self.peek()
        return kind in ("num", "fn") or (kind == "name" and val == "i") or (kind == "op" and val == "(")

    def term(self):
        if not self.starts_atom():
            raise FileSyntaxError(f"expected a term at token {self.i + 1}, got {self.peek()[1]!r}")
        x = self.postfix()
        while self.starts_atom():
            x = self.mul(x, self.postfix())
        return x

    def postfix(self):
        x = self.atom()
        while self.peek() == ("op", "*"):
            self.take()
            x = x.conjugate() if isinstance(x, GaussianRational) else x.adjoint()
        return x

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            num = Fraction(int(val))
            if self.peek() == ("op", "/"):
                self.take()
                den = int(self.take("num")[1])
                if den == 0:
                    raise FileSyntaxError("zero denominator")
                num /= den
            return GaussianRational(num)
        if kind == "name" and val == "i":
            return GaussianRational(0, 1)
        if kind == "op" and val == "(":
            x = self.expr()
            self.take("op", ")")
            return x
        if kind == "fn" and val == "phi":
            x = self.expr()
            self.take("op", ")")
            return expectation(self.lift(x))
        if kind == "fn":
            lam = self.word()
            return AlgebraElement.s(lam) if val == "s" else AlgebraElement.p(lam)
        raise FileSyntaxError(f"unexpected {val!r} at token {self.i}")

    def word(self):
        names = []
        if self.peek() != ("op", ")"):
            names.append(self.take("name")[1])
            while self.peek() == ("op", "."):
                self.take()
                names.append(self.take("name")[1])
        self.take("op", ")")
        v = None
        if self.peek() == ("op", "@"):
            self.take()
            vn = self.take("name")[1]
            if vn not in self.vnames:
                raise UnknownName(f"unknown vertex {vn!r}")
            v = self.vnames[vn]
        path = []
        for n in names:
            if n not in self.enames:
                raise UnknownName(f"unknown edge {n!r}")
            path.append(self.enames[n])
        if not path:
            if v is None:
                if len(self.L.vertices) != 1:
                    raise FileSyntaxError("s() is ambiguous here; write s()@VERTEX")
                v = self.L.vertices[0]
            return self.L.identity(v)
        try:
            lam = self.L.path_morphism(path, v)
        except Exception as exc:
            raise FileSyntaxError(f"bad path {'.'.join(names)}: {exc}") from None
        return lam


def parse_expression(L: KGraph, text) -> AlgebraElement:
    return _Parser(L, text).parse()
