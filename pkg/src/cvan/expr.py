"""Tokenizer and parser for the textual expression language.

One grammar serves degree polynomials, parameter moduli, linear forms and
character values:

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary | unary)*      juxtaposition multiplies
    unary := ('-' | '+') unary | power
    power := atom ('^' unary)?
    atom  := NUMBER | NAME | NAME '(' expr (';' | ',') ... ')' | '(' expr ')'
           | 'case' '{' pred ':' expr (';' pred ':' expr)* '}'
    pred  := 'else' | expr '|' expr | expr '!|' expr | pred '&' pred

Nodes are nested tuples (hashable), e.g. ('add', a, b) or ('call', 'zeta', (m, e)).
"""

from __future__ import annotations

import re
from fractions import Fraction

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|(!\||[-+*/^(){};,:|&]))")


class ExprError(ValueError):
    pass


def tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprError(f"unexpected character {text[pos:pos + 1]!r} at {pos} in {text!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", op))
        pos = m.end()
    out.append(("end", ""))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op: str):
        tok = self.take()
        if tok != ("op", op):
            raise ExprError(f"expected {op!r}, got {tok[1]!r} in {self.text!r}")

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            raise ExprError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def _starts_atom(self, tok) -> bool:
        if tok[0] in ("num",):
            return True
        if tok[0] == "name":
            return tok[1] != "else"
        return tok == ("op", "(")

    def term(self):
        node = self.unary()
        while True:
            tok = self.peek()
            if tok in (("op", "*"), ("op", "/")):
                self.take()
                rhs = self.unary()
                node = ("mul" if tok[1] == "*" else "div", node, rhs)
            elif self._starts_atom(tok):
                node = ("mul", node, self.power())
            else:
                return node

    def unary(self):
        tok = self.peek()
        if tok == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if tok == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return ("pow", base, self.unary())
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return ("num", Fraction(int(val)))
        if kind == "name":
            if val == "case":
                return self.case()
            if self.peek() == ("op", "("):
                self.take()
                args = [self.expr()]
                while self.peek() in (("op", ";"), ("op", ",")):
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                return ("call", val, tuple(args))
            return ("var", val)
        if (kind, val) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        raise ExprError(f"unexpected {val!r} in {self.text!r}")

    def case(self):
        self.expect("{")
        arms = []
        while True:
            pred = self.pred()
            self.expect(":")
            arms.append((pred, self.expr()))
            tok = self.take()
            if tok == ("op", "}"):
                break
            if tok != ("op", ";"):
                raise ExprError(f"expected ';' or '}}' in case of {self.text!r}")
        return ("case", tuple(arms))

    def pred(self):
        if self.peek() == ("name", "else"):
            self.take()
            return ("else",)
        lhs = self.expr()
        tok = self.take()
        if tok not in (("op", "|"), ("op", "!|")):
            raise ExprError(f"expected divisibility predicate in {self.text!r}")
        node = ("divides", lhs, self.expr(), tok[1] == "!|")
        if self.peek() == ("op", "&"):
            self.take()
            node = ("and", node, self.pred())
        return node


def parse(text: str):
    """Parse an expression string into a tuple tree."""
    if not isinstance(text, str):
        text = str(text)
    return _Parser(text).parse()


def parse_pred(text: str):
    """Parse a standalone predicate such as '3 !| q+1' or 'q odd'."""
    t = text.strip()
    if t in ("q odd", "odd"):
        return ("divides", ("num", Fraction(2)), ("var", "q"), True)
    if t in ("q even", "even"):
        return ("divides", ("num", Fraction(2)), ("var", "q"), False)
    p = _Parser(t)
    node = p.pred()
    if p.peek()[0] != "end":
        raise ExprError(f"trailing input in predicate {text!r}")
    return node


def free_vars(node) -> set[str]:
    kind = node[0]
    if kind == "var":
        return {node[1]}
    if kind == "num":
        return set()
    if kind == "call":
        out = set()
        for a in node[2]:
            out |= free_vars(a)
        return out
    if kind == "case":
        out = set()
        for pred, e in node[1]:
            out |= free_vars(pred) | free_vars(e)
        return out
    if kind == "else":
        return set()
    out = set()
    for child in node[1:]:
        if isinstance(child, tuple):
            out |= free_vars(child)
    return out
