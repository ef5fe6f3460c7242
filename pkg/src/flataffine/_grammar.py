"""Recursive descent parser for scalar, function and vector-field literals.

The parser only builds a small tuple AST; evaluation into Scalars or
ExpPolys happens in the modules that own those types.

Grammar (whitespace insignificant)::

    expr    := ['+' | '-'] term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | atom ('^' ['-'] integer)*
    atom    := integer | identifier | 'd/d' coord
             | identifier '(' expr ')' | '(' expr ')'

AST nodes::

    ('num', int, pos)          ('name', str, pos)      ('deriv', str, pos)
    ('add', a, b, pos)         ('sub', a, b, pos)      ('neg', a, pos)
    ('mul', a, b, pos)         ('div', a, b, pos)      ('pow', a, int, pos)
    ('call', name, arg, pos)
"""
import re

from .errors import ParseError

_TOKEN_RE = re.compile(
    r"(?:(?P<deriv>d/d(?P<dname>[A-Za-z][A-Za-z0-9_]*))"
    r"|(?P<num>\d+)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = pos
        if m.group("deriv"):
            tokens.append(("deriv", m.group("dname"), start))
        elif m.group("num"):
            tokens.append(("num", int(m.group("num")), start))
        elif m.group("name"):
            tokens.append(("name", m.group("name"), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("eof", None, n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at_op(self, *ops):
        kind, val, _ = self.peek()
        return kind == "op" and val in ops

    def expect_op(self, op):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos, self.text)

    def error(self, message):
        raise ParseError(message, self.peek()[2], self.text)

    def parse(self):
        if self.peek()[0] == "eof":
            self.error("empty expression")
        node = self.expr()
        if self.peek()[0] != "eof":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return node

    def expr(self):
        pos = self.peek()[2]
        if self.at_op("+"):
            self.next()
            node = self.term()
        elif self.at_op("-"):
            self.next()
            node = ("neg", self.term(), pos)
        else:
            node = self.term()
        while self.at_op("+", "-"):
            _, op, pos = self.next()
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs, pos)
        return node

    def term(self):
        node = self.factor()
        while self.at_op("*", "/"):
            _, op, pos = self.next()
            rhs = self.factor()
            node = ("mul" if op == "*" else "div", node, rhs, pos)
        return node

    def factor(self):
        if self.at_op("-"):
            pos = self.next()[2]
            return ("neg", self.factor(), pos)
        node = self.atom()
        while self.at_op("^"):
            pos = self.next()[2]
            sign = 1
            if self.at_op("-"):
                self.next()
                sign = -1
            kind, val, p = self.next()
            if kind != "num":
                raise ParseError("exponent must be an integer", p, self.text)
            node = ("pow", node, sign * val, pos)
        return node

    def atom(self):
        kind, val, pos = self.next()
        if kind == "num":
            return ("num", val, pos)
        if kind == "deriv":
            return ("deriv", val, pos)
        if kind == "name":
            if self.at_op("("):
                self.next()
                arg = self.expr()
                self.expect_op(")")
                return ("call", val, arg, pos)
            return ("name", val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "eof":
            raise ParseError("unexpected end of input", pos, self.text)
        raise ParseError(f"unexpected token {val!r}", pos, self.text)


def parse(text):
    """Parse ``text`` into an AST; raises ParseError with a character offset."""
    if not isinstance(text, str):
        raise ParseError(f"expected a string literal, got {type(text).__name__}")
    return _Parser(text).parse()
