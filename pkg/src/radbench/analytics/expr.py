"""Safe column-transform expression language.

Grammar (recursive descent; ^ is right-associative; unary minus allowed):

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | power
    power   := primary ('^' factor)?
    primary := NUMBER | 'x' | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Functions: log, exp, sqrt, abs (1 argument); min, max (2+ arguments).
log/sqrt are the plain mathematical functions: log of a non-positive value
or sqrt of a negative value is a domain error, as is division by zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .table import FeatureTable

_FUNCTIONS = {"log": 1, "exp": 1, "sqrt": 1, "abs": 1, "min": 2, "max": 2}


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExprDomainError(ValueError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index  # offending element index within the column


@dataclass(frozen=True)
class Token:
    kind: str  # num | name | op | lparen | rparen | comma | end
    text: str
    pos: int


def _tokenize(src: str) -> list[Token]:
    out = []
    i = 0
    while i < len(src):
        ch = src[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit() or (ch == "." and i + 1 < len(src) and src[i + 1].isdigit()):
            j = i
            seen_e = False
            while j < len(src) and (src[j].isdigit() or src[j] in ".eE"
                                    or (src[j] in "+-" and seen_e and src[j - 1] in "eE")):
                if src[j] in "eE":
                    seen_e = True
                j += 1
            try:
                float(src[i:j])
            except ValueError:
                raise ExprSyntaxError(f"bad number {src[i:j]!r}", i) from None
            out.append(Token("num", src[i:j], i))
            i = j
        elif ch.isalpha():
            j = i
            while j < len(src) and (src[j].isalnum() or src[j] == "_"):
                j += 1
            out.append(Token("name", src[i:j], i))
            i = j
        elif ch in "+-*/^":
            out.append(Token("op", ch, i))
            i += 1
        elif ch == "(":
            out.append(Token("lparen", ch, i))
            i += 1
        elif ch == ")":
            out.append(Token("rparen", ch, i))
            i += 1
        elif ch == ",":
            out.append(Token("comma", ch, i))
            i += 1
        else:
            raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    out.append(Token("end", "", len(src)))
    return out


# AST nodes: ("num", v) | ("var",) | ("neg", a) | ("bin", op, a, b) | ("call", f, args)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.take()
        if tok.kind != kind:
            raise ExprSyntaxError(f"expected {kind}, found {tok.text or 'end'!r}", tok.pos)
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {tok.text!r}", tok.pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.take().text
            node = ("bin", op, node, self.factor())
        return node

    def factor(self):
        # unary minus binds looser than ^ (so -x^2 is -(x^2), like Python)
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.take()
            return ("neg", self.factor())
        return self.power()

    def power(self):
        node = self.primary()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            node = ("bin", "^", node, self.factor())  # right-associative
        return node

    def primary(self):
        tok = self.take()
        if tok.kind == "num":
            return ("num", float(tok.text))
        if tok.kind == "lparen":
            node = self.expr()
            self.expect("rparen")
            return node
        if tok.kind == "name":
            if tok.text == "x":
                return ("var",)
            if tok.text not in _FUNCTIONS:
                raise ExprSyntaxError(f"unknown function {tok.text!r}", tok.pos)
            self.expect("lparen")
            args = [self.expr()]
            while self.peek().kind == "comma":
                self.take()
                args.append(self.expr())
            self.expect("rparen")
            need = _FUNCTIONS[tok.text]
            if need == 1 and len(args) != 1:
                raise ExprSyntaxError(f"{tok.text} takes 1 argument", tok.pos)
            if need == 2 and len(args) < 2:
                raise ExprSyntaxError(f"{tok.text} needs >= 2 arguments", tok.pos)
            return ("call", tok.text, args)
        raise ExprSyntaxError(f"unexpected {tok.text or 'end'!r}", tok.pos)


def parse_expression(src: str):
    return _Parser(_tokenize(src)).parse()


def _first_bad(cond: np.ndarray) -> int:
    return int(np.flatnonzero(np.broadcast_to(cond, cond.shape))[0])


def evaluate(node, x: np.ndarray) -> np.ndarray:
    kind = node[0]
    if kind == "num":
        return np.full_like(x, node[1])
    if kind == "var":
        return x.astype(np.float64, copy=True)
    if kind == "neg":
        return -evaluate(node[1], x)
    if kind == "bin":
        _, op, ln, rn = node
        a = evaluate(ln, x)
        b = evaluate(rn, x)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            bad = b == 0
            if bad.any():
                raise ExprDomainError("division by zero", _first_bad(bad))
            return a / b
        # power: reject results that would be complex or infinite
        with np.errstate(all="ignore"):
            out = np.power(a, b)
        bad = ~np.isfinite(out)
        if bad.any():
            raise ExprDomainError("invalid power (zero/negative base?)", _first_bad(bad))
        return out
    _, fn, args = node
    vals = [evaluate(a, x) for a in args]
    if fn == "log":
        bad = vals[0] <= 0
        if bad.any():
            raise ExprDomainError("log of a non-positive value", _first_bad(bad))
        return np.log(vals[0])
    if fn == "exp":
        out = np.exp(vals[0])
        bad = ~np.isfinite(out)
        if bad.any():
            raise ExprDomainError("exp overflow", _first_bad(bad))
        return out
    if fn == "sqrt":
        bad = vals[0] < 0
        if bad.any():
            raise ExprDomainError("sqrt of a negative value", _first_bad(bad))
        return np.sqrt(vals[0])
    if fn == "abs":
        return np.abs(vals[0])
    stacked = np.stack(vals)
    return stacked.min(axis=0) if fn == "min" else stacked.max(axis=0)


@dataclass
class FittedTransform:
    """Replayable column transform (stateless; kept for chain replay)."""

    expression: str
    columns: list[str]
    all_columns: list[str]

    def apply(self, table: FeatureTable) -> FeatureTable:
        table = table.select_columns(self.all_columns)
        node = parse_expression(self.expression)
        values = table.values.copy()
        for col in self.columns:
            j = table.columns.index(col)
            try:
                values[:, j] = evaluate(node, values[:, j])
            except ExprDomainError as exc:
                row = table.rows[exc.index] if exc.index is not None else "?"
                raise ExprDomainError(f"{exc.args[0]} (column {col!r}, row {row!r})") from None
        return table.with_values(values)


def custom_transform(table: FeatureTable, expression: str,
                     columns: list[str] | None = None) -> tuple[FeatureTable, FittedTransform]:
    """Apply the expression elementwise to the selected columns (default all)."""
    parse_expression(expression)  # surface syntax errors before touching data
    cols = list(columns) if columns is not None else list(table.columns)
    missing = [c for c in cols if c not in table.columns]
    if missing:
        raise ValueError(f"unknown columns: {missing}")
    fitted = FittedTransform(expression, cols, list(table.columns))
    return fitted.apply(table), fitted
