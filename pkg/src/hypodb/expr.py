"""Equation DSL: tokenizer, recursive-descent parser and variable extraction.

The DSL covers what hypothesis structure documents need and nothing more:
identifiers, numeric literals, ``+ - * / ^``, parentheses, function
application, and a prime suffix on the left-hand side for differential form
(``x' = b*x``).  Only variable incidence is ever extracted; expressions are
validated, never evaluated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .errors import ParseError

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[+\-*/^=(),'])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # number | ident | op | end
    text: str
    column: int  # 1-based


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", column=pos + 1)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    tokens.append(Token("end", "", len(text) + 1))
    return tokens


@dataclass(frozen=True)
class ParsedEquation:
    """One equation split into its target and the identifiers of its body."""

    target: str
    is_differential: bool       # target carried a prime suffix
    body_idents: frozenset[str]  # identifiers of the rhs (function names excluded)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0
        self.idents: set[str] = set()
        self.paren_stack: list[int] = []

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text:
            raise ParseError(f"expected {text!r}", column=tok.column)
        return self.advance()

    def parse_equation(self) -> ParsedEquation:
        target_tok = self.peek()
        if target_tok.kind != "ident":
            raise ParseError("equation must start with a variable name", column=target_tok.column)
        self.advance()
        primed = False
        if self.peek().text == "'":
            primed = True
            self.advance()
        self.expect("=")
        self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected token {tok.text!r}", column=tok.column)
        return ParsedEquation(target_tok.text, primed, frozenset(self.idents))

    def expr(self) -> None:
        self.term()
        while self.peek().text in ("+", "-"):
            self.advance()
            self.term()

    def term(self) -> None:
        self.unary()
        while self.peek().text in ("*", "/"):
            self.advance()
            self.unary()

    def unary(self) -> None:
        if self.peek().text in ("-", "+"):
            self.advance()
            self.unary()
        else:
            self.power()

    def power(self) -> None:
        self.atom()
        if self.peek().text == "^":
            self.advance()
            self.unary()

    def atom(self) -> None:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return
        if tok.kind == "ident":
            self.advance()
            if self.peek().text == "(":
                # function application: the name is not a variable
                open_tok = self.advance()
                self.paren_stack.append(open_tok.column)
                if self.peek().text != ")":
                    self.expr()
                    while self.peek().text == ",":
                        self.advance()
                        self.expr()
                self._close_paren()
            else:
                self.idents.add(tok.text)
            return
        if tok.text == "(":
            self.advance()
            self.paren_stack.append(tok.column)
            self.expr()
            self._close_paren()
            return
        if tok.kind == "end" and self.paren_stack:
            raise ParseError("unbalanced parenthesis", column=self.paren_stack[-1])
        raise ParseError(f"expected a value, got {tok.text or 'end of input'!r}", column=tok.column)

    def _close_paren(self) -> None:
        tok = self.peek()
        if tok.text != ")":
            raise ParseError("unbalanced parenthesis", column=self.paren_stack[-1])
        self.paren_stack.pop()
        self.advance()


def parse_equation(expr: str) -> ParsedEquation:
    """Parse ``target = body`` and collect the body's variable identifiers."""
    return _Parser(tokenize(expr)).parse_equation()


def equation_vars(
    expr: str,
    domains: Iterable[str] = (),
    constants: Iterable[str] = (),
) -> frozenset[str]:
    """Variable incidence of one equation.

    Algebraic equations contribute their target plus every rhs identifier.
    Differential form ``x' = rhs`` contributes the rhs identifiers, each
    domain ``d`` and the initial condition ``x__<d>_min``, with the
    differentiated variable itself dropped (its self-dependence adds
    nothing).  Declared constants never count as variables.
    """
    parsed = parse_equation(expr)
    domains = list(domains)
    consts = frozenset(constants)
    if parsed.is_differential:
        if not domains:
            raise ParseError(
                f"differential equation for {parsed.target!r} but no domain is declared"
            )
        vars_: set[str] = set(parsed.body_idents)
        for d in domains:
            vars_.add(d)
            vars_.add(f"{parsed.target}__{d}_min")
        vars_.discard(parsed.target)
    else:
        vars_ = set(parsed.body_idents)
        vars_.add(parsed.target)
    return frozenset(vars_ - consts)
