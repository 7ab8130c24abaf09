"""Recursive-descent parser for exact polynomial / rational-function expressions.

Grammar::

    expression := term (('+' | '-') term)*
    term       := unary (('*' | '/') unary)*
    unary      := ('-' | '+') unary | power
    power      := atom (('^' | '**') INTEGER)?
    atom       := INTEGER | VARIABLE | '(' expression ')'

Rational literals ``p/q`` fall out of the division rule. Division by a
non-constant is accepted only when the quotient lives in the target ring.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

from homalgebroid.errors import StructureParseError
from homalgebroid.ring import FRACTION, CoefficientRing, RingElement

logger = logging.getLogger(__name__)

NUMBER = 'number'
NAME = 'name'
OPERATOR = 'operator'
LPAREN = '('
RPAREN = ')'
END = 'end'

# exponents above this are rejected before any expansion
MAX_EXPONENT = 64


class ExpressionError(StructureParseError):
    """Syntax or semantic error inside one expression; ``column`` is 1-based."""


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdecimal():
            start = i
            while i < len(text) and text[i].isdecimal():
                i += 1
            tokens.append(Token(NUMBER, text[start:i], start))
        elif ch.isalpha() or ch == '_':
            start = i
            while i < len(text) and (text[i].isalnum() or text[i] == '_'):
                i += 1
            tokens.append(Token(NAME, text[start:i], start))
        elif text.startswith('**', i):
            tokens.append(Token(OPERATOR, '^', i))
            i += 2
        elif ch in '+-*/^':
            tokens.append(Token(OPERATOR, ch, i))
            i += 1
        elif ch in '()':
            tokens.append(Token(ch, ch, i))
            i += 1
        else:
            raise ExpressionError(f"Unexpected character '{ch}'", column=i + 1)
    tokens.append(Token(END, '', len(text)))
    return tokens


class ExpressionParser:
    """Parses one expression string into a RingElement of ``ring``."""

    def __init__(self, text: str, ring: CoefficientRing):
        self.text = text
        self.ring = ring
        self.tokens = tokenize(text)
        self.pos = 0

    def at(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> ExpressionError:
        token = token or self.at()
        return ExpressionError(f"{message} in '{self.text}'", column=token.position + 1)

    def expect(self, kind: str) -> Token:
        if self.at().kind != kind:
            found = self.at().text or 'end of expression'
            raise self.error(f"Expected '{kind}' but found '{found}'")
        return self.advance()

    def parse(self) -> RingElement:
        if self.at().kind == END:
            raise self.error("Empty expression")
        value = self.expression()
        if self.at().kind != END:
            raise self.error(f"Unexpected '{self.at().text}'")
        return value

    def expression(self) -> RingElement:
        value = self.term()
        while self.at().kind == OPERATOR and self.at().text in '+-':
            op = self.advance().text
            right = self.term()
            value = value + right if op == '+' else value - right
        return value

    def term(self) -> RingElement:
        value = self.unary()
        while self.at().kind == OPERATOR and self.at().text in '*/':
            token = self.advance()
            right = self.unary()
            if token.text == '*':
                value = value * right
            else:
                value = self.divide(value, right, token)
        return value

    def divide(self, left: RingElement, right: RingElement, token: Token) -> RingElement:
        if right.is_zero:
            raise self.error("Division by zero", token)
        quotient = left / right
        if not quotient.is_polynomial and self.ring.kind != FRACTION:
            raise self.error(f"Quotient is not a polynomial in {self.ring}", token)
        return quotient

    def unary(self) -> RingElement:
        token = self.at()
        if token.kind == OPERATOR and token.text in '+-':
            self.advance()
            value = self.unary()
            return -value if token.text == '-' else value
        return self.power()

    def power(self) -> RingElement:
        base = self.atom()
        if self.at().kind == OPERATOR and self.at().text == '^':
            self.advance()
            exponent = self.expect(NUMBER)
            if int(exponent.text) > MAX_EXPONENT:
                raise self.error(f"Exponent {exponent.text} exceeds {MAX_EXPONENT}", exponent)
            return base ** int(exponent.text)
        return base

    def atom(self) -> RingElement:
        token = self.at()
        if token.kind == NUMBER:
            self.advance()
            return self.ring(int(token.text))
        if token.kind == NAME:
            self.advance()
            if token.text not in self.ring.variables:
                raise self.error(f"Unknown variable '{token.text}'", token)
            return self.ring.gen(self.ring.variables.index(token.text))
        if token.kind == LPAREN:
            self.advance()
            value = self.expression()
            self.expect(RPAREN)
            return value
        found = token.text or 'end of expression'
        raise self.error(f"Unexpected '{found}'", token)


def parse_expression(text: str, ring: CoefficientRing) -> RingElement:
    """Parse ``text`` into an element of ``ring`` (or its fraction field).

    Raises:
        ExpressionError: with the 1-based column of the offending token.
    """
    value = ExpressionParser(str(text), ring).parse()
    if ring.kind == FRACTION:
        return value.lift(ring)
    return value


def render(value: RingElement) -> str:
    """Canonical text of ``value``; parse_expression(render(v)) == v."""
    return str(value)
