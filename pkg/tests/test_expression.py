import unittest
import sys
import os
from fractions import Fraction

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from hypothesis import given, settings, strategies as st

from homalgebroid.expression import MAX_EXPONENT, ExpressionError, parse_expression, render, tokenize
from homalgebroid.ring import CoefficientRing


class TestExpressionParser(unittest.TestCase):
    """Parsing exact expressions into ring elements."""

    def setUp(self):
        self.poly = CoefficientRing.polynomial(['x', 'y'])
        self.field = self.poly.fraction_ring()
        self.x, self.y = self.poly.gens()

    def test_polynomial(self):
        """Operator precedence and powers."""
        value = parse_expression('x^2 + 2*x*y - 3', self.poly)
        self.assertEqual(value, self.x ** 2 + 2 * self.x * self.y - 3)

    def test_double_star_power(self):
        """'**' is accepted as the power operator."""
        self.assertEqual(parse_expression('(x+1)**2', self.poly), (self.x + 1) ** 2)

    def test_rational_literal(self):
        """p/q literals fall out of division."""
        qq = CoefficientRing.scalar()
        self.assertEqual(parse_expression('-3/4', qq), Fraction(-3, 4))
        self.assertEqual(parse_expression('1/2*x', self.poly), self.x / 2)

    def test_exact_polynomial_quotient(self):
        """A quotient that is a polynomial is accepted in the polynomial ring."""
        value = parse_expression('(x^2 - 1)/(x - 1)', self.poly)
        self.assertTrue(value.is_polynomial)
        self.assertEqual(value, self.x + 1)

    def test_proper_fraction_needs_field(self):
        """1/x is rejected over QQ[x,y] and accepted over QQ(x,y)."""
        with self.assertRaises(ExpressionError):
            parse_expression('1/x', self.poly)
        value = parse_expression('1/x', self.field)
        self.assertEqual(value.ring, self.field)
        self.assertEqual(value * self.x, 1)

    def test_error_column(self):
        """Syntax errors report the 1-based column of the offending token."""
        with self.assertRaises(ExpressionError) as ctx:
            parse_expression('x +* 2', self.poly)
        self.assertEqual(ctx.exception.column, 4)

    def test_exponent_is_bounded(self):
        """Exponents above MAX_EXPONENT are rejected at the exponent's column."""
        with self.assertRaises(ExpressionError) as ctx:
            parse_expression('x^99999999', self.poly)
        self.assertEqual(ctx.exception.column, 3)
        self.assertIn('exceeds', ctx.exception.message)
        with self.assertRaises(ExpressionError) as ctx:
            parse_expression('1 + (x - y)**65', self.poly)
        self.assertEqual(ctx.exception.column, 14)
        self.assertEqual(parse_expression(f'x^{MAX_EXPONENT}', self.poly), self.x ** MAX_EXPONENT)

    def test_superscript_digits_rejected(self):
        """Only decimal digits form numbers."""
        with self.assertRaises(ExpressionError) as ctx:
            tokenize('2²')
        self.assertEqual(ctx.exception.column, 2)

    def test_unknown_variable(self):
        """Variables outside the ring are rejected at their column."""
        with self.assertRaises(ExpressionError) as ctx:
            parse_expression('x + z', self.poly)
        self.assertEqual(ctx.exception.column, 5)

    def test_bad_character(self):
        """Characters outside the grammar are rejected."""
        with self.assertRaises(ExpressionError) as ctx:
            tokenize('x & y')
        self.assertEqual(ctx.exception.column, 3)

    def test_empty_and_unbalanced(self):
        """Empty text and unbalanced parentheses are errors."""
        for text in ('', '(x + 1', 'x)'):
            with self.assertRaises(ExpressionError):
                parse_expression(text, self.poly)

    def test_division_by_zero(self):
        """Division by a literal zero is an expression error."""
        with self.assertRaises(ExpressionError):
            parse_expression('x/(y - y)', self.field)

    def test_render_round_trip(self):
        """Rendered rational functions parse back to the same element."""
        samples = [self.field(1) / self.x ** 2,
                   (self.x + 1) / (self.x * self.y),
                   -self.x / 3 + self.y ** 2,
                   (self.x - self.y) / (self.x ** 2 + 1)]
        for value in samples:
            self.assertEqual(parse_expression(render(value), self.field), value)

    @settings(max_examples=50, deadline=None)
    @given(st.fractions(min_value=-20, max_value=20, max_denominator=12))
    def test_rational_round_trip(self, value):
        """Rendering then parsing a rational is the identity."""
        qq = CoefficientRing.scalar()
        element = qq(value)
        self.assertEqual(parse_expression(render(element), qq), element)


if __name__ == '__main__':
    unittest.main()
