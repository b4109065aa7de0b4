from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from bunkbed.poly import UniPoly, isolate_roots, poly_gcd, squarefree_part

X = sympy.Symbol("x")

coeff = st.fractions(min_value=-5, max_value=5, max_denominator=6)
polys = st.lists(coeff, min_size=1, max_size=6).map(UniPoly)


def to_sympy(f: UniPoly):
    return sympy.sympify(sum(sympy.Rational(c.numerator, c.denominator) * X ** k for k, c in enumerate(f.coeffs)))


def from_sympy(expr) -> UniPoly:
    p = sympy.Poly(sympy.expand(expr), X)
    coeffs = list(reversed(p.all_coeffs()))
    return UniPoly(Fraction(int(c.p), int(c.q)) for c in coeffs)


class TestArithmetic:
    @given(polys, polys)
    def test_ring_ops_match_sympy(self, f, g):
        assert f + g == from_sympy(to_sympy(f) + to_sympy(g))
        assert f - g == from_sympy(to_sympy(f) - to_sympy(g))
        assert f * g == from_sympy(to_sympy(f) * to_sympy(g))

    @given(polys, polys)
    def test_division_identity(self, f, g):
        if g.is_zero():
            return
        q, r = divmod(f, g)
        assert q * g + r == f
        assert r.is_zero() or r.degree < g.degree

    @given(polys, st.fractions(min_value=-3, max_value=3, max_denominator=7))
    def test_evaluation(self, f, x):
        assert f(x) == to_sympy(f).subs(X, sympy.Rational(x.numerator, x.denominator))

    @given(polys, polys)
    def test_gcd_matches_sympy(self, f, g):
        if f.is_zero() and g.is_zero():
            return
        ours = poly_gcd(f, g)
        theirs = from_sympy(sympy.gcd(to_sympy(f), to_sympy(g)))
        if theirs.is_zero():
            assert ours.is_zero()
        else:
            assert ours.monic() == theirs.monic()

    def test_trailing_zeros_trimmed(self):
        assert UniPoly([1, 0, 0]).coeffs == (1,)
        assert UniPoly([0]).is_zero()

    def test_derivative_and_power(self):
        p = UniPoly.x()
        assert ((p + 1) ** 3).derivative() == UniPoly([3, 6, 3])


def sympy_roots_in_unit_interval(f: UniPoly):
    distinct = set(sympy.Poly(to_sympy(f), X).real_roots())
    return sorted((r for r in distinct if 0 <= r <= 1), key=lambda r: float(r))


class TestRootIsolation:
    @settings(max_examples=150, deadline=None)
    @given(polys)
    def test_every_root_isolated_once(self, f):
        if f.is_zero():
            return
        tol = Fraction(1, 10 ** 6)
        got = isolate_roots(f, tol)
        expected = sympy_roots_in_unit_interval(f)
        assert len(got) == len(expected)
        for iv, r in zip(got, expected):
            if iv.exact:
                assert sympy.Rational(iv.lo.numerator, iv.lo.denominator) == r
            else:
                assert iv.width <= tol
                assert sympy.Rational(iv.lo.numerator, iv.lo.denominator) < r
                assert r < sympy.Rational(iv.hi.numerator, iv.hi.denominator)

    def test_irrational_root(self):
        # x^2 - 1/2 has the single root 1/sqrt(2) in [0, 1]
        [iv] = isolate_roots(UniPoly([Fraction(-1, 2), 0, 1]), Fraction(1, 10 ** 12))
        assert iv.lo ** 2 < Fraction(1, 2) < iv.hi ** 2 and iv.width <= Fraction(1, 10 ** 12)
        assert (iv.left_sign, iv.right_sign) == (-1, 1)

    def test_repeated_and_endpoint_roots(self):
        f = UniPoly.x() * (UniPoly.x() - Fraction(1, 2)) ** 2 * (UniPoly.x() - 1)
        got = isolate_roots(f, Fraction(1, 1000))
        assert len(got) == 3
        assert all(r.contains(x) for r, x in zip(got, (0, Fraction(1, 2), 1)))
        mid = got[1]
        # a double root touches zero without crossing
        assert mid.left_sign == mid.right_sign

    def test_close_roots_stay_separate(self):
        a, b = Fraction(1, 3), Fraction(1, 3) + Fraction(1, 10 ** 8)
        f = (UniPoly.x() - a) * (UniPoly.x() - b)
        got = isolate_roots(f, Fraction(1, 10 ** 10))
        assert len(got) == 2 and got[0].contains(a) and got[1].contains(b)

    def test_squarefree(self):
        f = (UniPoly.x() - 1) ** 3 * UniPoly.x()
        assert squarefree_part(f).monic() == (UniPoly.x() * (UniPoly.x() - 1)).monic()

    def test_bad_tolerance(self):
        with pytest.raises(ValueError):
            isolate_roots(UniPoly.x(), 0)
