"""Univariate polynomials over the rationals and exact real-root isolation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class UniPoly:
    """Dense polynomial, ``coeffs[i]`` multiplies ``p**i``; trailing zeros trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_fr(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def const(cls, a) -> "UniPoly":
        return cls([a])

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __repr__(self):
        return f"UniPoly({[str(c) for c in self.coeffs]})"

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly.const(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, float) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if not isinstance(x, float) else float(c))
        return acc

    def _coerce(self, other) -> "UniPoly":
        return other if isinstance(other, UniPoly) else UniPoly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return UniPoly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = UniPoly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self) -> "UniPoly":
        return UniPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __divmod__(self, other: "UniPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lead()
        quot = [Fraction(0)] * max(len(rem) - dq, 1)
        while len(rem) - 1 >= dq and rem:
            k = len(rem) - 1 - dq
            f = rem[-1] / lead
            quot[k] = f
            for j, c in enumerate(other.coeffs):
                rem[j + k] -= f * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return UniPoly(quot), UniPoly(rem)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def monic(self) -> "UniPoly":
        return UniPoly([c / self.lead() for c in self.coeffs]) if self.coeffs else self


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_part(f: UniPoly) -> UniPoly:
    if f.degree <= 0:
        return f.monic()
    return (f // poly_gcd(f, f.derivative())).monic()


def sturm_sequence(f: UniPoly) -> list[UniPoly]:
    seq = [f, f.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    return seq[:-1]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sign_variations(seq: list[UniPoly], x: Fraction) -> int:
    signs = [s for s in (_sign(q(x)) for q in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


@dataclass(frozen=True)
class RootInterval:
    """A root of the difference polynomial.

    ``lo == hi`` marks an exact rational root; otherwise the root is the unique
    one in the open interval ``(lo, hi)``. ``left_sign``/``right_sign`` give the
    sign of the polynomial just below and just above the root (None at the ends
    of the search range).
    """

    lo: Fraction
    hi: Fraction
    left_sign: Optional[int]
    right_sign: Optional[int]

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        if self.exact:
            return x == self.lo
        return self.lo < x < self.hi


def isolate_roots(f: UniPoly, tol, lo=0, hi=1) -> list[RootInterval]:
    """All distinct real roots of ``f`` in ``[lo, hi]``, each to width <= ``tol``.

    Works on the square-free part with Sturm counts, so close or repeated roots
    are never merged or skipped. Signs are read from ``f`` itself.
    """
    tol = _fr(tol)
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if f.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    lo, hi = _fr(lo), _fr(hi)
    s = squarefree_part(f)
    if s.degree <= 0:
        return []
    seq = sturm_sequence(s)

    def count(a, b):
        return sign_variations(seq, a) - sign_variations(seq, b)

    def neighborhood(r):
        # halve d until r is the only root of s in [r-d, r+d] and the ends are not roots
        d = (hi - lo) / 4
        while s(r - d) == 0 or s(r + d) == 0 or count(r - d, r + d) != 1:
            d /= 2
        return d

    roots: list[RootInterval] = []

    def exact_root(r):
        d = neighborhood(r)
        left = _sign(f(r - d)) if r > lo else None
        right = _sign(f(r + d)) if r < hi else None
        roots.append(RootInterval(r, r, left, right))
        return max(lo, r - d), min(hi, r + d)

    # endpoints of the search range and of each working interval are kept off the roots
    a0, b0 = lo, hi
    if s(lo) == 0:
        a0 = exact_root(lo)[1]
    if s(hi) == 0:
        b0 = exact_root(hi)[0]
    stack = [(a0, b0)]
    while stack:
        a, b = stack.pop()
        if a >= b:
            continue
        k = count(a, b)
        if k == 0:
            continue
        if k == 1:
            roots.append(_refine(f, s, a, b, tol))
            continue
        c = (a + b) / 2
        if s(c) == 0:
            ca, cb = exact_root(c)
            stack += [(a, ca), (cb, b)]
        else:
            stack += [(a, c), (c, b)]
    roots.sort(key=lambda r: r.lo)
    return roots


def _refine(f, s, a, b, tol) -> RootInterval:
    sa = _sign(s(a))
    while b - a > tol:
        c = (a + b) / 2
        sc = _sign(s(c))
        if sc == 0:
            a = b = c
            break
        if sc == sa:
            a = c
        else:
            b = c
    if a == b:
        # exact hit; signs from a tiny symmetric step inside the old bracket
        d = tol / 4
        while _sign(s(a - d)) == 0 or _sign(s(a + d)) == 0 or _sign(s(a - d)) == _sign(s(a + d)):
            d /= 2
        return RootInterval(a, a, _sign(f(a - d)), _sign(f(a + d)))
    return RootInterval(a, b, _sign(f(a)), _sign(f(b)))
