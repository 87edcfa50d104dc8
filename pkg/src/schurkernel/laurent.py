"""Exact Laurent coefficients of rational functions on an annulus.

The functions handled are products of factors

    1/(1 - a z)   (pole outside),   1/(1 - b/z)   (pole inside),
    (1 - c z),                      (1 - e/z),                    z^shift

with rational ``a, b, c, e`` in (0, 1).  On any annulus
``max(b) < |z| < 1/max(a)`` the Laurent expansion is unique, and a
partial-fraction split over Q turns each coefficient into a finite
computation: a power series for the outer part, a series in 1/z for the
inner part, and a polynomial remainder.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable

Poly = tuple  # coefficients low -> high, Fractions, no trailing zeros

ZERO = Fraction(0)
ONE = Fraction(1)


def _trim(p: list) -> Poly:
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return _trim(out)


def padd(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else ZERO) + (q[i] if i < len(q) else ZERO) for i in range(n)])


def pscale(p: Poly, c) -> Poly:
    return _trim([c * a for a in p])


def pdivmod(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p)
    if len(rem) < len(q):
        return (), _trim(rem)
    quot = [ZERO] * (len(rem) - len(q) + 1)
    lead = q[-1]
    for k in range(len(quot) - 1, -1, -1):
        c = rem[k + len(q) - 1] / lead
        quot[k] = c
        if c:
            for j, b in enumerate(q):
                rem[k + j] -= c * b
    return _trim(quot), _trim(rem[: len(q) - 1])


def pxgcd(p: Poly, q: Poly) -> tuple[Poly, Poly, Poly]:
    """Return ``(g, s, t)`` with ``s p + t q = g`` and ``g`` monic."""
    r0, r1 = p, q
    s0, s1 = (ONE,), ()
    t0, t1 = (), (ONE,)
    while r1:
        quo, rem = pdivmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, padd(s0, pscale(pmul(quo, s1), -1))
        t0, t1 = t1, padd(t0, pscale(pmul(quo, t1), -1))
    lead = r0[-1]
    return pscale(r0, 1 / lead), pscale(s0, 1 / lead), pscale(t0, 1 / lead)


def series_div(num: Poly, den: Poly, upto: int) -> list[Fraction]:
    """Power-series coefficients 0..upto of num/den (den[0] != 0)."""
    if not den or den[0] == 0:
        raise ZeroDivisionError("series division needs a nonzero constant term")
    out: list[Fraction] = []
    inv = 1 / den[0]
    for k in range(upto + 1):
        s = num[k] if k < len(num) else ZERO
        for j in range(1, min(k, len(den) - 1) + 1):
            s -= den[j] * out[k - j]
        out.append(s * inv)
    return out


def _prod(factors: Iterable[Poly]) -> Poly:
    out: Poly = (ONE,)
    for f in factors:
        out = pmul(out, f)
    return out


class LaurentRational:
    """``z^shift * prod(1-cz) prod(1-e/z) / (prod(1-az) prod(1-b/z))`` on its annulus.

    Coefficients are computed lazily and cached; ``coefficient(k)`` is exact.
    ``maxdeg`` caps how far the series expansions may be pushed.
    """

    def __init__(self, up=(), down=(), up_inv=(), down_inv=(), shift: int = 0, maxdeg: int | None = None):
        up = tuple(Fraction(x) for x in up)
        down = tuple(Fraction(x) for x in down)
        up_inv = tuple(Fraction(x) for x in up_inv)
        down_inv = tuple(Fraction(x) for x in down_inv)
        for x in up + down:
            if not 0 < x < 1:
                raise ValueError(f"pole parameter {x} outside (0, 1): annulus would be empty")
        self.maxdeg = maxdeg
        # 1/(1-b/z) = z/(z-b),  (1-e/z) = (z-e)/z
        s = shift + len(down) - len(down_inv)
        num = pmul(_prod((ONE, -c) for c in up_inv), _prod((-e, ONE) for e in down_inv))
        if s > 0:
            num = (ZERO,) * s + num
        outer = _prod((ONE, -a) for a in up)
        inner = _prod((-b, ONE) for b in down)
        if s < 0:
            inner = (ZERO,) * (-s) + inner
        self._split(num, outer, inner)
        self._pos: list[Fraction] = []
        self._neg: list[Fraction] = []

    def _split(self, num: Poly, outer: Poly, inner: Poly) -> None:
        den = pmul(outer, inner)
        quot, rem = pdivmod(num, den)
        self._poly = quot
        if len(inner) <= 1:
            # no inner poles: rem/den is a plain power series
            self._outer_num, self._outer = pscale(rem, 1 / inner[0]) if inner else rem, outer
            self._inner_num, self._inner = (), (ONE,)
            return
        if len(outer) <= 1:
            self._outer_num, self._outer = (), (ONE,)
            self._inner_num, self._inner = pscale(rem, 1 / outer[0]), inner
            return
        g, s, t = pxgcd(inner, outer)  # s*inner + t*outer = 1
        if len(g) != 1:
            raise ValueError("inner and outer factors share a root")
        _, u = pdivmod(pmul(rem, s), outer)  # rem/den = u/outer + v/inner
        v, r = pdivmod(padd(rem, pscale(pmul(u, inner), -1)), outer)
        assert not r
        self._outer_num, self._outer = u, outer
        self._inner_num, self._inner = v, inner

    def _check(self, k: int) -> None:
        if self.maxdeg is not None and abs(k) > self.maxdeg:
            raise ValueError(f"coefficient z^{k} needs degree {abs(k)} > maxdeg={self.maxdeg}")

    def coefficient(self, k: int) -> Fraction:
        self._check(k)
        c = self._poly[k] if 0 <= k < len(self._poly) else ZERO
        if k >= 0:
            if self._outer_num:
                if len(self._pos) <= k:
                    self._pos = series_div(self._outer_num, self._outer, max(k, 2 * len(self._pos)))
                c += self._pos[k]
        elif self._inner_num:
            # v(z)/inner(z) = sum_{j>=1} neg[j] z^{-j}; with w = 1/z it is
            # w^(q - deg v) * rev(v)(w) / rev(inner)(w)
            j = -k
            if len(self._neg) <= j:
                q = len(self._inner) - 1
                rv = tuple(reversed(self._inner_num))
                num = (ZERO,) * (q - (len(self._inner_num) - 1)) + rv
                self._neg = series_div(num, tuple(reversed(self._inner)), max(j, 2 * len(self._neg)))
            c += self._neg[j]
        return c

    __getitem__ = coefficient


@lru_cache(maxsize=4096)
def laurent(up=(), down=(), up_inv=(), down_inv=(), shift: int = 0) -> LaurentRational:
    """Cached constructor; pass sorted tuples for good cache reuse."""
    return LaurentRational(up, down, up_inv, down_inv, shift)
