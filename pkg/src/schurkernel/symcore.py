"""Exact symmetric-function engine.

Partitions, finite alphabets of rationals, complete homogeneous and
elementary symmetric polynomials, skew Schur functions through the
Jacobi-Trudi determinant, and truncated power series with rational
coefficients.  Everything here is exact (``fractions.Fraction``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence


def to_fraction(value) -> Fraction:
    """Parse ints, Fractions, ``"p/q"`` strings or decimal strings exactly.

    Floats are converted through their shortest repr, so ``0.3`` becomes
    ``3/10`` rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


@dataclass(frozen=True, order=True)
class Partition:
    """Weakly decreasing tuple of nonnegative integers, trailing zeros stripped."""

    parts: tuple[int, ...] = ()

    def __init__(self, parts: Iterable[int] = ()):
        parts = tuple(int(p) for p in parts)
        if any(p < 0 for p in parts):
            raise ValueError(f"negative part in {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"parts not weakly decreasing: {parts}")
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        object.__setattr__(self, "parts", parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __getitem__(self, i: int) -> int:
        """Zero-based part access; parts beyond the length are 0."""
        if i < 0:
            raise IndexError(i)
        return self.parts[i] if i < len(self.parts) else 0

    def __iter__(self):
        return iter(self.parts)

    def __repr__(self) -> str:
        return f"Partition({list(self.parts)})"

    @property
    def size(self) -> int:
        return sum(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(sum(1 for p in self.parts if p > j) for j in range(self.parts[0]))

    def contains(self, other: "Partition") -> bool:
        """True iff ``other`` fits inside this diagram."""
        if len(other) > len(self):
            return False
        return all(self[i] >= other[i] for i in range(len(other)))

    def walker_positions(self, count: int) -> list[int]:
        """Coordinates ``lambda_i - i + 1`` of the first ``count`` walkers."""
        return [self[i] - i for i in range(count)]


EMPTY = Partition()


@dataclass(frozen=True)
class Alphabet:
    """A finite list of rational variables, each strictly between 0 and 1."""

    vars: tuple[Fraction, ...] = field(default=())

    def __init__(self, vars: Iterable = ()):
        vals = tuple(to_fraction(v) for v in vars)
        for v in vals:
            if not 0 < v < 1:
                raise ValueError(f"alphabet entry {v} outside (0, 1)")
        object.__setattr__(self, "vars", vals)

    def __len__(self) -> int:
        return len(self.vars)

    def __iter__(self):
        return iter(self.vars)

    def __add__(self, other: "Alphabet") -> "Alphabet":
        return Alphabet(self.vars + other.vars)

    @property
    def key(self) -> tuple[Fraction, ...]:
        """Order-free cache key."""
        return tuple(sorted(self.vars))

    def power_sum(self, k: int) -> Fraction:
        """The vertex-operator parameter ``(1/k) * sum a_i^k``."""
        if k < 1:
            raise ValueError("power sums are indexed from 1")
        return sum((v ** k for v in self.vars), Fraction(0)) / k

    @property
    def max_entry(self) -> Fraction:
        return max(self.vars, default=Fraction(0))


def concat(alphabets: Iterable[Alphabet]) -> Alphabet:
    out: tuple[Fraction, ...] = ()
    for a in alphabets:
        out += a.vars
    return Alphabet(out)


class RationalSeries:
    """Power series ``sum coeffs[k] z^k`` known exactly up to ``maxdeg``."""

    __slots__ = ("coeffs", "maxdeg")

    def __init__(self, coeffs: Iterable, maxdeg: int | None = None):
        coeffs = [to_fraction(c) for c in coeffs]
        if maxdeg is None:
            maxdeg = len(coeffs) - 1
        if maxdeg < 0:
            raise ValueError("maxdeg must be nonnegative")
        coeffs = coeffs[: maxdeg + 1]
        coeffs += [Fraction(0)] * (maxdeg + 1 - len(coeffs))
        self.coeffs = tuple(coeffs)
        self.maxdeg = maxdeg

    def __getitem__(self, k: int) -> Fraction:
        if k < 0:
            return Fraction(0)
        if k > self.maxdeg:
            raise IndexError(f"coefficient {k} beyond truncation order {self.maxdeg}")
        return self.coeffs[k]

    def __len__(self) -> int:
        return self.maxdeg + 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalSeries):
            return NotImplemented
        return self.maxdeg == other.maxdeg and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.coeffs, self.maxdeg))

    def __repr__(self) -> str:
        body = ", ".join(str(c) for c in self.coeffs)
        return f"RationalSeries([{body}] + O(z^{self.maxdeg + 1}))"

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        n = min(self.maxdeg, other.maxdeg)
        return RationalSeries([self.coeffs[k] + other.coeffs[k] for k in range(n + 1)], n)

    def __neg__(self) -> "RationalSeries":
        return RationalSeries([-c for c in self.coeffs], self.maxdeg)

    def __sub__(self, other: "RationalSeries") -> "RationalSeries":
        return self + (-other)

    def __mul__(self, other) -> "RationalSeries":
        if not isinstance(other, RationalSeries):
            c = to_fraction(other)
            return RationalSeries([c * x for x in self.coeffs], self.maxdeg)
        n = min(self.maxdeg, other.maxdeg)
        a, b = self.coeffs, other.coeffs
        out = [sum((a[i] * b[k - i] for i in range(k + 1)), Fraction(0)) for k in range(n + 1)]
        return RationalSeries(out, n)

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalSeries":
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("constant term is zero; no power-series reciprocal")
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, self.maxdeg + 1):
            s = sum((a[i] * out[k - i] for i in range(1, k + 1)), Fraction(0))
            out.append(-s * inv0)
        return RationalSeries(out, self.maxdeg)


@lru_cache(maxsize=4096)
def _h_table(key: tuple[Fraction, ...], maxdeg: int) -> tuple[Fraction, ...]:
    # coefficients of prod 1/(1 - a z), one variable at a time
    h = [Fraction(1)] + [Fraction(0)] * maxdeg
    for a in key:
        for k in range(1, maxdeg + 1):
            h[k] += a * h[k - 1]
    return tuple(h)


@lru_cache(maxsize=4096)
def _e_table(key: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    e = [Fraction(1)]
    for a in key:
        e = [(e[k] if k < len(e) else 0) + (a * e[k - 1] if k >= 1 else 0) for k in range(len(e) + 1)]
    return tuple(Fraction(x) for x in e)


def _grow(k: int) -> int:
    # round table sizes up so neighbouring queries share one cache entry
    size = 16
    while size < k:
        size *= 2
    return size


def complete_homogeneous(k: int, a: Alphabet) -> Fraction:
    """h_k(a); zero for negative k, one for k = 0."""
    if k < 0:
        return Fraction(0)
    if k == 0:
        return Fraction(1)
    if not a.vars:
        return Fraction(0)
    return _h_table(a.key, _grow(k))[k]


def elementary_symmetric(k: int, a: Alphabet) -> Fraction:
    """e_k(a); zero outside ``0 <= k <= len(a)``."""
    if k < 0 or k > len(a):
        return Fraction(0)
    return _e_table(a.key)[k]


def det(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant by Bareiss elimination (exact, division-exact at each step)."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    m = [[to_fraction(x) for x in row] for row in matrix]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) / prev
            row_i[k] = Fraction(0)
        prev = pivot
    return sign * m[n - 1][n - 1]


def cofactor_matrix(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    """``out[i][j] = (-1)^(i+j) * minor(i, j)``."""
    n = len(matrix)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [[matrix[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            row.append((-1) ** (i + j) * det(minor))
        out.append(row)
    return out


def skew_schur(lam: Partition, mu: Partition, a: Alphabet) -> Fraction:
    """s_{lam/mu}(a) as det(h_{lam_i - mu_j + j - i}(a)).

    Returns 0 when ``mu`` is not contained in ``lam``.
    """
    if not lam.contains(mu):
        return Fraction(0)
    n = len(lam)
    if n == 0:
        return Fraction(1)
    # a column of lam/mu taller than the alphabet forces zero
    if len(a) < n and any(lam[i + len(a)] > mu[i] for i in range(n - len(a))):
        return Fraction(0)
    if len(a) == 1:
        # horizontal strip in one variable
        return a.vars[0] ** (lam.size - mu.size)
    return _skew_schur_cached(lam.parts, mu.parts, a.key)


@lru_cache(maxsize=1 << 18)
def _skew_schur_cached(lam: tuple, mu: tuple, key: tuple) -> Fraction:
    n = len(lam)
    mu = mu + (0,) * (n - len(mu))
    a = Alphabet(key)
    top = max(lam[i] - mu[j] + j - i for i in range(n) for j in range(n))
    h = [complete_homogeneous(k, a) for k in range(max(top, 0) + 1)]
    mat = [[h[d] if (d := lam[i] - mu[j] + j - i) >= 0 else 0 for j in range(n)] for i in range(n)]
    return det(mat)


def schur(lam: Partition, a: Alphabet) -> Fraction:
    return skew_schur(lam, EMPTY, a)


def c_series(maxdeg: int, alphabets: Sequence[Alphabet]) -> RationalSeries:
    """Coefficients of prod_j prod_i 1/(1 - a_i^(j) z), i.e. h_k of the concatenation."""
    if maxdeg < 0:
        raise ValueError("maxdeg must be nonnegative")
    a = concat(alphabets)
    return RationalSeries([complete_homogeneous(k, a) for k in range(maxdeg + 1)], maxdeg)


def d_series(maxdeg: int, alphabets: Sequence[Alphabet]) -> RationalSeries:
    """Coefficients of prod_j prod_i (1 - a_i^(j) z), i.e. (-1)^k e_k."""
    if maxdeg < 0:
        raise ValueError("maxdeg must be nonnegative")
    a = concat(alphabets)
    return RationalSeries([(-1) ** k * elementary_symmetric(k, a) for k in range(maxdeg + 1)], maxdeg)


class TruncationError(ValueError):
    """A requested coefficient lies beyond the allowed series degree."""


class SingularMatrixError(ValueError):
    pass


def inverse(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact inverse by Gauss-Jordan elimination."""
    n = len(matrix)
    m = [[to_fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for k in range(n):
        piv = next((r for r in range(k, n) if m[r][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        m[k], m[piv] = m[piv], m[k]
        inv = 1 / m[k][k]
        m[k] = [x * inv for x in m[k]]
        for r in range(n):
            if r != k and m[r][k] != 0:
                f = m[r][k]
                m[r] = [x - f * y for x, y in zip(m[r], m[k])]
    return [row[n:] for row in m]
