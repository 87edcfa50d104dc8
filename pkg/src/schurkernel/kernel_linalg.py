"""Determinantal correlation kernel from the semi-infinite matrix A.

A_ij = phi_{0,4N}(1 - i, x_j), where x_j = m_j for j <= n and 1 - j
beyond.  With c, d the coefficients of prod 1/(1 - a z) and prod (1 - a z)
over the up-step variables, and c', d' the same over the down-step
variables,

    A = X T W,   X_il = c'_{l-i},  T_lk = c_{l-k},
                 W = identity except columns j <= n,
                 W_kj = sum_{l=1..k} d_{k-l} c_{m_j+l-1}.

Every row of A^{-1} = W^{-1} T^{-1} X^{-1} has finite support and so does
T^{-1} X^{-1} applied to the start vector of the kernel.  The kernel is
therefore a finite exact sum and needs no truncation of A at all.  The
structured inverse B A' (built from C = (c_{m_j+i-1}) and its cofactors)
is an independent second route to the same matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .laurent import laurent
from .process import CorrelationPoint, ProcessSpec
from .symcore import (
    Alphabet,
    Partition,
    SingularMatrixError,
    TruncationError,
    cofactor_matrix,
    complete_homogeneous,
    det,
    elementary_symmetric,
    inverse,
    schur,
    skew_schur,
)

ZERO = Fraction(0)


def phi_rs(spec: ProcessSpec, r: int, s: int, x: int, y: int, maxdeg: int) -> Fraction:
    """One-walker transition weight from (r, x) to (s, y); zero unless r < s.

    Equal to the z^(y-x) Laurent coefficient of
    prod_up 1/(1 - a z) * prod_down 1/(1 - b/z) over the steps in (r, s].
    """
    T = spec.T
    if not (0 <= r <= T and 0 <= s <= T):
        raise ValueError(f"times must lie in 0..{T}, got r={r}, s={s}")
    if r >= s:
        return ZERO
    if abs(y - x) > maxdeg:
        raise TruncationError(f"phi_{{{r},{s}}}({x},{y}) needs degree {abs(y - x)} > maxdeg={maxdeg}")
    up = tuple(sorted(spec.up_vars(r, s)))
    down = tuple(sorted(spec.down_vars(r, s)))
    return laurent(up, down)[y - x]


@dataclass
class TruncatedMatrix:
    entries: list[list[Fraction]]
    M: int
    row_labels: list[int]  # start positions 1 - i
    col_labels: list[int]  # end positions x_j

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


def end_positions(spec: ProcessSpec, count: int) -> list[int]:
    """x_1..x_count: the walker endpoints m_j, then the frozen sea 1 - j."""
    m = spec.endpoints
    return [m[j] if j < len(m) else -j for j in range(count)]


def build_matrix_A(spec: ProcessSpec, M: int, maxdeg: int) -> TruncatedMatrix:
    if M < spec.n:
        raise ValueError(f"M={M} must be at least n={spec.n}")
    rows = [1 - i for i in range(1, M + 1)]
    cols = end_positions(spec, M)
    ents = [[phi_rs(spec, 0, spec.T, a, b, maxdeg) for b in cols] for a in rows]
    return TruncatedMatrix(ents, M, rows, cols)


class _Coeffs:
    """c, d over the up-step variables and c', d' over the down-step ones."""

    def __init__(self, spec: ProcessSpec):
        self.s = spec.odd_alphabet
        self.sp = spec.even_alphabet
        self.P = len(self.s)
        self.Pp = len(self.sp)

    def c(self, k: int) -> Fraction:
        return complete_homogeneous(k, self.s)

    def d(self, k: int) -> Fraction:
        return (-1) ** k * elementary_symmetric(k, self.s) if k >= 0 else ZERO

    def cp(self, k: int) -> Fraction:
        return complete_homogeneous(k, self.sp)

    def dp(self, k: int) -> Fraction:
        return (-1) ** k * elementary_symmetric(k, self.sp) if k >= 0 else ZERO


class FactoredInverse:
    """Exact rows of A^{-1} = W^{-1} T^{-1} X^{-1} (1-based labels)."""

    def __init__(self, spec: ProcessSpec):
        self.spec = spec
        self.n = spec.n
        self.m = spec.endpoints
        self.cf = _Coeffs(spec)
        cf = self.cf
        n = self.n
        # column j of W below the identity part lives in rows 1..wsup[j]
        self.wsup = [max(cf.P, 1 - mj, n) for mj in self.m]
        self.W = [[self.w(k, j) for j in range(1, n + 1)] for k in range(1, n + 1)]
        try:
            self.W11inv = inverse(self.W) if n else []
        except SingularMatrixError:
            raise SingularMatrixError("leading block of A is singular; the final partition is not reachable") from None

    def w(self, k: int, j: int) -> Fraction:
        """W_kj for j <= n."""
        cf, mj = self.cf, self.m[j - 1]
        return sum((cf.d(k - l) * cf.c(mj + l - 1) for l in range(max(1, k - cf.P), k + 1)), ZERO)

    def winv_row(self, i: int) -> dict[int, Fraction]:
        """Row i of W^{-1} as a sparse dict."""
        n = self.n
        if i <= n:
            return {k: self.W11inv[i - 1][k - 1] for k in range(1, n + 1) if self.W11inv[i - 1][k - 1]}
        row = {i: Fraction(1)}
        for k in range(1, n + 1):
            v = -sum((self.w(i, j) * self.W11inv[j - 1][k - 1] for j in range(1, n + 1)), ZERO)
            if v:
                row[k] = v
        return row

    def row(self, i: int) -> dict[int, Fraction]:
        """Row i of A^{-1}, indexed by start label j (finite support)."""
        cf = self.cf
        acc: dict[int, Fraction] = {}
        for k, wk in self.winv_row(i).items():
            # row k of T^{-1} is d_{k-l}, l = k-P..k
            for l in range(max(1, k - cf.P), k + 1):
                tl = wk * cf.d(k - l)
                if not tl:
                    continue
                # row l of X^{-1} is d'_{j-l}, j = l..l+P'
                for j in range(l, l + cf.Pp + 1):
                    v = tl * cf.dp(j - l)
                    if v:
                        acc[j] = acc.get(j, ZERO) + v
        return {j: v for j, v in acc.items() if v}


def kernel_support(spec: ProcessSpec, r2: int, x2: int) -> int:
    """Largest k with (T^{-1} X^{-1} phi_{0,r2}(., x2))_k possibly nonzero."""
    return max(len(spec.odd_alphabet), len(spec.up_vars(r2, spec.T)) + 1 - x2, spec.n, 1)


def kernel_tilde(spec: ProcessSpec, r1: int, x1: int, r2: int, x2: int, M: int, maxdeg: int) -> Fraction:
    """sum_{i,j} phi_{r1,4N}(x1, x_i) (A^{-1})_{ij} phi_{0,r2}(1 - j, x2), exactly."""
    T = spec.T
    G = kernel_support(spec, r2, x2)
    if M < G:
        raise TruncationError(f"M={M} is below the kernel support floor {G} for this point")
    fi = _factored(spec)
    cf = fi.cf
    n = spec.n
    phi2 = {j: phi_rs(spec, 0, r2, 1 - j, x2, maxdeg) for j in range(1, M + cf.Pp + 1)}
    v = [ZERO] + [sum((cf.dp(t) * phi2[l + t] for t in range(cf.Pp + 1)), ZERO) for l in range(1, M + 1)]
    g = [ZERO] + [sum((cf.d(k - l) * v[l] for l in range(max(1, k - cf.P), k + 1)), ZERO) for k in range(1, M + 1)]
    if any(g[G + 1:]):
        raise AssertionError("start vector has support beyond its proven floor")

    def phi1(pos: int) -> Fraction:
        return phi_rs(spec, r1, T, x1, pos, maxdeg)

    total = ZERO
    for k in range(n + 1, G + 1):
        if g[k]:
            total += phi1(1 - k) * g[k]
    if n:
        # rho_{1..n} = (Phi1_{1..n} - sigma) W11^{-1}, sigma_j = sum_{i>n} phi1(1-i) W_ij
        lhs = []
        for j in range(1, n + 1):
            sigma = sum((phi1(1 - i) * fi.w(i, j) for i in range(n + 1, fi.wsup[j - 1] + 1)), ZERO)
            lhs.append(phi1(fi.m[j - 1]) - sigma)
        for k in range(1, n + 1):
            if g[k]:
                rho = sum((lhs[j] * fi.W11inv[j][k - 1] for j in range(n)), ZERO)
                total += rho * g[k]
    return total


_FACTORED: dict[ProcessSpec, FactoredInverse] = {}


def _factored(spec: ProcessSpec) -> FactoredInverse:
    if spec not in _FACTORED:
        _FACTORED[spec] = FactoredInverse(spec)
    return _FACTORED[spec]


def _check_times(spec: ProcessSpec, *times: int) -> None:
    for r in times:
        if not 1 <= r <= spec.T - 1:
            raise ValueError(f"correlation time {r} outside 1..{spec.T - 1}")


def kernel_finite(spec: ProcessSpec, r1: int, x1: int, r2: int, x2: int, M: int, maxdeg: int) -> Fraction:
    """K(r1, x1; r2, x2) = K~ - phi_{r1,r2}(x1, x2), exact.

    ``M`` bounds the start-index sum; it must reach the support floor
    (``kernel_support``), beyond which every term is proven zero and
    checked to be zero.  The result is identical for every admissible M.
    """
    _check_times(spec, r1, r2)
    return kernel_tilde(spec, r1, x1, r2, x2, M, maxdeg) - phi_rs(spec, r1, r2, x1, x2, maxdeg)


def kernel_section(spec: ProcessSpec, r1: int, x1: int, r2: int, x2: int, M: int, maxdeg: int) -> Fraction:
    """Kernel from the literal M x M section of A (converges as M grows, not exact)."""
    _check_times(spec, r1, r2)
    A = build_matrix_A(spec, M, maxdeg)
    Ainv = inverse(A.entries)
    phi1 = [phi_rs(spec, r1, spec.T, x1, b, maxdeg) for b in A.col_labels]
    phi2 = [phi_rs(spec, 0, r2, a, x2, maxdeg) for a in A.row_labels]
    kt = sum((phi1[i] * Ainv[i][j] * phi2[j] for i in range(M) for j in range(M)), ZERO)
    return kt - phi_rs(spec, r1, r2, x1, x2, maxdeg)


def kernel_matrix(spec: ProcessSpec, points: Sequence[CorrelationPoint], M: int, maxdeg: int) -> list[list[Fraction]]:
    pts = [CorrelationPoint(*p) for p in points]
    if len(set(pts)) != len(pts):
        raise ValueError("correlation points must be pairwise distinct")
    return [[kernel_finite(spec, p.time, p.position, q.time, q.position, M, maxdeg) for q in pts] for p in pts]


def default_M(spec: ProcessSpec, points: Sequence[CorrelationPoint]) -> int:
    return max((kernel_support(spec, p[0], p[1]) for p in points), default=1) + 5


def correlation_determinant(spec: ProcessSpec, points: Sequence[CorrelationPoint], M: int, maxdeg: int) -> Fraction:
    """det[K(p_i; p_j)] over the points; 1 for the empty set."""
    if not points:
        return Fraction(1)
    return det(kernel_matrix(spec, points, M, maxdeg))


# structured inverse ------------------------------------------------------------------


@dataclass
class StructuredInverse:
    """Blocks of A^{-1} = B A' with B = (A'A)^{-1}.

    ``a`` holds the first n columns of A'A for rows 1..rows, ``b`` the
    matching columns of b0 * B.  For n = 0 the inverse is A' itself and
    ``trivial`` is set.
    """

    spec: ProcessSpec
    matC: list[list[Fraction]]
    cofactors: list[list[Fraction]]
    b0: Fraction
    a: list[list[Fraction]]
    b: list[list[Fraction]]
    rows: int
    trivial: bool = False
    _cf: _Coeffs = field(default=None, repr=False)

    def __post_init__(self):
        if self._cf is None:
            self._cf = _Coeffs(self.spec)

    def x(self, i: int) -> int:
        m = self.spec.endpoints
        return m[i - 1] if i <= len(m) else 1 - i

    def a_prime(self, i: int, j: int) -> Fraction:
        """A'_ij = sum_{k<=j} d'_{j-k} d_{x_k - x_i}."""
        cf = self._cf
        xi = self.x(i)
        return sum((cf.dp(j - k) * cf.d(self.x(k) - xi) for k in range(max(1, j - cf.Pp), j + 1)), ZERO)

    def a_prime_support(self, i: int) -> range:
        """Columns j where row i of A' can be nonzero."""
        cf = self._cf
        xi = self.x(i)
        ks = [k for k in range(1, max(i, self.spec.n) + 1) if 0 <= self.x(k) - xi <= cf.P]
        return range(min(ks), max(ks) + cf.Pp + 1)

    def inverse_entry(self, i: int, j: int) -> Fraction:
        if i > self.rows:
            raise IndexError(f"row {i} beyond computed rows {self.rows}")
        n = self.spec.n
        v = sum((self.b[i - 1][k] * self.a_prime(k + 1, j) for k in range(n)), ZERO) / self.b0 if n else ZERO
        if i > n:
            v += self.a_prime(i, j)
        return v

    def inverse_row(self, i: int) -> dict[int, Fraction]:
        n = self.spec.n
        cols = set()
        for k in range(1, n + 1):
            cols.update(self.a_prime_support(k))
        if i > n:
            cols.update(self.a_prime_support(i))
        out = {j: self.inverse_entry(i, j) for j in sorted(cols)}
        return {j: v for j, v in out.items() if v}


def c_matrix(spec: ProcessSpec) -> list[list[Fraction]]:
    """C_ij = c_{m_j + i - 1} over the up-step variables."""
    s = spec.odd_alphabet
    m = spec.endpoints
    n = spec.n
    return [[complete_homogeneous(m[j] + i, s) for j in range(n)] for i in range(n)]


def structured_inverse(spec: ProcessSpec, maxdeg: int, rows: int | None = None) -> StructuredInverse:
    n = spec.n
    cf = _Coeffs(spec)
    if rows is None:
        rows = n + cf.P + 5
    if n and spec.endpoints[0] + rows > maxdeg:
        raise TruncationError(f"structured inverse needs c_k up to k={spec.endpoints[0] + rows} > maxdeg={maxdeg}")
    if n == 0:
        return StructuredInverse(spec, [], [], Fraction(1), [[] for _ in range(rows)], [[] for _ in range(rows)], rows, True, cf)
    matC = c_matrix(spec)
    cof = cofactor_matrix(matC)
    b0 = det(matC)
    if b0 == 0:
        raise SingularMatrixError("det C = 0")
    m = spec.endpoints

    def x(i):
        return m[i - 1] if i <= n else 1 - i

    # (A'A)_ik = sum_{j<=i} d_{x_j - x_i} c_{x_k + j - 1}
    a = [[sum((cf.d(x(j) - x(i)) * cf.c(m[k] + j - 1) for j in range(1, i + 1)), ZERO) for k in range(n)]
         for i in range(1, rows + 1)]
    A2 = [row[:] for row in a[:n]]
    if det(A2) != b0:
        raise AssertionError("det A'' differs from det C")
    cofA = cofactor_matrix(A2)
    b = [[cofA[j][i] for j in range(n)] for i in range(n)]
    for i in range(n, rows):
        b.append([-sum((a[i][k] * b[k][j] for k in range(n)), ZERO) for j in range(n)])
    return StructuredInverse(spec, matC, cof, b0, a, b, rows, False, cf)


def cofactor_schur_check(spec: ProcessSpec) -> list[tuple[int, int, Fraction, Fraction]]:
    """Pairs (cofactor(b, j), signed skew Schur) for every b, j.

    Uses mu~^(j) (mu_1+1, ..., mu_{j-1}+1, mu_{j+1}, ..., mu_n) with n - 1
    rows and nu^(b) = (1^(b-1)); the Partition type drops trailing zeros,
    so no padding choice has to be made.
    """
    n = spec.n
    mu = spec.final_partition
    s = spec.odd_alphabet
    cof = cofactor_matrix(c_matrix(spec))
    out = []
    for b in range(1, n + 1):
        nu = Partition([1] * (b - 1))
        for j in range(1, n + 1):
            mt = Partition([mu[i] + 1 for i in range(j - 1)] + [mu[i] for i in range(j, n)])
            out.append((b, j, cof[b - 1][j - 1], (-1) ** (j + b) * skew_schur(mt, nu, s)))
    return out


@dataclass
class InverseSeriesReport:
    ok: bool
    checked: int
    max_z1_degree: int
    max_z2_degree: int
    mismatches: list[tuple[int, int, Fraction, Fraction]]


def _series_left(si: StructuredInverse, deg1: int, deg2: int) -> dict[tuple[int, int], Fraction]:
    """sum_{i,j} z1^{x_i - 1} (A^{-1})_{ij} z2^j, windowed."""
    n = si.spec.n
    out: dict[tuple[int, int], Fraction] = {}
    for i in range(1, max(n, deg1) + 1):
        e1 = si.x(i) - 1
        if e1 < -deg1:
            continue
        for j in range(1, deg2 + 1):
            v = si.inverse_entry(i, j)
            if v:
                out[(e1, j)] = out.get((e1, j), ZERO) + v
    return out


def _series_right(spec: ProcessSpec, deg1: int, deg2: int) -> dict[tuple[int, int], Fraction]:
    cf = _Coeffs(spec)
    n = spec.n
    m = spec.endpoints
    prefactor: dict[tuple[int, int], Fraction] = {}
    for k in range(1, deg1 + cf.P + 1):
        prefactor[(-k, k)] = Fraction(1)
    if n:
        matC = c_matrix(spec)
        cof = cofactor_matrix(matC)
        b0 = det(matC)
        for j in range(n):
            for lp in range(0, m[j]):
                for b in range(1, n + 1):
                    key = (m[j] - 1 - lp, b)
                    prefactor[key] = prefactor.get(key, ZERO) + cf.c(lp) * cof[b - 1][j] / b0
    out: dict[tuple[int, int], Fraction] = {}
    for (e1, e2), v in prefactor.items():
        for t in range(cf.P + 1):
            for tp in range(cf.Pp + 1):
                f1, f2 = e1 - t, e2 + tp
                if f1 < -deg1 or f2 > deg2:
                    continue
                w = v * cf.d(t) * cf.dp(tp)
                if w:
                    out[(f1, f2)] = out.get((f1, f2), ZERO) + w
    return out


def verify_inverse_series(spec: ProcessSpec, deg1: int, deg2: int, maxdeg: int | None = None) -> InverseSeriesReport:
    """Compare both sides of the closed form for sum z1^{x_i-1} A^{-1}_ij z2^j.

    Coefficients of z1^e1 z2^e2 are compared for e1 >= -deg1, e2 <= deg2.
    """
    if deg1 < 0 or deg2 < 0:
        raise ValueError("degrees must be nonnegative")
    n = spec.n
    rows = max(n, deg1) + 1
    if maxdeg is None:
        maxdeg = max(spec.endpoints, default=0) + rows + 1
    si = structured_inverse(spec, maxdeg, rows)
    left = _series_left(si, deg1, deg2)
    right = _series_right(spec, deg1, deg2)
    keys = sorted(set(left) | set(right))
    bad = [(e1, e2, left.get((e1, e2), ZERO), right.get((e1, e2), ZERO))
           for e1, e2 in keys if left.get((e1, e2), ZERO) != right.get((e1, e2), ZERO)]
    return InverseSeriesReport(not bad, len(keys), deg1, deg2, bad)
