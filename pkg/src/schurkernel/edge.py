"""Edge scaling of the kernel for one-variable alphabets and a single pinned walker.

Setting: every step alphabet is (alpha,), the final partition is (m,), and
near time 2N positions are measured on the N^(1/3) scale,

    2u = 2N + 2 C N^(2/3) tau,   x = A(2u) N + D N^(1/3) xi,
    m  = A(2N) N + B N^(2/3) omega.

The finite-N kernel is evaluated exactly (integers and Fractions) through
its two coefficient sequences

    f_y = [z^y] (1 - alpha/z)^u1 / (1 - alpha z)^(2N-u1),
    g_k = [z^k] (1 - alpha z)^(2N-u2) / (1 - alpha/z)^u2,

and is compared after rescaling with the limit kernel built from Airy
functions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .airy import airy, airy_prime
from .kernel_contour import ContourSpec
from .laurent import laurent
from .symcore import to_fraction

__all__ = [
    "airy",
    "airy_prime",
    "ScalingConstants",
    "scaling_constants",
    "EdgeParams",
    "ScaledPoint",
    "SaddleData",
    "saddle_data",
    "extended_airy_kernel",
    "limit_kernel",
    "limit_kernel_terms",
    "FiniteNKernel",
    "finite_N_functions",
    "convergence_study",
    "write_study_csv",
]


# scaling -------------------------------------------------------------------------------


class ScalingConstants(NamedTuple):
    A: Callable[[float, float], float]  # A(t, N)
    B: float
    C: float
    D: float


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def scaling_constants(alpha: float) -> ScalingConstants:
    a = _check_alpha(alpha)

    def A(t: float, N: float) -> float:
        s = t / N
        return 2 * a * a / (1 - a * a) + a / (1 - a * a) * math.sqrt(max(4 * s - s * s, 0.0))

    D = a ** (1 / 3) * (1 + a) ** (4 / 3) / (1 - a * a)
    C = (1 + a) ** (2 / 3) / a ** (1 / 3)
    B = 2 * a ** (2 / 3) / ((1 - a) * (1 + a) ** (1 / 3))
    return ScalingConstants(A, B, C, D)


class ScaledPoint(NamedTuple):
    tau: float
    xi: float
    u: int
    x: int
    tau_eff: float  # the (tau, xi) actually realised by the rounded (u, x)
    xi_eff: float


@dataclass(frozen=True)
class EdgeParams:
    alpha: float
    omega: float
    N: int

    def __post_init__(self):
        _check_alpha(self.alpha)
        if self.N < 1:
            raise ValueError("N must be positive")

    @property
    def constants(self) -> ScalingConstants:
        return scaling_constants(self.alpha)

    def A(self, t: float) -> float:
        return self.constants.A(t, self.N)

    @property
    def m(self) -> int:
        k = self.constants
        m = round(self.A(2 * self.N) * self.N + k.B * self.N ** (2 / 3) * self.omega)
        if m < 0:
            raise ValueError(f"scaled endpoint m={m} is negative")
        return m

    @property
    def omega_eff(self) -> float:
        k = self.constants
        return (self.m - self.A(2 * self.N) * self.N) / (k.B * self.N ** (2 / 3))

    def point(self, tau: float, xi: float) -> ScaledPoint:
        k = self.constants
        N = self.N
        u = round(N + k.C * N ** (2 / 3) * tau)
        if not 1 <= u <= 2 * N - 1:
            raise ValueError(f"scaled time u={u} outside 1..{2 * N - 1} (N={N}, tau={tau})")
        x = round(self.A(2 * u) * N + k.D * N ** (1 / 3) * xi)
        tau_eff = (u - N) / (k.C * N ** (2 / 3))
        xi_eff = (x - self.A(2 * u) * N) / (k.D * N ** (1 / 3))
        return ScaledPoint(tau, xi, u, x, tau_eff, xi_eff)

    def log_prefactor(self, tau1: float, xi1: float, tau2: float, xi2: float) -> float:
        """log P; the (1 - alpha) power is 2 C N^(2/3) (tau1 - tau2)."""
        k = self.constants
        power = 2 * k.C * self.N ** (2 / 3) * (tau1 - tau2)
        return power * math.log(1 - self.alpha) + (tau1 ** 3 - tau2 ** 3) / 3 + xi2 * tau2 - xi1 * tau1


# saddle point ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SaddleData:
    alpha: float
    beta: float
    delta: float = 0.0

    @property
    def mu(self) -> float:
        a, b = self.alpha, self.beta
        return 2 * a / (1 - a * a) * (a + math.sqrt(1 - b * b))

    @property
    def z_c(self) -> float:
        a, b = self.alpha, self.beta
        p, q = math.sqrt(1 + b), math.sqrt(1 - b)
        return (p + a * q) / (q + a * p)

    @property
    def w_c(self) -> float:
        a, d = self.alpha, self.delta
        return (2 * a + (1 - a) * d) / (2 * a + a * (1 - a) * d)

    def f(self, z: float, order: int = 0) -> float:
        """Derivatives of (1+b) log(z-a) - (1-b) log(1-az) - (mu+1+b) log z."""
        a, b, mu = self.alpha, self.beta, self.mu
        if order == 0:
            return (1 + b) * math.log(z - a) - (1 - b) * math.log(1 - a * z) - (mu + 1 + b) * math.log(z)
        k = order
        sign = (-1) ** (k - 1)
        fact = math.factorial(k - 1)
        # d^k log(z - c) = (-1)^(k-1) (k-1)! / (z - c)^k and log(1 - a z) = log(a) + log(1/a - z)
        t1 = (1 + b) * sign * fact / (z - a) ** k
        t2 = -(1 - b) * (-fact) * a ** k / (1 - a * z) ** k
        t3 = -(mu + 1 + b) * sign * fact / z ** k
        return t1 + t2 + t3

    def g(self, z: float, order: int = 0) -> float:
        """Derivatives of 2 log(1 - a z) + (2a/(1-a) + delta) log z."""
        a = self.alpha
        c = 2 * a / (1 - a) + self.delta
        if order == 0:
            return 2 * math.log(1 - a * z) + c * math.log(z)
        k = order
        fact = math.factorial(k - 1)
        return 2 * (-fact) * a ** k / (1 - a * z) ** k + c * (-1) ** (k - 1) * fact / z ** k

    @property
    def f3_claimed(self) -> float:
        """The value 2 D^3 / z_c^3 expected for f'''(z_c)."""
        D = scaling_constants(self.alpha).D
        return 2 * D ** 3 / self.z_c ** 3


def saddle_data(alpha: float, tau: float = 0.0, N: int | None = None, omega: float = 0.0) -> SaddleData:
    """Saddle quantities; beta = C N^(-1/3) tau and delta = B omega / N^(1/3) when N is given."""
    k = scaling_constants(alpha)
    if N is None:
        return SaddleData(float(alpha), float(tau))
    return SaddleData(float(alpha), k.C * N ** (-1 / 3) * tau, k.B * omega / N ** (1 / 3))


# quadrature -----------------------------------------------------------------------------

_GL = {n: np.polynomial.legendre.leggauss(n) for n in (16, 24)}


def _breakpoints(a: float, b: float, width: Callable[[float], float]) -> np.ndarray:
    pts = [a]
    while pts[-1] < b:
        pts.append(min(b, pts[-1] + width(pts[-1])))
    return np.array(pts)


def _gl_sum(fun, edges: np.ndarray, n: int) -> float:
    x, w = _GL[n]
    lo, hi = edges[:-1], edges[1:]
    half = (hi - lo)[:, None] / 2
    nodes = (lo + hi)[:, None] / 2 + half * x[None, :]
    return float(np.sum(fun(nodes) * w[None, :] * half))


def integrate(fun, a: float, b: float, width: Callable[[float], float], tol: float = 1e-13) -> float:
    """Composite Gauss-Legendre on panels of the given local width.

    Accepted once 16- and 24-point rules agree to ``tol``; otherwise the
    panels are halved (at most six times).
    """
    if b <= a:
        return 0.0
    scale = 1.0
    for _ in range(7):
        edges = _breakpoints(a, b, lambda t: scale * width(t))
        lo, hi = _gl_sum(fun, edges, 16), _gl_sum(fun, edges, 24)
        if abs(lo - hi) <= tol * max(1.0, abs(hi)):
            return hi
        scale /= 2
    raise ArithmeticError(f"quadrature on [{a}, {b}] failed to settle (last change {abs(lo - hi):.3e})")


def _airy_width(shift: float, rate: float = 0.0) -> Callable[[float], float]:
    """Panel width resolving Ai(shift + t) and an exp(rate t) factor."""

    def width(t: float) -> float:
        x = shift + t
        w = 1.0 if x >= -1 else min(1.0, 2.5 / math.sqrt(-x))
        if rate:
            w = min(w, 4.0 / abs(rate))
        return w

    return width


_LOG_EPS = math.log(1e-14)


def _airy_decay_end(xi_min: float, rate: float = 0.0, log_eps: float = _LOG_EPS) -> float:
    """t beyond which exp(-rate t) e^{-(2/3)(xi_min+t)^{3/2}} < eps (crude Airy bound)."""
    t = max(0.0, -xi_min)
    while True:
        x = xi_min + t
        val = -rate * t - (2 / 3) * max(x, 0.0) ** 1.5
        if x > 0 and val < log_eps:
            return t
        t += 0.5


def _airy_product_tail(d: float, xi1: float, xi2: float) -> float:
    """int_0^inf exp(-nu d) Ai(xi1 + nu) Ai(xi2 + nu) dnu for any real d."""
    lo = min(xi1, xi2)
    # crude bound: exp(-d nu) times exp(-(4/3) s^{3/2}), s = lo + nu
    t = max(0.0, -lo)
    while not (lo + t > 0 and -d * t - (4 / 3) * (lo + t) ** 1.5 < _LOG_EPS):
        t += 0.5
    fun = lambda nu: np.exp(-nu * d) * airy(xi1 + nu) * airy(xi2 + nu)
    return integrate(fun, 0.0, t, _airy_width(lo, d))


def airy_product_gaussian(s: float, a: float, b: float) -> float:
    """int_R exp(s nu) Ai(a + nu) Ai(b + nu) dnu for s > 0 (closed form)."""
    if s <= 0:
        raise ValueError("closed form needs s > 0")
    return math.exp(s ** 3 / 12 - (a + b) * s / 2 - (a - b) ** 2 / (4 * s)) / math.sqrt(4 * math.pi * s)


def extended_airy_kernel(tau1: float, xi1: float, tau2: float, xi2: float) -> float:
    """Extended Airy kernel; equal times use the nu > 0 branch.

    For tau1 < tau2 the nu < 0 integral equals the nu > 0 integral minus
    its bilateral version, which has a closed Gaussian form.
    """
    d = tau1 - tau2
    if d >= 0:
        return _airy_product_tail(d, xi1, xi2)
    return _airy_product_tail(d, xi1, xi2) - airy_product_gaussian(-d, xi1, xi2)


def extended_airy_kernel_direct(tau1: float, xi1: float, tau2: float, xi2: float) -> float:
    """Same kernel with the nu < 0 branch integrated literally (slow; cross-check only)."""
    d = tau1 - tau2
    if d >= 0:
        return _airy_product_tail(d, xi1, xi2)
    # exp(-nu d) = exp(|d| nu) decays as nu -> -inf and |Ai| <= 1; substitute t = -nu
    end = _LOG_EPS / d
    if end > 4000:
        raise ValueError(f"time gap {abs(d)} too small for the nu < 0 branch to be truncated")
    lo = min(xi1, xi2)

    def width(t: float) -> float:
        x = lo - t
        w = 1.0 if x >= -1 else min(1.0, 2.5 / math.sqrt(-x))
        return min(w, 4.0 / abs(d))

    fun = lambda t: np.exp(d * t) * airy(xi1 - t) * airy(xi2 - t)
    return -integrate(fun, 0.0, end, width)


def airy_laplace_pos(s: float, xi: float) -> float:
    """int_0^inf exp(-s l) Ai(xi + l) dl, for any real s."""
    end = _airy_decay_end(xi, s, math.log(1e-17))
    fun = lambda l: np.exp(-s * l) * airy(xi + l)
    return integrate(fun, 0.0, end, _airy_width(xi, s))


def airy_laplace_neg(sigma: float, xi: float) -> float:
    """int_0^inf exp(sigma l) Ai(xi - l) dl by direct quadrature (sigma < 0)."""
    if sigma >= 0:
        raise ValueError("direct form needs sigma < 0")
    end = math.log(1e-16) / sigma
    fun = lambda l: np.exp(sigma * l) * airy(xi - l)

    def width(t: float) -> float:
        x = xi - t
        w = 1.0 if x >= -1 else min(1.0, 2.5 / math.sqrt(-x))
        return min(w, 4.0 / abs(sigma))

    return integrate(fun, 0.0, end, width)


_DIRECT_LIMIT = -0.1


def limit_kernel_terms(tau1: float, xi1: float, tau2: float, xi2: float, omega: float) -> dict[str, float]:
    """The pieces of the limit kernel, named by branch."""
    sigma = tau1 + omega
    k2 = extended_airy_kernel(tau1, xi1, tau2, xi2)
    a2 = float(airy(xi2))
    if sigma <= 0:
        if sigma <= _DIRECT_LIMIT:
            lap = airy_laplace_neg(sigma, xi1)
        else:
            # analytic continuation through int_R e^{s t} Ai(t) dt = e^{s^3/3}
            lap = math.exp(-sigma ** 3 / 3 + sigma * xi1) - airy_laplace_pos(sigma, xi1)
        return {"K2": k2, "lower": a2 * lap}
    return {
        "K2": k2,
        "upper": -a2 * airy_laplace_pos(sigma, xi1),
        "exp": a2 * math.exp(-sigma ** 3 / 3 + xi1 * sigma),
    }


def limit_kernel(tau1: float, xi1: float, tau2: float, xi2: float, omega: float) -> float:
    return sum(limit_kernel_terms(tau1, xi1, tau2, xi2, omega).values())


# finite N, exact -------------------------------------------------------------------------


class FiniteNKernel:
    """Exact kernel K(2u1, x1; 2u2, x2) for alphabets (alpha,) and final partition (m,)."""

    def __init__(self, alpha, N: int, m: int):
        self.alpha = to_fraction(alpha)
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if N < 1 or m < 0:
            raise ValueError("need N >= 1 and m >= 0")
        self.N, self.m = N, m
        self.p, self.q = self.alpha.numerator, self.alpha.denominator
        self._f: dict[tuple[int, int], Fraction] = {}
        self._g: dict[tuple[int, int], Fraction] = {}

    def f(self, u1: int, y: int) -> Fraction:
        """[z^y] (1 - a/z)^u1 (1 - a z)^-(2N - u1)."""
        key = (u1, y)
        if key not in self._f:
            n1 = 2 * self.N - u1
            p2, q2 = self.p * self.p, self.q * self.q
            s = 0
            for i in range(max(0, -y), u1 + 1):
                s += (-1) ** i * comb(u1, i) * p2 ** i * q2 ** (u1 - i) * comb(y + i + n1 - 1, n1 - 1)
            self._f[key] = Fraction(s, q2 ** u1) * self.alpha ** y
        return self._f[key]

    def g(self, u2: int, k: int) -> Fraction:
        """[z^k] (1 - a z)^(2N - u2) (1 - a/z)^-u2."""
        key = (u2, k)
        if key not in self._g:
            n2 = 2 * self.N - u2
            p, q = self.p, self.q
            s = 0
            for i in range(max(0, k), n2 + 1):
                l = i - k
                c = comb(l + u2 - 1, l)
                # (-a)^i a^l = (-1)^i p^(i+l) / q^(i+l); bring to denominator q^(2 n2 - k)
                s += (-1) ** i * comb(n2, i) * c * p ** (i + l) * q ** (2 * n2 - k - i - l)
            self._g[key] = Fraction(s, q ** (2 * n2 - k)) if s else Fraction(0)
        return self._g[key]

    def h(self, k: int) -> Fraction:
        """h_k of 2N copies of alpha."""
        if k < 0:
            return Fraction(0)
        return comb(k + 2 * self.N - 1, k) * self.alpha ** k

    def diag_coeff(self, d: int, k: int) -> Fraction:
        """[z^k] (1 - a/z)^d (1 - a z)^d for d >= 0."""
        a = self.alpha
        k = abs(k)
        return sum((comb(d, b) * comb(d, b + k) * a ** (2 * b + k) for b in range(0, d - k + 1)), Fraction(0)) * (-1) ** k

    def main_part(self, u1: int, x1: int, u2: int, x2: int) -> Fraction:
        """The m-independent part: double integral minus phi."""
        total = self.diag_coeff(u1 - u2, x1 - x2) if u1 >= u2 else Fraction(0)
        for k in range(-x1 - u1, 0):
            total -= self.f(u1, x1 + k) * self.g(u2, -x2 - k)
        return total

    def pinned_part(self, u1: int, x1: int, u2: int, x2: int) -> Fraction:
        """sum_{j=1..m} h_{m-j}/h_m f_{x1-j} g_{-x2}."""
        m = self.m
        if m == 0:
            return Fraction(0)
        s = sum((self.h(m - j) * self.f(u1, x1 - j) for j in range(1, m + 1)), Fraction(0))
        return s / self.h(m) * self.g(u2, -x2)

    def kernel(self, u1: int, x1: int, u2: int, x2: int) -> Fraction:
        for u in (u1, u2):
            if not 1 <= u <= 2 * self.N - 1:
                raise ValueError(f"u={u} outside 1..{2 * self.N - 1}")
        return self.main_part(u1, x1, u2, x2) + self.pinned_part(u1, x1, u2, x2)

    def varphi(self, u1: int, x1: int) -> Fraction:
        """[z^(x1-m)] ((1 - a/z)(1 - a z))^(u1 - 2N), on |z| = 1."""
        e = 2 * self.N - u1
        a = self.alpha
        return laurent(up=(a,) * e, down=(a,) * e)[x1 - self.m]


class FiniteNFunctions(NamedTuple):
    psi1: float
    psi2: float
    varphi: float
    h_ratio: float


def finite_N_functions(params: EdgeParams, u1: int, u2: int, x1: int, x2: int, m: int, j: int,
                       contour: ContourSpec) -> FiniteNFunctions:
    """psi1(x1 - j), psi2(x2), varphi(x1) by the trapezoid rule, and h_{m-j}/h_m exactly.

    psi1 is integrated on |z| = r1, psi2 on |z| = r2, varphi on |z| = 1.
    """
    a = params.alpha
    N = params.N
    if not (contour.r1 < 1 / a and contour.r2 > a):
        raise ValueError(f"contour radii must satisfy r2 > {a} and r1 < {1 / a}")
    n = contour.nodes
    th = 2 * np.pi * np.arange(n) / n
    z1 = contour.r1 * np.exp(1j * th)
    z2 = contour.r2 * np.exp(1j * th)
    z0 = np.exp(1j * th)
    psi1 = np.mean(z1 ** (-(x1 - j)) * (1 - a / z1) ** u1 / (1 - a * z1) ** (2 * N - u1)).real
    psi2 = np.mean(z2 ** x2 * (1 - a * z2) ** (2 * N - u2) / (1 - a / z2) ** u2).real
    varphi = np.mean(z0 ** (-(x1 - m)) * ((1 - a / z0) * (1 - a * z0)) ** (u1 - 2 * N)).real
    fk = FiniteNKernel(a, N, m)
    ratio = float(fk.h(m - j) / fk.h(m)) if 0 <= j <= m else 0.0
    return FiniteNFunctions(float(psi1), float(psi2), float(varphi), ratio)


# convergence study ------------------------------------------------------------------------


@dataclass
class StudyRow:
    N: int
    tau1: float
    xi1: float
    tau2: float
    xi2: float
    omega: float
    finite_value: float
    limit_value: float

    @property
    def abs_diff(self) -> float:
        return abs(self.finite_value - self.limit_value)


def _fraction_log_abs(v: Fraction) -> tuple[float, int]:
    """(log|v|, sign) without overflowing floats."""
    if v == 0:
        return -math.inf, 0
    num, den = abs(v.numerator), v.denominator
    return math.log(num) - math.log(den), 1 if v > 0 else -1


def scaled_finite_kernel(params: EdgeParams, tau1: float, xi1: float, tau2: float, xi2: float,
                         kernel: FiniteNKernel | None = None) -> tuple[float, tuple[float, float, float, float, float]]:
    """D N^(1/3) K / P at the rounded lattice point.

    Returns the value and the effective (tau1, xi1, tau2, xi2, omega) that
    the rounded integers represent; P is evaluated at those coordinates.
    """
    p1 = params.point(tau1, xi1)
    p2 = params.point(tau2, xi2)
    m = params.m
    if kernel is None:
        kernel = FiniteNKernel(params.alpha, params.N, m)
    K = kernel.kernel(p1.u, p1.x, p2.u, p2.x)
    eff = (p1.tau_eff, p1.xi_eff, p2.tau_eff, p2.xi_eff, params.omega_eff)
    logK, sign = _fraction_log_abs(K)
    if sign == 0:
        return 0.0, eff
    D = params.constants.D
    logv = logK + math.log(D) + math.log(params.N) / 3 - params.log_prefactor(*eff[:4])
    return sign * math.exp(logv), eff


def convergence_study(alpha: float, omega: float, taus: Sequence[float], xis: Sequence[float],
                      N_list: Sequence[int], points: Iterable[tuple[float, float, float, float]] | None = None,
                      effective: bool = True) -> list[StudyRow]:
    """Rescaled finite-N kernel against the limit kernel.

    Points default to every (tau1, xi1, tau2, xi2) with taus and xis from
    the grids.  With ``effective`` the limit kernel is evaluated at the
    coordinates the rounded lattice point actually represents.
    """
    if points is None:
        points = [(t1, x1, t2, x2) for t1, x1, t2, x2 in product(taus, xis, taus, xis)]
    points = list(points)
    alpha_q = to_fraction(alpha)
    rows = []
    limit_cache: dict[tuple, float] = {}
    for N in N_list:
        params = EdgeParams(float(alpha), float(omega), int(N))
        fk = FiniteNKernel(alpha_q, params.N, params.m)
        for pt in points:
            val, eff = scaled_finite_kernel(params, *pt, kernel=fk)
            key = eff if effective else (*pt, float(omega))
            if key not in limit_cache:
                limit_cache[key] = limit_kernel(*key)
            rows.append(StudyRow(params.N, *pt, float(omega), val, limit_cache[key]))
    return rows


STUDY_HEADER = ["N", "tau1", "xi1", "tau2", "xi2", "omega", "finite_value", "limit_value", "abs_diff"]


def _g17(x: float) -> str:
    return format(x, ".17g")


def write_study_csv(rows: Sequence[StudyRow], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(STUDY_HEADER)
    for r in rows:
        w.writerow([r.N] + [_g17(v) for v in (r.tau1, r.xi1, r.tau2, r.xi2, r.omega, r.finite_value, r.limit_value, r.abs_diff)])
