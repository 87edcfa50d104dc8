"""The double-contour kernel at even times, exactly and by quadrature.

At times 2u1, 2u2 the kernel is

    (2 pi i)^-2 oint oint dz1/z1^(1+x1) dz2/z2^(1-x2) P1(z1) P2(z2)
        * ( z1/(z1 - z2) + S(z1, z2) )  -  phi_{2u1,2u2}(x1, x2)

with |z2| < |z1|,

    P1(z) = prod_{odd steps <= 2u1} (1 - a/z) / prod_{even steps > 2u1} (1 - b z),
    P2(z) = prod_{even steps > 2u2} (1 - b z) / prod_{odd steps <= 2u2} (1 - a/z),

and S the finite sum carried by the final partition (zero when it is
empty).  Writing f_k, g_k for the Laurent coefficients of P1, P2, the
first term is sum_{k>=0} f_{x1+k} g_{-x2-k}.  That series is infinite, but
its bilateral version is the single coefficient [z^(x1-x2)] P1 P2, and the
k < 0 part is finite because f_k vanishes below -#(odd variables <= 2u1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .kernel_linalg import c_matrix, phi_rs
from .laurent import laurent
from .process import ProcessSpec
from .symcore import Alphabet, TruncationError, cofactor_matrix, complete_homogeneous, det

ZERO = Fraction(0)


@dataclass(frozen=True)
class ContourSpec:
    r1: float
    r2: float
    nodes: int = 512

    def __post_init__(self):
        if not (self.r1 > 0 and self.r2 > 0):
            raise ValueError("radii must be positive")
        if not self.r2 < self.r1:
            raise ValueError(f"need r2 < r1, got r1={self.r1}, r2={self.r2}")
        n = self.nodes
        if n < 64 or n & (n - 1):
            raise ValueError(f"nodes must be a power of two >= 64, got {n}")

    def check_against(self, spec: ProcessSpec) -> None:
        """Reject radii that put a pole of the integrand on or across a contour."""
        amax = float(spec.max_entry)
        if amax > 0 and not (amax < self.r2 and self.r1 < 1 / amax):
            raise ValueError(f"contours must satisfy {amax} < r2 < r1 < {1 / amax}; got r2={self.r2}, r1={self.r1}")


def default_contour(spec: ProcessSpec, nodes: int = 512, safety: float = 0.9) -> ContourSpec:
    """r2 = sqrt(a_max), r1 = 1/sqrt(a_max), pulled toward 1 in log scale."""
    amax = float(spec.max_entry)
    r = math.exp(safety * 0.5 * math.log(amax))
    return ContourSpec(1 / r, r, nodes)


@dataclass
class PinnedTermData:
    """Pieces of the final-partition term S."""

    a: tuple[Fraction, ...]  # concatenated up-step variables
    endpoints: list[int]
    cofactors: list[list[Fraction]]
    norm: Fraction  # s_mu(a) = det C

    def h(self, k: int) -> Fraction:
        return complete_homogeneous(k, Alphabet(self.a))


def pinned_term_data(spec: ProcessSpec) -> PinnedTermData:
    mu = spec.final_partition
    m = spec.endpoints
    if tuple(m[i] + i for i in range(len(m))) != mu.parts:
        raise AssertionError("final partition is not (m_1, m_2 + 1, ..., m_n + n - 1)")
    if not m:
        return PinnedTermData(spec.odd_alphabet.vars, [], [], Fraction(1))
    C = c_matrix(spec)
    norm = det(C)
    if norm == 0:
        raise ValueError("s_mu vanishes on the up-step variables")
    return PinnedTermData(spec.odd_alphabet.vars, m, cofactor_matrix(C), norm)


def _split_vars(spec: ProcessSpec, u1: int, u2: int):
    odd1 = tuple(sorted(spec.up_vars(0, 2 * u1)))
    even1 = tuple(sorted(spec.down_vars(2 * u1, spec.T)))
    odd2 = tuple(sorted(spec.up_vars(0, 2 * u2)))
    even2 = tuple(sorted(spec.down_vars(2 * u2, spec.T)))
    return odd1, even1, odd2, even2


def _check_u(spec: ProcessSpec, *us: int) -> None:
    for u in us:
        if not 1 <= u <= 2 * spec.N - 1:
            raise ValueError(f"u={u} outside 1..{2 * spec.N - 1}")


def kernel_exact_extract(spec: ProcessSpec, u1: int, x1: int, u2: int, x2: int, maxdeg: int) -> Fraction:
    """K(2u1, x1; 2u2, x2) from the contour formula, by exact coefficient extraction."""
    _check_u(spec, u1, u2)
    mu = spec.final_partition
    need = abs(x1) + abs(x2) + mu[0] + spec.n
    if maxdeg < need:
        raise TruncationError(f"maxdeg={maxdeg} below the required {need}")
    odd1, even1, odd2, even2 = _split_vars(spec, u1, u2)
    P1 = laurent(up=even1, down_inv=odd1)  # f
    P2 = laurent(down=odd2, up_inv=even2)  # g
    # P1 P2 as one Laurent series; common factors cancel exactly
    up, down, up_inv, down_inv = _cancel(even1, odd2, even2, odd1)
    total = laurent(up=up, down=down, up_inv=up_inv, down_inv=down_inv)[x1 - x2]
    for k in range(-x1 - len(odd1), 0):
        total -= P1[x1 + k] * P2[-x2 - k]
    data = pinned_term_data(spec)
    if data.endpoints:
        extra = ZERO
        n = len(data.endpoints)
        for j, mj in enumerate(data.endpoints):
            for lp in range(mj):
                f = P1[x1 - mj + lp]
                if not f:
                    continue
                inner = sum((data.cofactors[b][j] * P2[-x2 - b] for b in range(n)), ZERO)
                extra += data.h(lp) * f * inner
        total += extra / data.norm
    return total - phi_rs(spec, 2 * u1, 2 * u2, x1, x2, maxdeg)


def _cancel(up, down, up_inv, down_inv):
    """Cancel equal parameters between 1/(1-az) and (1-az), and likewise in 1/z."""
    up, up_inv = _cancel_pair(up, up_inv)
    down, down_inv = _cancel_pair(down, down_inv)
    return up, down, up_inv, down_inv


def _cancel_pair(den, num):
    den, num = list(den), list(num)
    for v in list(num):
        if v in den:
            den.remove(v)
            num.remove(v)
    return tuple(sorted(den)), tuple(sorted(num))


@dataclass
class QuadratureResult:
    value: float
    imag: float
    nodes: int


def _prod_terms(z: np.ndarray, vals, inverse_arg: bool) -> np.ndarray:
    out = np.ones_like(z)
    for v in vals:
        out = out * (1 - float(v) / z if inverse_arg else 1 - float(v) * z)
    return out


def _circle(r: float, n: int) -> np.ndarray:
    return r * np.exp(2j * np.pi * np.arange(n) / n)


def kernel_tilde_quadrature(spec: ProcessSpec, u1: int, x1: int, u2: int, x2: int, contour: ContourSpec) -> complex:
    _check_u(spec, u1, u2)
    contour.check_against(spec)
    odd1, even1, odd2, even2 = _split_vars(spec, u1, u2)
    n = contour.nodes
    z1 = _circle(contour.r1, n)
    z2 = _circle(contour.r2, n)
    # dz/(2 pi i z) becomes the plain mean over nodes
    F1 = z1 ** (-x1) * _prod_terms(z1, odd1, True) / _prod_terms(z1, even1, False)
    F2 = z2 ** x2 * _prod_terms(z2, even2, False) / _prod_terms(z2, odd2, True)
    cauchy = z1[:, None] / (z1[:, None] - z2[None, :])
    value = F1 @ cauchy @ F2 / (n * n)
    data = pinned_term_data(spec)
    if data.endpoints:
        m = len(data.endpoints)
        pow1 = [np.mean(F1 * z1 ** (mj - lp)) for mj in data.endpoints for lp in range(mj)]
        pow2 = [np.mean(F2 * z2 ** b) for b in range(m)]
        extra = 0j
        idx = 0
        for j, mj in enumerate(data.endpoints):
            for lp in range(mj):
                inner = sum(float(data.cofactors[b][j]) * pow2[b] for b in range(m))
                extra += float(data.h(lp)) * pow1[idx] * inner
                idx += 1
        value += extra / float(data.norm)
    return complex(value)


def phi_contour(spec: ProcessSpec, u1: int, u2: int, x1: int, x2: int, contour: ContourSpec | None = None) -> float:
    """phi_{2u1,2u2}(x1, x2) by the trapezoid rule on the unit circle."""
    if u1 >= u2:
        return 0.0
    nodes = contour.nodes if contour is not None else 512
    up = spec.up_vars(2 * u1, 2 * u2)
    down = spec.down_vars(2 * u1, 2 * u2)
    z = _circle(1.0, nodes)
    vals = z ** (x1 - x2) / (_prod_terms(z, up, False) * _prod_terms(z, down, True))
    return float(np.mean(vals).real)


def kernel_quadrature(spec: ProcessSpec, u1: int, x1: int, u2: int, x2: int, contour: ContourSpec | None = None) -> QuadratureResult:
    """Trapezoid rule on both circles; ``imag`` is the size of the spurious imaginary part."""
    if contour is None:
        contour = default_contour(spec)
    kt = kernel_tilde_quadrature(spec, u1, x1, u2, x2, contour)
    phi = phi_contour(spec, u1, u2, x1, x2, contour)
    return QuadratureResult(kt.real - phi, abs(kt.imag), contour.nodes)
