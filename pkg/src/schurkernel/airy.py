"""Airy function Ai and its derivative in double precision.

On [-12, 12] values come from a short Taylor step off the nearest of a
grid of centres (spacing 1/4) whose Ai, Ai' are computed once with
mpmath at 40 digits; the coefficients follow from Ai'' = x Ai.  Outside
that window the standard asymptotic expansions are used, whose error at
|x| = 12 is far below double precision.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np

_LO, _HI, _STEP = -12.0, 12.0, 0.25
_TERMS = 22


@lru_cache(maxsize=1)
def _centres() -> tuple[np.ndarray, np.ndarray]:
    """Taylor coefficients a_k(x0) of Ai around every centre, shape (n, _TERMS)."""
    xs = np.arange(_LO, _HI + _STEP / 2, _STEP)
    coef = np.zeros((len(xs), _TERMS))
    with mpmath.workdps(40):
        for row, x0 in enumerate(xs):
            a = [mpmath.airyai(x0), mpmath.airyai(x0, derivative=1)]
            a.append(x0 * a[0] / 2)
            for k in range(1, _TERMS - 2):
                a.append((x0 * a[k] + a[k - 1]) / ((k + 1) * (k + 2)))
            coef[row] = [float(c) for c in a[:_TERMS]]
    return xs, coef


@lru_cache(maxsize=1)
def _uv(count: int = 12) -> tuple[list[float], list[float]]:
    u = [1.0]
    for k in range(1, count):
        u.append(math.exp(math.lgamma(3 * k + 0.5) - math.lgamma(k + 0.5) - math.lgamma(k + 1) - k * math.log(54)))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, count)]
    return u, v


def _asym_pos(x: np.ndarray, deriv: bool) -> np.ndarray:
    u, v = _uv()
    zeta = 2.0 / 3.0 * x ** 1.5
    c = v if deriv else u
    s = sum((-1) ** k * c[k] * zeta ** (-k) for k in range(len(c)))
    pre = np.exp(-zeta) / (2 * math.sqrt(math.pi))
    return -pre * x ** 0.25 * s if deriv else pre * x ** -0.25 * s


def _asym_neg(x: np.ndarray, deriv: bool) -> np.ndarray:
    u, v = _uv()
    t = -x
    zeta = 2.0 / 3.0 * t ** 1.5
    c = v if deriv else u
    even = sum((-1) ** k * c[2 * k] * zeta ** (-2 * k) for k in range(len(c) // 2))
    odd = sum((-1) ** k * c[2 * k + 1] * zeta ** (-2 * k - 1) for k in range(len(c) // 2))
    ph = zeta - math.pi / 4
    if deriv:
        return t ** 0.25 / math.sqrt(math.pi) * (np.sin(ph) * even - np.cos(ph) * odd)
    return t ** -0.25 / math.sqrt(math.pi) * (np.cos(ph) * even + np.sin(ph) * odd)


def _eval(x, deriv: bool):
    arr = np.asarray(x, dtype=float)
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    mid = (flat >= _LO) & (flat <= _HI)
    if mid.any():
        xs, coef = _centres()
        xm = flat[mid]
        idx = np.clip(np.rint((xm - _LO) / _STEP).astype(int), 0, len(xs) - 1)
        h = xm - xs[idx]
        c = coef[idx]
        acc = np.zeros_like(xm)
        if deriv:
            for k in range(_TERMS - 1, 0, -1):
                acc = acc * h + k * c[:, k]
        else:
            for k in range(_TERMS - 1, -1, -1):
                acc = acc * h + c[:, k]
        out[mid] = acc
    hi = flat > _HI
    if hi.any():
        out[hi] = _asym_pos(flat[hi], deriv)
    lo = flat < _LO
    if lo.any():
        out[lo] = _asym_neg(flat[lo], deriv)
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def airy(x):
    """Ai(x) for a float or an array."""
    return _eval(x, False)


def airy_prime(x):
    """Ai'(x) for a float or an array."""
    return _eval(x, True)
