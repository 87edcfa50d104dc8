from __future__ import annotations

from fractions import Fraction
from itertools import product

import mpmath
import pytest

from schurkernel.process import ProcessSpec, uniform_spec
from schurkernel.symcore import Alphabet, Partition

F = Fraction


def ssyt_sum(lam, mu, a) -> Fraction:
    """Skew Schur function by enumerating semistandard tableaux (oracle)."""
    lam, mu = Partition(lam), Partition(mu)
    if not lam.contains(mu):
        return F(0)
    cells = [(i, j) for i in range(len(lam)) for j in range(mu[i], lam[i])]
    vars_ = list(Alphabet(a).vars)
    p = len(vars_)
    total = F(0)
    for fill in product(range(p), repeat=len(cells)):
        t = dict(zip(cells, fill))
        ok = all(
            (j == mu[i] or t[(i, j - 1)] <= t[(i, j)]) and ((i - 1, j) not in t or t[(i - 1, j)] < t[(i, j)])
            for (i, j) in cells
        )
        if ok:
            w = F(1)
            for v in fill:
                w *= vars_[v]
            total += w
    return total


def small_specs() -> list[ProcessSpec]:
    """Desk-scale family used by oracle comparisons."""
    h, t, q = F(1, 2), F(1, 3), F(1, 4)
    return [
        uniform_spec(1, [h], []),
        uniform_spec(1, [h], [1]),
        uniform_spec(1, [h], [2]),
        uniform_spec(1, [t], [2, 1]),
        ProcessSpec(1, [[h], [t], [q], [h]], []),
        ProcessSpec(1, [[h, t], [q], [t], [h]], [1]),
        ProcessSpec(1, [[t], [h, q], [h], [t]], [2]),
        ProcessSpec(1, [[h, q], [t], [h, t], [q]], [2, 1]),
        uniform_spec(2, [q], []),
        uniform_spec(2, [q], [1]),
        ProcessSpec(2, [[q], [t], [q], [t], [q], [t], [q], [t]], [2]),
        ProcessSpec(2, [[q, t], [q], [t], [q], [q], [t], [t], [q]], [2, 1]),
    ]


@pytest.fixture
def spec_mu1():
    return uniform_spec(1, [F(1, 2)], [1])


def maclaurin_ai(x, dps=60):
    """Ai from its power series at high precision (oracle)."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        c1 = 1 / (mpmath.cbrt(9) * mpmath.gamma(mpmath.mpf(2) / 3))
        c2 = 1 / (mpmath.cbrt(3) * mpmath.gamma(mpmath.mpf(1) / 3))
        f = g = mpmath.mpf(0)
        tf, tg = mpmath.mpf(1), x
        k = 0
        while abs(tf) + abs(tg) > mpmath.mpf(10) ** (-dps):
            f += tf
            g += tg
            tf *= x ** 3 / ((3 * k + 2) * (3 * k + 3))
            tg *= x ** 3 / ((3 * k + 3) * (3 * k + 4))
            k += 1
        return c1 * f - c2 * g
