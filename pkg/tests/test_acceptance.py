"""Acceptance criteria 1-8, each at its stated tolerance.

Every test prints one PASS/FAIL line before asserting.  Criteria whose
stated target does not hold for the implemented mathematics fail here
rather than being relaxed.
"""

from __future__ import annotations

import time
from fractions import Fraction

import numpy as np
import pytest

from schurkernel.airy import airy, airy_prime
from schurkernel.edge import (
    SaddleData,
    convergence_study,
    extended_airy_kernel,
    limit_kernel,
)
from schurkernel.kernel_contour import default_contour, kernel_exact_extract, kernel_quadrature
from schurkernel.kernel_linalg import (
    c_matrix,
    correlation_determinant,
    default_M,
    kernel_finite,
    structured_inverse,
    verify_inverse_series,
)
from schurkernel.process import (
    CorrelationPoint,
    ProcessSpec,
    TruncationBound,
    brute_force_correlation,
    correlation_tail_bound,
    uniform_spec,
)
from schurkernel.symcore import cofactor_matrix, det, schur

from conftest import maclaurin_ai, small_specs

F = Fraction


@pytest.fixture
def report(capsys):
    def emit(k: int, ok: bool, detail: str, elapsed: float, budget: float):
        ok_time = elapsed <= budget
        status = "PASS" if ok and ok_time else "FAIL"
        with capsys.disabled():
            print(f"\n[acceptance {k}] {status}: {detail} ({elapsed:.1f}s of {budget:.0f}s)")
        assert ok, detail
        assert ok_time, f"runtime {elapsed:.1f}s over budget {budget:.0f}s"
    return emit


def test_criterion_1_oracle_equivalence(report):
    t0 = time.perf_counter()
    specs = small_specs()
    worst = None
    checked = 0
    bad = []
    for spec in specs:
        box = TruncationBound(6, 3) if spec.N == 1 else TruncationBound(4, 3)
        tail = correlation_tail_bound(spec, box)
        T = spec.T
        queries = [[(1, 0)], [(2, 1)], [(T - 1, -1)], [(2, 0), (2, -1)], [(1, 1), (3, 0)], [(T - 1, 0), (2, -2)]]
        for q in queries:
            pts = [CorrelationPoint(*p) for p in q]
            d = correlation_determinant(spec, pts, default_M(spec, pts), 60)
            o = brute_force_correlation(spec, pts, box)
            gap = abs(d - o)
            checked += 1
            if gap > tail:
                bad.append((spec, q, float(gap), float(tail)))
            ratio = gap / tail if tail else F(0)
            worst = ratio if worst is None or ratio > worst else worst
    detail = f"{len(specs)} specs, {checked} queries, max |det - oracle| / tail = {float(worst):.3f}"
    if bad:
        detail += f"; {len(bad)} exceed the tail, first {bad[0][1:]}"
    report(1, not bad and len(specs) >= 12, detail, time.perf_counter() - t0, 120)


def test_criterion_2_contour_exactness(report):
    t0 = time.perf_counter()
    specs = [
        uniform_spec(1, ["1/2"], [1]),
        ProcessSpec(1, [["1/2", "1/3"], ["1/4"], ["1/3"], ["1/2"]], [2, 1]),
        ProcessSpec(2, [["1/3"], ["1/4"], ["1/2"], ["1/3"], ["1/4"], ["1/2", "1/5"], ["1/3"], ["1/4"]], [3, 1]),
        uniform_spec(2, ["1/4"], [2]),
        uniform_spec(1, ["1/3"]),
    ]
    n = 0
    mism = []
    for spec in specs:
        for u1 in range(1, 2 * spec.N):
            for u2 in range(1, 2 * spec.N):
                for x1, x2 in [(0, 0), (1, -1), (-2, 1), (3, 2), (-1, -3)]:
                    a = kernel_exact_extract(spec, u1, x1, u2, x2, 40)
                    b = kernel_finite(spec, 2 * u1, x1, 2 * u2, x2, 12, 60)
                    n += 1
                    if a != b:
                        mism.append((spec.final_partition, u1, x1, u2, x2))
    report(2, not mism and n >= 40, f"{n} combinations, {len(mism)} mismatches", time.perf_counter() - t0, 120)


def test_criterion_3_inverse_identities(report):
    t0 = time.perf_counter()
    specs = [
        uniform_spec(1, ["1/2"], [1]),
        uniform_spec(1, ["1/2"], [2, 1]),
        ProcessSpec(1, [["1/2", "1/3"], ["1/4"], ["1/3"], ["1/2"]], [2, 1]),
        ProcessSpec(1, [["1/3"], ["1/2"], ["1/4", "1/5"], ["1/3"]], [3]),
        ProcessSpec(1, [["1/2"], ["1/3"], ["1/2", "1/4"], ["1/3"]], [2, 2]),
        ProcessSpec(2, [["1/3"], ["1/4"], ["1/2"], ["1/3"], ["1/4"], ["1/2", "1/5"], ["1/3"], ["1/4"]], [3, 1]),
        uniform_spec(2, ["1/4"], [1]),
    ]
    fails = []
    for spec in specs:
        rep = verify_inverse_series(spec, 12, 12)
        if not rep.ok:
            fails.append(("inverse generating function", spec, rep.mismatches[0]))
        C = c_matrix(spec)
        b0 = det(C)
        if b0 != schur(spec.final_partition, spec.odd_alphabet):
            fails.append(("det C", spec))
        cof = cofactor_matrix(C)
        n = spec.n
        for a in range(n):
            for b in range(n):
                if sum(C[a][j] * cof[b][j] for j in range(n)) != (b0 if a == b else 0):
                    fails.append(("cofactor expansion", spec, a, b))
        if structured_inverse(spec, 60).b0 != b0:
            fails.append(("b0", spec))
    detail = f"{len(specs)} specs with n in {{1,2}} to bidegree (12,12), {len(fails)} failures"
    report(3, not fails and all(s.n in (1, 2) for s in specs), detail, time.perf_counter() - t0, 60)


def test_criterion_4_quadrature(report):
    t0 = time.perf_counter()
    specs = [
        uniform_spec(1, ["1/2"], [1]),
        ProcessSpec(1, [["1/2", "1/3"], ["1/4"], ["1/3"], ["1/2"]], [2, 1]),
        ProcessSpec(2, [["1/3"], ["1/4"], ["1/2"], ["1/3"], ["1/4"], ["1/2", "1/5"], ["1/3"], ["1/4"]], [3, 1]),
    ]
    err = dbl = drift = 0.0
    for spec in specs:
        c512 = default_contour(spec, 512)
        c1024 = default_contour(spec, 1024)
        c_alt = default_contour(spec, 512, safety=0.6)
        for u1 in range(1, 2 * spec.N):
            for u2 in range(1, 2 * spec.N):
                for x1, x2 in [(0, 0), (2, -1), (-1, 2)]:
                    exact = float(kernel_exact_extract(spec, u1, x1, u2, x2, 40))
                    q = kernel_quadrature(spec, u1, x1, u2, x2, c512).value
                    err = max(err, abs(q - exact))
                    dbl = max(dbl, abs(q - kernel_quadrature(spec, u1, x1, u2, x2, c1024).value))
                    drift = max(drift, abs(q - kernel_quadrature(spec, u1, x1, u2, x2, c_alt).value))
    ok = err <= 1e-9 and dbl <= 1e-12 and drift <= 1e-10
    detail = f"max error {err:.2e} (<=1e-9), doubling {dbl:.2e} (<=1e-12), radius drift {drift:.2e} (<=1e-10)"
    report(4, ok, detail, time.perf_counter() - t0, 60)


def test_criterion_5_airy(report):
    t0 = time.perf_counter()
    ai0 = abs(airy(0.0) - float(maclaurin_ai(0)))
    lo, hi = -2.5, -2.2
    for _ in range(50):
        mid = (lo + hi) / 2
        if maclaurin_ai(lo) * maclaurin_ai(mid) <= 0:
            hi = mid
        else:
            lo = mid
    # first zero of our Ai by bisection, compared with the oracle's
    a, b = -2.5, -2.2
    for _ in range(60):
        m = (a + b) / 2
        if airy(a) * airy(m) <= 0:
            b = m
        else:
            a = m
    zero = abs(a - lo)
    h = 1e-3
    ode = max(abs((airy(x + h) - 2 * airy(x) + airy(x - h)) / h ** 2 - x * airy(x)) for x in np.arange(-5, 5.01, 0.25))
    diag = abs(extended_airy_kernel(0.0, 0.0, 0.0, 0.0) - float(airy_prime(0.0)) ** 2)
    xs = np.linspace(-5, 3, 17)
    G = np.array([[extended_airy_kernel(0.0, p, 0.0, q) for q in xs] for p in xs])
    eig = float(np.linalg.eigvalsh((G + G.T) / 2).min())
    ok = ai0 <= 1e-9 and zero <= 1e-9 and ode <= 1e-6 and diag <= 1e-8 and eig >= -1e-8
    detail = f"|Ai(0)| err {ai0:.1e}, first zero err {zero:.1e}, ODE residual {ode:.1e}, diagonal err {diag:.1e}, min Gram eig {eig:.1e}"
    report(5, ok, detail, time.perf_counter() - t0, 30)


def test_criterion_6_limit_kernel_structure(report):
    t0 = time.perf_counter()
    gap = 0.0
    for tau, x1, x2 in [(0.0, 0.0, 0.0), (0.5, -1.0, 0.5), (-0.5, 1.0, -0.5)]:
        gap = max(gap, abs(limit_kernel(tau, x1, tau, x2, -tau + 1e-6) - limit_kernel(tau, x1, tau, x2, -tau - 1e-6)))
    red = 0.0
    for t1, x1, t2, x2 in [(0.0, 0.0, 0.0, 0.0), (0.5, -1.0, 0.0, 1.0), (-0.5, 0.5, 0.5, -0.5), (0.0, 1.0, 0.0, -1.0)]:
        red = max(red, abs(limit_kernel(t1, x1, t2, x2, -10.0) - extended_airy_kernel(t1, x1, t2, x2)))
    ok = gap <= 1e-5 and red <= 1e-6
    detail = f"branch gap {gap:.1e} (<=1e-5), omega=-10 distance to extended Airy kernel {red:.1e} (<=1e-6)"
    report(6, ok, detail, time.perf_counter() - t0, 30)


def test_criterion_7_edge_convergence(report):
    t0 = time.perf_counter()
    Ns = [50, 100, 200]
    failures = []
    total = 0
    for omega in (-1.0, 0.0, 1.0):
        rows = convergence_study(0.3, omega, [0.0], [-1.0, 0.0, 1.0], Ns)
        series: dict[tuple, list[float]] = {}
        for r in rows:
            series.setdefault((r.xi1, r.xi2), []).append(r.abs_diff)
        for key, diffs in series.items():
            total += 1
            if not all(diffs[i] > diffs[i + 1] for i in range(len(diffs) - 1)):
                failures.append((omega, key, [f"{d:.5f}" for d in diffs]))
    detail = f"{total - len(failures)}/{total} grid points strictly decrease over N={Ns}"
    if failures:
        detail += "; not decreasing: " + ", ".join(f"omega={o} xi={k} {d}" for o, k, d in failures)
    report(7, not failures, detail, time.perf_counter() - t0, 600)


def test_criterion_8_saddle_geometry(report):
    t0 = time.perf_counter()
    worst_d1 = worst_d2 = worst_g = worst_f3 = 0.0
    where = None
    for alpha in (0.2, 0.3, 0.5):
        for beta in np.linspace(-0.3, 0.3, 13):
            s = SaddleData(alpha, float(beta))
            worst_d1 = max(worst_d1, abs(s.f(s.z_c, 1)))
            worst_d2 = max(worst_d2, abs(s.f(s.z_c, 2)))
            worst_g = max(worst_g, abs(s.g(s.w_c, 1)))
            rel = abs(s.f(s.z_c, 3) / s.f3_claimed - 1)
            if rel > worst_f3:
                worst_f3, where = rel, (alpha, round(float(beta), 3))
    ok = worst_d1 <= 1e-6 and worst_d2 <= 1e-6 and worst_g <= 1e-6 and worst_f3 <= 1e-6
    detail = (f"|f'| {worst_d1:.1e}, |f''| {worst_d2:.1e}, |g'| {worst_g:.1e}, "
              f"f''' relative error {worst_f3:.2e} (<=1e-6) worst at (alpha, beta)={where}")
    report(8, ok, detail, time.perf_counter() - t0, 10)
