"""Command-line front end: correlate | verify | edge.

Exit codes: 0 success, 2 invalid input, 3 truncation too small,
4 an identity check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from contextlib import contextmanager
from fractions import Fraction

from . import kernel_linalg as kl
from .kernel_contour import default_contour, kernel_exact_extract, kernel_quadrature
from .edge import EdgeParams, convergence_study, write_study_csv
from .laurent import laurent
from .process import (
    CorrelationPoint,
    SpecError,
    TruncationBound,
    brute_force_correlation,
    correlation_tail_bound,
    load_spec,
)
from .symcore import Partition, TruncationError, c_series, d_series, schur

EXIT_OK, EXIT_INPUT, EXIT_TRUNC, EXIT_IDENTITY = 0, 2, 3, 4


class InputError(ValueError):
    pass


class IdentityFailure(RuntimeError):
    pass


def fmt_rational(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def parse_point(text: str) -> CorrelationPoint:
    try:
        t, x = text.split(":")
        return CorrelationPoint(int(t), int(x))
    except ValueError:
        raise InputError(f"--point: expected TIME:POSITION, got {text!r}") from None


def parse_floats(text: str, flag: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise InputError(f"{flag}: empty list")
    return vals


def parse_ints(text: str, flag: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{flag}: expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise InputError(f"{flag}: empty list")
    return vals


@contextmanager
def _sink(path):
    """Data goes to --out if given, otherwise to stdout."""
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _say(args, msg: str) -> None:
    # the summary must not mix with CSV written to stdout
    print(msg, file=sys.stdout if args.out else sys.stderr)


def _positive(name: str, value, minimum: int = 1) -> None:
    if value is not None and value < minimum:
        raise InputError(f"{name}: must be >= {minimum}, got {value}")


# correlate ---------------------------------------------------------------------------


def default_maxdeg(spec, points, M: int) -> int:
    reach = max((abs(p.position) for p in points), default=0)
    nvars = sum(len(a) for a in spec.alphabets)
    return 2 * reach + M + nvars + spec.final_partition[0] + spec.n + 10


def cmd_correlate(args) -> int:
    spec = load_spec(args.spec)
    points = [parse_point(p) for p in args.point or []]
    for p in points:
        if not 1 <= p.time <= spec.T - 1:
            raise InputError(f"--point: time {p.time} outside 1..{spec.T - 1}")
    if len(set(points)) != len(points):
        raise InputError("--point: points must be pairwise distinct")
    _positive("--M", args.M)
    _positive("--maxdeg", args.maxdeg, 0)
    if args.oracle:
        _positive("--L", args.L, 0)
        _positive("--K", args.K, 0)
    M = args.M if args.M is not None else kl.default_M(spec, points)
    maxdeg = args.maxdeg if args.maxdeg is not None else default_maxdeg(spec, points, M)
    value = kl.correlation_determinant(spec, points, M, maxdeg)
    oracle = tail = ""
    if args.oracle:
        cutoff = TruncationBound(args.L, args.K)
        if spec.final_partition[0] > args.L or spec.n > args.K:
            raise TruncationError(f"box L={args.L}, K={args.K} does not contain the final partition")
        ov = brute_force_correlation(spec, points, cutoff)
        tb = correlation_tail_bound(spec, cutoff)
        oracle, tail = fmt_rational(ov), fmt_rational(tb)
        if abs(ov - value) > tb:
            _say(args, f"warning: |det - oracle| = {float(abs(ov - value)):.3e} exceeds tail bound {float(tb):.3e}")
    with _sink(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["points", "value", "oracle", "tail_bound"])
        w.writerow([";".join(f"{p.time}:{p.position}" for p in points), fmt_rational(value), oracle, tail])
    _say(args, f"R = {float(value):.17g} over {len(points)} point(s), M={M}, maxdeg={maxdeg}")
    return EXIT_OK


# verify ------------------------------------------------------------------------------


def _check(report: list[str], name: str, ok: bool, detail: str = "") -> None:
    report.append(f"{name}: {'ok' if ok else 'FAILED'}{' (' + detail + ')' if detail else ''}")
    if not ok:
        raise IdentityFailure(f"{name} failed: {detail}")


def verify_all(spec, deg: int, report: list[str]) -> None:
    rep = kl.verify_inverse_series(spec, deg, deg)
    first = ""
    if rep.mismatches:
        e1, e2, lhs, rhs = rep.mismatches[0]
        first = f"first difference at z1^{e1} z2^{e2}: {lhs} != {rhs}"
    _check(report, "inverse generating function", rep.ok, first or f"{rep.checked} coefficients to degree ({deg},{deg})")

    if spec.n == 0:
        report.append("final partition empty: second term vanishes, inverse is A' itself")
    else:
        si = kl.structured_inverse(spec, spec.final_partition[0] + deg + spec.n + 10)
        s = schur(spec.final_partition, spec.odd_alphabet)
        _check(report, "det C = s_mu", si.b0 == s, f"{si.b0} vs {s}")
        C = si.matC
        n = spec.n
        for a in range(n):
            for b in range(n):
                v = sum((C[a][j] * si.cofactors[b][j] for j in range(n)), Fraction(0))
                want = si.b0 if a == b else 0
                _check_quiet(v == want, f"cofactor expansion row {a + 1}, cofactor row {b + 1}: {v} != {want}")
        report.append("cofactor expansion: ok")
        for b, j, cof, sk in kl.cofactor_schur_check(spec):
            _check_quiet(cof == sk, f"cofactor ({b},{j}) = {cof} but skew Schur gives {sk}")
        report.append("cofactors as skew Schur functions: ok")

    _check(report, "phi semigroup", *phi_semigroup(spec, deg))
    for name, alph in (("odd", spec.odd_alphabet), ("even", spec.even_alphabet)):
        c, d = c_series(deg, [alph]), d_series(deg, [alph])
        conv = [sum((c[i] * d[k - i] for i in range(k + 1)), Fraction(0)) for k in range(deg + 1)]
        bad = [k for k, v in enumerate(conv) if v != (1 if k == 0 else 0)]
        _check(report, f"c*d = 1 ({name} steps)", not bad, f"coefficient {bad[0]} is {conv[bad[0]]}" if bad else "")


def _check_quiet(ok: bool, detail: str) -> None:
    if not ok:
        raise IdentityFailure(detail)


def phi_semigroup(spec, deg: int) -> tuple[bool, str]:
    """phi_{r,t} = phi_{r,s} * phi_{s,t}, as exact composition of the two
    one-sided series that make up each transition generating function."""
    T = spec.T
    checked = 0
    for r in range(T - 1):
        for s in range(r + 1, T):
            for t in range(s + 1, T + 1):
                for side in ("up", "down"):
                    pick = spec.up_vars if side == "up" else spec.down_vars
                    a = laurent(up=tuple(sorted(pick(r, s))))
                    b = laurent(up=tuple(sorted(pick(s, t))))
                    ab = laurent(up=tuple(sorted(pick(r, t))))
                    for k in range(deg + 1):
                        v = sum((a[i] * b[k - i] for i in range(k + 1)), Fraction(0))
                        if v != ab[k]:
                            return False, f"({r},{s},{t}) {side} coefficient {k}: {v} != {ab[k]}"
                        checked += 1
    return True, f"{checked} coefficients"


def quadrature_check(spec, nodes: int, tol: float = 1e-9) -> tuple[bool, str]:
    """Trapezoid-rule kernel against exact extraction at every even time."""
    contour = default_contour(spec, nodes)
    worst = 0.0
    for u1 in range(1, 2 * spec.N):
        for u2 in range(1, 2 * spec.N):
            for x1 in range(-2, 3):
                for x2 in range(-2, 3):
                    exact = kernel_exact_extract(spec, u1, x1, u2, x2, 4 + spec.final_partition[0] + spec.n)
                    q = kernel_quadrature(spec, u1, x1, u2, x2, contour)
                    err = abs(q.value - float(exact))
                    if err > tol:
                        return False, f"K(2*{u1},{x1}; 2*{u2},{x2}) off by {err:.3e}"
                    worst = max(worst, err)
    return True, f"max error {worst:.2e} at {nodes} nodes"


def cmd_verify(args) -> int:
    spec = load_spec(args.spec)
    _positive("--maxdeg", args.maxdeg, 0)
    deg = args.maxdeg if args.maxdeg is not None else 12
    if args.nodes is not None and (args.nodes < 64 or args.nodes & (args.nodes - 1)):
        raise InputError(f"--nodes: must be a power of two >= 64, got {args.nodes}")
    report: list[str] = []
    try:
        verify_all(spec, deg, report)
        if args.nodes is not None:
            _check(report, "contour quadrature", *quadrature_check(spec, args.nodes))
    except IdentityFailure as exc:
        for line in report:
            print(line)
        print(f"FAILED: {exc}")
        return EXIT_IDENTITY
    for line in report:
        print(line)
    print("all identities hold")
    return EXIT_OK


# edge --------------------------------------------------------------------------------


def cmd_edge(args) -> int:
    alpha = args.alpha
    if not 0 < alpha < 1:
        raise InputError(f"--alpha: must lie in (0, 1), got {alpha}")
    N_list = parse_ints(args.N_list, "--N-list")
    taus = parse_floats(args.tau, "--tau")
    xis = parse_floats(args.xi, "--xi")
    for N in N_list:
        if N < 1:
            raise InputError(f"--N-list: N must be positive, got {N}")
        params = EdgeParams(alpha, args.omega, N)
        try:
            params.m
            for tau in taus:
                for xi in xis:
                    params.point(tau, xi)
        except ValueError as exc:
            raise InputError(f"--N-list: {exc}") from None
    rows = convergence_study(alpha, args.omega, taus, xis, N_list)
    buf = io.StringIO()
    write_study_csv(rows, buf)
    with _sink(args.out) as fh:
        fh.write(buf.getvalue())
    worst = {}
    for r in rows:
        worst[r.N] = max(worst.get(r.N, 0.0), r.abs_diff)
    for N in N_list:
        _say(args, f"N={N}: max |finite - limit| = {worst[N]:.6g}")
    return EXIT_OK


# entry -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schurkernel", description="Schur process with a fixed final partition")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("correlate", help="correlation function by the kernel determinant")
    p.add_argument("--spec", required=True)
    p.add_argument("--point", action="append", metavar="TIME:POS", help="repeatable")
    p.add_argument("--M", type=int, help="start-index bound for the kernel sum")
    p.add_argument("--maxdeg", type=int, help="largest series degree allowed")
    p.add_argument("--oracle", action="store_true", help="also enumerate configurations in a box")
    p.add_argument("--L", type=int, default=8, help="oracle box: largest first row")
    p.add_argument("--K", type=int, default=4, help="oracle box: largest length")
    p.add_argument("--out")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("verify", help="check the exact identities behind the kernel")
    p.add_argument("--spec", required=True)
    p.add_argument("--maxdeg", type=int, help="series degree for the checks (default 12)")
    p.add_argument("--nodes", type=int, help="also check contour quadrature with this many nodes")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("edge", help="finite-N kernel against its edge limit")
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--N-list", dest="N_list", default="50,100,200")
    p.add_argument("--tau", default="0")
    p.add_argument("--xi", default="-1,0,1")
    p.add_argument("--out")
    p.set_defaults(func=cmd_edge)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TruncationError as exc:
        print(f"truncation: {exc}", file=sys.stderr)
        return EXIT_TRUNC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
