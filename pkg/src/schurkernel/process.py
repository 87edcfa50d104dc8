"""The Schur process with a fixed final partition and its enumeration oracle.

A configuration is a sequence of partitions ``lambda^(1) .. lambda^(4N-1)``;
its weight is

    s_{l1}(a1) * prod_j s_{l(2j-1)/l(2j)}(a(2j)) s_{l(2j+1)/l(2j)}(a(2j+1))
               * s_{l(4N-1)/mu}(a(4N)).

Walker ``i`` sits at ``lambda_i - i + 1``.  Steps out of even times move
walkers up (alphabet with odd index), steps out of odd times move them down.

The oracle sums this weight exactly over every configuration inside a box
``lambda_1 <= L, length <= K``.  The sum is organised as a transfer-matrix
product over the box, which visits the same configurations as a literal
path enumeration (``iter_paths``) but shares common prefixes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

from .symcore import (
    EMPTY,
    Alphabet,
    Partition,
    concat,
    schur,
    skew_schur,
    complete_homogeneous,
)


class SpecError(ValueError):
    """A ProcessSpec (or its JSON form) violates its invariants."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class ProcessSpec:
    N: int
    alphabets: tuple[Alphabet, ...]
    final_partition: Partition = EMPTY

    def __init__(self, N: int, alphabets: Sequence, final_partition=EMPTY):
        if isinstance(N, bool) or not isinstance(N, int) or N < 1:
            raise SpecError("N", f"must be a positive integer, got {N!r}")
        alphs = []
        for i, a in enumerate(alphabets):
            try:
                alphs.append(a if isinstance(a, Alphabet) else Alphabet(a))
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise SpecError(f"alphabets[{i}]", str(exc)) from None
        if len(alphs) != 4 * N:
            raise SpecError("alphabets", f"need exactly 4N = {4 * N} alphabets, got {len(alphs)}")
        if not isinstance(final_partition, Partition):
            try:
                final_partition = Partition(final_partition)
            except (ValueError, TypeError) as exc:
                raise SpecError("mu", str(exc)) from None
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "alphabets", tuple(alphs))
        object.__setattr__(self, "final_partition", final_partition)

    @property
    def T(self) -> int:
        """Final time 4N."""
        return 4 * self.N

    @property
    def n(self) -> int:
        return len(self.final_partition)

    @property
    def endpoints(self) -> list[int]:
        """m_i = mu_i - i + 1 for i = 1..n (strictly decreasing)."""
        return self.final_partition.walker_positions(self.n)

    def alphabet(self, i: int) -> Alphabet:
        """a^(i), 1-based as in the weight formula."""
        if not 1 <= i <= self.T:
            raise IndexError(f"alphabet index {i} outside 1..{self.T}")
        return self.alphabets[i - 1]

    @property
    def odd_alphabet(self) -> Alphabet:
        """Concatenation a^(1), a^(3), ..., a^(4N-1): the up-step variables."""
        return concat(self.alphabets[0::2])

    @property
    def even_alphabet(self) -> Alphabet:
        """Concatenation a^(2), a^(4), ..., a^(4N): the down-step variables."""
        return concat(self.alphabets[1::2])

    @property
    def max_entry(self) -> Fraction:
        return max(a.max_entry for a in self.alphabets)

    def up_vars(self, r: int, s: int) -> tuple[Fraction, ...]:
        """Variables of the up steps between times r and s."""
        return tuple(v for t in range(r, s) if t % 2 == 0 for v in self.alphabets[t])

    def down_vars(self, r: int, s: int) -> tuple[Fraction, ...]:
        """Variables of the down steps between times r and s."""
        return tuple(v for t in range(r, s) if t % 2 == 1 for v in self.alphabets[t])

    @classmethod
    def from_dict(cls, data: dict) -> "ProcessSpec":
        if not isinstance(data, dict):
            raise SpecError("<root>", "expected a JSON object")
        for key in ("N", "alphabets"):
            if key not in data:
                raise SpecError(key, "missing")
        alphabets = data["alphabets"]
        if not isinstance(alphabets, list) or not all(isinstance(a, list) for a in alphabets):
            raise SpecError("alphabets", "expected a list of lists of rationals")
        for i, a in enumerate(alphabets):
            for j, v in enumerate(a):
                if not isinstance(v, (str, int)) or isinstance(v, bool):
                    raise SpecError(f"alphabets[{i}][{j}]", f"expected a rational string 'p/q', got {v!r}")
        mu = data.get("mu", [])
        if not isinstance(mu, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in mu):
            raise SpecError("mu", "expected a list of integers")
        return cls(data["N"], alphabets, mu)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "alphabets": [[str(v) for v in a] for a in self.alphabets],
            "mu": list(self.final_partition.parts),
        }


def load_spec(path) -> ProcessSpec:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecError("<json>", f"malformed JSON: {exc}") from None
    return ProcessSpec.from_dict(data)


def uniform_spec(N: int, alphabet, mu=()) -> ProcessSpec:
    """All 4N steps share one alphabet."""
    return ProcessSpec(N, [alphabet] * (4 * N), mu)


class CorrelationPoint(NamedTuple):
    time: int
    position: int


class TruncationBound(NamedTuple):
    L: int  # max first row
    K: int  # max length


class PathConfig(NamedTuple):
    partitions: tuple[Partition, ...]

    def walkers(self, t: int, count: int) -> list[int]:
        return self.partitions[t - 1].walker_positions(count)


class Truncated(NamedTuple):
    value: Fraction
    tail: Fraction


def occupied(lam: Partition, x: int) -> bool:
    """Is site x held by some walker of configuration lam?"""
    if x <= -len(lam):
        return True
    return any(lam[i] - i == x for i in range(len(lam)))


def transition_weight(spec: ProcessSpec, r: int, x: int, y: int) -> Fraction:
    """One-walker weight of moving from x at time r to y at time r+1."""
    if not 0 <= r < spec.T:
        raise ValueError(f"step index r={r} outside 0..{spec.T - 1}")
    a = spec.alphabets[r]
    return complete_homogeneous(y - x if r % 2 == 0 else x - y, a)


def path_weight(spec: ProcessSpec, path: PathConfig | Sequence[Partition]) -> Fraction:
    parts = path.partitions if isinstance(path, PathConfig) else tuple(path)
    if len(parts) != spec.T - 1:
        raise ValueError(f"path must have 4N-1 = {spec.T - 1} partitions")
    seq = (EMPTY,) + tuple(parts) + (spec.final_partition,)
    w = Fraction(1)
    for r in range(spec.T):
        lo, hi = seq[r], seq[r + 1]
        if r % 2 == 0:
            w *= skew_schur(hi, lo, spec.alphabets[r])
        else:
            w *= skew_schur(lo, hi, spec.alphabets[r])
        if w == 0:
            return w
    return w


def partitions_in_box(L: int, K: int) -> list[Partition]:
    """All partitions with lambda_1 <= L and length <= K, graded-lex order."""
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], cap: int):
        out.append(tuple(prefix))
        if len(prefix) == K:
            return
        for p in range(1, cap + 1):
            prefix.append(p)
            rec(prefix, p)
            prefix.pop()

    rec([], L)
    out.sort(key=lambda t: (sum(t), tuple(-x for x in t)))
    return [Partition(t) for t in out]


def _neighbours(lam: Partition, p: int, up: bool, L: int, K: int) -> list[Partition]:
    """Partitions reachable in one step whose skew shape has columns of height <= p."""
    out: list[Partition] = []
    rows = K if up else len(lam)
    cur: list[int] = []

    def rec(i: int, prev: int):
        if i == rows:
            out.append(Partition(cur))
            return
        if up:
            lo = lam[i]
            hi = min(prev, lam[i - p] if i >= p else L)
        else:
            lo = lam[i + p]
            hi = min(prev, lam[i])
        for v in range(lo, hi + 1):
            cur.append(v)
            rec(i + 1, v)
            cur.pop()

    rec(0, L)
    return out


class TruncatedProcess:
    """Exact sums over all configurations inside a (L, K) box."""

    def __init__(self, spec: ProcessSpec, cutoff: TruncationBound):
        L, K = cutoff
        mu = spec.final_partition
        if mu[0] > L or len(mu) > K:
            raise ValueError(f"cutoff {tuple(cutoff)} cannot contain the final partition {list(mu.parts)}")
        self.spec = spec
        self.cutoff = TruncationBound(L, K)
        self._steps: dict[int, list[list[tuple[int, Fraction]]]] = {}
        self.states = partitions_in_box(L, K)
        self.index = {lam: i for i, lam in enumerate(self.states)}
        self._z: Fraction | None = None

    def _step(self, r: int) -> list[list[tuple[int, Fraction]]]:
        """Sparse transfer rows for the step r -> r+1 (1 <= r <= 4N-2)."""
        if r not in self._steps:
            a = self.spec.alphabets[r]
            up = r % 2 == 0
            L, K = self.cutoff
            rows = []
            for lam in self.states:
                row = []
                for nu in _neighbours(lam, len(a), up, L, K):
                    w = skew_schur(nu, lam, a) if up else skew_schur(lam, nu, a)
                    if w:
                        row.append((self.index[nu], w))
                rows.append(row)
            self._steps[r] = rows
        return self._steps[r]

    def weighted_sum(self, points: Iterable[CorrelationPoint] = ()) -> Fraction:
        """Sum of path weights over box paths that occupy every point."""
        spec = self.spec
        by_time: dict[int, list[int]] = {}
        for pt in points:
            if not 1 <= pt.time <= spec.T - 1:
                raise ValueError(f"point time {pt.time} outside 1..{spec.T - 1}")
            by_time.setdefault(pt.time, []).append(pt.position)

        def mask(t: int, vec: list[Fraction]) -> None:
            for x in by_time.get(t, ()):
                for i, lam in enumerate(self.states):
                    if vec[i] and not occupied(lam, x):
                        vec[i] = Fraction(0)

        a1 = spec.alphabets[0]
        vec = [schur(lam, a1) for lam in self.states]
        mask(1, vec)
        for t in range(1, spec.T - 1):
            nxt = [Fraction(0)] * len(self.states)
            for i, row in enumerate(self._step(t)):
                vi = vec[i]
                if vi:
                    for j, w in row:
                        nxt[j] += vi * w
            vec = nxt
            mask(t + 1, vec)
        last = spec.alphabets[-1]
        mu = spec.final_partition
        return sum((v * skew_schur(lam, mu, last) for lam, v in zip(self.states, vec) if v), Fraction(0))

    @property
    def Z(self) -> Fraction:
        if self._z is None:
            self._z = self.weighted_sum()
        return self._z

    @property
    def tail(self) -> Fraction:
        """Total weight of configurations leaving the box (exact, >= 0)."""
        return partition_function_exact(self.spec) - self.Z

    def correlation(self, points: Sequence[CorrelationPoint]) -> Fraction:
        _check_distinct(points)
        if not points:
            return Fraction(1)
        return self.weighted_sum(points) / self.Z

    def correlation_tail(self) -> Fraction:
        """Bound on |R_true - R_truncated| valid for every point set."""
        return self.tail / self.Z


def _check_distinct(points: Sequence[CorrelationPoint]) -> None:
    if len(set(points)) != len(points):
        raise ValueError("correlation points must be pairwise distinct")


@lru_cache(maxsize=64)
def truncated_process(spec: ProcessSpec, cutoff: TruncationBound) -> TruncatedProcess:
    return TruncatedProcess(spec, TruncationBound(*cutoff))


def partition_function_exact(spec: ProcessSpec) -> Fraction:
    """Z = s_mu(odd alphabets) * prod_{i odd < j even} prod 1/(1 - x y).

    Obtained by moving every down step to the right of every up step with
    the skew Cauchy identity; used only to certify truncation tails.
    """
    z = schur(spec.final_partition, spec.odd_alphabet)
    for i in range(1, spec.T + 1, 2):
        for j in range(i + 1, spec.T + 1, 2):
            for x in spec.alphabet(i):
                for y in spec.alphabet(j):
                    z /= 1 - x * y
    return z


def partition_function(spec: ProcessSpec, cutoff: TruncationBound) -> Truncated:
    """Truncated partition function and the exact weight left outside the box."""
    tp = truncated_process(spec, TruncationBound(*cutoff))
    return Truncated(tp.Z, tp.tail)


def brute_force_correlation(spec: ProcessSpec, points: Sequence[CorrelationPoint], cutoff: TruncationBound) -> Fraction:
    """Occupation probability of all points, over configurations in the box."""
    points = [CorrelationPoint(*p) for p in points]
    _check_distinct(points)
    if not points:
        return Fraction(1)
    return truncated_process(spec, TruncationBound(*cutoff)).correlation(points)


def correlation_tail_bound(spec: ProcessSpec, cutoff: TruncationBound) -> Fraction:
    return truncated_process(spec, TruncationBound(*cutoff)).correlation_tail()


def iter_paths(spec: ProcessSpec, cutoff: TruncationBound) -> Iterator[tuple[PathConfig, Fraction]]:
    """Literal depth-first enumeration of nonzero-weight paths in the box.

    Exponential in 4N; meant for small boxes and for cross-checking
    ``TruncatedProcess``.
    """
    L, K = cutoff
    mu = spec.final_partition
    last = spec.alphabets[-1]
    first = [lam for lam in partitions_in_box(L, K) if schur(lam, spec.alphabets[0])]
    stack: list[Partition] = []

    def rec(t: int, w: Fraction):
        lam = stack[-1]
        if t == spec.T - 1:
            wf = w * skew_schur(lam, mu, last)
            if wf:
                yield PathConfig(tuple(stack)), wf
            return
        a = spec.alphabets[t]
        up = t % 2 == 0
        for nu in _neighbours(lam, len(a), up, L, K):
            step = skew_schur(nu, lam, a) if up else skew_schur(lam, nu, a)
            if step:
                stack.append(nu)
                yield from rec(t + 1, w * step)
                stack.pop()

    for lam in first:
        stack.append(lam)
        yield from rec(1, schur(lam, spec.alphabets[0]))
        stack.pop()
