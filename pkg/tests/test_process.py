from __future__ import annotations

import json
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from schurkernel.process import (
    CorrelationPoint,
    PathConfig,
    ProcessSpec,
    SpecError,
    TruncationBound,
    brute_force_correlation,
    correlation_tail_bound,
    iter_paths,
    load_spec,
    occupied,
    partition_function,
    partition_function_exact,
    partitions_in_box,
    path_weight,
    transition_weight,
    uniform_spec,
)
from schurkernel.symcore import Partition, det, schur, skew_schur

F = Fraction
E = Partition()


def test_transition_weight_examples():
    s = ProcessSpec(1, [["1/2"], ["1/3"], ["1/2", "1/3"], ["1/4"]])
    assert transition_weight(s, 0, 0, 2) == F(1, 4)
    assert transition_weight(s, 1, 3, 5) == 0
    assert transition_weight(s, 2, -1, 1) == F(19, 36)
    with pytest.raises(ValueError):
        transition_weight(s, 4, 0, 0)


def test_path_weight_examples():
    any_spec = ProcessSpec(1, [["1/2"], ["1/3"], ["1/5", "1/7"], ["1/4"]])
    assert path_weight(any_spec, [E, E, E]) == 1
    assert path_weight(uniform_spec(1, ["1/2"]), [E, Partition([1]), E]) == 0
    s = uniform_spec(1, ["1/2"], [1])
    # h_1 at each of the three moving steps, the last step is s_{(1)/(1)} = 1
    h1 = F(1, 2)
    assert path_weight(s, PathConfig((Partition([1]), E, Partition([1])))) == h1 * h1 * h1 * 1


def test_lgv_step_factor_is_walker_determinant():
    # each skew Schur factor equals det of one-walker transition weights
    s = ProcessSpec(1, [["1/2", "1/3"], ["1/3"], ["1/5", "1/2"], ["1/4", "1/3"]])
    box = partitions_in_box(3, 3)
    for r in (0, 1):
        for lam, nu in product(box, box):
            w = skew_schur(nu, lam, s.alphabets[r]) if r == 0 else skew_schur(lam, nu, s.alphabets[r])
            k = 4
            x = lam.walker_positions(k)
            y = nu.walker_positions(k)
            assert w == det([[transition_weight(s, r, x[i], y[j]) for j in range(k)] for i in range(k)])


def test_partition_function_examples():
    s = uniform_spec(1, ["1/2"])
    assert partition_function(s, TruncationBound(0, 0)).value == 1
    for mu in ([], [1]):
        s = uniform_spec(1, ["1/2"], mu)
        z = partition_function(s, TruncationBound(6, 3)).value
        assert z == sum(w for _, w in iter_paths(s, TruncationBound(6, 3)))
        assert z <= partition_function_exact(s)


def test_too_small_box_rejected():
    with pytest.raises(ValueError):
        partition_function(uniform_spec(1, ["1/2"], [2]), TruncationBound(1, 3))


def test_monotone_truncation():
    s = ProcessSpec(1, [["1/2"], ["1/3"], ["1/2", "1/4"], ["1/3"]], [1])
    prev_row = None
    for L in range(1, 6):
        row = [partition_function(s, TruncationBound(L, K)).value for K in range(1, 4)]
        assert row == sorted(row)
        if prev_row:
            assert all(a <= b for a, b in zip(prev_row, row))
        prev_row = row


def test_exact_partition_function_and_tail():
    s = uniform_spec(1, ["1/2"], [1])
    z = partition_function_exact(s)
    assert z == schur(Partition([1]), s.odd_alphabet) / (1 - F(1, 4)) ** 3
    t = partition_function(s, TruncationBound(8, 5))
    assert t.tail == z - t.value and t.tail > 0
    assert t.tail < partition_function(s, TruncationBound(5, 3)).tail


def test_brute_force_examples():
    s = uniform_spec(1, ["1/2"])
    box = TruncationBound(6, 3)
    assert brute_force_correlation(s, [], box) == 1
    # the site directly above every box row can never be occupied
    assert brute_force_correlation(s, [(2, box.L + 1)], box) == 0
    # -K is the home position of walker K+1, which never moves inside the box
    assert brute_force_correlation(s, [(2, -box.K)], box) == 1
    with pytest.raises(ValueError):
        brute_force_correlation(s, [(2, 0), (2, 0)], box)


def test_oracle_transfer_matches_path_enumeration():
    s = ProcessSpec(1, [["1/2"], ["1/3"], ["1/2", "1/4"], ["1/3"]], [1])
    box = TruncationBound(4, 3)
    paths = list(iter_paths(s, box))
    z = sum(w for _, w in paths)
    for pts in ([(1, 1)], [(2, 0)], [(3, 1), (2, -1)], [(1, 0), (3, 0)]):
        pts = [CorrelationPoint(*p) for p in pts]
        hit = sum(w for path, w in paths if all(occupied(path.partitions[p.time - 1], p.position) for p in pts))
        assert brute_force_correlation(s, pts, box) == hit / z


def test_support_and_nonintersection():
    s = ProcessSpec(1, [["1/2"], ["1/3"], ["1/2"], ["1/3"]], [1])
    box = partitions_in_box(4, 2)
    for l1, l2, l3 in product(box, repeat=3):
        w = path_weight(s, [l1, l2, l3])
        if w:
            assert l1.contains(l2) and l3.contains(l2) and l3.contains(s.final_partition)
            # single-variable steps are horizontal strips
            assert all(l1[i + 1] <= l2[i] for i in range(3)) and all(l3[i + 1] <= l2[i] for i in range(3))
            for lam in (l1, l2, l3):
                x = lam.walker_positions(4)
                assert all(x[i] > x[i + 1] for i in range(3))


def test_reduction_to_schur_process():
    s = ProcessSpec(1, [["1/2"], ["1/3", "1/4"], ["1/2"], ["1/3"]], [])
    a = s.alphabets
    for l1, l2, l3 in product(partitions_in_box(3, 2), repeat=3):
        plain = schur(l1, a[0]) * skew_schur(l1, l2, a[1]) * skew_schur(l3, l2, a[2]) * schur(l3, a[3])
        assert path_weight(s, [l1, l2, l3]) == plain


def test_tail_bound_covers_box_growth():
    s = uniform_spec(1, ["1/2"], [1])
    small, big = TruncationBound(4, 2), TruncationBound(8, 4)
    pts = [(2, 1)]
    gap = abs(brute_force_correlation(s, pts, small) - brute_force_correlation(s, pts, big))
    assert gap <= correlation_tail_bound(s, small)


def test_spec_validation_names_field(tmp_path):
    with pytest.raises(SpecError) as e:
        ProcessSpec(1, [["1/2"]] * 3)
    assert e.value.field == "alphabets"
    with pytest.raises(SpecError) as e:
        ProcessSpec(0, [])
    assert e.value.field == "N"
    with pytest.raises(SpecError) as e:
        ProcessSpec(1, [["1/2"], ["2"], ["1/2"], ["1/2"]])
    assert e.value.field == "alphabets[1]"
    with pytest.raises(SpecError) as e:
        ProcessSpec(1, [["1/2"]] * 4, [1, 2])
    assert e.value.field == "mu"
    p = tmp_path / "s.json"
    p.write_text('{"N": 1, "alphabets": [["1/2"]]')
    with pytest.raises(SpecError):
        load_spec(p)


fr = st.builds(F, st.integers(1, 9), st.integers(10, 13))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 2), st.data())
def test_json_roundtrip(N, data):
    alphs = [data.draw(st.lists(fr, min_size=1, max_size=2)) for _ in range(4 * N)]
    mu = sorted(data.draw(st.lists(st.integers(0, 3), max_size=3)), reverse=True)
    s = ProcessSpec(N, alphs, mu)
    again = ProcessSpec.from_dict(json.loads(json.dumps(s.to_dict())))
    assert again == s
    assert again.endpoints == [mu[i] - i for i in range(len(Partition(mu)))]
