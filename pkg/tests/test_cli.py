from __future__ import annotations

import csv
import json
from fractions import Fraction

import pytest

from schurkernel import cli
from schurkernel import kernel_linalg
from schurkernel.edge import EdgeParams, limit_kernel
from schurkernel.process import CorrelationPoint, ProcessSpec, TruncationBound, brute_force_correlation


def write_spec(tmp_path, N=1, alphabets=None, mu=(1,), name="spec.json"):
    alphabets = alphabets or [["1/2"]] * (4 * N)
    p = tmp_path / name
    p.write_text(json.dumps({"N": N, "alphabets": alphabets, "mu": list(mu)}))
    return str(p)


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_correlate_empty_point_list(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert cli.main(["correlate", "--spec", write_spec(tmp_path), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["points", "value", "oracle", "tail_bound"]
    assert rows[1][:2] == ["", "1/1"] and len(rows) == 2


def test_correlate_with_oracle(tmp_path, capsys):
    spec = write_spec(tmp_path)
    out = tmp_path / "r.csv"
    code = cli.main(["correlate", "--spec", spec, "--point", "2:1", "--point", "2:0", "--oracle",
                     "--L", "8", "--K", "4", "--out", str(out)])
    assert code == 0
    _, row = read_csv(out)
    value, oracle, tail = (Fraction(v) for v in row[1:])
    assert abs(value - oracle) <= tail
    s = ProcessSpec(1, [["1/2"]] * 4, [1])
    assert oracle == brute_force_correlation(s, [CorrelationPoint(2, 1), CorrelationPoint(2, 0)], TruncationBound(8, 4))
    assert "R = " in capsys.readouterr().out


def test_correlate_is_deterministic(tmp_path):
    spec = write_spec(tmp_path, alphabets=[["1/2", "1/3"], ["1/4"], ["1/3"], ["1/2"]], mu=(2, 1))
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.csv"
        cli.main(["correlate", "--spec", spec, "--point", "1:2", "--point", "3:-1", "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize("text,field", [
    ('{"N": 1, "alphabets": [', "<json>"),
    ('{"alphabets": []}', "N"),
    ('{"N": 1, "alphabets": [["1/2"], ["7/5"], ["1/2"], ["1/2"]]}', "alphabets[1]"),
    ('{"N": 1, "alphabets": [["1/2"], ["1/2"], ["1/2"], ["1/2"]], "mu": [1, 3]}', "mu"),
    ('{"N": 1, "alphabets": [["1/2"], [0.5], ["1/2"], ["1/2"]]}', "alphabets[1][0]"),
])
def test_malformed_spec_exit_2(tmp_path, capsys, text, field):
    p = tmp_path / "bad.json"
    p.write_text(text)
    assert cli.main(["correlate", "--spec", str(p)]) == 2
    assert field in capsys.readouterr().err


def test_bad_point_and_range_exit_2(tmp_path):
    spec = write_spec(tmp_path)
    assert cli.main(["correlate", "--spec", spec, "--point", "two:1"]) == 2
    assert cli.main(["correlate", "--spec", spec, "--point", "4:0"]) == 2
    assert cli.main(["correlate", "--spec", spec, "--point", "2:0", "--point", "2:0"]) == 2
    assert cli.main(["correlate", "--spec", str(tmp_path / "missing.json")]) == 2


def test_truncation_exit_3(tmp_path, capsys):
    spec = write_spec(tmp_path)
    assert cli.main(["correlate", "--spec", spec, "--point", "2:1", "--M", "1"]) == 3
    assert cli.main(["correlate", "--spec", spec, "--point", "2:9", "--maxdeg", "3"]) == 3
    assert "truncation" in capsys.readouterr().err


def test_verify_default_spec(tmp_path, capsys):
    spec = write_spec(tmp_path, alphabets=[["1/2", "1/3"], ["1/4"], ["1/3"], ["1/2"]], mu=(2, 1))
    assert cli.main(["verify", "--spec", spec, "--nodes", "256"]) == 0
    out = capsys.readouterr().out
    assert "all identities hold" in out and "FAILED" not in out


def test_verify_empty_partition_branch(tmp_path, capsys):
    assert cli.main(["verify", "--spec", write_spec(tmp_path, mu=())]) == 0
    assert "second term vanishes" in capsys.readouterr().out


def test_verify_negative_control(tmp_path, capsys, monkeypatch):
    real = kernel_linalg.cofactor_matrix

    def corrupted(matrix):
        cof = real(matrix)
        cof[0][0] += 1
        return cof

    monkeypatch.setattr(kernel_linalg, "cofactor_matrix", corrupted)
    assert cli.main(["verify", "--spec", write_spec(tmp_path)]) == 4
    out = capsys.readouterr().out
    assert "first difference at" in out


def test_edge_small_run(tmp_path, capsys):
    out = tmp_path / "e.csv"
    args = ["edge", "--alpha", "0.3", "--omega=-2", "--N-list", "30,40", "--xi=-1,0", "--out", str(out)]
    assert cli.main(args) == 0
    rows = read_csv(out)
    assert rows[0] == ["N", "tau1", "xi1", "tau2", "xi2", "omega", "finite_value", "limit_value", "abs_diff"]
    assert len(rows) == 1 + 2 * 4
    first = out.read_bytes()
    assert cli.main(args) == 0
    assert out.read_bytes() == first
    # the limit column is the limit kernel at the coordinates the lattice point represents
    p = EdgeParams(0.3, -2.0, 30)
    a, b = p.point(0.0, -1.0), p.point(0.0, 0.0)
    row = rows[2]
    assert float(row[7]) == limit_kernel(a.tau_eff, a.xi_eff, b.tau_eff, b.xi_eff, p.omega_eff)
    assert "max |finite - limit|" in capsys.readouterr().out


@pytest.mark.parametrize("args", [
    ["--N-list", "2", "--tau=-1,0,1"],
    ["--alpha", "1.5"],
    ["--N-list", "0"],
    ["--N-list", "a,b"],
    ["--xi", ""],
])
def test_edge_invalid_exit_2(args):
    assert cli.main(["edge", *args]) == 2
