import json
import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import norm

from fwdentropy.entropy import CorrelationMatrix, GaussianOracle
from fwdentropy.exceptions import DegenerateColumn, InputError, NotPositiveDefinite
from fwdentropy.forward_diff import forward_differences
from fwdentropy.generators import random_correlation
from fwdentropy.graph_scan import Graph, cluster_scan
from fwdentropy.io import (
    DataMatrix,
    ReportDocument,
    build_report,
    ecdf_points,
    empirical_correlation,
    normal_scores,
    normal_scores_array,
    read_correlation_csv,
    read_counts_csv,
    read_data_csv,
    read_edge_list,
    write_correlation_csv,
    write_ecdf_csv,
)
from fwdentropy.sets import VariableSet

V = VariableSet


def test_normal_scores_direct_formula():
    out = normal_scores_array(np.array([[3.0], [1.0], [2.0]]), 0)
    assert out[:, 0] == pytest.approx([norm.ppf(0.75), norm.ppf(0.25), 0.0], abs=1e-12)
    assert out[0, 0] == pytest.approx(0.6745, abs=1e-4)


def test_normal_scores_errors():
    with pytest.raises(DegenerateColumn):
        normal_scores_array(np.array([[1.0, 2.0], [1.0, 3.0], [1.0, 4.0]]))
    with pytest.raises(InputError):
        normal_scores_array(np.array([[1.0], [2.0]]))


def test_normal_scores_ties_are_seeded():
    X = np.array([[1.0], [1.0], [1.0], [2.0], [0.0]])
    a = normal_scores_array(X, 5)
    assert np.array_equal(a, normal_scores_array(X, 5))
    # the tied rows get the three middle scores in some order
    mid = sorted(a[:3, 0])
    assert mid == pytest.approx(list(norm.ppf([2 / 6, 3 / 6, 4 / 6])))
    seen = {tuple(normal_scores_array(X, s)[:3, 0]) for s in range(20)}
    assert len(seen) > 1


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=3, max_size=40, unique=True))
def test_normal_scores_are_a_permutation_of_quantiles(col):
    out = normal_scores_array(np.array(col)[:, None], 0)[:, 0]
    n = len(col)
    assert sorted(out) == pytest.approx(list(norm.ppf(np.arange(1, n + 1) / (n + 1))))
    assert abs(out.mean()) < 1e-12
    assert np.array_equal(np.argsort(out), np.argsort(col))


def test_empirical_correlation_identical_columns():
    x = np.arange(10.0)
    c = empirical_correlation(DataMatrix(np.column_stack([x, x, x ** 2]), ("a", "b", "c")))
    assert c.values[0, 1] == pytest.approx(1.0)
    with pytest.raises(NotPositiveDefinite):
        GaussianOracle(c).entropy(V([0, 1]))


def test_empirical_correlation_independent_columns(rng):
    X = rng.normal(size=(100_000, 4))
    c = empirical_correlation(DataMatrix(X, None))
    off = c.values[~np.eye(4, dtype=bool)]
    assert np.max(np.abs(off)) < 0.02
    assert np.allclose(c.values, np.corrcoef(X, rowvar=False))


def test_empirical_correlation_errors():
    with pytest.raises(InputError):
        empirical_correlation(DataMatrix(np.ones((2, 3)), None))
    with pytest.raises(DegenerateColumn):
        empirical_correlation(DataMatrix(np.column_stack([np.ones(5), np.arange(5.0)]), None))


def test_read_data_drops_incomplete_rows(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("a,b\n1,2\n3,\n4,5\nx,1\n6,7,8\n9,10\n")
    d = read_data_csv(p)
    assert d.names == ("a", "b")
    assert d.n == 3 and d.n_dropped == 3
    assert normal_scores(d, 0).n_dropped == 3


def test_correlation_csv_round_trip(tmp_path):
    c = random_correlation(4, 3)
    p = tmp_path / "c.csv"
    write_correlation_csv(c, p)
    back = read_correlation_csv(p)
    assert back.names == c.names
    assert np.array_equal(back.values, c.values)


def test_correlation_csv_errors(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("a,b\n1,0.5\n0.4,1\n")
    with pytest.raises(InputError):
        read_correlation_csv(p)
    p.write_text("a,b,c\n1,0.5\n0.5,1\n")
    with pytest.raises(InputError):
        read_correlation_csv(p)


def test_counts_csv(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("X,Y,count\nlo,a,3\nhi,b,1\nlo,b,0\n")
    t = read_counts_csv(p)
    assert t.names == ("X", "Y")
    assert t.level_names == (("lo", "hi"), ("a", "b"))
    assert t.cells.tolist() == [[0.75, 0.0], [0.0, 0.25]]
    p.write_text("X,Y,n\nlo,a,3\n")
    with pytest.raises(InputError):
        read_counts_csv(p)
    p.write_text("X,count\nlo,-3\n")
    with pytest.raises(InputError):
        read_counts_csv(p)


def test_edge_list(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("# comment\na,b\nb , c\n")
    g = read_edge_list(p, ["a", "b", "c"])
    assert g.edges == {(0, 1), (1, 2)}
    p.write_text("a,z\n")
    with pytest.raises(InputError):
        read_edge_list(p, ["a", "b"])


def test_edge_list_directed(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("a->c\nb->c\n")
    with pytest.raises(InputError):
        read_edge_list(p, ["a", "b", "c"])
    assert read_edge_list(p, ["a", "b", "c"], "skeleton").edges == {(0, 2), (1, 2)}
    assert read_edge_list(p, ["a", "b", "c"], "moralize").edges == {(0, 2), (1, 2), (0, 1)}


def _report():
    c = CorrelationMatrix.from_lower_triangle((1.0, 0.2, 1.0, 0.7, 0.5, 1.0), ["a", "b", "c"])
    o = GaussianOracle(c)
    res = cluster_scan(Graph.complete(3, c.names), o)
    return build_report({"tool_version": "x"}, res.deltas, res.findings)


def test_report_rounding_and_order():
    doc = _report()
    assert [r["delta"] for r in doc.delta_records] == [-497.37, -212.5, -30.15, -14.63]
    assert [r["order"] for r in doc.delta_records] == [2, 2, 2, 3]
    (s,) = doc.synergy_records
    assert s["collider"] == "c" and s["delta"] == -14.63


def test_report_round_trip(tmp_path):
    doc = _report()
    path = tmp_path / "r.json"
    doc.write(path)
    assert ReportDocument.read(path) == doc
    assert json.loads(path.read_text())["metadata"]["units"] == "mbits"
    assert "c*" in doc.to_text()


def test_report_nats():
    c = random_correlation(3, 1)
    t = forward_differences(GaussianOracle(c))
    doc = build_report({}, t, units="nats")
    rec = [r for r in doc.delta_records if r["order"] == 3][0]
    assert rec["delta"] == pytest.approx(t[V([0, 1, 2])] / (1024 / np.log(2)), abs=1e-6)
    with pytest.raises(InputError):
        build_report({}, t, units="bits")


def test_ecdf(tmp_path):
    assert ecdf_points([3.0, 1.0]) == [(1.0, 0.5), (3.0, 1.0)]
    p = tmp_path / "e.csv"
    write_ecdf_csv([2.0, -1.0], p)
    assert p.read_text() == "delta,ecdf\n-1.00,0.500000\n2.00,1.000000\n"


WINE = os.environ.get("WINE_DATA", "winequality-white.csv")


@pytest.mark.skipif(not Path(WINE).exists(), reason="UCI white-wine file not available")
def test_wine_raw_data_normal_scores():
    import csv

    with open(WINE) as fh:
        rows = list(csv.reader(fh, delimiter=";"))
    names = [n.strip('"').replace(" ", ".") for n in rows[0]][:11]
    X = np.array([[float(v) for v in r[:11]] for r in rows[1:]])
    c = empirical_correlation(normal_scores(DataMatrix(X, names), 0))
    i, j = names.index("residual.sugar"), names.index("density")
    assert c.values[i, j] == pytest.approx(0.747925, abs=5e-3)
