"""Acceptance criteria, one test each.

Every test records a single PASS or FAIL line (shown in the terminal
summary, or printed when this file is run as a script) and then asserts.
"""

import itertools
import math
import sys
from collections import Counter

import numpy as np
import pytest

import conftest
from patterns import PATTERNS, evaluate
from fwdentropy.datasets import gaussian_triple, gp_burnout, kidney_stones, wine_correlation
from fwdentropy.entropy import (
    CategoricalOracle,
    CorrelationMatrix,
    GaussianOracle,
    ProbabilityTable,
    conditional_mutual_information,
    to_millibits,
)
from fwdentropy.forward_diff import cmi_from_deltas, conditional_delta, forward_differences, reconstruct_entropy
from fwdentropy.generators import (
    XorTableParams,
    dag_to_correlation,
    random_correlation,
    random_probability_table,
    tree_averaging_dag,
    xor_delta_closed_form,
    xor_table,
)
from fwdentropy.graph_scan import Graph, cluster_scan
from fwdentropy.sets import VariableSet
from fwdentropy.synergy import explained_information, gaussian_delta_closed_form

V = VariableSet


class Checks:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.failed = []
        self.count = 0

    def close(self, label, got, want, tol):
        self.count += 1
        if not abs(got - want) <= tol:
            self.failed.append(f"{label}: got {got:.4f}, want {want} +/- {tol}")

    def true(self, label, cond, detail=""):
        self.count += 1
        if not cond:
            self.failed.append(f"{label} {detail}".strip())

    def report(self):
        status = "PASS" if not self.failed else "FAIL"
        line = f"criterion {self.number}: {status} {self.title} ({self.count} checks"
        line += ")" if not self.failed else f", {len(self.failed)} failed: " + "; ".join(self.failed) + ")"
        conftest.ACCEPTANCE_LINES.append(line)
        print(line)
        assert not self.failed, line


def by_name(deltas, names, *subset):
    return deltas[V(names.index(n) for n in subset)]


def test_criterion_1_gaussian_triple():
    c = Checks(1, "Gaussian triple")
    t = forward_differences(GaussianOracle(gaussian_triple()))
    for s, want in (((0, 1), -30.15), ((0, 2), -497.4), ((1, 2), -212.5), ((0, 1, 2), -14.63)):
        c.close(f"delta{s}", t[V(s)], want, 0.05)
    flipped = forward_differences(GaussianOracle(gaussian_triple(-0.2)))
    c.close("delta(0,1,2) with rho12=-0.2", flipped[V([0, 1, 2])], -1126.0, 0.1)
    c.report()


def test_criterion_2_kidney_stones():
    c = Checks(2, "Kidney stones")
    tab = kidney_stones()
    o = CategoricalOracle(tab)
    names = tab.names
    assert names == ("O", "T", "S")
    order = [("O",), ("T",), ("S",), ("O", "T"), ("O", "S"), ("T", "S"), ("O", "T", "S")]
    for s, want in zip(order, (733.4, 1024.0, 1023.7, 1754.9, 1725.8, 1835.3, 2533.7)):
        c.close(f"h{s}", to_millibits(o.entropy(V(names.index(n) for n in s))), want, 0.05)
    t = forward_differences(o)
    for s, want in zip(order[3:], (-2.443, -31.31, -212.4, -1.198)):
        c.close(f"delta{s}", by_name(t, names, *s), want, 0.05)
    c.report()


def test_criterion_3_gp_burnout():
    c = Checks(3, "GP burn-out")
    corr = gp_burnout()
    n = corr.names
    t = forward_differences(GaussianOracle(corr))
    d = lambda *s: by_name(t, n, *s)
    pairs = [("js1", "bo1"), ("js1", "js2"), ("bo1", "js2"), ("js1", "bo2"), ("bo1", "bo2"), ("js2", "bo2")]
    for s, want in zip(pairs, (-191.6, -98.9, -123.9, -114.5, -356.9, -259.2)):
        c.close(f"delta{s}", d(*s), want, 0.1)
    triples = [("js1", "bo1", "js2"), ("js1", "bo1", "bo2"), ("js1", "js2", "bo2"), ("bo1", "js2", "bo2")]
    for s, want in zip(triples, (66.96, 103.7, 71.63, 118.5)):
        c.close(f"delta{s}", d(*s), want, 0.1)
    four = d("js1", "bo1", "js2", "bo2")
    c.close("delta(all four)", four, -61.96, 0.1)
    c.close("delta(js1,js2,bo2 | bo1)", d("js1", "js2", "bo2") + four, 9.67, 0.1)
    c.close("delta(bo1,js2,bo2 | js1)", d("bo1", "js2", "bo2") + four, 56.55, 0.1)
    first = d("js1", "bo2") + d("js1", "js2", "bo2") + d("js1", "bo1", "bo2") + four
    second = d("bo1", "js2") + d("js1", "bo1", "js2") + d("bo1", "js2", "bo2") + four
    c.close("js1 vs bo2 given rest", first, -1.13, 0.05)
    c.close("bo1 vs js2 given rest", second, -0.40, 0.05)
    c.report()


def test_criterion_4_tree_averaging():
    c = Checks(4, "Tree averaging moral-graph scan")
    dag = tree_averaging_dag(0.6)
    res = cluster_scan(dag.moral_graph(), GaussianOracle(dag_to_correlation(dag)))
    values = [v for _, v in res.cluster_deltas(3)]
    c.true("synergy count", len(res.findings) == 7, f"got {len(res.findings)}")
    c.true("zero count", sum(abs(v) < 1e-6 for v in values) == 12,
           f"got {sum(abs(v) < 1e-6 for v in values)}")
    for want, mult in ((-164.02, 1), (-116.78, 2), (-53.66, 4), (65.90, 4), (44.06, 8)):
        near = [v for v in values if abs(v - want) <= 0.05]
        c.true(f"{want} x{mult}", len(near) == mult, f"got {len(near)}")
    c.true("every value accounted for", len(values) == 31, f"got {len(values)}")
    c.report()


WINE_TABLE = [
    (("residual.sugar", "density", "alcohol"), -61.74, "density"),
    (("volatile.acidity", "free.sulfur.dioxide", "total.sulfur.dioxide"), -25.49, "total.sulfur.dioxide"),
    (("fixed.acidity", "residual.sugar", "density"), -23.29, "density"),
    (("fixed.acidity", "density", "alcohol"), -19.64, "density"),
    (("residual.sugar", "chlorides", "density"), -18.50, "density"),
    (("chlorides", "total.sulfur.dioxide", "alcohol"), 79.46, None),
    (("chlorides", "total.sulfur.dioxide", "density"), 84.40, None),
    (("residual.sugar", "total.sulfur.dioxide", "density"), 139.82, None),
    (("total.sulfur.dioxide", "density", "alcohol"), 158.78, None),
    (("chlorides", "density", "alcohol"), 184.43, None),
]


def test_criterion_5_wine():
    c = Checks(5, "Wine third-order differences")
    corr = wine_correlation()
    o = GaussianOracle(corr, data_derived=True)
    n = corr.names
    for names, want, _ in WINE_TABLE:
        s = V(n.index(x) for x in names)
        c.close(":".join(names), conditional_delta(o, s), want, 0.5)
    c.report()


def test_criterion_6_xor_table():
    c = Checks(6, "Analytic 2x2x2 table")
    for alpha in (0.01, 0.05, 0.125, 0.2):
        t = forward_differences(CategoricalOracle(xor_table(XorTableParams(alpha))))
        beta = 0.25 - alpha
        by_hand = to_millibits(-4 * (alpha * math.log(alpha) + beta * math.log(beta)) - 3 * math.log(2))
        c.close(f"alpha={alpha}", t[V([0, 1, 2])], by_hand, 1e-9)
        c.close(f"alpha={alpha} closed form", xor_delta_closed_form(alpha), by_hand, 1e-9)
    c.close("zero at 1/8", forward_differences(CategoricalOracle(xor_table(0.125)))[V([0, 1, 2])], 0.0, 1e-9)
    c.report()


def _graph_model(p, rng):
    """Random graph with a diagonally dominant concentration matrix on it."""
    pairs = [e for e in itertools.combinations(range(p), 2) if rng.random() < 0.45]
    K = np.zeros((p, p))
    for a, b in pairs:
        K[a, b] = K[b, a] = rng.uniform(-1, 1)
    K += np.diag(np.abs(K).sum(axis=1) + rng.uniform(0.1, 1.0, p))
    return Graph(p, pairs), CorrelationMatrix.from_covariance(np.linalg.inv(K))


def _block_model(p, rng, categorical):
    cut = int(rng.integers(1, p))
    if categorical:
        left = random_probability_table([2] * cut, rng)
        right = random_probability_table([2] * (p - cut), rng)
        cells = np.multiply.outer(left.cells, right.cells)
        return cut, CategoricalOracle(ProbabilityTable(cells / cells.sum(), atol=1e-9))
    R = np.eye(p)
    R[:cut, :cut] = random_correlation(cut, rng).values
    R[cut:, cut:] = random_correlation(p - cut, rng).values
    return cut, GaussianOracle(CorrelationMatrix(R))


def _random_oracle(i, rng):
    p = int(rng.integers(3, 7))
    if i % 2:
        levels = [int(x) for x in rng.integers(2, 4, size=min(p, 4))]
        return CategoricalOracle(random_probability_table(levels, rng))
    return GaussianOracle(random_correlation(p, rng))


def test_criterion_7_property_suite():
    c = Checks(7, "Property suite over random oracles")
    rng = np.random.default_rng(7)
    tol = 1e-6
    worst = Counter()
    n_oracles = 1000

    def check(name, value):
        worst[name] = max(worst[name], abs(value))

    for i in range(n_oracles):
        o = _random_oracle(i, rng)
        p = o.p
        U = V.full(p)
        t = forward_differences(o)
        for A in U.subsets():
            check("round trip", reconstruct_entropy(t, A) - to_millibits(o.entropy(A)))
        # recursion and its generalization
        k = int(rng.integers(p))
        rest = list(U.remove(k))
        rng.shuffle(rest)
        A, B = V(rest[:2]), V(rest[2:])
        check("recursion", conditional_delta(o, A, B.add(k)) - conditional_delta(o, A.add(k), B) - conditional_delta(o, A, B))
        h = o.entropy
        direct = to_millibits(math.fsum(
            (-1) ** (len(A) - len(C)) * (h(C | B) - h(B)) for C in A.subsets()
        ))
        check("generalized recursion", conditional_delta(o, A, B) - direct)
        # information from differences
        i_, j_ = rest[0], rest[1]
        check("cmi from deltas", cmi_from_deltas(t, i_, j_, B) - conditional_mutual_information(o, V([i_]), V([j_]), B))
        # explained information
        dec = explained_information(o, k, V(rest[:3]) if p > 3 else V(rest[:2]))
        check("explained identity", dec.identity_residual)
        pair = explained_information(o, k, V(rest[:2]))
        ik = conditional_mutual_information(o, V([k]), V([rest[0]]))
        jk = conditional_mutual_information(o, V([k]), V([rest[1]]))
        check("explained pair", pair.total - (ik + jk - t[V(rest[:2]).add(k)]))

    for i in range(n_oracles):
        p = int(rng.integers(2, 7))
        cut, o = _block_model(p, rng, categorical=bool(i % 2))
        t = forward_differences(o)
        left = V(range(cut))
        for A, v in t.items():
            if A & left and A - left:
                check("block additivity", v)

    n_separations = 0
    for _ in range(n_oracles):
        p = int(rng.integers(3, 7))
        g, corr = _graph_model(p, rng)
        o = GaussianOracle(corr)
        for a in range(p):
            C = g.neighbours(a)
            B = V.full(p) - C - V([a])
            if B:
                n_separations += 1
                check("separation", conditional_delta(o, B.add(a), C))
        a, b = rng.choice(p, 2, replace=False)
        C = V(x for x in range(p) if x not in (a, b) and rng.random() < 0.5)
        if g.separates(V([a]), V([b]), C):
            n_separations += 1
            check("separation", conditional_delta(o, V([a, b]), C))

    for name, w in sorted(worst.items()):
        c.true(name, w <= tol, f"max |error| {w:.2e}")
    c.true("separation cases", n_separations >= n_oracles, f"only {n_separations}")
    c.report()


def test_criterion_8_four_node_patterns():
    c = Checks(8, "Four-node zero and sign patterns")
    for name in sorted(PATTERNS):
        zeros, positives, negatives = evaluate(name)
        for label, v in zeros:
            c.true(f"{name} {label} = 0", abs(v) <= 1e-6, f"got {v:.3g}")
        for label, v in positives:
            c.true(f"{name} {label} > 0", v > 0.01, f"got {v:.3g}")
        for label, v in negatives:
            c.true(f"{name} {label} < 0", v < -0.01, f"got {v:.3g}")
    c.report()


def test_criterion_9_exactly_one_negative():
    c = Checks(9, "Exactly one negative correlation gives a synergy")
    rng = np.random.default_rng(9)
    found, bad = 0, []
    while found < 10_000:
        r = rng.uniform(0, 1, 3)
        r[rng.integers(3)] *= -1
        det = 1 - (r ** 2).sum() + 2 * r.prod()
        if det <= 0:
            continue
        found += 1
        if not gaussian_delta_closed_form(*r) < 0:
            bad.append(tuple(np.round(r, 4)))
    c.true("10000 matrices", not bad, f"{len(bad)} nonnegative, e.g. {bad[:3]}")
    c.report()


def test_criterion_10_cluster_counts_and_memo():
    c = Checks(10, "Tree cluster counts and entropy memo")
    dag = tree_averaging_dag(0.6)
    corr = dag_to_correlation(dag)
    for label, g, want in (("skeleton", dag.skeleton(), 19), ("moral graph", dag.moral_graph(), 31)):
        o = GaussianOracle(corr)
        res = cluster_scan(g, o)
        c.true(f"{label} triples", len(res.clusters) == want, f"got {len(res.clusters)}")
        c.true(f"{label} single evaluation", max(o.evaluations.values()) == 1,
               f"max {max(o.evaluations.values())}")
        c.true(f"{label} memo used", o.hits > 0)
    c.report()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
