"""Analytic models used as fixtures: linear Gaussian DAGs, the 2x2x2 XOR
table and small undirected Gaussian graphical models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .entropy import CorrelationMatrix, ProbabilityTable, to_millibits
from .exceptions import AlphaOutOfRange, InputError, NotPositiveDefinite
from .graph_scan import Graph, moral_graph, skeleton, topological_order
from .sets import VariableSet


@dataclass
class LinearGaussianDag:
    """Structural equations ``X_v = sum_q b_qv X_q + e_v`` with ``e_v ~ N(0, s_v^2)``.

    ``parents[v]`` lists the parents of ``v`` and ``coefficients[v]`` the
    matching ``b_qv``.
    """

    parents: list[list[int]]
    coefficients: list[list[float]]
    noise_sd: list[float]
    names: list[str] | None = None

    def __post_init__(self):
        p = len(self.parents)
        if len(self.coefficients) != p or len(self.noise_sd) != p:
            raise InputError("parents, coefficients and noise_sd must have one entry per node")
        for v, (ps, cs) in enumerate(zip(self.parents, self.coefficients)):
            if len(ps) != len(cs):
                raise InputError(f"node {v}: {len(ps)} parents but {len(cs)} coefficients")
            if any(not 0 <= q < p for q in ps):
                raise InputError(f"node {v} has a parent outside 0..{p - 1}")
        if any(not s > 0 for s in self.noise_sd):
            raise InputError("noise standard deviations must be positive")
        if self.names is None:
            self.names = [f"X{i + 1}" for i in range(p)]

    @property
    def p(self) -> int:
        return len(self.parents)

    def skeleton(self) -> Graph:
        return skeleton(self.parents, self.names)

    def moral_graph(self) -> Graph:
        return moral_graph(self.parents, self.names)


def dag_covariance(dag: LinearGaussianDag) -> np.ndarray:
    """Exact covariance by forward substitution in topological order."""
    order = topological_order(dag.parents)
    C = np.zeros((dag.p, dag.p))
    done: list[int] = []
    for v in order:
        ps, bs = dag.parents[v], np.asarray(dag.coefficients[v], dtype=float)
        if ps:
            # cov(v, u) = sum_q b_q cov(q, u) for every node already placed
            row = bs @ C[np.ix_(ps, done)] if done else np.zeros(0)
            C[v, done] = row
            C[done, v] = row
            C[v, v] = bs @ C[np.ix_(ps, ps)] @ bs + dag.noise_sd[v] ** 2
        else:
            C[v, v] = dag.noise_sd[v] ** 2
        done.append(v)
    return C


def dag_to_correlation(dag: LinearGaussianDag) -> CorrelationMatrix:
    return CorrelationMatrix.from_covariance(dag_covariance(dag), dag.names)


def sample_dag(dag: LinearGaussianDag, n: int, rng=None) -> np.ndarray:
    """Draw ``n`` rows from the structural equations."""
    rng = np.random.default_rng(rng)
    X = np.zeros((n, dag.p))
    for v in topological_order(dag.parents):
        X[:, v] = rng.standard_normal(n) * dag.noise_sd[v]
        for q, b in zip(dag.parents[v], dag.coefficients[v]):
            X[:, v] += b * X[:, q]
    return X


def tree_averaging_dag(alpha: float = 0.6, generations: int = 4) -> LinearGaussianDag:
    """Pyramid where each child averages two parents: ``X = alpha (P1 + P2) + e``.

    Nodes use heap numbering: ``X1`` is the final survivor and ``X_i`` has
    parents ``X_{2i}`` and ``X_{2i+1}``. Four generations give 15 nodes with
    eight founders.
    """
    p = 2**generations - 1
    parents, coefs = [], []
    for i in range(1, p + 1):
        if 2 * i <= p:
            parents.append([2 * i - 1, 2 * i])
            coefs.append([alpha, alpha])
        else:
            parents.append([])
            coefs.append([])
    return LinearGaussianDag(parents, coefs, [1.0] * p, [f"X{i}" for i in range(1, p + 1)])


#: Arcs of the three four-node Bayes networks, 1-based as drawn.
BAYES_NETS = {
    "A": [(1, 2), (1, 4), (2, 3), (4, 3)],
    "B": [(2, 1), (4, 1), (2, 3), (4, 3)],
    "C": [(1, 2), (3, 2), (4, 2)],
}


def bayes_net(name: str, coefficient: float = 0.5, noise_sd: float = 1.0) -> LinearGaussianDag:
    """One of the four-node Bayes networks ``"A"``, ``"B"`` or ``"C"``.

    A has a single collider at 3 (parents 2 and 4, which share parent 1);
    B has colliders at 1 and 3 with parents 2 and 4; C has three parents
    1, 3, 4 of node 2.
    """
    try:
        arcs = BAYES_NETS[name]
    except KeyError:
        raise InputError(f"unknown Bayes network {name!r}; expected one of {sorted(BAYES_NETS)}") from None
    parents = [[] for _ in range(4)]
    for a, b in arcs:
        parents[b - 1].append(a - 1)
    coefs = [[coefficient] * len(ps) for ps in parents]
    return LinearGaussianDag(parents, coefs, [noise_sd] * 4, ["X1", "X2", "X3", "X4"])


#: Edges of the four-node undirected models, 1-based as drawn.
UNDIRECTED_MODELS = {
    "cluster": [(1, 2), (2, 3), (2, 4)],
    "chain": [(1, 2), (2, 3), (3, 4)],
    "decomp": [(1, 2), (2, 3), (2, 4), (3, 4)],
    "fourcycle": [(1, 2), (2, 3), (3, 4), (1, 4)],
}

#: Edge strengths used by the fixtures; the sign and zero patterns hold
#: throughout the positive-definite region.
DEFAULT_STRENGTHS = {"cluster": 0.3, "chain": 0.4, "decomp": 0.35, "fourcycle": 0.35}


def undirected_graph(config: str) -> Graph:
    try:
        edges = UNDIRECTED_MODELS[config]
    except KeyError:
        raise InputError(f"unknown configuration {config!r}; expected one of {sorted(UNDIRECTED_MODELS)}") from None
    return Graph(4, [(a - 1, b - 1) for a, b in edges], ["X1", "X2", "X3", "X4"])


def undirected_model(config: str, strength: float | None = None) -> CorrelationMatrix:
    """Gaussian graphical model whose concentration matrix is zero off the graph.

    The concentration matrix has unit diagonal and ``-strength`` on every
    edge; it is inverted and rescaled to a correlation matrix.
    """
    g = undirected_graph(config)
    if strength is None:
        strength = DEFAULT_STRENGTHS[config]
    K = np.eye(4)
    for a, b in g.edges:
        K[a, b] = K[b, a] = -strength
    if np.linalg.eigvalsh(K).min() <= 0:
        raise NotPositiveDefinite(VariableSet(range(4)), g.names)
    return CorrelationMatrix.from_covariance(np.linalg.inv(K), g.names)


@dataclass(frozen=True)
class XorTableParams:
    """Cell probability ``alpha`` of the 2x2x2 table with uniform margins."""

    alpha: float
    beta: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.25:
            raise AlphaOutOfRange(f"alpha={self.alpha} outside the open interval (0, 1/4)")
        object.__setattr__(self, "beta", 0.25 - self.alpha)


def xor_table(params: XorTableParams | float) -> ProbabilityTable:
    """Cells ``(a, b, b, a, b, a, a, b)`` in standard order (last index fastest).

    All three two-way margins are uniform, so every pair is marginally
    independent while the three variables are jointly dependent.
    """
    if not isinstance(params, XorTableParams):
        params = XorTableParams(float(params))
    a, b = params.alpha, params.beta
    cells = np.array([a, b, b, a, b, a, a, b]).reshape(2, 2, 2)
    return ProbabilityTable(cells, ["X1", "X2", "X3"])


def xor_delta_closed_form(alpha: float) -> float:
    """``-4 (a log a + b log b) - 3 log 2`` in millibits, with ``b = 1/4 - a``."""
    p = XorTableParams(alpha)
    a, b = p.alpha, p.beta
    return to_millibits(-4.0 * (a * math.log(a) + b * math.log(b)) - 3.0 * math.log(2.0))


def random_correlation(p: int, rng=None, n_factors: int | None = None, scale: float = 1.0) -> CorrelationMatrix:
    """Random positive-definite correlation matrix from random factor loadings."""
    rng = np.random.default_rng(rng)
    k = p if n_factors is None else n_factors
    W = rng.normal(scale=scale, size=(p, k))
    cov = W @ W.T + np.diag(rng.uniform(0.2, 1.0, size=p))
    return CorrelationMatrix.from_covariance(cov)


def random_probability_table(levels: Sequence[int], rng=None, concentration: float = 1.0) -> ProbabilityTable:
    """Random Dirichlet probability table."""
    rng = np.random.default_rng(rng)
    n = int(np.prod(levels))
    cells = rng.dirichlet(np.full(n, concentration)).reshape(tuple(levels))
    cells = cells / cells.sum()
    return ProbabilityTable(cells, atol=1e-9)
