"""scikit-learn compatible front ends.

These wrap the functional core so that the analysis of an observed data
matrix composes with pipelines, ``clone`` and ``get_params``:

>>> from sklearn.pipeline import make_pipeline
>>> pipe = make_pipeline(NormalScores(seed=1), ForwardDifferences())  # doctest: +SKIP
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .entropy import DATA_ZERO_TOL, CorrelationMatrix, GaussianOracle
from .forward_diff import forward_differences
from .graph_scan import Graph, cluster_scan, colour_synergies
from .io import DataMatrix, empirical_correlation, normal_scores_array
from .sets import VariableSet


def _names(X, n_features):
    cols = getattr(X, "columns", None)
    if cols is not None:
        return tuple(str(c) for c in cols)
    return tuple(f"X{i + 1}" for i in range(n_features))


class NormalScores(TransformerMixin, BaseEstimator):
    """Rank-based normal scores, column by column.

    Each column is replaced by ``Phi^-1(rank / (n + 1))``, ties broken in
    a random order drawn from ``seed``. The transform is computed on the
    rows passed to :meth:`transform`; :meth:`fit` only records the input
    width.

    Parameters
    ----------
    seed : int or None, default=0
        Seed for tie breaking.
    """

    def __init__(self, seed=0):
        self.seed = seed

    def fit(self, X, y=None):
        X = check_array(X, dtype=float, ensure_min_samples=3)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float, ensure_min_samples=3)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return normal_scores_array(X, self.seed)


class _GaussianBase(BaseEstimator):
    def _oracle(self, X):
        names = _names(X, np.shape(X)[1] if np.ndim(X) == 2 else 0)
        X = check_array(X, dtype=float, ensure_min_samples=3, ensure_min_features=2)
        self.n_features_in_ = X.shape[1]
        self.feature_names_in_ = np.array(names, dtype=object)
        if self.normal_scores:
            X = normal_scores_array(X, self.seed)
        self.correlation_ = empirical_correlation(DataMatrix(X, names))
        return GaussianOracle(self.correlation_, data_derived=True)


class ForwardDifferences(_GaussianBase):
    """Forward differences of the Gaussian entropy of observed data.

    Parameters
    ----------
    universe : iterable of int, optional
        Column indices to expand; defaults to all columns (at most 25).
    normal_scores : bool, default=True
        Transform columns to normal scores before correlating.
    seed : int, default=0
        Tie-breaking seed for the normal scores.

    Attributes
    ----------
    correlation_ : CorrelationMatrix
    deltas_ : DeltaTable
        Millibit forward differences of every subset of the universe.
    """

    def __init__(self, universe=None, normal_scores=True, seed=0):
        self.universe = universe
        self.normal_scores = normal_scores
        self.seed = seed

    def fit(self, X, y=None):
        oracle = self._oracle(X)
        universe = None if self.universe is None else VariableSet(self.universe)
        self.oracle_ = oracle
        self.deltas_ = forward_differences(oracle, universe)
        return self

    def transform(self, X=None):
        """Return ``(subset, delta)`` pairs of order two and above."""
        check_is_fitted(self, "deltas_")
        return [(A, v) for A, v in self.deltas_.items() if len(A) >= 2]


class SynergyScanner(_GaussianBase):
    """Graph-guided synergy scan of observed data.

    Parameters
    ----------
    graph : Graph or iterable of (int, int), optional
        Independence graph over the columns; the complete graph if omitted.
    max_order : int, default=3
    threshold : float, default=15.0
        Millibits; triples with ``delta < -threshold`` are reported.
    zero_tol : float, default=1.0
        Millibits below which a difference counts as zero.
    normal_scores : bool, default=True
    seed : int, default=0
    response : int, optional
        Column index of a response, for typing suppression.

    Attributes
    ----------
    scan_ : ScanResult
    findings_ : list of SynergyFinding
    colouring_ : ColouredGraph
    """

    def __init__(self, graph=None, max_order=3, threshold=15.0, zero_tol=DATA_ZERO_TOL,
                 normal_scores=True, seed=0, response=None):
        self.graph = graph
        self.max_order = max_order
        self.threshold = threshold
        self.zero_tol = zero_tol
        self.normal_scores = normal_scores
        self.seed = seed
        self.response = response

    def _graph(self, p, names):
        if self.graph is None:
            return Graph.complete(p, names)
        if isinstance(self.graph, Graph):
            if self.graph.p != p:
                raise ValueError(f"graph has {self.graph.p} nodes, X has {p} columns")
            return self.graph
        return Graph(p, self.graph, names)

    def fit(self, X, y=None):
        oracle = self._oracle(X)
        g = self._graph(oracle.p, oracle.names)
        self.oracle_ = oracle
        self.graph_ = g
        self.scan_ = cluster_scan(g, oracle, self.max_order, self.threshold, self.zero_tol, self.response)
        self.findings_ = self.scan_.findings
        self.deltas_ = self.scan_.deltas
        self.colouring_ = colour_synergies(g, self.findings_)
        return self

    def predict(self, X=None):
        """Node colours (``red``, ``yellow`` or ``white``) in column order."""
        check_is_fitted(self, "colouring_")
        return np.array([self.colouring_.node_colours[v] for v in range(self.graph_.p)], dtype=object)


def fit_correlation(estimator, corr: CorrelationMatrix):
    """Run a fitted-style analysis directly from a known correlation matrix.

    Sets the same attributes as ``fit``. The oracle is analytic, so scans
    still use the estimator's own ``zero_tol``.
    """
    oracle = GaussianOracle(corr)
    estimator.correlation_ = corr
    estimator.n_features_in_ = corr.dim
    estimator.oracle_ = oracle
    if isinstance(estimator, ForwardDifferences):
        universe = None if estimator.universe is None else VariableSet(estimator.universe)
        estimator.deltas_ = forward_differences(oracle, universe)
    elif isinstance(estimator, SynergyScanner):
        g = estimator._graph(corr.dim, corr.names)
        estimator.graph_ = g
        estimator.scan_ = cluster_scan(g, oracle, estimator.max_order, estimator.threshold,
                                       estimator.zero_tol, estimator.response)
        estimator.findings_ = estimator.scan_.findings
        estimator.deltas_ = estimator.scan_.deltas
        estimator.colouring_ = colour_synergies(g, estimator.findings_)
    else:
        raise TypeError(f"unsupported estimator {type(estimator).__name__}")
    return estimator
