"""Entropy oracles over variable subsets.

Three sources of the entropy function ``h`` are supported: a Gaussian
family given by its correlation matrix (``h_A = 1/2 log det R_AA``), a
categorical distribution given by its full probability table, and a plain
table of precomputed values. Every oracle memoizes ``h`` per subset, keyed
by the bitmask, and counts how often each subset was actually computed.

All internal values are in nats; :func:`to_millibits` is the single
conversion point to the reporting unit.
"""

from __future__ import annotations

import math
import threading
from collections import Counter
from typing import Mapping, Sequence

import numpy as np

from .exceptions import InputError, MissingSubset, NotPositiveDefinite
from .sets import EMPTY, MAX_VARIABLES, VariableSet, as_set, check_disjoint

MILLIBITS_PER_NAT = 1024.0 / math.log(2.0)

#: default tolerance for "delta is zero" with exact (model-derived) oracles
ANALYTIC_ZERO_TOL = 1e-6
#: default tolerance for oracles estimated from data
DATA_ZERO_TOL = 1.0


def to_millibits(x):
    """Convert nats to millibits (1024 mbits = 1 bit)."""
    return x * MILLIBITS_PER_NAT


def to_nats(x):
    return x / MILLIBITS_PER_NAT


def _default_names(p):
    return tuple(f"X{i + 1}" for i in range(p))


class CorrelationMatrix:
    """Symmetric matrix with unit diagonal and variable labels.

    Positive definiteness is not checked here: only the principal
    submatrices actually used need to be, and those are checked when the
    entropy is evaluated.

    Parameters
    ----------
    values : array_like of shape (p, p)
    names : sequence of str, optional
        Defaults to ``X1 .. Xp``.
    atol : float
        Allowed asymmetry and deviation of the diagonal from one.
    """

    def __init__(self, values, names: Sequence[str] | None = None, atol: float = 1e-9):
        arr = np.array(values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InputError(f"correlation matrix must be square, got shape {arr.shape}")
        p = arr.shape[0]
        if p > MAX_VARIABLES:
            raise InputError(f"at most {MAX_VARIABLES} variables are supported, got {p}")
        if not np.all(np.isfinite(arr)):
            raise InputError("correlation matrix has non-finite entries")
        if np.max(np.abs(arr - arr.T), initial=0.0) > atol:
            raise InputError("correlation matrix is not symmetric")
        if np.max(np.abs(np.diag(arr) - 1.0), initial=0.0) > atol:
            raise InputError("correlation matrix diagonal must be 1")
        off = arr[~np.eye(p, dtype=bool)]
        if off.size and np.max(np.abs(off)) > 1.0 + atol:
            raise InputError("correlations must lie in [-1, 1]")
        arr = (arr + arr.T) / 2.0
        np.fill_diagonal(arr, 1.0)
        arr.setflags(write=False)
        self.values = arr
        self.names = tuple(names) if names is not None else _default_names(p)
        if len(self.names) != p:
            raise InputError(f"{len(self.names)} names for {p} variables")

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_lower_triangle(cls, lower: Sequence[float], names=None) -> "CorrelationMatrix":
        """Build from a row-wise lower triangle including the diagonal.

        ``(1.0, 0.2, 1.0, 0.7, 0.5, 1.0)`` gives rho_12 = 0.2, rho_13 = 0.7,
        rho_23 = 0.5.
        """
        n = len(lower)
        p = int(round((math.sqrt(8 * n + 1) - 1) / 2))
        if p * (p + 1) // 2 != n:
            raise InputError(f"{n} values do not form a lower triangle")
        arr = np.zeros((p, p))
        arr[np.tril_indices(p)] = lower
        arr = arr + arr.T - np.diag(np.diag(arr))
        return cls(arr, names)

    @classmethod
    def from_covariance(cls, cov, names=None) -> "CorrelationMatrix":
        cov = np.asarray(cov, dtype=float)
        d = np.sqrt(np.diag(cov))
        return cls(cov / np.outer(d, d), names)

    def submatrix(self, A) -> np.ndarray:
        idx = list(as_set(A))
        return self.values[np.ix_(idx, idx)]

    def permuted(self, perm: Sequence[int]) -> "CorrelationMatrix":
        """Relabel so that new variable ``perm[i]`` is old variable ``i``."""
        inv = np.argsort(perm)
        return CorrelationMatrix(
            self.values[np.ix_(inv, inv)], [self.names[i] for i in inv]
        )

    def __repr__(self):
        return f"CorrelationMatrix(dim={self.dim}, names={list(self.names)})"


class ProbabilityTable:
    """Joint probability mass function over categorical variables.

    ``cells`` is an array with one axis per variable; axis ``i`` has
    ``levels[i]`` entries.
    """

    def __init__(self, cells, names: Sequence[str] | None = None, level_names=None, atol: float = 1e-12):
        arr = np.array(cells, dtype=float)
        if arr.ndim == 0 or arr.ndim > MAX_VARIABLES:
            raise InputError(f"table must have between 1 and {MAX_VARIABLES} axes")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise InputError("probabilities must be finite and nonnegative")
        total = math.fsum(arr.ravel())
        if abs(total - 1.0) > atol:
            raise InputError(f"probabilities sum to {total!r}, not 1")
        arr.setflags(write=False)
        self.cells = arr
        p = arr.ndim
        self.names = tuple(names) if names is not None else _default_names(p)
        if len(self.names) != p:
            raise InputError(f"{len(self.names)} names for {p} variables")
        if level_names is None:
            level_names = [tuple(str(k) for k in range(n)) for n in arr.shape]
        self.level_names = tuple(tuple(ln) for ln in level_names)

    @classmethod
    def from_counts(cls, counts, names=None, level_names=None) -> "ProbabilityTable":
        counts = np.asarray(counts, dtype=float)
        total = counts.sum()
        if not total > 0:
            raise InputError("counts must have a positive total")
        return cls(counts / total, names, level_names, atol=1e-9)

    @property
    def levels(self) -> tuple[int, ...]:
        return self.cells.shape

    @property
    def dim(self) -> int:
        return self.cells.ndim

    def marginal(self, A) -> np.ndarray:
        A = as_set(A)
        drop = tuple(i for i in range(self.dim) if i not in A)
        if A - VariableSet.full(self.dim):
            raise InputError(f"{A!r} is not within the table's {self.dim} variables")
        return self.cells.sum(axis=drop)

    def permuted(self, perm: Sequence[int]) -> "ProbabilityTable":
        inv = np.argsort(perm)
        return ProbabilityTable(
            np.transpose(self.cells, inv),
            [self.names[i] for i in inv],
            [self.level_names[i] for i in inv],
            atol=1e-9,
        )

    def __repr__(self):
        return f"ProbabilityTable(levels={self.levels}, names={list(self.names)})"


def gaussian_entropy(corr: CorrelationMatrix, A) -> float:
    """Entropy ``1/2 log det R_AA`` of a standardized Gaussian margin, in nats.

    Additive constants are dropped, so singletons and the empty set have
    entropy zero and every other margin has nonpositive entropy.

    Raises
    ------
    NotPositiveDefinite
        If the Cholesky factorization of ``R_AA`` fails.
    """
    A = as_set(A)
    if A - VariableSet.full(corr.dim):
        raise InputError(f"{A!r} is not within the matrix's {corr.dim} variables")
    if len(A) <= 1:
        return 0.0
    try:
        chol = np.linalg.cholesky(corr.submatrix(A))
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(A, corr.names) from None
    diag = np.diag(chol)
    if not np.all(diag > 0) or not np.all(np.isfinite(diag)):
        raise NotPositiveDefinite(A, corr.names)
    return float(np.sum(np.log(diag)))


def categorical_entropy(table: ProbabilityTable, A) -> float:
    """Shannon entropy of the margin on ``A`` in nats, with 0 log 0 = 0."""
    A = as_set(A)
    if not A:
        return 0.0
    m = table.marginal(A).ravel()
    m = m[m > 0]
    return -math.fsum(m * np.log(m))


class EntropyOracle:
    """Memoized source of entropy values ``h_A`` in nats.

    Subclasses implement :meth:`_compute`. The memo guarantees that each
    subset is computed at most once; :attr:`evaluations` counts actual
    computations per subset and :attr:`hits` counts memo hits, so callers
    can check that a scan never recomputes an entropy.

    Attributes
    ----------
    p : int
        Number of variables.
    names : tuple of str
    data_derived : bool
        True when the oracle was estimated from observations. It selects
        the default zero tolerance, see :func:`default_zero_tol`.
    """

    kind = "abstract"

    def __init__(self, p: int, names=None, data_derived: bool = False):
        if not 0 <= p <= MAX_VARIABLES:
            raise InputError(f"p={p} outside 0..{MAX_VARIABLES}")
        self.p = p
        self.names = tuple(names) if names is not None else _default_names(p)
        self.data_derived = data_derived
        self._memo: dict[int, float] = {0: 0.0}
        self._lock = threading.Lock()
        self.evaluations: Counter = Counter()
        self.hits = 0

    @property
    def universe(self) -> VariableSet:
        return VariableSet.full(self.p)

    def entropy(self, A) -> float:
        """``h_A`` in nats."""
        key = int(as_set(A))
        with self._lock:
            if key in self._memo:
                self.hits += 1
                return self._memo[key]
            if key & ~int(self.universe):
                raise InputError(f"{VariableSet.from_bits(key)!r} is outside the oracle's {self.p} variables")
            value = self._compute(VariableSet.from_bits(key))
            self._memo[key] = value
            self.evaluations[key] += 1
            return value

    __call__ = entropy

    def clear_cache(self) -> None:
        with self._lock:
            self._memo = {0: 0.0}
            self.evaluations = Counter()
            self.hits = 0

    @property
    def n_cached(self) -> int:
        return len(self._memo) - 1

    def _compute(self, A: VariableSet) -> float:
        raise NotImplementedError

    def describe(self) -> str:
        return f"{self.kind}(p={self.p})"

    def __repr__(self):
        return f"{type(self).__name__}(p={self.p}, names={list(self.names)})"


class GaussianOracle(EntropyOracle):
    kind = "gaussian"

    def __init__(self, corr: CorrelationMatrix, data_derived: bool = False):
        if not isinstance(corr, CorrelationMatrix):
            corr = CorrelationMatrix(corr)
        super().__init__(corr.dim, corr.names, data_derived)
        self.corr = corr

    def _compute(self, A):
        return gaussian_entropy(self.corr, A)


class CategoricalOracle(EntropyOracle):
    kind = "categorical"

    def __init__(self, table: ProbabilityTable, data_derived: bool = False):
        if not isinstance(table, ProbabilityTable):
            table = ProbabilityTable(table)
        super().__init__(table.dim, table.names, data_derived)
        self.table = table

    def _compute(self, A):
        return categorical_entropy(self.table, A)


class TabulatedOracle(EntropyOracle):
    """Oracle backed by a fixed map from subsets to entropies in nats.

    Every subset that will be queried must be present; ``h`` of the empty
    set is fixed at zero regardless of the mapping.
    """

    kind = "tabulated"

    def __init__(self, values: Mapping, p: int, names=None, data_derived: bool = False):
        super().__init__(p, names, data_derived)
        self.values = {int(as_set(k)): float(v) for k, v in values.items()}
        if self.values.get(0, 0.0) != 0.0:
            raise InputError("entropy of the empty set must be 0")

    def _compute(self, A):
        try:
            return self.values[int(A)]
        except KeyError:
            raise MissingSubset(f"no tabulated entropy for {A!r}") from None


def default_zero_tol(oracle: EntropyOracle) -> float:
    """Tolerance below which a millibit value is treated as zero."""
    return DATA_ZERO_TOL if oracle.data_derived else ANALYTIC_ZERO_TOL


def conditional_mutual_information(oracle: EntropyOracle, A, B, C=EMPTY) -> float:
    """Information against ``X_A indep X_B | X_C``, in millibits.

    Evaluated as ``-h(ABC) + h(AC) + h(BC) - h(C)``.
    """
    A, B, C = as_set(A), as_set(B), as_set(C)
    check_disjoint(A, B, C)
    if not A or not B:
        raise InputError("both sides of the independence statement must be nonempty")
    h = oracle.entropy
    terms = (-h(A | B | C), h(A | C), h(B | C), -h(C))
    return to_millibits(math.fsum(terms))


def mutual_information(oracle: EntropyOracle, i, j) -> float:
    """Marginal information ``I_ij`` in millibits."""
    return conditional_mutual_information(oracle, as_set(i), as_set(j), EMPTY)
