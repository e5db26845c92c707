"""Synergy, suppression and unshielded colliders.

A triple ``{i, j, k}`` is a synergy when its third-order (possibly
conditional) forward difference is negative: the information the pair
``(i, j)`` explains in ``k`` then exceeds the sum of what each explains
alone. The collider of a synergy is the node opposite its weakest edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .entropy import (
    CorrelationMatrix,
    EntropyOracle,
    GaussianOracle,
    conditional_mutual_information,
    default_zero_tol,
    to_millibits,
)
from .exceptions import InputError, NotASynergy, NotPositiveDefinite, OverlappingSets
from .forward_diff import conditional_delta
from .sets import EMPTY, VariableSet, as_set, check_disjoint

SUPPRESSION_TYPES = ("classical", "negative", "reciprocal", "none")


@dataclass(frozen=True)
class ExplainedDecomposition:
    """Information explained in ``target`` by ``explainers`` given ``given``.

    ``total`` is computed directly from entropies; ``marginal_terms`` are
    the per-explainer informations and ``correction_terms`` the
    differences ``delta_{B u k | given}`` for every ``B`` in the explainers
    with at least two members. ``total == sum(marginal) - sum(correction)``.
    """

    target: int
    explainers: VariableSet
    given: VariableSet
    total: float
    marginal_terms: tuple[tuple[int, float], ...]
    correction_terms: tuple[tuple[VariableSet, float], ...]

    @property
    def sum_of_parts(self) -> float:
        return math.fsum(v for _, v in self.marginal_terms)

    @property
    def identity_residual(self) -> float:
        """``total - (sum of marginal terms - sum of corrections)``."""
        return self.total - (self.sum_of_parts - math.fsum(v for _, v in self.correction_terms))


@dataclass(frozen=True)
class SynergyFinding:
    triple: VariableSet
    delta: float
    conditioning: VariableSet = EMPTY
    collider: int = -1
    weakest_pair_info: float = 0.0
    pair_infos: tuple[tuple[VariableSet, float], ...] = field(default=(), compare=False)
    suppression_type: str = "none"

    def names(self, labels: Sequence[str]) -> list[str]:
        return [labels[i] for i in self.triple]


def explained_information(oracle: EntropyOracle, k: int, A, given=EMPTY) -> ExplainedDecomposition:
    """Decompose ``I(X_k ; X_A | X_given)`` into pairwise parts and corrections.

    For two explainers this is ``I_ik + I_jk - delta_ijk`` (conditioned on
    ``given`` throughout), so a negative third-order difference means the
    pair explains more than the sum of its parts.
    """
    A, given = as_set(A), as_set(given)
    kset = as_set(k)
    check_disjoint(kset, A, given)
    if not A:
        raise InputError("at least one explainer is required")
    total = conditional_mutual_information(oracle, kset, A, given)
    marginal = tuple((i, conditional_mutual_information(oracle, kset, as_set(i), given)) for i in A)
    corrections = tuple(
        (B, conditional_delta(oracle, B | kset, given)) for B in A.subsets(min_size=2)
    )
    return ExplainedDecomposition(int(k), A, given, total, marginal, corrections)


def _collider(oracle, triple: VariableSet, given: VariableSet):
    infos = []
    for a, b in combinations(list(triple), 2):
        pair = VariableSet([a, b])
        infos.append((pair, conditional_mutual_information(oracle, as_set(a), as_set(b), given)))
    # min() keeps the first minimum, and pairs come in lexicographic order
    weakest, weakest_info = min(infos, key=lambda t: t[1])
    (collider,) = tuple(triple - weakest)
    return collider, weakest_info, tuple(infos)


def make_finding(oracle, triple, given=EMPTY, delta_value=None, response=None, corr_tol=1e-6) -> SynergyFinding:
    """Build a :class:`SynergyFinding` for a triple known to be a synergy.

    ``corr_tol`` is the correlation below which an explainer counts as
    uncorrelated with the response when typing suppression.
    """
    triple, given = as_set(triple), as_set(given)
    if delta_value is None:
        delta_value = conditional_delta(oracle, triple, given)
    collider, weakest, infos = _collider(oracle, triple, given)
    stype = "none"
    if response is not None and isinstance(oracle, GaussianOracle) and response in triple:
        corr = oracle.corr if not given else _partial_correlations(oracle.corr, triple, given)
        try:
            stype = classify_suppression(corr, *triple, response=response, zero_tol=corr_tol)
        except NotASynergy:
            stype = "none"
    return SynergyFinding(triple, float(delta_value), given, collider, weakest, infos, stype)


def detect_synergies(
    oracle: EntropyOracle,
    triples: Iterable,
    given=EMPTY,
    threshold: float = 0.0,
    zero_tol: float | None = None,
    response: int | None = None,
) -> list[SynergyFinding]:
    """Triples whose (conditional) third-order difference is below ``-threshold``.

    Parameters
    ----------
    oracle : EntropyOracle
    triples : iterable of 3-element sets
    given : VariableSet, optional
        Conditioning set, disjoint from every triple.
    threshold : float
        Millibits; a triple is reported when ``delta < -threshold``.
    zero_tol : float, optional
        Values within ``zero_tol`` of zero are never reported, whatever the
        threshold. Defaults to :func:`default_zero_tol` of the oracle.
    response : int, optional
        Declared response variable; when given and the oracle is Gaussian
        the suppression type is filled in.

    Returns
    -------
    list of SynergyFinding
        Sorted by ascending ``delta``; ties keep ascending index order.
    """
    if threshold < 0:
        raise InputError("threshold must be nonnegative")
    given = as_set(given)
    tol = default_zero_tol(oracle) if zero_tol is None else zero_tol
    cut = -max(threshold, tol)
    found = []
    for t in triples:
        t = as_set(t)
        if len(t) != 3:
            raise InputError(f"{t!r} is not a triple")
        if not t.isdisjoint(given):
            raise OverlappingSets(f"triple {t!r} meets the conditioning set")
        d = conditional_delta(oracle, t, given)
        if d < cut:
            found.append(make_finding(oracle, t, given, d, response))
    found.sort(key=lambda f: (f.delta, tuple(f.triple)))
    return found


def _partial_correlations(corr: CorrelationMatrix, triple: VariableSet, given: VariableSet) -> CorrelationMatrix:
    """Correlation matrix of the triple's residuals after regressing on ``given``.

    Returned at full size so that indices keep their meaning; entries
    outside the triple are left as the identity.
    """
    t, g = list(triple), list(given)
    S = corr.values
    Stt = S[np.ix_(t, t)]
    Stg = S[np.ix_(t, g)]
    Sgg = S[np.ix_(g, g)]
    try:
        cond = Stt - Stg @ np.linalg.solve(Sgg, Stg.T)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(given, corr.names) from None
    d = np.sqrt(np.diag(cond))
    sub = cond / np.outer(d, d)
    full = np.eye(corr.dim)
    full[np.ix_(t, t)] = sub
    return CorrelationMatrix(full, corr.names)


def partial_correlation(corr: CorrelationMatrix, i: int, j: int, given=EMPTY) -> float:
    """``rho_{ij|given}`` from the inverse of the relevant submatrix."""
    given = as_set(given)
    idx = [i, j] + list(given)
    sub = corr.values[np.ix_(idx, idx)]
    try:
        np.linalg.cholesky(sub)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(VariableSet(idx), corr.names) from None
    prec = np.linalg.inv(sub)
    return float(-prec[0, 1] / math.sqrt(prec[0, 0] * prec[1, 1]))


def gaussian_delta_closed_form(r12: float, r13: float, r23: float, form: str = "determinant") -> float:
    """Third-order difference of three standardized Gaussians, in millibits.

    ``form="determinant"``::

        1/2 log (1 - r12^2 - r13^2 - r23^2 + 2 r12 r13 r23)
                / ((1 - r12^2)(1 - r13^2)(1 - r23^2))

    ``form="partial"``: ``1/2 log (1 - r12.3^2) / (1 - r12^2)`` with the
    partial correlation ``r12.3``.
    """
    det = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23
    margins = (1.0 - r12 * r12) * (1.0 - r13 * r13) * (1.0 - r23 * r23)
    if not (det > 0 and margins > 0):
        raise NotPositiveDefinite(VariableSet([0, 1, 2]))
    if form == "determinant":
        return to_millibits(0.5 * math.log(det / margins))
    if form == "partial":
        r12_3 = (r12 - r13 * r23) / math.sqrt((1.0 - r13 * r13) * (1.0 - r23 * r23))
        return to_millibits(0.5 * (math.log1p(-r12_3 * r12_3) - math.log1p(-r12 * r12)))
    raise InputError(f"unknown form {form!r}")


def partial_gaussian_delta(corr: CorrelationMatrix, i: int, j: int, k: int, A=EMPTY) -> float:
    """``delta_{ijk|A}`` for Gaussians via partial correlations, in millibits.

    ``1/2 log (1 - rho_{ij|A k}^2) / (1 - rho_{ij|A}^2)``.
    """
    A = as_set(A)
    check_disjoint(VariableSet([i, j, k]), A)
    if len({i, j, k}) != 3:
        raise InputError("i, j, k must be distinct")
    r_a = partial_correlation(corr, i, j, A)
    r_ak = partial_correlation(corr, i, j, A | as_set(k))
    return to_millibits(0.5 * (math.log1p(-r_ak * r_ak) - math.log1p(-r_a * r_a)))


def classify_suppression(corr, i: int, j: int, k: int, response: int, zero_tol: float = 1e-6) -> str:
    """Suppression type of a Gaussian synergy with a declared response.

    With ``x1, x2`` the two explainers and ``y`` the response:

    * ``classical``: one explainer is uncorrelated with ``y`` (within
      ``zero_tol``).
    * ``reciprocal``: both explainers correlate positively with ``y`` and
      negatively with each other.
    * ``negative``: exactly one correlation is negative and it involves
      ``y``; or all three are positive and one regression coefficient of
      ``y`` on ``(x1, x2)`` is negative.
    * ``none``: any other sign pattern.

    Only the sign pattern of the given labelling is used; flipping the sign
    of a variable can move a triple between ``negative`` and
    ``reciprocal``.

    Raises
    ------
    NotASynergy
        If the triple's third-order difference is not negative.
    """
    if response not in (i, j, k) or len({i, j, k}) != 3:
        raise InputError("response must be one of three distinct indices")
    R = corr.values if isinstance(corr, CorrelationMatrix) else np.asarray(corr, dtype=float)
    x1, x2 = [v for v in (i, j, k) if v != response]
    r1, r2, r12 = R[response, x1], R[response, x2], R[x1, x2]
    if gaussian_delta_closed_form(r1, r2, r12) >= 0:
        raise NotASynergy(f"triple ({i}, {j}, {k}) has a nonnegative third-order difference")
    if abs(r1) <= zero_tol or abs(r2) <= zero_tol:
        return "classical"
    if r1 > 0 and r2 > 0 and r12 < 0:
        return "reciprocal"
    n_neg = (r1 < 0) + (r2 < 0) + (r12 < 0)
    if n_neg == 1 and r12 > 0:
        return "negative"
    if n_neg == 0:
        b1 = r1 - r2 * r12
        b2 = r2 - r1 * r12
        if b1 < 0 or b2 < 0:
            return "negative"
    return "none"


def unshielded_collider_test(oracle: EntropyOracle, i: int, j: int, k: int, A=EMPTY, zero_tol: float | None = None) -> bool:
    """Whether ``I_{ij|A} = 0`` and ``delta_{ijk|A} <= 0`` (up to ``zero_tol``).

    In a Bayes network this pair of conditions characterizes an unshielded
    collider ``i -> k <- j`` with ``A`` a separating set for ``i, j``.
    """
    A = as_set(A)
    if len({i, j, k}) != 3:
        raise InputError("i, j, k must be distinct")
    check_disjoint(VariableSet([i, j, k]), A)
    tol = default_zero_tol(oracle) if zero_tol is None else zero_tol
    info = conditional_mutual_information(oracle, as_set(i), as_set(j), A)
    d = conditional_delta(oracle, VariableSet([i, j, k]), A)
    return abs(info) <= tol and d <= tol
