"""Forward differences of the entropy function.

The forward differences ``delta`` are the Moebius inverse of ``h`` on the
subset lattice::

    h_A     = sum_{B <= A} delta_B
    delta_A = sum_{B <= A} (-1)^{|A|-|B|} h_B

Pairs give minus the mutual information, ``delta_ij = -I_ij``; third-order
terms measure how much conditioning on ``k`` changes ``I_ij``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .entropy import EntropyOracle, conditional_mutual_information, to_millibits
from .exceptions import InputError, MissingSubset, OverlappingSets, UniverseTooLarge
from .sets import EMPTY, MAX_ENUMERATION, VariableSet, as_set, set_key

#: ``conditional_delta`` sums unconditional deltas over subsets of the
#: conditioning set up to this size, and uses conditional entropies beyond it.
RECURSION_MAX_GIVEN = 12


class DeltaTable(Mapping):
    """Forward differences in millibits, keyed by :class:`VariableSet`.

    The table is downward closed: whenever a set is stored, so are all its
    subsets, which keeps :meth:`reconstruct_entropy` evaluable. Values are
    kept at full precision; rounding to two decimals happens only when a
    report is written.
    """

    def __init__(self, p: int, values: Mapping, names=None, provenance: str = "", check_closure=True):
        self.p = p
        self.names = tuple(names) if names is not None else tuple(f"X{i + 1}" for i in range(p))
        self.provenance = provenance
        self._values = {VariableSet.from_bits(int(k)): float(v) for k, v in values.items()}
        self._values.setdefault(EMPTY, 0.0)
        if check_closure:
            for A in self._values:
                for i in A:
                    if A.remove(i) not in self._values:
                        raise MissingSubset(f"table is not downward closed: {A.remove(i)!r} missing")

    def __getitem__(self, A) -> float:
        key = as_set(A)
        try:
            return self._values[key]
        except KeyError:
            raise MissingSubset(f"no forward difference stored for {key!r}") from None

    def __iter__(self) -> Iterator[VariableSet]:
        return iter(sorted(self._values, key=set_key))

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, A) -> bool:
        try:
            return as_set(A) in self._values
        except InputError:
            return False

    def of_order(self, order: int) -> dict[VariableSet, float]:
        return {A: self._values[A] for A in self if len(A) == order}

    def label(self, A, sep=":") -> str:
        return as_set(A).label(self.names, sep)

    def reconstruct_entropy(self, A) -> float:
        return reconstruct_entropy(self, A)

    def __repr__(self):
        return f"DeltaTable(p={self.p}, n_sets={len(self)}, provenance={self.provenance!r})"


@dataclass(frozen=True)
class ConditionalDeltaQuery:
    """Request for ``delta_{target | given}``."""

    target: VariableSet
    given: VariableSet = EMPTY

    def __post_init__(self):
        object.__setattr__(self, "target", as_set(self.target))
        object.__setattr__(self, "given", as_set(self.given))
        if not self.target:
            raise InputError("the target set must be nonempty")
        if not self.target.isdisjoint(self.given):
            raise OverlappingSets(f"target {self.target!r} and given {self.given!r} overlap")


def _alternating_sum(h, A: VariableSet, base: VariableSet = EMPTY) -> float:
    """``sum_{C <= A} (-1)^{|A|-|C|} h(C | base)`` in nats, compensated."""
    n = len(A)
    if n > MAX_ENUMERATION:
        raise UniverseTooLarge(f"|A| = {n} exceeds {MAX_ENUMERATION}")
    terms = []
    for C in A.subsets():
        sign = -1.0 if (n - len(C)) % 2 else 1.0
        terms.append(sign * h(C | base))
    return math.fsum(terms)


def delta(oracle: EntropyOracle, A) -> float:
    """Single forward difference ``delta_A`` in millibits."""
    return to_millibits(_alternating_sum(oracle.entropy, as_set(A)))


def forward_differences(oracle: EntropyOracle, universe=None) -> DeltaTable:
    """Forward differences of every subset of ``universe``.

    Entropies of all ``2^n`` subsets are gathered once into an array indexed
    by local bitmask, then inverted in place with the fast subset Moebius
    transform (one differencing pass per variable).

    Parameters
    ----------
    oracle : EntropyOracle
    universe : VariableSet or iterable of int, optional
        Defaults to all of the oracle's variables. At most 25 variables.
    """
    U = oracle.universe if universe is None else as_set(universe)
    members = list(U)
    n = len(members)
    if n > MAX_ENUMERATION:
        raise UniverseTooLarge(f"universe of {n} variables exceeds the limit of {MAX_ENUMERATION}")
    size = 1 << n
    # local bitmask -> global bitmask
    glob = np.zeros(size, dtype=np.int64)
    for b, idx in enumerate(members):
        step = 1 << b
        glob[step : 2 * step] = glob[:step] | (1 << idx)
    h = np.array([oracle.entropy(VariableSet.from_bits(int(g))) for g in glob])
    d = h.copy()
    for b in range(n):
        step = 1 << b
        view = d.reshape(-1, 2, step)
        view[:, 1, :] -= view[:, 0, :]
    d = to_millibits(d)
    values = {VariableSet.from_bits(int(g)): float(v) for g, v in zip(glob, d)}
    return DeltaTable(oracle.p, values, oracle.names, provenance=oracle.describe(), check_closure=False)


def reconstruct_entropy(deltas: DeltaTable, A) -> float:
    """``h_A = sum_{B <= A} delta_B`` in millibits."""
    A = as_set(A)
    return math.fsum(deltas[B] for B in A.subsets())


def conditional_delta(oracle: EntropyOracle, target, given=EMPTY) -> float:
    """Conditional forward difference ``delta_{A|B}`` in millibits.

    For a small conditioning set this is the sum of unconditional
    differences ``sum_{D <= B} delta_{A u D}``; otherwise the inversion is
    applied directly to conditional entropies ``h_{C u B} - h_B``. Both
    routes are exact and share the oracle's memo.
    """
    q = target if isinstance(target, ConditionalDeltaQuery) else ConditionalDeltaQuery(target, given)
    A, B = q.target, q.given
    if len(A | B) > MAX_ENUMERATION:
        raise UniverseTooLarge(f"|A u B| = {len(A | B)} exceeds {MAX_ENUMERATION}")
    h = oracle.entropy
    if len(B) <= RECURSION_MAX_GIVEN:
        total = math.fsum(_alternating_sum(h, A | D) for D in B.subsets())
    else:
        hB = h(B)
        total = _alternating_sum(lambda C: h(C) - hB, A, base=B)
    return to_millibits(total)


def cmi_from_deltas(deltas: DeltaTable, i: int, j: int, A=EMPTY) -> float:
    """``I_{ij|A} = -sum_{ij <= B <= A u ij} delta_B`` in millibits."""
    A = as_set(A)
    if i == j:
        raise InputError("i and j must differ")
    if i in A or j in A:
        raise OverlappingSets("i and j must not be in the conditioning set")
    pair = VariableSet([i, j])
    return -math.fsum(deltas[pair | D] for D in A.subsets())


def delta_third_order(oracle: EntropyOracle, i: int, j: int, k: int, method: str = "entropy") -> float:
    """Third-order difference ``delta_ijk`` in millibits.

    ``method="entropy"`` uses the eight-term inversion formula;
    ``method="information"`` evaluates ``I_ij - I_ij|k``. The two agree to
    rounding and the value is symmetric in ``i, j, k``.
    """
    if len({i, j, k}) != 3:
        raise InputError("i, j, k must be distinct")
    if method == "entropy":
        return delta(oracle, VariableSet([i, j, k]))
    if method == "information":
        a, b, c = as_set(i), as_set(j), as_set(k)
        return conditional_mutual_information(oracle, a, b) - conditional_mutual_information(oracle, a, b, c)
    raise InputError(f"unknown method {method!r}")
