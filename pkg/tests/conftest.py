import itertools
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.stats import multivariate_normal

from fwdentropy.entropy import MILLIBITS_PER_NAT

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

GAUSS_CONST = 0.5 * (1.0 + math.log(2.0 * math.pi))


def brute_gaussian_h(R, A):
    """Entropy in nats via scipy's differential entropy minus the per-axis constant."""
    A = sorted(A)
    if len(A) <= 1:
        return 0.0
    sub = np.asarray(R)[np.ix_(A, A)]
    return float(multivariate_normal(mean=np.zeros(len(A)), cov=sub).entropy()) - len(A) * GAUSS_CONST


def brute_categorical_h(cells, A):
    """Entropy in nats by summing cells into a dict keyed by the margin's levels."""
    cells = np.asarray(cells)
    A = sorted(A)
    if not A:
        return 0.0
    marg = {}
    for idx in itertools.product(*(range(n) for n in cells.shape)):
        key = tuple(idx[a] for a in A)
        marg[key] = marg.get(key, 0.0) + float(cells[idx])
    return -sum(q * math.log(q) for q in marg.values() if q > 0)


def brute_delta(h, A):
    """Moebius inverse by explicit enumeration, in millibits."""
    A = sorted(A)
    total = 0.0
    for r in range(len(A) + 1):
        for C in itertools.combinations(A, r):
            total += (-1) ** (len(A) - r) * h(C)
    return total * MILLIBITS_PER_NAT


def brute_gaussian_cmi(R, i, j, A=()):
    """-1/2 log(1 - rho^2_{ij|A}) in millibits, from an inverted submatrix."""
    idx = [i, j] + sorted(A)
    P = np.linalg.inv(np.asarray(R)[np.ix_(idx, idx)])
    r = -P[0, 1] / math.sqrt(P[0, 0] * P[1, 1])
    return -0.5 * math.log(1.0 - r * r) * MILLIBITS_PER_NAT


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
