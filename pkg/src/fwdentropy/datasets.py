"""Bundled example inputs."""

from __future__ import annotations

from importlib import resources

from .entropy import CorrelationMatrix, ProbabilityTable
from .graph_scan import Graph


def data_path(name: str):
    return resources.files("fwdentropy").joinpath("data", name)


def _corr(name):
    from .io import read_correlation_csv

    with resources.as_file(data_path(name)) as p:
        return read_correlation_csv(p)


def gaussian_triple(rho12: float = 0.2) -> CorrelationMatrix:
    """Three Gaussians with rho_13 = 0.7, rho_23 = 0.5 and the given rho_12."""
    return CorrelationMatrix.from_lower_triangle((1.0, rho12, 1.0, 0.7, 0.5, 1.0))


def gp_burnout() -> CorrelationMatrix:
    """Job dissatisfaction and burn-out of 207 GPs, measured in two waves."""
    return _corr("gp_burnout.csv")


def wine_correlation() -> CorrelationMatrix:
    """Normal-score correlations of the 11 white-wine physico-chemical variables."""
    return _corr("wine_correlation.csv")


def wine_skeleton() -> Graph:
    """Edges implied by the wine triples with the largest differences.

    This is not the full estimated skeleton: only the edges needed for
    those ten triples to be node clusters are included.
    """
    from .io import read_edge_list

    names = wine_correlation().names
    with resources.as_file(data_path("wine_skeleton.edges")) as p:
        return read_edge_list(p, names)


def kidney_stones() -> ProbabilityTable:
    """Outcome x Treatment x Size table of the kidney-stone treatment study."""
    from .io import read_counts_csv

    with resources.as_file(data_path("kidney_stones.csv")) as p:
        return read_counts_csv(p)
