"""Forward differences of the entropy function.

Compute the Moebius inverse of the entropy function over variable subsets
for Gaussian and categorical models, detect synergies (negative third-order
differences), type suppression, test for unshielded colliders and scan an
independence graph by node clusters.
"""

__version__ = "0.1.0"

from .entropy import (
    CategoricalOracle,
    CorrelationMatrix,
    EntropyOracle,
    GaussianOracle,
    ProbabilityTable,
    TabulatedOracle,
    categorical_entropy,
    conditional_mutual_information,
    gaussian_entropy,
    mutual_information,
    to_millibits,
    to_nats,
)
from .exceptions import (
    AlphaOutOfRange,
    CyclicGraph,
    DegenerateColumn,
    FwdEntropyError,
    InputError,
    MissingSubset,
    NotASynergy,
    NotPositiveDefinite,
    NumericalError,
    OverlappingSets,
    UniverseTooLarge,
)
from .forward_diff import (
    ConditionalDeltaQuery,
    DeltaTable,
    cmi_from_deltas,
    conditional_delta,
    delta,
    delta_third_order,
    forward_differences,
    reconstruct_entropy,
)
from .graph_scan import (
    ColouredGraph,
    Graph,
    ScanResult,
    check_separation_zero,
    cluster_scan,
    colour_synergies,
    enumerate_node_clusters,
    moral_graph,
    skeleton,
    to_dot,
)
from .sets import VariableSet
from .synergy import (
    ExplainedDecomposition,
    SynergyFinding,
    classify_suppression,
    detect_synergies,
    explained_information,
    gaussian_delta_closed_form,
    partial_correlation,
    partial_gaussian_delta,
    unshielded_collider_test,
)

__all__ = [
    "__version__",
    "CategoricalOracle",
    "CorrelationMatrix",
    "EntropyOracle",
    "GaussianOracle",
    "ProbabilityTable",
    "TabulatedOracle",
    "categorical_entropy",
    "conditional_mutual_information",
    "gaussian_entropy",
    "mutual_information",
    "to_millibits",
    "to_nats",
    "AlphaOutOfRange",
    "CyclicGraph",
    "DegenerateColumn",
    "FwdEntropyError",
    "InputError",
    "MissingSubset",
    "NotASynergy",
    "NotPositiveDefinite",
    "NumericalError",
    "OverlappingSets",
    "UniverseTooLarge",
    "ConditionalDeltaQuery",
    "DeltaTable",
    "cmi_from_deltas",
    "conditional_delta",
    "delta",
    "delta_third_order",
    "forward_differences",
    "reconstruct_entropy",
    "ColouredGraph",
    "Graph",
    "ScanResult",
    "check_separation_zero",
    "cluster_scan",
    "colour_synergies",
    "enumerate_node_clusters",
    "moral_graph",
    "skeleton",
    "to_dot",
    "VariableSet",
    "ExplainedDecomposition",
    "SynergyFinding",
    "classify_suppression",
    "detect_synergies",
    "explained_information",
    "gaussian_delta_closed_form",
    "partial_correlation",
    "partial_gaussian_delta",
    "unshielded_collider_test",
]
