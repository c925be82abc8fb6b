"""gridprop: edge-aware global/local propagation of dense fields on pixel grids.

Turns a per-pixel score field plus a guide image into soft pseudo labels by
two complementary kernels: global propagation over the guide's minimum
spanning tree with minimax-path affinities, and iterated local window
smoothing with Gaussian intensity affinities.
"""

__version__ = "0.1.0"

from ._validation import ValidationError
from .global_prop import global_affinity_map, global_propagate
from .grid_graph import (
    GuideTensor,
    PlanarGraph,
    SpanningTree,
    build_planar_graph,
    guide_tree,
    minimum_spanning_tree,
)
from .labeler import (
    PropagationConfig,
    RegionMask,
    SoftLabelPair,
    affinity_loss,
    generate_pseudo_labels,
)
from .local_prop import WindowWeights, local_affinity_window, local_propagate
from .oracle import gp_bruteforce, lp_direct, minimax_path_cost

_ESTIMATORS = ("GlobalTreePropagator", "LocalKernelPropagator", "PseudoLabeler")


def __getattr__(name):
    # the estimators pull in scikit-learn; load them on first use so the CLI
    # keeps a fast cold start
    if name in _ESTIMATORS:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    "__version__",
    "ValidationError",
    "GuideTensor",
    "PlanarGraph",
    "SpanningTree",
    "build_planar_graph",
    "minimum_spanning_tree",
    "guide_tree",
    "global_propagate",
    "global_affinity_map",
    "local_propagate",
    "local_affinity_window",
    "WindowWeights",
    "PropagationConfig",
    "RegionMask",
    "SoftLabelPair",
    "generate_pseudo_labels",
    "affinity_loss",
    "minimax_path_cost",
    "gp_bruteforce",
    "lp_direct",
    "GlobalTreePropagator",
    "LocalKernelPropagator",
    "PseudoLabeler",
]
