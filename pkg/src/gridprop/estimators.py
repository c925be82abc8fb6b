"""Scikit-learn style wrappers around the propagation kernels.

``fit`` takes the guide (the image or feature map that defines affinities)
and precomputes the reusable structure: the spanning tree for global
propagation, the window weights for local propagation.  ``transform`` then
propagates any number of score fields under that fixed guide.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_field, check_guide, check_positive_int
from .global_prop import global_affinity_map, global_propagate
from .grid_graph import build_planar_graph, minimum_spanning_tree
from .labeler import PropagationConfig, SoftLabelPair, generate_pseudo_labels
from .local_prop import WindowWeights


class GlobalTreePropagator(BaseEstimator, TransformerMixin):
    """Minimax-path propagation over the guide's minimum spanning tree.

    Parameters
    ----------
    zeta_g : float, default=0.07
        Similarity bandwidth; larger values couple distant pixels more.
    """

    def __init__(self, zeta_g: float = 0.07):
        self.zeta_g = zeta_g

    def fit(self, X, y=None):
        """Build the spanning tree of guide ``X`` (H, W) or (H, W, C)."""
        guide = check_guide(X)
        self.height_, self.width_ = guide.shape[:2]
        self.tree_ = minimum_spanning_tree(build_planar_graph(guide))
        return self

    def transform(self, X) -> np.ndarray:
        """Propagate a (K, H, W) or (H, W) field; returns (K, H, W)."""
        check_is_fitted(self, "tree_")
        return global_propagate(self.tree_, X, self.zeta_g)

    def affinity_map(self, row: int, col: int) -> np.ndarray:
        """Raw affinities of one pixel to every other pixel as (H, W)."""
        check_is_fitted(self, "tree_")
        return global_affinity_map(self.tree_, row * self.width_ + col, self.zeta_g)


class LocalKernelPropagator(BaseEstimator, TransformerMixin):
    """Iterated window smoothing with guide-derived Gaussian affinities.

    Parameters
    ----------
    zeta_s : float, default=0.15
        Intensity bandwidth of the window kernel.
    radius : int, default=2
        Window half-size; the window is (2*radius+1) squared.
    iterations : int, default=20
        Number of smoothing passes.
    """

    def __init__(self, zeta_s: float = 0.15, radius: int = 2, iterations: int = 20):
        self.zeta_s = zeta_s
        self.radius = radius
        self.iterations = iterations

    def fit(self, X, y=None):
        """Precompute window affinities from guide ``X``."""
        self.weights_ = WindowWeights(X, zeta_s=self.zeta_s, radius=self.radius)
        self.height_ = self.weights_.height
        self.width_ = self.weights_.width
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "weights_")
        field = check_field(X, self.height_, self.width_, name="X")
        iterations = check_positive_int(self.iterations, name="iterations")
        return self.weights_.apply(field, iterations)


class PseudoLabeler(BaseEstimator, TransformerMixin):
    """Full pseudo-label generator combining global and local propagation.

    ``transform`` returns a (2, K, H, W) array stacking the global and local
    label fields; in cascade modes both slices hold the cascaded result.
    Use :meth:`generate` for the richer :class:`SoftLabelPair`.
    """

    def __init__(
        self,
        zeta_g: float = 0.07,
        zeta_s: float = 0.15,
        lp_radius: int = 2,
        lp_iterations: int = 20,
        combine_mode: str = "parallel",
    ):
        self.zeta_g = zeta_g
        self.zeta_s = zeta_s
        self.lp_radius = lp_radius
        self.lp_iterations = lp_iterations
        self.combine_mode = combine_mode

    def _config(self) -> PropagationConfig:
        return PropagationConfig(
            zeta_g=self.zeta_g,
            zeta_s=self.zeta_s,
            lp_radius=self.lp_radius,
            lp_iterations=self.lp_iterations,
            combine_mode=self.combine_mode,
        )

    def fit(self, X, y=None, feature=None):
        """Store the guide ``X`` and optional high-level feature guide."""
        self.guide_ = check_guide(X)
        self.feature_ = None if feature is None else check_guide(feature, name="feature")
        self._config()
        return self

    def generate(self, phi) -> SoftLabelPair:
        check_is_fitted(self, "guide_")
        return generate_pseudo_labels(
            self.guide_, phi, self._config(), feature=self.feature_
        )

    def transform(self, X) -> np.ndarray:
        pair = self.generate(X)
        return np.stack([pair.y_global, pair.y_local])
