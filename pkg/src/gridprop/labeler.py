"""Soft pseudo-label generation and the unlabeled-region L1 loss.

Composes the global (tree) and local (window) propagation kernels into the
three supported combination modes and scores predictions against the
resulting soft labels on unlabeled pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import (
    ValidationError,
    check_field,
    check_guide,
    check_positive,
    check_positive_int,
)
from .global_prop import global_propagate
from .grid_graph import guide_tree
from .local_prop import local_propagate

COMBINE_MODES = ("parallel", "gp_then_lp", "lp_then_gp")


@dataclass(frozen=True)
class PropagationConfig:
    """Knobs for one pseudo-label generation pass."""

    zeta_g: float = 0.07
    zeta_s: float = 0.15
    lp_radius: int = 2
    lp_iterations: int = 20
    combine_mode: str = "parallel"

    def __post_init__(self):
        check_positive(self.zeta_g, name="zeta_g")
        check_positive(self.zeta_s, name="zeta_s")
        check_positive_int(self.lp_radius, name="lp_radius")
        check_positive_int(self.lp_iterations, name="lp_iterations")
        if self.combine_mode not in COMBINE_MODES:
            raise ValidationError(
                f"combine_mode must be one of {COMBINE_MODES}, got {self.combine_mode!r}"
            )


@dataclass(frozen=True)
class RegionMask:
    """Per-pixel labeled/unlabeled flags; True marks an unlabeled pixel."""

    unlabeled: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.unlabeled, dtype=bool)
        if arr.ndim != 2:
            raise ValidationError(f"mask must be 2-D, got shape {arr.shape}")
        object.__setattr__(self, "unlabeled", arr)

    @classmethod
    def all_unlabeled(cls, height: int, width: int) -> "RegionMask":
        return cls(np.ones((height, width), dtype=bool))

    @property
    def n_unlabeled(self) -> int:
        return int(self.unlabeled.sum())


@dataclass(frozen=True)
class SoftLabelPair:
    """The two propagated label fields plus combination metadata.

    For cascade modes both slots hold the single cascaded result and
    ``cascaded`` is True.
    """

    y_global: np.ndarray
    y_local: np.ndarray
    mode: str
    cascaded: bool = False


def _gp_with_optional_feature(guide, feature, phi, zeta_g):
    """Image-guided GP, averaged with a feature-guided pass when provided."""
    y = global_propagate(guide_tree(guide), phi, zeta_g)
    if feature is not None:
        y = 0.5 * (y + global_propagate(guide_tree(feature), phi, zeta_g))
    return y


def generate_pseudo_labels(
    guide,
    phi,
    config: PropagationConfig = PropagationConfig(),
    feature=None,
) -> SoftLabelPair:
    """Run the configured GP/LP combination on ``phi`` under ``guide``.

    Modes: ``parallel`` keeps the two outputs separate; ``gp_then_lp``
    cascades local after global; ``lp_then_gp`` cascades global after local.
    An optional high-level ``feature`` guide drives a second GP pass whose
    output is averaged with the image-driven one.
    """
    guide_arr = check_guide(guide)
    h, w = guide_arr.shape[:2]
    phi_arr = check_field(phi, h, w, name="phi")
    if feature is not None:
        feature_arr = check_guide(feature, name="feature")
        if feature_arr.shape[:2] != (h, w):
            raise ValidationError(
                f"feature spatial shape {feature_arr.shape[:2]} does not match guide ({h}, {w})"
            )
    else:
        feature_arr = None

    def run_gp(field):
        return _gp_with_optional_feature(guide_arr, feature_arr, field, config.zeta_g)

    def run_lp(field):
        return local_propagate(
            guide_arr,
            field,
            zeta_s=config.zeta_s,
            radius=config.lp_radius,
            iterations=config.lp_iterations,
        )

    if config.combine_mode == "parallel":
        return SoftLabelPair(run_gp(phi_arr), run_lp(phi_arr), "parallel")
    if config.combine_mode == "gp_then_lp":
        y = run_lp(run_gp(phi_arr))
        return SoftLabelPair(y, y, "gp_then_lp", cascaded=True)
    y = run_gp(run_lp(phi_arr))
    return SoftLabelPair(y, y, "lp_then_gp", cascaded=True)


def affinity_loss(pred, labels: SoftLabelPair, mask: RegionMask | None = None) -> float:
    """Mean L1 distance between predictions and soft labels on unlabeled pixels.

    Each label field contributes the mean absolute difference over unlabeled
    pixels and channels; in parallel mode the global and local means are
    summed, cascade modes contribute a single term.  Returns 0.0 when every
    pixel is labeled.
    """
    k, h, w = np.shape(labels.y_global)
    pred_arr = check_field(pred, h, w, name="pred")
    if pred_arr.shape[0] != k:
        raise ValidationError(
            f"pred has {pred_arr.shape[0]} channels but labels have {k}"
        )
    if mask is None:
        mask = RegionMask.all_unlabeled(h, w)
    if mask.unlabeled.shape != (h, w):
        raise ValidationError(
            f"mask shape {mask.unlabeled.shape} does not match labels ({h}, {w})"
        )
    sel = mask.unlabeled
    if not sel.any():
        return 0.0
    loss = float(np.abs(pred_arr - labels.y_global)[:, sel].mean())
    if not labels.cascaded:
        loss += float(np.abs(pred_arr - labels.y_local)[:, sel].mean())
    return loss
