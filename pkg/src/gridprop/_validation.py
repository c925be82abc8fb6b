"""Input validation helpers shared by the propagation kernels and estimators."""

from __future__ import annotations

import numpy as np


class ValidationError(ValueError):
    """Raised when an input array or parameter violates a kernel contract."""


def check_guide(guide, *, name: str = "guide") -> np.ndarray:
    """Coerce a guide image/feature map to a float64 (H, W, C) array.

    Accepts (H, W) or (H, W, C) arrays, or any object with a ``values``
    attribute holding one (e.g. :class:`gridprop.grid_graph.GuideTensor`).
    """
    values = getattr(guide, "values", guide)
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValidationError(
            f"{name} must be (H, W) or (H, W, C), got shape {np.shape(values)}"
        )
    if arr.shape[0] < 1 or arr.shape[1] < 1 or arr.shape[2] < 1:
        raise ValidationError(f"{name} has an empty dimension: shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValidationError(f"{name} contains NaN or Inf values")
    return arr


def check_field(field, height: int, width: int, *, name: str = "field") -> np.ndarray:
    """Coerce a dense score field to a float64 (K, H, W) array.

    Accepts (H, W) single-channel or channel-major (K, H, W) arrays and
    checks spatial agreement with the guide dimensions.
    """
    arr = np.asarray(field, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[None, :, :]
    if arr.ndim != 3:
        raise ValidationError(
            f"{name} must be (H, W) or (K, H, W), got shape {np.shape(field)}"
        )
    if arr.shape[1] != height or arr.shape[2] != width:
        raise ValidationError(
            f"{name} spatial shape {arr.shape[1:]} does not match guide ({height}, {width})"
        )
    if arr.shape[0] < 1:
        raise ValidationError(f"{name} must have at least one channel")
    if not np.isfinite(arr).all():
        raise ValidationError(f"{name} contains NaN or Inf values")
    return arr


def check_positive(value, *, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise ValidationError(f"{name} must be a positive finite number, got {value}")
    return value


def check_positive_int(value, *, name: str) -> int:
    ivalue = int(value)
    if ivalue != value or ivalue < 1:
        raise ValidationError(f"{name} must be a positive integer, got {value}")
    return ivalue


def check_node(node, n_nodes: int, *, name: str = "node") -> int:
    inode = int(node)
    if inode != node or not 0 <= inode < n_nodes:
        raise ValidationError(f"{name} must be in [0, {n_nodes}), got {node}")
    return inode
