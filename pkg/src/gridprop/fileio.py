"""File formats for the CLI: PNG/NPY guides, NPY fields, 16-bit PGM maps."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ._validation import ValidationError
from .grid_graph import GuideTensor

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp"}


def read_guide(path) -> GuideTensor:
    """Load a guide: 8-bit images are divided by 255, NPY arrays taken as-is."""
    path = Path(path)
    if path.suffix.lower() in _IMAGE_SUFFIXES:
        from PIL import Image

        with Image.open(path) as img:
            if img.mode not in ("L", "RGB"):
                img = img.convert("RGB")
            arr = np.asarray(img, dtype=np.float64)
        return GuideTensor.from_array(arr, "divide-by-255")
    arr = np.load(path)
    if arr.ndim not in (2, 3):
        raise ValidationError(
            f"guide {path} must be (H, W) or (H, W, C), got shape {arr.shape}"
        )
    if not np.issubdtype(arr.dtype, np.floating):
        raise ValidationError(f"guide {path} must be float32/float64, got {arr.dtype}")
    return GuideTensor.from_array(arr.astype(np.float64), "none")


def read_field(path, height: int | None = None, width: int | None = None) -> np.ndarray:
    """Load a channel-major (K, H, W) float field from NPY; 2-D means K=1."""
    path = Path(path)
    arr = np.load(path)
    if arr.ndim == 2:
        arr = arr[None, :, :]
    if arr.ndim != 3:
        raise ValidationError(
            f"field {path} must be (K, H, W) or (H, W), got shape {arr.shape}"
        )
    if not np.issubdtype(arr.dtype, np.floating):
        raise ValidationError(f"field {path} must be float32/float64, got {arr.dtype}")
    arr = arr.astype(np.float64)
    if height is not None and arr.shape[1:] != (height, width):
        raise ValidationError(
            f"field {path} spatial shape {arr.shape[1:]} does not match guide ({height}, {width})"
        )
    if not np.isfinite(arr).all():
        raise ValidationError(f"field {path} contains NaN or Inf values")
    return arr


def write_field(path, field: np.ndarray) -> None:
    """Write a (K, H, W) float64 field as NPY v1.0."""
    np.save(path, np.ascontiguousarray(field, dtype=np.float64))


def read_mask(path) -> np.ndarray:
    arr = np.load(path)
    if arr.ndim != 2:
        raise ValidationError(f"mask {path} must be 2-D, got shape {arr.shape}")
    return arr.astype(bool)


def write_pgm16(path, values: np.ndarray) -> None:
    """Write an (H, W) array of [0, 1] values as a 16-bit binary PGM (P5).

    Values are scaled by 65535, rounded half away from zero, and clipped.
    Sample bytes are most-significant first, as the format requires.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"PGM output must be 2-D, got shape {arr.shape}")
    scaled = np.clip(np.floor(arr * 65535.0 + 0.5), 0, 65535).astype(">u2")
    h, w = arr.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(scaled.tobytes())


def read_pgm16(path) -> np.ndarray:
    """Read a binary 16-bit PGM written by :func:`write_pgm16`."""
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if len(parts) != 4 or parts[0] != b"P5":
        raise ValidationError(f"{path} is not a binary PGM file")
    w, h = (int(x) for x in parts[1].split())
    maxval = int(parts[2])
    if maxval != 65535:
        raise ValidationError(f"{path} is not 16-bit (maxval {maxval})")
    return np.frombuffer(parts[3], dtype=">u2", count=h * w).reshape(h, w).astype(np.uint16)
