"""Local propagation: iterated, guide-weighted window smoothing.

Each pixel is replaced by the normalized Gaussian-affinity average of the
field over a (2r+1) x (2r+1) window, where the affinity to a neighbor is
``exp(-|I_i - I_j|^2 / zeta_s**2)`` computed from the guide.  The window is
clipped at image borders and includes the center pixel (affinity 1), so each
iteration is a convex combination.  Affinities depend only on the guide and
are computed once per call, never from intermediate outputs.
"""

from __future__ import annotations

import numpy as np

from ._validation import check_field, check_guide, check_positive, check_positive_int


class WindowWeights:
    """Precomputed per-offset affinities for one guide.

    Holds, for every window offset, the slice pair mapping output pixels to
    their shifted neighbors and the affinity of each such pair, plus the
    per-pixel normalizer.  Reusable across fields and iterations.
    """

    def __init__(self, guide, zeta_s: float = 0.15, radius: int = 2):
        values = check_guide(guide)
        self.zeta_s = check_positive(zeta_s, name="zeta_s")
        self.radius = check_positive_int(radius, name="radius")
        self.height, self.width = values.shape[:2]
        h, w, r = self.height, self.width, self.radius
        inv = 1.0 / (self.zeta_s * self.zeta_s)

        self._terms = []
        den = np.zeros((h, w))
        for dy in range(-r, r + 1):
            for dx in range(-r, r + 1):
                out_r = slice(max(0, -dy), h - max(0, dy))
                out_c = slice(max(0, -dx), w - max(0, dx))
                in_r = slice(max(0, dy), h + min(0, dy))
                in_c = slice(max(0, dx), w + min(0, dx))
                if out_r.start >= out_r.stop or out_c.start >= out_c.stop:
                    continue
                diff = values[out_r, out_c, :] - values[in_r, in_c, :]
                wts = np.exp((diff * diff).sum(axis=2) * -inv)
                den[out_r, out_c] += wts
                self._terms.append((out_r, out_c, in_r, in_c, wts))
        self._den = den

    def smooth_once(self, field: np.ndarray) -> np.ndarray:
        """One normalized smoothing pass over a (K, H, W) field."""
        num = np.zeros_like(field)
        for out_r, out_c, in_r, in_c, wts in self._terms:
            num[:, out_r, out_c] += wts[None, :, :] * field[:, in_r, in_c]
        return num / self._den[None, :, :]

    def apply(self, field: np.ndarray, iterations: int) -> np.ndarray:
        y = field
        for _ in range(iterations):
            y = self.smooth_once(y)
        return y


def local_propagate(
    guide,
    phi,
    zeta_s: float = 0.15,
    radius: int = 2,
    iterations: int = 20,
) -> np.ndarray:
    """Iteratively smooth ``phi`` under the guide; returns float64 (K, H, W)."""
    iterations = check_positive_int(iterations, name="iterations")
    weights = WindowWeights(guide, zeta_s=zeta_s, radius=radius)
    phi_arr = check_field(phi, weights.height, weights.width, name="phi")
    return weights.apply(phi_arr, iterations)


def local_affinity_window(guide, query_rc: tuple[int, int], zeta_s: float = 0.15, radius: int = 2) -> np.ndarray:
    """Affinities of one pixel to its window neighbors as an (H, W) grid.

    Entries outside the window are 0; the query pixel itself has affinity 1.
    """
    values = check_guide(guide)
    zeta_s = check_positive(zeta_s, name="zeta_s")
    radius = check_positive_int(radius, name="radius")
    h, w = values.shape[:2]
    r, c = int(query_rc[0]), int(query_rc[1])
    if not (0 <= r < h and 0 <= c < w):
        from ._validation import ValidationError

        raise ValidationError(f"query pixel {query_rc} outside {h}x{w} grid")
    out = np.zeros((h, w))
    r0, r1 = max(0, r - radius), min(h, r + radius + 1)
    c0, c1 = max(0, c - radius), min(w, c + radius + 1)
    diff = values[r0:r1, c0:c1, :] - values[r, c, :][None, None, :]
    out[r0:r1, c0:c1] = np.exp((diff * diff).sum(axis=2) / -(zeta_s * zeta_s))
    return out
