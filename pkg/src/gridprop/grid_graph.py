"""Pixel-grid graph construction and minimum spanning tree extraction.

A guide image is viewed as a 4-connected planar graph whose edge weights are
squared per-channel differences between adjacent pixels.  The minimum spanning
tree of that graph is the topology the global propagation kernel runs on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import ValidationError, check_guide

NORMALIZATIONS = ("none", "divide-by-255", "min-max")


@dataclass(frozen=True)
class GuideTensor:
    """A validated (H, W, C) guide with a record of the normalization applied."""

    values: np.ndarray
    normalization: str = "none"

    def __post_init__(self):
        if self.normalization not in NORMALIZATIONS:
            raise ValidationError(
                f"normalization must be one of {NORMALIZATIONS}, got {self.normalization!r}"
            )
        object.__setattr__(self, "values", check_guide(self.values))

    @classmethod
    def from_array(cls, arr, normalization: str = "none") -> "GuideTensor":
        """Wrap an array, applying the named normalization to its values."""
        values = check_guide(arr)
        if normalization == "divide-by-255":
            values = values / 255.0
        elif normalization == "min-max":
            lo, hi = values.min(), values.max()
            if hi > lo:
                values = (values - lo) / (hi - lo)
            else:
                values = np.zeros_like(values)
        elif normalization != "none":
            raise ValidationError(
                f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}"
            )
        return cls(values, normalization)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class PlanarGraph:
    """4-connected grid graph with parallel edge arrays (u, v, w).

    Edge order is deterministic: all horizontal edges in row-major order,
    then all vertical edges in row-major order.  Node ids are row-major.
    """

    height: int
    width: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.height * self.width

    @property
    def n_edges(self) -> int:
        return len(self.w)

    def edges(self):
        """Iterate edges as (u, v, w) tuples; intended for small graphs."""
        return zip(self.u.tolist(), self.v.tolist(), self.w.tolist())


@dataclass(frozen=True)
class SpanningTree:
    """Spanning tree of a grid graph; edges sorted ascending by (weight, index)."""

    height: int
    width: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.height * self.width

    @property
    def n_edges(self) -> int:
        return len(self.w)

    @property
    def total_weight(self) -> float:
        return float(self.w.sum())

    def edges(self):
        return zip(self.u.tolist(), self.v.tolist(), self.w.tolist())


def build_planar_graph(guide) -> PlanarGraph:
    """Build the 4-connected planar graph of a guide.

    Edge weight between adjacent pixels k, l is sum_c (I_k[c] - I_l[c])^2.
    The edge count is always 2*H*W - H - W.
    """
    values = check_guide(guide)
    h, w = values.shape[:2]

    cols = np.arange(w)
    rows = np.arange(h)

    hu = (rows[:, None] * w + cols[None, : w - 1]).ravel()
    hw = ((values[:, 1:, :] - values[:, :-1, :]) ** 2).sum(axis=2).ravel()

    vu = (rows[: h - 1, None] * w + cols[None, :]).ravel()
    vw = ((values[1:, :, :] - values[:-1, :, :]) ** 2).sum(axis=2).ravel()

    u = np.concatenate([hu, vu]).astype(np.int64)
    v = np.concatenate([hu + 1, vu + w]).astype(np.int64)
    wts = np.concatenate([hw, vw])
    return PlanarGraph(height=h, width=w, u=u, v=v, w=wts)


def minimum_spanning_tree(graph: PlanarGraph) -> SpanningTree:
    """Kruskal over the stably sorted edge list.

    Ties are broken by the deterministic planar-graph edge index, so the
    result is reproducible even on integer-valued guides where equal weights
    are pervasive.  The returned edge sequence is ascending in weight, which
    is the order the global propagation kernel consumes.
    """
    n = graph.n_nodes
    if n == 1:
        empty_i = np.empty(0, dtype=np.int64)
        empty_f = np.empty(0, dtype=np.float64)
        return SpanningTree(graph.height, graph.width, empty_i, empty_i, empty_f)

    order = np.argsort(graph.w, kind="stable")
    eu = graph.u[order].tolist()
    ev = graph.v[order].tolist()
    ew = graph.w[order].tolist()

    parent = list(range(n))
    size = [1] * n
    tu, tv, tw = [], [], []
    need = n - 1
    for u, v, wt in zip(eu, ev, ew):
        x = u
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        a = x
        x = v
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        b = x
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
        tu.append(u)
        tv.append(v)
        tw.append(wt)
        if len(tw) == need:
            break

    if len(tw) != need:
        raise ValidationError("graph is not connected; cannot span all nodes")
    return SpanningTree(
        graph.height,
        graph.width,
        np.asarray(tu, dtype=np.int64),
        np.asarray(tv, dtype=np.int64),
        np.asarray(tw, dtype=np.float64),
    )


def guide_tree(guide) -> SpanningTree:
    """Convenience: planar graph + MST in one call."""
    return minimum_spanning_tree(build_planar_graph(guide))
