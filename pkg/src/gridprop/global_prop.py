"""Global propagation of dense fields over a spanning tree.

Each output pixel is the normalized, affinity-weighted aggregate of the whole
input field, where the affinity between two pixels is ``exp(-c / zeta_g**2)``
and ``c`` is the largest edge weight on the unique tree path between them
(the bottleneck / minimax path cost).

The kernel runs in O(N log N): tree edges are consumed in ascending weight
order and merged with a disjoint-set forest.  Each union credits both sides
with the other side's field sum, discounted by the edge affinity.  Credits
are not pushed to every member immediately; they accumulate in per-root lazy
tags and flow down lazily when ``find`` compresses paths.  A node that gets
re-parented absorbs its former parent's tag so that the sum of tags along any
node's ascendant chain (plus its own value) always equals its true aggregate.
When a root is demoted by a union it subtracts the new parent's pending tag,
which its members have not earned, from its own.
"""

from __future__ import annotations

import math
from array import array
from collections import deque

import numpy as np

from ._validation import ValidationError, check_field, check_node, check_positive
from .grid_graph import SpanningTree


def _check_tree_field(tree: SpanningTree, phi) -> np.ndarray:
    """Validate phi against the tree and return it as float64 (K, H, W)."""
    arr = check_field(phi, tree.height, tree.width, name="phi")
    n = tree.n_nodes
    if tree.n_edges != n - 1:
        raise ValidationError(
            f"spanning tree must have N-1 = {n - 1} edges, got {tree.n_edges}"
        )
    if n > 1:
        for name, idx in (("u", tree.u), ("v", tree.v)):
            if idx.min() < 0 or idx.max() >= n:
                raise ValidationError(f"tree.{name} contains out-of-range node ids")
        if not np.isfinite(tree.w).all() or tree.w.min() < 0:
            raise ValidationError("tree weights must be finite and non-negative")
    return arr


def global_propagate(tree: SpanningTree, phi, zeta_g: float) -> np.ndarray:
    """Propagate ``phi`` globally over ``tree``; returns float64 (K, H, W).

    Every channel is processed independently against the same tree.  The
    result is a per-pixel convex combination of the input field, so constant
    fields are preserved and outputs stay within the per-channel input range.
    """
    zeta_g = check_positive(zeta_g, name="zeta_g")
    phi_arr = _check_tree_field(tree, phi)
    k, h, w = phi_arr.shape
    n = h * w
    if n == 1:
        return phi_arr.copy()

    order = np.argsort(tree.w, kind="stable")
    eu = tree.u[order].tolist()
    ev = tree.v[order].tolist()
    ew = tree.w[order].tolist()

    phi_flat = phi_arr.reshape(k, n)
    out = _lazy_forest_pass(n, eu, ev, ew, phi_flat, zeta_g)
    return out.reshape(k, h, w)


def _lazy_forest_pass(n, eu, ev, ew, phi_flat, zeta_g) -> np.ndarray:
    """Algorithm core on flat arrays: returns the (K, N) propagated field.

    State per node: parent pointer, union size (doubles as the all-ones
    field sum), one lazy tag per channel plus one for the all-ones field,
    and per-root running field sums.
    """
    k = phi_flat.shape[0]
    inv = 1.0 / (zeta_g * zeta_g)
    exp = math.exp

    parent = list(range(n))
    zeros = bytes(8 * n)
    size = array("d", zeros)
    for i in range(n):
        size[i] = 1.0
    tag_ones = array("d", zeros)
    tag_phi = [array("d", zeros) for _ in range(k)]
    sum_phi = [array("d", phi_flat[c].tobytes()) for c in range(k)]

    tags = [tag_ones] + tag_phi
    pairs = list(zip(tags, [size] + sum_phi))
    path = []

    def find(x):
        # Path compression with lazy-tag downlink: every node hung directly
        # onto the root absorbs its former parent's (already settled) tag,
        # processed top-down so parents settle before their children.
        p = parent[x]
        if p == x:
            return x
        root = p
        q = parent[root]
        if q == root:
            return root
        path.append(x)
        while q != root:
            path.append(root)
            root = q
            q = parent[root]
        for i in range(len(path) - 1, -1, -1):
            node = path[i]
            old = parent[node]
            if old != root:
                parent[node] = root
                for t in tags:
                    t[node] += t[old]
        path.clear()
        return root

    for knode, lnode, wt in zip(eu, ev, ew):
        e = exp(-wt * inv)
        a = find(knode)
        b = find(lnode)
        if a == b:
            raise ValidationError("tree edges contain a cycle")
        if size[a] < size[b]:
            a, b = b, a
        # Root a survives: it gains the discounted sum of b's union.  Root b
        # becomes a child: it gains the discounted sum of a's union minus
        # a's now-pending tag, which b's members must not inherit.
        for t, s in pairs:
            sa = s[a]
            sb = s[b]
            ta = t[a] + e * sb
            t[a] = ta
            t[b] += e * sa - ta
            s[a] = sa + sb
        parent[b] = a

    out = np.empty((k, n))
    views = [out[c] for c in range(k)]
    phi_rows = [phi_flat[c] for c in range(k)]
    for v in range(n):
        r = find(v)
        if r == v:
            den = 1.0 + tag_ones[v]
            for c in range(k):
                views[c][v] = (phi_rows[c][v] + tag_phi[c][v]) / den
        else:
            den = 1.0 + tag_ones[v] + tag_ones[r]
            for c in range(k):
                views[c][v] = (phi_rows[c][v] + tag_phi[c][v] + tag_phi[c][r]) / den
    return out


def _tree_adjacency(tree: SpanningTree):
    """CSR-style adjacency (indptr, neighbor ids, neighbor weights)."""
    n = tree.n_nodes
    src = np.concatenate([tree.u, tree.v])
    dst = np.concatenate([tree.v, tree.u])
    wts = np.concatenate([tree.w, tree.w])
    deg = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    order = np.argsort(src, kind="stable")
    return indptr, dst[order], wts[order]


def global_affinity_map(tree: SpanningTree, query: int, zeta_g: float) -> np.ndarray:
    """Raw affinities exp(-minimax_cost(query, j) / zeta_g^2) as an (H, W) grid.

    Computed by one breadth-first traversal from the query node carrying a
    running maximum; the value at the query pixel is exactly 1.
    """
    zeta_g = check_positive(zeta_g, name="zeta_g")
    n = tree.n_nodes
    query = check_node(query, n, name="query")
    if tree.n_edges != n - 1:
        raise ValidationError(
            f"spanning tree must have N-1 = {n - 1} edges, got {tree.n_edges}"
        )
    cost = [0.0] * n
    if n > 1:
        indptr, nbr, nw = _tree_adjacency(tree)
        indptr_l = indptr.tolist()
        nbr_l = nbr.tolist()
        nw_l = nw.tolist()
        seen = bytearray(n)
        seen[query] = 1
        dq = deque([query])
        while dq:
            u = dq.popleft()
            cu = cost[u]
            for i in range(indptr_l[u], indptr_l[u + 1]):
                v = nbr_l[i]
                if not seen[v]:
                    seen[v] = 1
                    wt = nw_l[i]
                    cost[v] = cu if cu > wt else wt
                    dq.append(v)
    inv = 1.0 / (zeta_g * zeta_g)
    return np.exp(np.asarray(cost) * -inv).reshape(tree.height, tree.width)
