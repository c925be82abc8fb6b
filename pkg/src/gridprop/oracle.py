"""Brute-force reference implementations.

These are the ground truth the fast kernels are tested against, and the
naive arm of the runtime benchmark.  They are deliberately quadratic and
share no code with the fast paths beyond the public data types: each output
pixel is computed by its own tree traversal (global) or by literal window
scans (local).
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from ._validation import (
    ValidationError,
    check_field,
    check_guide,
    check_node,
    check_positive,
    check_positive_int,
)
from .grid_graph import SpanningTree


def _adjacency_lists(tree: SpanningTree):
    n = tree.n_nodes
    adj = [[] for _ in range(n)]
    for u, v, w in zip(tree.u.tolist(), tree.v.tolist(), tree.w.tolist()):
        adj[u].append((v, w))
        adj[v].append((u, w))
    return adj


def minimax_path_cost(tree: SpanningTree, u: int, v: int) -> float:
    """Maximum edge weight on the unique tree path from u to v (0 if u == v)."""
    n = tree.n_nodes
    u = check_node(u, n, name="u")
    v = check_node(v, n, name="v")
    if u == v:
        return 0.0
    adj = _adjacency_lists(tree)
    cost = [0.0] * n
    seen = bytearray(n)
    seen[u] = 1
    dq = deque([u])
    while dq:
        x = dq.popleft()
        cx = cost[x]
        for y, w in adj[x]:
            if not seen[y]:
                seen[y] = 1
                cost[y] = cx if cx > w else w
                if y == v:
                    return cost[y]
                dq.append(y)
    raise ValidationError(f"nodes {u} and {v} are not connected in the tree")


def gp_bruteforce(tree: SpanningTree, phi, zeta_g: float) -> np.ndarray:
    """Reference global propagation: one breadth-first traversal per pixel.

    Same contract as :func:`gridprop.global_prop.global_propagate`, O(N^2).
    """
    zeta_g = check_positive(zeta_g, name="zeta_g")
    phi_arr = check_field(phi, tree.height, tree.width, name="phi")
    k, h, w = phi_arr.shape
    n = h * w
    if tree.n_edges != n - 1:
        raise ValidationError(
            f"spanning tree must have N-1 = {n - 1} edges, got {tree.n_edges}"
        )
    if n == 1:
        return phi_arr.copy()

    # flat adjacency, kept as plain lists for the tight traversal loop
    deg = [0] * n
    for x in tree.u.tolist():
        deg[x] += 1
    for x in tree.v.tolist():
        deg[x] += 1
    indptr = [0] * (n + 1)
    for i in range(n):
        indptr[i + 1] = indptr[i] + deg[i]
    cursor = indptr[:-1].copy()
    nbr = [0] * (2 * (n - 1))
    nwt = [0.0] * (2 * (n - 1))
    for u, v, wt in zip(tree.u.tolist(), tree.v.tolist(), tree.w.tolist()):
        nbr[cursor[u]] = v
        nwt[cursor[u]] = wt
        cursor[u] += 1
        nbr[cursor[v]] = u
        nwt[cursor[v]] = wt
        cursor[v] += 1

    inv = 1.0 / (zeta_g * zeta_g)
    phi_flat = np.ascontiguousarray(phi_arr.reshape(k, n).T)  # (N, K)
    out = np.empty((k, n))
    cost = [0.0] * n
    for s in range(n):
        for i in range(n):
            cost[i] = 0.0
        seen = bytearray(n)
        seen[s] = 1
        dq = deque([s])
        pop = dq.popleft
        push = dq.append
        while dq:
            x = pop()
            cx = cost[x]
            for i in range(indptr[x], indptr[x + 1]):
                y = nbr[i]
                if not seen[y]:
                    seen[y] = 1
                    wt = nwt[i]
                    cost[y] = cx if cx > wt else wt
                    push(y)
        psi = np.exp(np.asarray(cost) * -inv)
        out[:, s] = (psi @ phi_flat) / psi.sum()
    return out.reshape(k, h, w)


def lp_direct(
    guide,
    phi,
    zeta_s: float = 0.15,
    radius: int = 2,
    iterations: int = 20,
) -> np.ndarray:
    """Reference local propagation: explicit per-pixel window scans."""
    values = check_guide(guide)
    zeta_s = check_positive(zeta_s, name="zeta_s")
    radius = check_positive_int(radius, name="radius")
    iterations = check_positive_int(iterations, name="iterations")
    h, w = values.shape[:2]
    phi_arr = check_field(phi, h, w, name="phi")
    k = phi_arr.shape[0]

    y = phi_arr.copy()
    for _ in range(iterations):
        nxt = np.empty_like(y)
        for r in range(h):
            for c in range(w):
                den = 0.0
                num = [0.0] * k
                for rr in range(max(0, r - radius), min(h, r + radius + 1)):
                    for cc in range(max(0, c - radius), min(w, c + radius + 1)):
                        d2 = 0.0
                        for ch in range(values.shape[2]):
                            d = values[r, c, ch] - values[rr, cc, ch]
                            d2 += d * d
                        wt = math.exp(-d2 / (zeta_s * zeta_s))
                        den += wt
                        for ch in range(k):
                            num[ch] += wt * y[ch, rr, cc]
                for ch in range(k):
                    nxt[ch, r, c] = num[ch] / den
        y = nxt
    return y
