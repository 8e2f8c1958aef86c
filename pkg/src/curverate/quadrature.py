"""Composite Gauss-Legendre panel machinery shared by the numeric modules."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def gauss_legendre(order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def panel_nodes(lo: float, hi: float, min_nodes: int, order: int = 16):
    """Composite Gauss-Legendre nodes/weights on [lo, hi].

    Uses ceil(min_nodes / order) equal panels of the given order, so the
    returned rule has at least min_nodes nodes.
    """

    if hi <= lo:
        return np.empty(0), np.empty(0)
    panels = max(1, -(-int(min_nodes) // order))
    base_x, base_w = gauss_legendre(order)
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    xs = (mid + half * base_x[None, :]).ravel()
    ws = (half * np.broadcast_to(base_w, (panels, order))).ravel()
    return xs, ws


def fixed_rule(lo: float, hi: float, panels: int, order: int = 16):
    """Composite rule with an explicit panel count (non-oscillatory work)."""

    return panel_nodes(lo, hi, panels * order, order)
