"""Univariate B-splines on [0, 1] with uniform interior knots.

Splines of order ``r`` (degree ``r - 1``) with ``m`` interior knots are built
from the recursion on indicator functions, using a knot vector with full
multiplicity at both endpoints.  That yields ``m + r`` basis functions forming
a partition of unity; evaluation at ``x = 1`` uses the left limit (the last
knot interval is closed).
"""

import numpy as np


def knot_vector(order, n_interior):
    """Full-multiplicity knot vector on [0, 1] with uniform interior knots.

    Returns an array of length ``n_interior + 2 * order``.  Basis function
    ``j`` (``0 <= j < n_interior + order``) has support
    ``[T[j], T[j + order]]``.
    """
    if order < 1:
        raise ValueError(f"spline order must be >= 1, got {order}")
    if n_interior < 0:
        raise ValueError(f"interior knot count must be >= 0, got {n_interior}")
    interior = np.arange(1, n_interior + 1) / (n_interior + 1)
    return np.concatenate([np.zeros(order), interior, np.ones(order)])


def _order1_indicators(knots, x):
    """Indicator functions of the knot intervals; last nonempty one closed."""
    n_funcs = knots.size - 1
    out = np.zeros((x.size, n_funcs))
    last_nonempty = -1
    for j in range(n_funcs):
        if knots[j + 1] > knots[j]:
            out[:, j] = (x >= knots[j]) & (x < knots[j + 1])
            last_nonempty = j
    out[x == knots[-1], last_nonempty] = 1.0
    return out


def design_matrix(knots, order, x):
    """Evaluate all splines of `order` on `knots` at the points `x`.

    Returns an ``(len(x), K)`` array with ``K = len(knots) - order``.  The
    recursion uses the convention 0/0 = 0 at repeated knots.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    vals = _order1_indicators(knots, x)
    for k in range(2, order + 1):
        n_funcs = knots.size - k
        nxt = np.zeros((x.size, n_funcs))
        for j in range(n_funcs):
            denom_l = knots[j + k - 1] - knots[j]
            denom_r = knots[j + k] - knots[j + 1]
            acc = 0.0
            if denom_l > 0.0:
                acc = (x - knots[j]) / denom_l * vals[:, j]
            if denom_r > 0.0:
                acc = acc + (knots[j + k] - x) / denom_r * vals[:, j + 1]
            nxt[:, j] = acc
        vals = nxt
    return vals


def design_derivative(knots, order, x):
    """First derivative of every spline of `order` at the points `x`.

    Uses the lower-order recursion
    ``N'_{j,r} = (r-1) [N_{j,r-1}/(T_{j+r-1}-T_j) - N_{j+1,r-1}/(T_{j+r}-T_{j+1})]``.
    Order-1 splines are piecewise constant, so their derivative is reported
    as 0 everywhere (including at the knots).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n_funcs = knots.size - order
    if order == 1:
        return np.zeros((x.size, n_funcs))
    lower = design_matrix(knots, order - 1, x)
    out = np.zeros((x.size, n_funcs))
    for j in range(n_funcs):
        denom_l = knots[j + order - 1] - knots[j]
        denom_r = knots[j + order] - knots[j + 1]
        acc = 0.0
        if denom_l > 0.0:
            acc = lower[:, j] / denom_l
        if denom_r > 0.0:
            acc = acc - lower[:, j + 1] / denom_r
        out[:, j] = (order - 1) * acc
    return out


def support_intervals(knots, order):
    """(K, 2) array of [start, end] supports of the basis functions."""
    n_funcs = knots.size - order
    return np.column_stack([knots[:n_funcs], knots[order:order + n_funcs]])
