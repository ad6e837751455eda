"""Deterministic quadrature on [0, 1]^d aligned to basis breakpoints.

Each basis family gets a composite rule whose panels follow the points where
its functions lose smoothness: knot panels for splines (Gauss-Legendre,
exact for the polynomial integrands), dyadic cells for Haar, the tabulation
cells for Daubechies wavelets (two-point Gauss per cell, exact for the
piecewise-linear tabulated functions), and uniform panels for trig/power
series.  Multivariate rules are tensor products.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Density:
    """Closed-form density on [0, 1]^d with known bounds.

    `pdf` maps an (n, d) array of points to (n,) values; `inf`/`sup` bound it
    on the cube (used by the Gram eigenvalue sandwich and the banded-inverse
    bound).  `cdf_1d` is the per-coordinate marginal CDF when the density is
    a coordinate product; it enables i.i.d. sampling by CDF inversion.
    """

    pdf: object
    inf: float
    sup: float
    name: str = "custom"
    cdf_1d: object = None

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        return np.asarray(self.pdf(pts), dtype=float)

    def sample(self, rng, n, dim):
        """i.i.d. draws by inverting the per-coordinate CDF (bisection)."""
        u = rng.random((n, dim))
        if self.cdf_1d is None:
            return u
        lo = np.zeros_like(u)
        hi = np.ones_like(u)
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            below = self.cdf_1d(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)


def uniform_density(dim=1):
    return Density(pdf=lambda pts: np.ones(pts.shape[0]), inf=1.0, sup=1.0,
                   name="uniform")


def sine_density(amplitude=0.5, dim=1):
    """Product density prod_a (1 + amplitude * sin(2 pi x_a)); integrates to 1."""
    if not 0.0 <= amplitude < 1.0:
        raise ValueError("amplitude must be in [0, 1)")

    def pdf(pts):
        return np.prod(1.0 + amplitude * np.sin(2.0 * np.pi * pts), axis=1)

    def cdf_1d(x):
        return x + amplitude * (1.0 - np.cos(2.0 * np.pi * x)) / (2.0 * np.pi)

    return Density(pdf=pdf, inf=(1.0 - amplitude) ** dim,
                   sup=(1.0 + amplitude) ** dim, name="sine", cdf_1d=cdf_1d)


_DENSITIES = {"uniform": uniform_density, "sine": sine_density}


def density_by_name(name, dim=1):
    if name not in _DENSITIES:
        raise ValueError(f"unknown density {name!r}; expected one of "
                         f"{sorted(_DENSITIES)}")
    return _DENSITIES[name](dim=dim)


@dataclass(frozen=True)
class Quadrature:
    """Nodes (Q, d) and positive weights (Q,) on [0, 1]^d."""

    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, fn):
        return float(self.weights @ np.asarray(fn(self.nodes), dtype=float))


def gauss_panels(breakpoints, n_nodes):
    """Composite Gauss-Legendre rule over the given panel edges."""
    ref_x, ref_w = np.polynomial.legendre.leggauss(n_nodes)
    ref_x = 0.5 * (ref_x + 1.0)  # to [0, 1]
    ref_w = 0.5 * ref_w
    edges = np.asarray(breakpoints, dtype=float)
    widths = np.diff(edges)
    keep = widths > 0
    lo = edges[:-1][keep]
    w = widths[keep]
    nodes = (lo[:, None] + w[:, None] * ref_x[None, :]).ravel()
    weights = (w[:, None] * ref_w[None, :]).ravel()
    return nodes, weights


def _univariate_rule(basis, max_nodes):
    spec = basis.spec
    edges = basis.breakpoints_1d
    if basis.weight_box is not None:
        extra = np.concatenate([basis.weight_box[0], basis.weight_box[1]])
        edges = np.union1d(edges, np.clip(extra, 0.0, 1.0))
    if spec.family == "bspline":
        return gauss_panels(edges, max(8, spec.order))
    if spec.family == "wavelet":
        if spec.n_moments == 1:
            return gauss_panels(edges, 4)
        # refine each dyadic cell down to the tabulation step so the
        # two-point rule is exact for the piecewise-linear functions
        depth = basis.tab_family.depth
        sub = depth
        while 2 ** spec.level * 2 ** sub * 2 > max_nodes and sub > 0:
            sub -= 1
        fine = np.unique(np.concatenate(
            [np.linspace(0.0, 1.0, 2 ** (spec.level + sub) + 1), edges]))
        return gauss_panels(fine, 2)
    if spec.family == "trig":
        return gauss_panels(edges, 8)
    return gauss_panels(edges, max(8, spec.degree + 1))


def basis_quadrature(basis, max_nodes_1d=None):
    """Product quadrature adapted to the basis (exact for its Grams)."""
    if max_nodes_1d is None:
        max_nodes_1d = 2 ** 19 if basis.spec.dim == 1 else 2 ** 12
    nodes_1d, weights_1d = _univariate_rule(basis, max_nodes_1d)
    d = basis.spec.dim
    if d == 1:
        return Quadrature(nodes=nodes_1d.reshape(-1, 1), weights=weights_1d)
    grids = np.meshgrid(*([nodes_1d] * d), indexing="ij")
    nodes = np.column_stack([g.ravel() for g in grids])
    wgrids = np.meshgrid(*([weights_1d] * d), indexing="ij")
    weights = np.ones(nodes.shape[0])
    for g in wgrids:
        weights = weights * g.ravel()
    return Quadrature(nodes=nodes, weights=weights)


def sup_grid(basis, base_points=None):
    """Evaluation grid used to certify sup norms.

    Dense uniform points plus every breakpoint and breakpoint-cell midpoint;
    suprema of the piecewise-smooth quantities here are attained at or near
    these points.
    """
    d = basis.spec.dim
    if base_points is None:
        base_points = {1: 4096, 2: 256}.get(d, 32)
    edges = basis.breakpoints_1d
    mids = 0.5 * (edges[:-1] + edges[1:])
    pts_1d = np.union1d(np.linspace(0.0, 1.0, base_points + 1),
                        np.union1d(edges, mids))
    if d == 1:
        return pts_1d.reshape(-1, 1)
    grids = np.meshgrid(*([pts_1d] * d), indexing="ij")
    return np.column_stack([g.ravel() for g in grids])


def weighted_basis_gram(basis, quad, point_weight=None, chunk=65536):
    """Accumulate sum_q w_q g(y_q) b(y_q) b(y_q)' in node chunks."""
    k = basis.size
    gram = np.zeros((k, k))
    nodes, weights = quad.nodes, quad.weights
    for start in range(0, nodes.shape[0], chunk):
        pts = nodes[start:start + chunk]
        w = weights[start:start + chunk]
        if point_weight is not None:
            w = w * point_weight(pts)
        vals = basis.evaluate(pts)
        gram += vals.T @ (vals * w[:, None])
    return 0.5 * (gram + gram.T)
