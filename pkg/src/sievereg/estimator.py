"""Weighted series least-squares fits and error functionals.

``fit`` regresses responses on the K weighted basis functions through an
orthogonal (SVD) factorization, which realizes the Moore-Penrose solution
exactly; rank deficiency is flagged, never fatal.  ``project_oracle`` fits
the noiseless responses h0(X_i), i.e. the projection of the target onto the
sieve under the empirical measure, which splits the estimation error into
an approximation part and a noise part.
"""

from dataclasses import dataclass, field

import numpy as np

from .quadrature import basis_quadrature


def _design(basis, x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    return x, basis.evaluate(x)


@dataclass
class FitResult:
    """Series LS solution: coefficients, residuals, and rank diagnostics.

    `predict` evaluates the fitted function (0 outside the weighting
    region).  `cond` is the condition number of the design; `dev` is filled
    with the whitened Gram deviation when the caller supplied the
    theoretical Gram.
    """

    basis: object
    coeffs: np.ndarray
    residuals: np.ndarray
    rank: int
    rank_deficient: bool
    cond: float
    dev: float = np.nan
    x: np.ndarray = field(repr=False, default=None)

    def predict(self, pts):
        vals = self.basis.evaluate(pts)
        return vals @ self.coeffs

    def __call__(self, pts):
        return self.predict(pts)


def fit(basis, x, y, gram=None):
    """Least-squares fit of y on the weighted basis at the points x."""
    y = np.asarray(y, dtype=float)
    x, design = _design(basis, x)
    k = basis.size
    coeffs, _, rank, svals = np.linalg.lstsq(design, y, rcond=k * np.finfo(float).eps)
    residuals = y - design @ coeffs
    cond = float(svals[0] / svals[-1]) if svals[-1] > 0 else np.inf
    dev = np.nan
    if gram is not None:
        from .gram import gram_deviation
        dev = gram_deviation(gram, design.T @ design / x.shape[0])
    return FitResult(basis=basis, coeffs=coeffs, residuals=residuals,
                     rank=int(rank), rank_deficient=rank < k, cond=cond,
                     dev=dev, x=x)


@dataclass
class OracleProjection:
    """Empirical projection of a known target onto the sieve."""

    fit: FitResult
    target: object

    @property
    def coeffs(self):
        return self.fit.coeffs

    def predict(self, pts):
        return self.fit.predict(pts)

    def __call__(self, pts):
        return self.fit.predict(pts)


def project_oracle(basis, x, h0):
    """Fit the noiseless responses h0(X_i); the simulation bias oracle."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    return OracleProjection(fit=fit(basis, x, h0(x)), target=h0)


def sup_error(f, g, grid):
    """max_x |f(x) - g(x)| over the grid (callables or arrays)."""
    fv = f(grid) if callable(f) else np.asarray(f)
    gv = g(grid) if callable(g) else np.asarray(g)
    return float(np.max(np.abs(fv - gv)))


def l2_error(f, g, density, basis=None, quad=None):
    """L2(X) distance of f and g under the closed-form density."""
    if quad is None:
        if basis is None:
            raise ValueError("need either a quadrature rule or a basis")
        quad = basis_quadrature(basis)
    fv = f(quad.nodes) if callable(f) else np.asarray(f)
    gv = g(quad.nodes) if callable(g) else np.asarray(g)
    diff = fv - gv
    val = float(np.sum(quad.weights * density(quad.nodes) * diff * diff))
    return float(np.sqrt(max(val, 0.0)))


# --- Shipped regression targets ------------------------------------------
#
# smooth_trig is infinitely smooth; the holder family has finite declared
# smoothness p at the interior kink, which the rate studies target.

def smooth_trig(pts):
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return np.sum(np.sin(2.0 * np.pi * pts) + 0.3 * np.cos(5.0 * pts), axis=1)


def holder_kink(p, center=0.5):
    """Target with Holder smoothness exactly p at the interior kink.

    For non-integer p this is |x - c|^p (plus a smooth background so the
    function is not even); for integer p the signed variant
    sign(x - c) |x - c|^p keeps the p-th derivative discontinuous.
    """
    if p <= 0:
        raise ValueError("smoothness p must be positive")

    def target(pts):
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        u = pts - center
        core = np.abs(u) ** p
        if float(p).is_integer():
            core = core * np.sign(u)
        return np.sum(core + 0.25 * np.sin(2.0 * np.pi * pts), axis=1)

    return target


NAMED_TARGETS = {
    "smooth_trig": lambda p=None: smooth_trig,
    "holder": lambda p=None: holder_kink(p if p is not None else 1.5),
}


def named_target(name, p=None):
    if name not in NAMED_TARGETS:
        raise ValueError(f"unknown target {name!r}; expected one of "
                         f"{sorted(NAMED_TARGETS)}")
    return NAMED_TARGETS[name](p)
