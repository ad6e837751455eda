"""Gram matrices, orthonormalized deviations, and projection sup norms.

The theoretical Gram ``G = E[b_w(X) b_w(X)']`` is computed by the
basis-aligned quadrature of :mod:`sievereg.quadrature`; the empirical Gram is
``B_w' B_w / n``.  The deviation ``||G^{-1/2} (B'B/n) G^{-1/2} - I||`` (spectral
norm) measures how far the empirical and theoretical L2 norms are from
agreeing over the sieve; it equals the worst relative discrepancy of the
empirical second moment over unit-L2(X) functions in the span.

Also here: the Lebesgue constants (sup-norm operator norms) of the
theoretical and empirical L2 projections onto the sieve, and the
banded-inverse bound with its exponential off-diagonal decay envelope.
"""

from dataclasses import dataclass

import numpy as np

from .quadrature import basis_quadrature, sup_grid, weighted_basis_gram

_EIG_REL_TOL = 1e4  # multiples of machine eps, times K * lambda_max


class NumericError(RuntimeError):
    """A numeric precondition failed (singular Gram, degenerate input)."""


@dataclass
class GramSummary:
    """Theoretical and empirical Grams plus the constants derived from them.

    dev is the spectral norm of the whitened empirical Gram minus identity;
    zeta is the grid sup of ||b_w(x)||; lam is lambda_min(G)^{-1/2};
    bandwidth is the half-band of G (max |i-j| with a nonzero entry).
    """

    gram: np.ndarray
    gram_emp: np.ndarray
    dev: float
    zeta: float
    lam: float
    bandwidth: int
    n: int

    def to_jsonable(self):
        return {
            "dev": self.dev,
            "zeta": self.zeta,
            "lambda": self.lam,
            "bandwidth": self.bandwidth,
            "n": self.n,
            "k": int(self.gram.shape[0]),
        }


def theoretical_gram(basis, density, quad=None):
    """K x K matrix of L2(X) inner products of the weighted basis."""
    if quad is None:
        quad = basis_quadrature(basis)
    return weighted_basis_gram(basis, quad, point_weight=density)


def empirical_gram_matrix(basis, x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    vals = basis.evaluate(x)
    return vals.T @ vals / x.shape[0]


def inverse_sqrt(gram):
    """Symmetric G^{-1/2} via eigendecomposition.

    Raises NumericError("theoretical Gram not invertible") when the smallest
    eigenvalue is at or below the rank tolerance.
    """
    evals, evecs = np.linalg.eigh(0.5 * (gram + gram.T))
    k = gram.shape[0]
    tol = k * np.finfo(float).eps * max(evals[-1], 0.0)
    if evals[0] <= tol:
        raise NumericError("theoretical Gram not invertible")
    return (evecs / np.sqrt(evals)) @ evecs.T


def gram_deviation(gram, gram_emp):
    """Spectral norm of G^{-1/2} G_emp G^{-1/2} - I."""
    w = inverse_sqrt(gram)
    m = w @ gram_emp @ w
    m = 0.5 * (m + m.T)
    evals = np.linalg.eigvalsh(m - np.eye(m.shape[0]))
    return float(np.max(np.abs(evals)))


def zeta_constant(basis, grid=None):
    """sup_x ||b_w(x)|| over the certification grid."""
    if grid is None:
        grid = sup_grid(basis)
    best = 0.0
    for start in range(0, grid.shape[0], 65536):
        vals = basis.evaluate(grid[start:start + 65536])
        best = max(best, float(np.max(np.sum(vals * vals, axis=1))))
    return np.sqrt(best)


def lambda_constant(gram):
    """[lambda_min(G)]^{-1/2}; infinite when G is singular."""
    lam_min = float(np.linalg.eigvalsh(0.5 * (gram + gram.T))[0])
    if lam_min <= 0.0:
        return np.inf
    return 1.0 / np.sqrt(lam_min)


def half_bandwidth(mat, rel_tol=1e-12):
    """Largest |i - j| whose entry exceeds rel_tol * max|entry|."""
    scale = np.max(np.abs(mat))
    if scale == 0.0:
        return 0
    i, j = np.nonzero(np.abs(mat) > rel_tol * scale)
    return int(np.max(np.abs(i - j))) if i.size else 0


def empirical_gram(basis, x, gram, grid=None):
    """GramSummary for a sample, given the theoretical Gram."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    gram_emp = empirical_gram_matrix(basis, x)
    dev = gram_deviation(gram, gram_emp)
    return GramSummary(
        gram=gram,
        gram_emp=gram_emp,
        dev=dev,
        zeta=zeta_constant(basis, grid=grid),
        lam=lambda_constant(gram),
        bandwidth=half_bandwidth(gram),
        n=x.shape[0],
    )


def identifiability_gap(basis, x, gram):
    """Worst relative empirical-vs-theoretical second-moment gap on the sieve.

    Equals sup over unit-L2(X) functions b in the span of
    |n^{-1} sum b(X_i)^2 - 1|, which reduces to the spectral norm of the
    whitened empirical Gram minus the identity.
    """
    return gram_deviation(gram, empirical_gram_matrix(basis, x))


def _solve_psd(mat, rhs):
    """Solve with the symmetric eigendecomposition, pseudo-inverting.

    Returns (solution, rank_deficient_flag); singular values below
    K * eps * max are treated as zero.
    """
    evals, evecs = np.linalg.eigh(0.5 * (mat + mat.T))
    k = mat.shape[0]
    tol = k * np.finfo(float).eps * max(float(evals[-1]), 0.0)
    keep = evals > tol
    inv = np.where(keep, 1.0 / np.where(keep, evals, 1.0), 0.0)
    rhs = np.asarray(rhs, dtype=float)
    squeeze = rhs.ndim == 1
    if squeeze:
        rhs = rhs[:, None]
    sol = evecs @ (inv[:, None] * (evecs.T @ rhs))
    return (sol[:, 0] if squeeze else sol), bool(np.any(~keep))


def lebesgue_constant_theoretical(basis, density, quad=None, grid=None,
                                  chunk=512):
    """Sup-norm operator norm of the L2(X) projection onto the sieve.

    Evaluates sup over the grid in x of the L1(X) norm of the projection
    kernel b(x)' G^{-1} b(.), which the sign pattern of the kernel attains.
    """
    if quad is None:
        max_nodes = 2 ** 14 if basis.spec.family == "wavelet" else None
        quad = basis_quadrature(basis, max_nodes_1d=max_nodes)
    if grid is None:
        grid = sup_grid(basis)
    gram = weighted_basis_gram(basis, quad, point_weight=density)
    vals_q = basis.evaluate(quad.nodes)          # (Q, K)
    wq = quad.weights * density(quad.nodes)      # (Q,)
    kernel_half, _ = _solve_psd(gram, vals_q.T)  # (K, Q)
    best = 0.0
    for start in range(0, grid.shape[0], chunk):
        bx = basis.evaluate(grid[start:start + chunk])   # (c, K)
        kern = bx @ kernel_half                          # (c, Q)
        best = max(best, float(np.max(np.abs(kern) @ wq)))
    return best


@dataclass
class EmpiricalLebesgue:
    value: float
    rank_deficient: bool


def lebesgue_constant_empirical(basis, x, grid=None, chunk=512):
    """Sup-norm operator norm of the empirical projection P_{K,w,n}.

    Over functions unconstrained off the sample, the norm at a point x is
    sum_i |b(x)' (B'B)^- b(X_i)|; the result takes the sup over the grid.
    A rank-deficient design switches to the pseudo-inverse and is flagged.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if grid is None:
        grid = sup_grid(basis)
    vals = basis.evaluate(x)                       # (n, K)
    btb = vals.T @ vals
    half, flagged = _solve_psd(btb, vals.T)        # (K, n)
    best = 0.0
    for start in range(0, grid.shape[0], chunk):
        bx = basis.evaluate(grid[start:start + chunk])
        best = max(best, float(np.max(np.sum(np.abs(bx @ half), axis=1))))
    return EmpiricalLebesgue(value=best, rank_deficient=flagged)


@dataclass
class DmsBound:
    """Banded-inverse bound: ||A^{-1}||_linf <= bound = 2C/(1 - lambda_decay).

    kappa is the condition number, lambda_decay the per-offdiagonal decay
    rate, and C the entrywise envelope constant:
    |A^{-1}_{ij}| <= C * lambda_decay ** |i-j|.
    """

    kappa: float
    lambda_decay: float
    C: float
    bound: float


def dms_bound(mat, band):
    """Decay bound for the inverse of a symmetric positive definite matrix
    whose entries vanish for |i - j| > band / 2 (band even).
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("matrix must be square")
    if band < 2 or band % 2 != 0:
        raise ValueError(f"band must be a positive even integer, got {band}")
    if not np.allclose(mat, mat.T, rtol=0.0, atol=1e-12 * max(1.0, np.max(np.abs(mat)))):
        raise ValueError("matrix must be symmetric")
    i, j = np.nonzero(np.abs(mat) > 1e-13 * max(1.0, np.max(np.abs(mat))))
    if i.size and np.max(np.abs(i - j)) > band // 2:
        raise ValueError(
            f"band violation: nonzero entry at offset {np.max(np.abs(i - j))} "
            f"> band/2 = {band // 2}"
        )
    evals = np.linalg.eigvalsh(0.5 * (mat + mat.T))
    if evals[0] <= 0.0:
        raise NumericError("matrix is not positive definite")
    kappa = float(evals[-1] / evals[0])
    root = np.sqrt(kappa)
    lam = ((root - 1.0) / (root + 1.0)) ** (2.0 / band)
    coef = (1.0 / evals[0]) * max(1.0, (1.0 + root) ** 2 / (2.0 * kappa))
    return DmsBound(kappa=kappa, lambda_decay=float(lam), C=float(coef),
                    bound=float(2.0 * coef / (1.0 - lam)))
