"""Matrix Bernstein tail bounds and their Monte Carlo validation.

``tropp_bound`` evaluates the exponential tail bound for the spectral norm
of a sum of independent, uniformly bounded, mean-zero random matrices.
``mixing_bound`` evaluates its blocking extension for absolutely regular
sequences; note its three-term value bounds ``P(||sum|| >= 6 t)`` at the
given ``t`` (the coupled odd/even block sums each cost a factor).  The
generators here simulate whitened-Gram deviation sums (and simple scalar
sums) with certified envelope constants, so empirical tail frequencies can
be compared against the bounds.
"""

from dataclasses import dataclass

import numpy as np

from .gram import inverse_sqrt
from .simulate import regressor_paths, RegressorSpec


@dataclass(frozen=True)
class TailBoundInput:
    """Constants entering the tail bounds.

    r_bound is the a.s. spectral-norm bound on each summand; sigma2 the
    independent-case variance proxy max(||sum E[XX']||, ||sum E[X'X]||);
    s2 the mixing-case pairwise proxy max_{i,j} of the same quantities;
    q the block length and beta_q the mixing coefficient at lag q.
    """

    d1: int
    d2: int
    n: int
    r_bound: float
    sigma2: float = 0.0
    s2: float = 0.0
    q: int = 1
    beta_q: float = 0.0

    def __post_init__(self):
        if min(self.d1, self.d2, self.n) < 1:
            raise ValueError("dimensions and sample size must be positive")
        if min(self.r_bound, self.sigma2, self.s2, self.beta_q) < 0:
            raise ValueError("bound constants must be nonnegative")


def tropp_bound(inp, t):
    """(d1 + d2) exp(-(t^2/2) / (sigma2 + r_bound * t / 3)); bounds
    P(||sum of independent mean-zero matrices|| >= t)."""
    if t < 0:
        raise ValueError("threshold t must be nonnegative")
    dims = inp.d1 + inp.d2
    if t == 0.0:
        return float(dims)
    denom = inp.sigma2 + inp.r_bound * t / 3.0
    if denom <= 0.0:
        return 0.0
    return float(dims * np.exp(-(t * t / 2.0) / denom))


def mixing_bound(inp, t, remainder_tail=0.0):
    """Blocked tail bound for beta-mixing summands; bounds
    P(||sum|| >= 6 t).

    (n/q) beta(q) + remainder_tail + 2 (d1+d2) exp(-(t^2/2) /
    (n q s2 + q r_bound t / 3)).  remainder_tail covers the incomplete
    final block and is exactly 0 when q divides n.
    """
    if t < 0:
        raise ValueError("threshold t must be nonnegative")
    if not 0.0 <= remainder_tail <= 1.0:
        raise ValueError("remainder_tail must be a probability")
    if not 1 <= inp.q <= inp.n // 2:
        raise ValueError(f"block length q must be in [1, n/2], got {inp.q}")
    coupling = inp.n / inp.q * inp.beta_q
    dims = inp.d1 + inp.d2
    if t == 0.0:
        expo = 2.0 * dims
    else:
        denom = inp.n * inp.q * inp.s2 + inp.q * inp.r_bound * t / 3.0
        expo = 0.0 if denom <= 0.0 else 2.0 * dims * np.exp(-(t * t / 2.0) / denom)
    return float(coupling + remainder_tail + expo)


class ZeroGenerator:
    """All summands identically zero (plumbing check)."""

    d1 = d2 = 1

    def __init__(self, n):
        self.n = n
        self.input = TailBoundInput(d1=1, d2=1, n=n, r_bound=0.0)

    def sum_norms(self, reps, seed):
        return np.zeros(reps)


class RademacherGenerator:
    """Scalar sum of n independent signs; r_bound = 1, sigma2 = n."""

    d1 = d2 = 1

    def __init__(self, n):
        self.n = n
        self.input = TailBoundInput(d1=1, d2=1, n=n, r_bound=1.0,
                                    sigma2=float(n), s2=1.0)

    def sum_norms(self, reps, seed):
        rng = np.random.default_rng([int(seed), 101])
        signs = rng.integers(0, 2, size=(reps, self.n)) * 2 - 1
        return np.abs(signs.sum(axis=1)).astype(float)

    def beta_envelope(self, q):
        return 0.0


class GramDeviationGenerator:
    """Summands n^{-1} (b_tilde(X_i) b_tilde(X_i)' - I) for a basis.

    The sum is the whitened empirical Gram minus the identity.  Envelope
    constants follow from ||b_tilde(x)||^2 <= zeta^2 lambda^2:
    r_bound = (zeta^2 lambda^2 + 1)/n, sigma2 <= (zeta^2 lambda^2 + 1)/n,
    and s2 <= (zeta^2 lambda^2 + 1)/n^2 (pairwise, by Cauchy-Schwarz).
    For the AR copula the beta envelope is 4 rho^q (exponential mixing of
    the latent Gaussian AR(1); a conservative coefficient).
    """

    def __init__(self, basis, gram, n, regressor=None, zeta=None, lam=None):
        from .gram import zeta_constant, lambda_constant
        self.basis = basis
        self.n = n
        self.k = basis.size
        self.d1 = self.d2 = self.k
        self.regressor = regressor if regressor is not None else RegressorSpec()
        self.white = inverse_sqrt(gram)
        zeta = zeta_constant(basis) if zeta is None else zeta
        lam = lambda_constant(gram) if lam is None else lam
        envelope = zeta * zeta * lam * lam + 1.0
        self.input = TailBoundInput(
            d1=self.k, d2=self.k, n=n,
            r_bound=envelope / n,
            sigma2=envelope / n,
            s2=envelope / (n * n),
        )

    def beta_envelope(self, q):
        if self.regressor.kind == "iid_uniform" or self.regressor.rho == 0.0:
            return 0.0
        return 4.0 * abs(self.regressor.rho) ** q

    def sum_norms(self, reps, seed, chunk=64):
        """||sum_i Xi_i|| per replication (exact spectral norms)."""
        out = np.empty(reps)
        eye = np.eye(self.k)
        done = 0
        c = 0
        while done < reps:
            m = min(chunk, reps - done)
            rng = np.random.default_rng([int(seed), 202, c])
            x = regressor_paths(self.regressor, self.n, self.basis.spec.dim,
                                rng, reps=m)
            flat = x.reshape(m * self.n, -1)
            vals = (self.basis.evaluate(flat) @ self.white).reshape(m, self.n, self.k)
            grams = np.einsum("rnk,rnl->rkl", vals, vals) / self.n
            evals = np.linalg.eigvalsh(grams - eye[None, :, :])
            out[done:done + m] = np.max(np.abs(evals), axis=1)
            done += m
            c += 1
        return out


@dataclass
class TailStudy:
    """Per-threshold empirical exceedance frequencies with binomial SEs."""

    t_grid: np.ndarray
    freq: np.ndarray
    se: np.ndarray
    reps: int
    norms: np.ndarray


def empirical_tail(generator, t_grid, reps, seed):
    """Monte Carlo frequencies of ||sum|| >= t over the threshold grid."""
    t_grid = np.asarray(t_grid, dtype=float)
    norms = generator.sum_norms(reps, seed)
    freq = np.array([np.mean(norms >= t) for t in t_grid])
    se = np.sqrt(freq * (1.0 - freq) / reps)
    return TailStudy(t_grid=t_grid, freq=freq, se=se, reps=reps, norms=norms)
