"""Data-generating processes and Monte Carlo studies.

Regressors are i.i.d. uniform or a uniform-marginal AR copula (latent
Gaussian AR(1) per coordinate pushed through the normal CDF); errors are
martingale differences: fresh innovations, independent of the regressor
path, optionally scaled by a conditional-deviation function of the current
regressor.  Both uniform variants draw through the normal CDF so the
rho -> 0 copula reproduces the i.i.d. stream exactly.

Every study derives one RNG per (study, n-index, replication) from the
master seed, so reports are bit-identical across reruns and worker counts;
replications may execute on a thread pool, results are aggregated in
replication order.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import signal, stats
from scipy.special import ndtr

from .basis import build_basis, spec_with_size
from .estimator import fit, named_target
from .gram import (empirical_gram_matrix, gram_deviation,
                   lebesgue_constant_empirical, theoretical_gram, NumericError)
from .inference import FunctionalSpec, functional_report
from .quadrature import basis_quadrature, sup_grid, uniform_density

_STUDY_TAGS = {"rate": 1, "coverage": 2, "stability": 3, "concentration": 4}


@dataclass(frozen=True)
class RegressorSpec:
    """Strictly stationary regressor process on [0, 1]^d."""

    kind: str = "iid_uniform"   # or "ar_copula"
    rho: float = 0.0

    def __post_init__(self):
        if self.kind not in ("iid_uniform", "ar_copula"):
            raise ValueError(f"unknown regressor kind {self.kind!r}")
        if self.kind == "ar_copula" and not -1.0 < self.rho < 1.0:
            raise ValueError(f"ar_copula rho must be in (-1, 1), got {self.rho}")


@dataclass(frozen=True)
class ErrorSpec:
    """Martingale-difference error distribution.

    "gaussian": N(0, sigma^2); "student_t": scale * t(df) (df = 3 has a
    finite (2+delta)-th moment for delta < 1 but infinite kurtosis);
    "heteroskedastic": sigma_fn(X_i) times a unit-variance innovation.
    """

    kind: str = "gaussian"
    sigma: float = 1.0
    df: float = 3.0
    scale: float = 1.0
    innovation: str = "gaussian"

    def __post_init__(self):
        if self.kind not in ("gaussian", "student_t", "heteroskedastic"):
            raise ValueError(f"unknown error kind {self.kind!r}")
        if self.kind == "student_t" and self.df <= 2.0:
            raise ValueError(f"student_t needs df > 2 for a finite variance, got {self.df}")
        if self.innovation not in ("gaussian", "student_t"):
            raise ValueError(f"unknown innovation kind {self.innovation!r}")


def bump_sigma(pts):
    """Default conditional deviation 0.5 + mean_a x_a (1 - x_a); inf > 0."""
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return 0.5 + np.mean(pts * (1.0 - pts), axis=1)


@dataclass(frozen=True)
class DgpSpec:
    """Regressor process, error law, and named regression target."""

    regressor: RegressorSpec = RegressorSpec()
    error: ErrorSpec = ErrorSpec()
    h0_name: str = "smooth_trig"
    smoothness: float = 2.0
    dim: int = 1
    sigma_fn: object = None     # heteroskedastic scale; defaults to bump_sigma

    @property
    def h0(self):
        return named_target(self.h0_name, p=self.smoothness)


def derived_rng(master_seed, study, n_index, rep):
    """Deterministic per-replication generator stream."""
    tag = _STUDY_TAGS.get(study, 0)
    return np.random.default_rng([int(master_seed), tag, int(n_index), int(rep)])


def regressor_paths(spec, n, dim, rng, reps=1):
    """(reps, n, dim) array of regressor paths."""
    z = rng.standard_normal((reps, n, dim))
    if spec.kind == "ar_copula" and spec.rho != 0.0:
        rho = spec.rho
        innov = z * np.sqrt(1.0 - rho * rho)
        innov[:, 0, :] = z[:, 0, :]  # stationary start
        z = signal.lfilter([1.0], [1.0, -rho], innov, axis=1)
    return ndtr(z)


def error_draws(spec, x, rng, sigma_fn=None):
    """Martingale-difference errors for the sample points x (n, d)."""
    n = x.shape[0]
    if spec.kind == "gaussian":
        return spec.sigma * rng.standard_normal(n)
    if spec.kind == "student_t":
        return spec.scale * rng.standard_t(spec.df, n)
    if spec.innovation == "student_t":
        innov = rng.standard_t(spec.df, n) / np.sqrt(spec.df / (spec.df - 2.0))
    else:
        innov = rng.standard_normal(n)
    fn = sigma_fn if sigma_fn is not None else bump_sigma
    return fn(x) * innov


def gen_sample(dgp, n, seed=None, rng=None):
    """One sample (X, Y) with Y_i = h0(X_i) + eps_i, deterministic given seed."""
    if rng is None:
        rng = np.random.default_rng(seed)
    x = regressor_paths(dgp.regressor, n, dgp.dim, rng, reps=1)[0]
    eps = error_draws(dgp.error, x, rng, sigma_fn=dgp.sigma_fn)
    y = dgp.h0(x) + eps
    return x, y


@dataclass
class StudyReport:
    """Study output: one summary mapping plus per-replication detail rows."""

    kind: str
    summary: dict
    rows: list
    columns: list
    config: dict = field(default_factory=dict)


def _run_indexed(task, n_jobs, threads):
    """Evaluate task(i) for i in range(n_jobs), in order, optionally pooled."""
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(task, range(n_jobs)))
    return [task(i) for i in range(n_jobs)]


def fit_loglog_slope(sizes, errors):
    """OLS slope of log(error) on log(n / log n), with its SE and R^2."""
    sizes = np.asarray(sizes, dtype=float)
    errors = np.asarray(errors, dtype=float)
    u = np.log(sizes / np.log(sizes))
    v = np.log(errors)
    design = np.column_stack([np.ones_like(u), u])
    coef, *_ = np.linalg.lstsq(design, v, rcond=None)
    resid = v - design @ coef
    dof = max(u.size - 2, 1)
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(design.T @ design)
    tss = float(np.sum((v - v.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / tss if tss > 0 else 1.0
    return float(coef[1]), float(np.sqrt(cov[1, 1])), r2


def k_rule(n, p, d, c=1.0):
    """Series size K = round(c * (n / log n)^(d / (2p + d)))."""
    return max(1, int(round(c * (n / np.log(n)) ** (d / (2.0 * p + d)))))


@dataclass(frozen=True)
class RateStudyConfig:
    dgp: DgpSpec
    basis_spec: object
    n_grid: tuple
    reps: int = 100
    krule_c: float = 1.0
    krule_p: float = None       # defaults to the DGP smoothness
    seed: int = 0
    threads: int = 1
    synthetic_oracle: bool = False
    synthetic_slope: float = -0.4


def rate_study(config):
    """Median sup/L2 error per n and the fitted log-log slopes.

    Meaningful slope estimates want at least 4 points in the n grid and
    50 or more replications; smaller runs are allowed for smoke tests and
    the synthetic-oracle plumbing check.
    """
    dgp = config.dgp
    p = config.krule_p if config.krule_p is not None else dgp.smoothness
    n_grid = tuple(int(n) for n in config.n_grid)
    rows = []
    med_sup, med_l2 = [], []
    for i_n, n in enumerate(n_grid):
        k_target = k_rule(n, p, dgp.dim, config.krule_c)
        size_1d = max(2, int(round(k_target ** (1.0 / dgp.dim))))
        spec_n = spec_with_size(config.basis_spec, size_1d)
        if config.synthetic_oracle:
            err = (n / np.log(n)) ** config.synthetic_slope
            sups = np.full(config.reps, err)
            l2s = np.full(config.reps, err)
        else:
            basis = build_basis(spec_n)
            grid = sup_grid(basis)
            quad = basis_quadrature(basis)
            h0_grid = dgp.h0(grid)
            h0_quad = dgp.h0(quad.nodes)
            wf = quad.weights  # uniform design density on [0,1]^d

            def one_rep(rep, basis=basis, grid=grid, quad=quad,
                        h0_grid=h0_grid, h0_quad=h0_quad, wf=wf,
                        n=n, i_n=i_n):
                rng = derived_rng(config.seed, "rate", i_n, rep)
                x, y = gen_sample(dgp, n, rng=rng)
                fr = fit(basis, x, y)
                pred_grid = fr.predict(grid)
                pred_quad = fr.predict(quad.nodes)
                sup = float(np.max(np.abs(pred_grid - h0_grid)))
                diff = pred_quad - h0_quad
                l2 = float(np.sqrt(max(np.sum(wf * diff * diff), 0.0)))
                return sup, l2

            pairs = _run_indexed(one_rep, config.reps, config.threads)
            sups = np.array([p_[0] for p_ in pairs])
            l2s = np.array([p_[1] for p_ in pairs])
        for rep in range(config.reps):
            rows.append((n, spec_n.size, rep, sups[rep], l2s[rep]))
        med_sup.append(float(np.median(sups)))
        med_l2.append(float(np.median(l2s)))
    slope_sup, se_sup, r2_sup = fit_loglog_slope(n_grid, med_sup)
    slope_l2, se_l2, r2_l2 = fit_loglog_slope(n_grid, med_l2)
    summary = {
        "n_grid": list(n_grid),
        "median_sup": med_sup,
        "median_l2": med_l2,
        "slope_sup": slope_sup, "slope_sup_se": se_sup, "slope_sup_r2": r2_sup,
        "slope_l2": slope_l2, "slope_l2_se": se_l2, "slope_l2_r2": r2_l2,
    }
    return StudyReport(kind="rate", summary=summary, rows=rows,
                       columns=["n", "k", "rep", "sup_error", "l2_error"])


@dataclass(frozen=True)
class CoverageStudyConfig:
    dgp: DgpSpec
    basis_spec: object
    n: int
    functional: FunctionalSpec
    reps: int = 1000
    level: float = 0.95
    krule_c: float = 1.0
    krule_p: float = None
    seed: int = 0
    threads: int = 1


def _true_value(functional, dgp, quad):
    if functional.kind == "point_eval":
        return float(dgp.h0(functional.x0.reshape(1, -1))[0])
    if functional.kind == "nonlinear_exp_eval":
        return float(np.exp(dgp.h0(functional.x0.reshape(1, -1))[0]))
    hv = dgp.h0(quad.nodes)
    w = np.asarray(functional.weight(quad.nodes), dtype=float)
    return float(np.sum(quad.weights * w * hv))


def coverage_study(config):
    """Empirical CI coverage and the replication t-statistics."""
    dgp = config.dgp
    p = config.krule_p if config.krule_p is not None else dgp.smoothness
    k_target = k_rule(config.n, p, dgp.dim, config.krule_c)
    spec_n = spec_with_size(config.basis_spec, max(2, int(round(k_target ** (1.0 / dgp.dim)))))
    basis = build_basis(spec_n)
    quad = basis_quadrature(basis)
    f0 = _true_value(config.functional, dgp, quad)

    def one_rep(rep):
        rng = derived_rng(config.seed, "coverage", 0, rep)
        x, y = gen_sample(dgp, config.n, rng=rng)
        fr = fit(basis, x, y)
        try:
            rep_out = functional_report(fr, config.functional, f0=f0,
                                        level=config.level, quad=quad)
        except NumericError:
            return None
        covered = rep_out.ci[0] <= f0 <= rep_out.ci[1]
        return (rep, rep_out.fhat, rep_out.vk_hat, rep_out.tstat,
                rep_out.ci[0], rep_out.ci[1], int(covered))

    results = _run_indexed(one_rep, config.reps, config.threads)
    rows = [r for r in results if r is not None]
    degenerate = sum(1 for r in results if r is None)
    tsample = np.array([r[3] for r in rows])
    covered = np.array([r[6] for r in rows])
    lengths = np.array([r[5] - r[4] for r in rows])
    ks = stats.kstest(tsample, "norm") if tsample.size else None
    summary = {
        "n": config.n, "k": spec_n.size, "level": config.level,
        "f0": f0,
        "coverage": float(np.mean(covered)) if covered.size else np.nan,
        "mean_ci_length": float(np.mean(lengths)) if lengths.size else np.nan,
        "ks_stat": float(ks.statistic) if ks else np.nan,
        "ks_pvalue": float(ks.pvalue) if ks else np.nan,
        "degenerate": degenerate,
        "reps": config.reps,
    }
    return StudyReport(kind="coverage", summary=summary, rows=rows,
                       columns=["rep", "fhat", "vk_hat", "t", "lo", "hi",
                                "covered"])


@dataclass(frozen=True)
class StabilityStudyConfig:
    dgp: DgpSpec
    basis_specs: tuple           # iterable of BasisSpec templates
    k_grid: tuple
    n_grid: tuple
    reps: int = 10
    seed: int = 0
    threads: int = 1
    lebesgue: bool = True        # skip the costly sup computation when False


def stability_study(config):
    """Gram deviation and empirical Lebesgue constant over (basis, K, n)."""
    dgp = config.dgp
    density = uniform_density(dgp.dim)  # both shipped designs have uniform marginals
    rows = []
    med = {}
    for spec_t in config.basis_specs:
        for k_target in config.k_grid:
            spec_k = spec_with_size(spec_t, max(2, int(round(k_target ** (1.0 / dgp.dim)))))
            basis = build_basis(spec_k)
            gram_th = theoretical_gram(basis, density)
            grid = sup_grid(basis)
            for i_n, n in enumerate(config.n_grid):

                def one_rep(rep, basis=basis, gram_th=gram_th, grid=grid,
                            n=n, i_n=i_n, k_target=k_target):
                    rng = derived_rng(config.seed, "stability",
                                      1000 * i_n + int(k_target), rep)
                    x = regressor_paths(dgp.regressor, n, dgp.dim, rng)[0]
                    dev = gram_deviation(gram_th, empirical_gram_matrix(basis, x))
                    if not config.lebesgue:
                        return dev, np.nan, False
                    leb = lebesgue_constant_empirical(basis, x, grid=grid)
                    return dev, leb.value, leb.rank_deficient

                out = _run_indexed(one_rep, config.reps, config.threads)
                devs = np.array([o[0] for o in out])
                lebs = np.array([o[1] for o in out])
                flagged = sum(int(o[2]) for o in out)
                for rep in range(config.reps):
                    rows.append((spec_t.family, spec_k.size, n, rep,
                                 devs[rep], lebs[rep]))
                med[(spec_t.family, spec_k.size, n)] = (
                    float(np.median(devs)), float(np.median(lebs)), flagged)
    summary = {
        "medians": [
            {"family": fam, "k": k, "n": n, "dev": v[0],
             "lebesgue_empirical": v[1], "rank_deficient": v[2]}
            for (fam, k, n), v in sorted(med.items())
        ],
    }
    # per-(family, K) deviation slope in log n where the n grid allows it
    slopes = []
    for spec_t in config.basis_specs:
        for k_target in config.k_grid:
            spec_k = spec_with_size(spec_t, max(2, int(round(k_target ** (1.0 / dgp.dim)))))
            pts = [(n, med[(spec_t.family, spec_k.size, n)][0])
                   for n in config.n_grid]
            if len(pts) >= 2 and all(v > 0 for _, v in pts):
                u = np.log([float(n) for n, _ in pts])
                v = np.log([v for _, v in pts])
                slope = float(np.polyfit(u, v, 1)[0])
                slopes.append({"family": spec_t.family, "k": spec_k.size,
                               "dev_slope_logn": slope})
    summary["dev_slopes"] = slopes
    return StudyReport(kind="stability", summary=summary, rows=rows,
                       columns=["family", "k", "n", "rep", "dev",
                                "lebesgue_empirical"])
