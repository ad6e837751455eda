"""Desk-scale look at the convergence-rate and stability phenomena.

A reduced version of the acceptance studies (fewer replications): median
sup/L2 errors of the spline fit shrink along the K-rule with log-log slope
near -0.4, the whitened Gram deviation shrinks like 1/sqrt(n), and the
empirical Lebesgue constants stay flat in K for the local bases.
"""

from sievereg import (BasisSpec, DgpSpec, ErrorSpec, RateStudyConfig,
                      RegressorSpec, StabilityStudyConfig, rate_study,
                      stability_study)

print("-- sup/L2 error rates, order-3 splines, K ~ 4 (n/log n)^(1/5) --")
for label, dgp in [
    ("iid uniform X, gaussian errors", DgpSpec()),
    ("AR-copula(0.7) X, t(3) errors",
     DgpSpec(regressor=RegressorSpec("ar_copula", 0.7),
             error=ErrorSpec(kind="student_t", df=3.0))),
]:
    report = rate_study(RateStudyConfig(
        dgp=dgp, basis_spec=BasisSpec.bspline(3, 2),
        n_grid=(2000, 4000, 8000, 16000), reps=20, krule_c=4.0, krule_p=2.0,
        seed=1, threads=4))
    s = report.summary
    print(f"{label}:")
    print(f"  median sup errors {['%.4f' % m for m in s['median_sup']]}")
    print(f"  sup slope {s['slope_sup']:.3f}   L2 slope {s['slope_l2']:.3f}")

print()
print("-- Gram deviation and empirical Lebesgue constants --")
report = stability_study(StabilityStudyConfig(
    dgp=DgpSpec(), basis_specs=(BasisSpec.wavelet(1, 3), BasisSpec.bspline(3, 5)),
    k_grid=(8, 32), n_grid=(2000, 8000), reps=5, seed=2, threads=4))
print(f"{'family':<10} {'K':>4} {'n':>6} {'median dev':>11} {'median Leb':>11}")
for entry in report.summary["medians"]:
    print(f"{entry['family']:<10} {entry['k']:>4} {entry['n']:>6} "
          f"{entry['dev']:>11.4f} {entry['lebesgue_empirical']:>11.4f}")
print("dev slopes in log n:", report.summary["dev_slopes"])
