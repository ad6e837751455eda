"""Series least-squares regression on sieve bases.

Builds spline, boundary-wavelet, trigonometric, and polynomial sieves on
the unit cube; fits the weighted series LS estimator; quantifies the
empirical-vs-theoretical Gram agreement and the sup-norm stability of the
projections; produces plug-in t statistics and confidence intervals for
linear and nonlinear functionals; and validates matrix Bernstein tail
bounds (independent and beta-mixing) against simulation.
"""

from .basis import (BasisSpec, BasisSystem, ConfigurationError, build_basis,
                    evaluate, evaluate_gradient, spec_with_size)
from .concentration import (GramDeviationGenerator, RademacherGenerator,
                            TailBoundInput, ZeroGenerator, empirical_tail,
                            mixing_bound, tropp_bound)
from .daubechies import (CascadeError, ScalingFamily, load_family,
                         save_family, scaling_filter, tabulate_daubechies)
from .estimator import (FitResult, OracleProjection, fit, holder_kink,
                        l2_error, project_oracle, smooth_trig, sup_error,
                        named_target)
from .gram import (DmsBound, EmpiricalLebesgue, GramSummary, NumericError,
                   dms_bound, empirical_gram, empirical_gram_matrix,
                   gram_deviation, identifiability_gap, lambda_constant,
                   lebesgue_constant_empirical,
                   lebesgue_constant_theoretical, theoretical_gram,
                   zeta_constant)
from .inference import (FunctionalReport, FunctionalSpec, confidence_interval,
                        functional_report, nonlinear_functional_eval,
                        omega_hat, riesz_representer, sieve_variance_oracle,
                        sieve_variance_plugin, t_statistic)
from .quadrature import (Density, Quadrature, basis_quadrature,
                         density_by_name, sine_density, sup_grid,
                         uniform_density)
from .simulate import (CoverageStudyConfig, DgpSpec, ErrorSpec,
                       RateStudyConfig, RegressorSpec, StabilityStudyConfig,
                       StudyReport, bump_sigma, coverage_study, derived_rng,
                       fit_loglog_slope, gen_sample, k_rule, rate_study,
                       regressor_paths, stability_study)

__version__ = "0.1.0"
