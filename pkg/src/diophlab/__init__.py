"""diophlab: exact best approximations, lattice window counts along the
diagonal flow, and the statistics tying the two together."""

from .bestapprox import (BestApproxRecord, BestApproxSequence, CFExpansion,
                         TargetMatrix, cf_expand, cf_fast_count,
                         enumerate_best_approximations, nearest_residual)
from .exactexp import ExpThreshold, cmp_exp, exp_enclosure, floor_log
from .lattice import (INDETERMINATE, BoxSpec, CertifiedPrecisionError,
                      EnumerationBudgetError, WindowCountResult, LatticeBasis,
                      LatticePoint, apply_flow, boundary_shell_count, window_count,
                      make_unipotent, pair_proximity_count, perturbation_check,
                      points_in_box, random_sl_perturbation, transform_lattice)
from .norms import (EUCLIDEAN, SUP, NormSpec, NormValue, ProductNormSpec,
                    enumerate_shells, norm_eval)
from .orbit import (OrbitSeries, ShellReport, XiEstimate, autocovariance,
                    birkhoff_series, shell_counts_via_bestapprox,
                    variance_from_autocovariance, verify_correspondence)
from .runner import (ExperimentConfig, ResultStore, load_config, parse_config,
                     run_clt, run_correspondence, run_lk, run_verify,
                     sample_theta)
from .stats import (GAMMA_1D_SIGNED, CLTReport, CumulantReport, DeviationSample,
                    NormalModel, clt_suite, error_exponent_fit, estimate_gamma,
                    joint_cumulant, ks_test, normal_cdf)

__version__ = "0.1.0"
