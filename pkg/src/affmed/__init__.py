"""Affine-equivariant robust mean estimation.

The main entry points are :func:`high_dim_median` (the certified median of a
point set) and :func:`estimate_ours` (the median of bucket means).
"""

from .errors import AffmedError, DimensionMismatch, InfeasibleDegenerate, SingularCovariance
from .estimators import (EstimateResult, EstimatorConfig, bucket_means, choose_k, estimate,
                         estimate_coord_median, estimate_empirical_mean, estimate_ours,
                         estimate_stahel_donoho, estimate_tukey, tukey_depth_1d)
from .geometry import AffineMap, mahalanobis_norm, project, sample_cov, sample_mean, whiten
from .instances import (ContaminationSpec, DistributionSpec, Moments, breakdown_family, contaminate,
                        heavytailed_eps, moments, quant_family, sample)
from .kernels import BACKEND
from .median import (MedianConfig, MedianReport, SlabConstraint, build_slab, find_violating_direction,
                     helly_feasibility_certificate, high_dim_median, solve_minmax)
from .metrics import directional_certificate, mahalanobis_error
from .trimmed import (Interval, TrimmedStats, brute_force_interval, directional_feasible_interval,
                      min_sigma_subset, outlyingness_1d, slab_interval)

__version__ = "0.1.0"
