"""Fractional integration and maximal-function machinery on product grids.

The library discretizes the box [-L, L]^(m+n) = x-block times y-block,
materializes the separable power-law kernel |x|^(alpha-m) |y|^(beta-n),
and provides:

* quadrature norms, slice norms, and anisotropic dilation of sampled
  functions (:mod:`prodhls.grid`);
* the kernel and dyadic layer-cake envelopes (:mod:`prodhls.kernel`);
* direct and FFT convolution plus the four-region split of the
  convolution sum at a point (:mod:`prodhls.convolution`);
* strong and partial maximal operators over dyadic product windows and
  the mixed-norm field built from them (:mod:`prodhls.maximal`);
* the pointwise certification engine: admissibility checks, explicit
  region constants, closed-form balancing radii, and per-point
  certificates (:mod:`prodhls.hedberg`);
* experiment campaigns and the CLI harness (:mod:`prodhls.harness`,
  :mod:`prodhls.cli`).
"""

__version__ = "0.1.0"

from .grid import (GridFunction, ProductGrid, dilate, load_grid_function,
                   lp_norm, sample_function, save_grid_function,
                   slice_lp_norm_x, slice_lp_norm_y, slice_lp_norms_x,
                   slice_lp_norms_y)
from .kernel import (Exponents, LayerCake, ball_volume, layer_cake,
                     profile_ball_integral, riesz_kernel, sphere_surface)
from .convolution import RegionBounds, convolve_direct, convolve_fast, region_split
from .maximal import (CompositionReport, GNormReport, WindowFamily,
                      composition_check, g_function, g_norm_bound,
                      partial_maximal_x, partial_maximal_y, strong_maximal)
from .hedberg import (AdmissibilityReport, CertificateViolation, ExponentError,
                      HedbergCertificate, HedbergContext, bound_region11,
                      bound_region12, bound_region21, bound_region22,
                      certify_point, check_exponents, final_bound_case1,
                      final_bound_case2, inner_ball_constant,
                      prepare_certification, region_slack_factors,
                      select_radii_case1, select_radii_case2,
                      tail_integral_constant)
from .harness import (ConfigError, ExperimentConfig, make_family,
                      run_necessity_sweep, run_norm_check,
                      run_pointwise_campaign)

__all__ = [
    "__version__",
    "ProductGrid", "GridFunction", "lp_norm", "slice_lp_norm_x",
    "slice_lp_norm_y", "slice_lp_norms_x", "slice_lp_norms_y", "dilate",
    "sample_function", "save_grid_function", "load_grid_function",
    "Exponents", "riesz_kernel", "LayerCake", "layer_cake",
    "sphere_surface", "ball_volume", "profile_ball_integral",
    "RegionBounds", "convolve_direct", "convolve_fast", "region_split",
    "WindowFamily", "strong_maximal", "partial_maximal_x",
    "partial_maximal_y", "composition_check", "CompositionReport",
    "g_function", "g_norm_bound", "GNormReport",
    "AdmissibilityReport", "check_exponents", "ExponentError",
    "CertificateViolation", "inner_ball_constant", "tail_integral_constant",
    "bound_region11", "bound_region12", "bound_region21", "bound_region22",
    "region_slack_factors", "select_radii_case1", "select_radii_case2",
    "final_bound_case1", "final_bound_case2", "HedbergContext",
    "prepare_certification", "HedbergCertificate", "certify_point",
    "ConfigError", "ExperimentConfig", "make_family",
    "run_pointwise_campaign", "run_necessity_sweep", "run_norm_check",
]
