"""Numerical laboratory for Gaussian random fields driven by fourth-order
linearized Kuramoto-Sivashinsky SPDEs and time-fractional SPIDEs.

Layout:

- ``specfun``    scalar special functions (gamma, Mittag-Leffler, 2F1, Mills)
- ``kernels``    the two kernel families and their spatial Fourier transforms
- ``spectral``   temporal/spatial spectral densities, variograms, asymptote fits
- ``covariance`` exact two-point covariances, bifractional-BM fitting, SLND
- ``sampler``    reproducible Gaussian path/field generation
- ``moduli``     modulus-of-continuity statistics on simulated paths
- ``verify``     the acceptance suite (one pass/fail row per criterion)
- ``cli``        batch command-line entry point
"""

__version__ = "0.1.0"

from .kernels import ModelParams
from .specfun import MLEvalPolicy, gamma_fn, hyp2F1, mills_ratio, mittag_leffler, ml_bounds

__all__ = [
    "ModelParams",
    "MLEvalPolicy",
    "gamma_fn",
    "mittag_leffler",
    "ml_bounds",
    "hyp2F1",
    "mills_ratio",
]
