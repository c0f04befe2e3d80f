"""Box-Cox warped Gaussian processes.

Thin layer over the compiled ``_bcgp`` extension; see ``help(bcgp.WarpedGP)``.
"""

from ._bcgp import (  # noqa: F401
    ArgumentError,
    ConditioningError,
    ConfigError,
    DataError,
    DomainError,
    Error,
    Kernel,
    MeanFunction,
    NumericError,
    RangeError,
    SingularityError,
    WarpedGP,
    Warping,
    bfgs_minimize,
    bfgs_powell,
    compose,
    ensemble_mcmc,
    evaluate,
    gauss_hermite,
    gram,
    invert_numeric,
    load_csv,
    nll_gaussian,
    powell_minimize,
    score,
)

__version__ = "0.1.0"
