"""Two-sided bounds between the variance and the entropy power of unimodal densities.

Every density satisfies Var >= e^{2h} / (2 pi e). For generalized-Gaussian
mixtures, uniform mixtures and Lipschitz unimodal densities this package
also computes and certifies a matching upper bound Var <= c e^{2h}.
"""

from .approximation import (
    ConvergenceReport,
    LipschitzUnimodal,
    StepApproximation,
    build_step_approx,
    certify_theorem2,
    certify_theorem3,
    convergence_study,
    split_asymmetric,
    step_density,
)
from .bounds import (
    BoundCertificate,
    ProductBound,
    a_theta,
    b_factor,
    certify_corollary1,
    certify_corollary2,
    certify_lower_only,
    certify_theorem1,
    counterexample_report,
    inv_a_theta,
    m_ratio,
    product_bound,
)
from .densities import (
    GenGaussian,
    MixtureDensity,
    PiecewiseConstantDensity,
    PiecewiseLinearDensity,
    RaisedCosine,
    UniformComponent,
)
from .density_io import density_from_spec, density_to_spec
from .errors import (
    ConvergenceError,
    DegenerateSplitError,
    DomainError,
    HypothesisError,
    NotApplicableError,
    SandwichError,
)
from .quadrature import entropy_of, integrate, variance_of
from .special import digamma, gamma, log_gamma, phi

__version__ = "0.1.0"
