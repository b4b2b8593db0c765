"""fracops: numerical toolkit for integro-differential operators of
order 2s (fractional Laplacian and comparable Levy kernels).

Provides special-function constants, kernel classes with Fourier symbols,
pointwise principal-value evaluation including Pucci-type extremal
operators, closed-form solution oracles, a walk-on-spheres Monte Carlo
Dirichlet solver, and a 1D finite-difference Dirichlet/obstacle solver
with free-boundary analysis.
"""

from ._backend import BACKEND
from .discrete import (
    DiscreteOperator,
    Grid1D,
    GridFunction1D,
    ObstacleSolution,
    assemble_operator,
    energy,
    fit_growth_exponent,
    free_boundary_point,
    solve_dirichlet,
    solve_obstacle,
)
from .errors import (
    AccuracyWarning,
    NonConvergenceError,
    NonIntegrableTailError,
    NumericalError,
    SingularityError,
    UnsupportedDensityError,
)
from .evaluate import QuadConfig, ScalarField, apply_extremal, apply_operator, mean_value
from .kernels import (
    Comparable,
    FractionalLaplacian,
    Stable,
    ellipticity_certificate,
    fourier_symbol,
    kernel_density,
    kernel_from_record,
)
from .oracles import (
    OracleField,
    ball_torsion,
    fundamental_solution,
    halfspace_harmonic,
    heat_kernel,
    mean_value_weight,
    named_field,
    poisson_kernel_ball,
    poisson_kernel_halfspace,
)
from .special import PaperConstants, beta_inc_reg, beta_inverse, constants, log_gamma
from .wos import (
    Domain,
    ExteriorData,
    WosConfig,
    WosEstimate,
    ball,
    box,
    halfspace,
    interval,
    intersection,
    sample_exit,
    union,
    wos_solve,
)

__version__ = "0.1.0"
