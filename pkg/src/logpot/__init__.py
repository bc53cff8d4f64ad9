"""Logarithmic potentials and negatively curved conformal metrics on plane disks.

The package has two halves.  The potential half evaluates the logarithmic
potential of a compactly supported field and its derivatives of every order,
pairing the derivative formula with an independent finite-difference oracle.
The metric half carries the constant-curvature density catalog, Gaussian
curvature by two definitions, singularity-order estimation, maximality and
pullback comparisons, and maximum-principle gluing.
"""

from .multiindex import (E1, E2, ZERO, IndexDecomposition, MultiIndex, OracleError,
                         ScalarField, fd_partial, kernel_partial, mi_decompose,
                         shifted_field, taylor_poly, taylor_remainder)
from .fields import (constant_field, cosine_field, gaussian_field,
                     log_density_field, polynomial_field, random_polynomial)
from .quadrature import (DEFAULT_CONFIG, DiskDomain, LimitEstimate,
                         QuadratureConfig, annulus_integral, circle_integral,
                         disk_integral, shrinking_limit)
from .potential import (DerivativeReport, PotentialProblem, fd_oracle,
                        greens_identity_residual, log_potential, potential_deriv,
                        potential_grad, potential_hess)
from .densities import (ConformalDensity, GlueConditionError, HolomorphicMap,
                        compose_maps, density_from_csv, density_to_csv,
                        hyperbolic_disk, hyperbolic_punctured, identity_map,
                        load_density_grid, maximal_density, mobius_map,
                        parse_density, parse_map, power_map, pullback,
                        pullback_density, reference_density, scaled_density)
from .metrics import (OrderEstimate, SkReport, ahlfors_margin, asymptotic_slope,
                      curvature_laplace, curvature_meanvalue,
                      default_probe_radii, glue, liouville_residual, order_of,
                      remainder_field, sk_verify)

__version__ = "0.1.0"

__all__ = [
    "E1", "E2", "ZERO", "IndexDecomposition", "MultiIndex", "OracleError",
    "ScalarField", "fd_partial", "kernel_partial", "mi_decompose",
    "shifted_field", "taylor_poly", "taylor_remainder",
    "constant_field", "cosine_field", "gaussian_field", "log_density_field",
    "polynomial_field", "random_polynomial",
    "DEFAULT_CONFIG", "DiskDomain", "LimitEstimate", "QuadratureConfig",
    "annulus_integral", "circle_integral", "disk_integral", "shrinking_limit",
    "DerivativeReport", "PotentialProblem", "fd_oracle",
    "greens_identity_residual", "log_potential", "potential_deriv",
    "potential_grad", "potential_hess",
    "ConformalDensity", "GlueConditionError", "HolomorphicMap", "compose_maps",
    "density_from_csv", "density_to_csv", "hyperbolic_disk",
    "hyperbolic_punctured", "identity_map", "load_density_grid",
    "maximal_density", "mobius_map", "parse_density", "parse_map", "power_map",
    "pullback", "pullback_density", "reference_density", "scaled_density",
    "OrderEstimate", "SkReport", "ahlfors_margin", "asymptotic_slope",
    "curvature_laplace", "curvature_meanvalue", "default_probe_radii", "glue",
    "liouville_residual", "order_of", "remainder_field", "sk_verify",
    "__version__",
]
