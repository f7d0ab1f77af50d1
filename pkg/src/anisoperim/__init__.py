"""Anisotropic convex geometry, curvature flows of level sets and the
perimeter-based symmetrization, with verification suites for the
identities and inequalities the constructions satisfy.

The building blocks are gauges (``Norm``, ``PolarNorm``), convex polygons
and Wulff shapes (``ConvexCurve``, ``WulffShape``), scalar fields with
level-set machinery (``ScalarField``, ``build_profile``), the two
rearrangements (``schwarz_symmetrization``, ``perimeter_symmetrization``)
and the radial comparison solver (``solve_radial``, ``talenti_compare``).
``suites.run_suites`` bundles the named check groups used by the command
line tool.
"""

from .errors import (AnisoperimError, ConfigurationError, ConsistencyError,
                     DomainError, EmptyLevelError, ExtractionError,
                     InvalidCurveError, InvalidDataError, InvalidInputError,
                     ManufacturedSolutionError, ProfileError,
                     SingularGradientError, SingularPointError, StencilError)
from .fields import (LevelSetProfile, ScalarField, build_profile,
                     curvature_route_gap, hessian_integral_report,
                     reilly_report)
from .geometry import (ConvexCurve, WulffShape, isoperimetric_deficit,
                       kappa_of, random_convex_polygon, steiner_report)
from .norms import Norm, PolarNorm, identity_residuals
from .presets import FIELD_NAMES, NORM_NAMES, field_spec, make_field, make_norm
from .radial import (ProfileDensity, RadialSolution, StepDensity,
                     det_source_samples, solve_radial, talenti_compare,
                     v_sharp)
from .rearrange import (RadialProfile, SymmetrizedField,
                        decreasing_rearrangement, lp_norm_field,
                        lp_norm_symmetrized, perimeter_rearrangement,
                        perimeter_symmetrization, polya_szego_report,
                        radial_hessian_integral, schwarz_symmetrization,
                        symmetrization_report)
from .suites import (SUITE_NAMES, TOLERANCES, CheckRow, SuiteResult,
                     run_suites)

__version__ = "1.0.0"

__all__ = [
    "AnisoperimError", "ConfigurationError", "ConsistencyError",
    "DomainError", "EmptyLevelError", "ExtractionError", "InvalidCurveError",
    "InvalidDataError", "InvalidInputError", "ManufacturedSolutionError",
    "ProfileError", "SingularGradientError", "SingularPointError",
    "StencilError",
    "Norm", "PolarNorm", "identity_residuals",
    "ConvexCurve", "WulffShape", "kappa_of", "steiner_report",
    "isoperimetric_deficit", "random_convex_polygon",
    "ScalarField", "LevelSetProfile", "build_profile",
    "curvature_route_gap", "hessian_integral_report", "reilly_report",
    "RadialProfile", "decreasing_rearrangement", "perimeter_rearrangement",
    "SymmetrizedField", "schwarz_symmetrization", "perimeter_symmetrization",
    "radial_hessian_integral", "lp_norm_field", "lp_norm_symmetrized",
    "symmetrization_report", "polya_szego_report",
    "StepDensity", "ProfileDensity", "RadialSolution", "solve_radial",
    "v_sharp", "det_source_samples", "talenti_compare",
    "SUITE_NAMES", "TOLERANCES", "CheckRow", "SuiteResult", "run_suites",
    "NORM_NAMES", "FIELD_NAMES", "make_norm", "make_field", "field_spec",
    "__version__",
]
