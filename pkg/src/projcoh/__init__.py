"""Exact symbolic checks for differential operators on tensor densities.

The package builds sl2-relative 1-cocycles on modules of differential
operators between densities of weight λ and μ, and verifies their identities
with exact arithmetic over Q(λ, μ).
"""

from .scalar_field import LAM, MU_, ParamPoly, ParamRatFun, rational_roots
from .diffpoly import DiffPoly, FunctionSymbol, covariant_derivative, total_derivative
from .operators import (BiDiffExpr, Cocycle, DiffOperator, Mode, build_cocycle,
                        build_invariant_operator, compose, lie_action_density, transvectant,
                        vf_bracket)
from .cohomology import (classify_invariant_bilinear, cohomology_table, solve_coboundary,
                         verify_cocycle, verify_projective_invariance, verify_sl2_vanishing)
from .schwarzian import JetSeries, check_sch_correspondence, compose_jets

__version__ = "0.1.0"
