"""Variable-exponent function-space norms and rough fractional operators on grids."""

from .errors import (ConvergenceError, DomainError, PreconditionError, RoughSpaceError,
                     SpecParseError)
from .exponents import (ExponentField, check_alpha_assumptions, check_decay_condition,
                        check_local_log_holder, conjugate_exponent, sobolev_conjugate)
from .grid import (Ball, DomainSet, Grid, ball_measure, box_domain, disk_domain, dyadic_radii,
                   lattice_centers, maximal_radii, truncated_ball_cells)
from .kernel import RoughKernel
from .norms import (BallNorms, GridFunction, NormResult, WeightFunction, campanato_norm,
                    generalized_morrey_norm, luxemburg_norm, mean_on_ball, modular,
                    morrey_norm, vanishing_modulus)
from .operators import (OperatorConfig, commutator, dominating_potential, fractional_maximal,
                        riesz_potential, rough_maximal, singular_integral)
from .reports import ConditionReport, EstimateReport, VerificationReport
from .verify import (check_vanishing_condition, check_weight_positivity, check_zygmund,
                     empirical_operator_norm, verify_adams_pointwise, verify_ball_norm_scaling,
                     verify_chi_scaling, verify_commutator_pointwise, verify_domination,
                     verify_hedberg, verify_power_weight_scaling, verify_size_condition,
                     verify_spanne_pointwise)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
