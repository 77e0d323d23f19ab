"""Exact counting and sampling for constrained determinantal point processes.

Linear constraints on a subset measure with an evaluable generating
polynomial (DPPs, regular-matroid bases, explicit tables) are handled by
polynomial interpolation; sampling reduces to conditioned counting.
"""
from .counting import (BudgetConstraint, Interval, LinearFamily, Mass, PartitionFamily, bcount,
                       conditioned_mass, cost_distribution, ecount, linear_family_count,
                       partition_count, set_count, total_mass)
from .dpp import ConstrainedDPP, dpp_count, dpp_sample, validate_psd
from .errors import CDPPError
from .genpoly import (ExplicitSetFunction, TransformProgram, cholesky_factor, dpp_oracle, evaluate,
                      explicit_oracle, kernel_oracle, matroid_oracle, transform)
from .sampling import Sampler, conditional_inclusion_prob, estimate_mass_via_sampler, sample

__version__ = "0.1.0"
