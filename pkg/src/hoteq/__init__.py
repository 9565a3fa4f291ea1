"""Exact pure Nash equilibria of the Hotelling-Downs positioning game."""

from .contdp import ApproxResult, alpha_grid, el_conditions, quantile_profile, solve_cc
from .core import (NEG_INF, POS_INF, FiniteSet, HoteqError, Instance, Interval, Voters,
                   cdf, cut, cut_bracket, make_profile, mass, mu, parse_rational, render)
from .deviation import DeviationReport, gap_sup, gap_sup_atomic, gap_sup_density
from .dp import DPKey, DPSolver, dp_solve, utility_value_set
from .dyadic import bit_level, next_in_bit
from .io import dumps, instance_to_dict, load_instance, loads_instance
from .reflect import gen_hard, reflect, reflection_sets, shift_to_low_bits, solve_grid
from .utility import util, utilities, utilout
from .verify import (VerificationReport, best_response, brute_force_solve, is_eps_equilibrium,
                     is_equilibrium, is_equilibrium_direct, lower_bit_check)

__version__ = "0.1.0"
