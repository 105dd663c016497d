"""Degrees of freedom of the two-user MISO broadcast channel with alternating CSIT."""

from .composer import (Corner, Schedule, ScheduleRow, Subcase, compose_corner,
                       compose_point, solve_free_vars, subcase_of,
                       validate_schedule)
from .region import (Case, CsitState, DofPoint, DofRegion, LambdaPmf,
                     Marginals, case_of, contains, corner_points, marginals,
                     min_csit, region_from_marginals, region_from_pmf,
                     regions_equal, sum_dof)
from .schemes import (ChannelRealization, SchemeRef, SchemeSpec, build_trace,
                      catalog, check_decodable, swap_roles)
from .simulation import RateSample, SweepConfig, dof_slope, draw_channels, rate_sweep

__version__ = '0.1.0'
