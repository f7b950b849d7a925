"""Fractional Brownian drivers and their geometric level-2 lifts."""

from .fbm import fgn_autocovariance, sample_fbm, sample_fbm_batch
from .lift import (
    areas_from,
    chen_compose,
    cumulative_areas,
    dump_driver,
    interval_area,
    interval_increment,
    lift_path,
    load_driver,
    restrict,
    sample_driver,
)
from .moments import kolmogorov_check
