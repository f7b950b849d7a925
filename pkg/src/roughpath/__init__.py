"""p-variation seminorms, greedy times and compensated rough integrals."""

from .greedy import (
    estimate_EN,
    greedy_times,
    grid_index,
    moment_condition_exponent,
    moment_tail,
    sample_counts,
)
from .integral import integral_terms, rough_integral
from .pvar import p_variation, rough_power_profile, rough_pvar
