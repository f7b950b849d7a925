"""Time stepping of the rough Kuramoto phase and frequency systems."""

from .integrate import (
    convergence_order,
    integrate,
    integrate_field,
    read_trajectory_csv,
    self_convergence,
    self_convergence_field,
    trajectory_to_frame,
    write_trajectory_csv,
)
from .schemes import FrequencyField, PhaseField, davie_update, heun_update, step_davie, step_heun
