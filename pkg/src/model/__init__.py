"""Vector fields, switching and configuration of the rough Kuramoto system."""

from .config_io import (
    antipodal,
    config_to_mapping,
    initial_phases,
    load_system_config,
    system_config_from_mapping,
)
from .hypotheses import c_two_delta, coupling_lambda2, dissipation, sample_cg, validate_hypotheses
from .switching import inverse_switching, switched_config, switched_graph, switching_transform
from .vector_fields import (
    frequency_drift,
    kuramoto_drift,
    noise_G,
    noise_G_diagonal,
    noise_jacobian,
    noise_matrix,
    reduce_state,
    tilde_G,
)
