"""Coupling and noise graphs: construction, spectra, connectivity and balance."""

from .builders import (
    block_diagonal,
    complete,
    cycle,
    erdos_renyi_signed,
    from_kind,
    k_neighbor,
    load_edge_list,
    path,
    save_edge_list,
    two_block_signed,
    zero,
)
from .spectral import (
    cheeger_bounds,
    cheeger_constant,
    degree_vector,
    laplacian,
    max_degree,
    spectrum,
)
from .structure import (
    balance_partition,
    component_count,
    components_balanced,
    connected_components,
    is_balanced,
    is_connected,
)
