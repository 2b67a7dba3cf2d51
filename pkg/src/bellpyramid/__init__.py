"""Strongly-local, quantum and no-signalling regions of the symmetric (3,3,2,2) Bell scenario.

Correlation data is reduced to three off-diagonal mixed moments
``(X, Y, Z) = (<a1 a2>_01, <a1 a2>_02, <a1 a2>_12)``. In these coordinates
strongly-local models fill a regular tetrahedron, quantum models the
elliptope, and no-signalling models the cube ``[-1, 1]^3``.
"""

from .behavior import (
    Behavior,
    CorrelatorExpansion,
    check_exchange_symmetry,
    check_no_signalling,
    from_correlator_expansion,
    mixed_moment,
    ns_behavior_from_point,
    reduce_to_moment_point,
    validate,
)
from .chsh import ChshCorrelators, chsh_classify, chsh_value, occupancy_ratios
from .errors import ConsistencyError, DomainError, InsufficientDataError, StructureError
from .geometry import (
    BarycentricCoords,
    Membership,
    MomentPoint,
    RegionMembership,
    barycentric_of,
    classify,
    ns_membership,
    point_of,
    q_membership,
    sl_membership,
    tetrahedron_facet_margins,
)
from .models import (
    DeterministicStrategy,
    LocalHiddenVariableModel,
    PhotonPairModel,
    behavior_of_lhv,
    is_on_curved_n1_surface,
    moments_of_lhv,
    moments_of_strategy,
    photon_moments,
    realize_sl_point,
    vertex_strategy,
)
from .montecarlo import Region, VolumeEstimate, estimate_volume, hierarchy_breakdown
from .sampler import EventRecord, Events, classify_run, estimate_moments, sample_events

__version__ = "0.1.0"
