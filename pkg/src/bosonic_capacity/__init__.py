"""Classical capacity of multimode lossy bosonic channels.

The capacity under a mean-energy budget is the maximum over photon-number
allocations of ``sum_k g(eta_k N_k)``; :mod:`.allocator` solves it on a mode
grid and :mod:`.closedform` holds the analytic narrowband, flat-broadband
and far-field results.
"""

__version__ = "0.1.0"

from .allocator import (  # noqa: E402
    Allocation,
    RateResult,
    RateUnit,
    capacity,
    holevo_photon_numbers,
    oracle_grid_search,
    rate,
    solve_beta,
    waterfill_photon_numbers,
)
from .channel import (  # noqa: E402
    ChannelModel,
    FarFieldGeometry,
    FlatGrid,
    FlatProfile,
    ModeGrid,
    ModeSet,
    ModeSpec,
    ResourceBudget,
    TabulatedProfile,
    discretize,
    fresnel,
    reference_power,
)
from .closedform import (  # noqa: E402
    FarFieldSolution,
    farfield_capacity,
    farfield_hethom,
    farfield_solution,
    flat_broadband_capacity,
    narrowband_capacity,
    spectrum,
)
from .kernels import DetectionKind, g, g_inverse, shannon_term  # noqa: E402
