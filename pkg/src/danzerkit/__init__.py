"""Dense forests, optical forests, epsilon-nets and dispersed dyadic sequences.

Hot loops live in :mod:`danzerkit.kernels` and run under numba when it is
available; ``DANZERKIT_DISABLE_NUMBA=1`` selects the pure-numpy versions.
"""

from .geometry import AxisBox, Segment, dist_point_segment, torus_dist
from .lattice import (
    BudgetExceeded,
    ForestSpec,
    corollary_forest_spec,
    count_in_ball,
    enumerate_points,
    series_density_bound,
    schedule_forest_spec,
)
from .optical import epsilon_net, optical_forest_spec
from .peres import PeresForest, PeresSpec, golden_sequence, peres_points
from .sud import (
    DispersionQuery,
    DyadicRational,
    block_sud_verify,
    block_values,
    decompose_index,
    exact_dispersion,
    interleave,
    perturbed_dispersion,
    u_value,
)
from .verifiers import (
    SegmentSampler,
    empirical_visibility_curve,
    empty_box_search_nd,
    growth_fit,
    largest_empty_rectangle_2d,
    visibility_probe,
)

__version__ = "0.1.0"
