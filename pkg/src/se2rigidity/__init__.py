"""Infinitesimal rigidity of directed SE(2) bearing frameworks and
bearing-only estimation of unscaled relative positions."""

from .graph import (
    DirectedGraph,
    DuplicateEdgeError,
    GraphError,
    SelfLoopError,
    VertexIndexError,
    complete_graph,
    incidence_matrix,
    new_graph,
    out_degree,
    out_incidence_matrix,
)
from .framework import (
    DegenerateEdgeError,
    Se2Framework,
    apply_trivial_motion,
    bearing,
    bearing_rigidity_function,
    bearing_vector,
    is_bearing_congruent,
    is_bearing_equivalent,
    rotation_matrix,
    wrap,
)
from .rigidity import (
    RigidityReport,
    analyze,
    bearing_rigidity_matrix,
    coordinated_rotation_subspace_dim,
    coordinated_rotation_vector,
    edge_length_squared_matrix,
    nullspace_basis,
    parallel_rigidity_matrix,
    rank_with_tolerance,
    trivial_motion_basis,
)
from .estimator import (
    EstimatorConfig,
    EstimatorState,
    TrajectoryTrace,
    bearing_error,
    cost,
    cumulative_position_error,
    estimated_bearings,
    gradient_flow_rhs,
    integrate,
    integrate_many,
    perturb_truth,
    true_relative_attitudes,
    true_unscaled_positions,
)

__version__ = "0.1.0"
