"""Exact linear time-invariant behaviors: representations, data, and algebra.

A behavior is the set of trajectories a system admits.  This package stores
behaviors through kernel representations R(s)w = 0, image representations
w = M(s)l with a free latent l, or raw trajectory data, converts between the
three, and computes sums and intersections of behaviors in either the
annihilator (kernel) or generator (image) calculus.
"""

from .errors import (
    AlgorithmFailureError,
    BehalgError,
    InconsistentComplexityError,
    InconsistentDataError,
    InvalidInputError,
    InvalidRepresentationError,
    NumericFailureError,
    UncontrollableError,
)
from .numkernel import (
    DEFAULT_CONFIG,
    ToleranceConfig,
    column_space_basis,
    left_null_basis,
    numerical_rank,
    right_null_basis,
    sign_normalize,
    subspace_distance,
)
from .polyalg import (
    MatPoly,
    Poly,
    is_left_prime,
    minimal_right_null_basis,
    poly_gcd,
    poly_lcm,
    poly_roots,
)
from .structmat import (
    Trajectory,
    block_hankel,
    block_toeplitz,
    convolution_matrix,
    per_row_toeplitz,
    sylvester_stack,
)
from .behavior import (
    Behavior,
    Complexity,
    behaviors_equal,
    complexity_from_trajectory,
    data_trajectory_span,
    image_to_kernel,
    is_member,
    is_persistently_exciting,
    kernel_from_data,
    kernel_to_image,
    membership_residual,
    minimize_kernel,
    random_trajectory_from_kernel,
    restricted_dimension,
)
from .behops import (
    OpResult,
    intersect_image,
    intersect_kernel,
    operation_complexities,
    oracle_intersect_siso_autonomous,
    oracle_sum_siso_autonomous,
    representation_poles,
    scalar_autonomous_intersection,
    scalar_autonomous_sum,
    sum_image,
    sum_kernel,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmFailureError",
    "BehalgError",
    "Behavior",
    "Complexity",
    "DEFAULT_CONFIG",
    "InconsistentComplexityError",
    "InconsistentDataError",
    "InvalidInputError",
    "InvalidRepresentationError",
    "MatPoly",
    "NumericFailureError",
    "OpResult",
    "Poly",
    "ToleranceConfig",
    "Trajectory",
    "UncontrollableError",
    "behaviors_equal",
    "block_hankel",
    "block_toeplitz",
    "column_space_basis",
    "complexity_from_trajectory",
    "convolution_matrix",
    "data_trajectory_span",
    "image_to_kernel",
    "intersect_image",
    "intersect_kernel",
    "is_left_prime",
    "is_member",
    "is_persistently_exciting",
    "kernel_from_data",
    "kernel_to_image",
    "left_null_basis",
    "membership_residual",
    "minimal_right_null_basis",
    "minimize_kernel",
    "numerical_rank",
    "operation_complexities",
    "oracle_intersect_siso_autonomous",
    "oracle_sum_siso_autonomous",
    "per_row_toeplitz",
    "poly_gcd",
    "poly_lcm",
    "poly_roots",
    "random_trajectory_from_kernel",
    "representation_poles",
    "restricted_dimension",
    "right_null_basis",
    "scalar_autonomous_intersection",
    "scalar_autonomous_sum",
    "sign_normalize",
    "subspace_distance",
    "sum_image",
    "sum_kernel",
    "sylvester_stack",
]
