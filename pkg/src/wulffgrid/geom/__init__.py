from . import intlattice, polytope
from .intlattice import lattice_reduce, kernel_sublattice
from .polytope import (
    ConvexPolytope, Hyperplane, convex_hull, halfspace_intersection,
    minkowski_sum, minkowski_diff_segment, polytope_measure,
    hausdorff_distance, segment, hull_any_rank,
)
