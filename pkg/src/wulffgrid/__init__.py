"""Discrete-to-continuum surface energies on lattices and multigrid tilings.

Subpackages and modules:

* ``geom``      exact-ish convex geometry (d = 2, 3) and integer lattices
* ``energy``    lattice energies, splitting, anisotropy, recovery sequences
* ``wulff``     Wulff shapes of (signed) finitely supported potentials
* ``multigrid`` hyperplane multigrids and their dual tilings
* ``qc``        tile energies, edge-perimeter counts, densities, recovery
* ``scenarios`` config-driven experiments; ``cli`` the wulffgrid command
"""

from .geom.intlattice import kernel_sublattice, lattice_reduce
from .geom.polytope import (
    ConvexPolytope, Hyperplane, convex_hull, halfspace_intersection,
    hausdorff_distance, minkowski_diff_segment, minkowski_sum,
    polytope_measure,
)
from .energy import (
    Configuration, Potential, SublatticeChannel, perimeter_P_V,
    perimeter_bound, phi_V, potential_structure, recovery_configuration,
    split_surface_energy, surface_energy, symmetrize, total_energy,
    transform_by_map,
)
from .multigrid import (
    Ball, Box, MultigridSpec, affine_map_and_bound, dual_lattice_info,
    dual_points_in_region, pentagrid, rail_families, square_bigrid, tile_of,
    validate_spec, verify_tiling,
)
from .qc import (
    RailPotential, TileSet, TileWeight, density_audit, ep_counts,
    perimeter_P_W, phi_W_eval, qc_recovery, rail_weights, tile_energy,
)
from .wulff import (
    SupportFunction, WulffShape, classify_shape, parameter_scan,
    positivity_check, signed_wulff, zonotope_of,
)

__version__ = "0.1.0"
