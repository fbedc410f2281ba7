"""Homology of periodic cell complexes from finite descriptions."""

from .builder import (
    PeriodicComplexTemplate,
    WindowComplex,
    build_window,
    covering_projection,
    offset_bound,
    parse_template,
    template_from_wqg,
    validate_template,
)
from .cell_complex import ChainMap, FiniteCellComplex, HomologyResult, class_membership, euler_characteristic, homology, induced_map
from .lattice import INFINITE, IntegerLattice, IntegerMatrix, coset_representatives, index_mod, smith_normal_form, subgroup_index
from .linalg import QQ, PrimeField
from .mvss import (
    blowup,
    build_cover,
    compute_pages,
    filtration_level,
    nerve,
    projection_image_proxy,
    reconstruct_homology,
    run_mvss,
    scaling_fit,
    total_complex_check,
)
from .wqg import (
    EdgePath,
    WeightedQuotientGraph,
    betti0_periodic,
    classify_quotient_cycle,
    construct_generators,
    corollary_betti,
    h1_generator_count,
    parse_wqg,
    path_weight,
    weight_lattice,
)

__all__ = [name for name in dir() if not name.startswith("_")]
