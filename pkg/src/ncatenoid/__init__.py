"""Genus-zero minimal surfaces with catenoid ends: flux data, solvers,
verification and surface sampling."""

from .fluxmodel import (
    INF,
    FluxData,
    TypeClass,
    check_balance,
    classify_type,
    detect_obstructions,
    inverse_stereographic,
    stereographic,
)
from .polyalg import ComplexPoly, poly_gcd, poly_roots, resultant
from .residues import (
    SolutionCandidate,
    VerificationReport,
    WeierstrassData,
    build_matrix_A,
    end_residues,
    verify_solution,
    weierstrass_from_solution,
)
from .solver import (
    FamilySolution,
    assemble_b,
    congruent,
    kernel_B,
    named_example,
    phi_quartic,
    solve,
    solve_type1_family,
    solve_type2,
    solve_type3,
)
from .surface import (
    SamplingConfig,
    SurfaceMesh,
    contour_flux,
    eval_weierstrass,
    export_obj,
    hopf_weight,
    integrate_point,
    metric_density,
    sample_surface,
)

__version__ = "0.1.0"
