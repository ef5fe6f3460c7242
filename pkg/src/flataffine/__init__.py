"""Exact and numeric tools for flat affine manifolds and left-symmetric algebras."""

__version__ = "0.1.0"

from .scalars import Scalar, ScalarMatrix, declare_param, nullspace, parse_scalar, scalar_eval  # noqa: E402
from .exppoly import Domain, ExpPoly, VectorField, parse_field, parse_function  # noqa: E402
from .connection import (AffineMap, Connection, DiffeoData, curvature, is_affine_map,  # noqa: E402
                         is_flat_affine, pullback_connection, torsion)
from .infaff import Ansatz, classical_aff_basis, infaff_residual, solve_infaff  # noqa: E402
from .deck import (DeckAction, etale_example, invariant_subalgebra, lift_through_etale,  # noqa: E402
                   surface_catalog)
from .lsa import ProductAlgebra, SubspaceSpec, check_left_symmetric, load_algebra  # noqa: E402
from .flows import completeness_probe, integrate, verify_flow  # noqa: E402

__all__ = [
    "Scalar", "ScalarMatrix", "declare_param", "nullspace", "parse_scalar", "scalar_eval",
    "Domain", "ExpPoly", "VectorField", "parse_field", "parse_function",
    "AffineMap", "Connection", "DiffeoData", "curvature", "is_affine_map", "is_flat_affine",
    "pullback_connection", "torsion", "Ansatz", "classical_aff_basis", "infaff_residual",
    "solve_infaff", "DeckAction", "invariant_subalgebra", "lift_through_etale", "surface_catalog",
    "etale_example", "ProductAlgebra", "SubspaceSpec", "check_left_symmetric", "load_algebra",
    "completeness_probe", "integrate", "verify_flow",
]
