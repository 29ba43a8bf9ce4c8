"""Finitely generated subalgebras of free MV-algebras, decided exactly.

Terms compile to piecewise-linear functions with integer coefficients over
rational triangulations of the unit cube; the decision procedures work on
those triangulations and return replayable witnesses.
"""

from .cancel import CancellationToken, Cancelled
from .decide import (PreconditionError, basis_from_generators, check_equals_free,
                     check_free_and_separating, check_iso_to_free, check_separation,
                     generators_to_quotient, quotient_embeddable, subalgebras_equal)
from .geometry import (Complex, blow_up, denominator, desingularize,
                       homogeneous_correspondent, is_connected, is_regular_complex,
                       is_regular_simplex, is_strongly_regular, joint_subdivision,
                       standard_cube_triangulation, triangulate_cells)
from .hats import (WeightedTriangulation, hats_of, is_basic, multipliers,
                   schauder_hats, verify_unit_partition)
from .pwl import (LinearForm, PwlFunction, ZMap, compile_term, compile_tuple,
                  eval_pwl, image_complex, lincomb, linearizing_triangulation,
                  pwl_equal, range_polyhedron, zeroset)
from .synth import ProvenancedComplex, synthesize_term, term_for_hat
from .terms import Term, desugar, eval_term, parse_term, print_term

__all__ = [
    "CancellationToken",
    "Cancelled",
    "PreconditionError",
    "basis_from_generators",
    "check_equals_free",
    "check_free_and_separating",
    "check_iso_to_free",
    "check_separation",
    "generators_to_quotient",
    "quotient_embeddable",
    "subalgebras_equal",
    "Complex",
    "blow_up",
    "denominator",
    "desingularize",
    "homogeneous_correspondent",
    "is_connected",
    "is_regular_complex",
    "is_regular_simplex",
    "is_strongly_regular",
    "joint_subdivision",
    "standard_cube_triangulation",
    "triangulate_cells",
    "WeightedTriangulation",
    "hats_of",
    "is_basic",
    "multipliers",
    "schauder_hats",
    "verify_unit_partition",
    "LinearForm",
    "PwlFunction",
    "ZMap",
    "compile_term",
    "compile_tuple",
    "eval_pwl",
    "image_complex",
    "lincomb",
    "linearizing_triangulation",
    "pwl_equal",
    "range_polyhedron",
    "zeroset",
    "ProvenancedComplex",
    "synthesize_term",
    "term_for_hat",
    "Term",
    "desugar",
    "eval_term",
    "parse_term",
    "print_term",
]
