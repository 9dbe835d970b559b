"""Verification workbench for nonlinear n-fermion and n-pseudo-fermion algebras."""
from .coherent import (binormalization_report, eigen_residual, ladder_cs,
                       resolution_defect, solve_integration_weights)
from .fermion import build_fermion, fermion_number_operator, verify_fermion
from .finite_level import (LadderWeights, expand_ladder_in_pf, factorize,
                           from_spectrum, general_ladder, q_weights,
                           structure_checks)
from .numerics import Tolerance, approx_equal, invert, nullspace_1d
from .paragrassmann import (PGContext, PGElement, g_coefficients, pg_adjoint,
                            pg_integrate, pg_mul, pg_sqrt_even)
from .pseudofermion import (CandidatePair, ExampleParams, build_system,
                            example_family, find_vacua, pf_number_operator,
                            verify_pf_relation)

__version__ = "0.1.0"
