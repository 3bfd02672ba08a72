"""zetalab: a desk-scale numerical laboratory for mollified zeta-function
constructions (truncated Mobius sums, Perron contour integrals, root
location, Poisson-weighted derivative expansions, and closing-chain
reports).  Everything measures; nothing asserts asymptotic claims.
"""

from .precision import CValue, PrecisionContext, cv
from .sieve import CoeffTable, MobiusTable, coeff_table, mobius_table
from .dirichlet import (GSpec, MollifierSpec, f_v, g_deriv_cauchy,
                        g_deriv_series, g_uv, m_v, p_weight,
                        taylor_main_terms)
from .zetafn import (afe_zeta, chi_factor, hardy_z, inv_zeta, second_moment,
                     zero_free_boundary, zeta_em)
from .contours import ContourSpec, perron_envelope, perron_mv, winding_number
from .roots import RootResult, find_mollifier_root, find_zeta_zero
from .experiments import (BoundReport, ParamSet, build_params, check_bound,
                          check_expansion, check_lemma1, final_report,
                          taylor_identity_check)

__version__ = "0.1.0"

__all__ = [
    "CValue", "PrecisionContext", "cv",
    "CoeffTable", "MobiusTable", "coeff_table", "mobius_table",
    "GSpec", "MollifierSpec", "f_v", "g_deriv_cauchy", "g_deriv_series",
    "g_uv", "m_v", "p_weight", "taylor_main_terms",
    "afe_zeta", "chi_factor", "hardy_z", "inv_zeta", "second_moment",
    "zero_free_boundary", "zeta_em",
    "ContourSpec", "perron_envelope", "perron_mv", "winding_number",
    "RootResult", "find_mollifier_root", "find_zeta_zero",
    "BoundReport", "ParamSet", "build_params", "check_bound",
    "check_expansion", "check_lemma1", "final_report",
    "taylor_identity_check",
    "__version__",
]
