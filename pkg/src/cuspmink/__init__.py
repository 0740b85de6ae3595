"""Distances to cusps of generalized Hilbert modular groups.

Exact field and ideal arithmetic, the a-distance ``mu_a``, nearest-cusp
search, group actions, bound verification and Monte-Carlo volumes.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .field_core import (NumberField, FieldElement, RealInterval, builtin_field,
                         parse_field_config, elem_arith, elem_norm_trace, embed_real,
                         is_totally_positive, unit_sign_index)
from .ideal_lattice import (FractionalIdeal, PrimeIdealFactor, ideal_from_generators,
                            ideal_mul, ideal_inverse, ideal_norm, codifferent,
                            two_generator_norm, local_norm_product, prime_split,
                            is_principal_smallfield)
from .cusp_geometry import (Cusp, HPoint, MuReport, mu, iota, adelic_height, total_height,
                            nearest_cusps, brute_force_nearest, sphere_membership)
from .modular_action import (ModularMatrix, act, in_group, cusp_matrix, reduce_point,
                             fundamental_domain_contains, cusp_representatives)
from .minkowski_verify import (BoundReport, verify_minkowski, verify_codifferent_bound,
                               verify_boundary_annulus, estimate_hermite_lower)
from .volume_integrals import (McEstimate, cusp_ball_volume, partial_volume,
                               sample_fundamental_domain, integral_mu1_t, theorem_bounds)
