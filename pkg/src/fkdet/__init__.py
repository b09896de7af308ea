"""Semi-finite Fuglede-Kadison determinants through relative K-theory.

Finite-dimensional block models of a semi-finite algebra with a weighted
trace, smooth paths of invertibles, the relative Chern character and the
determinant computed along two independent routes.
"""
from .algebra import (AElement, GPairElement, JElement, TensorChain, TracialPair, a_norm, amplify,
                      amplify_element, embed_corner, hochschild_b, j_norm, mat_trace, tau)
from .chern import ch_rel, rel_log, tau_tilde, transgression_boundary, transgression_L
from .det import PropertyReport, det_closed, det_fk, det_tilde, property_suite
from .errors import (DomainError, FKError, NoConvergence, NotALoop, NotHermitian, NotIdempotent, NotUnitary,
                     NumericFailure, OutOfRange, PairMismatch, QuadratureFailure, ShapeMismatch, Singular,
                     SupportViolation)
from .ktheory import (QuotientValue, boundary, bott_class, commutator_lift, connect_to_identity,
                      exactness_probe, in_lattice, theta, winding_subgroup)
from .paths import (ConjugationHomotopy, PerturbationHomotopy, ReparametrizationHomotopy, Segment, SmoothPath,
                    concat_smooth, conjugate_path, conjugation_homotopy, constant_path, exp_path,
                    idempotent_loop, invertibility_sweep, pw_commutator, pw_inverse, pw_product)

__version__ = "0.1.0"
