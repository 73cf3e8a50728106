"""Numerical toolkit for weighted composition operators u C_phi on the
Bloch and Dirichlet spaces of the unit disc: automorphism dynamics,
boundedness/multiplier/invertibility verdicts, and spectral predictions
(circles, annuli, root-set closures) with their cocycle cross-checks."""

__version__ = "0.1.0"

from .errors import (ConfigError, DiscSpecError, DomainError, InternalError,
                     NumericalError, PreconditionError, ToleranceFailure)
from .moebius import (AutomorphismClass, AutomorphismType, MoebiusTransform,
                      build_canonical_hyperbolic, build_disc_automorphism,
                      build_parabolic_translation, classify,
                      denjoy_wolff_sequence, hyperbolic_distance,
                      orbit_distance_sequence, random_automorphism)
from .norms import (ConditionSuprema, DiscGrid, NormEstimate, QuadratureRule,
                    bloch_norm, condition_suprema, dirichlet_norm,
                    log_growth_ratio, weighted_sup_norm)
from .operators import (BoundednessVerdict, Composed, InvertibilityResult,
                        Space, TruncationMatrix, Verdict,
                        WeightedCompositionOp, binomial_identity_residual,
                        check_bounded, check_invertible, check_multiplier,
                        composition_norm_bound, composition_norm_lower_bound,
                        power_apply, taylor_truncation, wcomp_apply)
from .spectra import (Annulus, Circle, ConjectureProbe, RootSetClosure,
                      SpectralRadiusEstimate, SpectrumPrediction,
                      conjecture_probe, detect_rotation_period,
                      elliptic_root_cloud, predict_spectrum,
                      spectral_radius_estimate, truncation_eigenvalues)
from .symbols import (BlaschkeProduct, LogWeightFunction, RationalSymbol,
                      blaschke_ratio_bound, cocycle_eval, cocycle_sup,
                      compose_with_moebius, inf_modulus)

__all__ = [name for name in dir() if not name.startswith("_")]
