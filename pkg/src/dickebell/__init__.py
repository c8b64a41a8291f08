"""Bell-violation robustness of symmetric Dicke states under loss.

Closed-form evaluation of the Hardy-type and MABK inequalities on
permutation-invariant mixtures of Dicke states, binomial/hypergeometric
loss channels, certified loss thresholds with angle optimization, and a
brute-force dense oracle for cross-validation at small n.
"""

from .bell import (BellValue, InequalityKind, MeasurementPair,
                   beta_coefficient, hardy_value, hardy_value_mixture,
                   mabk_closed_vacuum, mabk_closed_w, mabk_value_mixture,
                   symmetric_correlator)
from .errors import (ConstructionError, DegenerateRatioError, DomainError,
                     ResourceLimitError, SingularAngleError)
from .states import (DickeMixture, LossModel, excitation_loss, make_pure,
                     particle_loss)
from .thresholds import (HARDY_K2, HARDY_W, MABK_W, TABLE1_Q, AnsatzFamily,
                         Method, ThresholdResult, ansatz_angles,
                         ansatz_measurement_pair, hardy_family_for_k,
                         hardy_k36, optimize_angles, seed_pairs,
                         threshold_excitation, threshold_excitation_fixed,
                         threshold_excitation_w, threshold_particle,
                         w_threshold_optimized)

__version__ = "0.1.0"

__all__ = [
    "AnsatzFamily", "BellValue", "ConstructionError", "DegenerateRatioError",
    "DickeMixture", "DomainError", "HARDY_K2", "HARDY_W",
    "InequalityKind", "LossModel", "MABK_W", "MeasurementPair", "Method",
    "ResourceLimitError", "SingularAngleError", "TABLE1_Q",
    "ThresholdResult", "ansatz_angles", "ansatz_measurement_pair",
    "beta_coefficient",
    "excitation_loss", "hardy_family_for_k", "hardy_k36", "hardy_value",
    "hardy_value_mixture", "mabk_closed_vacuum", "mabk_closed_w",
    "mabk_value_mixture", "make_pure", "optimize_angles", "particle_loss",
    "seed_pairs", "symmetric_correlator", "threshold_excitation",
    "threshold_excitation_fixed", "threshold_excitation_w",
    "threshold_particle", "w_threshold_optimized",
]
