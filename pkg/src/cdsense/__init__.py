"""Quantum limits and photon-counting estimation for transmission circular dichroism.

The estimated quantity is the difference ``T_L - T_R`` between the
transmittances of left- and right-circularly polarized light through an
analyte, with excess loss ``eta_j`` in each arm.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundLabel,
    BoundReport,
    chi_factor,
    classical_benchmark,
    enhancement_factor,
    optimal_ratio_classical,
    optimal_ratio_uql,
    qfim_coherent,
    qfim_max,
    qfim_tmsv_direct,
    snr_upper_bound,
    uql_optimal,
    var_coherent,
    var_tmsv_direct,
    var_tmsv_large_n,
    var_uql,
)
from .errors import (
    CDSenseError,
    CutoffTooSmallError,
    DegenerateLikelihoodError,
    NonPhysicalStateError,
    NonzeroDisplacementError,
    StepTooLargeError,
    TailTooLargeError,
)
from .estimation import Probe, mle_product, mle_tmsv, sample, saturation_report
from .gaussian import (
    GaussianState,
    apply_loss,
    fidelity_two_mode,
    lossy_tmsv,
    qfim_from_fidelity,
    qfim_tmsv_ancilla,
    tmsv_state,
)
from .model import (
    TCD,
    UNESTIMABLE,
    CombinationVector,
    Fisher2,
    PhotonBudget,
    Scenario,
    invert_on_support,
    var_gamma,
)
from .pnrd import (
    PnrdDistribution,
    coherent_pnrd,
    cr_bound_gamma,
    fim_from_distribution,
    fock_pnrd,
    tmsv_direct_pnrd,
)
