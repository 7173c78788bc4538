"""Phase-shift detection with anti-squeezed cat probes under optical loss."""

__version__ = "0.1.0"

from .detection import (
    DecisionRule,
    ErrorReport,
    error_probs,
    homodyne_pdf,
    ml_partition,
    squeezed_baseline,
)
from .fock_stats import (
    PhotonDistribution,
    binomial_loss,
    closed_form_distribution,
    distribution_distance,
    pn_closed_form,
    pn_combinatorial,
    pn_quadrature,
    pure_cat_fock_amplitudes,
    quadrature_distribution,
)
from .optimize import OperatingPoint, SweepCell, landscape, optimize_point, sweep
from .phase_space import (
    EffectiveChannel,
    ProbeSpec,
    WignerCoeffs,
    effective_channel,
    fringe_overlap,
    negativity_analytic,
    negativity_numeric,
    negativity_validity,
    wigner_coeffs,
    wigner_eval,
    wigner_pure,
)
