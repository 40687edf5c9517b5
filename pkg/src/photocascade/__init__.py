"""Photon-detection statistics for detector cascades and conditional state preparation."""

from photocascade.combinatorics import (
    OccupationVector,
    count_exact_nonzero,
    enumerate_compositions,
    multinomial_weight,
)
from photocascade.errors import (
    InvalidArgumentError,
    PhotonNumberMismatchError,
    ResourceLimitError,
    UnachievableTargetError,
    ZeroProbabilityError,
)
from photocascade.mdhp import HermiteCouplingMatrix, build_coupling, mdhp_at_zero, output_prob_mdhp
from photocascade.nport import (
    InterferometerMatrix,
    build_symmetric_nport,
    extend_with_loss,
    input_mode_intensities,
)
from photocascade.povm import (
    ConfidenceReport,
    PovmElement,
    PreparationEnsemble,
    benchmark_ensembles,
    build_cascade_povm,
    build_spr_povm,
    cascade_confidence_closed,
    check_completeness,
    confidence,
    required_efficiency,
    spr_confidence_first_principles,
    spr_confidence_paper_form,
)
from photocascade.statistics import (
    ClickDistribution,
    click_distribution,
    closed_form_pkk,
    monte_carlo_clicks,
    outcome_prob_multinomial,
    two_photon_table,
)

__version__ = "0.1.0"
