"""Millimeter-wave path loss models anchored to a 1 m free space reference.

Free space, SUI, close-in (CI), slope-corrected free space and SUI, and the
beam-combining CI model, with MMSE fitters for their parameters and range
queries over them.
"""

from .beams import (
    BcCiModel,
    BeamSet,
    CombiningScheme,
    bc_ci_path_loss,
    combine,
    effective_ple,
    measured_path_loss_from_beams,
    select_best_beams,
)
from .errors import (
    BelowFreeSpaceWarning,
    BelowReferenceDistanceError,
    DegenerateFitError,
    DomainError,
    EmptyInputError,
    FormatError,
    InsufficientBeamsError,
    OutOfRangeError,
    OutOfValidityError,
    UnidentifiableError,
)
from .estimation import (
    FitDataset,
    FitResult,
    fit_bc_weight,
    fit_ci_ple,
    fit_slope_correction,
    shadowing_sigma,
)
from .link import (
    RangeQuery,
    atmospheric_loss,
    attenuation_per_decade_delta,
    distance_for_loss,
    link_path_loss,
)
from .models import (
    CiModel,
    FreeSpaceBase,
    FrequencyBand,
    ModifiedModel,
    ShadowingSpec,
    SuiContext,
    TerrainClass,
    TerrainParams,
    ci_path_loss,
    fs_path_loss,
    fspl_1m,
    modified_fs_path_loss,
    modified_sui_path_loss,
    sample_shadowing,
    sui_freq_correction,
    sui_path_loss,
    sui_ple,
    sui_rx_height_correction,
    to_db,
    to_linear,
)

__version__ = "0.1.0"
