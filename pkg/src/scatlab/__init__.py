"""scatlab: windowed scattering transforms on periodic grids.

Filter-bank construction with verified spectral partitions, breadth-first
scattering propagation with certified pruning, adversarial slow-decay
signal forging, and closed-form decay certificates for the layer-energy
remainder.
"""

from .errors import (
    CoverageGap,
    DepthExceeded,
    DepthTooLarge,
    DisjointnessViolation,
    DomainError,
    EmptySupport,
    GridExhausted,
    GridMismatch,
    InconsistentTree,
    InvalidConstant,
    InvalidShell,
    MissingMetadata,
    NonIntegerFactor,
    NonUnitLP,
    NotNondecreasing,
    NotNonincreasing,
    NotUFC,
    NyquistOverflow,
    ScatLabError,
    SupportViolation,
    TargetUnreachable,
    UnknownLabel,
    WeightNotStrong,
)
from .grid import (
    Grid,
    Signal,
    SpectralSignal,
    dilate_L1,
    dilate_L2,
    dilate_spectral,
    forward_fourier,
    inverse_fourier,
    load_signal,
    modulus,
    project_annulus,
    save_signal,
)
from .minidisk import smallest_enclosing_ball
from .banks import (
    ConeSpec,
    Filter,
    FilterBank,
    build_bank_from_config,
    build_directional_2d,
    build_meyer_1d,
    build_shannon_1d,
    build_ufc_bank,
    chebyshev_radius,
    compute_alpha,
    cone_membership,
    directional_mother,
    export_bank,
    import_bank,
    indicator_window,
    load_bank_config,
    max_distance_bound,
    shift_vector,
    verify_littlewood_paley,
)
from .engine import (
    CovarianceReport,
    EnergyProfile,
    LipschitzReport,
    NonexpansiveReport,
    ScatteringTree,
    TreeNode,
    check_dilation_covariance,
    check_lipschitz_bounds,
    check_nonexpansive,
    contract_bank,
    dilation_energy_limit,
    energy_profile,
    mixed_scattering_norm,
    propagate_one,
    scatter,
    w_n,
)
from .forge import (
    AdversarialCertificate,
    DecaySequence,
    SuperadditivityReport,
    ToleranceSchedule,
    build_slow_signal,
    check_superadditivity,
    make_coefficients,
    select_subsequence,
    separation_deficits,
)
from .certificates import (
    DecayCertificate,
    InclusionReport,
    ThetaKernel,
    Weight,
    WeightClassification,
    check_inclusion,
    classify_weight,
    find_Ctilde,
    kernel_bound,
    rate_certificate_ufc,
    rate_certificate_wavelet,
    rate_certificate_weighted,
    sobolev_norms,
    validate_kernel_order,
    weighted_decomp_norm,
)

__version__ = "0.1.0"
