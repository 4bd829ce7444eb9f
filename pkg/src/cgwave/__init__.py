"""Clifford algebra arithmetic, Clifford-Gegenbauer wavelets, continuous
wavelet analysis, and concentration (uncertainty) verification."""

from .algebra import (
    CliffordVector,
    Multivector,
    Signature,
    Spinor,
    basis_vector,
    blade,
    clifford_conjugate,
    dot,
    format_multivector,
    geometric_product,
    grade_involution,
    hermitian_conjugate,
    parse_multivector,
    reflect,
    reverse,
    rotate,
    rotation_matrix,
    scalar,
    signature,
    spinor_from_plane_angle,
    vector,
    wedge,
)

from .radial import (
    CliffordRadialFunction,
    MotherWavelet,
    RadialSum,
    RadialTerm,
    format_radial_sum,
    gegenbauer_recurrence,
    gegenbauer_rodrigues,
    l1_norm,
    l2_norm_sq,
    moment,
    mother_wavelet,
    parse_radial_sum,
    sigma_sphere,
    weight,
)

from .grids import (
    GridSpec,
    SampledField,
    inner_product,
    masked_norm_sq,
    read_field_csv,
    sample,
    scalar_inner_product,
    write_field_csv,
)

from .fourier import (
    FourierField,
    admissibility_alt_normalization,
    admissibility_constant,
    admissibility_from_field,
    fourier,
    fourier_profile,
    spectral_energy_profile,
)

from .transform import (
    PlancherelReport,
    ScaleGrid,
    WaveletCoefficients,
    effective_radius,
    forward,
    nested_offset_grid,
    plancherel_check,
    read_coefficients_csv,
    reconstruct,
    sample_copy,
    write_coefficients_csv,
)

from .presets import (
    band_limited_field,
    gaussian_field,
    impulse_field,
    modulated_gaussian_field,
    wavelet_copy_field,
)

from .regions import (
    Ball,
    Box,
    CoeffBand,
    CoeffBox,
    CoeffRegion,
    RegionConfiguration,
    SpaceRegion,
    coeff_region_mask,
    load_region_configurations,
    region_mask,
    scale_coeff_region,
    scale_space_region,
)

from .uncertainty import (
    ConcentrationReport,
    PhiEstimate,
    check_band_corollary,
    check_donoho_stark,
    check_final_corollary,
    check_proposition_41,
    epsilon_concentration,
    freq_limit,
    l2_restrict_norm,
    mask_coefficients,
    phi_constant,
    phi_estimate,
    time_limit,
    write_reports_csv,
)

__version__ = "0.1.0"
