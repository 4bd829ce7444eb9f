"""Concentration operators and uncertainty inequalities.

The chain verified here couples three measured quantities: the fraction
of a field's energy outside a spatial region T, the fraction of its
wavelet coefficients outside a scale-translation region Omega, and the
coupling constant

    phi(Omega, T) = int_Omega ( int_{aT+b} |psi|^2 dV ) da dV(b) / a^(m+1),

together with the admissibility constant A_psi.  The transform is an
isometry up to sqrt(A_psi) (its coefficient energy is A_psi times the
field energy), so inequalities are checked in the normalization where
that Plancherel identity holds exactly; the looser forms that treat the
transform as an A_psi-isometry are evaluated alongside and labeled.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError, RegionError
from .grids import GridSpec, SampledField, masked_norm_sq
from .radial import CliffordRadialFunction, MotherWavelet, l2_norm_sq
from .fourier import admissibility_constant
from .transform import (
    ScaleGrid,
    WaveletCoefficients,
    _enforce_truncation,
    effective_radius,
    forward,
    reconstruct,
)
from .regions import (
    CoeffBand,
    CoeffRegion,
    SpaceRegion,
    coeff_region_mask,
    region_mask,
)

__all__ = [
    "ConcentrationReport",
    "PhiEstimate",
    "check_band_corollary",
    "check_donoho_stark",
    "check_final_corollary",
    "check_proposition_41",
    "epsilon_concentration",
    "freq_limit",
    "l2_restrict_norm",
    "mask_coefficients",
    "phi_constant",
    "phi_estimate",
    "time_limit",
    "write_reports_csv",
]


def l2_restrict_norm(field: SampledField, region: SpaceRegion,
                     outside: bool = False) -> float:
    """L2 norm of a field over the nodes inside (or outside) a region."""
    mask = region_mask(field.grid, region)
    if outside:
        mask = ~mask
    return math.sqrt(masked_norm_sq(field, mask))


def time_limit(field: SampledField, region: SpaceRegion) -> SampledField:
    """Chop the field to a spatial region: values outside become exact zeros."""
    mask = region_mask(field.grid, region)
    return SampledField(field.grid, np.where(mask, field.values, 0.0))


def mask_coefficients(coeffs: WaveletCoefficients,
                      region: CoeffRegion) -> WaveletCoefficients:
    """Restrict coefficients to a scale-translation region."""
    if coeffs.spin_angles is not None:
        raise InputError("region restriction of spin resolved coefficients is not supported")
    mask = coeff_region_mask(coeffs.scale_grid, coeffs.offset_grid, region)
    return replace(coeffs, values=np.where(mask[:, None], coeffs.values, 0.0))


def freq_limit(field: SampledField, wavelet: MotherWavelet, region: CoeffRegion,
               scales: ScaleGrid, offsets: GridSpec = None,
               convention: str = "conjugate-left", a_psi: float = None,
               truncation_tol: float = None, min_nodes: int = 8) -> SampledField:
    """Partial reconstruction keeping only coefficients inside the region.

    The restricted coefficient array need not be the transform of any
    field, so applying this twice is only approximately idempotent; the
    defect is measured by the callers that care.
    """
    coeffs = forward(field, wavelet, scales, offsets,
                     convention=convention, min_nodes=min_nodes)
    if truncation_tol is not None:
        _enforce_truncation(coeffs, truncation_tol)
    return reconstruct(mask_coefficients(coeffs, region), a_psi=a_psi)


def epsilon_concentration(g, region) -> float:
    """Smallest eps for which g is eps-concentrated on the region.

    Accepts a sampled field with a spatial region, or wavelet
    coefficients with a scale-translation region; returns the fraction
    of the L2 norm living outside, in [0, 1].
    """
    if isinstance(g, SampledField):
        if not isinstance(region, SpaceRegion):
            raise InputError("a sampled field needs a spatial region")
        total = g.l2_norm_sq()
        if total <= 0.0:
            raise InputError("concentration of the zero field is undefined")
        if region.is_empty:
            return 1.0
        outside = masked_norm_sq(g, ~region_mask(g.grid, region))
    elif isinstance(g, WaveletCoefficients):
        if not isinstance(region, CoeffRegion):
            raise InputError("wavelet coefficients need a scale-translation region")
        total = g.energy()
        if total <= 0.0:
            raise InputError("concentration of zero coefficients is undefined")
        if region.is_empty:
            return 1.0
        mask = coeff_region_mask(g.scale_grid, g.offset_grid, region)
        outside = g.masked_energy(~mask)
    else:
        raise InputError(f"cannot measure concentration of {type(g).__name__}")
    return min(1.0, math.sqrt(outside / total))


# quadrature defaults by dimension: nodes per axis for the fixed lattice
# carrying |psi|^2, translation nodes per axis, and scale bins
_INNER_RESOLUTION = {1: 8192, 2: 192, 3: 48}
_B_RESOLUTION = {1: 64, 2: 12, 3: 6}
_SCALE_NODES = 48
_OUTER_CHUNK = 32


@dataclass(frozen=True)
class PhiEstimate:
    """Coupling constant with quadrature diagnostics.

    tail_share is the part of the value contributed by the closed-form
    band tail bound beyond the numerically integrated scale range.
    """

    value: float
    tail_share: float
    inner_nodes: int
    outer_nodes: int


def _energy_lattice(fn: CliffordRadialFunction, resolution: int):
    """Fixed midpoint lattice carrying w * |psi|^2, trimmed to the energy ball."""
    radius = 1.5 * effective_radius(fn, level=1e-9)
    m = fn.m
    step = 2.0 * radius / resolution
    axis = -radius + step * (np.arange(resolution) + 0.5)
    mesh = np.meshgrid(*([axis] * m), indexing="ij")
    points = np.stack([g.ravel() for g in mesh])
    t = np.sum(points ** 2, axis=0)
    keep = t <= radius ** 2
    points, t = points[:, keep], t[keep]
    density = fn.energy_density().evaluate(t) * step ** m
    return points, density


def _scale_bins(lo: float, hi: float, m: int, count: int):
    """Geometric bins with exact da/a^(m+1) masses, evaluated at log midpoints."""
    edges = np.geomspace(lo, hi, count + 1)
    nodes = np.sqrt(edges[:-1] * edges[1:])
    masses = (edges[:-1] ** -m - edges[1:] ** -m) / m
    return nodes, masses


def _b_lattice(box, resolution: int):
    lo, hi = box.bounds()
    steps = (hi - lo) / resolution
    axes = [lo[j] + steps[j] * (np.arange(resolution) + 0.5) for j in range(box.m)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh]), float(np.prod(steps))


def _inner_integrals(time_region, points, density, a: np.ndarray,
                     b: np.ndarray) -> np.ndarray:
    """int_{aT+b} |psi|^2 for each (a_i, b_i) pair, via the fixed lattice."""
    out = np.empty(a.shape[0])
    for start in range(0, a.shape[0], _OUTER_CHUNK):
        sl = slice(start, start + _OUTER_CHUNK)
        # node y lies in aT+b iff (y - b)/a lies in T
        rel = (points[:, None, :] - b[:, sl, None]) / a[sl, None]
        inside = time_region.contains(rel)
        out[sl] = inside @ density
    return out


def _band_cut(band: CoeffBand, time_region, fn) -> float:
    """Scale beyond which the band tail is replaced by its closed form."""
    b_lo, b_hi = band.b_box.bounds()
    b_reach = float(np.max(np.abs(np.concatenate([b_lo, b_hi]))))
    t_lo, t_hi = time_region.bounds()
    t_reach = float(np.max(np.abs(np.concatenate([t_lo, t_hi]))))
    return max(16.0, 8.0 * band.alpha, 2.0 * (b_reach + t_reach))


def phi_estimate(wavelet, time_region: SpaceRegion, coeff_region: CoeffRegion,
                 inner_resolution: int = None, b_resolution: int = None,
                 scale_nodes: int = _SCALE_NODES) -> PhiEstimate:
    """Coupling constant between a spatial and a scale-translation region.

    Outer integral: per piece, geometric scale bins carrying their exact
    measure, times a midpoint lattice on the translation box.  Inner
    integral: |psi|^2 = A^2 + t B^2 on a fixed lattice over its energy
    ball, intersected with the affinely mapped region.  Bands integrate
    numerically up to a cut and add the closed-form tail bound
    ||psi||^2 |b_box| / (m a_cut^m); its share is reported.
    """
    fn = wavelet.fn if isinstance(wavelet, MotherWavelet) else wavelet
    if not isinstance(fn, CliffordRadialFunction):
        raise InputError("phi needs a mother wavelet or a radial function")
    m = fn.m
    if time_region.m != m or coeff_region.m != m:
        raise InputError("regions and wavelet disagree on dimension")
    if inner_resolution is None:
        inner_resolution = _INNER_RESOLUTION[m]
    if b_resolution is None:
        b_resolution = _B_RESOLUTION[m]

    if time_region.is_empty or coeff_region.is_empty:
        return PhiEstimate(0.0, 0.0, 0, 0)

    points, density = _energy_lattice(fn, inner_resolution)
    total = 0.0
    tail_total = 0.0
    outer_nodes = 0
    for piece in coeff_region.pieces:
        if isinstance(piece, CoeffBand):
            a_hi = _band_cut(piece, time_region, fn)
            a_nodes, a_masses = _scale_bins(piece.alpha, a_hi, m, scale_nodes)
            tail = l2_norm_sq(fn) * piece.b_box.volume() / (m * a_hi ** m)
        else:
            a_nodes, a_masses = _scale_bins(piece.a_lo, piece.a_hi, m, scale_nodes)
            tail = 0.0
        b_points, b_cell = _b_lattice(piece.b_box, b_resolution)
        nb = b_points.shape[1]
        a_flat = np.repeat(a_nodes, nb)
        b_flat = np.tile(b_points, len(a_nodes))
        inner = _inner_integrals(time_region, points, density, a_flat, b_flat)
        inner = inner.reshape(len(a_nodes), nb)
        total += float(np.sum(a_masses[:, None] * inner)) * b_cell + tail
        tail_total += tail
        outer_nodes += a_flat.shape[0]
    share = tail_total / total if total > 0 else 0.0
    return PhiEstimate(total, share, points.shape[1], outer_nodes)


def phi_constant(wavelet, time_region: SpaceRegion, coeff_region: CoeffRegion,
                 **kwargs) -> float:
    return phi_estimate(wavelet, time_region, coeff_region, **kwargs).value


@dataclass(frozen=True)
class ConcentrationReport:
    """Outcome of one inequality check.

    lhs/rhs/holds describe the check's primary inequality; extras carry
    the alternative printed or sharper forms as (name, lhs, rhs, holds)
    tuples, diagnostics carry named scalars (quadrature shares, ratios).
    """

    check: str
    config: str
    lhs: float
    rhs: float
    holds: bool
    vacuous: bool = False
    epsilon_t: float = None
    epsilon_omega: float = None
    admissibility: float = None
    phi: float = None
    extras: tuple = ()
    diagnostics: tuple = ()

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def summary_lines(self) -> list:
        name = f"{self.check}[{self.config}]" if self.config else self.check
        verdict = "holds" if self.holds else "FAILS"
        if self.vacuous:
            verdict += " (vacuous)"
        lines = [f"{name}: {verdict}  lhs={self.lhs:.6g}  rhs={self.rhs:.6g}  "
                 f"slack={self.slack:.6g}"]
        scalars = []
        for label, value in (("eps_T", self.epsilon_t), ("eps_Omega", self.epsilon_omega),
                             ("A_psi", self.admissibility), ("phi", self.phi)):
            if value is not None:
                scalars.append(f"{label}={value:.6g}")
        if scalars:
            lines.append("  " + "  ".join(scalars))
        for name_, lhs, rhs, holds in self.extras:
            lines.append(f"  {name_}: {'holds' if holds else 'fails'}  "
                         f"lhs={lhs:.6g}  rhs={rhs:.6g}")
        for key, value in self.diagnostics:
            lines.append(f"  {key}={value:.6g}")
        return lines


def _coefficient_diagnostics(coeffs: WaveletCoefficients) -> tuple:
    profile = coeffs.scale_energy_profile()
    total = float(np.sum(profile))
    if total <= 0.0:
        return ()
    edge = (profile[0] + profile[-1]) / total
    return (("edge_scale_share", float(edge)),)


def check_proposition_41(field: SampledField, wavelet: MotherWavelet,
                         time_region: SpaceRegion, coeff_region: CoeffRegion,
                         scales: ScaleGrid, offsets: GridSpec = None,
                         convention: str = "conjugate-left", min_nodes: int = 8,
                         config_name: str = "") -> ConcentrationReport:
    """Coefficient mass of the time-limited field against the phi bound.

    Primary form: ||chi_Omega T(P_T f)|| <= ||P_T f|| sqrt(phi), which is
    what the Cauchy-Schwarz argument yields.  The variant with phi in
    place of sqrt(phi) is evaluated alongside as "printed-form".
    """
    limited = time_limit(field, time_region)
    norm_pt = math.sqrt(limited.l2_norm_sq())
    coeffs = forward(limited, wavelet, scales, offsets,
                     convention=convention, min_nodes=min_nodes)
    mask = coeff_region_mask(coeffs.scale_grid, coeffs.offset_grid, coeff_region)
    lhs = math.sqrt(coeffs.masked_energy(mask))
    est = phi_estimate(wavelet, time_region, coeff_region)
    rhs = norm_pt * math.sqrt(est.value)
    rhs_printed = norm_pt * est.value
    return ConcentrationReport(
        check="proposition41", config=config_name,
        lhs=lhs, rhs=rhs, holds=lhs <= rhs,
        phi=est.value,
        extras=(("printed-form", lhs, rhs_printed, lhs <= rhs_printed),),
        diagnostics=(("phi_tail_share", est.tail_share),
                     ("limited_norm", norm_pt)) + _coefficient_diagnostics(coeffs),
    )


def check_band_corollary(field: SampledField, wavelet: MotherWavelet,
                         time_region: SpaceRegion, coeff_region: CoeffRegion,
                         scales: ScaleGrid, offsets: GridSpec = None,
                         convention: str = "conjugate-left", min_nodes: int = 8,
                         config_name: str = "") -> ConcentrationReport:
    """Band version of the restriction bound.

    Primary form is the printed one, ||chi_Omega T(P_T f)|| <=
    ||P_T f|| ||psi|| |b_box|^(1/2); the variant carrying the band
    measure factor 1/(m alpha^m) is reported as "band-measure-form".
    """
    bands = coeff_region.bands
    if len(coeff_region.pieces) != 1 or len(bands) != 1:
        raise RegionError("the band bound needs a region that is a single band")
    band = bands[0]
    limited = time_limit(field, time_region)
    norm_pt = math.sqrt(limited.l2_norm_sq())
    coeffs = forward(limited, wavelet, scales, offsets,
                     convention=convention, min_nodes=min_nodes)
    mask = coeff_region_mask(coeffs.scale_grid, coeffs.offset_grid, coeff_region)
    lhs = math.sqrt(coeffs.masked_energy(mask))
    psi_norm_sq = l2_norm_sq(wavelet.fn)
    rhs = norm_pt * math.sqrt(psi_norm_sq * band.b_box.volume())
    rhs_band = norm_pt * math.sqrt(psi_norm_sq * band.measure())
    return ConcentrationReport(
        check="band-corollary", config=config_name,
        lhs=lhs, rhs=rhs, holds=lhs <= rhs,
        extras=(("band-measure-form", lhs, rhs_band, lhs <= rhs_band),),
        diagnostics=(("band_measure", band.measure()),
                     ("limited_norm", norm_pt)) + _coefficient_diagnostics(coeffs),
    )


def _measured_concentrations(field, wavelet, time_region, coeff_region,
                             scales, offsets, convention, min_nodes):
    if field.l2_norm_sq() <= 0.0:
        raise InputError("concentration checks need a nonzero field")
    coeffs = forward(field, wavelet, scales, offsets,
                     convention=convention, min_nodes=min_nodes)
    eps_t = epsilon_concentration(field, time_region)
    eps_o = epsilon_concentration(coeffs, coeff_region)
    return coeffs, eps_t, eps_o


def check_donoho_stark(field: SampledField, wavelet: MotherWavelet,
                       time_region: SpaceRegion, coeff_region: CoeffRegion,
                       scales: ScaleGrid, offsets: GridSpec = None,
                       convention: str = "conjugate-left", a_psi: float = None,
                       min_nodes: int = 8,
                       config_name: str = "") -> ConcentrationReport:
    """Concentration bound on the total coefficient mass.

    Primary form: ||T f|| <= [sqrt(A_psi) eps_T + sqrt(phi)] / (1 - eps_Omega)
    ||f||, the chain rewritten for the sqrt(A_psi)-isometry the transform
    actually is.  The A_psi eps_T + phi variant is reported as
    "printed-form".
    """
    coeffs, eps_t, eps_o = _measured_concentrations(
        field, wavelet, time_region, coeff_region, scales, offsets,
        convention, min_nodes)
    if eps_o >= 1.0 - 1e-9:
        raise InputError(
            f"coefficient concentration {eps_o:.6g} makes the bound vacuous; "
            "enlarge the scale-translation region")
    if a_psi is None:
        a_psi = admissibility_constant(wavelet.fn)
    est = phi_estimate(wavelet, time_region, coeff_region)
    norm_f = math.sqrt(field.l2_norm_sq())
    lhs = math.sqrt(coeffs.energy())
    rhs = (math.sqrt(a_psi) * eps_t + math.sqrt(est.value)) / (1.0 - eps_o) * norm_f
    rhs_printed = (a_psi * eps_t + est.value) / (1.0 - eps_o) * norm_f
    return ConcentrationReport(
        check="donoho-stark", config=config_name,
        lhs=lhs, rhs=rhs, holds=lhs <= rhs,
        vacuous=eps_t + eps_o >= 1.0,
        epsilon_t=eps_t, epsilon_omega=eps_o,
        admissibility=a_psi, phi=est.value,
        extras=(("printed-form", lhs, rhs_printed, lhs <= rhs_printed),),
        diagnostics=(("plancherel_ratio", lhs ** 2 / (a_psi * norm_f ** 2)),
                     ("phi_tail_share", est.tail_share))
                    + _coefficient_diagnostics(coeffs),
    )


def check_final_corollary(field: SampledField, wavelet: MotherWavelet,
                          time_region: SpaceRegion, coeff_region: CoeffRegion,
                          scales: ScaleGrid, offsets: GridSpec = None,
                          convention: str = "conjugate-left", a_psi: float = None,
                          min_nodes: int = 8, assume_support: bool = False,
                          config_name: str = "") -> ConcentrationReport:
    """Region-only consequence: (1 - eps_Omega - eps_T) A_psi <= phi.

    With assume_support both concentrations are forced to zero, giving
    the support form A_psi <= phi.  The squared deficit variant
    (1 - eps_Omega - eps_T)^2 A_psi <= phi, which is what the isometry
    normalization proves, is reported as "squared-form".
    """
    if assume_support:
        eps_t = eps_o = 0.0
    else:
        _, eps_t, eps_o = _measured_concentrations(
            field, wavelet, time_region, coeff_region, scales, offsets,
            convention, min_nodes)
    if a_psi is None:
        a_psi = admissibility_constant(wavelet.fn)
    est = phi_estimate(wavelet, time_region, coeff_region)
    deficit = 1.0 - eps_t - eps_o
    lhs = deficit * a_psi
    lhs_sq = max(deficit, 0.0) ** 2 * a_psi
    return ConcentrationReport(
        check="final-corollary", config=config_name,
        lhs=lhs, rhs=est.value, holds=lhs <= est.value,
        vacuous=deficit <= 0.0,
        epsilon_t=eps_t, epsilon_omega=eps_o,
        admissibility=a_psi, phi=est.value,
        extras=(("squared-form", lhs_sq, est.value, lhs_sq <= est.value),),
        diagnostics=(("phi_tail_share", est.tail_share),),
    )


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return "%.17g" % value


def write_reports_csv(path, reports):
    """One row per report: scalars, the primary inequality, and notes."""
    header = ("config,check,epsilon_t,epsilon_omega,admissibility,phi,"
              "lhs,rhs,slack,holds,vacuous,notes")
    lines = [header]
    for r in reports:
        notes = []
        for name, lhs, rhs, holds in r.extras:
            notes.append(f"{name} lhs={lhs:.17g} rhs={rhs:.17g} "
                         f"{'holds' if holds else 'fails'}")
        for key, value in r.diagnostics:
            notes.append(f"{key}={value:.17g}")
        cells = [r.config, r.check, _csv_cell(r.epsilon_t), _csv_cell(r.epsilon_omega),
                 _csv_cell(r.admissibility), _csv_cell(r.phi), _csv_cell(r.lhs),
                 _csv_cell(r.rhs), _csv_cell(r.slack), _csv_cell(r.holds),
                 _csv_cell(r.vacuous), "; ".join(notes)]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
