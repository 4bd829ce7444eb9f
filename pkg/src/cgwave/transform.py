"""Continuous wavelet analysis of sampled Clifford fields.

The transform of a field f against a wavelet psi evaluates, for scales a
and translations b,

    T(a, b) = h^m * sum over lattice nodes x of conj(psi_ab(x)) f(x)

with psi_ab(x) = a^(-m/2) psi((x - b) / a); the alternative plain-right
convention pairs f(x) psi_ab(x) without conjugation.  Translations live
on a sublattice of the field lattice (integer stride k, integer offset),
so x - b is itself a lattice vector and the sum over x is an exact
correlation on the integer difference lattice.  Both evaluation paths
below compute that same finite sum, the direct one as windowed products
over the difference lattice, the fast one as zero padded FFT
correlation; they agree to roundoff by construction.

Scale integrals use the measure da / a^(m+1) on a geometric grid, so the
quadrature weight per scale is log(ratio) * a^(-m).  The inverse sums

    f(x) ~ (1/A_psi) sum over (a, b) of psi_ab(x) T(a, b) w(a) (k h)^m

with the wavelet on the side matching the convention, and A_psi the
admissibility constant of the wavelet.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sp_fft

from .algebra import product_components, signature
from .errors import InputError, ResolutionError, TruncationError
from .fourier import admissibility_constant, fft_workers
from .grids import GridSpec, SampledField
from .radial import CliffordRadialFunction, MotherWavelet, mother_wavelet

CONVENTIONS = ("conjugate-left", "plain-right")


@dataclass(frozen=True)
class ScaleGrid:
    """Geometric scale ladder a_min, ..., a_max with count rungs."""

    a_min: float
    a_max: float
    count: int

    def __post_init__(self):
        if not (0 < self.a_min < self.a_max):
            raise InputError(f"need 0 < a_min < a_max, got {self.a_min}, {self.a_max}")
        if self.count < 2:
            raise InputError(f"scale grid needs at least 2 rungs, got {self.count}")
        object.__setattr__(self, "a_min", float(self.a_min))
        object.__setattr__(self, "a_max", float(self.a_max))
        object.__setattr__(self, "count", int(self.count))

    @property
    def log_step(self) -> float:
        return math.log(self.a_max / self.a_min) / (self.count - 1)

    @property
    def scales(self) -> np.ndarray:
        return np.geomspace(self.a_min, self.a_max, self.count)

    def measure_weights(self, m: int) -> np.ndarray:
        """Quadrature weights for the integral against da / a^(m+1)."""
        return self.log_step * self.scales ** (-float(m))


def effective_radius(fn: CliffordRadialFunction, level: float = 0.01) -> float:
    """Radius beyond which |f| stays below level times its peak."""
    if not 0 < level < 1:
        raise InputError("level must be in (0, 1)")
    e = fn.energy_density()
    if e.is_zero:
        raise InputError("effective radius of the zero function is undefined")
    rmax = 16.0
    r = np.linspace(0.0, rmax, 4001)
    mag = np.sqrt(np.maximum(e.evaluate(r * r), 0.0))
    while mag[-1] > level * mag.max() and rmax < 1e6:
        rmax *= 2.0
        r = np.linspace(0.0, rmax, 4001)
        mag = np.sqrt(np.maximum(e.evaluate(r * r), 0.0))
    above = np.nonzero(mag >= level * mag.max())[0]
    return float(r[above[-1]])


def nested_offset_grid(grid: GridSpec, stride: int, count=None) -> GridSpec:
    """Translation sublattice: every stride-th field node, centered."""
    stride = int(stride)
    if stride < 1:
        raise InputError(f"stride must be a positive integer, got {stride}")
    if len(set(grid.shape)) != 1:
        raise InputError("translation sublattice needs equal axis sizes")
    n = grid.shape[0]
    max_count = (n - 1) // stride + 1
    if count is None:
        count = max_count
    count = int(count)
    if not 1 <= count <= max_count:
        raise InputError(f"count must be in 1..{max_count}, got {count}")
    lead = (n - 1 - (count - 1) * stride) // 2
    origin = tuple(grid.origin[j] + lead * grid.spacing for j in range(grid.m))
    return GridSpec(grid.m, (count,) * grid.m, origin, stride * grid.spacing)


def nesting_parameters(field_grid: GridSpec, offset_grid: GridSpec):
    """Stride and per-axis node offsets of the translation sublattice.

    Raises when the translation nodes are not a subset of the field
    lattice; the transform's exactness depends on that containment.
    """
    h = field_grid.spacing
    ratio = offset_grid.spacing / h
    stride = int(round(ratio))
    if stride < 1 or abs(ratio - stride) > 1e-9:
        raise InputError(
            f"translation spacing {offset_grid.spacing} is not an integer "
            f"multiple of the field spacing {h}"
        )
    offsets = []
    for j in range(field_grid.m):
        rel = (offset_grid.origin[j] - field_grid.origin[j]) / h
        s = int(round(rel))
        if abs(rel - s) > 1e-9 or s < 0:
            raise InputError(
                f"translation origin along axis {j} does not sit on the field lattice"
            )
        if s + (offset_grid.shape[j] - 1) * stride > field_grid.shape[j] - 1:
            raise InputError(f"translation lattice leaves the field lattice along axis {j}")
        offsets.append(s)
    return stride, tuple(offsets)


def _spin_spinor(m: int, angle: float) -> np.ndarray:
    if m != 2:
        raise InputError("spin steered copies are defined in the plane only (m = 2)")
    s = np.zeros(4)
    s[0] = math.cos(angle / 2.0)
    s[0b11] = math.sin(angle / 2.0)
    return s


def _spin_sandwich(sig, s: np.ndarray, vals: np.ndarray) -> np.ndarray:
    s_col = s.reshape((sig.dim,) + (1,) * (vals.ndim - 1))
    rev = (sig.reverse_signs * s).reshape(s_col.shape)
    return product_components(sig, product_components(sig, s_col, vals), rev)


def _evaluate_copy(fn: CliffordRadialFunction, a: float, rel_points: np.ndarray,
                   spin_angle=None) -> np.ndarray:
    """Components of a^(-m/2) [s] psi(s~ y s / a) [s~] at y = rel_points."""
    m = fn.m
    pts = rel_points
    if spin_angle is not None and m != 2:
        raise InputError("spin steered copies are defined in the plane only (m = 2)")
    if spin_angle is not None:
        c, s = math.cos(spin_angle), math.sin(spin_angle)
        rot_back = np.array([[c, s], [-s, c]])  # rotation by -angle
        pts = np.einsum("ij,j...->i...", rot_back, pts, optimize=False)
    vals = fn.evaluate(pts / float(a))
    if spin_angle is not None:
        sig = signature(m)
        vals = _spin_sandwich(sig, _spin_spinor(m, spin_angle), vals)
    return vals * float(a) ** (-m / 2.0)


def sample_copy(grid: GridSpec, fn: CliffordRadialFunction, a: float, b,
                spin_angle=None) -> SampledField:
    """Sample the scaled, translated (optionally spin steered) copy of fn."""
    if fn.m != grid.m:
        raise InputError("wavelet and grid dimensions differ")
    b = np.asarray(b, dtype=float).reshape(grid.m)
    if not a > 0:
        raise InputError(f"scale must be positive, got {a}")
    rel = grid.coords() - b.reshape((grid.m,) + (1,) * grid.m)
    vals = _evaluate_copy(fn, a, rel, spin_angle)
    if not np.all(np.isfinite(vals)):
        raise InputError("copy evaluates non-finite on the grid")
    return SampledField(grid, vals)


@dataclass(frozen=True)
class WaveletCoefficients:
    """Transform output on the scale ladder times the translation lattice.

    values has shape (count, 2^m, *offset_shape), or with a leading spin
    axis when spin_angles is set.
    """

    wavelet: MotherWavelet
    field_grid: GridSpec
    scale_grid: ScaleGrid
    offset_grid: GridSpec
    convention: str
    values: np.ndarray
    spin_angles: tuple = None

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise InputError(f"unknown convention {self.convention!r}")
        vals = np.asarray(self.values, dtype=float)
        dim = 1 << self.field_grid.m
        core = (self.scale_grid.count, dim) + self.offset_grid.shape
        if self.spin_angles is not None:
            object.__setattr__(self, "spin_angles", tuple(float(t) for t in self.spin_angles))
            core = (len(self.spin_angles),) + core
        if vals.shape != core:
            raise InputError(f"coefficient array must have shape {core}, got {vals.shape}")
        object.__setattr__(self, "values", vals)

    def energy(self) -> float:
        """Scale-measure weighted squared mass of the coefficients."""
        if self.spin_angles is not None:
            raise InputError("energy of spin resolved coefficients is not defined here")
        w = self.scale_grid.measure_weights(self.field_grid.m)
        cell = self.offset_grid.cell_volume
        per_scale = np.sum(self.values ** 2, axis=tuple(range(1, self.values.ndim)))
        return float(np.sum(w * per_scale)) * cell

    def scale_energy_profile(self) -> np.ndarray:
        w = self.scale_grid.measure_weights(self.field_grid.m)
        per_scale = np.sum(self.values ** 2, axis=tuple(range(1, self.values.ndim)))
        return w * per_scale * self.offset_grid.cell_volume

    def masked_energy(self, mask: np.ndarray) -> float:
        """energy() restricted to the (scale, translation) nodes where mask holds."""
        if self.spin_angles is not None:
            raise InputError("energy of spin resolved coefficients is not defined here")
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.scale_grid.count,) + self.offset_grid.shape:
            raise InputError(
                f"mask must have shape {(self.scale_grid.count,) + self.offset_grid.shape}, "
                f"got {mask.shape}")
        w = self.scale_grid.measure_weights(self.field_grid.m)
        kept = self.values * mask[:, None]
        per_scale = np.sum(kept ** 2, axis=tuple(range(1, kept.ndim)))
        return float(np.sum(w * per_scale)) * self.offset_grid.cell_volume


def _difference_patch(fn, a, h, stride, offsets, n_field, n_b, spin_angle=None):
    """Wavelet copy sampled on the integer difference lattice d = n - s - j k."""
    m = fn.m
    length = n_field + (n_b - 1) * stride
    axes = []
    for j in range(m):
        lo = -offsets[j] - (n_b - 1) * stride
        axes.append((np.arange(lo, lo + length)) * h)
    pts = np.stack(np.meshgrid(*axes, indexing="ij"))
    return _evaluate_copy(fn, a, pts, spin_angle)


def _combine_signs(sig, convention):
    """Sign factor for (wavelet component a, field component b) pairs."""
    if convention == "conjugate-left":
        return sig.conjugate_signs[:, None] * sig.sign_table
    return sig.sign_table.T  # plain-right: field times wavelet


def _nonzero_components(arr) -> list:
    flat = arr.reshape(arr.shape[0], -1)
    return [i for i in range(arr.shape[0]) if np.any(flat[i])]


def _correlate_fft(sig, patch, field_ffts, fft_shape, out_slices, out_shape, signs, workers):
    spatial = tuple(range(1, patch.ndim))
    flipped = patch[(slice(None),) + (slice(None, None, -1),) * len(spatial)]
    acc = {}
    for a_mask in _nonzero_components(patch):
        q_hat = sp_fft.rfftn(flipped[a_mask], s=fft_shape, workers=workers)
        for b_mask in range(sig.dim):
            fb = field_ffts[b_mask]
            if fb is None:
                continue
            c = sig.mask_table[a_mask, b_mask]
            term = signs[a_mask, b_mask] * (q_hat * fb)
            if c in acc:
                acc[c] += term
            else:
                acc[c] = term
    out = np.zeros((sig.dim,) + out_shape)
    for c in sorted(acc):
        conv = sp_fft.irfftn(acc[c], s=fft_shape, workers=workers)
        out[c] = conv[out_slices]
    return out


def _correlate_direct(sig, patch, field_values, stride, n_b, signs):
    m = field_values.ndim - 1
    n_field = field_values.shape[1]
    spatial_flip = (slice(None),) + (slice(None, None, -1),) * m
    flipped = np.ascontiguousarray(patch[spatial_flip])
    frev = field_values[spatial_flip]
    windows = np.lib.stride_tricks.sliding_window_view(
        flipped, (n_field,) * m, axis=tuple(range(1, m + 1))
    )
    windows = windows[(slice(None),) + (slice(None, None, stride),) * m]
    letters = "nopqrs"[:m]
    caps = "JKLMIH"[:m]
    spec = f"a{caps}{letters},b{letters}->{caps}ab"
    pair = np.einsum(spec, windows, frev, optimize=False)
    out = np.zeros((sig.dim,) + (n_b,) * m)
    for a_mask in range(sig.dim):
        for b_mask in range(sig.dim):
            c = sig.mask_table[a_mask, b_mask]
            out[c] += signs[a_mask, b_mask] * pair[..., a_mask, b_mask]
    return out


def forward(field: SampledField, wavelet: MotherWavelet, scales: ScaleGrid,
            offsets: GridSpec = None, convention: str = "conjugate-left",
            method: str = "fft", spin_angles=None, min_nodes: int = 8) -> WaveletCoefficients:
    """Wavelet coefficients of a sampled field.

    method "fft" evaluates the correlation by zero padded FFTs, "direct"
    by windowed products over the difference lattice; the two compute the
    same finite sum.  min_nodes gates the smallest scale: the wavelet
    must span at least that many lattice nodes across its effective
    diameter (pass 0 to disable).
    """
    grid = field.grid
    if wavelet.m != grid.m:
        raise InputError("wavelet and field dimensions differ")
    if convention not in CONVENTIONS:
        raise InputError(f"unknown convention {convention!r}; use one of {CONVENTIONS}")
    if method not in ("fft", "direct"):
        raise InputError(f"unknown method {method!r}")
    if len(set(grid.shape)) != 1:
        raise InputError("transform requires equal axis sizes")
    if offsets is None:
        offsets = nested_offset_grid(grid, 1)
    if len(set(offsets.shape)) != 1:
        raise InputError("translation lattice requires equal axis sizes")
    stride, offs = nesting_parameters(grid, offsets)

    if min_nodes:
        r_eff = effective_radius(wavelet.fn)
        span = 2.0 * scales.a_min * r_eff / grid.spacing
        if span < min_nodes:
            raise ResolutionError(
                f"scale {scales.a_min:g} spans {span:.2f} lattice nodes across "
                f"the wavelet's effective diameter, fewer than {min_nodes}; "
                "refine the grid or raise the smallest scale"
            )

    sig = field.sig
    n_field = grid.shape[0]
    n_b = offsets.shape[0]
    signs = _combine_signs(sig, convention).astype(float)
    angle_list = None
    if spin_angles is not None:
        angle_list = tuple(float(t) for t in spin_angles)
        if grid.m != 2:
            raise InputError("spin steered transforms are defined in the plane only")

    workers = fft_workers()
    field_ffts = None
    fft_shape = None
    out_slices = None
    if method == "fft":
        length = n_field + (n_b - 1) * stride
        fft_len = sp_fft.next_fast_len(n_field + length - 1)
        fft_shape = (fft_len,) * grid.m
        field_ffts = []
        for b_mask in range(sig.dim):
            comp = field.values[b_mask]
            if np.any(comp):
                field_ffts.append(sp_fft.rfftn(comp, s=fft_shape, workers=workers))
            else:
                field_ffts.append(None)
        out_slices = (slice(n_field - 1, n_field - 1 + n_b * stride, stride),) * grid.m

    def run(angle):
        per_scale = []
        for a in scales.scales:
            patch = _difference_patch(
                wavelet.fn, float(a), grid.spacing, stride, offs, n_field, n_b, angle
            )
            if method == "fft":
                cor = _correlate_fft(sig, patch, field_ffts, fft_shape, out_slices,
                                     (n_b,) * grid.m, signs, workers)
            else:
                cor = _correlate_direct(sig, patch, field.values, stride, n_b, signs)
            per_scale.append(cor * grid.cell_volume)
        return np.stack(per_scale)

    if angle_list is None:
        values = run(None)
    else:
        values = np.stack([run(t) for t in angle_list])
    return WaveletCoefficients(
        wavelet, grid, scales, offsets, convention, values, angle_list
    )


def reconstruct(coeffs: WaveletCoefficients, a_psi: float = None,
                truncation_tol: float = None) -> SampledField:
    """Resynthesize a field from its coefficients on the field lattice.

    a_psi defaults to the wavelet's admissibility constant computed from
    its frequency profile.  truncation_tol, when set, applies the edge
    energy gate of plancherel_check before spending time on synthesis.
    """
    if coeffs.spin_angles is not None:
        raise InputError("reconstruction from spin resolved coefficients is not supported")
    if truncation_tol is not None:
        _enforce_truncation(coeffs, truncation_tol)
    if a_psi is None:
        a_psi = admissibility_constant(coeffs.wavelet.fn)
    grid = coeffs.field_grid
    sig = signature(grid.m)
    stride, offs = nesting_parameters(grid, coeffs.offset_grid)
    n_field = grid.shape[0]
    n_b = coeffs.offset_grid.shape[0]
    m = grid.m
    length = n_field + (n_b - 1) * stride
    up_len = (n_b - 1) * stride + 1
    fft_len = sp_fft.next_fast_len(length + up_len - 1)
    fft_shape = (fft_len,) * m
    workers = fft_workers()
    weights = coeffs.scale_grid.measure_weights(m)
    cell_b = coeffs.offset_grid.cell_volume
    conj_left = coeffs.convention == "conjugate-left"

    out = np.zeros((sig.dim,) + grid.shape)
    read = (slice((n_b - 1) * stride, (n_b - 1) * stride + n_field),) * m
    for i, a in enumerate(coeffs.scale_grid.scales):
        patch = _difference_patch(coeffs.wavelet.fn, float(a), grid.spacing,
                                  stride, offs, n_field, n_b)
        coeff_i = coeffs.values[i]
        up = np.zeros((sig.dim,) + (up_len,) * m)
        up[(slice(None),) + (slice(None, None, stride),) * m] = coeff_i
        up_ffts = []
        for b_mask in range(sig.dim):
            comp = up[b_mask]
            up_ffts.append(
                sp_fft.rfftn(comp, s=fft_shape, workers=workers) if np.any(comp) else None
            )
        acc = {}
        for a_mask in _nonzero_components(patch):
            p_hat = sp_fft.rfftn(patch[a_mask], s=fft_shape, workers=workers)
            for b_mask in range(sig.dim):
                ub = up_ffts[b_mask]
                if ub is None:
                    continue
                # wavelet sits on the convention side: left of the
                # coefficient for conjugate-left, right for plain-right
                if conj_left:
                    c = sig.mask_table[a_mask, b_mask]
                    s = sig.sign_table[a_mask, b_mask]
                else:
                    c = sig.mask_table[b_mask, a_mask]
                    s = sig.sign_table[b_mask, a_mask]
                term = float(s) * (p_hat * ub)
                if c in acc:
                    acc[c] += term
                else:
                    acc[c] = term
        scale_factor = weights[i] * cell_b
        for c in sorted(acc):
            conv = sp_fft.irfftn(acc[c], s=fft_shape, workers=workers)
            out[c] += scale_factor * conv[read]
    return SampledField(grid, out / float(a_psi))


@dataclass(frozen=True)
class PlancherelReport:
    coefficient_energy: float
    admissibility: float
    field_energy: float
    ratio: float
    edge_scale_fraction: float
    edge_ring_fraction: float


def _edge_fractions(coeffs: WaveletCoefficients):
    profile = coeffs.scale_energy_profile()
    total = float(profile.sum())
    if total == 0.0:
        return 0.0, 0.0
    edge_scales = float(profile[0] + profile[-1])
    m = coeffs.field_grid.m
    sq = np.sum(coeffs.values ** 2, axis=1)
    ring = np.zeros(coeffs.offset_grid.shape, dtype=bool)
    for axis in range(m):
        sl = [slice(None)] * m
        sl[axis] = 0
        ring[tuple(sl)] = True
        sl[axis] = -1
        ring[tuple(sl)] = True
    w = coeffs.scale_grid.measure_weights(m)
    ring_energy = float(np.sum(w * np.sum(sq[:, ring], axis=1))) * coeffs.offset_grid.cell_volume
    return edge_scales / total, ring_energy / total


def _enforce_truncation(coeffs: WaveletCoefficients, tol: float):
    scale_frac, ring_frac = _edge_fractions(coeffs)
    if scale_frac > tol:
        raise TruncationError(
            f"outermost scales hold {scale_frac:.2%} of the coefficient "
            f"energy (gate {tol:.2%}); widen the scale range"
        )
    if ring_frac > tol:
        raise TruncationError(
            f"outermost translation ring holds {ring_frac:.2%} of the "
            f"coefficient energy (gate {tol:.2%}); enlarge the translation box"
        )


def plancherel_check(field: SampledField, coeffs: WaveletCoefficients,
                     a_psi: float = None, truncation_tol: float = 0.01) -> PlancherelReport:
    """Compare coefficient energy against A_psi times the field energy.

    The continuum identity is exact; on a lattice the ratio drifts from 1
    by quadrature and truncation error, and the edge fractions say how
    much energy sits against the boundary of the sampled (a, b) domain.
    """
    if coeffs.spin_angles is not None:
        raise InputError("spin resolved coefficients are not supported here")
    if a_psi is None:
        a_psi = admissibility_constant(coeffs.wavelet.fn)
    if truncation_tol is not None:
        _enforce_truncation(coeffs, truncation_tol)
    s = coeffs.energy()
    f2 = field.l2_norm_sq()
    scale_frac, ring_frac = _edge_fractions(coeffs)
    return PlancherelReport(
        coefficient_energy=s,
        admissibility=float(a_psi),
        field_energy=f2,
        ratio=s / (float(a_psi) * f2) if f2 > 0 else math.inf,
        edge_scale_fraction=scale_frac,
        edge_ring_fraction=ring_frac,
    )


def _format_cell(x: float) -> str:
    return "%.17g" % x


def write_coefficients_csv(path, coeffs: WaveletCoefficients):
    """Plain text coefficient table keyed by scale index and node index."""
    grid = coeffs.field_grid
    sig = signature(grid.m)
    w = coeffs.wavelet
    lines = [
        f"m={grid.m}",
        f"wavelet_ell={w.ell}",
        "wavelet_alpha=" + _format_cell(w.alpha),
        "wavelet_beta=" + _format_cell(w.beta),
        f"convention={coeffs.convention}",
        "field_shape=" + ",".join(str(n) for n in grid.shape),
        "field_origin=" + ",".join(_format_cell(x) for x in grid.origin),
        "field_spacing=" + _format_cell(grid.spacing),
        "scale_min=" + _format_cell(coeffs.scale_grid.a_min),
        "scale_max=" + _format_cell(coeffs.scale_grid.a_max),
        f"scale_count={coeffs.scale_grid.count}",
        "offset_shape=" + ",".join(str(n) for n in coeffs.offset_grid.shape),
        "offset_origin=" + ",".join(_format_cell(x) for x in coeffs.offset_grid.origin),
        "offset_spacing=" + _format_cell(coeffs.offset_grid.spacing),
    ]
    if coeffs.spin_angles is not None:
        lines.append("spin_angles=" + ",".join(_format_cell(t) for t in coeffs.spin_angles))
    names = [sig.blade_name(mask) for mask in sig.blade_order]
    index_cols = ["scale"] + [f"j{j + 1}" for j in range(grid.m)]
    if coeffs.spin_angles is not None:
        index_cols = ["spin"] + index_cols
    lines.append(",".join(index_cols + names))
    vals = coeffs.values
    if coeffs.spin_angles is None:
        vals = vals[None]
    n_spin = vals.shape[0]
    order = list(sig.blade_order)
    b_shape = coeffs.offset_grid.shape
    for sp in range(n_spin):
        for i in range(coeffs.scale_grid.count):
            flat = vals[sp, i].reshape(sig.dim, -1)
            for node in range(flat.shape[1]):
                idx = np.unravel_index(node, b_shape)
                key = ([str(sp)] if coeffs.spin_angles is not None else []) + [str(i)]
                key += [str(int(v)) for v in idx]
                cells = [_format_cell(float(flat[mask, node])) for mask in order]
                lines.append(",".join(key + cells))
    with io.open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def read_coefficients_csv(path) -> WaveletCoefficients:
    with io.open(path, "r", newline="") as fh:
        raw = fh.read().splitlines()
    header = {}
    idx = 0
    while idx < len(raw) and "=" in raw[idx] and not raw[idx].startswith(("scale,", "spin,")):
        key, _, val = raw[idx].partition("=")
        header[key.strip()] = val.strip()
        idx += 1
    needed = [
        "m", "wavelet_ell", "wavelet_alpha", "wavelet_beta", "convention",
        "field_shape", "field_origin", "field_spacing",
        "scale_min", "scale_max", "scale_count",
        "offset_shape", "offset_origin", "offset_spacing",
    ]
    for key in needed:
        if key not in header:
            raise InputError(f"coefficient file missing header {key}=")
    m = int(header["m"])
    sig = signature(m)
    field_grid = GridSpec(
        m,
        tuple(int(s) for s in header["field_shape"].split(",")),
        tuple(float(s) for s in header["field_origin"].split(",")),
        float(header["field_spacing"]),
    )
    offset_grid = GridSpec(
        m,
        tuple(int(s) for s in header["offset_shape"].split(",")),
        tuple(float(s) for s in header["offset_origin"].split(",")),
        float(header["offset_spacing"]),
    )
    scale_grid = ScaleGrid(
        float(header["scale_min"]), float(header["scale_max"]), int(header["scale_count"])
    )
    spin_angles = None
    if "spin_angles" in header:
        spin_angles = tuple(float(s) for s in header["spin_angles"].split(","))
    wav = mother_wavelet(
        m, int(header["wavelet_ell"]),
        float(header["wavelet_alpha"]), float(header["wavelet_beta"]),
    )
    if idx >= len(raw):
        raise InputError("coefficient file has no column header line")
    idx += 1
    rows = [line for line in raw[idx:] if line]
    n_spin = len(spin_angles) if spin_angles is not None else 1
    b_shape = offset_grid.shape
    nodes = int(np.prod(b_shape))
    want_rows = n_spin * scale_grid.count * nodes
    if len(rows) != want_rows:
        raise InputError(f"expected {want_rows} data rows, found {len(rows)}")
    key_width = (1 if spin_angles is not None else 0) + 1 + m
    vals = np.zeros((n_spin, scale_grid.count, sig.dim) + b_shape)
    order = list(sig.blade_order)
    for line in rows:
        cells = line.split(",")
        if len(cells) != key_width + sig.dim:
            raise InputError("coefficient row has the wrong number of cells")
        pos = 0
        sp = 0
        if spin_angles is not None:
            sp = int(cells[pos]); pos += 1
        i = int(cells[pos]); pos += 1
        idx_b = tuple(int(c) for c in cells[pos:pos + m]); pos += m
        for col, mask in enumerate(order):
            vals[(sp, i, mask) + idx_b] = float(cells[pos + col])
    if spin_angles is None:
        vals = vals[0]
    return WaveletCoefficients(
        wav, field_grid, scale_grid, offset_grid, header["convention"], vals, spin_angles
    )
