"""Deterministic test fields used by the checks, the demos, and the CLI."""

from __future__ import annotations

import math

import numpy as np
from scipy import fft as sp_fft

from .errors import InputError
from .grids import GridSpec, SampledField
from .radial import CliffordRadialFunction
from .transform import sample_copy


def gaussian_field(grid: GridSpec, width: float = 1.0, amplitudes=None) -> SampledField:
    """exp(-|x|^2 / width^2) times a constant multivector amplitude."""
    dim = 1 << grid.m
    if amplitudes is None:
        amplitudes = np.zeros(dim)
        amplitudes[0] = 1.0
    amplitudes = np.asarray(amplitudes, dtype=float).reshape(dim)
    t = np.sum(grid.coords() ** 2, axis=0)
    bump = np.exp(-t / float(width) ** 2)
    vals = amplitudes.reshape((dim,) + (1,) * grid.m) * bump
    return SampledField(grid, vals)


def modulated_gaussian_field(grid: GridSpec, freq, width: float = 1.0,
                             amplitudes=None) -> SampledField:
    """A Gaussian bump carried to frequency freq by a cosine factor."""
    freq = np.asarray(freq, dtype=float).reshape(grid.m)
    base = gaussian_field(grid, width, amplitudes)
    phase = np.tensordot(freq, grid.coords(), axes=(0, 0))
    return SampledField(grid, base.values * np.cos(phase))


def impulse_field(grid: GridSpec, node=None, component: int = 0) -> SampledField:
    """A single unit sample at the given node (default: center node)."""
    dim = 1 << grid.m
    if node is None:
        node = tuple(n // 2 for n in grid.shape)
    node = tuple(int(i) for i in node)
    if len(node) != grid.m or any(not 0 <= i < n for i, n in zip(node, grid.shape)):
        raise InputError(f"node {node} outside grid of shape {grid.shape}")
    if not 0 <= component < dim:
        raise InputError(f"component must be a blade mask in 0..{dim - 1}")
    vals = np.zeros((dim,) + grid.shape)
    vals[(component,) + node] = 1.0
    return SampledField(grid, vals)


def wavelet_copy_field(grid: GridSpec, fn: CliffordRadialFunction,
                       placements) -> SampledField:
    """Superposition of wavelet copies: placements are (a, b, coefficient)."""
    total = None
    for a, b, coeff in placements:
        piece = sample_copy(grid, fn, float(a), b) * float(coeff)
        total = piece if total is None else total + piece
    if total is None:
        raise InputError("placements must not be empty")
    return total


def band_limited_field(grid: GridSpec, rho_min: float, rho_max: float,
                       seed: int = 0) -> SampledField:
    """Unit-norm random field with spectrum confined to an annulus.

    Deterministic for a given seed; every blade component gets its own
    bandpassed white noise.
    """
    if not 0 <= rho_min < rho_max:
        raise InputError("need 0 <= rho_min < rho_max")
    dim = 1 << grid.m
    rng = np.random.default_rng(seed)
    freqs = np.meshgrid(
        *[2 * math.pi * np.fft.fftfreq(n, d=grid.spacing) for n in grid.shape],
        indexing="ij",
    )
    rho = np.sqrt(sum(x ** 2 for x in freqs))
    band = (rho >= rho_min) & (rho <= rho_max)
    if not band.any():
        raise InputError("annulus contains no lattice frequencies; widen it")
    vals = np.zeros((dim,) + grid.shape)
    axes = tuple(range(grid.m))
    for comp in range(dim):
        noise = rng.standard_normal(grid.shape)
        spectrum = sp_fft.fftn(noise, axes=axes)
        spectrum[~band] = 0.0
        vals[comp] = sp_fft.ifftn(spectrum, axes=axes).real
    field = SampledField(grid, vals)
    norm = field.l2_norm()
    if norm == 0.0:
        raise InputError("band limited field vanished; widen the annulus")
    return field * (1.0 / norm)
