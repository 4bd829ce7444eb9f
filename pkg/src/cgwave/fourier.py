"""Fourier transforms of sampled fields and of radial Clifford functions.

Convention: F[f](xi) = integral of f(x) exp(-i <x, xi>) dV(x), so the
lattice Parseval identity reads ||F[f]||^2 = (2 pi)^m ||f||^2 and holds
exactly (to roundoff) for the discrete transform below.

For a radial function f = A(t) + x B(t) the transform is again of the
same shape in the frequency variable,

    F[f](xi) = Ahat(rho) + i xi V(rho),        rho = |xi|,

with Ahat and V given by one dimensional Hankel type integrals against
Bessel functions of order m/2 - 1 and m/2.  The squared pointwise
magnitude is Ahat^2 + rho^2 V^2, which is all the admissibility integral
needs.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import fft as sp_fft
from scipy import integrate, special

from .errors import InputError, IntegrabilityError
from .grids import GridSpec, SampledField, read_field_csv, write_field_csv
from .radial import CliffordRadialFunction, l1_norm, moment, sigma_sphere


def fft_workers() -> int:
    """Worker count for FFT line parallelism, from CGWAVE_WORKERS.

    Lines are transformed independently, so the result is bitwise
    identical for any worker count.
    """
    raw = os.environ.get("CGWAVE_WORKERS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise InputError(f"CGWAVE_WORKERS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise InputError(f"CGWAVE_WORKERS must be positive, got {n}")
    return n


@dataclass(frozen=True)
class FourierField:
    """Complex Clifford field on a frequency lattice."""

    grid: GridSpec
    values: np.ndarray
    warnings: tuple = ()

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        want = (1 << self.grid.m,) + self.grid.shape
        if vals.shape != want:
            raise InputError(f"field values must have shape {want}, got {vals.shape}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "warnings", tuple(self.warnings))

    def l2_norm_sq(self) -> float:
        return float(np.sum(self.values.real ** 2 + self.values.imag ** 2)) * self.grid.cell_volume

    def save(self, path):
        write_field_csv(path, self.grid, self.values, domain="frequency")

    @classmethod
    def load(cls, path) -> "FourierField":
        grid, values, domain = read_field_csv(path)
        if domain != "frequency":
            raise InputError(f"expected a frequency domain field file, got domain={domain}")
        return cls(grid, values)


def _boundary_max(values: np.ndarray) -> float:
    m = values.ndim - 1
    worst = 0.0
    for axis in range(1, m + 1):
        for idx in (0, -1):
            sl = [slice(None)] * values.ndim
            sl[axis] = idx
            worst = max(worst, float(np.abs(values[tuple(sl)]).max()))
    return worst


def fourier(field: SampledField) -> FourierField:
    """Discrete transform of a sampled field onto the dual lattice.

    The quadrature weight h^m and the phase for the grid origin are folded
    in, so values approximate the continuum transform at the returned
    frequency nodes.  A warning is recorded when the field does not decay
    at the grid boundary, since wraparound then contaminates the spectrum.
    """
    grid = field.grid
    if len(set(grid.shape)) != 1:
        raise InputError("fourier requires equal axis sizes")
    m = grid.m
    axes = tuple(range(1, m + 1))
    warnings = []
    peak = float(np.abs(field.values).max())
    if peak > 0 and _boundary_max(field.values) > 1e-6 * peak:
        warnings.append(
            "field magnitude at the grid boundary exceeds 1e-6 of its peak; "
            "periodic wraparound will contaminate the spectrum"
        )
    f_hat = sp_fft.fftn(field.values.astype(complex), axes=axes, workers=fft_workers())
    f_hat = np.fft.fftshift(f_hat, axes=axes)
    origins = []
    for j, n in enumerate(grid.shape):
        xi = 2.0 * math.pi * np.fft.fftshift(np.fft.fftfreq(n, d=grid.spacing))
        shape_b = (1,) * (j + 1) + (-1,) + (1,) * (m - 1 - j)
        f_hat = f_hat * np.exp(-1j * grid.origin[j] * xi).reshape(shape_b)
        origins.append(float(xi[0]))
    f_hat *= grid.cell_volume
    dxi = 2.0 * math.pi / (grid.shape[0] * grid.spacing)
    freq_grid = GridSpec(m, grid.shape, tuple(origins), dxi)
    return FourierField(freq_grid, f_hat, tuple(warnings))


def _tail_degree(profile, power: float) -> float:
    # integrand profile(r^2) * J(rho r) * r^power decays one half power
    # faster than the envelope because of the Bessel decay
    return 2.0 * profile.degree_at_infinity() + power - 0.5


def _hankel_quad(profile, nu: float, rho: float, power: float) -> float:
    """Integral over r > 0 of profile(r^2) * J_nu(rho r) * r^power."""
    if _tail_degree(profile, power) >= -1:
        raise IntegrabilityError(
            "radial profile decays too slowly for its Fourier integral"
        )

    def g(r):
        return float(profile.evaluate(r * r)) * special.jv(nu, rho * r) * r ** power

    cutoff = 60.0
    while cutoff < 4000.0:
        env = abs(float(profile.evaluate(cutoff * cutoff))) * cutoff ** power
        if env * cutoff < 1e-13:
            break
        cutoff *= 2.0
    total = 0.0
    edges = [0.0, 1.0, 4.0, 16.0, cutoff]
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(g, lo, hi, limit=800, epsabs=1e-13, epsrel=1e-11)
        total += val
    return total


def fourier_profile(fn: CliffordRadialFunction, rhos) -> tuple:
    """Radial frequency profiles (Ahat, V) of f = A(t) + x B(t).

    Ahat(rho) = (2 pi)^(m/2) rho^(1-m/2) * int A(r^2) J_(m/2-1)(r rho) r^(m/2) dr
    V(rho)    = -(2 pi)^(m/2) rho^(-m/2) * int B(r^2) J_(m/2)(r rho) r^(m/2+1) dr

    and the transform value is Ahat(|xi|) + i xi V(|xi|).
    """
    m = fn.m
    rhos = np.atleast_1d(np.asarray(rhos, dtype=float))
    if np.any(rhos < 0):
        raise InputError("radii must be nonnegative")
    a_prof, b_prof = fn.scalar_profile, fn.vector_profile
    out_a = np.zeros(rhos.shape)
    out_v = np.zeros(rhos.shape)
    front = (2.0 * math.pi) ** (m / 2.0)
    for i, rho in enumerate(rhos):
        if rho == 0.0:
            if not a_prof.is_zero:
                # zero frequency limit is the plain mean of the scalar part
                out_a[i] = moment(fn, 0)
            if not b_prof.is_zero:
                out_v[i] = -math.pi ** (m / 2.0) / math.gamma(m / 2.0 + 1.0) * _hankel_zero(
                    b_prof, m + 1
                )
            continue
        if not a_prof.is_zero:
            out_a[i] = front * rho ** (1.0 - m / 2.0) * _hankel_quad(
                a_prof, m / 2.0 - 1.0, rho, m / 2.0
            )
        if not b_prof.is_zero:
            out_v[i] = -front * rho ** (-m / 2.0) * _hankel_quad(
                b_prof, m / 2.0, rho, m / 2.0 + 1.0
            )
    return out_a, out_v


def _hankel_zero(profile, power: int) -> float:
    """Integral over r > 0 of profile(r^2) r^power, the rho -> 0 limit."""
    if 2.0 * profile.degree_at_infinity() + power >= -1:
        raise IntegrabilityError("radial profile decays too slowly at zero frequency")

    def g(r):
        return float(profile.evaluate(r * r)) * r ** power

    head, _ = integrate.quad(g, 0.0, 4.0, points=[1.0], limit=200, epsabs=1e-13, epsrel=1e-12)
    tail, _ = integrate.quad(g, 4.0, np.inf, limit=200, epsabs=1e-13, epsrel=1e-12)
    return head + tail


def spectral_energy_profile(fn: CliffordRadialFunction, rhos) -> np.ndarray:
    """|F[f]|^2 at radius rho: Ahat^2 + rho^2 V^2."""
    rhos = np.atleast_1d(np.asarray(rhos, dtype=float))
    a_hat, v = fourier_profile(fn, rhos)
    return a_hat ** 2 + rhos ** 2 * v ** 2


def admissibility_constant(fn: CliffordRadialFunction) -> float:
    """Scale-average spectral energy: integral of |F[f]|^2 / rho over rho > 0.

    This is the constant that fixes the transform's Plancherel identity
    under the convention above; the surface measure of the sphere cancels
    between the frequency volume element and the normalization.  Requires
    zero mean, otherwise the integral diverges logarithmically at rho = 0.
    """
    if not fn.scalar_profile.is_zero:
        mu = moment(fn, 0)
        scale = 1.0 + l1_norm(fn)
        if abs(mu) > 1e-8 * scale:
            raise IntegrabilityError(
                f"function has nonzero mean ({mu:.3g}); the admissibility "
                "integral diverges at zero frequency"
            )

    def g(rho):
        return float(spectral_energy_profile(fn, rho)[0]) / rho

    head, _ = integrate.quad(g, 0.0, 2.0, limit=120, epsabs=1e-11, epsrel=1e-9)
    mid, _ = integrate.quad(g, 2.0, 12.0, limit=120, epsabs=1e-11, epsrel=1e-9)
    tail, _ = integrate.quad(g, 12.0, 50.0, limit=120, epsabs=1e-11, epsrel=1e-9)
    return head + mid + tail


def admissibility_from_field(field: SampledField) -> float:
    """Grid route for the admissibility constant.

    Transforms the sampled field, then sums |F[f]|^2 / |xi|^m over the
    frequency lattice, divided by the sphere surface measure.  The origin
    node is skipped; its cell contributes O(dxi) for degree one wavelets,
    so resolve the frequency lattice accordingly.
    """
    m = field.grid.m
    ff = fourier(field)
    sq = np.sum(ff.values.real ** 2 + ff.values.imag ** 2, axis=0)
    rho2 = np.sum(ff.grid.coords() ** 2, axis=0)
    mask = rho2 > 0.0
    contrib = np.zeros_like(sq)
    contrib[mask] = sq[mask] / rho2[mask] ** (m / 2.0)
    return float(np.sum(contrib)) * ff.grid.cell_volume / sigma_sphere(m)


def admissibility_alt_normalization(a_psi: float, m: int) -> float:
    """The same constant under the unitary-measure bookkeeping.

    Reports (2 pi)^m sigma_(m-1) A_psi, the number produced when the
    frequency measure keeps its (2 pi)^m and the spherical average is not
    divided out.
    """
    return (2.0 * math.pi) ** m * sigma_sphere(m) * float(a_psi)
