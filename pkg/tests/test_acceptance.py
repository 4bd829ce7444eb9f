"""Release gate: one numbered end-to-end check per advertised guarantee.

Each test exercises a full pipeline at desk scale, prints a single
ACCEPTANCE line with the measured figure, and enforces both the stated
tolerance and a runtime budget.  Run with -s to see the lines as they
appear; without it pytest shows them for failing checks only.
"""

import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

import cgwave as cg
from cgwave import (
    GridSpec,
    SampledField,
    ScaleGrid,
    admissibility_constant,
    admissibility_from_field,
    band_limited_field,
    forward,
    fourier,
    gaussian_field,
    l1_norm,
    moment,
    mother_wavelet,
    plancherel_check,
    reconstruct,
    sample,
    signature,
    spectral_energy_profile,
    wavelet_copy_field,
)
from cgwave.algebra import (
    Multivector,
    basis_vector,
    clifford_conjugate,
    dot,
    geometric_product,
    scalar,
    vector,
    wedge,
)
from cgwave.radial import CliffordRadialFunction, RadialSum, RadialTerm
from cgwave.regions import Ball, Box, CoeffBand, CoeffBox, CoeffRegion, SpaceRegion
from cgwave.uncertainty import (
    check_donoho_stark,
    check_final_corollary,
    check_proposition_41,
    epsilon_concentration,
    time_limit,
)

VECTOR_WAVELET = mother_wavelet(2, 1, -1.0, -5.0)
SCALAR_WAVELET = mother_wavelet(2, 2, -2.0, -6.0)


def _verdict(n: int, ok: bool, detail: str):
    print(f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"acceptance {n}: {detail}"


def _within(t0: float, budget: float) -> tuple:
    elapsed = time.perf_counter() - t0
    return elapsed <= budget, elapsed


def test_01_algebra_axioms():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst_assoc = worst_square = worst_conj = 0.0
    for m in (1, 2, 3, 4):
        sig = signature(m)
        for _ in range(1000):
            a = Multivector(sig, rng.standard_normal(sig.dim))
            b = Multivector(sig, rng.standard_normal(sig.dim))
            c = Multivector(sig, rng.standard_normal(sig.dim))

            i, j = rng.integers(1, m + 1, size=2)
            ei, ej = basis_vector(sig, int(i)), basis_vector(sig, int(j))
            anti = ei * ej + ej * ei
            expect = scalar(sig, -2.0 if i == j else 0.0)
            assert np.array_equal(anti.coeffs, expect.coeffs)

            lhs = geometric_product(geometric_product(a, b), c)
            rhs = geometric_product(a, geometric_product(b, c))
            ref = max(lhs.norm(), rhs.norm(), 1.0)
            worst_assoc = max(worst_assoc, (lhs - rhs).norm() / ref)

            x = vector(sig, rng.standard_normal(m))
            sq = x.embed() * x.embed()
            want = scalar(sig, -(x.norm() ** 2))
            worst_square = max(
                worst_square, (sq - want).norm() / max(x.norm() ** 2, 1.0))

            ab = geometric_product(a, b)
            flip = geometric_product(clifford_conjugate(b), clifford_conjugate(a))
            worst_conj = max(
                worst_conj, (clifford_conjugate(ab) - flip).norm() / ref)

            y = vector(sig, rng.standard_normal(m))
            split = scalar(sig, dot(x, y)) + wedge(x, y)
            assert np.array_equal((x.embed() * y.embed()).coeffs, split.coeffs)
    in_time, elapsed = _within(t0, 5.0)
    ok = worst_assoc <= 1e-12 and worst_square <= 1e-12 and worst_conj <= 1e-12 and in_time
    _verdict(1, ok,
             f"4000 cases: assoc {worst_assoc:.2e}, square {worst_square:.2e}, "
             f"conj {worst_conj:.2e} (<= 1e-12), {elapsed:.1f}s")


def _random_radial_member(m: int, rng) -> CliffordRadialFunction:
    def rand_sum():
        terms = []
        for _ in range(int(rng.integers(1, 3))):
            c = float(rng.uniform(0.3, 1.0)) * (1 if rng.random() < 0.5 else -1)
            k = int(rng.integers(0, 3))
            p = float(rng.integers(0, 3))
            q = float(rng.integers(-4, 0))
            terms.append(RadialTerm(c, k, p, q))
        return RadialSum(tuple(terms))

    return CliffordRadialFunction(m, rand_sum(), rand_sum())


def test_02_dirac_matches_finite_differences():
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    h = 1e-4
    worst = 0.0
    for member in range(10):
        m = 2 if member % 2 == 0 else 3
        sig = signature(m)
        f = _random_radial_member(m, rng)
        exact = f.dirac()
        pts = rng.uniform(-2.0, 2.0, size=(m, 200))
        fd_sum = np.zeros((sig.dim, 200))
        from cgwave.algebra import product_components

        for j in range(m):
            step = np.zeros((m, 1))
            step[j, 0] = h
            fp = f.evaluate(pts + step)
            fm = f.evaluate(pts - step)
            ej = np.zeros((sig.dim, 1))
            ej[1 << j, 0] = 1.0
            fd_sum += product_components(sig, ej, (fp - fm) / (2.0 * h))
        want = exact.evaluate(pts)
        scale = max(np.abs(want).max(), 1e-9)
        worst = max(worst, np.abs(fd_sum - want).max() / scale)
    in_time, elapsed = _within(t0, 10.0)
    ok = worst <= 1e-6 and in_time
    _verdict(2, ok,
             f"10 members x 200 points, h=1e-4: worst rel {worst:.2e} (<= 1e-6), "
             f"{elapsed:.1f}s")


def test_03_rodrigues_matches_recurrence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    worst = 0.0
    for m in (2, 3):
        for alpha, beta in ((-2.0, -6.0), (-3.0, -5.0), (2.0, 3.0)):
            pts = rng.standard_normal((m, 100)) * 1.5
            for ell in range(5):
                a = cg.gegenbauer_rodrigues(m, ell, alpha, beta)
                b = cg.gegenbauer_recurrence(m, ell, alpha, beta)
                va, vb = a.evaluate(pts), b.evaluate(pts)
                scale = max(np.abs(va).max(), 1.0)
                worst = max(worst, np.abs(va - vb).max() / scale)
    in_time, elapsed = _within(t0, 5.0)
    ok = worst <= 1e-10 and in_time
    _verdict(3, ok,
             f"m in (2,3), three (alpha,beta), ell <= 4, 100 points: "
             f"worst rel {worst:.2e} (<= 1e-10), {elapsed:.1f}s")


def test_04_vanishing_moments():
    t0 = time.perf_counter()
    worst_ratio = 0.0
    cases = [(2, 2, -2.0, -6.0), (2, 3, -2.0, -7.0),
             (3, 2, -2.0, -7.0), (3, 3, -2.0, -8.0)]
    for m, ell, alpha, beta in cases:
        w = mother_wavelet(m, ell, alpha, beta)
        bound = 1e-8 * l1_norm(w.fn)
        for k in range(ell):
            worst_ratio = max(worst_ratio, abs(moment(w.fn, k)) / bound)
        assert abs(moment(w.fn, ell)) > bound  # first surviving moment
    in_time, elapsed = _within(t0, 10.0)
    ok = worst_ratio <= 1.0 and in_time
    _verdict(4, ok,
             f"ell in (2,3), m in (2,3), all k < ell: worst |moment| at "
             f"{worst_ratio:.2e} of the 1e-8*l1 bound, {elapsed:.1f}s")


def test_05_fourier_oracles():
    t0 = time.perf_counter()
    grid = GridSpec.centered(2, 128, 8.0)
    ff = fourier(gaussian_field(grid))
    kx = ff.grid.axis_coords(0)
    ky = ff.grid.axis_coords(1)
    rho2 = kx[:, None] ** 2 + ky[None, :] ** 2
    closed = math.pi * np.exp(-rho2 / 4.0)
    nyquist = math.pi / grid.spacing
    band = rho2 <= (nyquist / 2.0) ** 2
    gauss_err = np.abs(ff.values[0] - closed)[band].max() / closed.max()

    profile_err = 0.0
    g16 = GridSpec.centered(2, 256, 16.0)
    for w in (VECTOR_WAVELET, SCALAR_WAVELET):
        fw = fourier(sample(g16, w.fn))
        energy = np.sum(fw.values.real ** 2 + fw.values.imag ** 2, axis=0)
        axis = fw.grid.axis_coords(0)
        picks = [int(np.argmin(np.abs(axis - r))) for r in np.linspace(0.5, 6.0, 10)]
        center = int(np.argmin(np.abs(fw.grid.axis_coords(1))))
        rhos = np.abs(axis[picks])
        amp_grid = np.sqrt(energy[picks, center])
        amp_quad = np.sqrt(spectral_energy_profile(w.fn, rhos))
        profile_err = max(
            profile_err, np.abs(amp_grid - amp_quad).max() / amp_quad.max())
    in_time, elapsed = _within(t0, 30.0)
    ok = gauss_err <= 1e-6 and profile_err <= 1e-3 and in_time
    _verdict(5, ok,
             f"gaussian closed form mid-band {gauss_err:.2e} (<= 1e-6); "
             f"profile vs Bessel quadrature at 10 radii {profile_err:.2e} "
             f"(<= 1e-3), {elapsed:.1f}s")


def test_06_admissibility_two_routes():
    t0 = time.perf_counter()
    grid = GridSpec.centered(2, 512, 32.0)
    worst = 0.0
    values = []
    for w in (VECTOR_WAVELET, SCALAR_WAVELET):
        a_prof = admissibility_constant(w.fn)
        a_grid = admissibility_from_field(sample(grid, w.fn))
        assert a_prof > 0 and a_grid > 0
        worst = max(worst, abs(a_grid - a_prof) / a_prof)
        values.append(a_prof)
    in_time, elapsed = _within(t0, 60.0)
    ok = worst <= 1e-2 and in_time
    _verdict(6, ok,
             f"radial vs grid route on A_psi = {values[0]:.4f}, {values[1]:.4f}: "
             f"worst rel {worst:.2e} (<= 1e-2), {elapsed:.1f}s")


def test_07_fft_matches_direct():
    t0 = time.perf_counter()
    grid = GridSpec.centered(2, 64, 8.0)
    scales = ScaleGrid(0.5, 4.0, 8)
    rng = np.random.default_rng(707)
    worst = 0.0
    for _ in range(3):
        field = SampledField(grid, rng.standard_normal((4,) + tuple(grid.shape)))
        via_fft = forward(field, SCALAR_WAVELET, scales, method="fft", min_nodes=0)
        direct = forward(field, SCALAR_WAVELET, scales, method="direct", min_nodes=0)
        ref = max(np.abs(direct.values).max(), 1e-12)
        worst = max(worst, np.abs(via_fft.values - direct.values).max() / ref)
    in_time, elapsed = _within(t0, 60.0)
    ok = worst <= 1e-6 and in_time
    _verdict(7, ok,
             f"3 random fields, 64^2 grid, 8 scales: worst rel {worst:.2e} "
             f"(<= 1e-6), {elapsed:.1f}s")


def _enveloped_band_field(grid: GridSpec, lo: float, hi: float, seed: int,
                          width: float = 3.0) -> SampledField:
    """Band-limited noise damped to sit well inside the box.

    The plain noise preset fills the whole lattice; translations near the
    boundary then lose wavelet mass past the edge and the coefficient
    energy undercounts.  A centered envelope removes that while keeping
    the spectrum inside the band up to the envelope's own bandwidth.
    """
    raw = band_limited_field(grid, lo, hi, seed=seed)
    coords = np.meshgrid(*[grid.axis_coords(j) for j in range(grid.m)], indexing="ij")
    r2 = sum(c ** 2 for c in coords)
    env = np.exp(-r2 / (2.0 * width ** 2))
    field = SampledField(grid, raw.values * env[None])
    return field * (1.0 / field.l2_norm())


def test_08_plancherel_ratio():
    t0 = time.perf_counter()
    grid = GridSpec.centered(2, 256, 8.0)
    scales = ScaleGrid(0.15, 8.0, 24)
    ratios = []
    noise = _enveloped_band_field(grid, 1.0, 3.0, seed=1)
    atoms = wavelet_copy_field(grid, SCALAR_WAVELET.fn,
                               [(1.0, [0.0, 0.0], 1.0), (1.3, [1.0, -0.5], 0.6)])
    for field in (noise, atoms):
        coeffs = forward(field, SCALAR_WAVELET, scales, min_nodes=5)
        report = plancherel_check(field, coeffs, truncation_tol=0.05)
        ratios.append(report.ratio)
    in_time, elapsed = _within(t0, 300.0)
    ok = all(0.95 <= r <= 1.05 for r in ratios) and in_time
    _verdict(8, ok,
             f"256^2 grid, 24 scales: ratios {ratios[0]:.4f}, {ratios[1]:.4f} "
             f"(in [0.95, 1.05]), {elapsed:.1f}s")


def test_09_reconstruction_error():
    t0 = time.perf_counter()
    grid = GridSpec.centered(2, 128, 8.0)
    field = _enveloped_band_field(grid, 1.0, 3.0, seed=1)
    scales = ScaleGrid(0.25, 8.0, 24)
    coeffs = forward(field, SCALAR_WAVELET, scales, min_nodes=5)
    report = plancherel_check(field, coeffs, truncation_tol=0.05)
    back = reconstruct(coeffs, a_psi=report.admissibility)
    err = (back - field).l2_norm() / field.l2_norm()
    in_time, elapsed = _within(t0, 300.0)
    ok = err <= 0.1 and in_time
    _verdict(9, ok,
             f"reference band-limited field, 128^2, 24 scales: rel L2 error "
             f"{err:.4f} (<= 0.1), {elapsed:.1f}s")


def test_10_donoho_stark_suite():
    t0 = time.perf_counter()
    g128 = GridSpec.centered(2, 128, 8.0)
    g64 = GridSpec.centered(2, 64, 8.0)
    two_atoms = wavelet_copy_field(g128, SCALAR_WAVELET.fn,
                                   [(1.0, [0.0, 0.0], 1.0), (1.3, [1.0, -0.5], 0.6)])
    one_atom = wavelet_copy_field(g128, SCALAR_WAVELET.fn, [(1.0, [0.0, 0.0], 1.0)])
    gaussian = gaussian_field(g64)

    box_t = SpaceRegion([Box([-4.0, -4.0], [4.0, 4.0])])
    ball_t = SpaceRegion([Ball([0.5, -0.25], 4.0)])
    wide_box = CoeffRegion([CoeffBox(0.2, 7.0, Box([-8.2, -8.2], [8.2, 8.2]))])
    trim_box = CoeffRegion([CoeffBox(0.24, 6.1, Box([-4.0, -4.0], [4.0, 4.0]))])
    band = CoeffRegion([CoeffBand(1.0, Box([-8.2, -8.2], [8.2, 8.2]))])
    lad22 = ScaleGrid(0.25, 6.0, 22)

    configs = [
        ("two-atoms/box/wide", two_atoms, SCALAR_WAVELET, box_t, wide_box, lad22),
        ("two-atoms/box/trim", two_atoms, SCALAR_WAVELET, box_t, trim_box, lad22),
        ("two-atoms/ball/wide", two_atoms, SCALAR_WAVELET, ball_t, wide_box, lad22),
        ("two-atoms/box/band", two_atoms, SCALAR_WAVELET, box_t, band, lad22),
        ("one-atom/ball/trim", one_atom, SCALAR_WAVELET,
         SpaceRegion([Ball([0.0, 0.0], 2.5)]), trim_box, lad22),
        ("gaussian/box/box", gaussian, VECTOR_WAVELET,
         SpaceRegion([Box([-2.0, -2.0], [2.0, 2.0])]),
         CoeffRegion([CoeffBox(0.35, 4.5, Box([-4.0, -4.0], [4.0, 4.0]))]),
         ScaleGrid(0.4, 4.0, 12)),
    ]
    summaries = []
    for name, field, wavelet, t_region, o_region, scales in configs:
        ds = check_donoho_stark(field, wavelet, t_region, o_region, scales,
                                min_nodes=5, config_name=name)
        fc = check_final_corollary(field, wavelet, t_region, o_region, scales,
                                   min_nodes=5, config_name=name)
        p41 = check_proposition_41(field, wavelet, t_region, o_region, scales,
                                   min_nodes=5, config_name=name)
        assert ds.epsilon_t + ds.epsilon_omega < 1.0, name
        assert not ds.vacuous and not fc.vacuous, name
        assert ds.holds and ds.slack >= 0.0, name
        assert fc.holds and fc.slack >= 0.0, name
        assert p41.holds and p41.slack >= 0.0, name
        summaries.append((name, ds.epsilon_t + ds.epsilon_omega))

    rng = np.random.default_rng(1010)
    g16 = GridSpec.centered(2, 16, 4.0)
    for _ in range(100):
        field = SampledField(g16, rng.standard_normal((4, 16, 16)))
        lo = rng.uniform(-4.0, 0.0, size=2)
        hi = lo + rng.uniform(0.5, 4.0, size=2)
        region = SpaceRegion([Box(lo.tolist(), hi.tolist())])
        eps = epsilon_concentration(field, region)
        assert 0.0 <= eps <= 1.0
        once = time_limit(field, region)
        twice = time_limit(once, region)
        assert np.array_equal(once.values, twice.values)

    in_time, elapsed = _within(t0, 600.0)
    eps_max = max(s for _, s in summaries)
    ok = len(summaries) >= 6 and in_time
    _verdict(10, ok,
             f"{len(summaries)} configurations, all three inequalities hold, "
             f"max eps_T+eps_Omega {eps_max:.3f} (< 1); projection and "
             f"eps-range invariants on 100 random fields, {elapsed:.1f}s")


def test_11_determinism(tmp_path):
    t0 = time.perf_counter()
    wavelet_args = ["--ell", "2", "--alpha", "-2", "--beta", "-6"]
    scale_args = ["--a-min", "0.5", "--a-max", "4.0", "--scales", "10",
                  "--min-nodes", "5"]

    def run_cli(argv, workers=None):
        env = dict(os.environ)
        if workers is not None:
            env["CGWAVE_WORKERS"] = workers
        proc = subprocess.run([sys.executable, "-m", "cgwave.cli"]
                              + [str(a) for a in argv],
                              env=env, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        return proc

    field_dir = tmp_path / "field"
    run_cli(["field", "make", "--preset", "wavelet-copies", "--dim", "2",
             "--size", "64", "--halfwidth", "8", *wavelet_args,
             "--copies", "1.0,0,0,1.0", "--out-dir", field_dir])
    field_csv = field_dir / "field.csv"

    coeff_blobs = []
    for tag, workers in (("a", "1"), ("b", "4"), ("c", "1")):
        out = tmp_path / f"fw_{tag}"
        run_cli(["cwt", "forward", "--field", field_csv, *wavelet_args,
                 *scale_args, "--out-dir", out], workers=workers)
        coeff_blobs.append((out / "coefficients.csv").read_bytes())
    coeffs_stable = coeff_blobs[0] == coeff_blobs[1] == coeff_blobs[2]

    regions = tmp_path / "regions.json"
    regions.write_text(json.dumps({"configurations": [{
        "name": "main",
        "time_region": {"boxes": [{"lo": [-4.0, -4.0], "hi": [4.0, 4.0]}]},
        "coeff_region": {"boxes": [{"a_lo": 0.4, "a_hi": 5.0,
                                    "b_lo": [-8.2, -8.2], "b_hi": [8.2, 8.2]}]},
    }]}), encoding="utf-8")
    report_blobs = []
    for tag, workers in (("a", "1"), ("b", "3")):
        out = tmp_path / f"ds_{tag}"
        run_cli(["verify", "donoho-stark", "--field", field_csv, *wavelet_args,
                 "--regions", regions, *scale_args, "--out-dir", out],
                workers=workers)
        report_blobs.append((out / "reports.csv").read_bytes())
    reports_stable = report_blobs[0] == report_blobs[1]

    in_time, elapsed = _within(t0, 300.0)
    ok = coeffs_stable and reports_stable and in_time
    _verdict(11, ok,
             f"coefficients.csv identical across repeats and worker counts "
             f"(1, 4); reports.csv identical across repeats (1, 3); "
             f"{elapsed:.1f}s")
