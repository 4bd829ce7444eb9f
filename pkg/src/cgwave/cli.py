"""Command line driver for wavelets, fields, transforms, and checks.

Subcommand groups:

    wavelet build|moments|admissibility   construct and validate wavelets
    field   make|fft|norm                 generate and inspect sampled fields
    cwt     forward|inverse|verify        run the transform and its identities
    verify  donoho-stark|proposition41    concentration inequalities per region file
    sweep                                 nested-region families
    manifest check                        re-validate a run's checksums

Commands that write artifacts take --out-dir and leave a manifest.json
next to the outputs recording the configuration, its hash, and a sha256
checksum per file.  A JSON file passed as --config overrides the command
line flag for every key it names, so a persisted configuration replays
verbatim.

Exit codes: 0 success; 1 a verification check evaluated and failed;
2 invalid input or configuration (bad parameters, unreadable files,
resolution or truncation gates).  The CGWAVE_WORKERS environment
variable sets the FFT worker count and never changes output bytes.
"""

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import CheckFailedError, InputError
from .fourier import (
    admissibility_alt_normalization,
    admissibility_constant,
    admissibility_from_field,
    fourier,
)
from .grids import GridSpec, SampledField, sample
from .presets import (
    band_limited_field,
    gaussian_field,
    impulse_field,
    modulated_gaussian_field,
    wavelet_copy_field,
)
from .radial import format_radial_sum, l1_norm, l2_norm_sq, moment, mother_wavelet
from .regions import load_region_configurations, scale_coeff_region, scale_space_region
from .transform import (
    ScaleGrid,
    forward,
    nested_offset_grid,
    plancherel_check,
    read_coefficients_csv,
    reconstruct,
    write_coefficients_csv,
)
from .uncertainty import (
    check_band_corollary,
    check_donoho_stark,
    check_final_corollary,
    check_proposition_41,
    write_reports_csv,
)

__all__ = ["RunConfig", "RunManifest", "main"]

# excluded from RunConfig: callables, the config-file path itself, and
# the output location (same computation, wherever it lands)
_RESERVED_KEYS = {"func", "config", "out_dir"}


@dataclass(frozen=True)
class RunConfig:
    """The serializable settings of one command invocation."""

    command: str
    settings: tuple  # sorted (key, value) pairs

    @classmethod
    def from_args(cls, command: str, args: argparse.Namespace) -> "RunConfig":
        items = []
        for key, value in sorted(vars(args).items()):
            if key in _RESERVED_KEYS:
                continue
            if isinstance(value, tuple):
                value = list(value)
            items.append((key, value))
        return cls(command, tuple((k, _freeze(v)) for k, v in items))

    def to_dict(self) -> dict:
        return {k: _thaw(v) for k, v in self.settings}

    def canonical_json(self) -> str:
        return json.dumps({"command": self.command, "settings": self.to_dict()},
                          sort_keys=True, separators=(",", ":"))

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def _freeze(value):
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def _thaw(value):
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


@dataclass
class RunManifest:
    """Checksummed record of a run's inputs and outputs."""

    command: str
    config: dict
    config_hash: str
    version: str
    created: str
    inputs: dict
    outputs: dict
    warnings: list

    @classmethod
    def for_run(cls, config: RunConfig, inputs, outputs, warnings) -> "RunManifest":
        return cls(
            command=config.command,
            config=config.to_dict(),
            config_hash=config.hash,
            version=__version__,
            created=datetime.now(timezone.utc).isoformat(),
            inputs={str(p): _sha256(p) for p in inputs},
            outputs={os.path.basename(str(p)): _sha256(p) for p in outputs},
            warnings=list(warnings),
        )

    def write(self, out_dir) -> str:
        path = os.path.join(out_dir, "manifest.json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.__dict__, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path

    @classmethod
    def load(cls, path) -> "RunManifest":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read manifest {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"manifest {path} is not valid JSON: {exc}") from exc
        try:
            return cls(**data)
        except TypeError as exc:
            raise InputError(f"manifest {path} has unexpected structure: {exc}") from exc


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _emit_manifest(args, command: str, inputs, outputs, warnings=()):
    config = RunConfig.from_args(command, args)
    manifest = RunManifest.for_run(config, inputs, outputs, warnings)
    return manifest.write(args.out_dir)


def _ensure_out_dir(args):
    os.makedirs(args.out_dir, exist_ok=True)


def _apply_config_file(args: argparse.Namespace):
    """File values override flags, so a stored configuration wins."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config file {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"config file {args.config} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("config file must hold a JSON object of settings")
    known = vars(args)
    for key, value in data.items():
        if key in _RESERVED_KEYS or key not in known:
            raise InputError(f"config file sets unknown option {key!r}")
        if isinstance(value, list):
            value = tuple(value)
        setattr(args, key, value)


# ---------------------------------------------------------------- helpers


def _build_wavelet(args):
    return mother_wavelet(args.dim, args.ell, args.alpha, args.beta)


def _scale_grid(args) -> ScaleGrid:
    return ScaleGrid(args.a_min, args.a_max, args.scales)


def _offsets(grid: GridSpec, stride: int):
    return None if stride == 1 else nested_offset_grid(grid, stride)


def _spin_angles(count):
    if count is None:
        return None
    if count < 1:
        raise InputError("spin angle count must be at least 1")
    return tuple(2.0 * math.pi * k / count for k in range(count))


def _floats(text: str, label: str):
    try:
        return tuple(float(v) for v in text.split(",") if v != "")
    except ValueError as exc:
        raise InputError(f"{label} must be comma separated numbers, got {text!r}") from exc


def _parse_copies(text: str, m: int):
    placements = []
    for group in text.split(";"):
        vals = _floats(group, "--copies")
        if len(vals) != m + 2:
            raise InputError(
                f"each copy needs scale, {m} center coordinates, and a weight; "
                f"got {len(vals)} numbers in {group!r}")
        placements.append((vals[0], list(vals[1:-1]), vals[-1]))
    return placements


def _print_reports(reports):
    for report in reports:
        for line in report.summary_lines():
            print(line)


def _reports_exit_code(reports) -> int:
    bad = [r for r in reports if not r.vacuous and not r.holds]
    return 1 if bad else 0


# ---------------------------------------------------------------- wavelet


def _cmd_wavelet_build(args) -> int:
    w = _build_wavelet(args)
    lines = [
        f"m={w.m} ell={w.ell} alpha={w.alpha:g} beta={w.beta:g}",
        f"scalar_part: {format_radial_sum(w.fn.scalar_profile)}",
        f"vector_part: {format_radial_sum(w.fn.vector_profile)}",
        "l2_norm_sq=%.17g" % l2_norm_sq(w.fn),
        "l1_norm=%.17g" % l1_norm(w.fn),
        "validation: PASS",
    ]
    print("\n".join(lines))
    if args.out_dir:
        _ensure_out_dir(args)
        path = os.path.join(args.out_dir, "wavelet.txt")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        _emit_manifest(args, "wavelet build", [], [path])
    return 0


def _cmd_wavelet_moments(args) -> int:
    w = _build_wavelet(args)
    tol = 1e-8 * l1_norm(w.fn)
    rows = []
    failed = False
    for k in range(args.k_max + 1):
        value = moment(w.fn, k)
        expected_zero = k < w.ell
        ok = (abs(value) <= tol) if expected_zero else True
        failed |= not ok
        rows.append((k, value, expected_zero, ok))
        flag = "zero-expected" if expected_zero else "free"
        verdict = "ok" if ok else "NONZERO"
        print(f"k={k}  moment={value:.6g}  [{flag}] {verdict}")
    if args.out_dir:
        _ensure_out_dir(args)
        path = os.path.join(args.out_dir, "moments.csv")
        lines = ["k,moment,expected_zero,ok"]
        for k, value, expected_zero, ok in rows:
            lines.append("%d,%.17g,%s,%s" % (k, value,
                                             "true" if expected_zero else "false",
                                             "true" if ok else "false"))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        _emit_manifest(args, "wavelet moments", [], [path])
    return 1 if failed else 0


def _cmd_wavelet_admissibility(args) -> int:
    w = _build_wavelet(args)
    a_psi = admissibility_constant(w.fn)
    alt = admissibility_alt_normalization(a_psi, w.m)
    print("admissibility=%.17g" % a_psi)
    print("admissibility_alt=%.17g" % alt)
    grid_value = None
    if args.grid_size:
        grid = GridSpec.centered(w.m, args.grid_size, args.grid_halfwidth)
        grid_value = admissibility_from_field(sample(grid, w.fn))
        rel = abs(grid_value - a_psi) / a_psi
        print("admissibility_grid=%.17g (rel diff %.3g)" % (grid_value, rel))
    if args.out_dir:
        _ensure_out_dir(args)
        path = os.path.join(args.out_dir, "admissibility.csv")
        lines = ["quantity,value",
                 "admissibility,%.17g" % a_psi,
                 "admissibility_alt,%.17g" % alt]
        if grid_value is not None:
            lines.append("admissibility_grid,%.17g" % grid_value)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        _emit_manifest(args, "wavelet admissibility", [], [path])
    return 0


# ---------------------------------------------------------------- field


def _cmd_field_make(args) -> int:
    grid = GridSpec.centered(args.dim, args.size, args.halfwidth)
    preset = args.preset
    if preset == "gaussian":
        field = gaussian_field(grid, width=args.width)
    elif preset == "modulated-gaussian":
        if args.freq is None:
            raise InputError("preset modulated-gaussian needs --freq")
        field = modulated_gaussian_field(grid, _floats(args.freq, "--freq"),
                                         width=args.width)
    elif preset == "impulse":
        node = None if args.node is None else tuple(
            int(v) for v in _floats(args.node, "--node"))
        field = impulse_field(grid, node=node)
    elif preset == "band-limited":
        field = band_limited_field(grid, args.rho_min, args.rho_max, seed=args.seed)
    elif preset == "wavelet-copies":
        if args.copies is None:
            raise InputError("preset wavelet-copies needs --copies")
        w = _build_wavelet(args)
        field = wavelet_copy_field(grid, w.fn, _parse_copies(args.copies, grid.m))
    else:
        raise InputError(f"unknown preset {preset!r}")
    _ensure_out_dir(args)
    path = os.path.join(args.out_dir, "field.csv")
    field.save(path)
    _emit_manifest(args, "field make", [], [path])
    print(f"wrote {path} (norm {field.l2_norm():.6g}, {grid.num_nodes} nodes)")
    return 0


def _cmd_field_fft(args) -> int:
    field = SampledField.load(args.field)
    _ensure_out_dir(args)
    path = os.path.join(args.out_dir, "spectrum.csv")
    fourier(field).save(path)
    _emit_manifest(args, "field fft", [args.field], [path])
    print(f"wrote {path}")
    return 0


def _cmd_field_norm(args) -> int:
    field = SampledField.load(args.field)
    print("l2_norm=%.17g" % field.l2_norm())
    print("l2_norm_sq=%.17g" % field.l2_norm_sq())
    print(f"nodes={field.grid.num_nodes} m={field.grid.m}")
    return 0


# ---------------------------------------------------------------- cwt


def _cmd_cwt_forward(args) -> int:
    field = SampledField.load(args.field)
    wavelet = mother_wavelet(field.grid.m, args.ell, args.alpha, args.beta)
    coeffs = forward(field, wavelet, _scale_grid(args),
                     _offsets(field.grid, args.stride),
                     convention=args.convention, method=args.method,
                     spin_angles=_spin_angles(args.spin_angles),
                     min_nodes=args.min_nodes)
    warnings = []
    if args.truncation_tol is not None and coeffs.spin_angles is None:
        report = plancherel_check(field, coeffs, truncation_tol=args.truncation_tol)
        warnings.append("edge_scale_fraction=%.6g" % report.edge_scale_fraction)
        warnings.append("edge_ring_fraction=%.6g" % report.edge_ring_fraction)
    _ensure_out_dir(args)
    path = os.path.join(args.out_dir, "coefficients.csv")
    write_coefficients_csv(path, coeffs)
    _emit_manifest(args, "cwt forward", [args.field], [path], warnings)
    if coeffs.spin_angles is None:
        print(f"wrote {path} ({coeffs.scale_grid.count} scales, "
              f"energy {coeffs.energy():.6g})")
    else:
        print(f"wrote {path} ({coeffs.scale_grid.count} scales, "
              f"{len(coeffs.spin_angles)} spin angles)")
    return 0


def _cmd_cwt_inverse(args) -> int:
    coeffs = read_coefficients_csv(args.coeffs)
    field = reconstruct(coeffs, truncation_tol=args.truncation_tol)
    _ensure_out_dir(args)
    path = os.path.join(args.out_dir, "field.csv")
    field.save(path)
    _emit_manifest(args, "cwt inverse", [args.coeffs], [path])
    print(f"wrote {path} (norm {field.l2_norm():.6g})")
    return 0


def _cmd_cwt_verify(args) -> int:
    field = SampledField.load(args.field)
    wavelet = mother_wavelet(field.grid.m, args.ell, args.alpha, args.beta)
    coeffs = forward(field, wavelet, _scale_grid(args),
                     _offsets(field.grid, args.stride),
                     convention=args.convention, min_nodes=args.min_nodes)
    report = plancherel_check(field, coeffs, truncation_tol=args.truncation_tol)
    recon = reconstruct(coeffs, a_psi=report.admissibility)
    err = (recon + field * (-1.0)).l2_norm() / field.l2_norm()
    ratio_ok = abs(report.ratio - 1.0) <= args.plancherel_window
    recon_ok = err <= args.recon_tol
    print("plancherel_ratio=%.6g (window %.3g) %s"
          % (report.ratio, args.plancherel_window, "ok" if ratio_ok else "FAIL"))
    print("reconstruction_error=%.6g (tol %.3g) %s"
          % (err, args.recon_tol, "ok" if recon_ok else "FAIL"))
    print("edge_scale_fraction=%.6g edge_ring_fraction=%.6g"
          % (report.edge_scale_fraction, report.edge_ring_fraction))
    if args.out_dir:
        _ensure_out_dir(args)
        path = os.path.join(args.out_dir, "cwt_verify.csv")
        lines = [
            "metric,value,bound,ok",
            "plancherel_ratio,%.17g,%.17g,%s"
            % (report.ratio, args.plancherel_window, "true" if ratio_ok else "false"),
            "reconstruction_error,%.17g,%.17g,%s"
            % (err, args.recon_tol, "true" if recon_ok else "false"),
            "edge_scale_fraction,%.17g,,"
            % report.edge_scale_fraction,
            "edge_ring_fraction,%.17g,,"
            % report.edge_ring_fraction,
        ]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        _emit_manifest(args, "cwt verify", [args.field], [path])
    return 0 if ratio_ok and recon_ok else 1


# ---------------------------------------------------------------- verify


def _concentration_setup(args):
    field = SampledField.load(args.field)
    wavelet = mother_wavelet(field.grid.m, args.ell, args.alpha, args.beta)
    configs = load_region_configurations(args.regions)
    scales = _scale_grid(args)
    offsets = _offsets(field.grid, args.stride)
    return field, wavelet, configs, scales, offsets


def _finish_reports(args, command: str, reports) -> int:
    _print_reports(reports)
    if args.out_dir:
        _ensure_out_dir(args)
        path = os.path.join(args.out_dir, "reports.csv")
        write_reports_csv(path, reports)
        _emit_manifest(args, command, [args.field, args.regions], [path])
    return _reports_exit_code(reports)


def _cmd_verify_donoho_stark(args) -> int:
    field, wavelet, configs, scales, offsets = _concentration_setup(args)
    a_psi = admissibility_constant(wavelet.fn)
    reports = []
    for cfg in configs:
        reports.append(check_donoho_stark(
            field, wavelet, cfg.time_region, cfg.coeff_region, scales, offsets,
            convention=args.convention, a_psi=a_psi, min_nodes=args.min_nodes,
            config_name=cfg.name))
        reports.append(check_final_corollary(
            field, wavelet, cfg.time_region, cfg.coeff_region, scales, offsets,
            convention=args.convention, a_psi=a_psi, min_nodes=args.min_nodes,
            config_name=cfg.name))
    return _finish_reports(args, "verify donoho-stark", reports)


def _cmd_verify_proposition41(args) -> int:
    field, wavelet, configs, scales, offsets = _concentration_setup(args)
    reports = []
    for cfg in configs:
        reports.append(check_proposition_41(
            field, wavelet, cfg.time_region, cfg.coeff_region, scales, offsets,
            convention=args.convention, min_nodes=args.min_nodes,
            config_name=cfg.name))
        pieces = cfg.coeff_region.pieces
        if len(pieces) == 1 and cfg.coeff_region.bands:
            reports.append(check_band_corollary(
                field, wavelet, cfg.time_region, cfg.coeff_region, scales, offsets,
                convention=args.convention, min_nodes=args.min_nodes,
                config_name=cfg.name))
    return _finish_reports(args, "verify proposition41", reports)


def _cmd_sweep(args) -> int:
    field, wavelet, configs, scales, offsets = _concentration_setup(args)
    factors = _floats(args.factors, "--factors")
    if not factors:
        raise InputError("--factors lists no values")
    a_psi = admissibility_constant(wavelet.fn)
    reports = []
    for cfg in configs:
        for factor in factors:
            if args.nest == "T":
                time_region = scale_space_region(cfg.time_region, factor)
                coeff_region = cfg.coeff_region
            else:
                time_region = cfg.time_region
                coeff_region = scale_coeff_region(cfg.coeff_region, factor)
            reports.append(check_final_corollary(
                field, wavelet, time_region, coeff_region, scales, offsets,
                convention=args.convention, a_psi=a_psi, min_nodes=args.min_nodes,
                config_name=f"{cfg.name}@{factor:g}"))
    if args.out_dir:
        _ensure_out_dir(args)
        path = os.path.join(args.out_dir, "sweep.csv")
        write_reports_csv(path, reports)
        _emit_manifest(args, "sweep", [args.field, args.regions], [path])
    _print_reports(reports)
    return _reports_exit_code(reports)


# ---------------------------------------------------------------- manifest


def _cmd_manifest_check(args) -> int:
    manifest = RunManifest.load(os.path.join(args.dir, "manifest.json"))
    bad = 0
    for name, want in sorted(manifest.outputs.items()):
        path = os.path.join(args.dir, name)
        if not os.path.exists(path):
            print(f"output missing: {name}")
            bad += 1
            continue
        got = _sha256(path)
        if got != want:
            print(f"output checksum mismatch: {name}")
            bad += 1
        else:
            print(f"output ok: {name}")
    for path, want in sorted(manifest.inputs.items()):
        if not os.path.exists(path):
            print(f"input missing (skipped): {path}")
            continue
        if _sha256(path) != want:
            print(f"input checksum mismatch: {path}")
            bad += 1
        else:
            print(f"input ok: {path}")
    print(f"manifest for '{manifest.command}' (config {manifest.config_hash[:12]})"
          f" -> {'FAIL' if bad else 'PASS'}")
    return 1 if bad else 0


# ---------------------------------------------------------------- parser


def _add_wavelet_params(p, with_dim: bool = True):
    if with_dim:
        p.add_argument("--dim", type=int, required=True, help="ambient dimension m")
    p.add_argument("--ell", type=int, required=True, help="wavelet degree")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)


def _add_scale_params(p):
    p.add_argument("--a-min", type=float, required=True, dest="a_min")
    p.add_argument("--a-max", type=float, required=True, dest="a_max")
    p.add_argument("--scales", type=int, required=True, help="ladder rung count")
    p.add_argument("--stride", type=int, default=1,
                   help="translation lattice stride (1 = every node)")
    p.add_argument("--min-nodes", type=int, default=8, dest="min_nodes",
                   help="resolution gate: nodes per wavelet at the smallest scale")
    p.add_argument("--convention", choices=["conjugate-left", "plain-right"],
                   default="conjugate-left")


def _add_common(p):
    p.add_argument("--config", default=None,
                   help="JSON settings file; its values override flags")
    p.add_argument("--out-dir", default=None, dest="out_dir",
                   help="directory for artifacts and manifest.json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgwave",
        description="Clifford-Gegenbauer wavelet toolbox")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="group", required=True)

    wavelet = sub.add_parser("wavelet", help="construct and validate wavelets")
    wsub = wavelet.add_subparsers(dest="action", required=True)
    p = wsub.add_parser("build", help="construct a wavelet and print its radial form")
    _add_wavelet_params(p)
    _add_common(p)
    p.set_defaults(func=_cmd_wavelet_build)
    p = wsub.add_parser("moments", help="moment table with expected-zero flags")
    _add_wavelet_params(p)
    p.add_argument("--k-max", type=int, default=4, dest="k_max")
    _add_common(p)
    p.set_defaults(func=_cmd_wavelet_moments)
    p = wsub.add_parser("admissibility", help="admissibility constant, both normalizations")
    _add_wavelet_params(p)
    p.add_argument("--grid-size", type=int, default=0, dest="grid_size",
                   help="when set, cross-check on an N^m lattice")
    p.add_argument("--grid-halfwidth", type=float, default=8.0, dest="grid_halfwidth")
    _add_common(p)
    p.set_defaults(func=_cmd_wavelet_admissibility)

    field = sub.add_parser("field", help="generate and inspect sampled fields")
    fsub = field.add_subparsers(dest="action", required=True)
    p = fsub.add_parser("make", help="sample a preset field")
    p.add_argument("--preset", required=True,
                   choices=["gaussian", "modulated-gaussian", "impulse",
                            "band-limited", "wavelet-copies"])
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--size", type=int, required=True, help="nodes per axis")
    p.add_argument("--halfwidth", type=float, required=True)
    p.add_argument("--width", type=float, default=1.0, help="gaussian width")
    p.add_argument("--freq", default=None, help="modulation frequency, comma separated")
    p.add_argument("--node", default=None, help="impulse node indices, comma separated")
    p.add_argument("--rho-min", type=float, default=0.5, dest="rho_min")
    p.add_argument("--rho-max", type=float, default=2.0, dest="rho_max")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--alpha", type=float, default=-2.0)
    p.add_argument("--beta", type=float, default=-6.0)
    p.add_argument("--copies", default=None,
                   help="semicolon separated a,b1,..,bm,weight groups")
    _add_common(p)
    p.set_defaults(func=_cmd_field_make)
    p = fsub.add_parser("fft", help="write the discrete spectrum")
    p.add_argument("--field", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_field_fft)
    p = fsub.add_parser("norm", help="print field norms")
    p.add_argument("--field", required=True)
    p.set_defaults(func=_cmd_field_norm, config=None)

    cwt = sub.add_parser("cwt", help="continuous wavelet transform")
    csub = cwt.add_subparsers(dest="action", required=True)
    p = csub.add_parser("forward", help="field to coefficients")
    p.add_argument("--field", required=True)
    _add_wavelet_params(p, with_dim=False)
    _add_scale_params(p)
    p.add_argument("--method", choices=["fft", "direct"], default="fft")
    p.add_argument("--spin-angles", type=int, default=None, dest="spin_angles",
                   help="resolve the transform at this many spin angles (m = 2)")
    p.add_argument("--truncation-tol", type=float, default=None, dest="truncation_tol",
                   help="edge-energy gate; also records edge diagnostics")
    _add_common(p)
    p.set_defaults(func=_cmd_cwt_forward)
    p = csub.add_parser("inverse", help="coefficients to field")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--truncation-tol", type=float, default=None, dest="truncation_tol")
    _add_common(p)
    p.set_defaults(func=_cmd_cwt_inverse)
    p = csub.add_parser("verify", help="Plancherel ratio and round-trip error")
    p.add_argument("--field", required=True)
    _add_wavelet_params(p, with_dim=False)
    _add_scale_params(p)
    p.add_argument("--truncation-tol", type=float, default=0.05, dest="truncation_tol")
    p.add_argument("--plancherel-window", type=float, default=0.05,
                   dest="plancherel_window", help="allowed |ratio - 1|")
    p.add_argument("--recon-tol", type=float, default=0.1, dest="recon_tol")
    _add_common(p)
    p.set_defaults(func=_cmd_cwt_verify)

    verify = sub.add_parser("verify", help="concentration inequalities")
    vsub = verify.add_subparsers(dest="action", required=True)
    for name, func in (("donoho-stark", _cmd_verify_donoho_stark),
                       ("proposition41", _cmd_verify_proposition41)):
        p = vsub.add_parser(name)
        p.add_argument("--field", required=True)
        _add_wavelet_params(p, with_dim=False)
        p.add_argument("--regions", required=True, help="region configuration JSON")
        _add_scale_params(p)
        _add_common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("sweep", help="final-corollary checks over nested regions")
    p.add_argument("--field", required=True)
    _add_wavelet_params(p, with_dim=False)
    p.add_argument("--regions", required=True)
    p.add_argument("--nest", choices=["T", "Omega"], required=True,
                   help="which region the factors rescale")
    p.add_argument("--factors", default="1.0,0.8,0.6,0.4,0.2",
                   help="comma separated scale factors")
    _add_scale_params(p)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    manifest = sub.add_parser("manifest", help="validate run manifests")
    msub = manifest.add_subparsers(dest="action", required=True)
    p = msub.add_parser("check", help="recompute and compare checksums")
    p.add_argument("--dir", required=True)
    p.set_defaults(func=_cmd_manifest_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        return args.func(args)
    except (InputError, CheckFailedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
