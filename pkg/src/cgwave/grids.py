"""Uniform lattices, sampled Clifford fields, and the field CSV format.

Fields are stored components-first: an array of shape (2**m, n1, ..., nm)
whose leading axis is indexed by blade mask.  All lattices are uniform
with one spacing shared by every axis, which keeps quadrature weights a
single scalar h^m and makes the transform's lattice arithmetic exact.

The CSV layout is plain text so runs can be diffed byte for byte:
key=value header lines, one blade-name column line, then one row per
node in row-major order with %.17g cells (exact float64 round trip).
Frequency domain files carry domain=frequency and re/im column pairs.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .algebra import Multivector, Signature, signature
from .errors import InputError, PoleNodeError


@dataclass(frozen=True)
class GridSpec:
    """Uniform lattice: node i has coordinate origin + i * spacing per axis."""

    m: int
    shape: tuple
    origin: tuple
    spacing: float

    def __post_init__(self):
        if not 1 <= self.m <= 12:
            raise InputError(f"dimension m must be in 1..12, got {self.m}")
        shape = tuple(int(n) for n in self.shape)
        origin = tuple(float(x) for x in self.origin)
        if len(shape) != self.m or len(origin) != self.m:
            raise InputError("shape and origin must have one entry per axis")
        if any(n < 1 for n in shape):
            raise InputError(f"grid shape must be positive, got {shape}")
        if not self.spacing > 0:
            raise InputError(f"grid spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", float(self.spacing))

    @classmethod
    def centered(cls, m: int, n: int, halfwidth: float) -> "GridSpec":
        """Cell-centered lattice of n^m nodes covering [-halfwidth, halfwidth]^m."""
        h = 2.0 * float(halfwidth) / int(n)
        origin = -float(halfwidth) + h / 2.0
        return cls(m, (int(n),) * m, (origin,) * m, h)

    @property
    def num_nodes(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.m

    def axis_coords(self, j: int) -> np.ndarray:
        return self.origin[j] + self.spacing * np.arange(self.shape[j])

    def coords(self) -> np.ndarray:
        """Node coordinates, shape (m, n1, ..., nm)."""
        axes = [self.axis_coords(j) for j in range(self.m)]
        return np.stack(np.meshgrid(*axes, indexing="ij"))

    def flat_coords(self) -> np.ndarray:
        return self.coords().reshape(self.m, -1)


@dataclass(frozen=True)
class SampledField:
    """Real Clifford field on a lattice, components indexed by blade mask."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        want = (1 << self.grid.m,) + self.grid.shape
        if vals.shape != want:
            raise InputError(f"field values must have shape {want}, got {vals.shape}")
        object.__setattr__(self, "values", vals)

    @property
    def sig(self) -> Signature:
        return signature(self.grid.m)

    def l2_norm_sq(self) -> float:
        return float(np.sum(self.values * self.values)) * self.grid.cell_volume

    def l2_norm(self) -> float:
        return math.sqrt(self.l2_norm_sq())

    def __add__(self, other: "SampledField") -> "SampledField":
        if self.grid != other.grid:
            raise InputError("fields live on different grids")
        return SampledField(self.grid, self.values + other.values)

    def __sub__(self, other: "SampledField") -> "SampledField":
        if self.grid != other.grid:
            raise InputError("fields live on different grids")
        return SampledField(self.grid, self.values - other.values)

    def __mul__(self, scale) -> "SampledField":
        return SampledField(self.grid, self.values * float(scale))

    __rmul__ = __mul__

    def save(self, path):
        write_field_csv(path, self.grid, self.values, domain="space")

    @classmethod
    def load(cls, path) -> "SampledField":
        grid, values, domain = read_field_csv(path)
        if domain != "space":
            raise InputError(f"expected a space domain field file, got domain={domain}")
        return cls(grid, values)


def sample(grid: GridSpec, fn) -> SampledField:
    """Evaluate a radial function (or any callable on points) on the lattice.

    Raises PoleNodeError when any node evaluates non-finite, which happens
    when a profile with negative (1-t) exponents is sampled on the unit
    sphere; shifting the grid or changing the resolution moves the nodes
    off the pole.
    """
    pts = grid.coords()
    vals = fn.evaluate(pts) if hasattr(fn, "evaluate") else fn(pts)
    vals = np.asarray(vals, dtype=float)
    want = (1 << grid.m,) + grid.shape
    if vals.shape != want:
        raise InputError(f"sampled values have shape {vals.shape}, expected {want}")
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals))[0]
        node = tuple(int(i) for i in bad[1:])
        coord = tuple(float(grid.origin[j] + grid.spacing * node[j]) for j in range(grid.m))
        raise PoleNodeError(
            f"non-finite sample at node {node}, x = {coord}; the lattice "
            "hits a pole of the profile, move the grid or change resolution"
        )
    return SampledField(grid, vals)


def inner_product(f: SampledField, g: SampledField, conjugate_left: bool = True) -> Multivector:
    """Discrete L2 pairing: cell volume times the nodewise Clifford product sum.

    With conjugate_left the left factor enters through its Clifford
    conjugate, which makes the scalar part the Frobenius pairing.
    """
    if f.grid != g.grid:
        raise InputError("fields live on different grids")
    sig = f.sig
    fa = f.values.reshape(sig.dim, -1)
    gb = g.values.reshape(sig.dim, -1)
    pair = np.einsum("aN,bN->ab", fa, gb, optimize=False)
    signs = sig.sign_table.astype(float).copy()
    if conjugate_left:
        signs *= sig.conjugate_signs[:, None]
    out = np.zeros(sig.dim)
    for a in range(sig.dim):
        np.add.at(out, sig.mask_table[a], signs[a] * pair[a])
    return Multivector(sig, out * f.grid.cell_volume)


def scalar_inner_product(f: SampledField, g: SampledField) -> float:
    """Scalar part of the conjugate pairing, equal to the Frobenius pairing."""
    if f.grid != g.grid:
        raise InputError("fields live on different grids")
    return float(np.sum(f.values * g.values)) * f.grid.cell_volume


def masked_norm_sq(f: SampledField, mask: np.ndarray) -> float:
    """Energy of the field restricted to nodes where mask is true."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != f.grid.shape:
        raise InputError(f"mask shape {mask.shape} does not match grid {f.grid.shape}")
    sq = np.sum(f.values * f.values, axis=0)
    return float(np.sum(sq[mask])) * f.grid.cell_volume


def _format_cell(x: float) -> str:
    return "%.17g" % x


def _blade_names(sig: Signature):
    return [sig.blade_name(mask) for mask in sig.blade_order]


def write_field_csv(path, grid: GridSpec, values: np.ndarray, domain: str = "space"):
    """Write a field file; complex values get re/im column pairs."""
    values = np.asarray(values)
    complex_data = np.iscomplexobj(values)
    if complex_data != (domain == "frequency"):
        raise InputError("complex values require domain=frequency and vice versa")
    sig = signature(grid.m)
    lines = []
    lines.append(f"m={grid.m}")
    lines.append("shape=" + ",".join(str(n) for n in grid.shape))
    lines.append("origin=" + ",".join(_format_cell(x) for x in grid.origin))
    lines.append("spacing=" + _format_cell(grid.spacing))
    lines.append(f"components={sig.dim}")
    lines.append(f"domain={domain}")
    names = _blade_names(sig)
    if complex_data:
        header = ",".join(f"re:{n},im:{n}" for n in names)
    else:
        header = ",".join(names)
    lines.append(header)
    flat = values.reshape(sig.dim, -1)
    order = list(sig.blade_order)
    for node in range(flat.shape[1]):
        cells = []
        for mask in order:
            v = flat[mask, node]
            if complex_data:
                cells.append(_format_cell(float(v.real)))
                cells.append(_format_cell(float(v.imag)))
            else:
                cells.append(_format_cell(float(v)))
        lines.append(",".join(cells))
    with io.open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def read_field_csv(path):
    """Read a field file; returns (grid, values, domain)."""
    with io.open(path, "r", newline="") as fh:
        raw = fh.read().splitlines()
    header = {}
    idx = 0
    while idx < len(raw) and "=" in raw[idx]:
        key, _, val = raw[idx].partition("=")
        header[key.strip()] = val.strip()
        idx += 1
    for key in ("m", "shape", "origin", "spacing", "components"):
        if key not in header:
            raise InputError(f"field file missing header {key}=")
    m = int(header["m"])
    shape = tuple(int(s) for s in header["shape"].split(","))
    origin = tuple(float(s) for s in header["origin"].split(","))
    spacing = float(header["spacing"])
    domain = header.get("domain", "space")
    grid = GridSpec(m, shape, origin, spacing)
    sig = signature(m)
    if int(header["components"]) != sig.dim:
        raise InputError("component count does not match dimension")
    if idx >= len(raw):
        raise InputError("field file has no column header line")
    idx += 1  # column names are fixed by the blade order, skip
    rows = [line for line in raw[idx:] if line]
    if len(rows) != grid.num_nodes:
        raise InputError(f"expected {grid.num_nodes} data rows, found {len(rows)}")
    complex_data = domain == "frequency"
    width = 2 * sig.dim if complex_data else sig.dim
    dtype = complex if complex_data else float
    flat = np.zeros((sig.dim, grid.num_nodes), dtype=dtype)
    order = list(sig.blade_order)
    for node, line in enumerate(rows):
        cells = line.split(",")
        if len(cells) != width:
            raise InputError(f"row {node} has {len(cells)} cells, expected {width}")
        for col, mask in enumerate(order):
            if complex_data:
                flat[mask, node] = complex(float(cells[2 * col]), float(cells[2 * col + 1]))
            else:
                flat[mask, node] = float(cells[col])
    return grid, flat.reshape((sig.dim,) + shape), domain
