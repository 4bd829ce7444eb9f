"""Measurable regions for concentration estimates.

Two kinds of regions appear in the concentration checks: subsets of the
spatial domain R^m (unions of axis aligned boxes and balls) and subsets
of the scale-translation half space R_+ x R^m, which carry the measure
da dV(b)/a^(m+1).  Coefficient regions are finite boxes [a0, a1] x B or
bands [alpha, inf) x B whose measure has the closed form |B|/(m alpha^m).

Membership is decided at node centers.  A box whose faces fall on cell
edges of a sampling grid is therefore integrated exactly; balls resolve
their boundary to within half a cell.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, RegionError

__all__ = [
    "Box",
    "Ball",
    "SpaceRegion",
    "CoeffBox",
    "CoeffBand",
    "CoeffRegion",
    "RegionConfiguration",
    "region_mask",
    "coeff_region_mask",
    "load_region_configurations",
    "scale_space_region",
    "scale_coeff_region",
]


def _as_point(values, label) -> tuple:
    try:
        pt = tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise RegionError(f"{label} must be a sequence of numbers") from exc
    if not pt:
        raise RegionError(f"{label} must be nonempty")
    return pt


@dataclass(frozen=True)
class Box:
    """Axis aligned box given by opposite corners, lo < hi per axis."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", _as_point(self.lo, "box lo"))
        object.__setattr__(self, "hi", _as_point(self.hi, "box hi"))
        if len(self.lo) != len(self.hi):
            raise RegionError("box corners have different dimensions")
        if not all(l < h for l, h in zip(self.lo, self.hi)):
            raise RegionError(f"box needs lo < hi per axis, got {self.lo} .. {self.hi}")

    @property
    def m(self) -> int:
        return len(self.lo)

    def volume(self) -> float:
        return float(np.prod([h - l for l, h in zip(self.lo, self.hi)]))

    def contains(self, points: np.ndarray) -> np.ndarray:
        inside = np.ones(points.shape[1:], dtype=bool)
        for j in range(self.m):
            inside &= (points[j] >= self.lo[j]) & (points[j] <= self.hi[j])
        return inside

    def bounds(self):
        return np.array(self.lo), np.array(self.hi)


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_point(self.center, "ball center"))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise RegionError(f"ball radius must be positive, got {self.radius}")

    @property
    def m(self) -> int:
        return len(self.center)

    def volume(self) -> float:
        # exact Lebesgue volume of the m-ball
        m = self.m
        return math.pi ** (m / 2.0) / math.gamma(m / 2.0 + 1.0) * self.radius ** m

    def contains(self, points: np.ndarray) -> np.ndarray:
        c = np.asarray(self.center).reshape((self.m,) + (1,) * (points.ndim - 1))
        return np.sum((points - c) ** 2, axis=0) <= self.radius ** 2

    def bounds(self):
        c = np.array(self.center)
        return c - self.radius, c + self.radius


class SpaceRegion:
    """Union of boxes and balls in R^m; may be empty."""

    def __init__(self, pieces, m: int = None):
        pieces = tuple(pieces)
        for p in pieces:
            if not isinstance(p, (Box, Ball)):
                raise RegionError(f"unsupported region piece {type(p).__name__}")
        dims = {p.m for p in pieces}
        if len(dims) > 1:
            raise RegionError(f"region pieces disagree on dimension: {sorted(dims)}")
        if m is None:
            if not pieces:
                raise RegionError("empty region needs an explicit dimension")
            m = dims.pop()
        elif dims and dims != {m}:
            raise RegionError(f"region pieces have dimension {dims.pop()}, expected {m}")
        self.pieces = pieces
        self.m = int(m)

    def __eq__(self, other):
        return (isinstance(other, SpaceRegion)
                and self.m == other.m and self.pieces == other.pieces)

    def __repr__(self):
        return f"SpaceRegion(m={self.m}, pieces={self.pieces!r})"

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.shape[0] != self.m:
            raise InputError(f"points have dimension {points.shape[0]}, region has {self.m}")
        inside = np.zeros(points.shape[1:], dtype=bool)
        for p in self.pieces:
            inside |= p.contains(points)
        return inside

    def bounds(self):
        if self.is_empty:
            return None
        los, his = zip(*(p.bounds() for p in self.pieces))
        return np.min(los, axis=0), np.max(his, axis=0)

    def quad_nodes(self, resolution: int = 64):
        """Midpoint nodes and weights covering the union.

        One lattice spans the bounding box of all pieces, so overlapping
        pieces are not double counted.  Returns (points (m, K), weights (K,)).
        """
        if self.is_empty:
            return np.zeros((self.m, 0)), np.zeros(0)
        if resolution < 2:
            raise InputError("region quadrature needs at least 2 nodes per axis")
        lo, hi = self.bounds()
        steps = (hi - lo) / resolution
        axes = [lo[j] + steps[j] * (np.arange(resolution) + 0.5) for j in range(self.m)]
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([g.ravel() for g in mesh])
        inside = self.contains(points)
        cell = float(np.prod(steps))
        return points[:, inside], np.full(int(np.count_nonzero(inside)), cell)

    def volume(self, resolution: int = 256) -> float:
        """Lebesgue volume: exact for disjoint boxes, quadrature otherwise."""
        if self.is_empty:
            return 0.0
        if all(isinstance(p, Box) for p in self.pieces) and self._boxes_disjoint():
            return float(sum(p.volume() for p in self.pieces))
        _, weights = self.quad_nodes(resolution)
        return float(np.sum(weights))

    def _boxes_disjoint(self) -> bool:
        for i, p in enumerate(self.pieces):
            for q in self.pieces[i + 1:]:
                if all(p.lo[j] < q.hi[j] and q.lo[j] < p.hi[j] for j in range(self.m)):
                    return False
        return True


@dataclass(frozen=True)
class CoeffBox:
    """Finite scale-translation box [a_lo, a_hi] x b_box."""

    a_lo: float
    a_hi: float
    b_box: Box

    def __post_init__(self):
        object.__setattr__(self, "a_lo", float(self.a_lo))
        object.__setattr__(self, "a_hi", float(self.a_hi))
        if not 0 < self.a_lo < self.a_hi:
            raise RegionError(f"need 0 < a_lo < a_hi, got [{self.a_lo}, {self.a_hi}]")
        if not isinstance(self.b_box, Box):
            raise RegionError("coefficient box needs a Box for the translation part")

    @property
    def m(self) -> int:
        return self.b_box.m

    def measure(self) -> float:
        # integral of da dV(b)/a^(m+1) over the box
        m = self.m
        return self.b_box.volume() * (self.a_lo ** -m - self.a_hi ** -m) / m

    def scale_interval(self):
        return self.a_lo, self.a_hi

    def contains_scale(self, a: np.ndarray) -> np.ndarray:
        return (a >= self.a_lo) & (a <= self.a_hi)


@dataclass(frozen=True)
class CoeffBand:
    """Band [alpha, inf) x b_box; finite measure |b_box|/(m alpha^m)."""

    alpha: float
    b_box: Box

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        if not self.alpha > 0:
            raise RegionError(f"band cutoff must be positive, got {self.alpha}")
        if not isinstance(self.b_box, Box):
            raise RegionError("band needs a Box for the translation part")

    @property
    def m(self) -> int:
        return self.b_box.m

    def measure(self) -> float:
        m = self.m
        return self.b_box.volume() / (m * self.alpha ** m)

    def scale_interval(self):
        return self.alpha, math.inf

    def contains_scale(self, a: np.ndarray) -> np.ndarray:
        return a >= self.alpha


class CoeffRegion:
    """Union of coefficient boxes and bands.

    The closed-form measure and the outer quadrature in the coupling
    constant sum over pieces, so overlapping pieces count multiply;
    membership masks take the plain union.
    """

    def __init__(self, pieces, m: int = None):
        pieces = tuple(pieces)
        for p in pieces:
            if not isinstance(p, (CoeffBox, CoeffBand)):
                raise RegionError(f"unsupported coefficient piece {type(p).__name__}")
        dims = {p.m for p in pieces}
        if len(dims) > 1:
            raise RegionError(f"coefficient pieces disagree on dimension: {sorted(dims)}")
        if m is None:
            if not pieces:
                raise RegionError("empty coefficient region needs an explicit dimension")
            m = dims.pop()
        elif dims and dims != {m}:
            raise RegionError(f"coefficient pieces have dimension {dims.pop()}, expected {m}")
        self.pieces = pieces
        self.m = int(m)

    def __eq__(self, other):
        return (isinstance(other, CoeffRegion)
                and self.m == other.m and self.pieces == other.pieces)

    def __repr__(self):
        return f"CoeffRegion(m={self.m}, pieces={self.pieces!r})"

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def bands(self):
        return tuple(p for p in self.pieces if isinstance(p, CoeffBand))

    def measure(self) -> float:
        return float(sum(p.measure() for p in self.pieces))

    def contains(self, a: np.ndarray, b_points: np.ndarray) -> np.ndarray:
        """Membership of points given as scale array a and b coordinates.

        a has any shape S, b_points has shape (m,) + S.
        """
        a = np.asarray(a, dtype=float)
        inside = np.zeros(a.shape, dtype=bool)
        for p in self.pieces:
            inside |= p.contains_scale(a) & p.b_box.contains(b_points)
        return inside


def region_mask(grid, region: SpaceRegion) -> np.ndarray:
    """Boolean node mask of a spatial region on a sampling grid."""
    if region.m != grid.m:
        raise InputError(f"region dimension {region.m} does not match grid {grid.m}")
    if region.is_empty:
        return np.zeros(grid.shape, dtype=bool)
    return region.contains(grid.coords())


def coeff_region_mask(scale_grid, offset_grid, region: CoeffRegion) -> np.ndarray:
    """Membership of the (scale ladder) x (translation lattice) nodes."""
    if region.m != offset_grid.m:
        raise InputError(
            f"region dimension {region.m} does not match lattice {offset_grid.m}")
    scales = scale_grid.scales
    b = offset_grid.coords()
    mask = np.zeros((len(scales),) + offset_grid.shape, dtype=bool)
    for p in region.pieces:
        in_b = p.b_box.contains(b)
        in_a = p.contains_scale(scales)
        mask |= in_a.reshape((-1,) + (1,) * offset_grid.m) & in_b[None]
    return mask


@dataclass(frozen=True)
class RegionConfiguration:
    name: str
    time_region: SpaceRegion
    coeff_region: CoeffRegion

    def __post_init__(self):
        if self.time_region.m != self.coeff_region.m:
            raise RegionError(
                f"configuration {self.name!r}: time region has dimension "
                f"{self.time_region.m}, coefficient region {self.coeff_region.m}")


def _space_region_from_dict(data, label) -> SpaceRegion:
    if not isinstance(data, dict):
        raise RegionError(f"{label} must be an object with boxes/balls lists")
    unknown = set(data) - {"boxes", "balls", "m"}
    if unknown:
        raise RegionError(f"{label} has unknown keys {sorted(unknown)}")
    pieces = []
    for entry in data.get("boxes", []):
        if not isinstance(entry, dict) or set(entry) != {"lo", "hi"}:
            raise RegionError(f"{label}: each box needs exactly the keys lo, hi")
        pieces.append(Box(entry["lo"], entry["hi"]))
    for entry in data.get("balls", []):
        if not isinstance(entry, dict) or set(entry) != {"center", "radius"}:
            raise RegionError(f"{label}: each ball needs exactly the keys center, radius")
        pieces.append(Ball(entry["center"], entry["radius"]))
    m = data.get("m")
    if not pieces and m is None:
        raise RegionError(f"{label}: empty region needs an explicit m")
    return SpaceRegion(pieces, m=None if m is None else int(m))


def _coeff_region_from_dict(data, label) -> CoeffRegion:
    if not isinstance(data, dict):
        raise RegionError(f"{label} must be an object with boxes/bands lists")
    unknown = set(data) - {"boxes", "bands", "m"}
    if unknown:
        raise RegionError(f"{label} has unknown keys {sorted(unknown)}")
    pieces = []
    for entry in data.get("boxes", []):
        if not isinstance(entry, dict) or set(entry) != {"a_lo", "a_hi", "b_lo", "b_hi"}:
            raise RegionError(
                f"{label}: each coefficient box needs exactly a_lo, a_hi, b_lo, b_hi")
        pieces.append(CoeffBox(entry["a_lo"], entry["a_hi"],
                               Box(entry["b_lo"], entry["b_hi"])))
    for entry in data.get("bands", []):
        if not isinstance(entry, dict) or set(entry) != {"alpha", "b_lo", "b_hi"}:
            raise RegionError(f"{label}: each band needs exactly alpha, b_lo, b_hi")
        pieces.append(CoeffBand(entry["alpha"], Box(entry["b_lo"], entry["b_hi"])))
    m = data.get("m")
    if not pieces and m is None:
        raise RegionError(f"{label}: empty region needs an explicit m")
    return CoeffRegion(pieces, m=None if m is None else int(m))


def load_region_configurations(path) -> list:
    """Parse a region description file.

    The file is JSON: {"configurations": [{"name": ..., "time_region":
    {"boxes": [...], "balls": [...]}, "coeff_region": {"boxes": [...],
    "bands": [...]}}, ...]}.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise RegionError(f"cannot read region file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise RegionError(f"region file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "configurations" not in data:
        raise RegionError("region file needs a top level 'configurations' list")
    entries = data["configurations"]
    if not isinstance(entries, list) or not entries:
        raise RegionError("region file lists no configurations")
    configs = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise RegionError(f"configuration {i} is not an object")
        unknown = set(entry) - {"name", "time_region", "coeff_region"}
        if unknown:
            raise RegionError(f"configuration {i} has unknown keys {sorted(unknown)}")
        name = entry.get("name", f"config{i}")
        if "time_region" not in entry or "coeff_region" not in entry:
            raise RegionError(f"configuration {name!r} needs time_region and coeff_region")
        configs.append(RegionConfiguration(
            str(name),
            _space_region_from_dict(entry["time_region"], f"{name}: time_region"),
            _coeff_region_from_dict(entry["coeff_region"], f"{name}: coeff_region"),
        ))
    return configs


def scale_space_region(region: SpaceRegion, factor: float) -> SpaceRegion:
    """Shrink or grow a region about the center of its bounding box."""
    if not factor > 0:
        raise InputError(f"scale factor must be positive, got {factor}")
    if region.is_empty:
        return region
    lo, hi = region.bounds()
    center = (lo + hi) / 2.0
    pieces = []
    for p in region.pieces:
        if isinstance(p, Box):
            new_lo = center + factor * (np.array(p.lo) - center)
            new_hi = center + factor * (np.array(p.hi) - center)
            pieces.append(Box(tuple(new_lo), tuple(new_hi)))
        else:
            new_c = center + factor * (np.array(p.center) - center)
            pieces.append(Ball(tuple(new_c), factor * p.radius))
    return SpaceRegion(pieces, m=region.m)


def _scale_box_about_center(box: Box, factor: float) -> Box:
    lo, hi = np.array(box.lo), np.array(box.hi)
    center = (lo + hi) / 2.0
    return Box(tuple(center + factor * (lo - center)),
               tuple(center + factor * (hi - center)))


def scale_coeff_region(region: CoeffRegion, factor: float) -> CoeffRegion:
    """Nested family of coefficient regions.

    Translation boxes scale about their centers.  Finite scale intervals
    contract in log length about their geometric midpoint; a band shrinks
    by raising its cutoff (alpha / factor), so factor < 1 always shrinks.
    """
    if not factor > 0:
        raise InputError(f"scale factor must be positive, got {factor}")
    pieces = []
    for p in region.pieces:
        b_box = _scale_box_about_center(p.b_box, factor)
        if isinstance(p, CoeffBox):
            g = math.sqrt(p.a_lo * p.a_hi)
            pieces.append(CoeffBox(g * (p.a_lo / g) ** factor,
                                   g * (p.a_hi / g) ** factor, b_box))
        else:
            pieces.append(CoeffBand(p.alpha / factor, b_box))
    return CoeffRegion(pieces, m=region.m)
