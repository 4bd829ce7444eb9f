"""Real Clifford algebra R_m with anticommuting generators that square to -1.

Blades are indexed by bitmasks: bit j of the mask set means e_{j+1} is a
factor, mask 0 is the scalar unit, and the grade of a blade is the popcount
of its mask. A multivector is a dense vector of 2^m coefficients over this
basis. The product of two blades is the XOR of their masks times a sign,
so the whole algebra reduces to two (2^m, 2^m) integer tables.

Complexified elements (needed on the frequency side) are the same coefficient
vectors with complex dtype; the imaginary unit commutes with every blade.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError, NotASpinorError, SignatureMismatchError

MAX_DIM = 12

_SPINOR_TOL = 1e-12


def reorder_sign(a: int, b: int) -> int:
    """Permutation sign from sorting the concatenated factor lists of e_A e_B."""
    a >>= 1
    swaps = 0
    while a:
        swaps += (a & b).bit_count()
        a >>= 1
    return -1 if swaps & 1 else 1


def product_sign(a: int, b: int) -> int:
    """Sign of e_A e_B: reorder sign times one -1 per repeated generator."""
    s = reorder_sign(a, b)
    if (a & b).bit_count() & 1:
        s = -s
    return s


class Signature:
    """The algebra R_m and its precomputed blade tables.

    Attributes
    ----------
    m : number of generators
    dim : 2**m, number of blades
    grades : (dim,) grade of each blade mask
    mask_table : (dim, dim) blade mask of e_A e_B, i.e. A xor B
    sign_table : (dim, dim) sign of e_A e_B
    reverse_signs, conjugate_signs, involution_signs : (dim,) signs of the
        three standard (anti-)automorphisms on each blade
    blade_order : blade masks sorted by (grade, mask); the order used by the
        text form and by every file column layout
    """

    def __init__(self, m: int):
        if not 1 <= m <= MAX_DIM:
            raise InputError(f"dimension m={m} outside supported range 1..{MAX_DIM}")
        self.m = m
        self.dim = 1 << m
        masks = np.arange(self.dim)
        pc = np.array([x.bit_count() for x in range(self.dim)])
        self.grades = pc
        self.mask_table = np.bitwise_xor.outer(masks, masks)
        self.sign_table = self._build_sign_table(pc)
        g = self.grades
        self.reverse_signs = np.where((g * (g - 1) // 2) % 2, -1, 1)
        self.conjugate_signs = np.where((g * (g + 1) // 2) % 2, -1, 1)
        self.involution_signs = np.where(g % 2, -1, 1)
        self.blade_order = np.array(sorted(range(self.dim), key=lambda k: (int(pc[k]), k)))

    def _build_sign_table(self, pc: np.ndarray) -> np.ndarray:
        a = np.arange(self.dim)[:, None]
        b = np.arange(self.dim)[None, :]
        swaps = np.zeros((self.dim, self.dim), dtype=np.int64)
        sh = a >> 1
        while sh.any():
            swaps += pc[sh & b]
            sh = sh >> 1
        swaps += pc[a & b]  # each repeated generator contributes e_j^2 = -1
        return np.where(swaps % 2, -1, 1).astype(np.int8)

    def blade_name(self, mask: int) -> str:
        if mask == 0:
            return ""
        return "e" + "".join(str(j + 1) for j in range(self.m) if mask >> j & 1)

    def blade_mask_from_name(self, name: str) -> int:
        if self.m > 9:
            raise InputError("text blade names are only defined for m <= 9")
        if not name.startswith("e") or len(name) < 2:
            raise InputError(f"bad blade name {name!r}")
        mask = 0
        prev = 0
        for ch in name[1:]:
            j = int(ch)
            if not prev < j <= self.m:
                raise InputError(f"bad blade name {name!r} for m={self.m}")
            mask |= 1 << (j - 1)
            prev = j
        return mask

    def __repr__(self):
        return f"Signature(m={self.m})"

    def __eq__(self, other):
        return isinstance(other, Signature) and other.m == self.m

    def __hash__(self):
        return hash(("Signature", self.m))


@lru_cache(maxsize=None)
def signature(m: int) -> Signature:
    """Shared Signature instance for dimension m."""
    return Signature(m)


def _check_same(a: "Multivector", b: "Multivector"):
    if a.sig.m != b.sig.m:
        raise SignatureMismatchError(f"operands from R_{a.sig.m} and R_{b.sig.m}")


@dataclass(frozen=True)
class Multivector:
    """Dense element of R_m: 2^m coefficients indexed by blade mask.

    Coefficients are float64 for real elements and complex128 for
    complexified ones. Instances are immutable.
    """

    sig: Signature
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.shape != (self.sig.dim,):
            raise InputError(f"expected {self.sig.dim} coefficients, got shape {c.shape}")
        if not np.issubdtype(c.dtype, np.complexfloating):
            c = c.astype(np.float64)
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = scalar(self.sig, other)
        _check_same(self, other)
        return Multivector(self.sig, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = scalar(self.sig, other)
        _check_same(self, other)
        return Multivector(self.sig, self.coeffs - other.coeffs)

    def __neg__(self):
        return Multivector(self.sig, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return Multivector(self.sig, self.coeffs * other)
        return geometric_product(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return Multivector(self.sig, self.coeffs * other)
        return geometric_product(other, self)

    def scalar_part(self) -> float:
        return self.coeffs[0]

    def grade(self, k: int) -> "Multivector":
        out = np.where(self.sig.grades == k, self.coeffs, 0.0)
        return Multivector(self.sig, out)

    def vector_components(self) -> np.ndarray:
        return np.array([self.coeffs[1 << j] for j in range(self.sig.m)])

    def norm(self) -> float:
        """Frobenius norm: sqrt of the scalar part of (dagger x) x."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def __repr__(self):
        return f"Multivector({format_multivector(self)!r})"


def scalar(sig: Signature, c) -> Multivector:
    out = np.zeros(sig.dim, dtype=complex if isinstance(c, complex) else float)
    out[0] = c
    return Multivector(sig, out)


def blade(sig: Signature, mask: int, c=1.0) -> Multivector:
    if not 0 <= mask < sig.dim:
        raise InputError(f"blade mask {mask} outside 0..{sig.dim - 1}")
    out = np.zeros(sig.dim, dtype=complex if isinstance(c, complex) else float)
    out[mask] = c
    return Multivector(sig, out)


def basis_vector(sig: Signature, j: int) -> Multivector:
    """e_j for 1-based j."""
    if not 1 <= j <= sig.m:
        raise InputError(f"generator index {j} outside 1..{sig.m}")
    return blade(sig, 1 << (j - 1))


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    _check_same(a, b)
    sig = a.sig
    cplx = np.iscomplexobj(a.coeffs) or np.iscomplexobj(b.coeffs)
    out = np.zeros(sig.dim, dtype=complex if cplx else float)
    for mask_a in range(sig.dim):
        ca = a.coeffs[mask_a]
        if ca == 0:
            continue
        out[sig.mask_table[mask_a]] += ca * sig.sign_table[mask_a] * b.coeffs
    return Multivector(sig, out)


def product_components(sig: Signature, u: np.ndarray, v: np.ndarray,
                       conjugate_left: bool = False) -> np.ndarray:
    """Componentwise geometric product for arrays shaped (2^m, ...).

    With conjugate_left=True the left factor is Clifford-conjugated first
    (its coefficients are assumed real; complex conjugation is up to the
    caller). Accumulation order is fixed, so results are reproducible.
    """
    cplx = np.iscomplexobj(u) or np.iscomplexobj(v)
    out = np.zeros(np.broadcast_shapes(u.shape, v.shape),
                   dtype=complex if cplx else float)
    for a in range(sig.dim):
        ua = u[a]
        if conjugate_left and sig.conjugate_signs[a] < 0:
            ua = -ua
        for b in range(sig.dim):
            s = sig.sign_table[a, b]
            c = sig.mask_table[a, b]
            if s > 0:
                out[c] += ua * v[b]
            else:
                out[c] -= ua * v[b]
    return out


def reverse(a: Multivector) -> Multivector:
    """Anti-automorphism reversing factor order; +,+,-,- per grade mod 4."""
    return Multivector(a.sig, a.sig.reverse_signs * a.coeffs)


def grade_involution(a: Multivector) -> Multivector:
    return Multivector(a.sig, a.sig.involution_signs * a.coeffs)


def clifford_conjugate(a: Multivector) -> Multivector:
    """Composition of reversion and grade involution; e_A -> (-1)^{g(g+1)/2} e_A."""
    return Multivector(a.sig, a.sig.conjugate_signs * a.coeffs)


def hermitian_conjugate(a: Multivector) -> Multivector:
    """Clifford conjugation plus complex conjugation of the coefficients."""
    return Multivector(a.sig, a.sig.conjugate_signs * np.conj(a.coeffs))


@dataclass(frozen=True)
class CliffordVector:
    """Grade-1 element x_1 e_1 + ... + x_m e_m with real components."""

    sig: Signature
    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float).copy()
        if c.shape != (self.sig.m,):
            raise InputError(f"expected {self.sig.m} vector components, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "components", c)

    def embed(self) -> Multivector:
        out = np.zeros(self.sig.dim)
        for j in range(self.sig.m):
            out[1 << j] = self.components[j]
        return Multivector(self.sig, out)

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))


def vector(sig: Signature, components) -> CliffordVector:
    return CliffordVector(sig, np.asarray(components, dtype=float))


def dot(x: CliffordVector, y: CliffordVector) -> float:
    """Clifford dot product x . y = -<x, y>; equals (xy + yx)/2 as a scalar.

    Accumulated in generator order so the value matches the scalar part
    of the geometric product bitwise, not just to roundoff.
    """
    if x.sig.m != y.sig.m:
        raise SignatureMismatchError("dot of vectors from different algebras")
    total = 0.0
    for xj, yj in zip(x.components, y.components):
        total += -(float(xj) * float(yj))
    return total


def wedge(x: CliffordVector, y: CliffordVector) -> Multivector:
    """Outer product x ^ y = sum_{j<k} (x_j y_k - x_k y_j) e_jk; equals (xy - yx)/2."""
    if x.sig.m != y.sig.m:
        raise SignatureMismatchError("wedge of vectors from different algebras")
    sig = x.sig
    out = np.zeros(sig.dim)
    for j in range(sig.m):
        for k in range(j + 1, sig.m):
            out[(1 << j) | (1 << k)] = x.components[j] * y.components[k] \
                - x.components[k] * y.components[j]
    return Multivector(sig, out)


def _extract_vector(a: Multivector, tol: float = 1e-9) -> CliffordVector:
    rest = a.coeffs.copy()
    comps = np.empty(a.sig.m)
    for j in range(a.sig.m):
        comps[j] = rest[1 << j].real
        rest[1 << j] = 0.0
    if np.max(np.abs(rest)) > tol * max(1.0, np.max(np.abs(comps))):
        raise InputError("result is not a pure vector")
    return CliffordVector(a.sig, comps)


def reflect(w: CliffordVector, x: CliffordVector) -> CliffordVector:
    """Reflection of x through the hyperplane orthogonal to the unit vector w: w x w."""
    if abs(w.norm() - 1.0) > 1e-12:
        raise InputError(f"reflection axis must be a unit vector, |w| = {w.norm()!r}")
    wm = w.embed()
    return _extract_vector(wm * x.embed() * wm)


@dataclass(frozen=True)
class Spinor:
    """Even unit element s with s * reverse(s) = 1; acts on vectors by x -> s x conj(s)."""

    value: Multivector

    def __post_init__(self):
        v = self.value
        odd = v.coeffs[v.sig.grades % 2 == 1]
        if np.max(np.abs(odd), initial=0.0) > _SPINOR_TOL * max(1.0, v.norm()):
            raise NotASpinorError("spinor must be purely even")
        unit = v * reverse(v)
        defect = (unit - scalar(v.sig, 1.0)).norm()
        if defect > _SPINOR_TOL * max(1.0, v.norm() ** 2):
            raise NotASpinorError(f"s * reverse(s) != 1, defect {defect:.3e}")

    @property
    def sig(self) -> Signature:
        return self.value.sig

    def compose(self, other: "Spinor") -> "Spinor":
        return Spinor(self.value * other.value)


def spinor_from_plane_angle(sig: Signature, j: int, k: int, theta: float) -> Spinor:
    """cos(theta/2) + sin(theta/2) e_jk; rotates the (j,k) plane by theta."""
    if not (1 <= j < k <= sig.m):
        raise InputError(f"plane indices must satisfy 1 <= j < k <= {sig.m}, got ({j}, {k})")
    mask = (1 << (j - 1)) | (1 << (k - 1))
    c = np.zeros(sig.dim)
    c[0] = math.cos(theta / 2.0)
    c[mask] = math.sin(theta / 2.0)
    return Spinor(Multivector(sig, c))


def rotate(s: Spinor, x: CliffordVector) -> CliffordVector:
    """s x conj(s); on even unit s this is the rotation the spinor double-covers."""
    if s.sig.m != x.sig.m:
        raise SignatureMismatchError("spinor and vector from different algebras")
    return _extract_vector(s.value * x.embed() * clifford_conjugate(s.value))


def rotation_matrix(s: Spinor) -> np.ndarray:
    """(m, m) matrix of the rotation associated with s, column j = rotate(s, e_j)."""
    m = s.sig.m
    out = np.empty((m, m))
    for j in range(m):
        e = np.zeros(m)
        e[j] = 1.0
        out[:, j] = rotate(s, CliffordVector(s.sig, e)).components
    return out


# text form: 17 significant digits keeps the parse/print round trip exact

def format_multivector(a: Multivector) -> str:
    """All 2^m terms joined by ' + ', blades ordered by (grade, mask)."""
    parts = []
    for mask in a.sig.blade_order:
        c = a.coeffs[mask]
        if np.iscomplexobj(c):
            raise InputError("text form is defined for real multivectors only")
        name = a.sig.blade_name(int(mask))
        txt = f"{float(c):.17g}"
        parts.append(txt if not name else f"{txt}*{name}")
    return " + ".join(parts)


def parse_multivector(sig: Signature, text: str) -> Multivector:
    out = np.zeros(sig.dim)
    seen = set()
    # split on the spaced joiner only; a bare '+' may be part of an exponent
    for raw in text.split(" + "):
        term = raw.strip()
        if not term:
            raise InputError("empty term in multivector text")
        if "*" in term:
            coeff_txt, name = term.split("*", 1)
            mask = sig.blade_mask_from_name(name.strip())
        else:
            coeff_txt, mask = term, 0
        if mask in seen:
            raise InputError(f"duplicate blade in multivector text: {term!r}")
        seen.add(mask)
        out[mask] = float(coeff_txt)
    return Multivector(sig, out)
