"""Radial Clifford-valued functions and the Gegenbauer wavelet family.

Everything in this module lives in the two-component representation

    f(x) = A(t) + x B(t),      t = |x|^2,

where A and B are finite sums of terms c * t^k * (1-t)^p * (1+t)^q.
Because the vector x squares to -|x|^2, the factors (1 + x^2) and
(1 - x^2) in the classical weight functions become (1 - t) and (1 + t).
The representation is closed under the Dirac operator, multiplication
by x, and multiplication by radial profiles:

    D(A + x B) = (-m B - 2 t B') + x (2 A')
    x (A + x B) = (-t B) + x A

Wavelets built by repeated differentiation of an integrable weight stay
termwise regular: the derivative lowers a (1-t) exponent only when that
exponent is nonzero, so no negative powers appear as long as the
starting exponent is a nonnegative integer.  When the starting exponent
is negative the pole at the unit sphere is real, the function is not
locally square integrable, and construction is refused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import (
    CheckFailedError,
    DivergentMomentError,
    InputError,
    IntegrabilityError,
)


def _pow(base, e):
    # integer exponents must go through integer power so negative bases
    # stay meaningful and 0^negative overflows to inf instead of nan
    if float(e).is_integer():
        return np.power(base, int(e))
    return np.power(base, float(e))


@dataclass(frozen=True)
class RadialTerm:
    """One term c * t^k * (1-t)^p * (1+t)^q."""

    c: float
    k: int
    p: float
    q: float

    def __post_init__(self):
        if self.k < 0 or float(self.k) != int(self.k):
            raise InputError(f"power of t must be a nonnegative integer, got {self.k}")
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))

    def evaluate(self, t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.c * _pow(t, self.k) * _pow(1.0 - t, self.p) * _pow(1.0 + t, self.q)


@dataclass(frozen=True)
class RadialSum:
    """Sum of RadialTerms, kept normalized: like terms merged, zeros dropped."""

    terms: tuple = ()

    def __post_init__(self):
        merged = {}
        for term in self.terms:
            key = (term.k, term.p, term.q)
            merged[key] = merged.get(key, 0.0) + term.c
        kept = tuple(
            RadialTerm(c, k, p, q) for (k, p, q), c in sorted(merged.items()) if c != 0.0
        )
        object.__setattr__(self, "terms", kept)

    @classmethod
    def monomial(cls, c=1.0, k=0, p=0.0, q=0.0):
        return cls((RadialTerm(c, k, p, q),))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for term in self.terms:
            out = out + term.evaluate(t)
        return out

    def diff(self) -> "RadialSum":
        """Termwise d/dt."""
        out = []
        for term in self.terms:
            if term.k > 0:
                out.append(RadialTerm(term.c * term.k, term.k - 1, term.p, term.q))
            if term.p != 0.0:
                out.append(RadialTerm(-term.c * term.p, term.k, term.p - 1.0, term.q))
            if term.q != 0.0:
                out.append(RadialTerm(term.c * term.q, term.k, term.p, term.q - 1.0))
        return RadialSum(tuple(out))

    def __add__(self, other: "RadialSum") -> "RadialSum":
        return RadialSum(self.terms + other.terms)

    def __sub__(self, other: "RadialSum") -> "RadialSum":
        return self + (-other)

    def __neg__(self) -> "RadialSum":
        return RadialSum(tuple(RadialTerm(-t.c, t.k, t.p, t.q) for t in self.terms))

    def __mul__(self, other):
        if isinstance(other, RadialSum):
            out = [
                RadialTerm(a.c * b.c, a.k + b.k, a.p + b.p, a.q + b.q)
                for a in self.terms
                for b in other.terms
            ]
            return RadialSum(tuple(out))
        return RadialSum(tuple(RadialTerm(t.c * float(other), t.k, t.p, t.q) for t in self.terms))

    __rmul__ = __mul__

    def degree_at_infinity(self) -> float:
        """Largest power of t the sum grows like for t -> inf; -inf when zero."""
        if not self.terms:
            return -math.inf
        return max(t.k + t.p + t.q for t in self.terms)

    def min_regularity_power(self) -> float:
        """Smallest (1-t) exponent present; negative means a pole at t = 1."""
        if not self.terms:
            return math.inf
        return min(t.p for t in self.terms)

    def is_polynomial(self) -> bool:
        return all(
            t.p >= 0 and t.q >= 0 and float(t.p).is_integer() and float(t.q).is_integer()
            for t in self.terms
        )


def format_radial_sum(s: RadialSum) -> str:
    if s.is_zero:
        return "0"
    parts = []
    for term in s.terms:
        parts.append(
            "%.17g * t^%d * (1-t)^%.17g * (1+t)^%.17g" % (term.c, term.k, term.p, term.q)
        )
    return " + ".join(parts)


def parse_radial_sum(text: str) -> RadialSum:
    """Inverse of format_radial_sum; exact for %.17g output."""
    text = text.strip()
    if text == "0":
        return RadialSum()
    terms = []
    # split on the spaced joiner; a bare '+' may be part of an exponent
    for part in text.split(" + "):
        factors = part.split(" * ")
        if len(factors) != 4:
            raise InputError(f"malformed radial term: {part!r}")
        coeff = factors[0]
        heads = ("t^", "(1-t)^", "(1+t)^")
        powers = []
        for head, factor in zip(heads, factors[1:]):
            if not factor.startswith(head):
                raise InputError(f"malformed radial factor: {factor!r}")
            powers.append(factor[len(head):])
        try:
            terms.append(
                RadialTerm(float(coeff), int(powers[0]), float(powers[1]), float(powers[2]))
            )
        except ValueError as exc:
            raise InputError(f"malformed radial term: {part!r}") from exc
    return RadialSum(tuple(terms))


@dataclass(frozen=True)
class CliffordRadialFunction:
    """f(x) = A(t) + x B(t) on R^m with t = |x|^2."""

    m: int
    scalar_profile: RadialSum
    vector_profile: RadialSum

    def __post_init__(self):
        if not 1 <= self.m <= 12:
            raise InputError(f"dimension m must be in 1..12, got {self.m}")

    def evaluate(self, points):
        """Blade components at the given points.

        points has shape (m, ...); the result has shape (2**m, ...) with
        components indexed by blade mask.
        """
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 0 or pts.shape[0] != self.m:
            raise InputError(f"points must have leading axis of length m = {self.m}")
        t = (pts * pts).sum(axis=0)
        out = np.zeros((1 << self.m,) + t.shape)
        out[0] = self.scalar_profile.evaluate(t)
        if not self.vector_profile.is_zero:
            bv = self.vector_profile.evaluate(t)
            for j in range(self.m):
                out[1 << j] = pts[j] * bv
        return out

    def dirac(self) -> "CliffordRadialFunction":
        """Left Dirac derivative, sum of e_j d/dx_j."""
        a, b = self.scalar_profile, self.vector_profile
        new_a = (-float(self.m)) * b - 2.0 * (RadialSum.monomial(1.0, 1) * b.diff())
        new_b = 2.0 * a.diff()
        return CliffordRadialFunction(self.m, new_a, new_b)

    def mul_by_x(self) -> "CliffordRadialFunction":
        """Left multiplication by the vector variable x."""
        a, b = self.scalar_profile, self.vector_profile
        return CliffordRadialFunction(self.m, RadialSum.monomial(-1.0, 1) * b, a)

    def mul_radial(self, g: RadialSum) -> "CliffordRadialFunction":
        return CliffordRadialFunction(self.m, self.scalar_profile * g, self.vector_profile * g)

    def energy_density(self) -> RadialSum:
        """|f(x)|^2 as a profile in t: A^2 + t B^2."""
        a, b = self.scalar_profile, self.vector_profile
        return a * a + RadialSum.monomial(1.0, 1) * b * b

    @property
    def is_zero(self) -> bool:
        return self.scalar_profile.is_zero and self.vector_profile.is_zero

    def __add__(self, other: "CliffordRadialFunction") -> "CliffordRadialFunction":
        if self.m != other.m:
            raise InputError("dimension mismatch")
        return CliffordRadialFunction(
            self.m,
            self.scalar_profile + other.scalar_profile,
            self.vector_profile + other.vector_profile,
        )

    def __sub__(self, other: "CliffordRadialFunction") -> "CliffordRadialFunction":
        return self + (-1.0) * other

    def __mul__(self, other) -> "CliffordRadialFunction":
        return CliffordRadialFunction(
            self.m, self.scalar_profile * float(other), self.vector_profile * float(other)
        )

    __rmul__ = __mul__


def weight(m: int, alpha: float, beta: float) -> CliffordRadialFunction:
    """The scalar weight (1 + x^2)^alpha (1 - x^2)^beta = (1-t)^alpha (1+t)^beta."""
    return CliffordRadialFunction(m, RadialSum.monomial(1.0, 0, alpha, beta), RadialSum())


def _require_polynomial(z: CliffordRadialFunction, label: str) -> CliffordRadialFunction:
    if not (z.scalar_profile.is_polynomial() and z.vector_profile.is_polynomial()):
        raise CheckFailedError(f"{label} produced a non-polynomial result")
    return z


def gegenbauer_rodrigues(m: int, ell: int, alpha: float, beta: float) -> CliffordRadialFunction:
    """Gegenbauer polynomial Z_ell by the Rodrigues formula.

    Z_ell is (-1)^ell times the ell-fold Dirac derivative of the weight
    with exponents (alpha, beta), divided by the weight with exponents
    (alpha - ell, beta - ell).  The division is exact termwise, so the
    result is a genuine polynomial in x.
    """
    if ell < 0:
        raise InputError(f"degree must be nonnegative, got {ell}")
    f = weight(m, alpha, beta)
    for _ in range(ell):
        f = f.dirac()
    sign = -1.0 if ell % 2 else 1.0
    z = f.mul_radial(RadialSum.monomial(sign, 0, ell - alpha, ell - beta))
    return _require_polynomial(z, "Rodrigues formula")


def gegenbauer_recurrence(m: int, ell: int, alpha: float, beta: float) -> CliffordRadialFunction:
    """Gegenbauer polynomial Z_ell by the first order raising recurrence.

    Starting from Z_0 = 1, each step multiplies by x against a bracket
    factor and subtracts the Dirac derivative weighted by (1-t)(1+t):

        Z_(j+1) = 2[(alpha-j)(1+t) - (beta-j)(1-t)] x Z_j - (1-t)(1+t) D Z_j
    """
    if ell < 0:
        raise InputError(f"degree must be nonnegative, got {ell}")
    z = CliffordRadialFunction(m, RadialSum.monomial(1.0), RadialSum())
    for j in range(ell):
        bracket = RadialSum(
            (
                RadialTerm(2.0 * (alpha - j), 0, 0.0, 1.0),
                RadialTerm(-2.0 * (beta - j), 0, 1.0, 0.0),
            )
        )
        z = z.mul_by_x().mul_radial(bracket) - z.dirac().mul_radial(
            RadialSum.monomial(1.0, 0, 1.0, 1.0)
        )
    return _require_polynomial(z, "raising recurrence")


@dataclass(frozen=True)
class MotherWavelet:
    """A Gegenbauer wavelet: parameters plus the folded radial form."""

    m: int
    ell: int
    alpha: float
    beta: float
    fn: CliffordRadialFunction

    def evaluate(self, points):
        return self.fn.evaluate(points)


# off-band sample points for the two-route agreement check; near t = 1 the
# factored form cancels catastrophically between singular-looking terms
_CHECK_T = np.concatenate([np.linspace(0.0, 0.9, 19), np.linspace(1.1, 8.0, 24)])


@lru_cache(maxsize=None)
def mother_wavelet(m: int, ell: int, alpha: float, beta: float) -> MotherWavelet:
    """Construct the Gegenbauer wavelet of degree ell for weight (alpha, beta).

    The wavelet is (-1)^ell times the ell-fold Dirac derivative of the
    weight with lifted exponents (alpha + ell, beta + ell).  Two guards:

    * decay: alpha + beta + ell <= -(m + 2)/2, otherwise the tail
      |x|^(2(alpha+beta)+3 ell) is not square integrable;
    * regularity: alpha + ell >= 0, otherwise a negative power of (1-t)
      survives the differentiation and the wavelet blows up at the unit
      sphere |x| = 1.

    The construction is cross-checked pointwise against the factored form
    Z_ell^(alpha+ell, beta+ell) times the (alpha, beta) weight, with the
    polynomial built by the independent raising recurrence.
    """
    if not 1 <= m <= 12:
        raise InputError(f"dimension m must be in 1..12, got {m}")
    if int(ell) != ell or ell < 1:
        raise InputError(f"wavelet degree ell must be a positive integer, got {ell}")
    ell = int(ell)
    alpha = float(alpha)
    beta = float(beta)
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise InputError("weight exponents must be finite")
    if alpha + beta + ell > -(m + 2) / 2.0:
        raise IntegrabilityError(
            f"wavelet with ell={ell}, alpha={alpha}, beta={beta} decays like "
            f"|x|^{2 * (alpha + beta) + 3 * ell:g} and is not square integrable "
            f"on R^{m}; need alpha + beta + ell <= -(m + 2)/2 = {-(m + 2) / 2:g}"
        )

    f = weight(m, alpha + ell, beta + ell)
    for _ in range(ell):
        f = f.dirac()
    if ell % 2:
        f = -1.0 * f

    worst = min(
        f.scalar_profile.min_regularity_power(), f.vector_profile.min_regularity_power()
    )
    if worst < 0:
        raise IntegrabilityError(
            f"wavelet with ell={ell}, alpha={alpha}, beta={beta} has a pole of "
            f"order {-worst:g} at the unit sphere |x| = 1 and is not locally "
            f"square integrable; need alpha + ell >= 0 (got {alpha + ell:g})"
        )

    # alternating parity: D swaps pure-scalar and pure-vector, the weight
    # is pure scalar, so even ell is scalar and odd ell is vector
    pure = f.vector_profile.is_zero if ell % 2 == 0 else f.scalar_profile.is_zero
    if not pure:
        raise CheckFailedError("wavelet lost pure parity during construction")

    # the precondition above is necessary but not sufficient once ell is
    # large against m; check the decay the construction actually produced
    tail = 2 * f.energy_density().degree_at_infinity() + m - 1
    if tail >= -1:
        raise IntegrabilityError(
            f"wavelet with ell={ell}, alpha={alpha}, beta={beta} decays too "
            f"slowly at infinity (|psi|^2 r^(m-1) ~ r^{tail:g}); not square "
            f"integrable on R^{m}"
        )

    z = gegenbauer_recurrence(m, ell, alpha + ell, beta + ell)
    factored = z.mul_radial(RadialSum.monomial(1.0, 0, alpha, beta))
    pts = np.zeros((m, _CHECK_T.size))
    pts[0] = np.sqrt(_CHECK_T)
    direct_vals = f.evaluate(pts)
    factored_vals = factored.evaluate(pts)
    scale = np.abs(direct_vals).max()
    if scale == 0.0 or np.abs(direct_vals - factored_vals).max() > 1e-9 * scale:
        raise CheckFailedError(
            "differentiated and factored wavelet forms disagree; the two "
            "construction routes are inconsistent"
        )

    return MotherWavelet(m, ell, alpha, beta, f)


def sigma_sphere(m: int) -> float:
    """Surface measure of the unit sphere in R^m."""
    return 2.0 * math.pi ** (m / 2.0) / math.gamma(m / 2.0)


def _quad_radial(g) -> float:
    # split at the weight transition radius r = 1 and at 4 so the infinite
    # tail is handled by the dedicated transform in quad
    head, _ = integrate.quad(g, 0.0, 4.0, points=[1.0], limit=200, epsabs=1e-13, epsrel=1e-12)
    tail, _ = integrate.quad(g, 4.0, np.inf, limit=200, epsabs=1e-13, epsrel=1e-12)
    return head + tail


def _check_no_pole(profile: RadialSum, what: str):
    if profile.min_regularity_power() < 0:
        raise IntegrabilityError(f"{what} has a pole at |x| = 1; integral diverges")


def moment(f: CliffordRadialFunction, k: int) -> float:
    """Vector moment of order k: the integral of x^k f(x) over R^m.

    x^k is the Clifford power of the vector variable, so x^2 = -t and the
    integrand reduces by parity to a pure scalar radial integral; odd
    powers of x integrate to zero against the rotation invariant parts.
    """
    if int(k) != k or k < 0:
        raise InputError(f"moment order must be a nonnegative integer, got {k}")
    k = int(k)
    j, odd = divmod(k, 2)
    profile = f.vector_profile if odd else f.scalar_profile
    if profile.is_zero:
        return 0.0
    _check_no_pole(profile, f"moment {k} integrand")
    jj = j + 1 if odd else j
    power = 2 * jj + 2 * profile.degree_at_infinity() + f.m - 1
    if power >= -1:
        raise DivergentMomentError(
            f"moment {k} integrand grows like r^{power:g} at infinity; "
            f"integral over R^{f.m} diverges"
        )

    def g(r):
        rr = r * r
        return float((-rr) ** jj * profile.evaluate(rr)) * r ** (f.m - 1)

    return sigma_sphere(f.m) * _quad_radial(g)


@lru_cache(maxsize=None)
def l2_norm_sq(f: CliffordRadialFunction) -> float:
    """Squared L2 norm over R^m."""
    e = f.energy_density()
    if e.is_zero:
        return 0.0
    _check_no_pole(e, "squared norm integrand")
    if 2 * e.degree_at_infinity() + f.m - 1 >= -1:
        raise IntegrabilityError(
            f"|f|^2 grows like r^{2 * e.degree_at_infinity():g} at infinity; "
            f"not integrable on R^{f.m}"
        )

    def g(r):
        return float(e.evaluate(r * r)) * r ** (f.m - 1)

    return sigma_sphere(f.m) * _quad_radial(g)


@lru_cache(maxsize=None)
def l1_norm(f: CliffordRadialFunction) -> float:
    """L1 norm over R^m of the pointwise Frobenius magnitude."""
    e = f.energy_density()
    if e.is_zero:
        return 0.0
    _check_no_pole(e, "magnitude integrand")
    if e.degree_at_infinity() + f.m - 1 >= -1:
        raise IntegrabilityError(
            f"|f| decays like r^{e.degree_at_infinity():g} at infinity; "
            f"not integrable on R^{f.m}"
        )

    def g(r):
        return math.sqrt(max(float(e.evaluate(r * r)), 0.0)) * r ** (f.m - 1)

    return sigma_sphere(f.m) * _quad_radial(g)
