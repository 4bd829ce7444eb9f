"""Tour of the real Clifford algebra layer.

Generators square to -1, blades are indexed by bitmask, and every
identity below is checked numerically as it is printed.
"""

import numpy as np

import cgwave as cg

rng = np.random.default_rng(1)

print("=== signature and blades (m = 3) ===")
sig = cg.signature(3)
print(f"dimension of R_3: {sig.dim}")
print("blade names:", ", ".join(sig.blade_name(mask) or "1" for mask in range(sig.dim)))

e1, e2, e3 = (cg.basis_vector(sig, j) for j in (1, 2, 3))
print("\ne1 * e1 =", cg.format_multivector(e1 * e1))
print("e1 * e2 =", cg.format_multivector(e1 * e2))
print("e1 * e2 + e2 * e1 =", cg.format_multivector(e1 * e2 + e2 * e1))

print("\n=== vectors embed with x^2 = -|x|^2 ===")
x = cg.vector(sig, rng.standard_normal(3))
sq = x.embed() * x.embed()
print(f"|x|^2 = {x.norm() ** 2:.6f}, scalar part of x^2 = {sq.scalar_part():.6f}")

print("\n=== dot and wedge split the product ===")
y = cg.vector(sig, rng.standard_normal(3))
xy = x.embed() * y.embed()
split = cg.scalar(sig, cg.dot(x, y)) + cg.wedge(x, y)
print("x y          =", cg.format_multivector(xy))
print("dot + wedge  =", cg.format_multivector(split))
print("difference norm:", (xy - split).norm())

print("\n=== conjugation reverses products ===")
a = cg.Multivector(sig, rng.standard_normal(sig.dim))
b = cg.Multivector(sig, rng.standard_normal(sig.dim))
lhs = cg.clifford_conjugate(a * b)
rhs = cg.clifford_conjugate(b) * cg.clifford_conjugate(a)
print("||conj(ab) - conj(b) conj(a)|| =", (lhs - rhs).norm())

print("\n=== spinors rotate vectors ===")
s = cg.spinor_from_plane_angle(sig, 1, 2, np.pi / 2)
v = cg.vector(sig, [1.0, 0.0, 0.0])
rotated = cg.rotate(s, v)
print("rotating e1 by pi/2 in the (e1, e2) plane:", np.round(rotated.components, 12))
print("norm preserved:", np.isclose(rotated.norm(), v.norm()))
