"""Farey triangles, Stern-Brocot navigation, and charge arithmetic.

Every mediant triple of unimodular neighbours is a Farey triangle; the
integer parallelogram spanned by the outer charges is empty; and the classes
built from even convergents of an irrational slope form the degree/rank
sequence whose slopes climb toward it.
"""

from fractions import Fraction

from fareyflow.contfrac import cf_expand
from fareyflow.farey import (FareyTriangle, enumerate_triangles, mediant,
                             stern_brocot_path)
from fareyflow.stability import (WellApproxParams, build_sequence, charge_combine,
                                 lattice_interior_count, select_subsequence, slope)
from fareyflow.surd import QuadraticSurd

moves, tris = stern_brocot_path(Fraction(8, 13))
print("walk to 8/13:", moves)
for t in tris:
    print("   ", t)

print("\ntriangles with denominators <= 8:")
for t in enumerate_triangles(8):
    empty = lattice_interior_count((-t.left.p, t.left.q), (-t.right.p, t.right.q))
    print(f"    {t}   interior lattice points: {empty}")

tri = FareyTriangle.make((0, 1), (1, 2), (1, 1))
print("\ncombinations m*left + n*right on", tri)
for m, n in [(1, 0), (1, 1), (2, 3), (3, 5)]:
    c = charge_combine(tri, m, n)
    print(f"    m={m} n={n}: (deg, rk) = ({c.deg}, {c.rk}), slope {slope(c)}")

golden = cf_expand(QuadraticSurd(1, 1, 5, 2), 10)
print("\neven-convergent classes for the golden slope:")
print("   ", [(k.deg, k.rk) for k in build_sequence(golden, 6)])

rep = select_subsequence(golden, WellApproxParams(1), 8)
print("\nwell-approximation products L q^2 |theta - p/q| at L = 1:")
for e in rep.entries:
    print(f"    i={e.i}: {e.p}/{e.q}  product = {e.product_float:.9f}  pass = {e.passes}")
print("    (decreasing toward 1/sqrt5 = 0.447213595...)")
