"""Parity-restricted Lagrange numbers from continued-fraction digits.

Walks through three sources: the golden ratio (even value exactly sqrt 5,
approached from below, so not attainable), sqrt 2 (even value 2 sqrt 2), and
a digit pattern with ones at odd positions and growing even-position digits,
whose even value collapses to 1 while the odd values blow up.
"""

from fractions import Fraction

from fareyflow.contfrac import ContinuedFraction, cf_expand, lagrange_estimate
from fareyflow.surd import QuadraticSurd


def show(name, cf, parity, i_max=12, tail_depth=40):
    est = lagrange_estimate(cf, parity, i_max, tail_depth)
    print(f"{name:<22} {parity:<5} terms:",
          " ".join("%.6f" % float(t) for t in est.terms[:6]), "...")
    line = f"  -> estimate {float(est.estimate):.12f}"
    if est.estimate.exact is not None:
        line += f"   (exact: {est.estimate.exact!r}, attainable: {est.attainable})"
    print(line)


golden = cf_expand(QuadraticSurd(1, 1, 5, 2), 10)
show("golden [1;(1)]", golden, "even")
show("golden [1;(1)]", golden, "odd")

root2 = cf_expand(QuadraticSurd(0, 1, 2, 1), 10)
show("sqrt2 [1;(2)]", root2, "even")

digits = [1]
k = 2
while len(digits) < 160:
    digits += [1, k]
    k += 1
skew = ContinuedFraction(1, tuple(digits[1:]), exact=False)
print("\ngrowing even digits [1;1,2,1,3,1,4,...]:")
for parity in ("even", "odd"):
    est = lagrange_estimate(skew, parity, 40, 20)
    vals = [float(t) for t in est.terms]
    print(f"  {parity:<5} t_10 = {vals[10]:.4f}  t_25 = {vals[25]:.4f}  "
          f"t_39 = {vals[39]:.4f}")
print("  even terms sink toward 1; odd terms grow without bound.")

# definition cross-check: indices whose convergents beat quality L
est = lagrange_estimate(golden, "even", 10, 40, check_L=Fraction(2))
print(f"\ngolden even indices with |theta - p/q| < 1/(2 q^2): {est.definition_indices}")
