"""The analytic toolbox: every explicit bound, checked by computation.

Quadratic Gauss sums against sqrt(2 m gcd(a, m)), geometric series
against the inverse-sine bound, the Vaaler sandwich around an interval
indicator, the smoothed Van der Corput inequality, and carry-exception
counts for shifted squares.
"""

import numpy as np

import digitseq as dq
from digitseq import analytic as an

# Complete and incomplete quadratic Gauss sums.
g = an.gauss_sum(1, 0, 4)
print(f"G(1,0;4) = {g.value:.3f}  |G| = {g.magnitude:.6f}  "
      f"bound = {g.bound:.6f}  (equality case)")
for a, b, m in [(3, 5, 37), (12, 7, 128), (0, 1, 9)]:
    g = an.gauss_sum(a, b, m)
    print(f"G({a},{b};{m}): |G| = {g.magnitude:8.3f}  bound = {g.bound:8.3f}")
inc = an.incomplete_gauss_sum(5, 2, 701, 10 ** 6, 300)
print(f"incomplete: |S| = {inc.magnitude:.3f}  bound = {inc.bound:.3f}")

# Geometric series vs min(length, 1/|sin pi xi|).
for xi in (0.0, 0.5, 0.123):
    r = an.geometric_min_bound(xi, 0, 100)
    print(f"xi = {xi}: |sum| = {r.magnitude:8.3f}  bound = {r.bound:8.3f}")

# The Vaaler sandwich |chi - A| <= B at degree H: coefficients meet
# their caps and the pointwise inequality holds on a dense grid.
vp = an.vaaler_build(0.3, 32)
xs = np.arange(1 << 12) / (1 << 12)
a_margin, b_margin = vp.coefficient_margins()
print(f"\nVaaler alpha=0.3 H=32: worst pointwise defect = "
      f"{vp.defect(xs).max():.2e}, coefficient margins >= "
      f"{min(a_margin.min(), b_margin.min()):.2e}")

# Van der Corput smoothing applied to Rudin-Shapiro phases along squares.
phases = dq.stream(dq.preset("rudin-shapiro"), dq.SQUARE, 0, 4096)
z = np.exp(1j * np.pi * phases)
for Q, R in [(1, 1), (4, 8), (16, 4)]:
    lhs, rhs = an.van_der_corput_check(z, Q, R)
    print(f"VdC Q={Q:>2} R={R}: lhs = {lhs:12.1f}  rhs = {rhs:12.1f}")

# Carry propagation: shifting n by r almost never changes digits of n^2
# above a cutoff; the exception count tracks q^(2 nu + rho - lam).
print("\ncarry exceptions (Rudin-Shapiro), nu=16:")
f = dq.preset("rudin-shapiro")
for lam in (18, 20):
    for r in (1, 3):
        ce = an.carry_exception_count(f, 16, lam, 2, r)
        print(f"  lam={lam} r={r}: {ce.digit_exceptions:>6} exceptions, "
              f"reference {ce.expected_power:>6}, constant {ce.constant:.3f}")
