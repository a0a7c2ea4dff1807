"""Power-law decay of the square-correlation sum S0.

S0(N) sums the phases e(sum_l alpha_l b((n+l)^2)) over n < N.  Any
growth exponent below 1 forces every block frequency toward uniform;
here the fitted slopes sit well below 1 for every nonzero coefficient
vector, in both coefficient regimes (integer and non-integer K).
"""

import digitseq as dq
from digitseq.normality import AlphaVector

grid = [2 ** e for e in range(10, 21)]
cases = [
    ("thue-morse", (1,)),
    ("rudin-shapiro", (1, 1)),   # K = 1: averaged-decay regime
    ("rudin-shapiro", (1, 0)),   # K = 1/2: uniform-decay regime
]

for name, nums in cases:
    f = dq.preset(name)
    alpha = AlphaVector(nums, f.m_prime)
    fit = dq.decay_exponent(f, alpha, grid)
    regime = "K integer" if alpha.is_integer_K else "K non-integer"
    print(f"{name}, alpha numerators {nums} ({regime})")
    for row in fit.rows:
        print(f"  N = 2^{row.N.bit_length() - 1:<3} |S0| = {row.magnitude:>10.1f}"
              f"   log|S0|/log N = {row.log_ratio:.3f}")
    print(f"  fitted slope: {fit.slope:.4f}\n")

# The zero coefficient vector gives |S0| = N exactly: slope 1.
zero = dq.decay_exponent(dq.preset("thue-morse"), AlphaVector((0,), 2), grid)
print("zero coefficients: slope =", round(zero.slope, 6))
