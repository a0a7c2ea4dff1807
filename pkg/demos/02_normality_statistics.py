"""Block frequencies and subword complexity: structure vs. squares.

Along the identity, an automatic sequence has sub-linear subword
complexity, so long blocks are mostly missing.  Along squares every
block of every length should appear with uniform frequency (m')^-k;
at N = 10^6 the empirical deviations are already at the 10^-3 scale.
"""

import digitseq as dq

N = 10 ** 6
rs = dq.preset("rudin-shapiro")

identity_vals = dq.stream(rs, dq.IDENTITY, 0, N)
square_vals = dq.stream(rs, dq.SQUARE, 0, N)

print(f"Rudin-Shapiro, N = {N}")
print(f"{'k':>3} {'dev (identity)':>16} {'dev (squares)':>16} "
      f"{'missing (id)':>13} {'missing (sq)':>13}")
for k in range(1, 13):
    rep_id = dq.normality_deviation(dq.block_histogram(identity_vals, k), 2)
    rep_sq = dq.normality_deviation(dq.block_histogram(square_vals, k), 2)
    print(f"{k:>3} {rep_id.max_deviation:>16.5f} {rep_sq.max_deviation:>16.5f} "
          f"{rep_id.missing_blocks:>13} {rep_sq.missing_blocks:>13}")

print("\nsubword complexity p(n), prefix of length", N)
p_id = dq.subword_complexity(identity_vals, 12)
p_sq = dq.subword_complexity(square_vals, 12)
print("identity:", p_id, " (linear growth)")
print("squares: ", p_sq, " (full 2^n growth)")

# The chi-square statistic against the uniform model stays near its
# degrees of freedom along squares.
for k in (4, 8):
    rep = dq.normality_deviation(dq.block_histogram(square_vals, k), 2)
    print(f"chi-square k={k}: {rep.chi_square:.1f}  (blocks: {2 ** k})")
