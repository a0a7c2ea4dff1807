"""Generating digital sequences along identity, progressions and squares.

A digital function adds up a fixed weight over every length-m window of
the base-q digits.  Reducing modulo m' gives classical automatic
sequences; sampling them along n^2 is where the structure dissolves.
"""

import numpy as np

import digitseq as dq

# The two headline examples: Thue-Morse (binary digit sum mod 2) and
# Rudin-Shapiro (parity of "11" blocks).
tm = dq.preset("thue-morse")
rs = dq.preset("rudin-shapiro")

print("Thue-Morse          ", dq.stream(tm, dq.IDENTITY, 0, 32))
print("Rudin-Shapiro       ", dq.stream(rs, dq.IDENTITY, 0, 32))

# The same functions along squares: t -> b(t^2) mod 2.
print("TM along squares    ", dq.stream(tm, dq.SQUARE, 0, 32))
print("RS along squares    ", dq.stream(rs, dq.SQUARE, 0, 32))

# Arithmetic progressions keep the structure (automatic sequences are
# closed under them); squares do not.
print("RS along 8t+3       ", dq.stream(rs, dq.affine(8, 3), 0, 32))

# Generalizations: decimal digit sums and longer all-ones blocks.
ds = dq.preset("digit-sum", q=10)
print("digit sum mod 10    ", dq.stream(ds, dq.IDENTITY, 0, 32))
b3 = dq.preset("block-ones", L=3)
print("'111' blocks mod 2  ", dq.stream(b3, dq.SQUARE, 0, 32))

# Custom functions come from a two-line table spec; weights may be any
# non-negative integers with weight 0 for the all-zero window.
custom = dq.parse_function_spec("q=3 m=2 mod=3\nF 0 1 0 2 0 1 0 0 1\n")
custom = dq.normalize(custom)
print("custom (q=3, m=2)   ", dq.stream(custom, dq.SQUARE, 0, 32))

# Emission is a pure function of the index: chunked reads, threaded
# reads and one-shot reads agree bit for bit.
one_shot = dq.stream(rs, dq.SQUARE, 0, 100_000)
threaded = dq.stream(rs, dq.SQUARE, 0, 100_000, chunk=8192, threads=4)
assert np.array_equal(one_shot, threaded)
print("\n100k symbols, chunked/threaded reads identical:", True)
