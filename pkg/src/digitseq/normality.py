"""Block statistics, subword complexity and the square-correlation sum.

Whether a sequence over {0, ..., m'-1} looks normal is measured two ways:
directly, by sliding-window block frequencies against the uniform target
(m')^-k, and through the exponential sum

    S0(N) = sum_{n < N} e( sum_l alpha_l b((n+l)^2) ),

whose growth exponent separates structured from pseudo-random behaviour.
All S0 phases are accumulated as exact integers modulo m' and only turned
into complex numbers once, so repeated runs and partitioned runs agree
bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .budget import check as budget_check
from .digital import DigitalFunction, eval_b_many


@dataclass(frozen=True)
class AlphaVector:
    """Phase coefficients alpha_l = numerators[l] / m_prime."""

    numerators: tuple
    m_prime: int

    def __post_init__(self):
        object.__setattr__(self, "numerators",
                           tuple(int(v) for v in self.numerators))
        if self.m_prime < 1:
            raise ValueError("m_prime must be >= 1")
        if len(self.numerators) < 1:
            raise ValueError("need at least one coefficient")
        if any(not 0 <= v < self.m_prime for v in self.numerators):
            raise ValueError("numerators must lie in [0, m_prime)")

    @property
    def k(self) -> int:
        return len(self.numerators)

    @property
    def K_num(self) -> int:
        """Numerator of K = sum alpha_l modulo m'; K is integral iff 0."""
        return sum(self.numerators) % self.m_prime

    @property
    def is_integer_K(self) -> bool:
        return self.K_num == 0

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.numerators)

    @classmethod
    def parse(cls, text: str, m_prime: int) -> "AlphaVector":
        return cls(tuple(int(tok) for tok in text.split(",")), m_prime)


@dataclass
class BlockHistogram:
    """Sliding-window counts of length-k blocks."""

    k: int
    counts: dict
    total: int


def _window_codes(values: np.ndarray, k: int, base: int) -> np.ndarray:
    n = values.size - k + 1
    codes = np.zeros(n, dtype=np.int64)
    for j in range(k):
        codes = codes * base + values[j:j + n]
    return codes


def block_histogram(values, k: int) -> BlockHistogram:
    """Count all length-k windows of the sequence."""
    values = np.asarray(values, dtype=np.int64)
    if k < 1:
        raise ValueError(f"block length must be >= 1, got {k}")
    if values.size < k:
        raise ValueError(f"sequence of length {values.size} has no window of length {k}")
    if values.size and values.min() < 0:
        raise ValueError("symbols must be >= 0")
    base = int(values.max()) + 1 if values.size else 1
    if base ** k >= 1 << 62:
        raise ValueError("alphabet^k too large to encode windows")
    codes = _window_codes(values, k, base)
    uniq, cnt = np.unique(codes, return_counts=True)
    counts = {}
    for code, c in zip(uniq.tolist(), cnt.tolist()):
        block = []
        for _ in range(k):
            code, r = divmod(code, base)
            block.append(r)
        counts[tuple(reversed(block))] = c
    return BlockHistogram(k=k, counts=counts, total=values.size - k + 1)


@dataclass(frozen=True)
class NormalityReport:
    k: int
    m_prime: int
    total: int
    max_deviation: float      # max over all m'^k blocks of |freq - (m')^-k|
    chi_square: float         # against the uniform model
    missing_blocks: int       # blocks with count 0 (lower bound claim only)
    expected_frequency: float

    def to_dict(self):
        return {
            "k": self.k,
            "m_prime": self.m_prime,
            "total": self.total,
            "max_deviation": self.max_deviation,
            "chi_square": self.chi_square,
            "missing_blocks": self.missing_blocks,
            "expected_frequency": self.expected_frequency,
        }


def normality_deviation(hist: BlockHistogram, m_prime: int) -> NormalityReport:
    """Compare a block histogram against the uniform target (m')^-k.

    A missing block means "not seen in this prefix"; only the deviation it
    induces is reported, no structural claim is made.
    """
    if any(max(b) >= m_prime for b in hist.counts if b):
        raise ValueError("histogram contains symbols outside [0, m_prime)")
    p = float(m_prime) ** (-hist.k)
    expected = hist.total * p
    possible = m_prime ** hist.k
    missing = possible - len(hist.counts)
    max_dev = p if missing > 0 else 0.0
    chi = missing * expected
    for c in hist.counts.values():
        max_dev = max(max_dev, abs(c / hist.total - p))
        chi += (c - expected) ** 2 / expected
    return NormalityReport(
        k=hist.k,
        m_prime=m_prime,
        total=hist.total,
        max_deviation=max_dev,
        chi_square=chi,
        missing_blocks=missing,
        expected_frequency=p,
    )


def subword_complexity(values, n_max: int) -> list:
    """Distinct-window counts p(1), ..., p(n_max) of a finite prefix.

    These are lower bounds for the complexity of the infinite sequence;
    windows are re-ranked length by length so codes never overflow.
    """
    values = np.asarray(values, dtype=np.int64)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max >= values.size:
        raise ValueError(f"need a prefix longer than n_max={n_max}")
    out = []
    ranks = np.unique(values, return_inverse=True)[1]
    nsym = int(ranks.max()) + 1
    out.append(nsym)
    prev = ranks
    for n in range(2, n_max + 1):
        L = values.size - n + 1
        codes = prev[:L] * nsym + ranks[n - 1:n - 1 + L]
        uniq, prev = np.unique(codes, return_inverse=True)
        out.append(int(uniq.size))
        nsym = int(uniq.size)
    return out


def _phase_table(f: DigitalFunction, alpha: AlphaVector, N: int) -> np.ndarray:
    """Integer phases sum_l num_l * b((n+l)^2) mod m' for n < N."""
    if alpha.m_prime != f.m_prime:
        raise ValueError("alpha and function moduli differ")
    k, mp = alpha.k, f.m_prime
    top = N + k - 1
    ns = np.arange(top, dtype=np.int64)
    if (int(top) ** 2) * f.q ** (f.m - 1) >= 1 << 62:
        raise OverflowError("(N+k-1)^2 exceeds the vectorized range")
    bsq = eval_b_many(f, ns * ns) % mp
    phases = np.zeros(N, dtype=np.int64)
    for ell, num in enumerate(alpha.numerators):
        if num:
            phases += num * bsq[ell:ell + N]
    return phases % mp


def _roots(m_prime: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(m_prime) / m_prime)


def exp_sum_S0(f: DigitalFunction, alpha: AlphaVector, N: int) -> complex:
    """S0 = sum_{n<N} e(sum_l alpha_l b((n+l)^2)), phases exact mod m'."""
    if N < 1:
        raise ValueError("N must be >= 1")
    budget_check("sum", N, "exponential sum")
    phases = _phase_table(f, alpha, N)
    counts = np.bincount(phases, minlength=f.m_prime)
    return complex(counts @ _roots(f.m_prime))


@dataclass(frozen=True)
class DecayRow:
    N: int
    value: complex
    magnitude: float
    log_ratio: float   # log|S0| / log N with |S0| floored at 1

    def to_dict(self):
        return {
            "N": self.N,
            "re": self.value.real,
            "im": self.value.imag,
            "abs": self.magnitude,
            "log_ratio": self.log_ratio,
        }


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    rows: tuple = field(repr=False)

    def to_dict(self):
        return {"slope": self.slope, "intercept": self.intercept,
                "rows": [r.to_dict() for r in self.rows]}


def decay_exponent(f: DigitalFunction, alpha: AlphaVector, N_grid) -> DecayFit:
    """Least-squares slope of log|S0| against log N over a grid.

    |S0| is floored at 1 before taking logs.  The slope is an empirical
    growth exponent for this grid only, not an estimate of any provable
    exponent.
    """
    grid = [int(N) for N in N_grid]
    if len(grid) < 2:
        raise ValueError("need at least two grid points")
    if any(b >= a for a, b in zip(grid[1:], grid)):
        raise ValueError("grid must be strictly increasing")
    if grid[0] < 1:
        raise ValueError("grid entries must be >= 1")
    top = grid[-1]
    budget_check("sum", top, "exponential sum grid")
    phases = _phase_table(f, alpha, top)
    roots = _roots(f.m_prime)
    rows = []
    for N in grid:
        counts = np.bincount(phases[:N], minlength=f.m_prime)
        val = complex(counts @ roots)
        mag = abs(val)
        rows.append(DecayRow(N=N, value=val, magnitude=mag,
                             log_ratio=math.log(max(mag, 1.0)) / math.log(N)
                             if N > 1 else 0.0))
    xs = np.log([r.N for r in rows])
    ys = np.log([max(r.magnitude, 1.0) for r in rows])
    slope, intercept = np.polyfit(xs, ys, 1)
    return DecayFit(slope=float(slope), intercept=float(intercept),
                    rows=tuple(rows))
