"""Strongly block-additive digital functions.

A digital function is given by a base ``q >= 2``, a window length
``m >= 1``, a weight table ``F`` over all q^m length-m digit blocks with
``F[0] == 0``, and a modulus ``m_prime``.  Its value is

    b(n) = sum over every length-m window of the base-q digits of n
           (padded with zeros on both ends) of the window's weight.

The table index encodes a window most-significant-digit first, so the
window (e_{m-1}, ..., e_0) sits at index sum e_j q^j.  Classical
instances: digit sums in base q (m = 1, F[x] = x; base 2 gives
Thue-Morse mod 2) and the Rudin-Shapiro weight counting "11" blocks
(q = 2, m = 2, F = [0, 0, 0, 1]).

A table is *normalized* when the windows hanging below digit position 0
contribute nothing, i.e. sum_{j=1}^{m-1} F[(n * q^j) mod q^m] = 0 for all
n < q^m.  ``normalize`` rewrites any table into that form without changing
b; truncated evaluations (``eval_b_window`` and friends) require it, since
for normalized tables

    b_lam(n) = sum_{j=0}^{lam-1} F[floor(n / q^j) mod q^m]

picks out exactly the windows anchored below position lam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# b must stay exact for arguments up to 2^126 so that squares of 63-bit
# indices are in range; wider inputs are rejected instead of wrapping.
MAX_ARG_BITS = 126

# int64 headroom for the vectorized evaluation paths.
_VECTOR_ARG_LIMIT = 1 << 62


class FunctionSpecError(ValueError):
    """Malformed function-spec text (carries a line number)."""


class WitnessNotFoundError(RuntimeError):
    """An exhaustive witness search came up empty.

    For inputs satisfying the gcd hypotheses this cannot happen; raising
    instead of returning a sentinel makes a hypothesis violation loud.
    """


@dataclass(frozen=True)
class DigitalFunction:
    """Base q, window length m, weight table F, output modulus m_prime."""

    q: int
    m: int
    F: tuple
    m_prime: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"base q must be >= 2, got {self.q}")
        if self.m < 1:
            raise ValueError(f"window length m must be >= 1, got {self.m}")
        if self.m_prime < 1:
            raise ValueError(f"modulus must be >= 1, got {self.m_prime}")
        size = self.q ** self.m
        if len(self.F) != size:
            raise ValueError(
                f"table length {len(self.F)} != q^m = {size}"
            )
        if self.F[0] != 0:
            raise ValueError("all-zero window must have weight 0")
        object.__setattr__(self, "F", tuple(int(v) for v in self.F))

    @property
    def table_size(self) -> int:
        return self.q ** self.m

    @property
    def is_normalized(self) -> bool:
        return _is_normalized(self)

    def __repr__(self):
        body = f"q={self.q}, m={self.m}, m_prime={self.m_prime}"
        if self.table_size <= 16:
            return f"DigitalFunction({body}, F={list(self.F)})"
        return f"DigitalFunction({body}, |F|={self.table_size})"


@dataclass(frozen=True)
class TruncationWindow:
    """Digit band [mu, lam): b_window = b_lam - b_mu."""

    mu: int
    lam: int

    def __post_init__(self):
        if not 0 <= self.mu <= self.lam:
            raise ValueError(f"need 0 <= mu <= lam, got ({self.mu}, {self.lam})")


@lru_cache(maxsize=256)
def _is_normalized(f: DigitalFunction) -> bool:
    q, m, size = f.q, f.m, f.table_size
    if m == 1:
        return True
    for n in range(size):
        if sum(f.F[(n * q ** j) % size] for j in range(1, m)) != 0:
            return False
    return True


def make_digital_function(q: int, m: int, F, m_prime: int) -> DigitalFunction:
    """Validate and build a digital function from a raw weight table.

    User-supplied tables must be non-negative; ``normalize`` may later
    introduce negative entries, which is fine internally.
    """
    f = DigitalFunction(q, m, tuple(F), m_prime)
    if any(v < 0 for v in f.F):
        raise ValueError("weight table entries must be >= 0")
    return f


def normalize(f: DigitalFunction) -> DigitalFunction:
    """Rewrite the table so sub-zero windows cancel, preserving b.

    Uses the correction G(n) = sum_{j=1}^{m-1} F[(n q^j) mod q^m] and
    returns the table F'(n) = F(n) + G(n) - G(floor(n/q)).  Entries may
    come out negative.  Idempotent on already-normalized tables.
    """
    q, m, size = f.q, f.m, f.table_size
    if m == 1:
        return f
    G = [sum(f.F[(n * q ** j) % size] for j in range(1, m)) for n in range(size)]
    newF = tuple(f.F[n] + G[n] - G[n // q] for n in range(size))
    return DigitalFunction(q, m, newF, f.m_prime)


def _check_arg(n: int) -> None:
    if n < 0:
        raise ValueError(f"argument must be >= 0, got {n}")
    if n.bit_length() > MAX_ARG_BITS:
        raise OverflowError(
            f"argument has {n.bit_length()} bits, exceeds the "
            f"{MAX_ARG_BITS}-bit evaluation contract"
        )


def eval_b(f: DigitalFunction, n: int) -> int:
    """b(n): total weight of all digit windows of n.

    Scans every window position, including those straddling the bottom of
    the expansion, so the value is table-faithful whether or not f is
    normalized.  Exact for n up to 2^126.
    """
    n = int(n)
    _check_arg(n)
    q, size = f.q, f.table_size
    # Shifting by q^(m-1) makes the j >= 0 scan cover the sub-zero windows.
    x = n * f.q ** (f.m - 1)
    total = 0
    while x:
        total += f.F[x % size]
        x //= q
    return total


def eval_b_truncated(f: DigitalFunction, n: int, lam: int) -> int:
    """b_lam(n): weight of the lam lowest window positions.

    Requires a normalized table.  b_lam is q^(lam+m-1)-periodic and the
    argument is reduced modulo that period, so negative n is accepted.
    """
    if not f.is_normalized:
        raise ValueError("truncated evaluation requires a normalized table")
    if lam < 0:
        raise ValueError(f"truncation depth must be >= 0, got {lam}")
    q, size = f.q, f.table_size
    x = int(n) % q ** (lam + f.m - 1) if lam > 0 else 0
    _check_arg(x)
    total = 0
    for _ in range(lam):
        if x == 0:
            break
        total += f.F[x % size]
        x //= q
    return total


def eval_b_window(f: DigitalFunction, n: int, w: TruncationWindow) -> int:
    """b_{mu,lam}(n) = b_lam(n) - b_mu(n), the weight of a digit band."""
    period = f.q ** (w.lam + f.m - 1)
    n = int(n) % period
    return eval_b_truncated(f, n, w.lam) - eval_b_truncated(f, n, w.mu)


def check_recursion(f: DigitalFunction, n1: int, n2: int, alpha: int,
                    lam: int):
    """Residuals of the split-at-digit-alpha recursion; both must be 0.

    Returns (b_lam(n1 q^a + n2) - b_{lam-a}(n1) - b_a(n1 q^a + n2),
             b(n1 q^a + n2) - b(n1) - b_a(n1 q^a + n2)).
    """
    if not f.is_normalized:
        raise ValueError("recursion check requires a normalized table")
    if alpha < 0 or not 0 <= n2 < f.q ** alpha:
        raise ValueError(f"need 0 <= n2 < q^alpha, got n2={n2}, alpha={alpha}")
    if lam <= alpha:
        raise ValueError(f"need lam > alpha, got lam={lam}, alpha={alpha}")
    if n1 < 0:
        raise ValueError("n1 must be >= 0")
    n = n1 * f.q ** alpha + n2
    low = eval_b_truncated(f, n, alpha)
    r_trunc = eval_b_truncated(f, n, lam) - eval_b_truncated(f, n1, lam - alpha) - low
    r_full = eval_b(f, n) - eval_b(f, n1) - low
    return r_trunc, r_full


def _prime_factors(n: int):
    ps = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            ps.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        ps.append(n)
    return ps


@dataclass(frozen=True)
class GcdConditionReport:
    """Hypothesis check for normality of the function along squares."""

    q: int
    m_prime: int
    primes: tuple
    gcd_q_minus_1_ok: bool          # gcd(q-1, m') == 1
    table_scan_ok: bool             # every p | m' misses some table weight
    b_scan_ok: bool                 # every p | m' misses some b(n), n < q^m
    naive_gcd_scan_ok: bool         # some n < q^m has gcd(m', b(n)) == 1
    per_prime_witnesses: tuple      # for each prime, (n_F, n_b) witnesses

    @property
    def hypotheses_ok(self) -> bool:
        return self.gcd_q_minus_1_ok and self.table_scan_ok

    @property
    def naive_scan_differs(self) -> bool:
        """True when the gcd-at-once scan is strictly weaker here."""
        return self.table_scan_ok and not self.naive_gcd_scan_ok

    def to_dict(self):
        return {
            "q": self.q,
            "m_prime": self.m_prime,
            "primes": list(self.primes),
            "gcd_q_minus_1_ok": self.gcd_q_minus_1_ok,
            "table_scan_ok": self.table_scan_ok,
            "b_scan_ok": self.b_scan_ok,
            "naive_gcd_scan_ok": self.naive_gcd_scan_ok,
            "naive_scan_differs": self.naive_scan_differs,
            "hypotheses_ok": self.hypotheses_ok,
        }


def check_gcd_conditions(f: DigitalFunction) -> GcdConditionReport:
    """Decide gcd(q-1, m') = 1 and gcd(m', gcd{b(n)}) = 1 by finite scans.

    The second condition is decided prime by prime: p divides every b(n)
    exactly when p divides every normalized table weight, so a scan of
    n < q^m settles it (the table is normalized internally; b is
    unchanged by that).  A naive scan for a single n with
    gcd(m', b(n)) = 1 over n < q^m can fail even when the per-prime
    conditions hold (different n may witness different primes), so that
    outcome is reported too.
    """
    if f.m_prime <= 1:
        raise ValueError("gcd conditions need m_prime > 1")
    q, size = f.q, f.table_size
    g = f if f.is_normalized else normalize(f)
    primes = _prime_factors(f.m_prime)
    bvals = [eval_b(f, n) for n in range(size)]

    witnesses = []
    table_ok = True
    b_ok = True
    for p in primes:
        n_F = next((n for n in range(size) if g.F[n] % p != 0), None)
        n_b = next((n for n in range(size) if bvals[n] % p != 0), None)
        table_ok = table_ok and n_F is not None
        b_ok = b_ok and n_b is not None
        witnesses.append((n_F, n_b))

    naive_ok = any(math.gcd(f.m_prime, bv) == 1 for bv in bvals)
    return GcdConditionReport(
        q=q,
        m_prime=f.m_prime,
        primes=tuple(primes),
        gcd_q_minus_1_ok=math.gcd(q - 1, f.m_prime) == 1,
        table_scan_ok=table_ok,
        b_scan_ok=b_ok,
        naive_gcd_scan_ok=naive_ok,
        per_prime_witnesses=tuple(witnesses),
    )


def boundary_difference(f: DigitalFunction, e: int) -> int:
    """b(q^(m-1)(e+1) - 1) - b(q^(m-1)(e+1)): the carry-boundary jump."""
    top = f.q ** (f.m - 1) * (e + 1)
    return eval_b(f, top - 1) - eval_b(f, top)


def find_difference_witness(f: DigitalFunction, alpha_num: int):
    """Smallest (e1, e2) with boundary-jump difference d, d*alpha not in Z.

    alpha = alpha_num / m_prime.  Search is lexicographic over
    e1, e2 < q^(2m-1) so results are deterministic.  Under the gcd
    hypotheses a witness always exists; exhaustion raises
    WitnessNotFoundError.
    """
    mp = f.m_prime
    if not 1 <= alpha_num <= mp - 1:
        raise ValueError(f"need 1 <= alpha_num <= m_prime-1, got {alpha_num}")
    bound = f.q ** (2 * f.m - 1)
    diffs = [boundary_difference(f, e) for e in range(bound)]
    for e1 in range(bound):
        for e2 in range(bound):
            d = diffs[e1] - diffs[e2]
            if (d * alpha_num) % mp != 0:
                return e1, e2, d
    raise WitnessNotFoundError(
        f"no boundary-difference witness below q^(2m-1)={bound}; "
        "the gcd hypotheses fail for this function"
    )


# ----------------------------------------------------------------------
# vectorized evaluation


@lru_cache(maxsize=64)
def _table_array(f: DigitalFunction):
    return np.asarray(f.F, dtype=np.int64)


@lru_cache(maxsize=64)
def _block_table(f: DigitalFunction, width: int):
    """T[y] = sum_{j < width} F[(y // q^j) mod q^m] for y < q^(width+m-1).

    Lets the window scan advance `width` digits per lookup.  Stored in
    the narrowest dtype that holds the values, which keeps the gather
    traffic low on long streams.
    """
    q, size = f.q, f.table_size
    n = q ** (width + f.m - 1)
    F = _table_array(f)
    y = np.arange(n, dtype=np.int64)
    total = np.zeros(n, dtype=np.int64)
    cur = y
    for _ in range(width):
        total += F[cur % size]
        cur = cur // q
    for dtype in (np.int16, np.int32):
        if total.size and np.iinfo(dtype).min < total.min() \
                and total.max() < np.iinfo(dtype).max:
            return total.astype(dtype)
    return total


def _block_width(f: DigitalFunction, target: int = 1 << 18) -> int:
    width = 0
    while f.q ** (width + f.m) <= target:
        width += 1
    return max(width, 1)


def eval_b_many(f: DigitalFunction, ns) -> np.ndarray:
    """Vectorized b over an int64 array; bit-identical to eval_b."""
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size == 0:
        return np.zeros(0, dtype=np.int64)
    if ns.min() < 0:
        raise ValueError("arguments must be >= 0")
    shift = f.q ** (f.m - 1)
    if int(ns.max()) * shift >= _VECTOR_ARG_LIMIT:
        raise OverflowError("arguments too wide for the vectorized path")
    width = _block_width(f)
    table = _block_table(f, width)
    size = f.q ** (width + f.m - 1)
    out = np.zeros(ns.shape, dtype=np.int64)
    cur = ns * shift
    if size & (size - 1) == 0:  # power-of-two base: shifts beat division
        mask = size - 1
        step_bits = (f.q ** width).bit_length() - 1
        while True:
            out += table[cur & mask]
            cur = cur >> step_bits
            if not cur.any():
                return out
    step = f.q ** width
    while True:
        out += table[cur % size]
        cur = cur // step
        if not cur.any():
            return out


def eval_b_band_many(f: DigitalFunction, xs, mu: int, lam: int) -> np.ndarray:
    """Vectorized b_{mu,lam} over an int64 array (normalized f only)."""
    if not f.is_normalized:
        raise ValueError("truncated evaluation requires a normalized table")
    if not 0 <= mu <= lam:
        raise ValueError(f"need 0 <= mu <= lam, got ({mu}, {lam})")
    xs = np.asarray(xs, dtype=np.int64)
    if xs.size == 0:
        return np.zeros(0, dtype=np.int64)
    q, size = f.q, f.table_size
    period = q ** (lam + f.m - 1)
    if period < _VECTOR_ARG_LIMIT:
        xs = xs % period
    elif xs.min() < 0:
        raise OverflowError("band period too wide for vectorized reduction")
    F = _table_array(f)
    out = np.zeros(xs.shape, dtype=np.int64)
    cur = xs // q ** mu if mu else xs
    for _ in range(mu, lam):
        out += F[cur % size]
        cur = cur // q
    return out


def eval_b_truncated_many(f: DigitalFunction, xs, lam: int) -> np.ndarray:
    return eval_b_band_many(f, xs, 0, lam)


# ----------------------------------------------------------------------
# function-spec text files
#
#   q=<int> m=<int> mod=<int>
#   F <v0> <v1> ... <v_{q^m-1}>


def parse_function_spec(text: str) -> DigitalFunction:
    lines = text.splitlines()
    if len(lines) < 2:
        raise FunctionSpecError("line 1: expected 'q=<int> m=<int> mod=<int>'")
    for extra, line in enumerate(lines[2:], start=3):
        if line.strip():
            raise FunctionSpecError(f"line {extra}: unexpected content {line.strip()!r}")

    head = lines[0].split()
    keys = ("q", "m", "mod")
    if len(head) != 3 or any(not tok.startswith(k + "=") for tok, k in zip(head, keys)):
        raise FunctionSpecError("line 1: expected 'q=<int> m=<int> mod=<int>'")
    try:
        q, m, mod = (int(tok.split("=", 1)[1]) for tok in head)
    except ValueError:
        raise FunctionSpecError("line 1: non-integer value") from None

    body = lines[1].split()
    if not body or body[0] != "F":
        raise FunctionSpecError("line 2: expected 'F <v0> <v1> ...'")
    try:
        F = [int(tok) for tok in body[1:]]
    except ValueError:
        raise FunctionSpecError("line 2: non-integer table entry") from None

    try:
        return make_digital_function(q, m, F, mod)
    except ValueError as exc:
        line = 2 if "table" in str(exc) or "weight" in str(exc) else 1
        raise FunctionSpecError(f"line {line}: {exc}") from None


def load_function_spec(path) -> DigitalFunction:
    with open(path, "r", encoding="ascii") as fh:
        return parse_function_spec(fh.read())


def dump_function_spec(f: DigitalFunction) -> str:
    values = " ".join(str(v) for v in f.F)
    return f"q={f.q} m={f.m} mod={f.m_prime}\nF {values}\n"
