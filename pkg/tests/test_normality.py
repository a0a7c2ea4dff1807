"""Block statistics, subword complexity and the correlation sum S0."""

import pytest

import digitseq as dq
from digitseq.normality import AlphaVector


def brute_S0(f, numerators, N):
    """Direct evaluation from scalar b values and cmath phases."""
    import cmath
    mp = f.m_prime
    total = 0j
    for n in range(N):
        phase = sum(num * dq.eval_b(f, (n + ell) ** 2)
                    for ell, num in enumerate(numerators)) % mp
        total += cmath.exp(2j * cmath.pi * phase / mp)
    return total


def test_alpha_vector_basics():
    a = AlphaVector((1, 0), 2)
    assert a.k == 2 and a.K_num == 1 and not a.is_integer_K
    assert AlphaVector((1, 1), 2).is_integer_K
    assert AlphaVector((0, 0), 2).is_zero
    with pytest.raises(ValueError):
        AlphaVector((2,), 2)
    with pytest.raises(ValueError):
        AlphaVector((), 2)
    assert AlphaVector.parse("1,0,1", 2).numerators == (1, 0, 1)


def test_block_histogram_examples():
    h = dq.block_histogram([0, 1, 1, 0], 1)
    assert h.counts == {(0,): 2, (1,): 2} and h.total == 4
    h2 = dq.block_histogram([0, 1, 1, 0], 2)
    assert h2.counts == {(0, 1): 1, (1, 1): 1, (1, 0): 1}
    h3 = dq.block_histogram([5] * 10, 3)
    assert h3.counts == {(5, 5, 5): 8} and h3.total == 8


def test_block_histogram_validation():
    with pytest.raises(ValueError):
        dq.block_histogram([0, 1], 3)
    with pytest.raises(ValueError):
        dq.block_histogram([0, 1], 0)


def test_histogram_total_conserved(rng):
    for _ in range(20):
        n = int(rng.integers(10, 500))
        k = int(rng.integers(1, 6))
        vals = rng.integers(0, 3, n)
        h = dq.block_histogram(vals, k)
        assert sum(h.counts.values()) == h.total == n - k + 1


def test_normality_deviation_uniform_case():
    # one full cycle of every 1-block over {0,1}: deviation from 1/2 is 0
    rep = dq.normality_deviation(dq.block_histogram([0, 1, 0, 1], 1), 2)
    assert rep.max_deviation == 0.0
    assert rep.missing_blocks == 0


def test_normality_deviation_missing_blocks():
    rep = dq.normality_deviation(dq.block_histogram([0, 0, 0, 0], 2), 2)
    assert rep.missing_blocks == 3
    assert rep.max_deviation == pytest.approx(1 - 0.25)


def test_normality_deviation_range(rng):
    for _ in range(30):
        mp = int(rng.integers(2, 5))
        k = int(rng.integers(1, 4))
        vals = rng.integers(0, mp, int(rng.integers(k, 200)))
        rep = dq.normality_deviation(dq.block_histogram(vals, k), mp)
        assert 0.0 <= rep.max_deviation <= 1.0 - float(mp) ** (-k) + 1e-15
        assert rep.chi_square >= 0.0


def test_normality_deviation_rejects_foreign_symbols():
    with pytest.raises(ValueError):
        dq.normality_deviation(dq.block_histogram([0, 3], 1), 2)


def test_subword_complexity_thue_morse(thue_morse):
    vals = dq.stream(thue_morse, dq.IDENTITY, 0, 2 ** 12)
    assert dq.subword_complexity(vals, 3) == [2, 4, 6]


def test_subword_complexity_constant():
    assert dq.subword_complexity([7] * 50, 5) == [1, 1, 1, 1, 1]


def test_subword_complexity_monotone(rng):
    vals = rng.integers(0, 3, 4000)
    p = dq.subword_complexity(vals, 10)
    assert all(a <= b for a, b in zip(p, p[1:]))
    assert all(p[i + 1] <= 3 * p[i] for i in range(len(p) - 1))


def test_subword_complexity_validation():
    with pytest.raises(ValueError):
        dq.subword_complexity([0, 1, 0], 3)


def test_thue_morse_squares_full_complexity(thue_morse):
    vals = dq.stream(thue_morse, dq.SQUARE, 0, 10 ** 6)
    assert dq.subword_complexity(vals, 8)[7] == 256


def test_identity_sequence_misses_long_blocks(rudin_shapiro):
    # along the identity the factor count grows linearly, so length-12
    # blocks cannot all appear in any prefix
    vals = dq.stream(rudin_shapiro, dq.IDENTITY, 0, 10 ** 6)
    rep = dq.normality_deviation(dq.block_histogram(vals, 12), 2)
    assert rep.missing_blocks > 0


def test_S0_zero_alpha_is_N(thue_morse):
    assert dq.exp_sum_S0(thue_morse, AlphaVector((0,), 2), 100) == 100 + 0j


def test_S0_thue_morse_example(thue_morse):
    val = dq.exp_sum_S0(thue_morse, AlphaVector((1,), 2), 8)
    assert val == pytest.approx(-2 + 0j)


def test_S0_matches_bruteforce(rng, thue_morse, rudin_shapiro):
    cases = [(thue_morse, (1,)), (rudin_shapiro, (1, 1)), (rudin_shapiro, (1, 0)),
             (dq.preset("digit-sum", q=3, m_prime=3), (1, 2))]
    for f, nums in cases:
        N = int(rng.integers(5, 60))
        got = dq.exp_sum_S0(f, AlphaVector(nums, f.m_prime), N)
        assert got == pytest.approx(brute_S0(f, nums, N), abs=1e-9)


def test_S0_triangle_inequality(rng, rudin_shapiro):
    for _ in range(10):
        N = int(rng.integers(1, 3000))
        val = dq.exp_sum_S0(rudin_shapiro, AlphaVector((1, 1), 2), N)
        assert abs(val) <= N + 1e-9


def test_S0_bit_identical_reruns(rudin_shapiro):
    a = dq.exp_sum_S0(rudin_shapiro, AlphaVector((1, 0), 2), 4096)
    b = dq.exp_sum_S0(rudin_shapiro, AlphaVector((1, 0), 2), 4096)
    assert a == b


def test_rs_moderate_cancellation(rudin_shapiro):
    val = dq.exp_sum_S0(rudin_shapiro, AlphaVector((1, 1), 2), 2 ** 16)
    assert abs(val) < (2 ** 16) ** 0.95


def test_decay_slope_zero_alpha(thue_morse):
    fit = dq.decay_exponent(thue_morse, AlphaVector((0,), 2),
                            [2 ** e for e in range(10, 16)])
    assert fit.slope == pytest.approx(1.0, abs=1e-9)
    assert all(r.magnitude == pytest.approx(r.N) for r in fit.rows)


def test_decay_slope_thue_morse(thue_morse):
    fit = dq.decay_exponent(thue_morse, AlphaVector((1,), 2),
                            [2 ** e for e in range(10, 17)])
    assert fit.slope < 1.0


def test_decay_integer_K_branch(rudin_shapiro):
    alpha = AlphaVector((1, 1, 0), 2)
    assert alpha.is_integer_K
    fit = dq.decay_exponent(rudin_shapiro, alpha, [2 ** e for e in range(10, 17)])
    assert fit.slope < 1.0


def test_block_counts_recovered_from_exp_sums(thue_morse):
    # Fourier inversion over the coefficient grid turns the correlation
    # sums back into exact block counts, tying the two measurements of
    # normality to each other:
    # #occurrences(c) = m'^-k sum_alpha e(-<alpha, c>/m') S0(alpha, N)
    from digitseq.phases import e_frac
    N, k, mp = 512, 2, 2
    vals = dq.stream(thue_morse, dq.SQUARE, 0, N + k - 1)
    for c in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        direct = sum(1 for n in range(N) if tuple(vals[n:n + k]) == c)
        total = 0j
        for a0 in range(mp):
            for a1 in range(mp):
                S = dq.exp_sum_S0(thue_morse, AlphaVector((a0, a1), mp), N)
                total += e_frac(-(a0 * c[0] + a1 * c[1]), mp) * S
        total /= mp ** k
        assert total.real == pytest.approx(direct, abs=1e-9)
        assert abs(total.imag) < 1e-9


def test_decay_validation(thue_morse):
    with pytest.raises(ValueError):
        dq.decay_exponent(thue_morse, AlphaVector((1,), 2), [1024])
    with pytest.raises(ValueError):
        dq.decay_exponent(thue_morse, AlphaVector((1,), 2), [1024, 512])
