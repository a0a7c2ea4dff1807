"""Enumeration budget caps.

Exhaustive checks (Fourier sums over full digit ranges, carry counts over
all n below a power of q) are capped so a single call stays in the
seconds range.  The environment variable ``DIGITSEQ_BUDGET`` overrides the
default cap for every kind of check; each kind also has a hard safety
limit that the override cannot exceed.
"""

import os

_DEFAULTS = {
    "sum": 1 << 22,     # terms in one exhaustive Fourier / phase sum
    "index": 1 << 16,   # elements of one index set
    "carry0": 1 << 22,  # n range for carry exception counts
    "carry1": 1 << 20,  # n range for the carry decomposition check
}

_HARD_LIMITS = {
    "sum": 1 << 26,
    "index": 1 << 20,
    "carry0": 1 << 26,
    "carry1": 1 << 24,
}

ENV_VAR = "DIGITSEQ_BUDGET"


class BudgetExceededError(RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""


def cap(kind: str) -> int:
    """Current budget for one kind of enumeration ("sum", "index", ...)."""
    hard = _HARD_LIMITS[kind]
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return _DEFAULTS[kind]
    try:
        value = int(raw)
    except ValueError:
        raise BudgetExceededError(f"{ENV_VAR} must be an integer, got {raw!r}")
    if value < 1:
        raise BudgetExceededError(f"{ENV_VAR} must be positive, got {value}")
    return min(value, hard)


def check(kind: str, requested: int, what: str) -> None:
    limit = cap(kind)
    if requested > limit:
        raise BudgetExceededError(
            f"{what} needs {requested} > budget {limit} "
            f"(override with {ENV_VAR}, hard limit {_HARD_LIMITS[kind]})"
        )
