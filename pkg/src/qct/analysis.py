"""Closed-form results: cheat pass probability and noise robustness.

Two analytical models of the reflection attack's pass probability are
implemented side by side.

* `pass_prob_composition_sum`: group the N measurement indices into m
  ordered runs (C(N-1, m-1) compositions), give each run of length L a
  consistent-guess factor 4**(L-1) out of 4**L, and average over
  compositions:  sum C(N-1,m-1) 4**(m-N) / sum C(N-1,m-1).  The binomial
  theorem collapses this to exactly (5/8)**(N-1).
* `pass_prob_permutation_model`: the claimed identification is a uniform
  permutation, cycles play the role of runs, so the average weights
  4**(m-N) by the signless Stirling counts c(N, m)/N!.  This equals
  (N+1)(N+2)(N+3)/(6*4**N), which is strictly smaller for N >= 3 - the
  discrepancy between the two models is real and surfaced in reports; the
  simulated attack follows the permutation model.

`pass_prob_closed_form` is the reference curve (5/8)**(N-1) itself.
Robustness: readout noise gamma per measurement must keep the honest abort
rate below the cheat pass probability, i.e. 1 - gamma**N <= P(N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "BiasTarget",
    "RobustnessQuery",
    "pass_prob_closed_form",
    "pass_prob_composition_sum",
    "pass_prob_composition_sum_exact",
    "pass_prob_permutation_model",
    "pass_prob_permutation_model_exact",
    "stirling_first_kind",
    "robustness_ok",
    "min_gamma",
    "min_pairs_for_threshold",
    "min_pairs_for_bias",
    "MODEL_DISCREPANCY_NOTE",
]

MODEL_DISCREPANCY_NOTE = (
    "composition-sum equals closed-form (5/8)^(N-1) exactly; permutation-exact "
    "is strictly smaller for N >= 3 and matches the simulated attack"
)


def _require_n(n: int) -> None:
    if n < 1:
        raise ValueError("n_pairs must be at least 1")


def pass_prob_closed_form(n: int) -> float:
    """(5/8)**(n-1), evaluated in log space for numerical stability."""
    _require_n(n)
    return math.exp((n - 1) * (math.log(5.0) - math.log(8.0)))


def pass_prob_composition_sum_exact(n: int) -> Fraction:
    """Exact composition-weighted sum: sum C(n-1,m-1) 4^(m-n) / 2^(n-1)."""
    _require_n(n)
    numerator = sum(math.comb(n - 1, m - 1) * 4**m for m in range(1, n + 1))
    denominator = 4**n * sum(math.comb(n - 1, m - 1) for m in range(1, n + 1))
    return Fraction(numerator, denominator)


def pass_prob_composition_sum(n: int) -> float:
    return float(pass_prob_composition_sum_exact(n))


@lru_cache(maxsize=None)
def stirling_first_kind(n: int) -> tuple[int, ...]:
    """Signless Stirling numbers of the first kind c(n, m) for m = 0..n.

    c(n, m) counts permutations of n elements with m cycles; computed by the
    rising-factorial recurrence c(n+1, m) = c(n, m-1) + n * c(n, m).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    row = [1]  # c(0, 0)
    for k in range(n):
        new = [0] * (len(row) + 1)
        for m, val in enumerate(row):
            new[m] += k * val
            new[m + 1] += val
        row = new
    return tuple(row)


def pass_prob_permutation_model_exact(n: int) -> Fraction:
    """Exact uniform-permutation average: sum c(n,m) 4^(m-n) / n!."""
    _require_n(n)
    counts = stirling_first_kind(n)
    numerator = sum(counts[m] * 4**m for m in range(1, n + 1))
    return Fraction(numerator, 4**n * math.factorial(n))


def pass_prob_permutation_model(n: int) -> float:
    return float(pass_prob_permutation_model_exact(n))


@dataclass(frozen=True)
class RobustnessQuery:
    gamma: float
    n_pairs: int

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        _require_n(self.n_pairs)


def robustness_ok(query: RobustnessQuery, rel_tol: float = 1e-12) -> bool:
    """True iff 1 - gamma**N <= (5/8)**(N-1), with ulp-scale slack."""
    shortfall = 1.0 - query.gamma**query.n_pairs
    p = pass_prob_closed_form(query.n_pairs)
    return shortfall <= p or math.isclose(shortfall, p, rel_tol=rel_tol)


def min_gamma(n: int, p_threshold: float) -> float:
    """Smallest per-measurement survival rate keeping 1 - gamma**n <= p."""
    _require_n(n)
    if not 0.0 < p_threshold < 1.0:
        raise ValueError("p_threshold must lie in (0, 1)")
    return (1.0 - p_threshold) ** (1.0 / n)


def min_pairs_for_threshold(p_threshold: float) -> int:
    """Smallest N >= 1 with (5/8)**(N-1) <= p_threshold (exact arithmetic)."""
    if not 0.0 < p_threshold <= 1.0:
        raise ValueError("p_threshold must lie in (0, 1]")
    bound = Fraction(p_threshold)
    power = Fraction(1)
    n = 1
    while power > bound:
        power *= Fraction(5, 8)
        n += 1
    return n


@dataclass(frozen=True)
class BiasTarget:
    """Desired bound xi on a cheater's excess success probability over 1/2."""

    xi: float

    def __post_init__(self) -> None:
        if not 0.0 < self.xi < 0.5:
            raise ValueError("xi must lie in (0, 1/2)")


def min_pairs_for_bias(target: BiasTarget) -> int:
    """Smallest N whose pass probability bounds the bias by target.xi.

    A coin-forcing strategy mixed with honest play wins its preferred value
    with probability at most 1/2 + P/2 once it must survive the results
    check with probability P, so P <= 2*xi suffices for a bias of xi.
    """
    return min_pairs_for_threshold(2.0 * target.xi)
