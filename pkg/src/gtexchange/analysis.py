"""Closed-form analysis: coverage probability and the randomized-run bound.

* ``pmnk_exact`` -- probability that m independent uniform k-subsets of an
  n-segment universe jointly cover it, evaluated exactly over big integers
  by summing, over all ways to split the ``m*k - n`` repeated picks across
  nodes 2..m, the count of set tuples realizing that split.
* ``pmnk_montecarlo`` -- sampling estimator of the same probability, used
  as an independent cross-check and as the fallback when the exact sum is
  too large to enumerate.
* ``randomized_lower_bound`` -- recursion for the expected per-node set
  size of the randomized scheduler, phase by phase: a node paired with a
  so-far-uninfluenced partner gains ``s*(1 - s/n)`` segments in
  expectation, and the chance of such a pairing is at least
  ``max(m - 2^(p-1), 0) / (m - 1)`` in phase p.  The bound on the mean
  aggregate cardinality is m times the final iterate.
* ``approx_condition_holds`` -- the initial-set-size window in which the
  randomized scheduler is guaranteed a quarter of the optimum.

All functions here are pure; the exact sum is order-independent integer
arithmetic, so any evaluation order gives bit-identical results.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, log2, sqrt


@dataclass(frozen=True)
class ExactProbability:
    """A probability as an exact reduced fraction plus its float rendering."""

    numerator: int
    denominator: int

    @classmethod
    def from_fraction(cls, value: Fraction) -> "ExactProbability":
        return cls(numerator=value.numerator, denominator=value.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def value(self) -> float:
        return self.numerator / self.denominator


def _check_mnk(m: int, n: int, k: int) -> None:
    if m < 1:
        raise ValueError(f"need at least one node, got m={m}")
    if n < 1:
        raise ValueError(f"universe needs at least one segment, got n={n}")
    if not 1 <= k <= n:
        raise ValueError(f"initial set size k={k} must satisfy 1 <= k <= n={n}")


def _covering_tuples(m: int, n: int, k: int) -> int:
    """Number of m-tuples of k-subsets of an n-universe whose union covers it.

    Nodes are added one by one; ``overlap`` is how many of a node's picks
    land inside the union built so far (the composition variable), and all
    overlaps must absorb exactly the ``m*k - n`` repeated picks.
    """
    target = m * k - n

    def extend(node: int, union_size: int, remaining: int, ways: int) -> int:
        if node > m:
            return ways if remaining == 0 else 0
        nodes_left = m - node
        lo = max(0, remaining - nodes_left * k)
        hi = min(k, union_size, remaining)
        total = 0
        for overlap in range(lo, hi + 1):
            w = comb(union_size, overlap) * comb(n - union_size, k - overlap)
            if w:
                total += extend(
                    node + 1, union_size + k - overlap, remaining - overlap, ways * w
                )
        return total

    return extend(2, k, target, comb(n, k))


def composition_term_count(parts: int, total: int, cap: int) -> int:
    """How many compositions of ``total`` into ``parts`` parts, each in [0, cap].

    Cheap DP used to predict whether the exact coverage sum is enumerable.
    """
    if parts == 0:
        return 1 if total == 0 else 0
    counts = [1] + [0] * total
    for _ in range(parts):
        prefix = [0] * (total + 2)
        for v in range(total + 1):
            prefix[v + 1] = prefix[v] + counts[v]
        counts = [
            prefix[v + 1] - prefix[max(0, v - cap)] for v in range(total + 1)
        ]
    return counts[total]


def pmnk_exact(m: int, n: int, k: int) -> ExactProbability:
    """Exact probability that m uniform k-subsets of an n-universe cover it."""
    _check_mnk(m, n, k)
    if m * k < n:
        return ExactProbability.from_fraction(Fraction(0))
    favourable = _covering_tuples(m, n, k)
    return ExactProbability.from_fraction(Fraction(favourable, comb(n, k) ** m))


def pmnk_montecarlo(
    m: int, n: int, k: int, trials: int, seed: int
) -> tuple[float, float]:
    """Sampling estimate of the coverage probability, with its standard error."""
    _check_mnk(m, n, k)
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    rng = random.Random(seed)
    population = range(n)
    full = (1 << n) - 1
    hits = 0
    for _ in range(trials):
        union = 0
        for _ in range(m):
            for e in rng.sample(population, k):
                union |= 1 << e
        if union == full:
            hits += 1
    estimate = hits / trials
    stderr = sqrt(estimate * (1.0 - estimate) / trials)
    return estimate, stderr


@dataclass(frozen=True)
class BoundTrace:
    """Phase-by-phase expected per-node set sizes behind a lower bound."""

    expected_sizes: tuple[float, ...]
    phase_factors: tuple[float, ...]
    bound: float


def randomized_lower_bound(m: int, n: int, k: int) -> tuple[float, BoundTrace]:
    """Lower bound on the randomized scheduler's mean aggregate cardinality.

    Iterates ``s <- s + s*(1 - s/n) * max(m - 2^(p-1), 0)/(m - 1)`` from
    ``s = k``, stopping at the first phase whose factor is zero; the bound
    is ``m`` times the final iterate.
    """
    if m < 2:
        raise ValueError(f"need at least two nodes, got m={m}")
    _check_mnk(m, n, k)
    sizes = [float(k)]
    factors: list[float] = []
    phase = 1
    while True:
        factor = max(m - 2 ** (phase - 1), 0) / (m - 1)
        if factor == 0.0:
            break
        s = sizes[-1]
        sizes.append(s + s * (1.0 - s / n) * factor)
        factors.append(factor)
        phase += 1
    bound = m * sizes[-1]
    return bound, BoundTrace(
        expected_sizes=tuple(sizes), phase_factors=tuple(factors), bound=bound
    )


def approx_condition_holds(m: int, n: int, k: int) -> bool:
    """Whether k sits in the window guaranteeing the 4-approximation:
    ``min(n/log2(m), n/4) <= k <= n - 1`` (real-valued comparison)."""
    if m < 2:
        raise ValueError(f"need at least two nodes, got m={m}")
    _check_mnk(m, n, k)
    return min(n / log2(m), n / 4) <= k <= n - 1
