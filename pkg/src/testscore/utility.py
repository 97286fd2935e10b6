"""Expected team utility u_j(S) = E[g_j(performances of S)].

Exact evaluation enumerates the outcome product space of the members'
distributions (mixed-radix, in bounded-memory blocks). Best-shot projects
also get a closed-form path via CDF products over the merged support, which
stays exact far beyond the enumeration budget. A Monte Carlo estimator
covers everything else past the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import (
    BudgetExceededError,
    RngSpec,
    Scenario,
    ValidationError,
    enumeration_budget,
)
from .production import evaluate, evaluate_batch

_BLOCK = 1 << 18  # leaves per enumeration block; bounds peak memory


@dataclass(frozen=True)
class UtilityEstimate:
    value: float
    method: str  # exact | exact_best_shot | monte_carlo
    samples: int = 0
    std_error: float = 0.0

    def __post_init__(self):
        # Monte Carlo on deterministic inputs legitimately reports zero
        # spread, so only the exact methods are pinned to std_error 0.
        if self.method in ("exact", "exact_best_shot") and self.std_error != 0.0:
            raise ValidationError("std_error must be 0 exactly for exact methods")


def _members(scn: Scenario, S: Iterable[int]) -> tuple[int, ...]:
    members = tuple(sorted(set(int(i) for i in S)))
    for i in members:
        if not (0 <= i < scn.n_agents):
            raise ValidationError(f"unknown agent {i}")
    return members


def exact_utility(scn: Scenario, j: int, S: Iterable[int]) -> UtilityEstimate:
    """Exact expectation by enumerating the outcome product space.

    The product of member support sizes must stay within the enumeration
    budget. The empty team evaluates g on the all-zeros vector.
    """
    members = _members(scn, S)
    g = scn.value_fns[j]
    if not members:
        return UtilityEstimate(value=evaluate(g, []), method="exact")
    dists = [scn.dist(i, j) for i in members]
    sizes = [len(d) for d in dists]
    total = math.prod(sizes)
    budget = enumeration_budget()
    if total > budget:
        raise BudgetExceededError(total, budget)
    values = [d.values_array for d in dists]
    probs = [d.probs_array for d in dists]
    acc = 0.0
    for lo in range(0, total, _BLOCK):
        hi = min(lo + _BLOCK, total)
        digits = np.unravel_index(np.arange(lo, hi), sizes)
        X = np.column_stack([values[c][digits[c]] for c in range(len(members))])
        w = probs[0][digits[0]].copy()
        for c in range(1, len(members)):
            w *= probs[c][digits[c]]
        acc += float(np.dot(evaluate_batch(g, X), w))
    return UtilityEstimate(value=acc, method="exact")


def exact_utility_best_shot(scn: Scenario, j: int, S: Iterable[int]) -> UtilityEstimate:
    """E[max of member performances] via CDF products on the merged support.

    Only valid for best-shot projects; agrees with exact_utility wherever
    both run, but costs O(|merged support| * |S|) instead of the product.
    """
    g = scn.value_fns[j]
    if g.kind != "best_shot":
        raise ValidationError(
            f"project {j} has value function {g.kind!r}, expected best_shot"
        )
    members = _members(scn, S)
    if not members:
        return UtilityEstimate(value=0.0, method="exact_best_shot")
    dists = [scn.dist(i, j) for i in members]
    merged = np.unique(np.concatenate([d.values_array for d in dists]))
    # P(max <= v) = prod_i F_i(v), with F_i a right-continuous step function
    cdf_at = np.ones_like(merged)
    for d in dists:
        pos = np.searchsorted(d.values_array, merged, side="right")
        cdf = np.concatenate(([0.0], d.cdf_array))
        cdf_at = cdf_at * cdf[pos]
    below = np.concatenate(([0.0], cdf_at[:-1]))
    mass = cdf_at - below
    return UtilityEstimate(value=float(np.dot(merged, mass)), method="exact_best_shot")


def project_utility(scn: Scenario, j: int, S: Iterable[int]) -> UtilityEstimate:
    """Exact utility via the cheapest exact route for the project's variant."""
    if scn.value_fns[j].kind == "best_shot":
        return exact_utility_best_shot(scn, j, S)
    return exact_utility(scn, j, S)


def mc_utility(
    scn: Scenario,
    j: int,
    S: Iterable[int],
    rng: RngSpec,
    samples: int,
    stream: int = 0,
) -> UtilityEstimate:
    """Monte Carlo estimate of the expected utility.

    Deterministic for a fixed RngSpec and stream; std_error is the sample
    standard deviation divided by sqrt(samples).
    """
    if samples < 2:
        raise ValidationError(f"samples must be >= 2, got {samples}")
    members = _members(scn, S)
    g = scn.value_fns[j]
    if not members:
        return UtilityEstimate(value=evaluate(g, []), method="exact")
    gen = rng.generator(stream)
    U = gen.random((samples, len(members)))
    X = np.empty_like(U)
    for c, i in enumerate(members):
        d = scn.dist(i, j)
        X[:, c] = d.values_array[np.searchsorted(d.cdf_array, U[:, c], side="right")]
    vals = evaluate_batch(g, X)
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(samples))
    return UtilityEstimate(value=mean, method="monte_carlo", samples=samples, std_error=se)


@dataclass(frozen=True)
class SubmodularityReport:
    ok: bool
    witness: Optional[tuple[tuple[int, ...], tuple[int, ...], Optional[int]]] = None
    # witness = (S, T, i): diminishing-returns violation at S subset T, i outside T;
    # i is None for a monotonicity violation u(S) > u(T).


def submodularity_check(
    scn: Scenario, j: int, max_agents: int = 8, tol: float = 1e-9
) -> SubmodularityReport:
    """Exhaustively verify that u_j is monotone non-decreasing and submodular
    over the whole agent ground set.

    Checks u(T + i) - u(T) <= u(S + i) - u(S) for all S subset T, i outside T,
    and u(S) <= u(T) for S subset T. Returns the first violating witness.
    """
    n = scn.n_agents
    if n > max_agents:
        raise BudgetExceededError(2**n, 2**max_agents, what="subset enumeration")
    u = [0.0] * (1 << n)
    for mask in range(1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        u[mask] = project_utility(scn, j, members).value

    def as_set(mask: int) -> tuple[int, ...]:
        return tuple(i for i in range(n) if mask >> i & 1)

    for T in range(1 << n):
        S = T
        while True:  # iterate submasks of T, including T and 0
            if u[S] > u[T] + tol:
                return SubmodularityReport(ok=False, witness=(as_set(S), as_set(T), None))
            for i in range(n):
                if T >> i & 1:
                    continue
                bit = 1 << i
                if u[T | bit] - u[T] > u[S | bit] - u[S] + tol:
                    return SubmodularityReport(
                        ok=False, witness=(as_set(S), as_set(T), i)
                    )
            if S == 0:
                break
            S = (S - 1) & T
    return SubmodularityReport(ok=True)
