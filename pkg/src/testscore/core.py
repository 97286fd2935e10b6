"""Shared domain types: discrete performance distributions, scenarios,
assignments, and the deterministic sampling contract.

Agents and projects are dense integer identifiers (0..n-1 and 0..m-1);
external names are mapped at the CLI boundary. All types here are immutable
after construction and safe to share across workers.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .production import ValueFunction

DEFAULT_BUDGET = 10_000_000

# Probability sums farther than this from 1 are rejected outright; anything
# closer is normalized (tolerates CSV rounding without accepting bad data).
PROB_SUM_SLACK = 1e-9


class ValidationError(ValueError):
    """Raised when an input fails a structural precondition."""


class BudgetExceededError(RuntimeError):
    """Raised when an exact computation would exceed the enumeration budget."""

    def __init__(self, required: int, budget: int, what: str = "enumeration"):
        self.required = required
        self.budget = budget
        super().__init__(
            f"{what} budget exceeded: {required} > {budget}"
        )


def enumeration_budget() -> int:
    """Current enumeration budget (TESTSCORE_BUDGET env var, default 10^7)."""
    raw = os.environ.get("TESTSCORE_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValidationError(f"TESTSCORE_BUDGET is not an integer: {raw!r}") from exc
    if value < 1:
        raise ValidationError(f"TESTSCORE_BUDGET must be positive, got {value}")
    return value


@dataclass(frozen=True)
class Distribution:
    """Finite discrete distribution over non-negative performance values.

    ``values`` are strictly increasing and non-negative; ``probs`` are
    positive and sum to 1 (raw sums within 1e-9 of 1 are normalized once
    at construction, anything farther off is rejected).
    """

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValidationError("distribution needs at least one atom")
        if len(self.values) != len(self.probs):
            raise ValidationError("values and probs must have equal length")
        pairs = sorted(zip(self.values, self.probs))
        vals = tuple(float(v) for v, _ in pairs)
        prbs = [float(p) for _, p in pairs]
        for a, b in zip(vals, vals[1:]):
            if a == b:
                raise ValidationError(f"duplicate support value {a}")
        if vals[0] < 0:
            raise ValidationError(f"negative support value {vals[0]}")
        for p in prbs:
            if not (p > 0):
                raise ValidationError(f"probability must be positive, got {p}")
        total = math.fsum(prbs)
        if abs(total - 1.0) > PROB_SUM_SLACK:
            raise ValidationError(
                f"probabilities sum to {total}, outside 1 +/- {PROB_SUM_SLACK}"
            )
        prbs = tuple(p / total for p in prbs)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "probs", prbs)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "Distribution":
        pairs = list(pairs)
        return cls(tuple(v for v, _ in pairs), tuple(p for _, p in pairs))

    @classmethod
    def point(cls, value: float) -> "Distribution":
        return cls((float(value),), (1.0,))

    @cached_property
    def values_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @cached_property
    def probs_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    @cached_property
    def cdf_array(self) -> np.ndarray:
        cdf = np.cumsum(self.probs_array)
        cdf[-1] = 1.0  # kill accumulated rounding so the top quantile is exact
        return cdf

    def __len__(self) -> int:
        return len(self.values)


def dist_mean(d: Distribution) -> float:
    """Expected value of a distribution."""
    return float(np.dot(d.values_array, d.probs_array))


@dataclass(frozen=True)
class RngSpec:
    """Deterministic sampling contract.

    ``seed`` keys a counter-based Philox generator (128-bit key built from
    seed and a stream index), so identical specs produce bit-identical
    streams on any platform and parallel shards never overlap.
    """

    seed: int
    algorithm: str = "philox4x64"

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2**64):
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if self.algorithm != "philox4x64":
            raise ValidationError(f"unknown rng algorithm {self.algorithm!r}")

    def generator(self, stream: int = 0) -> np.random.Generator:
        if not (0 <= int(stream) < 2**64):
            raise ValidationError("stream must be a 64-bit unsigned integer")
        return np.random.Generator(np.random.Philox(key=[int(self.seed), int(stream)]))


def dist_sample(
    d: Distribution, rng: RngSpec, count: int, stream: int = 0
) -> np.ndarray:
    """Draw ``count`` i.i.d. samples by inverse CDF over the sorted support."""
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    gen = rng.generator(stream)
    u = gen.random(count)
    idx = np.searchsorted(d.cdf_array, u, side="right")
    return d.values_array[idx]


def empirical_distribution(samples: Sequence[float]) -> Distribution:
    """Distribution whose atoms are the distinct sample values with
    probabilities equal to relative frequencies."""
    arr = np.asarray(list(samples), dtype=float)
    if arr.size == 0:
        raise ValidationError("empty sample set")
    values, counts = np.unique(arr, return_counts=True)
    probs = counts / arr.size
    return Distribution(tuple(values.tolist()), tuple(probs.tolist()))


@dataclass(frozen=True)
class Scenario:
    """A team formation instance: agents x projects with per-pair performance
    distributions, one value function and one cardinality per project.

    ``dists[i][j]`` is agent i's distribution on project j. Feasibility
    requires sum(k_j) <= n so that a full disjoint assignment exists.
    """

    dists: tuple[tuple[Distribution, ...], ...]
    value_fns: tuple[ValueFunction, ...]
    cardinalities: tuple[int, ...]

    def __post_init__(self):
        n = len(self.dists)
        if n == 0:
            raise ValidationError("scenario needs at least one agent")
        m = len(self.value_fns)
        if m == 0:
            raise ValidationError("scenario needs at least one project")
        if len(self.cardinalities) != m:
            raise ValidationError("one cardinality per project required")
        for i, row in enumerate(self.dists):
            if len(row) != m:
                raise ValidationError(
                    f"agent {i} has {len(row)} distributions, expected {m}"
                )
            for j, d in enumerate(row):
                if not isinstance(d, Distribution):
                    raise ValidationError(f"missing distribution for pair ({i}, {j})")
        for j, k in enumerate(self.cardinalities):
            if k < 1:
                raise ValidationError(f"cardinality k_{j} must be >= 1, got {k}")
        if sum(self.cardinalities) > n:
            raise ValidationError(
                f"infeasible: sum of cardinalities {sum(self.cardinalities)} "
                f"exceeds agent count {n}"
            )

    @property
    def n_agents(self) -> int:
        return len(self.dists)

    @property
    def n_projects(self) -> int:
        return len(self.value_fns)

    @property
    def agents(self) -> range:
        return range(self.n_agents)

    @property
    def projects(self) -> range:
        return range(self.n_projects)

    def dist(self, agent: int, project: int) -> Distribution:
        return self.dists[agent][project]

    @classmethod
    def single_project(
        cls,
        dists: Sequence[Distribution],
        value_fn: ValueFunction,
        k: int,
    ) -> "Scenario":
        """One-project scenario where each agent has the given distribution."""
        return cls(
            dists=tuple((d,) for d in dists),
            value_fns=(value_fn,),
            cardinalities=(int(k),),
        )


@dataclass(frozen=True)
class Assignment:
    """Disjoint, ordered agent sets, one per project.

    Insertion order is preserved because sketch evaluation of a partially
    built team depends on the order agents were added.
    """

    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for members in self.sets:
            for i in members:
                if i in seen:
                    raise ValidationError(f"agent {i} assigned to multiple projects")
                seen.add(i)

    def validate(self, scn: Scenario) -> None:
        if len(self.sets) != scn.n_projects:
            raise ValidationError(
                f"assignment has {len(self.sets)} sets for {scn.n_projects} projects"
            )
        for j, members in enumerate(self.sets):
            if len(members) > scn.cardinalities[j]:
                raise ValidationError(
                    f"project {j} holds {len(members)} agents, cap is "
                    f"{scn.cardinalities[j]}"
                )
            for i in members:
                if not (0 <= i < scn.n_agents):
                    raise ValidationError(f"unknown agent {i}")

    def total_assigned(self) -> int:
        return sum(len(s) for s in self.sets)
