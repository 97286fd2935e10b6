"""Sketches: cheap set-value surrogates built from score tables only.

Two flavors. The min/max bracket takes the extremes of the team-size
replication scores. The harmonic sketch ranks agents greedily and sums
a^r / r along that ranking; it brackets the true utility within factors
that grow only logarithmically with the team size.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .core import Scenario, ValidationError
from .scores import ScoreTable, build_score_table
from .utility import project_utility

BOUND_TOL = 1e-9


def _check_members(S) -> tuple[int, ...]:
    members = tuple(sorted(S))
    if len(members) != len(set(members)):
        raise ValidationError("duplicate agents in set")
    if not members:
        raise ValidationError("empty agent set")
    return members


@dataclass(frozen=True)
class SketchEval:
    """One sketch evaluation: bracket endpoints plus the harmonic sum.

    per_term holds (agent, r, a^r / r) in ranking order, one entry per
    member of the input set.
    """

    lower: float
    upper: float
    strong: float
    pi_order: tuple[int, ...]
    per_term: tuple[tuple[int, int, float], ...]


def minmax_sketch(
    table: ScoreTable, j: int, S, k: int
) -> tuple[float, float]:
    """Min and max of the size-k replication scores over the set."""
    members = _check_members(S)
    if len(members) != k:
        raise ValidationError(f"need |S| = k = {k}, got {len(members)}")
    vals = [table.get(i, j, k) for i in members]
    return min(vals), max(vals)


def strong_sketch(table: ScoreTable, j: int, S) -> SketchEval:
    """Greedy-ranked harmonic sketch of a team's value on project j.

    Rank 1 goes to the agent with the best 1-replication score, rank 2 to
    the best remaining 2-replication score, and so on; ties break toward
    the smallest agent id. The sketch value is sum_r a_{rank r}^r / r.
    Sets smaller than the table's max_r just truncate the sum.
    """
    if table.kind != "replication":
        raise ValidationError(
            f"strong sketch needs a replication table, got {table.kind!r}"
        )
    members = _check_members(S)
    t = len(members)
    if t > table.max_r:
        raise ValidationError(f"|S| = {t} exceeds table max_r = {table.max_r}")
    remaining = list(members)
    order: list[int] = []
    terms: list[tuple[int, int, float]] = []
    total = 0.0
    for r in range(1, t + 1):
        best = remaining[0]
        best_score = table.get(best, j, r)
        for i in remaining[1:]:
            s = table.get(i, j, r)
            if s > best_score:
                best, best_score = i, s
        remaining.remove(best)
        order.append(best)
        terms.append((best, r, best_score / r))
        total += best_score / r
    endpoint = [table.get(i, j, t) for i in members]
    return SketchEval(
        lower=min(endpoint),
        upper=max(endpoint),
        strong=total,
        pi_order=tuple(order),
        per_term=tuple(terms),
    )


@dataclass(frozen=True)
class MaxTermBound:
    holds: bool
    lhs: float
    rhs: float
    ell: int


def max_term_bound(ev: SketchEval) -> MaxTermBound:
    """The largest ranked score is at most twice the running average.

    With ell the rank holding the largest a^r, checks
    a^ell <= (2/ell) * sum_{r<=ell} a^r.
    """
    raw = [contrib * r for (_i, r, contrib) in ev.per_term]
    ell = 1 + max(range(len(raw)), key=lambda idx: raw[idx])
    lhs = raw[ell - 1]
    rhs = (2.0 / ell) * sum(raw[:ell])
    return MaxTermBound(holds=lhs <= rhs + BOUND_TOL, lhs=lhs, rhs=rhs, ell=ell)


@dataclass(frozen=True)
class BoundWitness:
    """Where a bound was tightest (or broken): the set and both sides."""

    bound: str
    slack: float
    witness_set: tuple[int, ...]
    u: float
    v: float

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "slack": self.slack,
            "witness_set": list(self.witness_set),
            "u": self.u,
            "v": self.v,
        }


@dataclass(frozen=True)
class SketchBoundReport:
    ok: bool
    worst_lower: BoundWitness
    worst_upper: BoundWitness

    @property
    def worst_lower_slack(self) -> float:
        return self.worst_lower.slack

    @property
    def worst_upper_slack(self) -> float:
        return self.worst_upper.slack

    @property
    def witness(self) -> Optional[BoundWitness]:
        # the broken side, if any; lower side reported first
        if self.worst_lower.slack < -BOUND_TOL:
            return self.worst_lower
        if self.worst_upper.slack < -BOUND_TOL:
            return self.worst_upper
        return None

    def to_json(self) -> str:
        return json.dumps(
            {
                "ok": self.ok,
                "worst_lower": self.worst_lower.to_json(),
                "worst_upper": self.worst_upper.to_json(),
            }
        )


def _worse(cur: Optional[BoundWitness], cand: BoundWitness) -> BoundWitness:
    return cand if cur is None or cand.slack < cur.slack else cur


def verify_strong_sketch_bounds(scn: Scenario, j: int, k: int) -> SketchBoundReport:
    """Exhaustively check the harmonic-sketch bracket on every team.

    For each nonempty S with |S| <= k verifies, with t = |S|,
        v(S) / (2 (ln t + 1)) <= u(S)   and   u(S) <= 6 v(S),
    both up to 1e-9 slack, using exact utilities and exact score tables.
    """
    if k < 1 or k > scn.n_agents:
        raise ValidationError(f"k must be in 1..{scn.n_agents}, got {k}")
    table = build_score_table(scn, "replication", max_r=k, mc_fallback=False)
    worst_lo: Optional[BoundWitness] = None
    worst_hi: Optional[BoundWitness] = None
    for t in range(1, k + 1):
        scale = 2.0 * (math.log(t) + 1.0)
        for S in combinations(scn.agents, t):
            v = strong_sketch(table, j, S).strong
            u = project_utility(scn, j, S).value
            worst_lo = _worse(
                worst_lo,
                BoundWitness("strong_lower", u - v / scale, S, u=u, v=v),
            )
            worst_hi = _worse(
                worst_hi,
                BoundWitness("strong_upper", 6.0 * v - u, S, u=u, v=v),
            )
    assert worst_lo is not None and worst_hi is not None
    ok = worst_lo.slack >= -BOUND_TOL and worst_hi.slack >= -BOUND_TOL
    return SketchBoundReport(ok=ok, worst_lower=worst_lo, worst_upper=worst_hi)


def verify_goodness_sandwich(scn: Scenario, j: int, k: int) -> SketchBoundReport:
    """Check (1 - 1/e) * min-score <= u(S) <= 4 * max-score on all size-k teams.

    Holds whenever the project's value function satisfies the balanced
    substitution property; top-r objectives can break the lower side.
    """
    if k < 1 or k > scn.n_agents:
        raise ValidationError(f"k must be in 1..{scn.n_agents}, got {k}")
    table = build_score_table(scn, "replication", max_r=k, mc_fallback=False)
    lo_factor = 1.0 - 1.0 / math.e
    worst_lo: Optional[BoundWitness] = None
    worst_hi: Optional[BoundWitness] = None
    for S in combinations(scn.agents, k):
        lower, upper = minmax_sketch(table, j, S, k)
        u = project_utility(scn, j, S).value
        worst_lo = _worse(
            worst_lo,
            BoundWitness("goodness_lower", u - lo_factor * lower, S, u=u, v=lower),
        )
        worst_hi = _worse(
            worst_hi,
            BoundWitness("goodness_upper", 4.0 * upper - u, S, u=u, v=upper),
        )
    assert worst_lo is not None and worst_hi is not None
    ok = worst_lo.slack >= -BOUND_TOL and worst_hi.slack >= -BOUND_TOL
    return SketchBoundReport(ok=ok, worst_lower=worst_lo, worst_upper=worst_hi)
