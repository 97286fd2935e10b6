"""Selection and assignment algorithms driven by score tables, plus the
exact brute-force oracles used to measure them.

The greedy routines never evaluate joint utilities while choosing; they
read precomputed scores only. Utilities enter afterwards, to report the
objective actually achieved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Optional

from .core import (
    Assignment,
    BudgetExceededError,
    RngSpec,
    Scenario,
    ValidationError,
    enumeration_budget,
)
from .scores import ScoreTable
from .sketch import minmax_sketch, strong_sketch
from .utility import UtilityEstimate, mc_utility, project_utility

BOUND_TOL = 1e-9
MC_OBJECTIVE_SAMPLES = 200_000

# single-selection guarantee for replication-score greedy on balanced
# substitution objectives: (1 - 1/e) / (5 - 1/e), about 1/7.33
SINGLE_GREEDY_BOUND = (1.0 - 1.0 / math.e) / (5.0 - 1.0 / math.e)


def welfare_greedy_bound(k: int) -> float:
    """Assignment guarantee 1 / (24 (ln k + 1)) for max team size k."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    return 1.0 / (24.0 * (math.log(k) + 1.0))


@dataclass(frozen=True)
class TraceStep:
    step: int
    agent: int
    project: int
    score: float  # the per-pick score the algorithm maximized


@dataclass(frozen=True)
class SelectionResult:
    """An algorithm's output: who was placed where, and what it is worth.

    score_trace is present for greedy runs (one entry per placement, in
    pick order) and empty for brute-force oracles. sketch_objective, when
    set, is the sketch value the run optimized or accumulated.
    """

    assignment: Assignment
    per_project: tuple[UtilityEstimate, ...]
    total: float
    score_trace: tuple[TraceStep, ...] = ()
    ratio_vs_opt: Optional[float] = None
    sketch_objective: Optional[float] = None

    def __post_init__(self):
        if self.score_trace and len(self.score_trace) != self.assignment.total_assigned():
            raise ValidationError("trace length must match number of placements")

    def to_json(self) -> dict:
        out = {
            "assignment": [list(S) for S in self.assignment.sets],
            "per_project": [est.value for est in self.per_project],
            "total": self.total,
            "trace": [
                {"step": t.step, "agent": t.agent, "project": t.project, "score": t.score}
                for t in self.score_trace
            ],
        }
        if self.ratio_vs_opt is not None:
            out["ratio_vs_opt"] = self.ratio_vs_opt
        if self.sketch_objective is not None:
            out["sketch_objective"] = self.sketch_objective
        return out


def _objective(
    scn: Scenario, j: int, S, rng: Optional[RngSpec]
) -> UtilityEstimate:
    # exact when the outcome space fits the budget, sampled otherwise
    try:
        return project_utility(scn, j, S)
    except BudgetExceededError:
        mc_rng = rng if rng is not None else RngSpec(seed=0)
        return mc_utility(scn, j, S, mc_rng, samples=MC_OBJECTIVE_SAMPLES, stream=j)


def _result(
    scn: Scenario,
    sets: list[tuple[int, ...]],
    trace: tuple[TraceStep, ...] = (),
    rng: Optional[RngSpec] = None,
    sketch_objective: Optional[float] = None,
) -> SelectionResult:
    # insertion order is part of the contract; callers sort where they mean to
    assignment = Assignment(sets=tuple(tuple(S) for S in sets))
    per_project = tuple(
        _objective(scn, j, assignment.sets[j], rng) for j in scn.projects
    )
    return SelectionResult(
        assignment=assignment,
        per_project=per_project,
        total=float(sum(est.value for est in per_project)),
        score_trace=trace,
        sketch_objective=sketch_objective,
    )


def greedy_topk(
    scn: Scenario,
    j: int,
    k: int,
    table: ScoreTable,
    *,
    rng: Optional[RngSpec] = None,
) -> SelectionResult:
    """Pick the k agents with the largest size-k score for project j.

    Ties go to the smaller agent id. The reported objective is exact when
    the joint outcome space fits the enumeration budget and Monte Carlo
    (seeded, default seed 0) past it.
    """
    if k < 1 or k > scn.n_agents:
        raise ValidationError(f"k must be in 1..{scn.n_agents}, got {k}")
    ranked = sorted(scn.agents, key=lambda i: (-table.get(i, j, k), i))
    trace = tuple(
        TraceStep(step=t + 1, agent=i, project=j, score=table.get(i, j, k))
        for t, i in enumerate(ranked[:k])
    )
    sets = [() if jj != j else tuple(sorted(ranked[:k])) for jj in scn.projects]
    return _result(scn, sets, trace=trace, rng=rng)


def greedy_welfare(
    scn: Scenario,
    table: ScoreTable,
    *,
    tie_rng: Optional[RngSpec] = None,
) -> SelectionResult:
    """Assign agents to projects by repeatedly taking the pair (i, j) whose
    next-slot score a_{i,j}^{r} / r is largest, with r the slot index the
    agent would fill on project j.

    Filled projects drop out; the loop ends when every project is full.
    Ties break deterministically toward the smaller agent id then the
    smaller project id, or uniformly at random when tie_rng is given.
    The accumulated per-pick scores equal the harmonic-sketch value of the
    final assignment, exposed as sketch_objective.
    """
    if table.kind != "replication":
        raise ValidationError(
            f"welfare greedy needs a replication table, got {table.kind!r}"
        )
    if max(scn.cardinalities) > table.max_r:
        raise ValidationError("table max_r does not cover the largest project")
    gen = tie_rng.generator(0) if tie_rng is not None else None
    available = list(scn.agents)
    sets: list[list[int]] = [[] for _ in scn.projects]
    open_projects = list(scn.projects)
    trace: list[TraceStep] = []
    step = 0
    while open_projects:
        best_score = -math.inf
        cands: list[tuple[int, int]] = []
        for i in available:
            for j in open_projects:
                r = len(sets[j]) + 1
                s = table.get(i, j, r) / r
                if s > best_score:
                    best_score = s
                    cands = [(i, j)]
                elif s == best_score:
                    cands.append((i, j))
        pick = cands[0] if gen is None else cands[int(gen.integers(len(cands)))]
        i, j = pick
        step += 1
        trace.append(TraceStep(step=step, agent=i, project=j, score=best_score))
        sets[j].append(i)
        available.remove(i)
        if len(sets[j]) >= scn.cardinalities[j]:
            open_projects.remove(j)
    return _result(
        scn,
        [tuple(S) for S in sets],
        trace=tuple(trace),
        sketch_objective=float(sum(t.score for t in trace)),
    )


def _subset_enum_cost(scn: Scenario, j: int, k: int) -> int:
    # total exact-evaluation work over all size-k subsets
    sizes = [len(scn.dist(i, j)) for i in scn.agents]
    n = len(sizes)
    if scn.value_fns[j].kind == "best_shot":
        # merged-support path: linear in the summed support sizes
        return math.comb(n - 1, k - 1) * sum(sizes)
    # product-space path: sum over subsets of the product of member sizes
    prev = [1] + [0] * k
    for s in sizes:
        prev = [prev[0]] + [prev[c] + s * prev[c - 1] for c in range(1, k + 1)]
    return prev[k]


def brute_force_single(scn: Scenario, j: int, k: int) -> SelectionResult:
    """Exact best size-k team for project j, by exhausting all subsets.

    Ties resolve to the lexicographically smallest subset. Raises when the
    total enumeration work would exceed the budget.
    """
    if k < 1 or k > scn.n_agents:
        raise ValidationError(f"k must be in 1..{scn.n_agents}, got {k}")
    budget = enumeration_budget()
    cost = _subset_enum_cost(scn, j, k)
    if cost > budget:
        raise BudgetExceededError(cost, budget, what="subset enumeration")
    best_S: Optional[tuple[int, ...]] = None
    best_u = -math.inf
    for S in combinations(scn.agents, k):
        u = project_utility(scn, j, S).value
        if u > best_u:
            best_u = u
            best_S = S
    assert best_S is not None
    sets = [() if jj != j else best_S for jj in scn.projects]
    return _result(scn, sets)


def _mask_of(members) -> int:
    m = 0
    for i in members:
        m |= 1 << i
    return m


def _dp_transition_count(n: int, ks) -> int:
    total = 0
    used = 0
    for k in ks:
        total += math.comb(n, used) * math.comb(n - used, k)
        used += k
    return total


def _maximize_assignment(
    scn: Scenario, value_of: Callable[[int, tuple[int, ...]], float]
) -> tuple[list[tuple[int, ...]], float]:
    """Exact argmax of sum_j value_of(j, S_j) over disjoint assignments.

    Dynamic program over sets of already-used agents, one stage per
    project; equivalent to full enumeration but shares suffixes, so the
    budget is checked against the transition count rather than the raw
    assignment count. Ties resolve to the lexicographically smallest
    (S_0, S_1, ...).
    """
    n = scn.n_agents
    ks = scn.cardinalities
    m = len(ks)
    budget = enumeration_budget()
    trans = _dp_transition_count(n, ks)
    if trans > budget:
        raise BudgetExceededError(trans, budget, what="assignment optimization")
    prefix = [0]
    for k in ks:
        prefix.append(prefix[-1] + k)
    memo: list[dict[tuple[int, ...], float]] = [dict() for _ in range(m)]

    def val(j: int, S: tuple[int, ...]) -> float:
        d = memo[j]
        if S not in d:
            d[S] = value_of(j, S)
        return d[S]

    # tables[j][mask] = best value of projects j.. given mask's agents taken
    tables: list[dict[int, float]] = [dict() for _ in range(m + 1)]
    for combo in combinations(scn.agents, prefix[m]):
        tables[m][_mask_of(combo)] = 0.0
    for j in range(m - 1, -1, -1):
        stage = tables[j]
        nxt = tables[j + 1]
        for combo in combinations(scn.agents, prefix[j]):
            mask = _mask_of(combo)
            comp = [i for i in scn.agents if not (mask >> i) & 1]
            best = -math.inf
            for S in combinations(comp, ks[j]):
                v = val(j, S) + nxt[mask | _mask_of(S)]
                if v > best:
                    best = v
            stage[mask] = best
    # walk forward, taking the smallest team that attains the table value
    sets: list[tuple[int, ...]] = []
    mask = 0
    for j in range(m):
        target = tables[j][mask]
        comp = [i for i in scn.agents if not (mask >> i) & 1]
        for S in combinations(comp, ks[j]):
            if val(j, S) + tables[j + 1][mask | _mask_of(S)] == target:
                sets.append(S)
                mask |= _mask_of(S)
                break
    return sets, tables[0][0]


def brute_force_welfare(scn: Scenario) -> SelectionResult:
    """Exact best disjoint assignment filling every project's slots.

    Ties resolve to the lexicographically smallest assignment. Raises when
    the optimization work would exceed the budget."""
    sets, _total = _maximize_assignment(
        scn, lambda j, S: project_utility(scn, j, S).value
    )
    return _result(scn, sets)


def _best_assignment_by_sketch(
    scn: Scenario, table: ScoreTable, sketch_of: str
) -> SelectionResult:
    def value(j: int, S: tuple[int, ...]) -> float:
        if sketch_of == "strong":
            return strong_sketch(table, j, S).strong
        lo, hi = minmax_sketch(table, j, S, scn.cardinalities[j])
        return lo if sketch_of == "min" else hi

    sets, best_v = _maximize_assignment(scn, value)
    return _result(scn, sets, sketch_objective=float(best_v))


def baseline_min_sketch_welfare(scn: Scenario, table: ScoreTable) -> SelectionResult:
    """Assignment maximizing the summed min-score sketch; its true welfare
    can be badly off, which is the point of keeping it around."""
    return _best_assignment_by_sketch(scn, table, "min")


def baseline_max_sketch_welfare(scn: Scenario, table: ScoreTable) -> SelectionResult:
    """Assignment maximizing the summed max-score sketch."""
    return _best_assignment_by_sketch(scn, table, "max")


def best_strong_sketch_assignment(scn: Scenario, table: ScoreTable) -> SelectionResult:
    """Assignment maximizing the summed harmonic sketch, for comparing the
    welfare greedy's accumulated sketch value against the sketch optimum."""
    return _best_assignment_by_sketch(scn, table, "strong")


@dataclass(frozen=True)
class ApproxReport:
    ratio: float
    bound: float
    satisfied: bool
    problem: str  # single | welfare

    def to_json(self) -> dict:
        return {
            "ratio": self.ratio,
            "bound": self.bound,
            "satisfied": self.satisfied,
            "problem": self.problem,
        }


def approximation_report(
    scn: Scenario, method: SelectionResult, oracle: SelectionResult
) -> ApproxReport:
    """Ratio of an algorithm's objective to the exact optimum, against the
    guarantee for the problem class.

    Single-project scenarios use the constant selection bound; multi-project
    scenarios use the assignment bound at k = largest cardinality. A zero
    optimum means every choice is optimal, reported as ratio 1.
    """
    if oracle.total <= 0.0:
        ratio = 1.0
    else:
        ratio = method.total / oracle.total
    if scn.n_projects == 1:
        problem, bound = "single", SINGLE_GREEDY_BOUND
    else:
        problem, bound = "welfare", welfare_greedy_bound(max(scn.cardinalities))
    return ApproxReport(
        ratio=ratio,
        bound=bound,
        satisfied=ratio >= bound - BOUND_TOL,
        problem=problem,
    )
