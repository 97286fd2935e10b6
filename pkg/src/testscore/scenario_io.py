"""Scenario files, value-function tags, and ratings ingestion.

A scenario file is a JSON document:

    {"agents": ["ann", "bob"],
     "projects": [{"name": "api", "value_fn": "best_shot", "k": 2}],
     "distributions": [
        {"agent": "ann", "project": "api", "support": [[0.0, 0.5], [2.0, 0.5]]},
        ...]}

Every (agent, project) pair must appear exactly once and unknown fields
are rejected, so a typo fails loudly instead of silently defaulting.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Optional, Union

from .core import Distribution, Scenario, ValidationError, empirical_distribution
from .production import ConcaveFn, UnitFn, ValueFunction


def value_fn_tag(g: ValueFunction) -> str:
    """Stable string tag for a value function, inverse of parse_value_fn."""
    if g.kind == "total":
        assert isinstance(g.f, ConcaveFn)
        if g.f.kind == "power":
            return f"total:power:{g.f.p!r}"
        return f"total:{g.f.kind}"
    if g.kind == "best_shot":
        return "best_shot"
    if g.kind == "top_r":
        return f"top_r:{int(g.r)}"
    if g.kind == "ces":
        return f"ces:{g.r!r}"
    assert isinstance(g.f, UnitFn)
    return f"success_prob:{g.f.kind}:{g.f.param!r}"


def parse_value_fn(tag: str) -> ValueFunction:
    """Parse a value-function tag; raises ValidationError on anything else."""
    parts = tag.split(":")
    try:
        if parts[0] == "total" and len(parts) == 2 and parts[1] in ("identity", "sqrt", "log1p"):
            return ValueFunction.total(ConcaveFn(parts[1]))
        if parts[0] == "total" and len(parts) == 3 and parts[1] == "power":
            return ValueFunction.total(ConcaveFn("power", float(parts[2])))
        if tag == "best_shot":
            return ValueFunction.best_shot()
        if parts[0] == "top_r" and len(parts) == 2:
            return ValueFunction.top_r(int(parts[1]))
        if parts[0] == "ces" and len(parts) == 2:
            return ValueFunction.ces(float(parts[1]))
        if parts[0] == "success_prob" and len(parts) == 3 and parts[1] in ("clamp_linear", "one_minus_exp"):
            return ValueFunction.success_prob(UnitFn(parts[1], float(parts[2])))
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"bad value function tag {tag!r}: {exc}") from exc
    raise ValidationError(f"unknown value function tag {tag!r}")


@dataclass(frozen=True)
class LoadedScenario:
    scenario: Scenario
    agent_names: tuple[str, ...]
    project_names: tuple[str, ...]

    def agent_index(self, name: str) -> int:
        try:
            return self.agent_names.index(name)
        except ValueError:
            raise ValidationError(f"unknown agent {name!r}") from None

    def project_index(self, name: str) -> int:
        try:
            return self.project_names.index(name)
        except ValueError:
            raise ValidationError(f"unknown project {name!r}") from None


def scenario_to_dict(
    scn: Scenario,
    agent_names: Optional[Iterable[str]] = None,
    project_names: Optional[Iterable[str]] = None,
) -> dict:
    agents = list(agent_names) if agent_names is not None else [f"a{i}" for i in scn.agents]
    projects = list(project_names) if project_names is not None else [f"p{j}" for j in scn.projects]
    if len(agents) != scn.n_agents or len(projects) != scn.n_projects:
        raise ValidationError("name lists must match the scenario shape")
    doc = {
        "agents": agents,
        "projects": [
            {"name": projects[j], "value_fn": value_fn_tag(scn.value_fns[j]), "k": scn.cardinalities[j]}
            for j in scn.projects
        ],
        "distributions": [],
    }
    for i in scn.agents:
        for j in scn.projects:
            d = scn.dist(i, j)
            doc["distributions"].append(
                {
                    "agent": agents[i],
                    "project": projects[j],
                    "support": [[v, p] for v, p in zip(d.values, d.probs)],
                }
            )
    return doc


def _require_keys(obj: dict, keys: set, what: str) -> None:
    if not isinstance(obj, dict):
        raise ValidationError(f"{what} must be an object")
    extra = set(obj) - keys
    if extra:
        raise ValidationError(f"unknown fields in {what}: {sorted(extra)}")
    missing = keys - set(obj)
    if missing:
        raise ValidationError(f"missing fields in {what}: {sorted(missing)}")


def scenario_from_dict(doc: dict) -> LoadedScenario:
    _require_keys(doc, {"agents", "projects", "distributions"}, "scenario document")
    agents = doc["agents"]
    if not isinstance(agents, list) or not agents or not all(isinstance(a, str) for a in agents):
        raise ValidationError("agents must be a non-empty list of names")
    if len(set(agents)) != len(agents):
        raise ValidationError("duplicate agent names")
    projects = doc["projects"]
    if not isinstance(projects, list) or not projects:
        raise ValidationError("projects must be a non-empty list")
    names, fns, ks = [], [], []
    for entry in projects:
        _require_keys(entry, {"name", "value_fn", "k"}, "project entry")
        if not isinstance(entry["name"], str):
            raise ValidationError("project name must be a string")
        if not isinstance(entry["k"], int) or isinstance(entry["k"], bool):
            raise ValidationError(f"project {entry['name']!r}: k must be an integer")
        names.append(entry["name"])
        fns.append(parse_value_fn(entry["value_fn"]))
        ks.append(entry["k"])
    if len(set(names)) != len(names):
        raise ValidationError("duplicate project names")
    a_idx = {a: i for i, a in enumerate(agents)}
    p_idx = {p: j for j, p in enumerate(names)}
    grid: list[list[Optional[Distribution]]] = [
        [None] * len(names) for _ in agents
    ]
    entries = doc["distributions"]
    if not isinstance(entries, list):
        raise ValidationError("distributions must be a list")
    for entry in entries:
        _require_keys(entry, {"agent", "project", "support"}, "distribution entry")
        if entry["agent"] not in a_idx:
            raise ValidationError(f"unknown agent {entry['agent']!r} in distributions")
        if entry["project"] not in p_idx:
            raise ValidationError(f"unknown project {entry['project']!r} in distributions")
        i, j = a_idx[entry["agent"]], p_idx[entry["project"]]
        if grid[i][j] is not None:
            raise ValidationError(
                f"duplicate distribution for agent {entry['agent']!r}, project {entry['project']!r}"
            )
        support = entry["support"]
        if not isinstance(support, list) or not all(
            isinstance(pair, list) and len(pair) == 2 for pair in support
        ):
            raise ValidationError(
                f"support for agent {entry['agent']!r}, project {entry['project']!r} "
                "must be a list of [value, prob] pairs"
            )
        grid[i][j] = Distribution.from_pairs((float(v), float(p)) for v, p in support)
    for i, a in enumerate(agents):
        for j, p in enumerate(names):
            if grid[i][j] is None:
                raise ValidationError(f"missing distribution for agent {a!r}, project {p!r}")
    scn = Scenario(
        dists=tuple(tuple(row) for row in grid),  # type: ignore[arg-type]
        value_fns=tuple(fns),
        cardinalities=tuple(ks),
    )
    return LoadedScenario(scn, tuple(agents), tuple(names))


def save_scenario(
    out: Union[str, Path, IO[str]],
    scn: Scenario,
    agent_names: Optional[Iterable[str]] = None,
    project_names: Optional[Iterable[str]] = None,
) -> None:
    doc = scenario_to_dict(scn, agent_names, project_names)
    if hasattr(out, "write"):
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        with open(out, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def load_scenario(src: Union[str, Path, IO[str]]) -> LoadedScenario:
    if hasattr(src, "read"):
        text = src.read()
    else:
        text = Path(src).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid scenario JSON: {exc}") from exc
    return scenario_from_dict(doc)


RATINGS_HEADER = ("coder_id", "task_id", "rating")


def read_ratings(src: Union[str, Path, IO[str]]) -> list[tuple[str, str, float]]:
    """Parse a ratings CSV (header coder_id,task_id,rating; rating in
    [0, 100]). Errors carry 1-based row numbers."""
    if hasattr(src, "read"):
        rows = list(csv.reader(src))
    else:
        with open(src, newline="") as fh:
            rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError("ratings file is empty")
    if tuple(rows[0]) != RATINGS_HEADER:
        raise ValidationError(
            f"row 1: expected header {','.join(RATINGS_HEADER)!r}, got {','.join(rows[0])!r}"
        )
    if len(rows) == 1:
        raise ValidationError("ratings file has a header but no rows")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ValidationError(f"row {lineno}: expected 3 fields, got {len(row)}")
        coder, task, raw = row
        if not coder or not task:
            raise ValidationError(f"row {lineno}: empty coder_id or task_id")
        try:
            rating = float(raw)
        except ValueError:
            raise ValidationError(f"row {lineno}: rating {raw!r} is not a number") from None
        if not (0.0 <= rating <= 100.0):
            raise ValidationError(f"row {lineno}: rating {rating} outside [0, 100]")
        out.append((coder, task, rating))
    return out


def ingest_ratings(
    rows: Iterable[tuple[str, str, float]], min_solutions: int = 10
) -> LoadedScenario:
    """Empirical per-coder distributions from rating rows, keeping coders
    with at least min_solutions ratings, as a one-project best-shot
    scenario (k = min(4, number of coders))."""
    if min_solutions < 1:
        raise ValidationError(f"min_solutions must be >= 1, got {min_solutions}")
    by_coder: dict[str, list[float]] = {}
    for coder, _task, rating in rows:
        by_coder.setdefault(coder, []).append(rating)
    kept = sorted(c for c, vals in by_coder.items() if len(vals) >= min_solutions)
    if not kept:
        raise ValidationError(
            f"no coder has {min_solutions}+ rated solutions ({len(by_coder)} coders seen)"
        )
    dists = [empirical_distribution(by_coder[c]) for c in kept]
    scn = Scenario.single_project(
        dists, ValueFunction.best_shot(), k=min(4, len(kept))
    )
    return LoadedScenario(scn, tuple(kept), ("p0",))
