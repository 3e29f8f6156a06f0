"""Benchmark harness: run grids, persist records, build performance
profiles and progress curves."""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exceptions import MissingCell
from .problems import NoisyVariant, make_problem, random_start
from .solver import SolverParams, bcscg_ds

_log = logging.getLogger(__name__)

SOLVER_NAME = "bcscg-ds"
ALPHA_POINTS = 256
PROFILE_HEADER = ("solver", "alpha", "rho")
CURVE_HEADER = ("solver", "normalized_evals", "median_best")


@dataclass
class RunRecord:
    """One solver run on one problem cell.

    ``best_history`` holds ``(evaluation_count, best_value)`` pairs with raw
    (not normalized) counts.
    """

    problem: str
    dimension: int
    variant: str
    eps_f: float
    seed: int
    solver: str
    initial_value: float
    best_history: list[tuple[int, float]]
    budget: int

    def __post_init__(self):
        self.best_history = [(int(c), float(v)) for c, v in self.best_history]
        counts = [c for c, _ in self.best_history]
        values = [v for _, v in self.best_history]
        if not self.best_history:
            raise ValueError("best_history must not be empty")
        if any(b <= a for a, b in zip(counts, counts[1:])):
            raise ValueError("history counts must be strictly increasing")
        if any(b > a for a, b in zip(values, values[1:])):
            raise ValueError("history values must be nonincreasing")
        if values[0] != self.initial_value:
            raise ValueError("initial_value must equal the first history value")

    @property
    def instance(self) -> tuple:
        return (self.problem, self.dimension, self.variant, self.eps_f, self.seed)

    @property
    def final_value(self) -> float:
        return self.best_history[-1][1]

    def to_json(self) -> str:
        d = asdict(self)
        d["best_history"] = [[c, v] for c, v in self.best_history]
        return json.dumps(d, sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        expected = {f.name for f in fields(cls)}
        if set(d) != expected:
            raise ValueError(
                f"record fields {sorted(d)} differ from {sorted(expected)}"
            )
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls.from_dict(json.loads(text))

    def file_name(self) -> str:
        return (
            f"{self.solver}__{self.problem}__n{self.dimension}__{self.variant}"
            f"__eps{self.eps_f:g}__s{self.seed}.json"
        )


def save_record(record: RunRecord, directory) -> Path:
    path = Path(directory) / record.file_name()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(record.to_json() + "\n")
    return path


def load_records(directory) -> list[RunRecord]:
    """Read every ``*.json`` record in ``directory`` in file-name order."""
    return [RunRecord.from_json(p.read_text()) for p in sorted(Path(directory).glob("*.json"))]


# ------------------------------------------------------------------ running


def run_cell(
    problem: str,
    dimension: int,
    variant: str,
    seed: int,
    eps_f: float = 1e-3,
    params: SolverParams | None = None,
) -> RunRecord:
    """Run the solver once; the seed fixes the uniform starting point."""
    params = params or SolverParams()
    objective = NoisyVariant(make_problem(problem, dimension), variant, eps_f)
    x0 = random_start(objective.box, seed)
    trace = bcscg_ds(objective, x0, objective.box, params)
    return RunRecord(
        problem=problem,
        dimension=dimension,
        variant=objective.kind.value,
        eps_f=float(eps_f),
        seed=int(seed),
        solver=SOLVER_NAME,
        initial_value=trace.best_history[0][1],
        best_history=trace.best_history,
        budget=params.evaluation_budget(dimension),
    )


@dataclass
class ExperimentResult:
    paths: list[Path] = field(default_factory=list)
    failures: list[tuple[tuple, str]] = field(default_factory=list)


def _cells(config: dict):
    eps_f = float(config.get("eps_f", 1e-3))
    for problem in config["problems"]:
        for dim in config["dims"]:
            for variant in config["variants"]:
                for seed in config["seeds"]:
                    yield (problem, int(dim), variant, int(seed), eps_f)


def _run_and_save(cell, params_dict, out):
    problem, dim, variant, seed, eps_f = cell
    record = run_cell(problem, dim, variant, seed, eps_f, SolverParams(**params_dict))
    return save_record(record, out)


def run_experiment(config: dict, out, workers: int = 1) -> ExperimentResult:
    """Run every cell of ``config`` and write one JSON record per cell.

    ``config`` holds ``problems``, ``dims``, ``variants``, ``seeds``,
    optional ``params`` (:class:`SolverParams` fields) and ``eps_f``.
    A failing cell is logged with its coordinates and skipped.
    """
    params_dict = dict(config.get("params", {}))
    SolverParams(**params_dict)  # fail fast on bad parameters
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    cells = list(_cells(config))
    result = ExperimentResult()

    def record_failure(cell, exc):
        _log.error("cell %s failed: %s", cell, exc)
        result.failures.append((cell, f"{type(exc).__name__}: {exc}"))

    if workers <= 1:
        for cell in cells:
            try:
                result.paths.append(_run_and_save(cell, params_dict, out))
            except Exception as exc:
                record_failure(cell, exc)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [(c, pool.submit(_run_and_save, c, params_dict, out)) for c in cells]
            for cell, fut in futures:
                try:
                    result.paths.append(fut.result())
                except Exception as exc:
                    record_failure(cell, exc)
    return result


# ----------------------------------------------------------------- profiles


def convergence_test(f0: float, fs: float, fL: float, tau: float) -> bool:
    """``f0 - fs >= (1 - tau) (f0 - fL)``."""
    return f0 - fs >= (1.0 - tau) * (f0 - fL)


def performance_ratio(cost: float, best_cost: float, converged: bool) -> float:
    return cost / best_cost if converged else math.inf


def first_converged_count(history, f0: float, fL: float, tau: float) -> float:
    """Smallest evaluation count whose best value passes the test, else inf."""
    for count, value in history:
        if convergence_test(f0, value, fL, tau):
            return float(count)
    return math.inf


@dataclass
class ProfileTable:
    tau: float
    solvers: list[str]
    instances: list[tuple]
    ratios: dict[tuple, float]
    alphas: np.ndarray
    curves: dict[str, np.ndarray]

    def rho(self, solver: str, alpha: float) -> float:
        r = [self.ratios[(solver, p)] for p in self.instances]
        return sum(v <= alpha for v in r) / len(r)


def _median(values: Sequence[float]) -> float:
    return float(np.median(np.asarray(values, dtype=float)))


def _median_history(records: Sequence[RunRecord]) -> list[tuple[int, float]]:
    last = max(r.best_history[-1][0] for r in records)
    counts = range(1, last + 1)
    return [(c, _median([_value_at(r, c) for r in records])) for c in counts]


def _value_at(record: RunRecord, count: float) -> float:
    value = record.initial_value
    for c, v in record.best_history:
        if c > count:
            break
        value = v
    return value


def performance_profile(
    records: Iterable[RunRecord], tau: float, mode: str = "seed"
) -> ProfileTable:
    """Performance profile of the solvers present in ``records``.

    Parameters
    ----------
    records : iterable of RunRecord
    tau : float
        Convergence tolerance in ``(0, 1]``.
    mode : {"seed", "median"}
        ``"seed"`` treats each seed as an instance. ``"median"`` groups seeds
        of a (problem, dimension, variant) cell and uses the median history.

    Raises
    ------
    MissingCell
        When some solver lacks a record for some instance, or has two.
    """
    if mode not in ("seed", "median"):
        raise ValueError(f"unknown mode {mode!r}")
    records = list(records)
    if not records:
        raise ValueError("no records")
    grouped: dict[tuple, list[RunRecord]] = {}
    for r in records:
        inst = r.instance if mode == "seed" else r.instance[:4]
        grouped.setdefault((r.solver, inst), []).append(r)

    solvers = sorted({s for s, _ in grouped})
    instances = sorted({p for _, p in grouped})
    histories, f0s = {}, {}
    for s in solvers:
        for p in instances:
            group = grouped.get((s, p))
            if not group:
                raise MissingCell(f"solver {s} has no record for {p}")
            if mode == "seed":
                if len(group) != 1:
                    raise MissingCell(f"solver {s} has {len(group)} records for {p}")
                histories[s, p] = group[0].best_history
                f0s[s, p] = group[0].initial_value
            else:
                histories[s, p] = _median_history(group)
                f0s[s, p] = _median([g.initial_value for g in group])

    ratios = {}
    for p in instances:
        fL = min(histories[s, p][-1][1] for s in solvers)
        costs = {s: first_converged_count(histories[s, p], f0s[s, p], fL, tau) for s in solvers}
        best = min(costs.values())
        for s in solvers:
            ratios[s, p] = performance_ratio(costs[s], best, math.isfinite(costs[s]))

    finite = [v for v in ratios.values() if math.isfinite(v)]
    top = max(finite, default=1.0)
    alphas = np.logspace(0.0, math.log10(top), ALPHA_POINTS)
    curves = {}
    for s in solvers:
        r = np.array([ratios[s, p] for p in instances])
        curves[s] = np.array([np.count_nonzero(r <= a) / r.size for a in alphas])
    return ProfileTable(tau, solvers, instances, ratios, alphas, curves)


# ----------------------------------------------------------- progress curves


def progress_curve(
    records: Sequence[RunRecord], checkpoints: Iterable[float]
) -> list[tuple[float, float]]:
    """Median best value across ``records`` at each normalized checkpoint.

    Checkpoint ``c`` means ``c * (n + 1)`` evaluations. Before the first
    evaluation each record contributes its initial value.
    """
    records = list(records)
    if not records:
        raise ValueError("progress_curve needs at least one record")
    scale = records[0].dimension + 1
    return [
        (float(c), _median([_value_at(r, c * scale) for r in records]))
        for c in checkpoints
    ]


def default_checkpoints(records: Sequence[RunRecord]) -> list[float]:
    n1 = records[0].dimension + 1
    top = math.ceil(max(r.best_history[-1][0] for r in records) / n1)
    return [float(c) for c in range(top + 1)]


def curve_rows(records: Sequence[RunRecord], problem, dimension, variant):
    """Per-solver progress-curve rows for one (problem, dimension, variant)."""
    selected = [
        r for r in records
        if r.problem == problem and r.dimension == dimension and r.variant == variant
    ]
    if not selected:
        raise MissingCell(f"no records for {problem} n={dimension} {variant}")
    rows = []
    for solver in sorted({r.solver for r in selected}):
        mine = [r for r in selected if r.solver == solver]
        for c, m in progress_curve(mine, default_checkpoints(mine)):
            rows.append((solver, c, m))
    return rows


def write_profile_csv(table: ProfileTable, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PROFILE_HEADER)
        for s in table.solvers:
            for a, r in zip(table.alphas, table.curves[s]):
                w.writerow((s, repr(float(a)), repr(float(r))))


def write_curve_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CURVE_HEADER)
        for s, c, m in rows:
            w.writerow((s, repr(float(c)), repr(float(m))))
