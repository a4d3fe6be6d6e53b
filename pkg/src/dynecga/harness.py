"""Batch execution, aggregation and file output for experiment grids.

Per batch output directory::

    run_<r>.csv      one trace per run
    aggregate.csv    per-generation mean/std/min/max of the best fitness
    plot.dat         generation, mean best, optimum
    plot.gp          gnuplot script reading plot.dat
    config.json      the configuration that produced the batch
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .core import ConfigurationError
from .problems import PROBLEMS, make_problem
from .solvers import TRACE_FIELDS, VARIANTS, RunTrace, SolverConfig, run

log = logging.getLogger(__name__)

DEFAULT_TRAP_TOL = 1e-9
DEFAULT_PARABOLA_TOL = 0.02


class BatchError(RuntimeError):
    """A run inside a batch raised; the message names its seed."""


@dataclass(frozen=True)
class ExperimentConfig:
    problem: dict
    variant: str
    population_size: int = 5000
    tournament_size: int = 16
    generations: int = 100
    cycle: int = 5
    runs: int = 30
    base_seed: int = 0
    output_dir: str = "results"
    detection: str = "oracle"

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            variant=self.variant,
            population_size=self.population_size,
            tournament_size=self.tournament_size,
            generations=self.generations,
            cycle=self.cycle,
            detection=self.detection,
        )

    def build_problem(self):
        return make_problem(self.problem)

    def to_dict(self) -> dict:
        return asdict(self)

    def scaled(self, factor: float) -> "ExperimentConfig":
        """Shrink (or grow) population and run count by ``factor``."""
        if factor <= 0:
            raise ConfigurationError("scale must be > 0")
        pop = max(2 * self.tournament_size, int(round(self.population_size * factor)))
        runs = max(1, int(round(self.runs * factor)))
        return replace(self, population_size=pop, runs=runs)


_INT_FIELDS = ("population_size", "tournament_size", "generations", "cycle", "runs", "base_seed")
_MINIMUM = {"population_size": 2, "tournament_size": 2, "generations": 1, "cycle": 1, "runs": 1, "base_seed": 0}


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigurationError("configuration must be a JSON object")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigurationError(f"unknown field(s): {', '.join(sorted(unknown))}")
    for required in ("problem", "variant"):
        if required not in raw:
            raise ConfigurationError(f"{required} is required")
    if raw["variant"] not in VARIANTS:
        raise ConfigurationError(f"variant must be one of {', '.join(VARIANTS)}; got {raw['variant']!r}")
    for name in _INT_FIELDS:
        if name in raw:
            value = raw[name]
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigurationError(f"{name} must be an integer")
            if value < _MINIMUM[name]:
                raise ConfigurationError(f"{name} must be ≥ {_MINIMUM[name]}")
    cfg = ExperimentConfig(**raw)
    if cfg.base_seed >= 2**64:
        raise ConfigurationError("base_seed must fit in 64 bits")
    if cfg.tournament_size > cfg.population_size:
        raise ConfigurationError("tournament_size must be ≤ population_size")
    if cfg.detection not in ("oracle", "sentinel"):
        raise ConfigurationError("detection must be 'oracle' or 'sentinel'")
    if not isinstance(cfg.output_dir, str):
        raise ConfigurationError("output_dir must be a string")
    cfg.build_problem()
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: not valid JSON ({exc})") from None
    return config_from_dict(raw)


def fmt(x: float) -> str:
    return f"{x:.9g}"


def trace_rows(trace: RunTrace):
    for r in trace.records:
        yield [
            r.run, r.generation, r.phase, int(r.changed), fmt(r.best), fmt(r.mean),
            fmt(r.optimum), r.groups, r.largest_group, r.partition, r.evals,
        ]


def write_trace(trace: RunTrace, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(TRACE_FIELDS)
        w.writerows(trace_rows(trace))


def read_trace_column(path, name: str) -> np.ndarray:
    with open(path, newline="") as f:
        return np.array([float(row[name]) for row in csv.DictReader(f)])


@dataclass
class AggregateSeries:
    mean: np.ndarray
    std: np.ndarray
    min: np.ndarray
    max: np.ndarray
    optimum: np.ndarray
    maximize: bool = True

    def __len__(self):
        return len(self.mean)


def aggregate(traces: list[RunTrace]) -> AggregateSeries:
    """Statistics of the best-of-generation fitness across runs, in run order.

    Values are taken at the printed precision so the aggregate matches the
    per-run files exactly.
    """
    if not traces:
        raise ValueError("nothing to aggregate")
    best = np.array([[float(fmt(b)) for b in t.best] for t in traces])
    opt = np.array([float(fmt(o)) for o in traces[0].column("optimum")])
    return AggregateSeries(
        mean=best.mean(axis=0),
        std=best.std(axis=0),
        min=best.min(axis=0),
        max=best.max(axis=0),
        optimum=opt,
        maximize=traces[0].maximize,
    )


def write_aggregate(agg: AggregateSeries, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["generation", "mean", "std", "min", "max", "optimum"])
        for t in range(len(agg)):
            w.writerow([t, fmt(agg.mean[t]), fmt(agg.std[t]), fmt(agg.min[t]), fmt(agg.max[t]), fmt(agg.optimum[t])])


_GNUPLOT = """\
# gnuplot script; run with: gnuplot {script}
# objective: {sense}
set terminal pngcairo size 640,480
set output '{png}'
set xlabel 'generation'
set ylabel 'mean best fitness'
set title '{title} ({better} is better)'
set key {key}
plot '{data}' using 1:2 with lines title 'mean best', \\
     '{data}' using 1:3 with lines dashtype 2 title 'optimum'
"""


def emit_plot_data(agg: AggregateSeries, path, title: str = "") -> Path:
    """Write ``path`` (data) plus a gnuplot script next to it; returns the script path."""
    path = Path(path)
    with open(path, "w", newline="") as f:
        f.write("# generation mean_best optimum\n")
        for t in range(len(agg)):
            f.write(f"{t} {fmt(agg.mean[t])} {fmt(agg.optimum[t])}\n")
    script = path.with_suffix(".gp")
    script.write_text(
        _GNUPLOT.format(
            script=script.name,
            sense="maximize" if agg.maximize else "minimize (descending is better)",
            png=path.with_suffix(".png").name,
            title=title or path.parent.name,
            better="higher" if agg.maximize else "lower",
            key="bottom right" if agg.maximize else "top right",
            data=path.name,
        )
    )
    return script


@dataclass
class RecoveryReport:
    # generations from cycle start to first hit, None when never hit
    per_cycle: list
    first_cycle: int = 0

    @property
    def fraction(self) -> float:
        return sum(x is not None for x in self.per_cycle) / len(self.per_cycle) if self.per_cycle else 0.0


def recovery_statistics(trace: RunTrace, cycle: int, tolerance: float | None = None, from_cycle: int = 0) -> RecoveryReport:
    """Per environment cycle, generations until best-of-generation comes
    within ``tolerance`` of the optimum recorded in the trace.

    Cycles before ``from_cycle`` are skipped (1 = only cycles after the first change).
    """
    if tolerance is None:
        tolerance = DEFAULT_TRAP_TOL if trace.maximize else DEFAULT_PARABOLA_TOL
    best = trace.best
    opt = trace.column("optimum")
    g = len(best)
    out = []
    for c in range(from_cycle, (g + cycle - 1) // cycle):
        lo, hi = c * cycle, min(g, (c + 1) * cycle)
        gap = best[lo:hi] - opt[lo:hi]
        hit = np.flatnonzero(np.abs(gap) <= tolerance)
        out.append(int(hit[0]) if hit.size else None)
    return RecoveryReport(out, from_cycle)


def _run_one(args):
    solver_cfg, problem, seed, run_index = args
    try:
        return run(solver_cfg, problem, seed, run_index)
    except Exception as exc:  # re-raised in the parent with the seed attached
        raise BatchError(f"run {run_index} (seed {seed}) failed: {exc!r}") from exc


@dataclass
class BatchResult:
    config: ExperimentConfig
    traces: list
    aggregate: AggregateSeries
    files: list = field(default_factory=list)


def run_batch(config: ExperimentConfig, threads: int = 1, write: bool = True, run_keys=None, out_dir=None) -> BatchResult:
    """Run ``config.runs`` independent runs and aggregate them.

    ``run_keys`` overrides the default ``[(base_seed, r) for r in range(runs)]``.
    Files are written after all runs finish, in run order, so thread count
    never changes the bytes on disk.
    """
    solver_cfg = config.solver_config()
    problem = config.build_problem()
    if run_keys is None:
        run_keys = [(config.base_seed, r) for r in range(config.runs)]
    jobs = [(solver_cfg, problem, seed, r) for seed, r in run_keys]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(_run_one, jobs))
    else:
        traces = [_run_one(j) for j in jobs]
    agg = aggregate(traces)
    result = BatchResult(config, traces, agg)
    if write:
        out = Path(out_dir or config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        for (_, r), trace in zip(run_keys, traces):
            p = out / f"run_{r}.csv"
            write_trace(trace, p)
            result.files.append(p)
        write_aggregate(agg, out / "aggregate.csv")
        script = emit_plot_data(agg, out / "plot.dat", title=out.name)
        (out / "config.json").write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")
        result.files += [out / "aggregate.csv", out / "plot.dat", script, out / "config.json"]
    return result


SUMMARY_FIELDS = ("cell", "recovered_fraction", "final_mean_best", "evaluations")


def summarize(cell: str, batch: BatchResult) -> dict:
    fractions = [recovery_statistics(t, batch.config.cycle).fraction for t in batch.traces]
    return {
        "cell": cell,
        "recovered_fraction": float(np.mean(fractions)),
        "final_mean_best": float(batch.aggregate.mean[-1]),
        "evaluations": int(np.mean([t.evaluations for t in batch.traces])),
    }


def write_summary(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        for row in rows:
            w.writerow([row["cell"], fmt(row["recovered_fraction"]), fmt(row["final_mean_best"]), row["evaluations"]])


DYNAMIC_VARIANTS = ("dcga1", "dcga2", "uga")
CYCLES = (5, 10)


def experiment_grid(exp_id: int, base_seed: int = 0) -> list[tuple[str, ExperimentConfig]]:
    """Configuration cells for one of the four experiments, at paper scale."""
    problems = []
    if exp_id == 1:
        for k in (3, 4, 5):
            for m in (5, 10, 15, 20):
                problems.append((f"trap{k}_m{m}", {"type": "dynamic_trap", "k": k, "blocks": m}))
    elif exp_id == 2:
        for m in (5, 10, 15, 20):
            problems.append((f"mtrap4_m{m}", {"type": "modified_trap4", "blocks": m}))
    elif exp_id == 3:
        for length in range(12, 85, 12):
            problems.append((f"switch_l{length}", {"type": "switching_trap", "length": length}))
    elif exp_id == 4:
        problems.append(("parabola", {"type": "moving_parabola"}))
    else:
        raise ConfigurationError(f"experiment id must be 1-4, got {exp_id}")
    cells = []
    for pname, pspec in problems:
        for tau in CYCLES:
            for variant in DYNAMIC_VARIANTS:
                name = f"exp{exp_id}_{pname}_tau{tau}_{variant}"
                cfg = ExperimentConfig(problem=pspec, variant=variant, cycle=tau, base_seed=base_seed, output_dir=name)
                cells.append((name, cfg))
    return cells


def replicate_experiment(exp_id: int, out_dir, scale: float = 1.0, threads: int = 1, base_seed: int = 0) -> list[dict]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for name, cfg in experiment_grid(exp_id, base_seed):
        cfg = cfg.scaled(scale)
        log.info("cell %s: pop %d, runs %d", name, cfg.population_size, cfg.runs)
        batch = run_batch(cfg, threads=threads, out_dir=out / name)
        rows.append(summarize(name, batch))
    write_summary(rows, out / "summary.csv")
    return rows


def problem_catalog() -> dict:
    return {name: " ".join((cls.__doc__ or "").split("\n\n")[0].split()) for name, cls in PROBLEMS.items()}
