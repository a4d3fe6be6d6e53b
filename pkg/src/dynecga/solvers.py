"""Run loops for static ecGA, dcGA(1), dcGA(2) and the uniform-crossover GA.

One generation evaluates the current population, selects, and recombines.
When a change is detected dcGA(1) restarts from a random population that is
immediately evaluated, selected and shuffled with the previous generation's
partition; dcGA(2) restarts from a plain random population; static ecGA and
uGA carry on unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import (
    ConfigurationError,
    EnvironmentClock,
    EvaluationCounter,
    Population,
    RandomStream,
    evaluate_population,
    oracle_change_detected,
    random_population,
    sentinel_change_detected,
)
from .model import DEFAULT_MAX_GROUP, MarginalProductModel, format_partition, greedy_model_search
from .operators import bb_wise_crossover, tournament_select, uniform_crossover

# numpy 2 renamed trapz
_trapezoid = getattr(np, "trapezoid", None) or np.trapz

VARIANTS = ("ecga_static", "dcga1", "dcga2", "uga")
DETECTION_MODES = ("oracle", "sentinel")

TRACE_FIELDS = (
    "run", "generation", "phase", "changed", "best", "mean",
    "optimum", "groups", "largest_group", "partition", "evals",
)


@dataclass(frozen=True)
class SolverConfig:
    variant: str = "dcga1"
    population_size: int = 5000
    tournament_size: int = 16
    generations: int = 100
    cycle: int = 5
    detection: str = "oracle"
    max_group_size: int = DEFAULT_MAX_GROUP

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.detection not in DETECTION_MODES:
            raise ConfigurationError(f"detection must be one of {DETECTION_MODES}, got {self.detection!r}")
        if self.population_size < 2:
            raise ConfigurationError("population_size must be >= 2")
        if not 2 <= self.tournament_size <= self.population_size:
            raise ConfigurationError("tournament_size must be in [2, population_size]")
        if self.generations < 1:
            raise ConfigurationError("generations must be >= 1")
        if self.cycle < 1:
            raise ConfigurationError("cycle must be >= 1")
        if not 1 <= self.max_group_size <= DEFAULT_MAX_GROUP:
            raise ConfigurationError(f"max_group_size must be in [1, {DEFAULT_MAX_GROUP}]")


@dataclass(frozen=True)
class TraceRecord:
    run: int
    generation: int
    phase: int
    changed: bool
    best: float
    mean: float
    optimum: float
    groups: int
    largest_group: int
    partition: str
    evals: int


@dataclass
class RunTrace:
    records: list = field(default_factory=list)
    # generation -> canonical partition that dcGA(1) used for its restart shuffle
    restart_partitions: dict = field(default_factory=dict)
    maximize: bool = True

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def best(self) -> np.ndarray:
        return self.column("best")

    @property
    def evaluations(self) -> int:
        return self.records[-1].evals if self.records else 0

    @property
    def changes(self) -> int:
        return int(self.column("changed").sum())


class Step(NamedTuple):
    offspring: Population
    model: MarginalProductModel | None
    evaluated: Population


def _best_index(fitness: np.ndarray, maximize: bool) -> int:
    return int(np.argmax(fitness) if maximize else np.argmin(fitness))


def step_ecga(pop, problem, phase, config: SolverConfig, rng: RandomStream, counter=None) -> Step:
    evaluated = evaluate_population(pop, problem, phase, counter)
    selected = tournament_select(evaluated, config.tournament_size, rng, problem.maximize)
    model = greedy_model_search(selected, config.max_group_size)
    offspring = bb_wise_crossover(selected, model.partition, pop.size, rng)
    return Step(offspring, model, evaluated)


def step_uga(pop, problem, phase, config: SolverConfig, rng: RandomStream, counter=None) -> Step:
    evaluated = evaluate_population(pop, problem, phase, counter)
    selected = tournament_select(evaluated, config.tournament_size, rng, problem.maximize)
    offspring = uniform_crossover(selected, pop.size, rng)
    return Step(offspring, None, evaluated)


def on_change_dcga2(config: SolverConfig, genome_length: int, rng: RandomStream) -> Population:
    return random_population(config.population_size, genome_length, rng)


def on_change_dcga1(problem, phase, last_model, config: SolverConfig, rng: RandomStream, counter=None) -> Population:
    """Random restart biased by one selection + shuffle round with the last partition.

    Without a previous model this is the same as :func:`on_change_dcga2`.
    """
    fresh = on_change_dcga2(config, problem.genome_length, rng)
    if last_model is None:
        return fresh
    evaluated = evaluate_population(fresh, problem, phase, counter)
    selected = tournament_select(evaluated, config.tournament_size, rng, problem.maximize)
    return bb_wise_crossover(selected, last_model.partition, config.population_size, rng)


def run(config: SolverConfig, problem, seed: int, run_index: int = 0, prior_model=None) -> RunTrace:
    """Execute ``config.generations`` generations and return the trace.

    Randomness comes from ``RandomStream(seed, (run_index,))`` and its role
    children. ``prior_model`` seeds dcGA(1)'s "last model" before the first
    generation has learned one.
    """
    if problem.genome_length < 1:
        raise ConfigurationError("problem has no loci")
    if config.tournament_size > config.population_size:
        raise ConfigurationError("tournament_size exceeds population_size")
    root = RandomStream(seed, (run_index,))
    # restarts draw from their own stream so they never shift the main loop's draws
    step_rng = root.child("select")
    restart_rng = root.child("restart")
    clock = EnvironmentClock(config.cycle, problem.phase_count if problem.phase_count > 1 else 1)
    counter = EvaluationCounter()
    trace = RunTrace(maximize=problem.maximize)
    step = step_uga if config.variant == "uga" else step_ecga
    handles_changes = config.variant in ("dcga1", "dcga2")

    env = problem
    pop = random_population(config.population_size, problem.genome_length, root.child("init"))
    last_model = prior_model
    sentinel = None

    for t in range(config.generations):
        phase = clock.phase(t)
        if oracle_change_detected(clock, t):
            env = env.advance()
        if config.detection == "oracle":
            changed = oracle_change_detected(clock, t)
        else:
            changed = sentinel is not None and sentinel_change_detected(sentinel, env, phase)
            if sentinel is not None:
                counter.add(1)

        if changed and handles_changes:
            if config.variant == "dcga1" and last_model is not None:
                trace.restart_partitions[t] = last_model.canonical()
                pop = on_change_dcga1(env, phase, last_model, config, restart_rng, counter)
            else:
                pop = on_change_dcga2(config, problem.genome_length, restart_rng)

        result = step(pop, env, phase, config, step_rng, counter)
        ev = result.evaluated
        ib = _best_index(ev.fitness, problem.maximize)
        sentinel = ev.individual(ib)
        if result.model is not None:
            last_model = result.model
            groups, largest, part = result.model.groups, result.model.largest_group, result.model.canonical()
        else:
            groups, largest, part = 0, 0, ""
        trace.records.append(
            TraceRecord(
                run=run_index,
                generation=t,
                phase=phase,
                changed=bool(changed),
                best=float(ev.fitness[ib]),
                mean=float(ev.fitness.mean()),
                optimum=float(env.optimum_value(phase)),
                groups=groups,
                largest_group=largest,
                partition=part,
                evals=counter.count,
            )
        )
        pop = result.offspring
    return trace


def predicted_convergence_time(length: int, intensity: float) -> float:
    """Generations to convergence, ``pi * sqrt(l) / I``."""
    if length < 1:
        raise ConfigurationError("length must be >= 1")
    if intensity <= 0:
        raise ConfigurationError("selection intensity must be > 0")
    return math.pi * math.sqrt(length) / intensity


def tournament_intensity(s: int, points: int = 20001) -> float:
    """Selection intensity of a size-``s`` tournament: E[max of s standard normals]."""
    if s < 1:
        raise ConfigurationError("tournament size must be >= 1")
    x = np.linspace(-10.0, 10.0, points)
    pdf = np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
    cdf = 0.5 * (1 + np.vectorize(math.erf)(x / math.sqrt(2)))
    return float(_trapezoid(s * x * pdf * cdf ** (s - 1), x))


def enumeration_cost(blocks: int, k: int) -> int:
    """Evaluations to enumerate every configuration of every block when the decomposition is known."""
    return blocks * 2**k


def partition_groups(partition: str) -> list[tuple[int, ...]]:
    """Parse a canonical partition string such as ``[0,1|2]``."""
    body = partition.strip()[1:-1]
    if not body:
        return []
    return [tuple(int(i) for i in grp.split(",")) for grp in body.split("|")]


def respects_blocks(partition, blocks) -> bool:
    """True when every block is a union of groups of ``partition``."""
    groups = partition_groups(partition) if isinstance(partition, str) else partition
    owner = {}
    for j, block in enumerate(blocks):
        for i in block:
            owner[i] = j
    return all(len({owner[i] for i in grp}) == 1 for grp in groups)


__all__ = [
    "SolverConfig", "RunTrace", "TraceRecord", "Step", "VARIANTS", "TRACE_FIELDS",
    "step_ecga", "step_uga", "on_change_dcga1", "on_change_dcga2", "run",
    "predicted_convergence_time", "tournament_intensity", "enumeration_cost",
    "format_partition", "partition_groups", "respects_blocks",
]
