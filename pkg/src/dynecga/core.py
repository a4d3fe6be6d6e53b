"""Genomes, populations, seeded random streams and the environment clock.

A population is stored as a ``(size, length)`` ``uint8`` matrix of alleles with
an optional fitness vector. Rows are individuals, columns are loci.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ConfigurationError(ValueError):
    """Invalid sizes, lengths or names supplied by the caller."""


# Stream roles; values are part of the reproducibility contract, do not renumber.
ROLES = {
    "init": 0,
    "select": 1,
    "crossover": 2,
    "restart": 3,
}


class RandomStream:
    """Counter-based (Philox) stream keyed by ``(seed, *key)``.

    Children derived with :meth:`child` use the numpy ``SeedSequence`` spawn
    key mechanism, so ``(run, role)`` streams never share state.
    """

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.key = tuple(int(k) for k in key)
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self.gen = np.random.Generator(np.random.Philox(seq))

    def child(self, *key: int | str) -> "RandomStream":
        resolved = tuple(ROLES[k] if isinstance(k, str) else int(k) for k in key)
        return RandomStream(self.seed, self.key + resolved)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, key={self.key})"


@dataclass(frozen=True)
class Individual:
    genome: np.ndarray
    fitness: float | None = None
    evaluated_phase: int | None = None


@dataclass
class Population:
    genomes: np.ndarray
    fitness: np.ndarray | None = None
    phase: int | None = None

    def __post_init__(self):
        g = np.asarray(self.genomes, dtype=np.uint8)
        if g.ndim != 2:
            raise ConfigurationError("genomes must be a 2-D (size, length) array")
        self.genomes = g

    @property
    def size(self) -> int:
        return self.genomes.shape[0]

    @property
    def length(self) -> int:
        return self.genomes.shape[1]

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None

    def individual(self, i: int) -> Individual:
        f = None if self.fitness is None else float(self.fitness[i])
        return Individual(self.genomes[i].copy(), f, self.phase)

    def copy(self) -> "Population":
        f = None if self.fitness is None else self.fitness.copy()
        return Population(self.genomes.copy(), f, self.phase)


def random_population(size: int, genome_length: int, rng: RandomStream) -> Population:
    if size < 2:
        raise ConfigurationError(f"population size must be >= 2, got {size}")
    if genome_length < 1:
        raise ConfigurationError(f"genome length must be >= 1, got {genome_length}")
    bits = rng.gen.integers(0, 2, size=(size, genome_length), dtype=np.uint8)
    return Population(bits)


class EvaluationCounter:
    """Running count of objective evaluations for one run."""

    def __init__(self):
        self.count = 0

    def add(self, n: int):
        self.count += int(n)


def evaluate_population(pop: Population, problem, phase: int, counter: EvaluationCounter | None = None) -> Population:
    if pop.length != problem.genome_length:
        raise ConfigurationError(
            f"genome length {pop.length} does not match problem length {problem.genome_length}"
        )
    fitness = np.asarray(problem.evaluate(pop.genomes, phase), dtype=np.float64)
    if counter is not None:
        counter.add(pop.size)
    return Population(pop.genomes, fitness, phase)


@dataclass(frozen=True)
class EnvironmentClock:
    cycle_length: int
    phase_count: int = 2

    def __post_init__(self):
        if self.cycle_length < 1:
            raise ConfigurationError("cycle must be >= 1")
        if self.phase_count < 1:
            raise ConfigurationError("phase_count must be >= 1")

    def phase(self, t: int) -> int:
        return (t // self.cycle_length) % self.phase_count

    def epoch(self, t: int) -> int:
        """Number of change events that have happened up to and including ``t``."""
        return t // self.cycle_length


def oracle_change_detected(clock: EnvironmentClock, t: int) -> bool:
    if t < 0:
        raise ConfigurationError("generation must be non-negative")
    return t > 0 and t % clock.cycle_length == 0


def sentinel_change_detected(sentinel: Individual, problem, phase: int, tol: float = 1e-9) -> bool:
    """Re-evaluate a stored individual and report whether its fitness moved."""
    if sentinel.fitness is None:
        raise ValueError("sentinel must have been evaluated before")
    now = float(problem.evaluate(sentinel.genome[None, :], phase)[0])
    return abs(now - sentinel.fitness) > tol
