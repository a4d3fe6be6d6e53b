"""Selection and recombination. There is no mutation operator."""

from __future__ import annotations

import numpy as np

from .core import ConfigurationError, Population, RandomStream
from .model import canonical_partition

DEFAULT_TOURNAMENT = 16


def tournament_select(pop: Population, s: int, rng: RandomStream, maximize: bool = True) -> Population:
    """Tournament selection without replacement.

    Each pass shuffles the population, cuts it into ``size // s`` disjoint
    tournaments (a trailing short block sits out) and keeps every winner.
    Passes repeat until ``size`` winners exist; the last pass is truncated.
    Ties inside a tournament go to the earlier entrant in the shuffle.
    """
    if not pop.evaluated:
        raise ValueError("tournament selection needs an evaluated population")
    n = pop.size
    if not 2 <= s <= n:
        raise ConfigurationError(f"tournament size must be in [2, {n}], got {s}")
    per_pass = n // s
    fitness = pop.fitness if maximize else -pop.fitness
    winners = []
    need = n
    while need > 0:
        order = rng.gen.permutation(n)[: per_pass * s].reshape(per_pass, s)
        best = order[np.arange(per_pass), np.argmax(fitness[order], axis=1)]
        winners.append(best[:need])
        need -= len(winners[-1])
    chosen = np.concatenate(winners)
    return Population(pop.genomes[chosen], pop.fitness[chosen], pop.phase)


def bb_wise_crossover(selected: Population, partition, out_size: int, rng: RandomStream) -> Population:
    """Build each offspring group by group, copying every group from an
    independently drawn member of ``selected``."""
    if selected.size == 0:
        raise ValueError("cannot recombine an empty selection")
    groups = canonical_partition(partition, selected.length)
    child = np.empty((out_size, selected.length), dtype=np.uint8)
    for grp in groups:
        idx = np.asarray(grp)
        donors = rng.gen.integers(0, selected.size, size=out_size)
        child[:, idx] = selected.genomes[donors[:, None], idx[None, :]]
    return Population(child)


def uniform_crossover(selected: Population, out_size: int, rng: RandomStream) -> Population:
    """Uniform crossover over random disjoint parent pairs; each pair yields
    two complementary children. Pairing passes repeat until ``out_size``."""
    n, l = selected.size, selected.length
    if n < 2:
        raise ValueError("uniform crossover needs at least two parents")
    pairs_per_pass = n // 2
    chunks = []
    made = 0
    while made < out_size:
        order = rng.gen.permutation(n)[: 2 * pairs_per_pass].reshape(pairs_per_pass, 2)
        p1 = selected.genomes[order[:, 0]]
        p2 = selected.genomes[order[:, 1]]
        swap = rng.gen.random((pairs_per_pass, l)) < 0.5
        c1 = np.where(swap, p2, p1)
        c2 = np.where(swap, p1, p2)
        # interleave so children of one pair stay adjacent
        both = np.empty((2 * pairs_per_pass, l), dtype=np.uint8)
        both[0::2] = c1
        both[1::2] = c2
        chunks.append(both)
        made += len(both)
    return Population(np.concatenate(chunks)[:out_size])
