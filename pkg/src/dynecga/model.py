"""Marginal product models scored by minimum description length.

Entropies are in bits. For a partition of the loci into groups and a
population of ``N`` genomes:

    compressed population complexity = N * sum_I H(group_I)
    model complexity                 = log2(N + 1) * sum_I (2**size_I - 1)
    MDL                              = the sum of the two

:func:`greedy_model_search` starts from singletons and keeps applying the
pairwise merge with the largest MDL decrease until no merge decreases it.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2

import numpy as np

from . import _kernels
from .core import ConfigurationError, Population

DEFAULT_MAX_GROUP = 20
TIE_RTOL = 1e-12


def _genomes(pop) -> np.ndarray:
    g = pop.genomes if isinstance(pop, Population) else np.asarray(pop, dtype=np.uint8)
    if g.ndim != 2 or g.shape[0] == 0:
        raise ConfigurationError("population must be a non-empty (size, length) array")
    return g


def canonical_partition(groups, length: int | None = None, max_group_size: int | None = None):
    """Return ``groups`` as a sorted tuple of sorted tuples after validating it."""
    canon = tuple(sorted(tuple(sorted(int(i) for i in g)) for g in groups))
    seen = set()
    for g in canon:
        if not g:
            raise ConfigurationError("empty group in partition")
        if max_group_size is not None and len(g) > max_group_size:
            raise ConfigurationError(f"group of size {len(g)} exceeds cap {max_group_size}")
        for i in g:
            if i in seen:
                raise ConfigurationError(f"locus {i} appears in more than one group")
            seen.add(i)
    if length is not None and seen != set(range(length)):
        raise ConfigurationError(f"partition does not cover loci 0..{length - 1} exactly")
    return canon


def format_partition(groups) -> str:
    return "[" + "|".join(",".join(str(i) for i in g) for g in canonical_partition(groups)) + "]"


def group_codes(genomes: np.ndarray, group) -> np.ndarray:
    """Integer configuration of each genome on ``group`` (first locus is the most significant bit)."""
    idx = np.asarray(group, dtype=np.int64)
    if idx.size == 0:
        raise ConfigurationError("group must be non-empty")
    if idx.min() < 0 or idx.max() >= genomes.shape[1]:
        raise ConfigurationError(f"group {tuple(group)} out of range for length {genomes.shape[1]}")
    weights = 1 << np.arange(idx.size - 1, -1, -1, dtype=np.int64)
    return genomes[:, idx].astype(np.int64) @ weights


def _configuration_counts(genomes, group) -> np.ndarray:
    _, counts = np.unique(group_codes(genomes, group), return_counts=True)
    return counts


def group_entropy(pop, group) -> float:
    g = _genomes(pop)
    p = _configuration_counts(g, group) / g.shape[0]
    return float(max(0.0, -(p * np.log2(p)).sum()))


def compressed_population_complexity(pop, partition) -> float:
    g = _genomes(pop)
    groups = canonical_partition(partition, g.shape[1])
    return g.shape[0] * sum(group_entropy(g, grp) for grp in groups)


def model_complexity(partition, n: int) -> float:
    if n < 1:
        raise ConfigurationError("N must be >= 1")
    return log2(n + 1) * sum(2 ** len(grp) - 1 for grp in partition)


@dataclass(frozen=True)
class MdlScore:
    compressed_population_complexity: float
    model_complexity: float

    @property
    def total(self) -> float:
        return self.compressed_population_complexity + self.model_complexity


def mdl_score(pop, partition) -> MdlScore:
    g = _genomes(pop)
    return MdlScore(
        compressed_population_complexity(g, partition),
        model_complexity(canonical_partition(partition, g.shape[1]), g.shape[0]),
    )


@dataclass(frozen=True)
class MarginalProductModel:
    """Partition plus per-group configuration counts from a source population.

    ``tables[i]`` is a dense count array of length ``2**size`` when that is at
    most ``n``; otherwise a dict ``{configuration: count}`` of observed
    configurations.
    """

    partition: tuple
    tables: tuple
    n: int

    @property
    def groups(self) -> int:
        return len(self.partition)

    @property
    def largest_group(self) -> int:
        return max((len(g) for g in self.partition), default=0)

    def canonical(self) -> str:
        return format_partition(self.partition)

    def counts(self, i: int) -> dict:
        t = self.tables[i]
        if isinstance(t, dict):
            return dict(t)
        return {c: int(v) for c, v in enumerate(t)}

    def probabilities(self, i: int) -> dict:
        return {c: v / self.n for c, v in self.counts(i).items()}

    def score(self, pop) -> MdlScore:
        return mdl_score(pop, self.partition)


def estimate_tables(partition, pop, max_group_size: int = DEFAULT_MAX_GROUP) -> MarginalProductModel:
    g = _genomes(pop)
    n, l = g.shape
    groups = canonical_partition(partition, l, max_group_size)
    tables = []
    for grp in groups:
        codes = group_codes(g, grp)
        if 2 ** len(grp) <= n:
            tables.append(np.bincount(codes, minlength=2 ** len(grp)))
        else:
            keys, counts = np.unique(codes, return_counts=True)
            tables.append({int(k): int(c) for k, c in zip(keys, counts)})
    return MarginalProductModel(groups, tuple(tables), n)


def _clogc_table(n: int) -> np.ndarray:
    c = np.arange(n + 1, dtype=np.float64)
    out = np.zeros(n + 1)
    out[1:] = c[1:] * np.log2(c[1:])
    return out


def _relabel(key: np.ndarray, bound: int):
    """Map keys in ``[0, bound)`` to compact ids ordered by key value."""
    if bound <= 4 * key.size:
        present = np.bincount(key, minlength=bound) > 0
        ids = np.cumsum(present) - 1
        return ids[key].astype(np.int32), int(present.sum())
    uniq, inv = np.unique(key, return_inverse=True)
    return inv.astype(np.int32), len(uniq)


def greedy_model_search(pop, max_group_size: int = DEFAULT_MAX_GROUP, kernel=None) -> MarginalProductModel:
    """Greedy agglomerative MDL search from the all-singleton partition.

    Ties on the MDL decrease (within ``TIE_RTOL`` relative) go to the pair
    whose group minima are lexicographically smallest. ``kernel`` overrides
    the pair-scoring backend (used by the benchmark).
    """
    pair_clogc = kernel or _kernels.pair_clogc
    g = _genomes(pop)
    n, l = g.shape
    clogc = _clogc_table(n)
    log_n1 = log2(n + 1)
    n_log_n = n * log2(n)

    # Slot s holds the group whose smallest locus is s. Labels are compact
    # configuration ids of each individual within the group.
    labels = np.ascontiguousarray(g.T, dtype=np.int32)
    card = np.empty(l, dtype=np.int64)
    own = np.empty(l)
    for s in range(l):
        counts = np.bincount(labels[s])
        card[s] = max(len(counts), 1)
        own[s] = clogc[counts[counts > 0]].sum()
    members = [[s] for s in range(l)]
    sizes = np.ones(l, dtype=np.int64)
    active = np.ones(l, dtype=bool)
    delta = np.full((l, l), np.inf)
    workspace = np.zeros(0, dtype=np.int32)

    def score_pairs(ia, ib, joint=None):
        ia = np.asarray(ia, dtype=np.int64)
        ib = np.asarray(ib, dtype=np.int64)
        ok = sizes[ia] + sizes[ib] <= max_group_size
        ia, ib = ia[ok], ib[ok]
        if ia.size == 0:
            return
        nonlocal workspace
        if joint is None:
            need = int((card[ia] * card[ib]).max())
            if workspace.size < need:
                workspace = np.zeros(max(need, 2 * workspace.size), dtype=np.int32)
            joint = np.empty(ia.size)
            pair_clogc(labels, card, ia, ib, clogc, joint, workspace)
        else:
            joint = joint[ok]
        # per group: N*H = N*log2(N) - sum_c c*log2(c)
        d_cpc = own[ia] + own[ib] - joint - n_log_n
        sa, sb = sizes[ia], sizes[ib]
        d_mc = log_n1 * ((2.0 ** (sa + sb) - 1) - (2.0**sa - 1) - (2.0**sb - 1))
        delta[ia, ib] = d_cpc + d_mc

    if l > 1:
        # singleton pairs in closed form: 2x2 joint counts from the Gram matrix
        ia, ib = np.triu_indices(l, k=1)
        x = g.astype(np.float64)
        ones = x.sum(axis=0)
        c11 = (x.T @ x)[ia, ib]
        c10 = ones[ia] - c11
        c01 = ones[ib] - c11
        c00 = n - ones[ia] - ones[ib] + c11
        cells = np.rint(np.stack([c00, c01, c10, c11])).astype(np.int64)
        score_pairs(ia, ib, clogc[cells].sum(axis=0))

    while True:
        best = delta.min()
        if not best < 0:
            break
        tol = TIE_RTOL * abs(best)
        a, b = np.argwhere(delta <= best + tol)[0]
        labels[a], card[a] = _relabel(labels[a].astype(np.int64) * card[b] + labels[b], card[a] * card[b])
        counts = np.bincount(labels[a])
        own[a] = clogc[counts].sum()
        members[a] = sorted(members[a] + members[b])
        sizes[a] += sizes[b]
        active[b] = False
        delta[b, :] = np.inf
        delta[:, b] = np.inf
        delta[a, :] = np.inf
        delta[:, a] = np.inf
        others = np.flatnonzero(active)
        others = others[others != a]
        lo = np.minimum(others, a)
        hi = np.maximum(others, a)
        score_pairs(lo, hi)

    partition = tuple(tuple(members[s]) for s in range(l) if active[s])
    return estimate_tables(partition, g, max_group_size)
