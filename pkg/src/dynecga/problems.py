"""Dynamic bounded-difficulty benchmarks.

Every problem exposes the same small surface:

* ``genome_length``, ``maximize``, ``phase_count``
* ``evaluate(genomes, phase)`` on a ``(n, l)`` 0/1 matrix, returning ``(n,)`` floats
* ``optimum_value(phase)``
* ``advance()`` returning the problem after one change event (identity for
  the trap families, offset shift for the moving parabola)
* ``linkage(phase)`` with the true block structure, or ``None``

Blocks are consecutive index ranges: block ``j`` of order ``k`` covers
``j*k .. j*k + k - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ConfigurationError


def trap_value(u: int, k: int, low: float, high: float) -> float:
    if k < 2:
        raise ValueError("trap order must be >= 2")
    if not 0 <= u <= k:
        raise ValueError(f"ones count {u} outside [0, {k}]")
    if u == k:
        return float(high)
    return low - u * low / (k - 1)


def trap_table(k: int, low: float | None = None, high: float | None = None) -> np.ndarray:
    low = k if low is None else low
    high = k + 1 if high is None else high
    return np.array([trap_value(u, k, low, high) for u in range(k + 1)], dtype=np.float64)


# Reconstructed value tables indexed by the number of ones in a block.
MODIFIED_TRAP4_PHASE0 = (5.0, 4.0 / 3.0, 8.0 / 3.0, 4.0, 0.0)
MODIFIED_TRAP4_PHASE1 = MODIFIED_TRAP4_PHASE0[::-1]
SWITCHING_TRAP3_PHASE1 = (0.0, 3.0, 1.5, 4.0)


def _ones_per_block(genomes: np.ndarray, k: int) -> np.ndarray:
    g = np.asarray(genomes)
    if g.ndim == 1:
        g = g[None, :]
    n, l = g.shape
    return g.reshape(n, l // k, k).sum(axis=2, dtype=np.int64)


def _table_score(genomes: np.ndarray, k: int, table) -> np.ndarray:
    table = np.asarray(table, dtype=np.float64)
    return table[_ones_per_block(genomes, k)].sum(axis=1)


def _check_length(genomes: np.ndarray, length: int):
    got = np.shape(genomes)[-1]
    if got != length:
        raise ConfigurationError(f"genome length {got} does not match problem length {length}")


def _check_phase(phase: int, count: int):
    if not 0 <= phase < count:
        raise ValueError(f"phase {phase} outside [0, {count})")


def _consecutive_blocks(length: int, k: int) -> list[list[int]]:
    return [list(range(j, j + k)) for j in range(0, length, k)]


@dataclass(frozen=True)
class StaticTrap:
    """Plain trap-k, optimum at all ones."""

    k: int
    blocks: int
    low: float | None = None
    high: float | None = None
    name = "static_trap"
    maximize = True
    phase_count = 1

    def __post_init__(self):
        if self.k < 2:
            raise ConfigurationError("k must be >= 2")
        if self.blocks < 1:
            raise ConfigurationError("blocks must be >= 1")

    @property
    def genome_length(self) -> int:
        return self.k * self.blocks

    @property
    def table(self) -> np.ndarray:
        return trap_table(self.k, self.low, self.high)

    def evaluate(self, genomes, phase: int = 0) -> np.ndarray:
        _check_length(genomes, self.genome_length)
        return _table_score(genomes, self.k, self.table)

    def optimum_value(self, phase: int = 0) -> float:
        return float(self.blocks * self.table.max())

    def advance(self):
        return self

    def linkage(self, phase: int = 0):
        return _consecutive_blocks(self.genome_length, self.k)


@dataclass(frozen=True)
class DynamicTrap(StaticTrap):
    """Trap-k whose optimum flips between all zeros (phase 0) and all ones (phase 1)."""

    name = "dynamic_trap"
    phase_count = 2

    def evaluate(self, genomes, phase: int) -> np.ndarray:
        _check_length(genomes, self.genome_length)
        _check_phase(phase, 2)
        table = self.table
        if phase == 0:
            # score the count of zeros instead of ones
            table = table[::-1]
        return _table_score(genomes, self.k, table)


@dataclass(frozen=True)
class ModifiedTrap4:
    """Asymmetric order-4 trap: phase 0 optimum at u=0, attractor at u=3;
    phase 1 optimum at u=4, attractor at u=1."""

    blocks: int
    table0: tuple = MODIFIED_TRAP4_PHASE0
    table1: tuple = MODIFIED_TRAP4_PHASE1
    name = "modified_trap4"
    maximize = True
    phase_count = 2
    k = 4

    def __post_init__(self):
        if self.blocks < 1:
            raise ConfigurationError("blocks must be >= 1")
        if len(self.table0) != 5 or len(self.table1) != 5:
            raise ConfigurationError("modified trap-4 tables need 5 entries")

    @property
    def genome_length(self) -> int:
        return 4 * self.blocks

    def _table(self, phase):
        _check_phase(phase, 2)
        return self.table0 if phase == 0 else self.table1

    def evaluate(self, genomes, phase: int) -> np.ndarray:
        _check_length(genomes, self.genome_length)
        return _table_score(genomes, 4, self._table(phase))

    def optimum_value(self, phase: int) -> float:
        return float(self.blocks * max(self._table(phase)))

    def advance(self):
        return self

    def linkage(self, phase: int = 0):
        return _consecutive_blocks(self.genome_length, 4)


@dataclass(frozen=True)
class SwitchingTrap:
    """Order-4 blocks (optimum all zeros) in phase 0, order-3 blocks
    (optimum all ones) in phase 1. The block boundaries move with the phase."""

    length: int
    table4: tuple = MODIFIED_TRAP4_PHASE0
    table3: tuple = SWITCHING_TRAP3_PHASE1
    name = "switching_trap"
    maximize = True
    phase_count = 2

    def __post_init__(self):
        if self.length < 12 or self.length % 12:
            raise ConfigurationError(f"length must be divisible by 12, got {self.length}")

    @property
    def genome_length(self) -> int:
        return self.length

    def _order(self, phase):
        _check_phase(phase, 2)
        return (4, self.table4) if phase == 0 else (3, self.table3)

    def evaluate(self, genomes, phase: int) -> np.ndarray:
        _check_length(genomes, self.length)
        k, table = self._order(phase)
        return _table_score(genomes, k, table)

    def optimum_value(self, phase: int) -> float:
        k, table = self._order(phase)
        return float(self.length // k * max(table))

    def advance(self):
        return self

    def linkage(self, phase: int = 0):
        return _consecutive_blocks(self.length, self._order(phase)[0])


def decode_binary(bits, lower: float, upper: float) -> np.ndarray | float:
    """Unsigned big-endian decoding onto ``[lower, upper]``.

    Works on a single bit vector or on the last axis of a stack of them.
    """
    b = np.asarray(bits)
    nbits = b.shape[-1]
    if nbits == 0:
        raise ValueError("need at least one bit")
    weights = 1 << np.arange(nbits - 1, -1, -1, dtype=np.int64)
    v = b.astype(np.int64) @ weights
    x = lower + (upper - lower) * v / float((1 << nbits) - 1)
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class MovingParabola:
    """f(x) = sum_i (x_i + offset_i)^2 on a plain-binary grid, minimized.

    Offsets start at zero and grow by ``severity`` with every :meth:`advance`.
    """

    n_vars: int = 10
    bits_per_var: int = 10
    bound: float = 40.0
    severity: float = 1.0
    offset: tuple = field(default=None)
    name = "moving_parabola"
    maximize = False
    phase_count = 2

    def __post_init__(self):
        if self.n_vars < 1:
            raise ConfigurationError("n_vars must be >= 1")
        if self.bits_per_var < 1:
            raise ConfigurationError("bits_per_var must be >= 1")
        if self.bound <= 0:
            raise ConfigurationError("bound must be > 0")
        if self.offset is None:
            object.__setattr__(self, "offset", (0.0,) * self.n_vars)
        elif len(self.offset) != self.n_vars:
            raise ConfigurationError("offset needs one entry per variable")

    @property
    def genome_length(self) -> int:
        return self.n_vars * self.bits_per_var

    def decode(self, genomes) -> np.ndarray:
        g = np.asarray(genomes)
        if g.ndim == 1:
            g = g[None, :]
        g = g.reshape(g.shape[0], self.n_vars, self.bits_per_var)
        return decode_binary(g, -self.bound, self.bound)

    def evaluate(self, genomes, phase: int = 0) -> np.ndarray:
        _check_length(genomes, self.genome_length)
        x = self.decode(genomes)
        return ((x + np.asarray(self.offset)) ** 2).sum(axis=1)

    def advance(self) -> "MovingParabola":
        shifted = tuple(d + self.severity for d in self.offset)
        return MovingParabola(self.n_vars, self.bits_per_var, self.bound, self.severity, shifted)

    def grid_minimizer(self) -> np.ndarray:
        """Per-variable integer code of the grid point closest to ``-offset``."""
        top = (1 << self.bits_per_var) - 1
        span = 2.0 * self.bound
        codes = []
        for d in self.offset:
            guess = int(round((-d + self.bound) * top / span))
            cands = [min(max(v, 0), top) for v in (guess - 1, guess, guess + 1)]
            codes.append(min(cands, key=lambda v: (-self.bound + span * v / top + d) ** 2))
        return np.array(codes, dtype=np.int64)

    def optimum_value(self, phase: int = 0) -> float:
        top = (1 << self.bits_per_var) - 1
        x = -self.bound + 2.0 * self.bound * self.grid_minimizer() / top
        return float(((x + np.asarray(self.offset)) ** 2).sum())

    def linkage(self, phase: int = 0):
        return None


PROBLEMS = {
    "dynamic_trap": DynamicTrap,
    "static_trap": StaticTrap,
    "modified_trap4": ModifiedTrap4,
    "switching_trap": SwitchingTrap,
    "moving_parabola": MovingParabola,
}

_PARAMS = {
    "dynamic_trap": {"k": int, "blocks": int, "low": float, "high": float},
    "static_trap": {"k": int, "blocks": int, "low": float, "high": float},
    "modified_trap4": {"blocks": int},
    "switching_trap": {"length": int},
    "moving_parabola": {"n_vars": int, "bits_per_var": int, "bound": float, "severity": float},
}

_REQUIRED = {
    "dynamic_trap": ("k", "blocks"),
    "static_trap": ("k", "blocks"),
    "modified_trap4": ("blocks",),
    "switching_trap": ("length",),
    "moving_parabola": (),
}


def make_problem(spec: dict):
    """Build a problem from ``{"type": name, **params}``."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigurationError("problem must be an object with a 'type' field")
    name = spec["type"]
    if name not in PROBLEMS:
        raise ConfigurationError(f"unknown problem type {name!r}; choose from {sorted(PROBLEMS)}")
    allowed = _PARAMS[name]
    kwargs = {}
    for key, value in spec.items():
        if key == "type":
            continue
        if key not in allowed:
            raise ConfigurationError(f"problem.{key}: not a parameter of {name}")
        cast = allowed[key]
        if cast is int and (isinstance(value, bool) or not isinstance(value, int)):
            raise ConfigurationError(f"problem.{key} must be an integer")
        if cast is float and (isinstance(value, bool) or not isinstance(value, (int, float))):
            raise ConfigurationError(f"problem.{key} must be a number")
        kwargs[key] = cast(value)
    for key in _REQUIRED[name]:
        if key not in kwargs:
            raise ConfigurationError(f"problem.{key} is required for {name}")
    if name == "switching_trap" and kwargs["length"] % 12:
        raise ConfigurationError(f"problem.length must be divisible by 12, got {kwargs['length']}")
    try:
        return PROBLEMS[name](**kwargs)
    except ConfigurationError as exc:
        raise ConfigurationError(f"problem: {exc}") from None

