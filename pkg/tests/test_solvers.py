import math

import numpy as np
import pytest
from scipy import stats

from dynecga.core import ConfigurationError, EnvironmentClock, Population, RandomStream, evaluate_population
from dynecga.model import estimate_tables, group_codes
from dynecga.operators import bb_wise_crossover, tournament_select
from dynecga.problems import DynamicTrap, ModifiedTrap4, MovingParabola, StaticTrap
from dynecga.solvers import (
    SolverConfig,
    enumeration_cost,
    on_change_dcga1,
    on_change_dcga2,
    partition_groups,
    predicted_convergence_time,
    respects_blocks,
    run,
    step_ecga,
    step_uga,
    tournament_intensity,
)


def small(variant, **kw):
    base = dict(variant=variant, population_size=64, tournament_size=4, generations=100, cycle=5)
    base.update(kw)
    return SolverConfig(**base)


TRAP = DynamicTrap(3, 4)


@pytest.mark.parametrize(
    "kw",
    [
        {"variant": "dcga3"},
        {"generations": 0},
        {"cycle": 0},
        {"population_size": 1},
        {"tournament_size": 1},
        {"tournament_size": 65},
        {"detection": "psychic"},
        {"max_group_size": 21},
    ],
)
def test_config_validation(kw):
    base = dict(variant="dcga1", population_size=64, tournament_size=4)
    base.update(kw)
    with pytest.raises(ConfigurationError):
        SolverConfig(**base)


@pytest.mark.parametrize("variant", ["ecga_static", "dcga1", "dcga2", "uga"])
def test_trace_shape_and_bounds(variant):
    trace = run(small(variant), TRAP, seed=3)
    assert len(trace) == 100
    assert trace.column("generation").tolist() == list(range(100))
    assert (trace.best <= trace.column("optimum") + 1e-12).all()
    assert (trace.column("mean") <= trace.best + 1e-12).all()


def test_minimization_trace_bounds():
    trace = run(small("dcga2", generations=30, cycle=10), MovingParabola(), seed=1)
    assert not trace.maximize
    assert (trace.best >= trace.column("optimum") - 1e-12).all()


def test_change_handler_count_g100_tau5():
    trace = run(small("dcga1"), TRAP, seed=0)
    assert trace.changes == 19
    assert np.flatnonzero(trace.column("changed")).tolist() == list(range(5, 100, 5))
    assert sorted(trace.restart_partitions) == list(range(5, 100, 5))


@pytest.mark.parametrize("variant,extra", [("dcga1", 19), ("dcga2", 0), ("uga", 0), ("ecga_static", 0)])
def test_evaluation_accounting(variant, extra):
    cfg = small(variant)
    trace = run(cfg, TRAP, seed=5)
    assert trace.evaluations == cfg.generations * cfg.population_size + extra * cfg.population_size
    per_gen = np.diff(np.concatenate([[0], trace.column("evals")]))
    changed = trace.column("changed")
    bonus = cfg.population_size if variant == "dcga1" else 0
    assert (per_gen == cfg.population_size + bonus * changed).all()


def test_phase_correctness():
    cfg = small("dcga2")
    trace = run(cfg, TRAP, seed=2)
    clock = EnvironmentClock(cfg.cycle)
    assert trace.column("phase").tolist() == [clock.phase(t) for t in range(100)]
    # the recorded best can only come from the phase it claims
    assert (trace.best <= TRAP.optimum_value(0)).all()


def test_determinism_same_seed():
    a = run(small("dcga1"), TRAP, seed=9)
    b = run(small("dcga1"), TRAP, seed=9)
    assert a.records == b.records
    assert a.restart_partitions == b.restart_partitions
    c = run(small("dcga1"), TRAP, seed=10)
    assert a.records != c.records


def test_run_index_changes_stream():
    a = run(small("uga", generations=5), TRAP, seed=9, run_index=0)
    b = run(small("uga", generations=5), TRAP, seed=9, run_index=1)
    assert [r.best for r in a.records] != [r.best for r in b.records] or [r.mean for r in a.records] != [
        r.mean for r in b.records
    ]


def test_static_variant_equals_dcga_when_no_change_fires():
    cfg = dict(population_size=64, tournament_size=4, generations=30, cycle=30)
    a = run(SolverConfig("ecga_static", **cfg), TRAP, seed=4)
    b = run(SolverConfig("dcga1", **cfg), TRAP, seed=4)
    c = run(SolverConfig("dcga2", **cfg), TRAP, seed=4)
    assert a.records == b.records == c.records
    assert a.changes == 0


def test_dcga2_ignores_prior_model():
    cfg = small("dcga2", generations=30)
    prior = estimate_tables([[i] for i in range(12)], Population(np.zeros((4, 12))))
    other = estimate_tables([list(range(12))], Population(np.zeros((4, 12))))
    a = run(cfg, TRAP, seed=8, prior_model=prior)
    b = run(cfg, TRAP, seed=8, prior_model=other)
    assert a.records == b.records


def test_dcga1_reuses_previous_partition():
    trace = run(small("dcga1", population_size=200, tournament_size=8), TRAP, seed=6)
    parts = trace.column("partition")
    for t, used in trace.restart_partitions.items():
        assert used == parts[t - 1]


def test_uga_records_no_model():
    trace = run(small("uga", generations=10), TRAP, seed=1)
    assert set(trace.column("groups").tolist()) == {0}
    assert set(trace.column("partition").tolist()) == {""}
    assert trace.changes == 1  # reported, but uGA keeps its population


def test_step_on_converged_population():
    cfg = small("ecga_static")
    pop = Population(np.tile([1, 0, 1, 1, 0, 0, 1, 0, 1, 0, 0, 1], (64, 1)))
    for step in (step_ecga, step_uga):
        out = step(pop, TRAP, 0, cfg, RandomStream(0))
        assert (out.offspring.genomes == pop.genomes).all()
        assert out.offspring.size == 64
    model = step_ecga(pop, TRAP, 0, cfg, RandomStream(0)).model
    assert model.groups == 12


def test_on_change_dcga2_is_fresh_random():
    cfg = SolverConfig("dcga2", population_size=10000, tournament_size=16)
    pop = on_change_dcga2(cfg, 20, RandomStream(1))
    assert not pop.evaluated
    freq = pop.genomes.mean(axis=0)
    assert (np.abs(freq - 0.5) <= 3 * math.sqrt(0.25 / 10000)).all()


def test_on_change_dcga1_is_restart_select_shuffle():
    cfg = SolverConfig("dcga1", population_size=10000, tournament_size=16)
    problem = DynamicTrap(3, 5)
    blocks = problem.linkage()
    last = estimate_tables(blocks, Population(np.zeros((2, 15))))
    got = on_change_dcga1(problem, 1, last, cfg, RandomStream(3))
    # the same composition by hand from an identical stream
    rng = RandomStream(3)
    fresh = on_change_dcga2(cfg, 15, rng)
    sel = tournament_select(evaluate_population(fresh, problem, 1), 16, rng)
    manual = bb_wise_crossover(sel, blocks, 10000, rng)
    assert np.array_equal(got.genomes, manual.genomes)
    # per-block configuration frequencies follow the selected pool
    for block in blocks:
        expected = np.bincount(group_codes(sel.genomes, block), minlength=8) / sel.size * got.size
        observed = np.bincount(group_codes(got.genomes, block), minlength=8)
        keep = expected > 0
        assert observed[~keep].sum() == 0
        assert stats.chisquare(observed[keep], expected[keep]).pvalue > 0.001


def test_on_change_dcga1_without_model_falls_back():
    cfg = SolverConfig("dcga1", population_size=50, tournament_size=4)
    a = on_change_dcga1(TRAP, 1, None, cfg, RandomStream(2))
    b = on_change_dcga2(cfg, 12, RandomStream(2))
    assert np.array_equal(a.genomes, b.genomes)


def test_sentinel_detection_mode():
    cfg = small("dcga1", detection="sentinel", population_size=200, tournament_size=8)
    trace = run(cfg, TRAP, seed=1)
    changed = np.flatnonzero(trace.column("changed"))
    # every detected change sits on a true cycle boundary
    assert all(t % 5 == 0 for t in changed)
    assert len(changed) > 0
    per_gen = np.diff(np.concatenate([[0], trace.column("evals")]))
    expected = 200 + np.where(np.arange(100) > 0, 1, 0) + 200 * trace.column("changed")
    assert (per_gen == expected).all()


def test_static_trap_best_non_decreasing():
    cfg = SolverConfig("ecga_static", generations=25, cycle=1000)
    ok = sum((np.diff(run(cfg, StaticTrap(5, 10), s).best) >= 0).all() for s in range(20))
    assert ok >= 19


def test_modified_trap_runs_both_variants():
    p = ModifiedTrap4(3)
    for v in ("dcga1", "dcga2", "uga"):
        assert len(run(small(v, generations=12), p, seed=0)) == 12


def test_predicted_convergence_time():
    assert predicted_convergence_time(100, 1) == pytest.approx(math.pi * 10, abs=1e-9)
    assert predicted_convergence_time(1, math.pi) == pytest.approx(1.0)
    assert predicted_convergence_time(400, 2) == pytest.approx(2 * predicted_convergence_time(100, 2))
    with pytest.raises(ConfigurationError):
        predicted_convergence_time(10, 0)


def test_tournament_intensity_known_values():
    # E[max of 2 standard normals] = 1/sqrt(pi)
    assert tournament_intensity(2) == pytest.approx(1 / math.sqrt(math.pi), abs=1e-6)
    assert tournament_intensity(1) == pytest.approx(0.0, abs=1e-9)
    assert tournament_intensity(16) == pytest.approx(1.766, abs=1e-3)


def test_enumeration_cost():
    assert enumeration_cost(100, 5) == 3200
    assert enumeration_cost(20, 5) == 640


def test_partition_helpers():
    assert partition_groups("[0,1,2|3,4|5]") == [(0, 1, 2), (3, 4), (5,)]
    assert partition_groups("[]") == []
    blocks = [[0, 1, 2], [3, 4, 5]]
    assert respects_blocks("[0,1|2|3,4,5]", blocks)
    assert not respects_blocks("[0,1,2,3|4,5]", blocks)
