"""Penalty table, fitness, and the genetic loop."""

import random

import pytest

from gadel.bench import build_nixon, two_loops_demo
from gadel.engine import (Exhausted, Found, GaParams, PenaltyTable,
                          UNIT_PENALTIES, _descend, _select_parents,
                          _VerdictCache, evolve, fitness, initial_population)
from gadel.formulas import Atom, Not, make_theory, parse_theory, tautology
from gadel.poptree import members
from gadel.program import chromosome_from_applied, compile_theory
from gadel.prover import DEFAULT_BUDGET
from gadel.engine import pair_penalty


# every (pair, prereq_proved, justif_refuted) cell of the penalty grid;
# only six cells charge anything
GRID = [
    ((1, 0), True, False, 0.0),
    ((1, 0), True, True, "p2"),
    ((1, 0), False, True, "p3"),
    ((1, 0), False, False, "p4"),
    ((1, 1), True, False, "p5"),
    ((1, 1), True, True, 0.0),
    ((1, 1), False, True, 0.0),
    ((1, 1), False, False, 0.0),
    ((0, 1), True, False, "p9"),
    ((0, 1), True, True, 0.0),
    ((0, 1), False, True, 0.0),
    ((0, 1), False, False, 0.0),
    ((0, 0), True, False, "p13"),
    ((0, 0), True, True, 0.0),
    ((0, 0), False, True, 0.0),
    ((0, 0), False, False, 0.0),
]


def test_pair_penalty_unit_grid():
    for pair, pre, ref, expect in GRID:
        want = 1.0 if isinstance(expect, str) else expect
        assert pair_penalty(UNIT_PENALTIES, pair, pre, ref) == want


def test_pair_penalty_random_weights():
    rng = random.Random(5)
    for _ in range(3):
        weights = {name: rng.uniform(0.1, 9.0)
                   for name in ("p2", "p3", "p4", "p5", "p9", "p13")}
        table = PenaltyTable(**weights)
        for pair, pre, ref, expect in GRID:
            want = weights[expect] if isinstance(expect, str) else 0.0
            assert pair_penalty(table, pair, pre, ref) == want


def test_penalty_table_rejects_nonpositive():
    with pytest.raises(ValueError):
        PenaltyTable(p3=0.0)
    with pytest.raises(ValueError):
        PenaltyTable(p13=-2.0)


def fit(theory, applied_or_chrom, table=UNIT_PENALTIES):
    prog = compile_theory(theory)
    chrom = applied_or_chrom
    if not isinstance(chrom, tuple):
        chrom = chromosome_from_applied(prog.n_defaults, chrom)
    return fitness(prog, chrom, table)


def test_fitness_single_default_rows():
    # candidate {a, c}: rule applicable, gene decides the charge
    t = parse_theory("w: a.\nd: a : b / c.")
    assert fit(t, {1}).total == 0.0
    assert fit(t, set()).total == 1.0       # applicable but unapplied
    assert fit(t, (1, 1)).total == 1.0
    assert fit(t, (0, 1)).total == 1.0
    # refuted justification: applying is charged, ignoring is free
    t2 = parse_theory("w: a.\nw: !b.\nd: a : b / c.")
    assert fit(t2, {1}).total == 1.0
    assert fit(t2, set()).total == 0.0
    # unprovable prerequisite
    t3 = parse_theory("d: a : b / c.")
    assert fit(t3, {1}).total == 1.0
    assert fit(t3, set()).total == 0.0
    # prerequisite open but justification already refuted
    t4 = parse_theory("w: !b.\nd: a : b / c.")
    assert fit(t4, {1}).total == 1.0
    assert fit(t4, set()).total == 0.0


def test_fitness_distinguishes_rows_by_weight():
    table = PenaltyTable(p2=2.0, p3=4.0, p4=8.0, p5=16.0, p9=32.0, p13=64.0)
    assert fit(parse_theory("w: a.\nw: !b.\nd: a : b / c."), {1}, table).total == 2.0
    assert fit(parse_theory("w: !b.\nd: a : b / c."), {1}, table).total == 4.0
    assert fit(parse_theory("d: a : b / c."), {1}, table).total == 8.0
    t = parse_theory("w: a.\nd: a : b / c.")
    assert fit(t, (1, 1), table).total == 16.0
    assert fit(t, (0, 1), table).total == 32.0
    assert fit(t, (0, 0), table).total == 64.0


def self_blocking_theory():
    # prerequisite-free rule whose consequent refutes its own justification
    return make_theory([], [(tautology(), [Atom("b")], Not(Atom("b")))])


def test_fitness_no_zero_for_self_blocking_rule():
    # applying refutes the justification, ignoring leaves the rule
    # applicable: all four gene states cost exactly one
    t = self_blocking_theory()
    for pair in ((1, 0), (0, 0), (1, 1), (0, 1)):
        assert fit(t, pair).total == 1.0


def test_fitness_scales_linearly():
    t = parse_theory("w: a.\nd: a : b / c.\nd: c : d / e.")
    table = PenaltyTable(p2=1.5, p3=2.5, p4=3.5, p5=4.5, p9=5.5, p13=6.5)
    tripled = PenaltyTable(p2=4.5, p3=7.5, p4=10.5, p5=13.5, p9=16.5, p13=19.5)
    rng = random.Random(9)
    for _ in range(20):
        chrom = tuple(rng.randrange(2) for _ in range(4))
        assert fit(t, chrom, tripled).total == pytest.approx(3 * fit(t, chrom, table).total)


def test_fitness_rejects_wrong_length():
    t = parse_theory("w: a.\nd: a : b / c.")
    prog = compile_theory(t)
    with pytest.raises(ValueError):
        fitness(prog, (1, 0, 0))


def test_fitness_report_per_rule_detail():
    t = parse_theory("w: a.\nd: a : b / c.\nd: e : f / g.")
    rep = fit(t, {1})
    assert rep.total == 0.0
    assert rep.per_rule == (
        (1, (1, 0), True, False, 0.0),
        (2, (0, 0), False, False, 0.0),
    )
    assert not rep.hit_budget


def test_ga_params_validation():
    with pytest.raises(ValueError):
        GaParams(population_size=0)
    with pytest.raises(ValueError):
        GaParams(crossover_rate=1.5)
    with pytest.raises(ValueError):
        GaParams(mutation_rate=-0.1)
    with pytest.raises(ValueError):
        GaParams(max_generations=0)
    with pytest.raises(ValueError):
        GaParams(restart_after=0)
    with pytest.raises(ValueError):
        GaParams(selection_fraction=0.0)


def test_initial_population_saturates_small_space():
    tree = initial_population(1, 10, random.Random(0))
    assert sorted(members(tree)) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_initial_population_distinct_and_seeded():
    a = list(members(initial_population(5, 32, random.Random(7))))
    b = list(members(initial_population(5, 32, random.Random(7))))
    c = list(members(initial_population(5, 32, random.Random(8))))
    assert len(a) == 32 and len(set(a)) == 32
    assert a == b
    assert a != c


def select_fixture():
    t = parse_theory("w: w.\nd: w : t / a.\nd: w : t / !a.\nd: w : u / b.")
    prog = compile_theory(t)
    cache = _VerdictCache(prog, DEFAULT_BUDGET)
    def rep(applied):
        return fitness(prog, chromosome_from_applied(3, applied), _cache=cache)
    return prog, cache, rep


def test_select_parents_reserves_consistent_candidates():
    prog, cache, rep = select_fixture()
    clash = rep({1, 2})     # a and !a together: cheap but inconsistent
    empty = rep(set())
    assert clash.total == 2.0 and empty.total == 3.0
    chosen = _select_parents([clash, empty], 2, cache)
    # the consistent candidate owns the reserved first slot despite ranking worse
    assert chosen == [empty.chromosome, clash.chromosome]


def test_select_parents_one_per_applied_set():
    prog, cache, rep = select_fixture()
    plain = rep({1})
    styled = fitness(prog, (1, 0, 0, 1, 0, 0), _cache=cache)  # same applied set
    empty = rep(set())
    chosen = _select_parents([plain, styled, empty], 3, cache)
    # the restyled twin only enters once every distinct applied set is in
    assert chosen == [plain.chromosome, empty.chromosome, styled.chromosome]


def test_descend_crosses_equal_fitness_ridge():
    t = parse_theory("w: a.\nd: a : b / c.\nd: c : d / e.")
    prog = compile_theory(t)
    cache = _VerdictCache(prog, DEFAULT_BUDGET)
    # empty and {1} both score 1.0, so only a sideways move reaches {1, 2}
    got = _descend(prog, frozenset(), UNIT_PENALTIES, DEFAULT_BUDGET, cache)
    assert got == frozenset({1, 2})


def test_descend_skips_inconsistent_neighbours():
    prog, cache, rep = select_fixture()
    got = _descend(prog, frozenset(), UNIT_PENALTIES, DEFAULT_BUDGET, cache)
    # the clashing pair is never entered; the walk settles beside it
    assert got == frozenset({1, 3})
    assert cache.consistent(got)


def test_evolve_empty_rule_set():
    t = make_theory([Atom("a")], [])
    out = evolve(compile_theory(t), t, GaParams(population_size=4, rng_seed=0))
    assert isinstance(out, Found)
    assert out.generations_used == 1
    assert out.certificate.applied == frozenset()
    assert out.certificate.extension_atoms == ("a",)


def test_evolve_nixon_deterministic():
    t = build_nixon()
    params = GaParams(population_size=16, max_generations=50, rng_seed=3)
    first = evolve(compile_theory(t), t, params)
    second = evolve(compile_theory(t), t, params)
    assert isinstance(first, Found)
    assert first.chromosome == second.chromosome
    assert first.generations_used == second.generations_used
    assert first.certificate.applied in (frozenset({1}), frozenset({2}))


def test_evolve_finds_two_rule_theory_in_one_generation():
    # 16 chromosomes saturate the space, so the winner is already present
    t = parse_theory("w: a.\nd: a : b / c.\nd: c : d / e.")
    out = evolve(compile_theory(t), t, GaParams(population_size=16, rng_seed=1))
    assert isinstance(out, Found)
    assert out.generations_used == 1
    assert out.certificate.applied == frozenset({1, 2})
    assert out.certificate.extension_atoms == ("a", "c", "e")


def test_evolve_exhausts_when_no_zero_exists():
    t = self_blocking_theory()
    out = evolve(compile_theory(t), t,
                 GaParams(population_size=8, max_generations=3, rng_seed=0))
    assert isinstance(out, Exhausted)
    assert out.generations_used == 3
    assert out.best.total == 1.0
    assert out.zero_fitness_rejected == 0


def test_evolve_restart_cadence():
    # restarts fire every restart_after generations until something is found
    t = self_blocking_theory()
    out = evolve(compile_theory(t), t,
                 GaParams(population_size=8, max_generations=7, restart_after=2,
                          rng_seed=0))
    assert isinstance(out, Exhausted)
    assert out.generations_used == 7
    assert out.restarts_used == 3


def test_evolve_rejects_ungrounded_candidates():
    t = two_loops_demo()
    out = evolve(compile_theory(t), t,
                 GaParams(population_size=60, max_generations=25, rng_seed=0))
    assert isinstance(out, Exhausted)
    assert out.zero_fitness_rejected > 0
    assert dict(out.rejection_reasons).get("ungrounded", 0) > 0


def test_evolve_generation_callback():
    t = self_blocking_theory()
    seen = []
    out = evolve(compile_theory(t), t,
                 GaParams(population_size=8, max_generations=3, rng_seed=0),
                 on_generation=lambda *row: seen.append(row))
    assert isinstance(out, Exhausted)
    assert [row[0] for row in seen] == [1, 2, 3]
    gen, best, mean, size, restarts = seen[0]
    assert best == 1.0 and mean == 1.0
    assert size == 4        # only four distinct chromosomes exist
    assert restarts == 0
