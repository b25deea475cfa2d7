"""Genetic search for candidate extensions.

Each rule of the theory owns a gene pair; pair value (1,0) means "this rule
is applied".  A chromosome therefore names a candidate theory: certain
knowledge plus the consequents of its applied rules.  The fitness of a
chromosome charges a penalty for every rule whose gene pair disagrees with
what the candidate theory itself says about the rule (prerequisite
entailed? some justification refuted?).  A chromosome of fitness zero is
internally coherent, but coherence is not enough: circular chains of rules
can support each other without being derivable from the certain knowledge,
so every zero-fitness candidate is handed to the fixed-point verifier and
only a certified candidate ends the search.

The population lives in a binary trie, which deduplicates members.  Each
generation selects parents from the ranking, breeds offspring from them
until the trie is full again, and tops up with fresh random chromosomes
when the survivors cannot produce enough distinct offspring, so the trie's
collapsing of duplicates is what feeds exploration.  A run that goes
`restart_after` generations without a certified answer is reseeded from
scratch, preserving the generation counter.

Selection is rank-based but with two twists, both born from how the
penalty table treats contradictions.  A candidate theory that is
inconsistent proves everything, so every unapplied pair scores zero and
the candidate pays only for its applied rules: two rules with clashing
consequents already score better than any half-assembled honest candidate,
and such dead ends come in enough variations to fill every elite slot.
Half the parent slots are therefore reserved for the best candidates whose
theory is consistent.  The other twist: fitness depends on the applied set
only, and the three zero-penalty states of an unapplied pair would
otherwise fill the ranking with copies of one applied set in different
clothes, so each applied set provides at most one parent.

Breeding is paired with a polish step: once per distinct applied set, the
best satisfiable candidate is walked downhill by single-rule toggles
through satisfiable neighbours and the result joins the ranking.  On
funnel-shaped instances this ends the search within a few generations;
on plateaus the walk stops immediately and the population does the work.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from . import poptree
from .formulas import DefaultTheory
from .poptree import Chromosome, PopulationTree
from .program import (ClauseProgram, applied_indices, chromosome_from_applied,
                      gene_pair)
from .prover import (DEFAULT_BUDGET, CandidateQuerySession, ProofBudget,
                     ProofOutcome, refute_clauses)
from .verifier import ExtensionCertificate, Rejection, verify


@dataclass(frozen=True, slots=True)
class PenaltyTable:
    """Positive weights for the six penalized gene/verdict combinations.

    Row naming follows the position in the 16-row gene/verdict grid:
    rows 2-4 penalize an applied rule that is not cleanly applicable,
    row 5 an (1,1) pair whose rule is applicable, row 9 the same for (0,1),
    row 13 the same for (0,0).
    """

    p2: float = 1.0
    p3: float = 1.0
    p4: float = 1.0
    p5: float = 1.0
    p9: float = 1.0
    p13: float = 1.0

    def __post_init__(self):
        for name in ("p2", "p3", "p4", "p5", "p9", "p13"):
            if getattr(self, name) <= 0:
                raise ValueError("penalty %s must be positive" % name)


UNIT_PENALTIES = PenaltyTable()


def pair_penalty(table: PenaltyTable, pair: tuple[int, int],
                 prereq_proved: bool, justif_refuted: bool) -> float:
    """Penalty of one rule given its gene pair and the two query verdicts."""
    if pair == (1, 0):
        if prereq_proved:
            return table.p2 if justif_refuted else 0.0
        return table.p3 if justif_refuted else table.p4
    # for every other pair only "applicable but not applied" is charged
    if prereq_proved and not justif_refuted:
        if pair == (1, 1):
            return table.p5
        if pair == (0, 1):
            return table.p9
        return table.p13
    return 0.0


@dataclass(frozen=True, slots=True)
class FitnessReport:
    chromosome: Chromosome
    total: float
    per_rule: tuple[tuple[int, tuple[int, int], bool, bool, float], ...]
    budget_hits: int

    @property
    def hit_budget(self) -> bool:
        return self.budget_hits > 0


class _VerdictCache:
    """Prover verdicts per applied-rule set; the candidate theory, and hence
    every query answer, depends only on that set."""

    def __init__(self, program: ClauseProgram, budget: ProofBudget):
        self.program = program
        self.budget = budget
        self.store: dict[frozenset[int], tuple] = {}
        self.cons: dict[frozenset[int], bool] = {}

    def verdicts(self, applied: frozenset[int]):
        got = self.store.get(applied)
        if got is None:
            session = CandidateQuerySession(self.program, applied, self.budget)
            rows = []
            hits = 0
            for i in range(1, self.program.n_defaults + 1):
                pre = session.prereq_proved(i)
                if pre is ProofOutcome.BUDGET_EXHAUSTED:
                    hits += 1
                refuted = False
                for j in range(1, self.program.justification_count(i) + 1):
                    just = session.justification_refuted(i, j)
                    if just is ProofOutcome.BUDGET_EXHAUSTED:
                        hits += 1
                    if just is ProofOutcome.PROVED:
                        refuted = True
                        break
                rows.append((pre is ProofOutcome.PROVED, refuted))
            got = (tuple(rows), hits)
            self.store[applied] = got
        return got

    def consistent(self, applied: frozenset[int]) -> bool:
        """Whether the candidate theory is satisfiable; budget hits count as no."""
        got = self.cons.get(applied)
        if got is None:
            clauses = list(self.program.world)
            for i in sorted(applied):
                clauses.extend(self.program.conclusion[i - 1])
            got = refute_clauses(clauses, self.budget) is ProofOutcome.NOT_PROVED
            self.cons[applied] = got
        return got


def fitness(program: ClauseProgram, chromosome: Chromosome,
            table: PenaltyTable = UNIT_PENALTIES,
            budget: ProofBudget = DEFAULT_BUDGET,
            _cache: _VerdictCache | None = None) -> FitnessReport:
    """Total penalty of a chromosome; 0 marks a coherent candidate."""
    if len(chromosome) != 2 * program.n_defaults:
        raise ValueError("chromosome length %d, expected %d"
                         % (len(chromosome), 2 * program.n_defaults))
    cache = _cache if _cache is not None else _VerdictCache(program, budget)
    rows, hits = cache.verdicts(applied_indices(chromosome))
    per_rule = []
    total = 0.0
    for i in range(1, program.n_defaults + 1):
        pre, refuted = rows[i - 1]
        pair = gene_pair(chromosome, i)
        p = pair_penalty(table, pair, pre, refuted)
        total += p
        per_rule.append((i, pair, pre, refuted, p))
    return FitnessReport(chromosome, total, tuple(per_rule), hits)


@dataclass(frozen=True, slots=True)
class GaParams:
    population_size: int = 100
    crossover_rate: float = 0.8
    mutation_rate: float = 0.1
    max_generations: int = 500
    restart_after: int = 6
    selection_fraction: float = 0.25
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be at least 1")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")
        if self.max_generations < 1 or self.restart_after < 1:
            raise ValueError("generation limits must be at least 1")
        if not 0.0 < self.selection_fraction <= 1.0:
            raise ValueError("selection_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class Found:
    chromosome: Chromosome
    certificate: ExtensionCertificate
    generations_used: int
    restarts_used: int
    zero_fitness_rejected: int
    rejection_reasons: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Exhausted:
    best: FitnessReport
    generations_used: int
    restarts_used: int
    zero_fitness_rejected: int
    rejection_reasons: tuple[tuple[str, int], ...]


SearchOutcome = Found | Exhausted


def initial_population(n_defaults: int, population_size: int,
                       rng: random.Random) -> PopulationTree:
    """Random population of min(population_size, 4**n_defaults) distinct members."""
    width = 2 * n_defaults
    target = min(population_size, 1 << width)
    tree = poptree.empty_tree(width)
    count = 0
    while count < target:
        chrom = tuple(rng.randrange(2) for _ in range(width))
        if not poptree.contains(tree, chrom):
            tree = poptree.insert(tree, chrom)
            count += 1
    return tree


def _next_population(selected: list[Chromosome], n_defaults: int, params: GaParams,
                     rng: random.Random, target: int) -> PopulationTree:
    """Survivors plus bred offspring, topped up with random chromosomes.

    Offspring are drawn in rounds of shuffle-and-pair until the population
    is full again; each pair is crossed at a rule boundary with probability
    crossover_rate and each offspring has one random bit flipped with
    probability mutation_rate.  Duplicates collapse in the trie, and a draw
    cap keeps small or converged pools from spinning forever.
    """
    width = 2 * n_defaults
    tree = poptree.empty_tree(width)
    count = 0
    for chrom in selected:
        if not poptree.contains(tree, chrom):
            tree = poptree.insert(tree, chrom)
            count += 1
    draws = 0
    limit = 8 * max(target, 1)
    while count < target and draws < limit and len(selected) >= 2:
        pool = list(selected)
        rng.shuffle(pool)
        for k in range(0, len(pool) - 1, 2):
            if count >= target or draws >= limit:
                break
            a, b = pool[k], pool[k + 1]
            if n_defaults >= 2 and rng.random() < params.crossover_rate:
                cut = 2 * rng.randint(1, n_defaults - 1)  # between gene pairs
                a, b = a[:cut] + b[cut:], b[:cut] + a[cut:]
            for chrom in (a, b):
                draws += 1
                if chrom and rng.random() < params.mutation_rate:
                    bits = list(chrom)
                    bits[rng.randrange(width)] ^= 1
                    chrom = tuple(bits)
                if count < target and not poptree.contains(tree, chrom):
                    tree = poptree.insert(tree, chrom)
                    count += 1
    while count < target:
        chrom = tuple(rng.randrange(2) for _ in range(width))
        if not poptree.contains(tree, chrom):
            tree = poptree.insert(tree, chrom)
            count += 1
    return tree


def _descend(program: ClauseProgram, start: frozenset[int], table: PenaltyTable,
             budget: ProofBudget, cache: _VerdictCache) -> frozenset[int]:
    """Steepest single-toggle walk downhill from an applied set.

    Moves toggle one rule in or out and only satisfiable neighbours are
    eligible, so the walk cannot fall into the cheap inconsistent states
    the selection reserve exists for.  Equal-penalty moves are allowed
    (narrow ridges separate many near-extensions from the real one), a
    visited set stops cycling and the step cap bounds plateau wandering;
    the best state seen is returned.
    """
    n = program.n_defaults

    def total_of(applied: frozenset[int]) -> float:
        chrom = chromosome_from_applied(n, applied)
        return fitness(program, chrom, table, budget, _cache=cache).total

    cur = start
    cur_total = total_of(cur)
    best, best_total = cur, cur_total
    visited = {cur}
    for _ in range(2 * n):
        if best_total == 0:
            break
        choice = None
        for i in range(1, n + 1):
            trial = cur ^ {i}
            if trial in visited or not cache.consistent(trial):
                continue
            t = total_of(trial)
            if t <= cur_total + 1e-12 and (choice is None or t < choice[0] - 1e-12):
                choice = (t, trial)
        if choice is None:
            break
        cur_total, cur = choice
        visited.add(cur)
        if cur_total < best_total - 1e-12:
            best, best_total = cur, cur_total
    return best


def _select_parents(reports: list[FitnessReport], keep: int,
                    cache: _VerdictCache) -> list[Chromosome]:
    """The best `keep` chromosomes, at most one per applied set, with half
    the slots reserved for candidates whose own theory is consistent.

    Without the reservation, applied sets with clashing consequents crowd
    out every candidate still assembling a real extension; without the
    one-per-applied-set rule, zero-penalty restylings of a single applied
    set do the same.
    """
    chosen: list[Chromosome] = []
    taken: set[Chromosome] = set()
    seen: set[frozenset[int]] = set()
    reserve = (keep + 1) // 2
    for rep in reports:
        if len(chosen) >= reserve:
            break
        key = applied_indices(rep.chromosome)
        if key not in seen and cache.consistent(key):
            seen.add(key)
            taken.add(rep.chromosome)
            chosen.append(rep.chromosome)
    for rep in reports:
        if len(chosen) >= keep:
            break
        if rep.chromosome in taken:
            continue
        key = applied_indices(rep.chromosome)
        if key not in seen:
            seen.add(key)
            taken.add(rep.chromosome)
            chosen.append(rep.chromosome)
    if len(chosen) < keep:
        for rep in reports:
            if len(chosen) >= keep:
                break
            if rep.chromosome not in taken:
                taken.add(rep.chromosome)
                chosen.append(rep.chromosome)
    return chosen


def evolve(program: ClauseProgram, theory: DefaultTheory,
           params: GaParams = GaParams(),
           table: PenaltyTable = UNIT_PENALTIES,
           budget: ProofBudget = DEFAULT_BUDGET,
           on_generation=None,
           _cache: _VerdictCache | None = None) -> SearchOutcome:
    """Run the search until a certified extension appears or budgets run out.

    Identical arguments (including rng_seed) give an identical outcome; the
    optional on_generation callback receives (generation index, best
    penalty, mean penalty, cardinality, restarts) once per population.
    """
    rng = random.Random(params.rng_seed)
    n = program.n_defaults
    cache = _cache if _cache is not None else _VerdictCache(program, budget)
    keep = max(1, math.ceil(params.selection_fraction * params.population_size))
    tree = initial_population(n, params.population_size, rng)
    generations = 0
    restarts = 0
    stalled = 0
    rejected = 0
    reasons: dict[str, int] = {}
    # verdict of verify() depends only on the applied set, so memoize it
    checked: dict[frozenset[int], ExtensionCertificate | Rejection] = {}
    descended: set[frozenset[int]] = set()
    best: FitnessReport | None = None

    while generations < params.max_generations:
        generations += 1
        reports = [fitness(program, chrom, table, budget, _cache=cache)
                   for chrom in poptree.members(tree)]
        reports.sort(key=lambda r: (r.total, r.chromosome))
        # polish the best satisfiable candidate, once per distinct start
        start = None
        for rep in reports:
            key = applied_indices(rep.chromosome)
            if cache.consistent(key):
                start = key
                break
        if start is not None and start not in descended:
            descended.add(start)
            polished = _descend(program, start, table, budget, cache)
            descended.add(polished)
            if polished != start:
                chrom = chromosome_from_applied(n, polished)
                reports.append(fitness(program, chrom, table, budget, _cache=cache))
                reports.sort(key=lambda r: (r.total, r.chromosome))
        if best is None or reports[0].total < best.total:
            best = reports[0]
        if on_generation is not None:
            mean = sum(r.total for r in reports) / len(reports)
            on_generation(generations, reports[0].total, mean, len(reports), restarts)
        for rep in reports:
            if rep.total != 0:
                break
            key = applied_indices(rep.chromosome)
            outcome = checked.get(key)
            if outcome is None:
                outcome = verify(theory, rep.chromosome, budget, program=program)
                checked[key] = outcome
            if isinstance(outcome, ExtensionCertificate):
                return Found(rep.chromosome, outcome, generations, restarts,
                             rejected, _reason_counts(reasons))
            rejected += 1
            reasons[outcome.reason] = reasons.get(outcome.reason, 0) + 1
        stalled += 1
        if generations >= params.max_generations:
            break
        if stalled >= params.restart_after:
            tree = initial_population(n, params.population_size, rng)
            restarts += 1
            stalled = 0
            continue
        selected = _select_parents(reports, keep, cache)
        width = 2 * n
        target = min(params.population_size, 1 << width)
        tree = _next_population(selected, n, params, rng, target)

    assert best is not None
    return Exhausted(best, generations, restarts, rejected, _reason_counts(reasons))


def _reason_counts(reasons: dict[str, int]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(reasons.items()))
