"""Fixed-point certification and exhaustive enumeration."""

import random

import pytest

from gadel.formulas import Atom, Not, make_theory, parse_theory, tautology
from gadel.bench import build_nixon
from gadel.program import chromosome_from_applied, compile_theory
from gadel.prover import ProofBudget
from gadel.verifier import (ExtensionCertificate, Rejection, certificate_json,
                            enumerate_extensions, th_equal, verify)


def check(theory, applied):
    prog = compile_theory(theory)
    chrom = chromosome_from_applied(prog.n_defaults, applied)
    return verify(theory, chrom, program=prog)


def test_certificate_single_default():
    t = parse_theory("w: a.\nd: a : b / c.")
    got = check(t, {1})
    assert isinstance(got, ExtensionCertificate)
    assert got.applied == frozenset({1})
    assert got.trace == (frozenset(), frozenset({1}))
    assert got.grounded and got.consistent
    assert got.extension_atoms == ("a", "c")


def test_certificate_json_shape():
    t = parse_theory("w: a.\nd: a : b / c.")
    got = check(t, {1})
    assert certificate_json(got) == {
        "applied": [1],
        "grounded": True,
        "consistent": True,
        "trace": [[], [1]],
        "extension_atoms": ["a", "c"],
    }


def test_rejects_missing_applicable():
    t = parse_theory("w: a.\nd: a : b / c.")
    got = check(t, set())
    assert isinstance(got, Rejection)
    assert got.reason == "missing-applicable"
    assert "rule 1" in got.detail


def test_rejects_self_supporting_rule():
    # the rule's prerequisite only follows once its own consequent is assumed
    t = parse_theory("d: a : b / a.")
    got = check(t, {1})
    assert isinstance(got, Rejection)
    assert got.reason == "ungrounded"
    assert got.detail == "circular support: rule 1 never admitted by the stages"
    certs = enumerate_extensions(t)
    assert [c.applied for c in certs] == [frozenset()]
    assert certs[0].extension_atoms == ()


def test_rejects_mutual_support_cycle():
    t = parse_theory("d: a : t / b.\nd: b : u / a.")
    got = check(t, {1, 2})
    assert isinstance(got, Rejection)
    assert got.reason == "ungrounded"
    assert "rules 1, 2" in got.detail


def test_rejects_blocked_justification():
    t = parse_theory("w: a.\nw: !b.\nd: a : b / c.")
    got = check(t, {1})
    assert isinstance(got, Rejection)
    assert got.reason == "blocked-justification"


def test_rejects_inconsistent_candidate():
    t = parse_theory("w: t.\nd: t : u / x && !x.")
    got = check(t, {1})
    assert isinstance(got, Rejection)
    assert got.reason == "inconsistent"
    assert "certain knowledge" not in got.detail


def test_inconsistent_world_certifies_empty_applied_set():
    t = parse_theory("w: a.\nw: !a.\nd: t : u / c.")
    got = check(t, set())
    assert isinstance(got, ExtensionCertificate)
    assert not got.consistent
    # applying the rule instead is rejected, and the detail points at the world
    bad = check(t, {1})
    assert isinstance(bad, Rejection)
    assert bad.reason == "inconsistent"
    assert "certain knowledge itself is inconsistent" in bad.detail


def test_inconsistent_world_admits_justification_free_rules():
    t = make_theory([Atom("a"), Not(Atom("a"))],
                    [(tautology(), [], Atom("c"))])
    got = check(t, {1})
    assert isinstance(got, ExtensionCertificate)
    assert got.applied == frozenset({1})
    assert not got.consistent


def test_no_extension_for_self_blocking_rule():
    t = make_theory([], [(tautology(), [Atom("b")], Not(Atom("b")))])
    assert enumerate_extensions(t) == []


def test_nixon_has_exactly_two_extensions():
    certs = enumerate_extensions(build_nixon())
    assert [c.applied for c in certs] == [frozenset({1}), frozenset({2})]
    assert certs[0].extension_atoms == ("quaker", "republican")
    assert certs[1].extension_atoms == ("pacifist", "quaker", "republican")


def test_enumeration_rule_cap():
    t = make_theory([], [(Atom("a%d" % i), [Atom("b")], Atom("c"))
                         for i in range(13)])
    with pytest.raises(ValueError):
        enumerate_extensions(t)


def test_undecided_on_tiny_budget():
    t = parse_theory("w: a || b.\nw: !a || c.\nw: !b || c.\nd: c : d / e.")
    got = verify(t, (1, 0), ProofBudget(max_depth=1, max_splits=1))
    assert isinstance(got, Rejection)
    assert got.reason == "undecided"


def test_verify_validates_chromosome():
    t = parse_theory("w: a.\nd: a : b / c.")
    with pytest.raises(ValueError):
        verify(t, (1, 0, 0))
    with pytest.raises(ValueError):
        verify(t, (2, 0))


def test_th_equal_on_shared_consequent():
    t = parse_theory("w: a.\nd: a : b / c.\nd: a : d / c.")
    prog = compile_theory(t)
    assert th_equal(prog, {1}, {2})
    assert th_equal(prog, {1}, {1, 2})
    assert not th_equal(prog, {1}, set())


def test_random_normal_theories_have_extensions():
    # normal rules (justification == consequent) over a satisfiable world
    # always leave at least one extension
    rng = random.Random(41)
    names = ["a", "b", "c", "d"]
    for _ in range(40):
        world = []
        for name in rng.sample(names, rng.randrange(3)):
            world.append(Atom(name) if rng.randrange(2) else Not(Atom(name)))
        defaults = []
        for _ in range(rng.randint(1, 3)):
            pre = Atom(rng.choice(names))
            lit = rng.choice(names)
            beta = Atom(lit) if rng.randrange(2) else Not(Atom(lit))
            defaults.append((pre, [beta], beta))
        t = make_theory(world, defaults)
        assert len(enumerate_extensions(t)) >= 1
