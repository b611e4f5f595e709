from __future__ import annotations

import random

import pytest

from attackgraph.errors import (
    ArityConflictError,
    GroundnessError,
    LimitExceededError,
    ParseError,
    RangeRestrictionError,
)
from attackgraph.logic import (
    Atom,
    KnowledgeBase,
    TermKind,
    const,
    forward_chain,
    iter_statements,
    parse_fact,
    parse_rule,
    substitute,
    unify,
    var,
)

from .oracles import naive_fixpoint, random_kb


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def test_parse_rule_credentials_harvesting():
    rule = parse_rule(
        "harvestCredentials(_host, _lastuser) :- "
        "execCode(_host, _user), hasCredentialsOnMemory(_host, _lastuser)"
    )
    assert rule.head.predicate == "harvestCredentials"
    assert rule.head.arity == 2
    assert [a.predicate for a in rule.body] == ["execCode", "hasCredentialsOnMemory"]
    assert all(a.arity == 2 for a in rule.body)
    assert rule.label == "harvestCredentials"


def test_parse_rule_multiline_layout():
    text = """logOn(_host, _user) :-
        networkServiceInfo(_host, _program, _protocol, _port, _user),
        hacl(_host, _h, _protocol, _port),
        harvestCredentials(_h, _user)
    """
    statements = list(iter_statements(text))
    assert len(statements) == 1
    rule = parse_rule(statements[0][0])
    assert rule.head.predicate == "logOn"
    assert len(rule.body) == 3


def test_parse_rule_self_recursive_is_valid():
    rule = parse_rule("p(_x) :- p(_x)")
    kb = KnowledgeBase()
    kb.add_rule(rule)
    kb.add_fact_text("p(a)")
    facts, derivations = forward_chain(kb)
    assert facts == {Atom("p", (const("a"),))}
    assert len(derivations) == 1


def test_parse_rule_range_restriction_violation():
    with pytest.raises(RangeRestrictionError, match="_y"):
        parse_rule("q(_y) :- r(_x)")


def test_parse_rule_explicit_label():
    rule = parse_rule("mass_on_buses: panic(cityBuses) :- tampered(busSchedule)")
    assert rule.label == "mass_on_buses"


def test_parse_rule_syntax_error_is_position_annotated():
    with pytest.raises(ParseError) as exc:
        parse_rule("p(_x :- q(_x)")
    assert "line 1" in str(exc.value)
    assert "column" in str(exc.value)


def test_parse_rule_arity_conflict():
    kb = KnowledgeBase()
    kb.add_rule_text("p(_x) :- q(_x)")
    with pytest.raises(ArityConflictError, match="q"):
        kb.add_rule_text("r(_x) :- q(_x, _y)")


def test_parse_fact_vulnerability():
    atom = parse_fact("vulExists(startingDevice, 'CVE-2019-0708', rdpService, remoteExploit)")
    assert atom.is_ground
    assert atom.arity == 4
    assert atom.args[1].name == "CVE-2019-0708"
    assert atom.args[1].kind is TermKind.CONSTANT


def test_parse_fact_network_service():
    atom = parse_fact("networkServiceInfo(startingDevice, rdp, tcp, 3389, olivia)")
    assert atom.is_ground
    assert [t.name for t in atom.args] == ["startingDevice", "rdp", "tcp", "3389", "olivia"]


def test_parse_fact_rejects_variables():
    with pytest.raises(GroundnessError, match="_x"):
        parse_fact("p(_x)")


def test_comments_and_trailing_periods():
    kb = KnowledgeBase()
    text = "% a comment line\np(a).  % trailing comment\np(b)\n"
    statements = [s for s, _ in iter_statements(text)]
    assert statements == ["p(a).", "p(b)"]
    for statement in statements:
        kb.add_fact_text(statement)
    assert len(kb.facts) == 2


def test_quoted_constant_keeps_percent_and_case():
    atom = parse_fact("note(startingDevice, '100% CPU on Reboot')")
    assert atom.args[1].name == "100% CPU on Reboot"
    assert str(atom) == "note(startingDevice, '100% CPU on Reboot')"


# ---------------------------------------------------------------------------
# Unification
# ---------------------------------------------------------------------------


def test_unify_direct_positional_match():
    a = Atom("execCode", (var("_h"), var("_u")))
    b = Atom("execCode", (const("start"), const("admin")))
    binding = unify(a, b, {})
    assert binding == {"_h": const("start"), "_u": const("admin")}


def test_unify_conflicting_repeat_variable_fails():
    a = Atom("p", (var("_x"), var("_x")))
    b = Atom("p", (const("a"), const("b")))
    assert unify(a, b, {}) is None


def test_unify_consistent_existing_binding_preserved():
    a = Atom("p", (var("_x"),))
    b = Atom("p", (const("a"),))
    existing = {"_x": const("a")}
    assert unify(a, b, existing) == {"_x": const("a")}


def test_unify_never_mutates_input_binding():
    a = Atom("p", (var("_x"), var("_y")))
    b = Atom("p", (const("a"), const("b")))
    existing = {"_x": const("a")}
    out = unify(a, b, existing)
    assert existing == {"_x": const("a")}
    assert out == {"_x": const("a"), "_y": const("b")}


def test_unify_predicate_mismatch_is_failure_value():
    assert unify(Atom("p", (var("_x"),)), Atom("q", (const("a"),))) is None


# ---------------------------------------------------------------------------
# Forward chaining
# ---------------------------------------------------------------------------


def scenario_kb() -> KnowledgeBase:
    kb = KnowledgeBase()
    kb.add_rule_text("canAccesHost(_h) :- execCode(_h, _a)")
    kb.add_rule_text(
        "harvestCredentials(_host, _lastuser) :- "
        "execCode(_host, _user), hasCredentialsOnMemory(_host, _lastuser)"
    )
    kb.add_fact_text("execCode(start, adv)")
    kb.add_fact_text("hasCredentialsOnMemory(start, olivia)")
    return kb


def test_forward_chain_derives_harvest_and_access():
    kb = scenario_kb()
    facts, derivations = forward_chain(kb)
    assert parse_fact("harvestCredentials(start, olivia)") in facts
    assert parse_fact("canAccesHost(start)") in facts
    assert facts == set(kb.facts) | {
        parse_fact("harvestCredentials(start, olivia)"),
        parse_fact("canAccesHost(start)"),
    }
    assert len(derivations) == 2


def test_forward_chain_empty_rule_set_is_identity():
    kb = KnowledgeBase()
    kb.add_fact_text("p(a)")
    kb.add_fact_text("q(b, c)")
    facts, derivations = forward_chain(kb)
    assert facts == set(kb.facts)
    assert derivations == []


def test_forward_chain_matches_naive_oracle_sample():
    rng = random.Random(20260808)
    for _ in range(15):
        kb = random_kb(rng)
        facts, _ = forward_chain(kb)
        assert facts == naive_fixpoint(kb.rules, kb.facts)


def test_forward_chain_soundness_of_derivations():
    rng = random.Random(99)
    for _ in range(10):
        kb = random_kb(rng)
        facts, derivations = forward_chain(kb)
        for deriv in derivations:
            binding = deriv.binding_map()
            rule = kb.rules[deriv.rule_index]
            assert rule.label == deriv.rule_label
            assert substitute(rule.head, binding) == deriv.conclusion
            assert tuple(substitute(b, binding) for b in rule.body) == deriv.premises
            assert all(premise in facts for premise in deriv.premises)
            assert deriv.conclusion in facts


def test_forward_chain_monotone_under_added_fact():
    rng = random.Random(7)
    for _ in range(10):
        kb = random_kb(rng)
        base_facts, _ = forward_chain(kb)
        predicate, arity = kb.rules[0].head.predicate, kb.rules[0].head.arity if kb.rules else ("p0", 1)
        extra = Atom(predicate, tuple(const("c0") for _ in range(arity)))
        kb.add_fact(extra)
        grown_facts, _ = forward_chain(kb)
        assert base_facts <= grown_facts


def test_forward_chain_deterministic():
    rng = random.Random(31)
    for _ in range(10):
        kb = random_kb(rng)
        first = forward_chain(kb)
        second = forward_chain(kb)
        assert first[0] == second[0]
        assert first[1] == second[1]


def test_derivations_unique_per_rule_and_binding():
    kb = KnowledgeBase()
    kb.add_rule_text("p(_x) :- q(_x), r(_x)")
    kb.add_fact_text("q(a)")
    kb.add_fact_text("r(a)")
    _, derivations = forward_chain(kb)
    keys = [(d.rule_index, d.binding) for d in derivations]
    assert len(keys) == len(set(keys)) == 1


def test_alternate_derivations_of_same_fact_are_retained():
    kb = KnowledgeBase()
    kb.add_rule_text("p(_x) :- q(_x)")
    kb.add_rule_text("p(_x) :- r(_x)")
    kb.add_fact_text("q(a)")
    kb.add_fact_text("r(a)")
    facts, derivations = forward_chain(kb)
    assert parse_fact("p(a)") in facts
    assert len(derivations) == 2


def test_parse_print_round_trip():
    rng = random.Random(13)
    for _ in range(25):
        kb = random_kb(rng)
        for rule in kb.rules:
            assert parse_rule(str(rule)) == rule
        for fact in kb.facts:
            assert parse_fact(str(fact)) == fact


def test_resource_limit_guards_blowup():
    kb = KnowledgeBase()
    kb.add_rule_text("pair(_x, _y) :- elem(_x), elem(_y)")
    for i in range(40):
        kb.add_fact_text(f"elem(e{i})")
    with pytest.raises(LimitExceededError):
        forward_chain(kb, max_derived_facts=100)
