from __future__ import annotations

import random

import pytest

from attackgraph.errors import GoalNotDerivableError, UnknownNodeError
from attackgraph.graph import (
    AttackGraph,
    AttackNode,
    NodeColor,
    NodeKind,
    build_graph,
    color_for,
    indegree,
    is_acyclic,
    outdegree,
    roots,
    shortest_path,
    sinks,
    structure_digest,
    to_document,
    to_dot,
    validate_structure,
)
from attackgraph.logic import KnowledgeBase, forward_chain, parse_fact

from .oracles import enumerate_shortest, random_digraph


def scenario_graph():
    kb = KnowledgeBase()
    kb.add_rule_text("canAccesHost(_h) :- execCode(_h, _a)")
    kb.add_rule_text(
        "harvestCredentials(_host, _lastuser) :- "
        "execCode(_host, _user), hasCredentialsOnMemory(_host, _lastuser)"
    )
    kb.add_fact_text("execCode(start, adv)")
    kb.add_fact_text("hasCredentialsOnMemory(start, olivia)")
    facts, derivations = forward_chain(kb)
    goal = parse_fact("harvestCredentials(start, olivia)")
    assert goal in facts
    return build_graph(derivations, kb.facts, goal), kb, derivations


def test_build_graph_two_rule_scenario():
    graph, _, _ = scenario_graph()
    kinds = [node.kind for node in graph.nodes.values()]
    assert kinds.count(NodeKind.LEAF) == 2
    assert kinds.count(NodeKind.RULE) == 1
    assert kinds.count(NodeKind.FACT) == 1
    assert graph.goal == 1
    assert graph.nodes[1].kind is NodeKind.FACT
    assert graph.nodes[2].kind is NodeKind.RULE
    # Premise order fixes leaf numbering: execCode first.
    assert graph.nodes[3].label == "execCode(start, adv)"
    assert graph.nodes[4].label == "hasCredentialsOnMemory(start, olivia)"
    assert graph.arcs == {(2, 1), (3, 2), (4, 2)}
    validate_structure(graph)


def test_build_graph_goal_as_input_fact_is_single_leaf():
    kb = KnowledgeBase()
    kb.add_fact_text("p(a)")
    facts, derivations = forward_chain(kb)
    graph = build_graph(derivations, kb.facts, parse_fact("p(a)"))
    assert len(graph.nodes) == 1
    assert graph.arcs == frozenset()
    assert graph.nodes[1].kind is NodeKind.LEAF
    assert roots(graph) == sinks(graph) == {1}


def test_build_graph_underivable_goal_raises():
    kb = KnowledgeBase()
    kb.add_fact_text("p(a)")
    facts, derivations = forward_chain(kb)
    with pytest.raises(GoalNotDerivableError):
        build_graph(derivations, kb.facts, parse_fact("q(a)"))


def test_build_graph_prunes_unrelated_derivations():
    graph, _, _ = scenario_graph()
    # canAccesHost(start) is derivable but irrelevant to the goal.
    assert not any("canAccesHost" in node.label for node in graph.nodes.values())
    # Everything left reaches the goal going forward.
    for nid in graph.nodes:
        seen = {nid}
        frontier = [nid]
        while frontier:
            current = frontier.pop()
            for child in graph.children(current):
                if child not in seen:
                    seen.add(child)
                    frontier.append(child)
        assert graph.goal in seen


def test_build_graph_deterministic_ids():
    first, _, _ = scenario_graph()
    second, _, _ = scenario_graph()
    assert {n: (v.kind, v.label) for n, v in first.nodes.items()} == {
        n: (v.kind, v.label) for n, v in second.nodes.items()
    }
    assert first.arcs == second.arcs


def test_degrees_and_handshake():
    graph, _, _ = scenario_graph()
    assert roots(graph) == {3, 4}
    assert sinks(graph) == {1}
    assert indegree(graph, 2) == 2
    assert outdegree(graph, 2) == 1
    total_in = sum(indegree(graph, n) for n in graph.nodes)
    total_out = sum(outdegree(graph, n) for n in graph.nodes)
    assert total_in == total_out == len(graph.arcs)


def test_degree_handshake_on_random_graphs():
    rng = random.Random(5)
    for _ in range(20):
        graph, _, _ = random_digraph(rng)
        total_in = sum(indegree(graph, n) for n in graph.nodes)
        total_out = sum(outdegree(graph, n) for n in graph.nodes)
        assert total_in == total_out == len(graph.arcs)


def test_unknown_node_id_raises():
    graph, _, _ = scenario_graph()
    with pytest.raises(UnknownNodeError):
        indegree(graph, 99)
    with pytest.raises(UnknownNodeError):
        shortest_path(graph, {99}, 1)
    with pytest.raises(UnknownNodeError):
        shortest_path(graph, {3}, 99)


def test_is_acyclic_scenario_and_two_cycle():
    graph, _, _ = scenario_graph()
    assert is_acyclic(graph) == (True, None)

    nodes = {
        1: AttackNode(1, NodeKind.FACT, "a", NodeColor.GREEN),
        2: AttackNode(2, NodeKind.FACT, "b", NodeColor.GREEN),
    }
    cyclic = AttackGraph(nodes, {(1, 2), (2, 1)}, goal=1)
    ok, witness = is_acyclic(cyclic)
    assert not ok
    assert witness == [1, 2, 1]
    # Witness entries are consecutive arcs.
    for parent, child in zip(witness, witness[1:]):
        assert (parent, child) in cyclic.arcs


def test_shortest_path_trivial_cases():
    graph, _, _ = scenario_graph()
    report = shortest_path(graph, {3}, 1)
    assert report.exists and report.length == 2 and report.path == (3, 2, 1)

    unreachable = shortest_path(graph, {1}, 3)
    assert not unreachable.exists
    assert unreachable.length is None
    assert unreachable.path == ()

    single_arc = shortest_path(graph, {2}, 1)
    assert single_arc.length == 1


def test_shortest_path_goal_in_sources():
    graph, _, _ = scenario_graph()
    report = shortest_path(graph, {1, 3}, 1)
    assert report.exists and report.length == 0 and report.path == (1,)


def test_shortest_path_matches_enumeration_oracle():
    rng = random.Random(424242)
    for _ in range(30):
        graph, sources, goal = random_digraph(rng)
        expected = enumerate_shortest(graph, sources, goal)
        report = shortest_path(graph, sources, goal)
        if expected is None:
            assert not report.exists
        else:
            assert report.exists
            assert report.length == expected
            # The reported path must be a real walk of the graph.
            assert report.path[0] in sources and report.path[-1] == goal
            for parent, child in zip(report.path, report.path[1:]):
                assert (parent, child) in graph.arcs


def test_shortest_path_lexicographic_tie_break():
    nodes = {
        i: AttackNode(i, NodeKind.FACT, f"n{i}", NodeColor.GREEN) for i in range(1, 6)
    }
    # Two length-2 routes from node 5 to node 1: via 2 and via 3.
    arcs = {(5, 2), (5, 3), (2, 1), (3, 1), (4, 1)}
    graph = AttackGraph(nodes, arcs, goal=1)
    report = shortest_path(graph, {5}, 1)
    assert report.path == (5, 2, 1)
    # Multiple sources: smallest qualifying source wins.
    report = shortest_path(graph, {5, 4}, 1)
    assert report.path == (4, 1)


def test_color_function():
    assert color_for(NodeKind.RULE) is NodeColor.YELLOW
    assert color_for(NodeKind.FACT) is NodeColor.GREEN
    assert color_for(NodeKind.LEAF, "vulExists") is NodeColor.RED
    assert color_for(NodeKind.LEAF, "hacl") is NodeColor.ORANGE


def test_export_document_shape():
    graph, _, _ = scenario_graph()
    doc = to_document(graph)
    assert doc["format_version"] == 1
    assert doc["goal"] == 1
    assert [n["id"] for n in doc["nodes"]] == [1, 2, 3, 4]
    assert all(set(n) == {"id", "kind", "label", "color"} for n in doc["nodes"])
    assert doc["arcs"] == sorted([[2, 1], [3, 2], [4, 2]])


def test_export_dot_mentions_nodes_and_colors():
    graph, _, _ = scenario_graph()
    dot = to_dot(graph)
    assert dot.startswith("// format_version: 1\ndigraph attack_graph {")
    assert "fillcolor=yellow" in dot
    assert "n3 -> n2;" in dot


def test_structure_digest_invariant_under_relabeling():
    graph, _, _ = scenario_graph()
    # Renumber nodes 1..4 -> 11..14 preserving labels and arcs.
    mapping = {nid: nid + 10 for nid in graph.nodes}
    nodes = {
        mapping[n.id]: AttackNode(mapping[n.id], n.kind, n.label, n.color, n.atom, n.rule_label, n.binding)
        for n in graph.nodes.values()
    }
    arcs = {(mapping[p], mapping[c]) for p, c in graph.arcs}
    relabeled = AttackGraph(nodes, arcs, goal=mapping[graph.goal])
    assert structure_digest(relabeled) == structure_digest(graph)

    # Changing any label changes the digest.
    nodes[11] = AttackNode(11, NodeKind.FACT, "different", NodeColor.GREEN)
    changed = AttackGraph(nodes, arcs, goal=11)
    assert structure_digest(changed) != structure_digest(graph)


def test_with_additions_rejects_duplicate_ids():
    graph, _, _ = scenario_graph()
    clash = AttackNode(1, NodeKind.FACT, "dup", NodeColor.GREEN)
    with pytest.raises(ValueError):
        graph.with_additions([clash], [])


def test_arc_to_missing_node_rejected():
    nodes = {1: AttackNode(1, NodeKind.FACT, "a", NodeColor.GREEN)}
    with pytest.raises(UnknownNodeError):
        AttackGraph(nodes, {(1, 2)}, goal=1)
