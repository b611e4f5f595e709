"""AND-OR attack graphs built from forward-chaining derivations.

Three node kinds: LEAF nodes are primitive input facts (the graph's roots),
RULE nodes are AND nodes (one rule instantiation, satisfied only when all
parents hold), FACT nodes are OR nodes (derived facts, satisfied by any
parent rule). Arcs run from precondition (parent) to consequence (child),
so the adversary's goal is the sink.

Node colors follow the usual rendering convention: red for a
vulnerability-existence leaf, orange for other network-configuration
leaves, yellow for rules, green for derived facts.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import GoalNotDerivableError, UnknownNodeError
from .logic import Atom, Binding, Derivation

EXPORT_FORMAT_VERSION = 1

VULNERABILITY_PREDICATE = "vulExists"


class NodeKind(str, Enum):
    LEAF = "LEAF"
    RULE = "RULE"
    FACT = "FACT"


class NodeColor(str, Enum):
    RED = "red"
    ORANGE = "orange"
    YELLOW = "yellow"
    GREEN = "green"


def color_for(kind: NodeKind, predicate: str | None = None) -> NodeColor:
    """Color is a pure function of node kind and leaf predicate class."""
    if kind is NodeKind.RULE:
        return NodeColor.YELLOW
    if kind is NodeKind.FACT:
        return NodeColor.GREEN
    if predicate == VULNERABILITY_PREDICATE:
        return NodeColor.RED
    return NodeColor.ORANGE


@dataclass(frozen=True)
class AttackNode:
    """One graph vertex. LEAF/FACT nodes carry an atom, RULE nodes carry
    the rule label plus the binding that instantiated it."""

    id: int
    kind: NodeKind
    label: str
    color: NodeColor
    atom: Atom | None = None
    rule_label: str | None = None
    binding: Binding | None = None


def _rule_node_label(rule_label: str, binding: Binding) -> str:
    inner = ", ".join(f"{name}={term}" for name, term in binding)
    return f"{rule_label}{{{inner}}}"


@dataclass(frozen=True)
class PathReport:
    """A shortest directed path from some source node to the goal."""

    path: tuple[int, ...]
    length: int | None
    exists: bool
    goal: int


class AttackGraph:
    """Immutable AND-OR directed graph; enrichment builds new versions."""

    def __init__(self, nodes: Mapping[int, AttackNode], arcs: Iterable[tuple[int, int]], goal: int):
        self.nodes: dict[int, AttackNode] = dict(nodes)
        self.arcs: frozenset[tuple[int, int]] = frozenset(arcs)
        self.goal = goal
        if goal not in self.nodes:
            raise UnknownNodeError(f"goal node {goal} not in graph")
        for parent, child in self.arcs:
            if parent not in self.nodes or child not in self.nodes:
                raise UnknownNodeError(f"arc ({parent}, {child}) references a missing node")
        self._children: dict[int, list[int]] = {nid: [] for nid in self.nodes}
        self._parents: dict[int, list[int]] = {nid: [] for nid in self.nodes}
        for parent, child in sorted(self.arcs):
            self._children[parent].append(child)
            self._parents[child].append(parent)

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, node_id: int) -> AttackNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"unknown node id {node_id}") from None

    def children(self, node_id: int) -> tuple[int, ...]:
        self.node(node_id)
        return tuple(self._children[node_id])

    def parents(self, node_id: int) -> tuple[int, ...]:
        self.node(node_id)
        return tuple(self._parents[node_id])

    def with_additions(
        self, new_nodes: Sequence[AttackNode], new_arcs: Iterable[tuple[int, int]]
    ) -> "AttackGraph":
        nodes = dict(self.nodes)
        for node in new_nodes:
            if node.id in nodes:
                raise ValueError(f"node id {node.id} already present")
            nodes[node.id] = node
        return AttackGraph(nodes, self.arcs | set(new_arcs), self.goal)

    def next_node_id(self) -> int:
        return max(self.nodes) + 1

    def leaves_of_predicate(self, predicate: str) -> list[AttackNode]:
        return [
            n
            for n in sorted(self.nodes.values(), key=lambda n: n.id)
            if n.kind is NodeKind.LEAF and n.atom is not None and n.atom.predicate == predicate
        ]

    def rule_nodes_labelled(self, rule_label: str) -> list[AttackNode]:
        return [
            n
            for n in sorted(self.nodes.values(), key=lambda n: n.id)
            if n.kind is NodeKind.RULE and n.rule_label == rule_label
        ]


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def build_graph(
    derivations: Sequence[Derivation], input_facts: Iterable[Atom], goal: Atom
) -> AttackGraph:
    """Build the proof graph of everything reachable backward from ``goal``.

    Node ids are assigned by breadth-first traversal from the goal over
    parent links (goal gets id 1, leaves the largest ids), so identical
    inputs always yield identical numbering. Derivations that do not sit on
    a backward path from the goal are pruned. Atoms present among the input
    facts become LEAF nodes and are never expanded further, even if some
    rule also re-derives them.
    """
    input_set = set(input_facts)
    by_conclusion: dict[Atom, list[Derivation]] = {}
    for deriv in derivations:
        by_conclusion.setdefault(deriv.conclusion, []).append(deriv)

    if goal not in input_set and goal not in by_conclusion:
        raise GoalNotDerivableError(f"goal {goal} is neither an input fact nor derivable")

    # Traversal keys: ("leaf"|"fact", atom) or ("rule", rule_index, binding).
    goal_key = ("leaf", goal) if goal in input_set else ("fact", goal)
    ids: dict[tuple, int] = {goal_key: 1}
    order: list[tuple] = [goal_key]
    arcs: set[tuple[int, int]] = set()
    deriv_by_key: dict[tuple, Derivation] = {}
    queue: deque[tuple] = deque([goal_key])

    def visit(key: tuple, child_id: int) -> None:
        if key not in ids:
            ids[key] = len(ids) + 1
            order.append(key)
            queue.append(key)
        arcs.add((ids[key], child_id))

    while queue:
        key = queue.popleft()
        node_id = ids[key]
        if key[0] == "fact":
            for deriv in by_conclusion[key[1]]:
                deriv_key = ("rule", deriv.rule_index, deriv.binding)
                deriv_by_key[deriv_key] = deriv
                visit(deriv_key, node_id)
        elif key[0] == "rule":
            deriv = deriv_by_key[key]
            for premise in deriv.premises:
                premise_key = ("leaf", premise) if premise in input_set else ("fact", premise)
                visit(premise_key, node_id)

    nodes: dict[int, AttackNode] = {}
    for key in order:
        node_id = ids[key]
        if key[0] == "rule":
            deriv = deriv_by_key[key]
            nodes[node_id] = AttackNode(
                id=node_id,
                kind=NodeKind.RULE,
                label=_rule_node_label(deriv.rule_label, deriv.binding),
                color=color_for(NodeKind.RULE),
                rule_label=deriv.rule_label,
                binding=deriv.binding,
            )
        else:
            kind = NodeKind.LEAF if key[0] == "leaf" else NodeKind.FACT
            atom = key[1]
            nodes[node_id] = AttackNode(
                id=node_id,
                kind=kind,
                label=str(atom),
                color=color_for(kind, atom.predicate),
                atom=atom,
            )

    return AttackGraph(nodes, arcs, goal=1)


# ---------------------------------------------------------------------------
# Analytics
# ---------------------------------------------------------------------------


def indegree(graph: AttackGraph, node_id: int) -> int:
    return len(graph.parents(node_id))


def outdegree(graph: AttackGraph, node_id: int) -> int:
    return len(graph.children(node_id))


def roots(graph: AttackGraph) -> set[int]:
    return {nid for nid in graph.nodes if not graph.parents(nid)}


def sinks(graph: AttackGraph) -> set[int]:
    return {nid for nid in graph.nodes if not graph.children(nid)}


def is_acyclic(graph: AttackGraph) -> tuple[bool, list[int] | None]:
    """Return (True, None) or (False, witness) with the witness written as a
    node-id list that starts and ends on the repeated node."""
    WHITE, GRAY, BLACK = 0, 1, 2
    state = {nid: WHITE for nid in graph.nodes}
    parent_on_stack: dict[int, int] = {}

    for start in sorted(graph.nodes):
        if state[start] != WHITE:
            continue
        stack: list[tuple[int, int]] = [(start, 0)]
        state[start] = GRAY
        while stack:
            node, child_index = stack[-1]
            children = graph.children(node)
            if child_index >= len(children):
                state[node] = BLACK
                stack.pop()
                continue
            stack[-1] = (node, child_index + 1)
            child = children[child_index]
            if state[child] == GRAY:
                cycle = [child]
                cursor = node
                while cursor != child:
                    cycle.append(cursor)
                    cursor = parent_on_stack[cursor]
                cycle.append(child)
                cycle[1:-1] = reversed(cycle[1:-1])
                return False, cycle
            if state[child] == WHITE:
                state[child] = GRAY
                parent_on_stack[child] = node
                stack.append((child, 0))
    return True, None


def shortest_path(graph: AttackGraph, sources: Iterable[int], goal: int) -> PathReport:
    """Minimal-arc-count directed path from any source to ``goal``.

    Ties break toward the lexicographically smallest id sequence. Works on
    cyclic graphs (a shortest path never revisits a node).
    """
    graph.node(goal)
    source_ids = sorted(set(sources))
    for sid in source_ids:
        graph.node(sid)

    # Distance-to-goal over forward arcs, via BFS on reversed arcs.
    dist: dict[int, int] = {goal: 0}
    queue: deque[int] = deque([goal])
    while queue:
        node = queue.popleft()
        for parent in graph.parents(node):
            if parent not in dist:
                dist[parent] = dist[node] + 1
                queue.append(parent)

    reachable = [sid for sid in source_ids if sid in dist]
    if not reachable:
        return PathReport(path=(), length=None, exists=False, goal=goal)

    best = min(dist[sid] for sid in reachable)
    current = min(sid for sid in reachable if dist[sid] == best)
    path = [current]
    while current != goal:
        current = min(c for c in graph.children(current) if dist.get(c) == dist[current] - 1)
        path.append(current)
    return PathReport(path=tuple(path), length=len(path) - 1, exists=True, goal=goal)


def validate_structure(graph: AttackGraph) -> None:
    """Assert the structural invariants every graph version must keep."""
    for nid, node in graph.nodes.items():
        if nid != node.id or nid < 1:
            raise ValueError(f"node id mismatch for {nid}")
        predicate = node.atom.predicate if node.atom is not None else None
        if node.color is not color_for(node.kind, predicate):
            raise ValueError(f"node {nid} color {node.color} inconsistent with kind/predicate")
        if node.kind is NodeKind.LEAF and indegree(graph, nid) != 0:
            raise ValueError(f"LEAF node {nid} has incoming arcs")
        if node.kind is NodeKind.RULE:
            children = [graph.node(c) for c in graph.children(nid)]
            if any(c.kind is not NodeKind.FACT for c in children):
                raise ValueError(f"RULE node {nid} has a non-FACT child")
            # Exactly one child is the rule's conclusion; any others are
            # synthetic impact consequences added by enrichment (atom-less).
            conclusions = [c for c in children if c.atom is not None]
            if len(conclusions) != 1:
                raise ValueError(f"RULE node {nid} must have exactly one conclusion FACT child")
            if indegree(graph, nid) == 0:
                raise ValueError(f"RULE node {nid} has no premises")
        if node.kind is NodeKind.FACT and indegree(graph, nid) == 0:
            raise ValueError(f"FACT node {nid} has no supporting parent")


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def to_document(graph: AttackGraph) -> dict:
    """Structured export: nodes with id/kind/label/color, arcs as id pairs."""
    return {
        "format_version": EXPORT_FORMAT_VERSION,
        "goal": graph.goal,
        "nodes": [
            {
                "id": node.id,
                "kind": node.kind.value,
                "label": node.label,
                "color": node.color.value,
            }
            for node in sorted(graph.nodes.values(), key=lambda n: n.id)
        ],
        "arcs": [list(arc) for arc in sorted(graph.arcs)],
    }


def to_dot(graph: AttackGraph) -> str:
    """DOT text for external renderers."""
    shapes = {NodeKind.LEAF: "box", NodeKind.RULE: "ellipse", NodeKind.FACT: "diamond"}
    lines = [
        f"// format_version: {EXPORT_FORMAT_VERSION}",
        "digraph attack_graph {",
        "  rankdir=TB;",
    ]
    for node in sorted(graph.nodes.values(), key=lambda n: n.id):
        label = f"{node.id}: {node.label}".replace('"', '\\"')
        lines.append(
            f'  n{node.id} [label="{label}", shape={shapes[node.kind]}, '
            f'style=filled, fillcolor={node.color.value}];'
        )
    for parent, child in sorted(graph.arcs):
        lines.append(f"  n{parent} -> n{child};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def structure_digest(graph: AttackGraph) -> str:
    """Stable hash of the labeled node/arc structure, independent of ids.

    Two graphs with the same (kind, color, label) node multiset and the
    same labeled arc set digest identically even when their numeric ids
    differ, which is what version comparison and replay checks rely on.
    """
    def signature(node: AttackNode) -> str:
        return f"{node.kind.value}|{node.color.value}|{node.label}"

    nodes = sorted(signature(n) for n in graph.nodes.values())
    arcs = sorted(
        f"{signature(graph.nodes[p])} -> {signature(graph.nodes[c])}" for p, c in graph.arcs
    )
    payload = json.dumps(
        {"nodes": nodes, "arcs": arcs, "goal": signature(graph.nodes[graph.goal])},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
