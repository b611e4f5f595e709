"""Ontology-driven graph enrichment.

Given a confirmed exploitation hypothesis, fetch the CVE's post-conditions
from the ontology and graft them onto the graph: one green impact node per
post-condition not yet represented for that host, fed by the exploit's
rule node. Configured impact rules then wire matching impacts onward as
new preconditions of existing rule nodes, which is how an alert can open a
shorter route to the goal without regenerating the graph.

Enrichment only ever adds nodes and arcs; every prior version stays a
subgraph of every later one, and re-running the same hypothesis yields an
empty delta.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .alerts import Confidence, CONFIDENCE_RANK, ExploitationHypothesis
from .errors import EnrichmentDriftError, ImpactRuleError, LowConfidenceError
from .graph import (
    AttackGraph,
    AttackNode,
    NodeColor,
    NodeKind,
    PathReport,
    roots,
    shortest_path,
)
from .ontology import ImpactKind, LogicalImpact, OntologyStore, post_conditions, product_matches


class PathChange(str, Enum):
    SHORTER = "shorter"
    UNCHANGED = "unchanged"
    LONGER = "longer"
    NEWLY_REACHABLE = "newly_reachable"


@dataclass(frozen=True)
class ImpactRule:
    """Routes impacts of a given shape into an existing rule node class."""

    trigger_kind: str
    trigger_subtype: str | None
    target_rule_label: str
    description: str = ""

    def matches(self, impact: LogicalImpact) -> bool:
        if self.trigger_kind != "*" and self.trigger_kind != impact.kind.value:
            return False
        if self.trigger_subtype in (None, "*"):
            return True
        return self.trigger_subtype == (impact.subtype or impact.location)


@dataclass
class EnrichmentPolicy:
    min_confidence: Confidence = Confidence.CVE_CONFIRMED
    one_node_per_impact_subtype: bool = True
    impact_rules: tuple[ImpactRule, ...] = ()


@dataclass(frozen=True)
class GraphDelta:
    """Everything one enrichment step added, plus the path-length report."""

    added_nodes: tuple[AttackNode, ...]
    added_arcs: tuple[tuple[int, int], ...]
    trigger: str
    before_path: PathReport
    after_path: PathReport
    classification: PathChange
    reason: str | None = None

    @property
    def is_empty(self) -> bool:
        return not self.added_nodes and not self.added_arcs

    def to_dict(self) -> dict[str, Any]:
        def report_dict(report: PathReport) -> dict[str, Any]:
            return {"exists": report.exists, "length": report.length, "path": list(report.path)}

        return {
            "trigger": self.trigger,
            "added_nodes": [
                {"id": n.id, "kind": n.kind.value, "label": n.label, "color": n.color.value}
                for n in self.added_nodes
            ],
            "added_arcs": [list(arc) for arc in self.added_arcs],
            "before_path": report_dict(self.before_path),
            "after_path": report_dict(self.after_path),
            "classification": self.classification.value,
            "reason": self.reason,
        }


def load_impact_rules(
    entries: Iterable[Mapping[str, Any]], known_rule_labels: Iterable[str]
) -> tuple[ImpactRule, ...]:
    """Validate impact-rule configuration against the loaded rule set."""
    labels = set(known_rule_labels)
    kinds = {k.value for k in ImpactKind}
    rules = []
    for index, entry in enumerate(entries):
        kind = entry.get("trigger_kind")
        if not kind or (kind != "*" and kind not in kinds):
            raise ImpactRuleError(f"impact rule {index}: unknown trigger_kind {kind!r}")
        target = entry.get("target_rule_label")
        if not target:
            raise ImpactRuleError(f"impact rule {index}: missing target_rule_label")
        if target not in labels:
            raise ImpactRuleError(
                f"impact rule {index}: target_rule_label {target!r} names no loaded rule"
            )
        rules.append(
            ImpactRule(
                trigger_kind=kind,
                trigger_subtype=entry.get("trigger_subtype"),
                target_rule_label=target,
                description=str(entry.get("description", "")),
            )
        )
    return tuple(rules)


def load_impact_rules_file(
    path: str | Path, known_rule_labels: Iterable[str]
) -> tuple[ImpactRule, ...]:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(document, list):
        raise ImpactRuleError("impact rules file must hold a JSON array")
    return load_impact_rules(document, known_rule_labels)


# ---------------------------------------------------------------------------
# Path reporting
# ---------------------------------------------------------------------------


def attack_sources(graph: AttackGraph) -> set[int]:
    """Where attack paths are measured from: the vulnerability leaves.

    A graph without any red leaf falls back to all roots.
    """
    reds = {n.id for n in graph.nodes.values() if n.color is NodeColor.RED}
    return reds or roots(graph)


def goal_path_report(graph: AttackGraph) -> PathReport:
    return shortest_path(graph, attack_sources(graph), graph.goal)


def path_comparison(before: PathReport, after: PathReport) -> PathChange:
    """Classify the path-length change between two goal-equal reports."""
    if before.goal != after.goal:
        raise ValueError(f"goal mismatch: {before.goal} vs {after.goal}")
    if not before.exists:
        return PathChange.NEWLY_REACHABLE if after.exists else PathChange.UNCHANGED
    if not after.exists:
        raise ValueError("goal became unreachable, which enrichment cannot cause")
    assert before.length is not None and after.length is not None
    if after.length < before.length:
        return PathChange.SHORTER
    if after.length > before.length:
        return PathChange.LONGER
    return PathChange.UNCHANGED


# ---------------------------------------------------------------------------
# Enrichment
# ---------------------------------------------------------------------------


def _impact_node_label(impact: LogicalImpact, host: str, per_subtype: bool) -> str:
    display = impact.display if per_subtype else impact.kind.value
    return f"impact:{display} on {host}"


def apply_impact_rules(
    graph: AttackGraph,
    impact_nodes: Sequence[AttackNode],
    policy: EnrichmentPolicy,
    impacts_by_node: Mapping[int, LogicalImpact],
) -> list[tuple[int, int]]:
    """Arcs from each impact node into every rule node its triggers match.

    The configuration was validated against the rule set at load time, so a
    matched trigger whose target rule node is absent from this graph means
    the graph and the configuration have drifted apart.
    """
    added: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set(graph.arcs)
    for node in impact_nodes:
        impact = impacts_by_node[node.id]
        for rule in policy.impact_rules:
            if not rule.matches(impact):
                continue
            targets = graph.rule_nodes_labelled(rule.target_rule_label)
            if not targets:
                raise EnrichmentDriftError(
                    f"impact rule targets {rule.target_rule_label!r} but the graph has no such rule node"
                )
            for target in targets:
                arc = (node.id, target.id)
                if arc not in seen:
                    seen.add(arc)
                    added.append(arc)
    return added


def enrich(
    graph: AttackGraph,
    hypothesis: ExploitationHypothesis,
    store: OntologyStore,
    policy: EnrichmentPolicy,
) -> tuple[GraphDelta, AttackGraph]:
    """Apply one exploitation hypothesis; returns the delta and new graph.

    No-op deltas (with a reason) are produced when the CVE has no ontology
    record, the host product is not in the record's product list, or every
    post-condition is already represented. Calling below the policy's
    confidence threshold is a caller error and raises.
    """
    if CONFIDENCE_RANK[hypothesis.confidence] < CONFIDENCE_RANK[policy.min_confidence]:
        raise LowConfidenceError(
            f"hypothesis {hypothesis.id} confidence {hypothesis.confidence.value} "
            f"below policy threshold {policy.min_confidence.value}"
        )

    before = goal_path_report(graph)

    def noop(reason: str) -> tuple[GraphDelta, AttackGraph]:
        delta = GraphDelta(
            added_nodes=(),
            added_arcs=(),
            trigger=hypothesis.id,
            before_path=before,
            after_path=before,
            classification=PathChange.UNCHANGED,
            reason=reason,
        )
        return delta, graph

    record = store.lookup(hypothesis.cve_id)
    if record is None:
        return noop("post-conditions not found")
    if not product_matches(record, hypothesis.host_product):
        return noop("product mismatch")
    rule_node_id = hypothesis.rule_node_id
    if rule_node_id is None or rule_node_id not in graph.nodes:
        return noop("no exploit rule node")

    existing_labels = {
        n.label for n in graph.nodes.values() if n.kind is NodeKind.FACT
    }
    new_nodes: list[AttackNode] = []
    exploit_arcs: list[tuple[int, int]] = []
    impacts_by_node: dict[int, LogicalImpact] = {}
    next_id = graph.next_node_id()
    for impact in post_conditions(record):
        label = _impact_node_label(impact, hypothesis.host, policy.one_node_per_impact_subtype)
        if label in existing_labels:
            continue
        existing_labels.add(label)
        node = AttackNode(
            id=next_id,
            kind=NodeKind.FACT,
            label=label,
            color=NodeColor.GREEN,
        )
        new_nodes.append(node)
        impacts_by_node[node.id] = impact
        exploit_arcs.append((rule_node_id, node.id))
        next_id += 1

    if not new_nodes:
        return noop("all post-conditions already represented")

    grown = graph.with_additions(new_nodes, exploit_arcs)
    routed_arcs = apply_impact_rules(grown, new_nodes, policy, impacts_by_node)
    enriched = grown.with_additions([], routed_arcs) if routed_arcs else grown

    after = goal_path_report(enriched)
    delta = GraphDelta(
        added_nodes=tuple(new_nodes),
        added_arcs=tuple(exploit_arcs + routed_arcs),
        trigger=hypothesis.id,
        before_path=before,
        after_path=after,
        classification=path_comparison(before, after),
        reason=None,
    )
    return delta, enriched
