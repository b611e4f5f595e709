"""Orchestration: load inputs, generate the graph, run the alert pipeline.

The engine owns the committed graph versions. All mutations funnel through
one lock (the single-consumer queue of the design), each applied delta
publishes a new immutable version, and readers only ever see committed
versions. What-if evaluation runs the same pipeline against a scratch
reference without committing, logging, or notifying anyone.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Callable, Iterable

from .alerts import (
    CONFIDENCE_RANK,
    ExploitationHypothesis,
    load_host_bindings_file,
    match_alert,
    parse_alert,
)
from .audit import AuditLog, record_hypothesis
from .config import DeploymentConfig
from .enrich import (
    EnrichmentPolicy,
    GraphDelta,
    enrich,
    goal_path_report,
    load_impact_rules_file,
    path_comparison,
)
from .errors import AlertError, EngineError, GoalNotDerivableError
from .graph import AttackGraph, build_graph, structure_digest, to_document
from .logic import KnowledgeBase, forward_chain, parse_fact
from .ontology import load_ontology_file


@dataclass(frozen=True)
class GraphVersion:
    version: int
    digest: str
    created: str
    provoked_by: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "digest": self.digest,
            "created": self.created,
            "provoked_by": self.provoked_by,
        }


@dataclass(frozen=True)
class _Commit:
    info: GraphVersion
    graph: AttackGraph
    delta: GraphDelta | None


class Engine:
    """Loads a deployment config and drives generation plus enrichment."""

    def __init__(self, config: DeploymentConfig):
        self.config = config
        self.kb = KnowledgeBase.load(
            config.rules_path, config.facts_path, max_derived_facts=config.limits.max_derived_facts
        )
        self.goal = parse_fact(config.goal_text, self.kb.arities)
        self.store = load_ontology_file(config.ontology_path)
        self.bindings = load_host_bindings_file(config.host_bindings_path)
        impact_rules = load_impact_rules_file(
            config.impact_rules_path, (rule.label for rule in self.kb.rules)
        )
        self.policy = EnrichmentPolicy(
            min_confidence=config.min_confidence,
            one_node_per_impact_subtype=config.one_node_per_impact_subtype,
            impact_rules=impact_rules,
        )
        self.audit = AuditLog(config.audit_log_path)
        self._commits: list[_Commit] = []
        self._lock = threading.Lock()
        self._listeners: list[Callable[[dict[str, Any]], None]] = []

    # -- versions ----------------------------------------------------------

    @property
    def current(self) -> _Commit:
        if not self._commits:
            raise EngineError("no graph generated yet")
        return self._commits[-1]

    @property
    def current_graph(self) -> AttackGraph:
        return self.current.graph

    def history(self) -> list[dict[str, Any]]:
        return [
            {
                **commit.info.to_dict(),
                "delta": commit.delta.to_dict() if commit.delta else None,
            }
            for commit in self._commits
        ]

    def version_announcements(self) -> list[dict[str, Any]]:
        return [self._announcement(commit) for commit in self._commits]

    def add_listener(self, callback: Callable[[dict[str, Any]], None]) -> None:
        self._listeners.append(callback)

    def _announcement(self, commit: _Commit) -> dict[str, Any]:
        summary: dict[str, Any] = {"added_nodes": 0, "classification": None}
        if commit.delta is not None:
            summary = {
                "added_nodes": len(commit.delta.added_nodes),
                "classification": commit.delta.classification.value,
            }
        return {**commit.info.to_dict(), "summary": summary}

    def _commit_version(self, graph: AttackGraph, provoked_by: str, delta: GraphDelta | None) -> _Commit:
        info = GraphVersion(
            version=len(self._commits) + 1,
            digest=structure_digest(graph),
            created=datetime.now(tz=timezone.utc).isoformat(),
            provoked_by=provoked_by,
        )
        commit = _Commit(info=info, graph=graph, delta=delta)
        self._commits.append(commit)
        event = "generation" if delta is None else "delta"
        payload: dict[str, Any] = {"version": info.version, "digest": info.digest, "provoked_by": provoked_by}
        if delta is not None:
            payload["delta"] = delta.to_dict()
        self.audit.append(event, payload)
        announcement = self._announcement(commit)
        for listener in self._listeners:
            listener(announcement)
        return commit

    # -- pipeline ----------------------------------------------------------

    def generate(self) -> GraphVersion:
        """Forward-chain the knowledge base and build graph version 1."""
        with self._lock:
            if self._commits:
                raise EngineError("graph already generated")
            facts, derivations = forward_chain(self.kb)
            if self.goal not in facts:
                raise GoalNotDerivableError(
                    f"goal {self.goal} is not derivable from the configured rules and facts"
                )
            graph = build_graph(derivations, self.kb.facts, self.goal)
            return self._commit_version(graph, provoked_by="generation", delta=None).info

    def handle_alert(self, document: Any, commit: bool = True) -> dict[str, Any]:
        """Run parse -> match -> enrich for one alert document.

        With ``commit=False`` this is the what-if path: the same pipeline
        evaluated against a scratch reference to the committed graph, with
        nothing committed, logged, or announced.
        """
        with self._lock:
            alert = parse_alert(document)
            if commit:
                self.audit.append(
                    "alert",
                    {"alert_id": alert.id, "alert": _jsonable_raw(alert.raw)},
                )
            scratch = self.current_graph
            hypotheses = match_alert(alert, scratch, self.kb, self.bindings)
            results = []
            for hypothesis in hypotheses:
                if commit:
                    record_hypothesis(self.audit, hypothesis)
                result, scratch = self._apply_hypothesis(hypothesis, scratch, commit)
                results.append(result)
            return {
                "alert_id": alert.id,
                "committed": commit,
                "hypotheses": [h.to_dict() for h in hypotheses],
                "results": results,
                "version": self.current.info.version if commit else None,
                "digest": structure_digest(scratch),
            }

    def _apply_hypothesis(
        self, hypothesis: ExploitationHypothesis, base: AttackGraph, commit: bool
    ) -> tuple[dict[str, Any], AttackGraph]:
        result: dict[str, Any] = {"hypothesis_id": hypothesis.id}
        if CONFIDENCE_RANK[hypothesis.confidence] < CONFIDENCE_RANK[self.policy.min_confidence]:
            result.update(status="skipped_low_confidence", delta=None)
            return result, base
        delta, new_graph = enrich(base, hypothesis, self.store, self.policy)
        if delta.is_empty:
            result.update(status="no_change", reason=delta.reason, delta=delta.to_dict())
        else:
            result.update(status="applied", delta=delta.to_dict())
            if commit:
                info = self._commit_version(new_graph, provoked_by=hypothesis.id, delta=delta).info
                result["version"] = info.version
                result["digest"] = info.digest
        return result, new_graph

    def whatif(self, document: Any) -> dict[str, Any]:
        return self.handle_alert(document, commit=False)

    def replay_alerts(self, lines: Iterable[str]) -> dict[str, Any]:
        """Replay newline-delimited alert documents or audit-log lines.

        Audit-log lines that are not alert events are ignored; alert events
        contribute their recorded raw document. Unparseable lines are
        skipped and counted.
        """
        summaries = []
        skipped = 0
        for line in lines:
            line = line.strip()
            if not line:
                continue
            document: Any = line
            try:
                parsed = json.loads(line)
            except json.JSONDecodeError:
                skipped += 1
                summaries.append({"error": "not valid JSON"})
                continue
            if isinstance(parsed, dict) and "event" in parsed:
                if parsed.get("event") != "alert":
                    continue
                document = parsed.get("alert")
            else:
                document = parsed
            try:
                summaries.append(self.handle_alert(document))
            except AlertError as exc:
                skipped += 1
                summaries.append({"error": str(exc)})
        overall = self.final_classification()
        return {
            "alerts": summaries,
            "skipped": skipped,
            "final_version": self.current.info.version,
            "final_digest": self.current.info.digest,
            "final_classification": overall.value,
        }

    def final_classification(self):
        """Path change of the latest graph relative to version 1."""
        first = self._commits[0].graph
        return path_comparison(goal_path_report(first), goal_path_report(self.current_graph))

    # -- exports -----------------------------------------------------------

    def export_current(self) -> dict[str, Any]:
        commit = self.current
        return {
            "format_version": 1,
            **commit.info.to_dict(),
            "graph": to_document(commit.graph),
        }


def _jsonable_raw(raw: Any) -> Any:
    if isinstance(raw, bytes):
        return raw.decode("utf-8", errors="replace")
    if isinstance(raw, str):
        return raw
    return raw
