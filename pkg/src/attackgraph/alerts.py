"""Monitoring-alert intake and correlation against the attack graph.

An alert names a victim endpoint (address, protocol, port) and optionally
the CVE the sensor believes was exploited. Correlation walks every
vulnerability-existence leaf of the graph and emits an exploitation
hypothesis when the alert's endpoint maps onto that host and the fact base
confirms a matching open service. Host constants are tied to addresses by
an explicit deployment binding file, which also carries each host's
product string for the later ontology product check.
"""

from __future__ import annotations

import json
import re
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import AlertError, ConfigError
from .graph import AttackGraph, NodeKind, VULNERABILITY_PREDICATE
from .logic import KnowledgeBase

CVE_REF_RE = re.compile(r"CVE-\d{4}-\d{4,}\Z", re.IGNORECASE)
PROTOCOL_RE = re.compile(r"[a-z0-9]+\Z")

NETWORK_SERVICE_PREDICATE = "networkServiceInfo"


@dataclass(frozen=True)
class Alert:
    """A normalized monitoring event; ``raw`` keeps the original document."""

    id: str
    timestamp: datetime
    source_address: str | None
    target_address: str
    target_port: int | None
    protocol: str
    cve_refs: tuple[str, ...]
    classification: str
    raw: Any


@dataclass(frozen=True)
class HostBinding:
    """Deployment mapping of one logic host constant to its endpoint."""

    host: str
    address: str
    product: str
    os: str


class Confidence(str, Enum):
    CVE_CONFIRMED = "cve_confirmed"
    ENDPOINT_ONLY = "endpoint_only"


CONFIDENCE_RANK = {Confidence.ENDPOINT_ONLY: 0, Confidence.CVE_CONFIRMED: 1}


@dataclass(frozen=True)
class ExploitationHypothesis:
    """One graph leaf the alert plausibly exploited.

    ``node_ids`` lists the vulnerability LEAF first, followed by the RULE
    node(s) that consume it.
    """

    id: str
    alert_id: str
    node_ids: tuple[int, ...]
    cve_id: str
    host: str
    host_product: str
    confidence: Confidence

    @property
    def vul_node_id(self) -> int:
        return self.node_ids[0]

    @property
    def rule_node_id(self) -> int | None:
        return self.node_ids[1] if len(self.node_ids) > 1 else None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "alert_id": self.alert_id,
            "node_ids": list(self.node_ids),
            "cve_id": self.cve_id,
            "host": self.host,
            "host_product": self.host_product,
            "confidence": self.confidence.value,
        }


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _parse_timestamp(value: Any) -> datetime:
    if value is None:
        return datetime.now(tz=timezone.utc)
    if isinstance(value, (int, float)):
        return datetime.fromtimestamp(value, tz=timezone.utc)
    if isinstance(value, str):
        try:
            parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
        except ValueError:
            raise AlertError(f"malformed timestamp {value!r}") from None
        if parsed.tzinfo is None:
            parsed = parsed.replace(tzinfo=timezone.utc)
        return parsed.astimezone(timezone.utc)
    raise AlertError(f"malformed timestamp {value!r}")


def parse_alert(document: str | bytes | Mapping[str, Any]) -> Alert:
    """Normalize one alert document (JSON text or an already-parsed object)."""
    raw: Any = document
    if isinstance(document, (str, bytes)):
        try:
            fields = json.loads(document)
        except json.JSONDecodeError as exc:
            raise AlertError(f"alert document is not valid JSON: {exc}") from exc
    else:
        fields = document
    if not isinstance(fields, Mapping):
        raise AlertError("alert document must be a JSON object")

    target_address = fields.get("target_address")
    if not target_address or not isinstance(target_address, str):
        raise AlertError("missing mandatory field 'target_address'")

    protocol = fields.get("protocol")
    if not protocol or not isinstance(protocol, str):
        raise AlertError("missing mandatory field 'protocol'")
    protocol = protocol.strip().lower()
    if not PROTOCOL_RE.match(protocol):
        raise AlertError(f"malformed protocol {fields.get('protocol')!r}")

    port = fields.get("target_port")
    if port is not None:
        try:
            port = int(port)
        except (TypeError, ValueError):
            raise AlertError(f"malformed target_port {fields.get('target_port')!r}") from None
        if not 0 <= port <= 65535:
            raise AlertError(f"target_port {port} outside 0-65535")

    refs = fields.get("cve_refs") or []
    if not isinstance(refs, list):
        raise AlertError("'cve_refs' must be a list")
    cve_refs = []
    for ref in refs:
        if not isinstance(ref, str) or not CVE_REF_RE.match(ref.strip()):
            raise AlertError(f"malformed CVE reference {ref!r}")
        cve_refs.append(ref.strip().upper())

    return Alert(
        id=str(fields.get("id") or uuid.uuid4().hex),
        timestamp=_parse_timestamp(fields.get("timestamp")),
        source_address=fields.get("source_address"),
        target_address=target_address,
        target_port=port,
        protocol=protocol,
        cve_refs=tuple(cve_refs),
        classification=str(fields.get("classification", "")),
        raw=raw,
    )


def load_host_bindings(entries: Iterable[Mapping[str, Any]]) -> tuple[HostBinding, ...]:
    """Validate the host/address map: a bijection within one deployment."""
    bindings = []
    hosts: set[str] = set()
    addresses: set[str] = set()
    for index, entry in enumerate(entries):
        missing = [k for k in ("host", "address", "product", "os") if not entry.get(k)]
        if missing:
            raise ConfigError(f"host binding {index}: missing field(s) {', '.join(missing)}")
        host, address = entry["host"], entry["address"]
        if host in hosts:
            raise ConfigError(f"host binding {index}: duplicate host {host!r}")
        if address in addresses:
            raise ConfigError(f"host binding {index}: duplicate address {address!r}")
        hosts.add(host)
        addresses.add(address)
        bindings.append(
            HostBinding(host=host, address=address, product=entry["product"], os=entry["os"])
        )
    return tuple(bindings)


def load_host_bindings_file(path: str | Path) -> tuple[HostBinding, ...]:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(document, list):
        raise ConfigError("host bindings file must hold a JSON array")
    return load_host_bindings(document)


# ---------------------------------------------------------------------------
# Correlation
# ---------------------------------------------------------------------------


def _service_fact_matches(kb: KnowledgeBase, host: str, protocol: str, port: int | None) -> bool:
    if port is None:
        return False
    for fact in kb.facts:
        if fact.predicate != NETWORK_SERVICE_PREDICATE or fact.arity != 5:
            continue
        f_host, _service, f_protocol, f_port, _user = (t.name for t in fact.args)
        if f_host == host and f_protocol == protocol and f_port == str(port):
            return True
    return False


def match_alert(
    alert: Alert,
    graph: AttackGraph,
    kb: KnowledgeBase,
    bindings: Sequence[HostBinding],
) -> list[ExploitationHypothesis]:
    """Correlate one alert with the graph's vulnerability leaves.

    A leaf matches when (i) the alert's target address is bound to the
    leaf's host, (ii) the fact base holds a network-service fact agreeing
    with the alert's protocol and port on that host, and (iii) the alert
    either carries no CVE references (endpoint-only confidence) or lists
    the leaf's CVE (confirmed). Results are ordered by leaf node id.
    """
    binding = next((b for b in bindings if b.address == alert.target_address), None)
    if binding is None:
        return []

    hypotheses: list[ExploitationHypothesis] = []
    for leaf in graph.leaves_of_predicate(VULNERABILITY_PREDICATE):
        assert leaf.atom is not None
        if leaf.atom.arity < 2:
            continue
        host = leaf.atom.args[0].name
        cve_id = leaf.atom.args[1].name
        if host != binding.host:
            continue
        if not _service_fact_matches(kb, host, alert.protocol, alert.target_port):
            continue
        if alert.cve_refs:
            if cve_id.upper() not in alert.cve_refs:
                continue
            confidence = Confidence.CVE_CONFIRMED
        else:
            confidence = Confidence.ENDPOINT_ONLY
        rule_children = [
            c for c in graph.children(leaf.id) if graph.node(c).kind is NodeKind.RULE
        ]
        hypotheses.append(
            ExploitationHypothesis(
                id=f"{alert.id}:{leaf.id}",
                alert_id=alert.id,
                node_ids=(leaf.id, *sorted(rule_children)),
                cve_id=cve_id,
                host=host,
                host_product=binding.product,
                confidence=confidence,
            )
        )
    return hypotheses
