"""Vulnerability ontology store: per-CVE characterizations used for enrichment.

Records follow the standard vulnerability-description vocabulary: attack
theater (where the attacker must be), impact methods (how the flaw is
exploited), and logical impacts (what a successful exploit does), plus the
affected product list as CPE-style strings. Attack theater, impact methods
and logical impacts are mandatory; loading fails closed on any invalid
record.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Mapping

from .errors import MalformedProductError, OntologyError

ONTOLOGY_FORMAT_VERSION = 1

CVE_ID_RE = re.compile(r"CVE-\d{4}-\d{4,}\Z")

ATTACK_THEATERS = ("Remote", "Limited Remote", "Local", "Physical")


class ImpactKind(str, Enum):
    SERVICE_INTERRUPT = "Service Interrupt"
    WRITE_DIRECT = "Write(Direct)"
    WRITE_INDIRECT = "Write(Indirect)"
    READ_DIRECT = "Read(Direct)"
    READ_INDIRECT = "Read(Indirect)"
    RESOURCE_REMOVAL = "Resource Removal"
    PRIVILEGE_ESCALATION = "Privilege Escalation"
    INDIRECT_DISCLOSURE = "Indirect Disclosure"


@dataclass(frozen=True)
class LogicalImpact:
    """One post-condition of a successful exploit."""

    kind: ImpactKind
    subtype: str | None = None
    location: str | None = None
    scope: str | None = None
    criticality: str | None = None

    @property
    def display(self) -> str:
        """Short form, e.g. ``Service Interrupt/Reboot`` or ``Write(Direct)/Memory``."""
        qualifier = self.subtype or self.location
        if qualifier:
            return f"{self.kind.value}/{qualifier}"
        return self.kind.value


@dataclass(frozen=True)
class AttackTheater:
    kind: str
    subtype: str | None = None


@dataclass(frozen=True)
class ImpactMethod:
    kind: str
    subtype: str | None = None


@dataclass(frozen=True)
class VulnerabilityRecord:
    cve_id: str
    provenance: str
    products: tuple[str, ...]
    attack_theater: AttackTheater
    impact_methods: tuple[ImpactMethod, ...]
    logical_impacts: tuple[LogicalImpact, ...]
    context: tuple[str, ...] = ()
    entity_role: tuple[str, ...] = ()
    barrier: tuple[str, ...] = ()
    # Unknown optional attributes are preserved verbatim, never interpreted.
    extra: tuple[tuple[str, Any], ...] = ()


class OntologyStore:
    """Immutable cve_id -> record map plus load metadata."""

    def __init__(self, records: Mapping[str, VulnerabilityRecord], source_digest: str):
        self._records = dict(records)
        self.source_digest = source_digest
        self.record_count = len(self._records)

    def __len__(self) -> int:
        return self.record_count

    def lookup(self, cve_id: str) -> VulnerabilityRecord | None:
        return self._records.get(cve_id)

    def records(self) -> list[VulnerabilityRecord]:
        return [self._records[k] for k in sorted(self._records)]


def lookup(store: OntologyStore, cve_id: str) -> VulnerabilityRecord | None:
    return store.lookup(cve_id)


def post_conditions(record: VulnerabilityRecord) -> list[LogicalImpact]:
    """The record's logical impacts, verbatim and in declared order."""
    return list(record.logical_impacts)


# ---------------------------------------------------------------------------
# Loading / serialization
# ---------------------------------------------------------------------------

_KNOWN_RECORD_KEYS = {
    "cve_id",
    "provenance",
    "products",
    "attack_theater",
    "impact_methods",
    "logical_impacts",
    "context",
    "entity_role",
    "barrier",
}


def _require(record: Mapping[str, Any], key: str, index: int) -> Any:
    value = record.get(key)
    if value in (None, "", [], {}):
        raise OntologyError(f"record {index}: missing mandatory field '{key}'")
    return value


def _str_list(value: Any, index: int, key: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise OntologyError(f"record {index}: field '{key}' must be a list of strings")
    return tuple(value)


def _parse_impact(value: Mapping[str, Any], index: int, position: int) -> LogicalImpact:
    kind_text = value.get("kind")
    try:
        kind = ImpactKind(kind_text)
    except ValueError:
        raise OntologyError(
            f"record {index}: logical_impacts[{position}] has unknown kind {kind_text!r}"
        ) from None
    return LogicalImpact(
        kind=kind,
        subtype=value.get("subtype"),
        location=value.get("location"),
        scope=value.get("scope"),
        criticality=value.get("criticality"),
    )


def _parse_record(raw: Mapping[str, Any], index: int) -> VulnerabilityRecord:
    if not isinstance(raw, Mapping):
        raise OntologyError(f"record {index}: not an object")
    cve_id = str(_require(raw, "cve_id", index)).upper()
    if not CVE_ID_RE.match(cve_id):
        raise OntologyError(f"record {index}: field 'cve_id' value {cve_id!r} is not a CVE id")

    theater_raw = _require(raw, "attack_theater", index)
    if not isinstance(theater_raw, Mapping) or theater_raw.get("kind") not in ATTACK_THEATERS:
        raise OntologyError(
            f"record {index}: field 'attack_theater' must name one of {', '.join(ATTACK_THEATERS)}"
        )
    theater = AttackTheater(kind=theater_raw["kind"], subtype=theater_raw.get("subtype"))

    methods_raw = _require(raw, "impact_methods", index)
    if not isinstance(methods_raw, list):
        raise OntologyError(f"record {index}: field 'impact_methods' must be a list")
    methods = []
    for m in methods_raw:
        if not isinstance(m, Mapping) or not m.get("kind"):
            raise OntologyError(f"record {index}: field 'impact_methods' entries need a 'kind'")
        methods.append(ImpactMethod(kind=m["kind"], subtype=m.get("subtype")))

    impacts_raw = _require(raw, "logical_impacts", index)
    if not isinstance(impacts_raw, list):
        raise OntologyError(f"record {index}: field 'logical_impacts' must be a list")
    impacts = [_parse_impact(v, index, pos) for pos, v in enumerate(impacts_raw)]

    extra = tuple(sorted((k, v) for k, v in raw.items() if k not in _KNOWN_RECORD_KEYS))
    return VulnerabilityRecord(
        cve_id=cve_id,
        provenance=str(raw.get("provenance", "")),
        products=_str_list(raw.get("products", []), index, "products"),
        attack_theater=theater,
        impact_methods=tuple(methods),
        logical_impacts=tuple(impacts),
        context=_str_list(raw.get("context", []), index, "context"),
        entity_role=_str_list(raw.get("entity_role", []), index, "entity_role"),
        barrier=_str_list(raw.get("barrier", []), index, "barrier"),
        extra=extra,
    )


def load_ontology(document: Mapping[str, Any]) -> OntologyStore:
    """Validate a parsed ontology document and build the store.

    Any invalid record rejects the whole document.
    """
    if not isinstance(document, Mapping) or "records" not in document:
        raise OntologyError("ontology document must carry a top-level 'records' array")
    version = document.get("format_version")
    if version != ONTOLOGY_FORMAT_VERSION:
        raise OntologyError(f"unsupported ontology format_version {version!r}")
    raw_records = document["records"]
    if not isinstance(raw_records, list):
        raise OntologyError("'records' must be an array")

    records: dict[str, VulnerabilityRecord] = {}
    for index, raw in enumerate(raw_records):
        record = _parse_record(raw, index)
        if record.cve_id in records:
            raise OntologyError(f"record {index}: duplicate cve_id {record.cve_id}")
        records[record.cve_id] = record

    digest = hashlib.sha256(
        json.dumps(document, sort_keys=True, default=str).encode("utf-8")
    ).hexdigest()
    return OntologyStore(records, source_digest=digest)


def load_ontology_file(path: str | Path) -> OntologyStore:
    return load_ontology(json.loads(Path(path).read_text(encoding="utf-8")))


def serialize_ontology(store: OntologyStore) -> dict:
    """Document form of a store; load(serialize(s)) reproduces s."""
    def impact_doc(impact: LogicalImpact) -> dict:
        doc: dict[str, Any] = {"kind": impact.kind.value}
        for key in ("subtype", "location", "scope", "criticality"):
            value = getattr(impact, key)
            if value is not None:
                doc[key] = value
        return doc

    def record_doc(record: VulnerabilityRecord) -> dict:
        doc: dict[str, Any] = {
            "cve_id": record.cve_id,
            "provenance": record.provenance,
            "products": list(record.products),
            "attack_theater": {"kind": record.attack_theater.kind},
            "impact_methods": [
                {"kind": m.kind, **({"subtype": m.subtype} if m.subtype else {})}
                for m in record.impact_methods
            ],
            "logical_impacts": [impact_doc(i) for i in record.logical_impacts],
            "context": list(record.context),
            "entity_role": list(record.entity_role),
            "barrier": list(record.barrier),
        }
        if record.attack_theater.subtype:
            doc["attack_theater"]["subtype"] = record.attack_theater.subtype
        doc.update({k: v for k, v in record.extra})
        return doc

    return {
        "format_version": ONTOLOGY_FORMAT_VERSION,
        "records": [record_doc(r) for r in store.records()],
    }


# ---------------------------------------------------------------------------
# Product matching
# ---------------------------------------------------------------------------


def _components(product: str) -> list[str]:
    if not isinstance(product, str) or not product.strip():
        raise MalformedProductError(f"malformed product string {product!r}")
    return product.strip().lower().split(":")


def _component_match(a: str, b: str) -> bool:
    # '*' and '-' are wildcards on either side.
    if a in ("*", "-") or b in ("*", "-"):
        return True
    return a == b


def product_matches(record: VulnerabilityRecord, host_product: str) -> bool:
    """True iff some record product matches ``host_product`` component-wise.

    Comparison is case-insensitive; a missing trailing component matches
    anything, the same as an explicit wildcard.
    """
    host = _components(host_product)
    for candidate in record.products:
        parts = _components(candidate)
        width = max(len(parts), len(host))
        padded_a = parts + ["*"] * (width - len(parts))
        padded_b = host + ["*"] * (width - len(host))
        if all(_component_match(a, b) for a, b in zip(padded_a, padded_b)):
            return True
    return False
