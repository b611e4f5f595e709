"""Deployment configuration: one JSON file tying all inputs together."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .alerts import Confidence
from .errors import ConfigError
from .logic import DEFAULT_MAX_DERIVED_FACTS


@dataclass
class ResourceLimits:
    max_derived_facts: int = DEFAULT_MAX_DERIVED_FACTS


@dataclass
class DeploymentConfig:
    rules_path: Path
    facts_path: Path
    ontology_path: Path
    host_bindings_path: Path
    impact_rules_path: Path
    goal_text: str
    listen_host: str = "127.0.0.1"
    listen_port: int = 8080
    audit_log_path: Path | None = None
    limits: ResourceLimits = field(default_factory=ResourceLimits)
    min_confidence: Confidence = Confidence.CVE_CONFIRMED
    one_node_per_impact_subtype: bool = True


_REQUIRED_KEYS = ("rules", "facts", "ontology", "host_bindings", "impact_rules", "goal")


def config_from_mapping(document: Mapping[str, Any], base_dir: Path) -> DeploymentConfig:
    missing = [k for k in _REQUIRED_KEYS if not document.get(k)]
    if missing:
        raise ConfigError(f"config missing key(s): {', '.join(missing)}")

    def resolve(key: str) -> Path:
        path = (base_dir / str(document[key])).resolve()
        if not path.is_file():
            raise ConfigError(f"config key '{key}': file not found: {path}")
        return path

    listen = document.get("listen", {})
    limits_doc = document.get("limits", {})
    policy_doc = document.get("policy", {})
    try:
        min_confidence = Confidence(policy_doc.get("min_confidence", "cve_confirmed"))
    except ValueError:
        raise ConfigError(
            f"policy.min_confidence must be one of {[c.value for c in Confidence]}"
        ) from None

    audit = document.get("audit_log")
    return DeploymentConfig(
        rules_path=resolve("rules"),
        facts_path=resolve("facts"),
        ontology_path=resolve("ontology"),
        host_bindings_path=resolve("host_bindings"),
        impact_rules_path=resolve("impact_rules"),
        goal_text=str(document["goal"]),
        listen_host=str(listen.get("host", "127.0.0.1")),
        listen_port=int(listen.get("port", 8080)),
        audit_log_path=(base_dir / audit).resolve() if audit else None,
        limits=ResourceLimits(
            max_derived_facts=int(limits_doc.get("max_derived_facts", DEFAULT_MAX_DERIVED_FACTS))
        ),
        min_confidence=min_confidence,
        one_node_per_impact_subtype=bool(policy_doc.get("one_node_per_impact_subtype", True)),
    )


def load_config(path: str | Path) -> DeploymentConfig:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(document, Mapping):
        raise ConfigError("config file must hold a JSON object")
    return config_from_mapping(document, path.parent.resolve())
