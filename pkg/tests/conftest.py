from __future__ import annotations

import json
from pathlib import Path

import pytest

from attackgraph.config import DeploymentConfig, load_config
from attackgraph.engine import Engine
from attackgraph.fixtures import fixture_dir, fixture_path


def write_config(tmp_path: Path, **overrides) -> Path:
    """A config file in tmp pointing at the shipped fixture inputs."""
    document = {
        "rules": str(fixture_path("massbuses.rules")),
        "facts": str(fixture_path("massbuses.facts")),
        "ontology": str(fixture_path("ontology.json")),
        "host_bindings": str(fixture_path("host_bindings.json")),
        "impact_rules": str(fixture_path("impact_rules.json")),
        "goal": "panicAndViolenceOnMassBuses(cityBuses)",
        "audit_log": str(tmp_path / "audit.jsonl"),
    }
    document.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(document, indent=2), encoding="utf-8")
    return path


def fixture_alert() -> dict:
    line = fixture_path("alerts.jsonl").read_text(encoding="utf-8").strip()
    return json.loads(line)


@pytest.fixture
def fixture_config(tmp_path) -> DeploymentConfig:
    return load_config(write_config(tmp_path))


@pytest.fixture
def engine(fixture_config) -> Engine:
    engine = Engine(fixture_config)
    engine.generate()
    return engine


@pytest.fixture
def alert_doc() -> dict:
    return fixture_alert()
