"""Append-only audit log of alerts, hypotheses, and graph deltas.

One JSON object per line, sequence-numbered with monotone timestamps.
Replaying the alert events through the same configuration reproduces the
same graph versions, which is the operational recovery story: the log, not
the in-memory state, is the source of truth for what happened.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator

from .alerts import ExploitationHypothesis


@dataclass(frozen=True)
class AuditEvent:
    seq: int
    timestamp: str
    event: str
    payload: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"seq": self.seq, "ts": self.timestamp, "event": self.event, **self.payload}


class AuditLog:
    """In-memory event list, optionally mirrored to a JSONL file."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self.events: list[AuditEvent] = []
        self._last_ts = ""

    def append(self, event: str, payload: dict[str, Any]) -> AuditEvent:
        ts = datetime.now(tz=timezone.utc).isoformat()
        if ts < self._last_ts:
            ts = self._last_ts
        self._last_ts = ts
        record = AuditEvent(seq=len(self.events) + 1, timestamp=ts, event=event, payload=payload)
        self.events.append(record)
        if self.path is not None:
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
        return record

    def __len__(self) -> int:
        return len(self.events)


def record_hypothesis(log: AuditLog, hypothesis: ExploitationHypothesis) -> AuditEvent:
    return log.append("hypothesis", hypothesis.to_dict())


def read_audit_events(path: str | Path) -> Iterator[dict[str, Any]]:
    """Yield the event objects of a JSONL audit log, in file order."""
    with Path(path).open(encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                yield json.loads(line)
