"""Exception hierarchy shared across the engine."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for every error raised by this package."""


class ParseError(EngineError):
    """Syntax error in rule/fact text, annotated with line and column."""

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.pos = pos
        self.line, self.column = _line_col(text, pos)
        super().__init__(f"line {self.line}, column {self.column}: {message}")


class RangeRestrictionError(EngineError):
    """A head variable does not occur in the rule body."""


class ArityConflictError(EngineError):
    """A predicate was used with two different arities."""


class GroundnessError(EngineError):
    """A variable occurred where only constants are allowed."""


class LimitExceededError(EngineError):
    """The fixpoint grew past the configured derived-fact budget."""


class UnknownNodeError(EngineError):
    """A node id was referenced that is not in the graph."""


class GoalNotDerivableError(EngineError):
    """The requested goal atom is neither a fact nor derivable."""


class OntologyError(EngineError):
    """The ontology document failed validation."""


class MalformedProductError(EngineError):
    """A CPE-style product string could not be interpreted."""


class AlertError(EngineError):
    """An alert document is missing mandatory fields or malformed."""


class ImpactRuleError(EngineError):
    """An impact-rule configuration entry failed validation."""


class LowConfidenceError(EngineError):
    """Enrichment was invoked with a hypothesis below the policy threshold."""


class EnrichmentDriftError(EngineError):
    """An impact rule's target rule node is absent from the graph."""


class ConfigError(EngineError):
    """The deployment configuration is incomplete or inconsistent."""


def _line_col(text: str, pos: int) -> tuple[int, int]:
    head = text[:pos]
    line = head.count("\n") + 1
    column = pos - (head.rfind("\n") + 1) + 1
    return line, column
