"""Logical attack-graph engine with ontology-driven runtime enrichment."""

from .alerts import (
    Alert,
    Confidence,
    ExploitationHypothesis,
    HostBinding,
    match_alert,
    parse_alert,
)
from .audit import AuditLog, record_hypothesis
from .config import DeploymentConfig, load_config
from .engine import Engine, GraphVersion
from .enrich import (
    EnrichmentPolicy,
    GraphDelta,
    ImpactRule,
    PathChange,
    apply_impact_rules,
    enrich,
    path_comparison,
)
from .graph import (
    AttackGraph,
    AttackNode,
    NodeColor,
    NodeKind,
    PathReport,
    build_graph,
    indegree,
    is_acyclic,
    outdegree,
    roots,
    shortest_path,
    sinks,
    structure_digest,
    to_document,
    to_dot,
)
from .logic import (
    Atom,
    Derivation,
    HornRule,
    KnowledgeBase,
    Term,
    forward_chain,
    parse_fact,
    parse_rule,
    unify,
)
from .ontology import (
    LogicalImpact,
    OntologyStore,
    VulnerabilityRecord,
    load_ontology,
    lookup,
    post_conditions,
    product_matches,
)

__version__ = "0.1.0"
