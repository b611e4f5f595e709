// Wire formats of the attack-graph service, mirrored field for field.

export type NodeKind = "LEAF" | "RULE" | "FACT";
export type NodeColor = "red" | "orange" | "yellow" | "green";

export interface GraphNodeDoc {
  id: number;
  kind: NodeKind;
  label: string;
  color: NodeColor;
}

export type Arc = [number, number];

export interface GraphDoc {
  format_version: number;
  goal: number;
  nodes: GraphNodeDoc[];
  arcs: Arc[];
}

export interface GraphExport {
  format_version: number;
  version: number;
  digest: string;
  created: string;
  provoked_by: string;
  graph: GraphDoc;
}

export interface VersionSummary {
  added_nodes: number;
  classification: string | null;
}

export interface VersionAnnouncement {
  version: number;
  digest: string;
  created: string;
  provoked_by: string;
  summary: VersionSummary;
}

export interface PathDoc {
  exists: boolean;
  length: number | null;
  path: number[];
}

export interface DeltaDoc {
  trigger: string;
  added_nodes: GraphNodeDoc[];
  added_arcs: Arc[];
  before_path: PathDoc;
  after_path: PathDoc;
  classification: string;
  reason: string | null;
}

export interface HypothesisResult {
  hypothesis_id: string;
  status: string;
  reason?: string;
  delta: DeltaDoc | null;
  version?: number;
  digest?: string;
}

export interface AlertResponse {
  alert_id: string;
  committed: boolean;
  hypotheses: unknown[];
  results: HypothesisResult[];
  version: number | null;
  digest: string;
}

export interface HistoryEntry {
  version: number;
  digest: string;
  created: string;
  provoked_by: string;
  delta: DeltaDoc | null;
}

export interface HistoryResponse {
  format_version: number;
  versions: HistoryEntry[];
}

export const SUPPORTED_FORMAT_VERSION = 1;
