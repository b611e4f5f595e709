// View state for the console: the committed export, highlight sets, the
// optional what-if overlay, and the banner. Everything the renderer draws
// comes from here, and the committed tuple set never changes except
// through applyExport/applyDelta.

import { shortestAttackPath } from "./graphmath";
import {
  SUPPORTED_FORMAT_VERSION,
  type Arc,
  type DeltaDoc,
  type GraphExport,
  type GraphNodeDoc,
  type VersionAnnouncement,
} from "./types";

export interface RenderedTuple {
  id: number;
  kind: string;
  color: string;
  label: string;
}

export interface Overlay {
  nodes: GraphNodeDoc[];
  arcs: Arc[];
  classification: string | null;
  notice: string | null;
}

export interface ViewTransition {
  addedNodeIds: number[];
  addedArcs: Arc[];
  classification: string | null;
}

const BANNERS: Record<string, string> = {
  shorter: "shorter path — remediation more urgent",
  unchanged: "path unchanged",
  longer: "path longer",
  newly_reachable: "goal newly reachable",
};

export function bannerText(classification: string | null): string | null {
  return classification ? BANNERS[classification] ?? classification : null;
}

/** Stable 32-bit FNV-1a hash of the rendered tuple set plus arcs. */
export function tupleDigest(tuples: string[], arcs: Arc[]): string {
  const canonical = JSON.stringify([
    [...tuples].sort(),
    [...arcs].sort((a, b) => a[0] - b[0] || a[1] - b[1]),
  ]);
  let hash = 0x811c9dc5;
  for (let i = 0; i < canonical.length; i++) {
    hash ^= canonical.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash.toString(16).padStart(8, "0");
}

export class ConsoleGraphView {
  export_: GraphExport | null = null;
  newNodeIds = new Set<number>();
  pathNodeIds = new Set<number>();
  selection: number | null = null;
  overlay: Overlay | null = null;
  banner: string | null = null;
  schemaMismatch = false;

  get committedVersion(): number {
    return this.export_?.version ?? 0;
  }

  get committedDigest(): string | null {
    return this.export_?.digest ?? null;
  }

  /** Replace the committed export; returns what changed for animation. */
  applyExport(next: GraphExport, classification: string | null = null): ViewTransition {
    if (next.format_version !== SUPPORTED_FORMAT_VERSION || next.graph.format_version !== SUPPORTED_FORMAT_VERSION) {
      this.schemaMismatch = true;
      return { addedNodeIds: [], addedArcs: [], classification: null };
    }
    this.schemaMismatch = false;
    const previousNodes = new Set(this.export_?.graph.nodes.map((n) => n.id) ?? []);
    const previousArcs = new Set((this.export_?.graph.arcs ?? []).map((a) => `${a[0]}>${a[1]}`));
    const addedNodeIds = next.graph.nodes.map((n) => n.id).filter((id) => !previousNodes.has(id));
    const addedArcs = next.graph.arcs.filter((a) => !previousArcs.has(`${a[0]}>${a[1]}`));

    const firstLoad = this.export_ === null;
    this.export_ = next;
    this.newNodeIds = firstLoad ? new Set() : new Set(addedNodeIds);
    this.pathNodeIds = new Set(shortestAttackPath(next.graph));
    this.banner = bannerText(classification);
    return { addedNodeIds, addedArcs, classification };
  }

  /**
   * Grow the committed export in place from a recorded delta (used when
   * catching up through /graph/history, where only deltas are available).
   */
  applyDelta(announcement: VersionAnnouncement, delta: DeltaDoc): ViewTransition {
    if (!this.export_) throw new Error("no committed export to apply a delta to");
    const graph = this.export_.graph;
    const next: GraphExport = {
      ...this.export_,
      version: announcement.version,
      digest: announcement.digest,
      created: announcement.created,
      provoked_by: announcement.provoked_by,
      graph: {
        ...graph,
        nodes: [...graph.nodes, ...delta.added_nodes].sort((a, b) => a.id - b.id),
        arcs: [...graph.arcs, ...delta.added_arcs],
      },
    };
    return this.applyExport(next, delta.classification);
  }

  setOverlay(overlay: Overlay): void {
    this.overlay = overlay;
  }

  clearOverlay(): void {
    this.overlay = null;
  }

  select(id: number | null): void {
    this.selection = id;
  }

  /** Committed (id, kind, color, label) tuples; overlays never appear. */
  tupleSet(): string[] {
    const nodes = this.export_?.graph.nodes ?? [];
    return nodes.map((n) => `${n.id}|${n.kind}|${n.color}|${n.label}`).sort();
  }

  viewDigest(): string {
    return tupleDigest(this.tupleSet(), this.export_?.graph.arcs ?? []);
  }
}
