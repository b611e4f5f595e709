// Pure graph helpers over the export document: adjacency, the shortest
// attack path (same metric as the engine: arc count from the red leaves,
// falling back to all roots, ties broken toward the smallest id
// sequence), and a layered layout keyed on distance to the goal.

import type { Arc, GraphDoc } from "./types";

export interface Adjacency {
  children: Map<number, number[]>;
  parents: Map<number, number[]>;
}

export function adjacency(doc: GraphDoc): Adjacency {
  const children = new Map<number, number[]>();
  const parents = new Map<number, number[]>();
  for (const node of doc.nodes) {
    children.set(node.id, []);
    parents.set(node.id, []);
  }
  const sorted = [...doc.arcs].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  for (const [parent, child] of sorted) {
    children.get(parent)?.push(child);
    parents.get(child)?.push(parent);
  }
  return { children, parents };
}

/** Distance of every node to the goal along forward arcs (BFS, reversed). */
export function distanceToGoal(doc: GraphDoc, adj: Adjacency = adjacency(doc)): Map<number, number> {
  const dist = new Map<number, number>([[doc.goal, 0]]);
  const queue = [doc.goal];
  while (queue.length) {
    const node = queue.shift()!;
    for (const parent of adj.parents.get(node) ?? []) {
      if (!dist.has(parent)) {
        dist.set(parent, dist.get(node)! + 1);
        queue.push(parent);
      }
    }
  }
  return dist;
}

export function attackSources(doc: GraphDoc, adj: Adjacency = adjacency(doc)): number[] {
  const red = doc.nodes.filter((n) => n.color === "red").map((n) => n.id);
  if (red.length) return red.sort((a, b) => a - b);
  return doc.nodes
    .filter((n) => (adj.parents.get(n.id) ?? []).length === 0)
    .map((n) => n.id)
    .sort((a, b) => a - b);
}

/** Minimal-arc-count path from the attack sources to the goal, or []. */
export function shortestAttackPath(doc: GraphDoc): number[] {
  const adj = adjacency(doc);
  const dist = distanceToGoal(doc, adj);
  const sources = attackSources(doc, adj).filter((id) => dist.has(id));
  if (!sources.length) return [];
  const best = Math.min(...sources.map((id) => dist.get(id)!));
  let current = Math.min(...sources.filter((id) => dist.get(id) === best));
  const path = [current];
  while (current !== doc.goal) {
    const next = (adj.children.get(current) ?? [])
      .filter((child) => dist.get(child) === dist.get(current)! - 1)
      .sort((a, b) => a - b)[0]!;
    path.push(next);
    current = next;
  }
  return path;
}

export interface NodePosition {
  x: number;
  y: number;
}

/**
 * Layered DAG layout: the goal sits on layer 0 (top), everything else on
 * its distance-to-goal layer; nodes with no route to the goal (for
 * example unrouted impact consequences) hang below the deepest layer.
 * Positions are presentation-only and never sent back to the service.
 */
export function layeredLayout(
  doc: GraphDoc,
  width = 1200,
  rowHeight = 96,
): Map<number, NodePosition> {
  const dist = distanceToGoal(doc);
  const reachable = doc.nodes.filter((n) => dist.has(n.id));
  const deepest = reachable.length ? Math.max(...reachable.map((n) => dist.get(n.id)!)) : 0;
  const layers = new Map<number, number[]>();
  for (const node of doc.nodes) {
    const layer = dist.get(node.id) ?? deepest + 1;
    if (!layers.has(layer)) layers.set(layer, []);
    layers.get(layer)!.push(node.id);
  }
  const positions = new Map<number, NodePosition>();
  for (const [layer, ids] of layers) {
    ids.sort((a, b) => a - b);
    const step = width / (ids.length + 1);
    ids.forEach((id, index) => {
      positions.set(id, { x: Math.round(step * (index + 1)), y: 48 + layer * rowHeight });
    });
  }
  return positions;
}
