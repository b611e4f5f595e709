// SVG renderer for the AND-OR graph. Shapes follow the engine's DOT
// export (LEAF box, RULE ellipse, FACT diamond); fill colors come
// straight from the export so the view can never disagree with the
// engine. Highlight styling: committed-new nodes pulse, shortest-path
// nodes get a heavy outline, the goal a double ring, what-if overlay
// nodes render dashed and live only until the overlay is cleared.

import { layeredLayout, type NodePosition } from "./graphmath";
import type { Arc, GraphNodeDoc } from "./types";
import type { ConsoleGraphView, RenderedTuple } from "./view";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_W = 120;
const NODE_H = 34;

function shapeFor(node: GraphNodeDoc, x: number, y: number, doc: Document): SVGElement {
  if (node.kind === "RULE") {
    const ellipse = doc.createElementNS(SVG_NS, "ellipse");
    ellipse.setAttribute("cx", String(x));
    ellipse.setAttribute("cy", String(y));
    ellipse.setAttribute("rx", String(NODE_W / 2));
    ellipse.setAttribute("ry", String(NODE_H / 2));
    return ellipse;
  }
  if (node.kind === "FACT") {
    const diamond = doc.createElementNS(SVG_NS, "polygon");
    const points = [
      [x, y - NODE_H / 2 - 6],
      [x + NODE_W / 2, y],
      [x, y + NODE_H / 2 + 6],
      [x - NODE_W / 2, y],
    ];
    diamond.setAttribute("points", points.map(([px, py]) => `${px},${py}`).join(" "));
    return diamond;
  }
  const rect = doc.createElementNS(SVG_NS, "rect");
  rect.setAttribute("x", String(x - NODE_W / 2));
  rect.setAttribute("y", String(y - NODE_H / 2));
  rect.setAttribute("width", String(NODE_W));
  rect.setAttribute("height", String(NODE_H));
  return rect;
}

export class GraphRenderer {
  constructor(
    private readonly container: HTMLElement,
    private readonly onSelect?: (id: number) => void,
  ) {}

  render(view: ConsoleGraphView): void {
    const doc = this.container.ownerDocument;
    this.container.replaceChildren();
    const exported = view.export_;
    if (!exported) return;

    const graph = exported.graph;
    const overlayNodes = view.overlay?.nodes ?? [];
    const overlayArcs = view.overlay?.arcs ?? [];
    const layoutDoc = {
      ...graph,
      nodes: [...graph.nodes, ...overlayNodes],
      arcs: [...graph.arcs, ...overlayArcs] as Arc[],
    };
    const positions = layeredLayout(layoutDoc);
    const height = Math.max(...[...positions.values()].map((p) => p.y)) + 80;

    const svg = doc.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 1200 ${height}`);
    svg.setAttribute("class", "attack-graph");

    const defs = doc.createElementNS(SVG_NS, "defs");
    defs.innerHTML =
      '<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ' +
      'markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
      '<path d="M 0 0 L 10 5 L 0 10 z" fill="#555"></path></marker>';
    svg.appendChild(defs);

    const arcLayer = doc.createElementNS(SVG_NS, "g");
    arcLayer.setAttribute("class", "arcs");
    const drawArc = (arc: Arc, overlay: boolean) => {
      const from = positions.get(arc[0]);
      const to = positions.get(arc[1]);
      if (!from || !to) return;
      const line = doc.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(from.x));
      line.setAttribute("y1", String(from.y + NODE_H / 2));
      line.setAttribute("x2", String(to.x));
      line.setAttribute("y2", String(to.y - NODE_H / 2));
      line.setAttribute("marker-end", "url(#arrow)");
      line.setAttribute("class", overlay ? "arc overlay" : "arc");
      line.setAttribute("data-parent", String(arc[0]));
      line.setAttribute("data-child", String(arc[1]));
      arcLayer.appendChild(line);
    };
    graph.arcs.forEach((arc) => drawArc(arc, false));
    overlayArcs.forEach((arc) => drawArc(arc, true));
    svg.appendChild(arcLayer);

    const nodeLayer = doc.createElementNS(SVG_NS, "g");
    nodeLayer.setAttribute("class", "nodes");
    const drawNode = (node: GraphNodeDoc, overlay: boolean, position: NodePosition) => {
      const group = doc.createElementNS(SVG_NS, "g");
      const classes = ["node"];
      if (overlay) classes.push("overlay");
      if (!overlay && view.newNodeIds.has(node.id)) classes.push("new");
      if (!overlay && view.pathNodeIds.has(node.id)) classes.push("on-path");
      if (!overlay && node.id === graph.goal) classes.push("goal");
      if (view.selection === node.id) classes.push("selected");
      group.setAttribute("class", classes.join(" "));
      group.setAttribute("data-id", String(node.id));
      group.setAttribute("data-kind", node.kind);
      group.setAttribute("data-color", node.color);
      group.setAttribute("data-label", node.label);
      group.setAttribute("data-overlay", overlay ? "true" : "false");

      const shape = shapeFor(node, position.x, position.y, doc);
      shape.setAttribute("fill", node.color);
      shape.setAttribute("class", "shape");
      group.appendChild(shape);

      const text = doc.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String(position.x));
      text.setAttribute("y", String(position.y + 4));
      text.setAttribute("text-anchor", "middle");
      text.textContent = `${node.id}: ${node.label}`;
      group.appendChild(text);

      const title = doc.createElementNS(SVG_NS, "title");
      title.textContent = node.label;
      group.appendChild(title);

      group.addEventListener("click", () => this.onSelect?.(node.id));
      nodeLayer.appendChild(group);
    };
    graph.nodes.forEach((node) => drawNode(node, false, positions.get(node.id)!));
    overlayNodes.forEach((node) => drawNode(node, true, positions.get(node.id)!));
    svg.appendChild(nodeLayer);

    this.container.appendChild(svg);
  }

  /** Committed tuples as actually present in the DOM (overlays excluded). */
  renderedTuples(): RenderedTuple[] {
    return [...this.container.querySelectorAll('g.node[data-overlay="false"]')].map((el) => ({
      id: Number(el.getAttribute("data-id")),
      kind: el.getAttribute("data-kind") ?? "",
      color: el.getAttribute("data-color") ?? "",
      label: el.getAttribute("data-label") ?? "",
    }));
  }

  newlyStyledIds(): number[] {
    return [...this.container.querySelectorAll("g.node.new")].map((el) =>
      Number(el.getAttribute("data-id")),
    );
  }

  overlayIds(): number[] {
    return [...this.container.querySelectorAll("g.node.overlay")].map((el) =>
      Number(el.getAttribute("data-id")),
    );
  }
}
