// Console fidelity checklist: rendered tuples equal the service export,
// one streamed enrichment shows 4 newly-styled nodes plus the shorter
// banner, and what-if submission leaves the committed view digest alone.

import { beforeEach, describe, expect, it } from "vitest";

import { EventFollower } from "../src/events";
import { GraphRenderer } from "../src/render";
import { ConsoleGraphView } from "../src/view";
import { overlayFromResponse, submitWhatIf } from "../src/whatif";
import {
  FakeEventSource,
  apiWith,
  eventV2,
  graphV1,
  graphV2,
  whatifResponse,
} from "./helpers";

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="graph"></div>';
  container = document.getElementById("graph")!;
  FakeEventSource.reset();
});

describe("console acceptance", () => {
  it("rendered tuple set equals the service export for the fixture", () => {
    const view = new ConsoleGraphView();
    view.applyExport(graphV1());
    const renderer = new GraphRenderer(container);
    renderer.render(view);

    const rendered = renderer
      .renderedTuples()
      .map((t) => `${t.id}|${t.kind}|${t.color}|${t.label}`)
      .sort();
    const exported = graphV1()
      .graph.nodes.map((n) => `${n.id}|${n.kind}|${n.color}|${n.label}`)
      .sort();
    expect(rendered).toEqual(exported);
  });

  it("one streamed enrichment: 4 newly-styled nodes and the shorter banner", async () => {
    const view = new ConsoleGraphView();
    view.applyExport(graphV1());
    const renderer = new GraphRenderer(container);
    renderer.render(view);

    const { api } = apiWith({ "/graph": graphV2() });
    let transitions = 0;
    const follower = new EventFollower(api, view, {
      makeEventSource: (url) => new FakeEventSource(url),
      onTransition: () => {
        transitions += 1;
        renderer.render(view);
      },
    });
    follower.start();
    await FakeEventSource.instances[0]!.emit("graph_version", eventV2());

    expect(transitions).toBe(1);
    expect(renderer.newlyStyledIds().sort((a, b) => a - b)).toEqual([21, 22, 23, 24]);
    expect(view.banner).toBe("shorter path — remediation more urgent");

    const rendered = renderer
      .renderedTuples()
      .map((t) => `${t.id}|${t.kind}|${t.color}|${t.label}`)
      .sort();
    expect(rendered).toEqual(view.tupleSet());
  });

  it("what-if submission leaves the committed view digest unchanged", async () => {
    const view = new ConsoleGraphView();
    view.applyExport(graphV1());
    const renderer = new GraphRenderer(container);
    renderer.render(view);
    const committedDigest = view.viewDigest();

    const { api, calls } = apiWith({ "/whatif": whatifResponse() });
    const overlay = await submitWhatIf(api, {
      target_address: "10.0.0.5",
      target_port: "3389",
      protocol: "tcp",
      cve_ref: "CVE-2019-0708",
    });
    view.setOverlay(overlay);
    renderer.render(view);

    expect(calls).toEqual(["/whatif"]);
    expect(renderer.overlayIds().length).toBe(4);
    expect(view.viewDigest()).toBe(committedDigest);

    view.clearOverlay();
    renderer.render(view);
    expect(renderer.overlayIds()).toEqual([]);
    expect(view.viewDigest()).toBe(committedDigest);
  });

  it("overlay mirrors the committed delta for the same alert", () => {
    const overlay = overlayFromResponse(whatifResponse());
    const v2Nodes = graphV2().graph.nodes.filter((n) => n.id > 20);
    expect(overlay.nodes).toEqual(v2Nodes);
  });
});
