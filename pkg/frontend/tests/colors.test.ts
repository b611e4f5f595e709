import { describe, expect, it } from "vitest";

import { colorFor } from "../src/colors";
import { graphV1, graphV2 } from "./helpers";

describe("color mapping", () => {
  it("reproduces the engine's colors on the fixture exports", () => {
    for (const exported of [graphV1(), graphV2()]) {
      for (const node of exported.graph.nodes) {
        expect(colorFor(node.kind, node.label), `node ${node.id} (${node.label})`).toBe(node.color);
      }
    }
  });

  it("marks vulnerability leaves red and other leaves orange", () => {
    expect(colorFor("LEAF", "vulExists(startingDevice, 'CVE-2019-0708', rdpService, remoteExploit)")).toBe("red");
    expect(colorFor("LEAF", "hacl(internet, startingDevice, tcp, 3389)")).toBe("orange");
    expect(colorFor("RULE", "remote_exploit{...}")).toBe("yellow");
    expect(colorFor("FACT", "execCode(startingDevice, olivia)")).toBe("green");
  });

  it("covers exactly the four display colors on the fixture", () => {
    const seen = new Set(graphV2().graph.nodes.map((n) => n.color));
    expect([...seen].sort()).toEqual(["green", "orange", "red", "yellow"]);
  });
});
