import { describe, expect, it } from "vitest";

import { draftToAlert, overlayFromResponse, submitWhatIf, validateDraft } from "../src/whatif";
import { apiWith, whatifResponse } from "./helpers";
import type { WhatIfDraft } from "../src/whatif";

const GOOD: WhatIfDraft = {
  target_address: "10.0.0.5",
  target_port: "3389",
  protocol: "tcp",
  cve_ref: "CVE-2019-0708",
};

describe("what-if drafts", () => {
  it("accepts a complete draft", () => {
    expect(validateDraft(GOOD)).toEqual({ ok: true, errors: {} });
  });

  it("rejects bad fields inline", () => {
    expect(validateDraft({ ...GOOD, target_address: " " }).errors.target_address).toBeTruthy();
    expect(validateDraft({ ...GOOD, target_address: " " }).ok).toBe(false);
    expect(validateDraft({ ...GOOD, target_port: "70000" }).errors.target_port).toBeTruthy();
    expect(validateDraft({ ...GOOD, protocol: "t cp" }).errors.protocol).toBeTruthy();
    expect(validateDraft({ ...GOOD, cve_ref: "BLUEKEEP" }).errors.cve_ref).toBeTruthy();
  });

  it("an empty CVE field means an endpoint-only alert", () => {
    const alert = draftToAlert({ ...GOOD, cve_ref: "" });
    expect(alert.cve_refs).toEqual([]);
    expect(draftToAlert(GOOD).cve_refs).toEqual(["CVE-2019-0708"]);
  });

  it("builds the overlay from the hypothetical delta", () => {
    const overlay = overlayFromResponse(whatifResponse());
    expect(overlay.notice).toBeNull();
    expect(overlay.nodes.map((n) => n.id)).toEqual([21, 22, 23, 24]);
    expect(overlay.arcs.length).toBe(6);
    expect(overlay.classification).toBe("shorter");
  });

  it("reports no match for an alert nothing correlates with", () => {
    const empty = { ...whatifResponse(), results: [] };
    const overlay = overlayFromResponse(empty);
    expect(overlay.notice).toBe("no match");
    expect(overlay.nodes).toEqual([]);
  });

  it("submits through /whatif only", async () => {
    const { api, calls } = apiWith({ "/whatif": whatifResponse() });
    const overlay = await submitWhatIf(api, GOOD);
    expect(overlay.nodes.length).toBe(4);
    expect(calls).toEqual(["/whatif"]);
  });

  it("refuses to submit an invalid draft", async () => {
    const { api, calls } = apiWith({ "/whatif": whatifResponse() });
    await expect(submitWhatIf(api, { ...GOOD, target_port: "-1" })).rejects.toThrow("0-65535");
    expect(calls).toEqual([]);
  });
});
