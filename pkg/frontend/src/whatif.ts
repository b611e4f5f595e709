// What-if drafts: an editable alert evaluated against the service's
// scratch copy. The hypothetical delta becomes a view overlay; committed
// state is untouched because only the /whatif endpoint is ever used.

import type { ApiClient } from "./api";
import type { AlertResponse } from "./types";
import type { Overlay } from "./view";

export interface WhatIfDraft {
  target_address: string;
  target_port: string;
  protocol: string;
  cve_ref: string;
}

export interface DraftValidation {
  ok: boolean;
  errors: Partial<Record<keyof WhatIfDraft, string>>;
}

const CVE_RE = /^CVE-\d{4}-\d{4,}$/i;
const PROTOCOL_RE = /^[a-z0-9]+$/i;

export function validateDraft(draft: WhatIfDraft): DraftValidation {
  const errors: DraftValidation["errors"] = {};
  if (!draft.target_address.trim()) {
    errors.target_address = "target address is required";
  }
  if (!PROTOCOL_RE.test(draft.protocol.trim())) {
    errors.protocol = "protocol must be a bare token like tcp";
  }
  const port = Number(draft.target_port);
  if (!Number.isInteger(port) || port < 0 || port > 65535) {
    errors.target_port = "port must be an integer in 0-65535";
  }
  if (draft.cve_ref.trim() && !CVE_RE.test(draft.cve_ref.trim())) {
    errors.cve_ref = "not a CVE id (CVE-YYYY-NNNN)";
  }
  return { ok: Object.keys(errors).length === 0, errors };
}

export function draftToAlert(draft: WhatIfDraft): Record<string, unknown> {
  return {
    target_address: draft.target_address.trim(),
    target_port: Number(draft.target_port),
    protocol: draft.protocol.trim().toLowerCase(),
    cve_refs: draft.cve_ref.trim() ? [draft.cve_ref.trim().toUpperCase()] : [],
    classification: "operator what-if",
  };
}

/** Collapse the hypothetical results into one overlay for the renderer. */
export function overlayFromResponse(response: AlertResponse): Overlay {
  const applied = response.results.filter((r) => r.status === "applied" && r.delta);
  if (!applied.length) {
    return { nodes: [], arcs: [], classification: null, notice: "no match" };
  }
  return {
    nodes: applied.flatMap((r) => r.delta!.added_nodes),
    arcs: applied.flatMap((r) => r.delta!.added_arcs),
    classification: applied[applied.length - 1]!.delta!.classification,
    notice: null,
  };
}

export async function submitWhatIf(api: ApiClient, draft: WhatIfDraft): Promise<Overlay> {
  const validation = validateDraft(draft);
  if (!validation.ok) {
    throw new Error(Object.values(validation.errors).join("; "));
  }
  return overlayFromResponse(await api.whatif(draftToAlert(draft)));
}
