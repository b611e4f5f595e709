// The engine's node-color function, reproduced exactly: red marks a
// vulnerability-existence leaf, orange any other configuration leaf,
// yellow a rule, green a derived fact. tests/colors.test.ts proves the
// mapping against the shared fixture exports.

import type { NodeColor, NodeKind } from "./types";

export const VULNERABILITY_PREDICATE = "vulExists";

export function colorFor(kind: NodeKind, label: string): NodeColor {
  if (kind === "RULE") return "yellow";
  if (kind === "FACT") return "green";
  return label.startsWith(`${VULNERABILITY_PREDICATE}(`) ? "red" : "orange";
}
