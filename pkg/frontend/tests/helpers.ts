// Test scaffolding: the shared fixture exports (kept in lockstep with the
// engine by the backend's own test suite) plus fake fetch/EventSource.

import { readFileSync } from "node:fs";
import { join } from "node:path";

import { ApiClient } from "../src/api";
import type { EventSourceLike } from "../src/events";
import type {
  AlertResponse,
  GraphExport,
  HistoryEntry,
  HistoryResponse,
  VersionAnnouncement,
} from "../src/types";

// vitest runs with cwd = frontend/; the shared exports sit one level up.
function loadFixture<T>(name: string): T {
  const path = join(process.cwd(), "..", "fixtures", "exports", name);
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

export const graphV1 = (): GraphExport => loadFixture<GraphExport>("graph_v1.json");
export const graphV2 = (): GraphExport => loadFixture<GraphExport>("graph_v2.json");
export const eventV2 = (): VersionAnnouncement => loadFixture<VersionAnnouncement>("event_v2.json");
export const whatifResponse = (): AlertResponse => loadFixture<AlertResponse>("whatif_response.json");
export const alertResponse = (): AlertResponse => loadFixture<AlertResponse>("alert_response.json");

export function historyV2(): HistoryResponse {
  const v1 = graphV1();
  const announcement = eventV2();
  const delta = alertResponse().results[0]!.delta!;
  const entries: HistoryEntry[] = [
    {
      version: v1.version,
      digest: v1.digest,
      created: v1.created,
      provoked_by: v1.provoked_by,
      delta: null,
    },
    {
      version: announcement.version,
      digest: announcement.digest,
      created: announcement.created,
      provoked_by: announcement.provoked_by,
      delta,
    },
  ];
  return { format_version: 1, versions: entries };
}

/** fetch stub keyed on path; records every request it served. */
export function fakeFetch(routes: Record<string, unknown>): {
  fetchFn: typeof fetch;
  calls: string[];
} {
  const calls: string[] = [];
  const fetchFn = (async (input: RequestInfo | URL) => {
    const path = String(input);
    calls.push(path);
    if (path in routes) {
      return new Response(JSON.stringify(routes[path]), {
        status: 200,
        headers: { "content-type": "application/json" },
      });
    }
    return new Response(JSON.stringify({ error: { code: "not_found", message: path } }), {
      status: 404,
    });
  }) as typeof fetch;
  return { fetchFn, calls };
}

export function apiWith(routes: Record<string, unknown>): { api: ApiClient; calls: string[] } {
  const { fetchFn, calls } = fakeFetch(routes);
  return { api: new ApiClient("", fetchFn), calls };
}

export class FakeEventSource implements EventSourceLike {
  static instances: FakeEventSource[] = [];
  listeners = new Map<string, ((event: MessageEvent) => void)[]>();
  onerror: ((event: unknown) => void) | null = null;
  onopen: ((event: unknown) => void) | null = null;
  closed = false;

  constructor(readonly url: string) {
    FakeEventSource.instances.push(this);
  }

  addEventListener(type: string, listener: (event: MessageEvent) => void): void {
    const existing = this.listeners.get(type) ?? [];
    existing.push(listener);
    this.listeners.set(type, existing);
  }

  close(): void {
    this.closed = true;
  }

  open(): void {
    this.onopen?.({});
  }

  async emit(type: string, data: unknown): Promise<void> {
    for (const listener of this.listeners.get(type) ?? []) {
      listener({ data: JSON.stringify(data) } as MessageEvent);
    }
    // Let the follower's async fetch/apply settle.
    await new Promise((resolve) => setTimeout(resolve, 0));
  }

  fail(): void {
    this.onerror?.({});
  }

  static reset(): void {
    FakeEventSource.instances = [];
  }
}
