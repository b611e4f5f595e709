// Live view updates: follow the server-sent version announcements,
// reconnect with backoff on errors, and recover missed versions through
// /graph/history (replaying their recorded deltas in order) so the view
// always converges to the committed digest.

import type { ApiClient } from "./api";
import type { ConsoleGraphView, ViewTransition } from "./view";
import type { VersionAnnouncement } from "./types";

export interface EventSourceLike {
  addEventListener(type: string, listener: (event: MessageEvent) => void): void;
  close(): void;
  onerror: ((event: unknown) => void) | null;
  onopen: ((event: unknown) => void) | null;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export interface FollowerOptions {
  makeEventSource?: EventSourceFactory;
  backoffMs?: number[];
  onTransition?: (transition: ViewTransition, announcement: VersionAnnouncement) => void;
  onStatus?: (status: "connected" | "reconnecting") => void;
  setTimer?: (callback: () => void, ms: number) => unknown;
}

const DEFAULT_BACKOFF_MS = [500, 1000, 2000, 5000, 10000];

export class EventFollower {
  private source: EventSourceLike | null = null;
  private attempts = 0;
  private closed = false;

  constructor(
    private readonly api: ApiClient,
    private readonly view: ConsoleGraphView,
    private readonly options: FollowerOptions = {},
  ) {}

  start(): void {
    this.closed = false;
    this.connect();
  }

  stop(): void {
    this.closed = true;
    this.source?.close();
    this.source = null;
  }

  private connect(): void {
    const make: EventSourceFactory =
      this.options.makeEventSource ?? ((url) => new EventSource(url) as unknown as EventSourceLike);
    this.source = make(this.api.eventsUrl());
    this.source.onopen = () => {
      this.attempts = 0;
      this.options.onStatus?.("connected");
    };
    this.source.addEventListener("graph_version", (event) => {
      const announcement = JSON.parse(event.data) as VersionAnnouncement;
      void this.handleAnnouncement(announcement);
    });
    this.source.onerror = () => {
      if (this.closed) return;
      this.source?.close();
      this.source = null;
      this.options.onStatus?.("reconnecting");
      const backoff = this.options.backoffMs ?? DEFAULT_BACKOFF_MS;
      const delay = backoff[Math.min(this.attempts, backoff.length - 1)]!;
      this.attempts += 1;
      const timer = this.options.setTimer ?? ((cb: () => void, ms: number) => setTimeout(cb, ms));
      timer(() => {
        if (!this.closed) this.connect();
      }, delay);
    };
  }

  async handleAnnouncement(announcement: VersionAnnouncement): Promise<void> {
    const current = this.view.committedVersion;
    if (announcement.version <= current) return;
    if (announcement.version === current + 1 || current === 0) {
      // In-order announcement (or first contact): the latest export is it.
      const exported = await this.api.graph();
      const transition = this.view.applyExport(exported, announcement.summary.classification);
      this.options.onTransition?.(transition, announcement);
      return;
    }
    await this.recover();
  }

  /** Replay every missed version from the history, oldest first. */
  async recover(): Promise<void> {
    const history = await this.api.history();
    for (const entry of history.versions) {
      if (entry.version <= this.view.committedVersion) continue;
      if (entry.delta === null) continue;
      const announcement: VersionAnnouncement = {
        version: entry.version,
        digest: entry.digest,
        created: entry.created,
        provoked_by: entry.provoked_by,
        summary: {
          added_nodes: entry.delta.added_nodes.length,
          classification: entry.delta.classification,
        },
      };
      const transition = this.view.applyDelta(announcement, entry.delta);
      this.options.onTransition?.(transition, announcement);
    }
  }
}
