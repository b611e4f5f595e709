// Thin client for the service's endpoint surface. The console talks to
// nothing else.

import type { AlertResponse, GraphExport, HistoryResponse } from "./types";

export type FetchFn = typeof fetch;

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ServiceError> {
  try {
    const body = (await response.json()) as { error?: { code?: string; message?: string } };
    return new ServiceError(
      response.status,
      body.error?.code ?? "unknown",
      body.error?.message ?? response.statusText,
    );
  } catch {
    return new ServiceError(response.status, "unknown", response.statusText);
  }
}

export class ApiClient {
  constructor(
    readonly baseUrl = "",
    private readonly fetchFn: FetchFn = (...args) => fetch(...args),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  graph(): Promise<GraphExport> {
    return this.getJson<GraphExport>("/graph");
  }

  history(): Promise<HistoryResponse> {
    return this.getJson<HistoryResponse>("/graph/history");
  }

  whatif(alert: unknown): Promise<AlertResponse> {
    return this.postJson<AlertResponse>("/whatif", alert);
  }

  submitAlert(alert: unknown): Promise<AlertResponse> {
    return this.postJson<AlertResponse>("/alerts", alert);
  }

  eventsUrl(): string {
    return `${this.baseUrl}/events`;
  }
}
