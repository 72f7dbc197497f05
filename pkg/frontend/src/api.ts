/** Thin client for the advisor service. At most one evaluation request
 * is in flight: firing a new one aborts the previous, so a stale
 * response can never overwrite a newer entry's result. */

import { ApiError, EvaluateRequest, EvaluateResponse, TableResponse } from "./types.js";

export class EvaluationAborted extends Error {
  constructor() {
    super("evaluation superseded");
  }
}

export class ApiClient {
  private pending: AbortController | null = null;
  private counter = 0;

  constructor(readonly baseUrl: string = "") {}

  nextRequestId(): string {
    this.counter += 1;
    return `ui-${this.counter}`;
  }

  async evaluate(body: EvaluateRequest): Promise<EvaluateResponse> {
    this.pending?.abort();
    const controller = new AbortController();
    this.pending = controller;
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}/api/v1/evaluate`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
        signal: controller.signal,
      });
    } catch (err) {
      if (controller.signal.aborted) throw new EvaluationAborted();
      throw err;
    }
    if (this.pending === controller) this.pending = null;
    if (!response.ok) {
      const payload = (await response.json().catch(() => ({ error: response.statusText }))) as ApiError;
      throw new Error(payload.error ?? `HTTP ${response.status}`);
    }
    return (await response.json()) as EvaluateResponse;
  }

  async table(id: number, decks: number, source: string): Promise<TableResponse> {
    const response = await fetch(
      `${this.baseUrl}/api/v1/tables/${id}?decks=${decks}&source=${source}`,
    );
    if (!response.ok) {
      const payload = (await response.json().catch(() => ({ error: response.statusText }))) as ApiError;
      throw new Error(payload.error ?? `HTTP ${response.status}`);
    }
    return (await response.json()) as TableResponse;
  }

  async health(): Promise<{ status: string; version: string }> {
    const response = await fetch(`${this.baseUrl}/health`);
    if (!response.ok) throw new Error(`HTTP ${response.status}`);
    return (await response.json()) as { status: string; version: string };
  }
}
