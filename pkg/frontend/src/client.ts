/**
 * Service client: REST calls plus an SSE subscription that survives
 * stream drops by reconnecting with the last seen event id.  Works in
 * browsers and in Node 20+ (both provide fetch with readable streams).
 */

import { RunEvent, RunHandle } from "./types.js";

export class ServiceRejection extends Error {
  constructor(
    message: string,
    public readonly status: number,
  ) {
    super(message);
  }
}

export interface Subscription {
  close(): void;
  done: Promise<void>;
}

export class ServiceClient {
  constructor(private readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.url(path), init);
    const body = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      const message =
        (body as { error?: string }).error ?? `HTTP ${resp.status}`;
      throw new ServiceRejection(message, resp.status);
    }
    return body as T;
  }

  listRuns(): Promise<{ runs: RunHandle[] }> {
    return this.request("/runs");
  }

  getRun(runId: string): Promise<Record<string, unknown>> {
    return this.request(`/runs/${runId}`);
  }

  createRun(config: Record<string, unknown>): Promise<{ run_id: string }> {
    return this.request("/runs", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  interrupt(runId: string): Promise<{ ok: boolean }> {
    return this.request(`/runs/${runId}/interrupt`, { method: "POST" });
  }

  /**
   * Queue a steering message.  The idempotency key makes retries safe:
   * a network failure is retried with the same key, so the service
   * queues the text at most once.  Terminal runs reject with a
   * ServiceRejection carrying the service's explanation.
   */
  async sendSteering(
    runId: string,
    text: string,
    key: string = randomKey(),
    attempts = 3,
  ): Promise<{ key: string }> {
    let lastError: unknown = null;
    for (let attempt = 0; attempt < attempts; attempt++) {
      try {
        await this.request(`/runs/${runId}/message`, {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify({ text, idempotency_key: key }),
        });
        return { key };
      } catch (error) {
        if (error instanceof ServiceRejection) {
          throw error; // the service answered; retrying cannot help
        }
        lastError = error;
        await sleep(150 * 2 ** attempt);
      }
    }
    throw lastError instanceof Error
      ? lastError
      : new Error(String(lastError));
  }

  /**
   * Subscribe to a run's events from `fromSeq` (exclusive).  The full
   * history replays first, then the live tail.  On a dropped stream the
   * subscription reconnects and resumes after the last event it saw;
   * it resolves `done` once the service signals the end of the stream.
   */
  subscribeEvents(
    runId: string,
    onEvent: (event: RunEvent) => void,
    fromSeq = -1,
  ): Subscription {
    let closed = false;
    let lastSeq = fromSeq;
    const controller = { current: new AbortController() };

    const done = (async () => {
      while (!closed) {
        try {
          controller.current = new AbortController();
          const resp = await fetch(
            this.url(`/runs/${runId}/events?after=${lastSeq}`),
            {
              signal: controller.current.signal,
              headers: { "Last-Event-ID": String(lastSeq) },
            },
          );
          if (!resp.ok || !resp.body) {
            throw new ServiceRejection(`HTTP ${resp.status}`, resp.status);
          }
          const ended = await this.consume(resp.body, (event) => {
            lastSeq = event.seq;
            onEvent(event);
          });
          if (ended) {
            return;
          }
        } catch (error) {
          if (closed) {
            return;
          }
          if (error instanceof ServiceRejection && error.status === 404) {
            throw error;
          }
        }
        await sleep(400);
      }
    })();

    return {
      close() {
        closed = true;
        controller.current.abort();
      },
      done,
    };
  }

  /** Parse SSE frames; returns true when the terminal frame arrived. */
  private async consume(
    body: ReadableStream<Uint8Array>,
    onEvent: (event: RunEvent) => void,
  ): Promise<boolean> {
    const reader = body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { value, done } = await reader.read();
      if (done) {
        return false; // connection dropped before the end frame
      }
      buffer += decoder.decode(value, { stream: true });
      let boundary: number;
      while ((boundary = buffer.indexOf("\n\n")) >= 0) {
        const frame = buffer.slice(0, boundary);
        buffer = buffer.slice(boundary + 2);
        let eventType = "";
        let data = "";
        for (const line of frame.split("\n")) {
          if (line.startsWith("event: ")) {
            eventType = line.slice(7);
          } else if (line.startsWith("data: ")) {
            data += line.slice(6);
          }
        }
        if (eventType === "end") {
          return true;
        }
        if (data) {
          onEvent(JSON.parse(data) as RunEvent);
        }
      }
    }
  }
}

function randomKey(): string {
  return Math.random().toString(36).slice(2) + Date.now().toString(36);
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
