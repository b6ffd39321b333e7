/**
 * Typed client for the session service.
 *
 * Every pre-close response is validated against the strict redacted
 * schema, so a server leaking hidden fields fails loudly at the parse
 * boundary instead of reaching the UI.
 */

import {
  Objective,
  RedactedSession,
  RedactedSessionSchema,
  RevealRecord,
  RevealRecordSchema,
  Stats,
  StatsSchema,
} from "./types.js";

export interface CreateSessionBody {
  m?: number;
  mode?: "human" | "machine";
  objective?: Objective;
  objective_secret?: boolean;
  seed?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export class GameClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    const body = await res.json().catch(() => ({}));
    if (!res.ok) {
      const detail =
        typeof body === "object" && body !== null && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : res.statusText;
      throw new ApiError(res.status, detail);
    }
    return body;
  }

  async createSession(body: CreateSessionBody): Promise<string> {
    const out = (await this.request("/sessions", {
      method: "POST",
      body: JSON.stringify(body),
    })) as { id: string };
    return out.id;
  }

  async getSession(id: string): Promise<RedactedSession> {
    return RedactedSessionSchema.parse(await this.request(`/sessions/${id}`));
  }

  async advance(id: string): Promise<RedactedSession> {
    return RedactedSessionSchema.parse(
      await this.request(`/sessions/${id}/advance`, { method: "POST" }),
    );
  }

  async decide(id: string, decision: "ACCEPT" | "PASS"): Promise<RedactedSession> {
    return RedactedSessionSchema.parse(
      await this.request(`/sessions/${id}/decision`, {
        method: "POST",
        body: JSON.stringify({ decision }),
      }),
    );
  }

  async reveal(id: string): Promise<RevealRecord> {
    return RevealRecordSchema.parse(await this.request(`/sessions/${id}/reveal`));
  }

  async stats(): Promise<Stats> {
    return StatsSchema.parse(await this.request(`/stats`));
  }
}
