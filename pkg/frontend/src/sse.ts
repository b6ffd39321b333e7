/**
 * Server-sent events over fetch streaming.
 *
 * Works in browsers and Node 20+ (no native EventSource needed). The
 * subscription remembers the last delivered event id and reconnects
 * with a Last-Event-ID header, so a dropped stream replays everything
 * missed and loses nothing.
 */

import type { GameEvent } from "./types.js";

export interface SseFrame {
  id?: string;
  event?: string;
  data: string;
}

/** Incremental parser for a text/event-stream byte feed. */
export class SseParser {
  private buffer = "";

  push(chunk: string): SseFrame[] {
    this.buffer += chunk;
    const frames: SseFrame[] = [];
    let cut: number;
    while ((cut = this.buffer.indexOf("\n\n")) >= 0) {
      const block = this.buffer.slice(0, cut);
      this.buffer = this.buffer.slice(cut + 2);
      const frame: SseFrame = { data: "" };
      const dataLines: string[] = [];
      for (const line of block.split("\n")) {
        if (line.startsWith("id:")) frame.id = line.slice(3).trim();
        else if (line.startsWith("event:")) frame.event = line.slice(6).trim();
        else if (line.startsWith("data:")) dataLines.push(line.slice(5).trim());
      }
      frame.data = dataLines.join("\n");
      if (frame.event !== undefined || frame.data !== "") frames.push(frame);
    }
    return frames;
  }
}

export interface Subscription {
  close: () => void;
  /** Resolves when the stream ends (session closed) or close() is called. */
  done: Promise<void>;
  lastEventId: () => number;
}

export interface SubscribeOptions {
  lastEventId?: number;
  /** Reconnect automatically on stream drop while the session is open. */
  reconnect?: boolean;
  reconnectDelayMs?: number;
  fetchImpl?: typeof fetch;
}

export function subscribeEvents(
  baseUrl: string,
  sessionId: string,
  onEvent: (ev: GameEvent) => void,
  options: SubscribeOptions = {},
): Subscription {
  const fetchImpl = options.fetchImpl ?? fetch;
  let lastId = options.lastEventId ?? 0;
  let closed = false;
  let sawClosedEvent = false;
  let abort = new AbortController();

  const run = async (): Promise<void> => {
    while (!closed && !sawClosedEvent) {
      abort = new AbortController();
      try {
        const res = await fetchImpl(
          `${baseUrl}/sessions/${sessionId}/events`,
          {
            headers: { "Last-Event-ID": String(lastId) },
            signal: abort.signal,
          },
        );
        if (!res.ok || !res.body) throw new Error(`stream failed: ${res.status}`);
        const reader = res.body.getReader();
        const decoder = new TextDecoder();
        const parser = new SseParser();
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          for (const frame of parser.push(decoder.decode(value, { stream: true }))) {
            const id = Number(frame.id ?? 0);
            if (id <= lastId) continue; // replayed duplicate
            lastId = id;
            const ev: GameEvent = {
              id,
              event: (frame.event ?? "message") as GameEvent["event"],
              data: frame.data ? JSON.parse(frame.data) : {},
            };
            if (ev.event === "closed") sawClosedEvent = true;
            onEvent(ev);
          }
        }
        // clean end of stream: the server closed after the final event
        if (sawClosedEvent || !options.reconnect) return;
      } catch (err) {
        if (closed) return;
        if (!options.reconnect) throw err;
      }
      await new Promise((r) => setTimeout(r, options.reconnectDelayMs ?? 250));
    }
  };

  const done = run().catch((err) => {
    if (!closed) throw err;
  });

  return {
    close: () => {
      closed = true;
      abort.abort();
    },
    done: done.then(() => undefined),
    lastEventId: () => lastId,
  };
}
