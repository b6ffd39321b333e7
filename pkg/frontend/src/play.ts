/**
 * The play loop: one open session driven by its event stream.
 *
 * The stream is the single source of truth; the loop's state is a fold
 * over received events plus the player's pending input. Decisions go
 * out as plain POSTs. On close the loop fetches the reveal and the
 * scoreboard. A dropped stream reconnects with Last-Event-ID replay,
 * so no arrival is ever missed.
 */

import { GameClient } from "./api.js";
import {
  SessionViewState,
  initialState,
  mergeReveal,
  reduce,
} from "./state.js";
import { subscribeEvents } from "./sse.js";
import type { GameEvent, RevealRecord, Stats } from "./types.js";

export interface PlayHooks {
  /** called after every state change */
  onState: (state: SessionViewState) => void;
  /** called when an arrival awaits the player's decision */
  onDecidable?: (state: SessionViewState) => void;
  /** called once with the full reveal after close */
  onReveal?: (record: RevealRecord, stats: Stats) => void;
  onError?: (err: unknown) => void;
}

export class PlayLoop {
  private state: SessionViewState = initialState();
  private sub: ReturnType<typeof subscribeEvents> | null = null;

  constructor(
    private readonly client: GameClient,
    private readonly sessionId: string,
    private readonly hooks: PlayHooks,
  ) {}

  current(): SessionViewState {
    return this.state;
  }

  start(fromEventId = 0): void {
    this.state = { ...this.state, id: this.sessionId };
    this.sub = subscribeEvents(
      this.client.baseUrl,
      this.sessionId,
      (ev) => this.handle(ev),
      { lastEventId: fromEventId, reconnect: true },
    );
    this.sub.done.catch((err) => this.hooks.onError?.(err));
  }

  stop(): void {
    this.sub?.close();
  }

  private handle(ev: GameEvent): void {
    this.state = reduce(this.state, ev);
    this.hooks.onState(this.state);
    if (ev.event === "arrival" && this.state.timeline.decidableIndex !== null) {
      this.hooks.onDecidable?.(this.state);
    }
    if (ev.event === "closed") {
      void this.finish();
    }
  }

  private async finish(): Promise<void> {
    try {
      const record = await this.client.reveal(this.sessionId);
      this.state = mergeReveal(this.state, record);
      this.hooks.onState(this.state);
      const stats = await this.client.stats();
      this.hooks.onReveal?.(record, stats);
    } catch (err) {
      this.hooks.onError?.(err);
    } finally {
      this.stop();
    }
  }

  /** Ask the server for the next arrival. */
  async advance(): Promise<void> {
    await this.client.advance(this.sessionId);
  }

  /** Send the player's decision for the newest arrival. */
  async decide(decision: "ACCEPT" | "PASS"): Promise<void> {
    await this.client.decide(this.sessionId, decision);
  }
}
