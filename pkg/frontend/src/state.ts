/**
 * UI state as a pure function of the event log.
 *
 * The timeline mirrors the game display: bullets on the time axis
 * labelled only by relative rank. Values, the hidden count, and the
 * chosen distribution never enter this state before close; the reveal
 * is merged in explicitly once the session has closed.
 */

import type { GameEvent, RevealRecord } from "./types.js";

export interface TimelineBullet {
  index: number; // arrival number, 1-based
  t: number;
  relRank: number;
  decision: "ACCEPT" | "PASS" | null;
  forced: boolean;
  /** filled from the reveal after close */
  value?: number;
}

export interface TimelineView {
  axisMin: number;
  axisMax: number;
  nowCursor: number;
  bullets: TimelineBullet[];
  /** only the newest arrival may carry the accept affordance */
  decidableIndex: number | null;
}

export interface SessionViewState {
  id: string | null;
  m: number | null;
  basket: string[];
  status: "OPEN" | "ACCEPTED" | "EXHAUSTED";
  timeline: TimelineView;
  acceptedIndex: number | null;
  finalRank: number | null;
  forcedClose: boolean;
  lastEventId: number;
}

export function initialState(): SessionViewState {
  return {
    id: null,
    m: null,
    basket: [],
    status: "OPEN",
    timeline: {
      axisMin: 0,
      axisMax: 1,
      nowCursor: 0,
      bullets: [],
      decidableIndex: null,
    },
    acceptedIndex: null,
    finalRank: null,
    forcedClose: false,
    lastEventId: 0,
  };
}

export function reduce(state: SessionViewState, ev: GameEvent): SessionViewState {
  const next: SessionViewState = {
    ...state,
    timeline: { ...state.timeline, bullets: [...state.timeline.bullets] },
    lastEventId: Math.max(state.lastEventId, ev.id),
  };
  switch (ev.event) {
    case "created": {
      next.m = Number(ev.data.M ?? null);
      next.basket = (ev.data.basket as string[]) ?? [];
      break;
    }
    case "arrival": {
      const t = Number(ev.data.t);
      const index = Number(ev.data.index);
      next.timeline.bullets.push({
        index,
        t,
        relRank: Number(ev.data.rel_rank),
        decision: null,
        forced: false,
      });
      next.timeline.nowCursor = t;
      next.timeline.axisMax = Math.max(next.timeline.axisMax, t);
      next.timeline.decidableIndex = index;
      break;
    }
    case "decision": {
      const last = next.timeline.bullets[next.timeline.bullets.length - 1];
      if (last) {
        const decided = ev.data.decision as "ACCEPT" | "PASS";
        const forced = Boolean(ev.data.forced);
        next.timeline.bullets[next.timeline.bullets.length - 1] = {
          ...last,
          decision: decided,
          forced,
        };
        if (decided === "ACCEPT" || forced) next.acceptedIndex = last.index;
      }
      next.timeline.decidableIndex = null;
      break;
    }
    case "closed": {
      next.status = (ev.data.status as "ACCEPTED" | "EXHAUSTED") ?? "ACCEPTED";
      next.finalRank = Number(ev.data.final_rank);
      next.forcedClose = next.status === "EXHAUSTED";
      next.timeline.decidableIndex = null;
      break;
    }
  }
  return next;
}

export function reduceAll(events: GameEvent[], from?: SessionViewState): SessionViewState {
  return events.reduce(reduce, from ?? initialState());
}

/** Merge the post-close reveal (true values and outcome) into the view. */
export function mergeReveal(state: SessionViewState, record: RevealRecord): SessionViewState {
  const bullets = state.timeline.bullets.map((b, i) => ({
    ...b,
    value: record.values[i],
  }));
  return {
    ...state,
    timeline: { ...state.timeline, bullets },
    finalRank: record.outcome.final_rank,
    forcedClose: record.outcome.forced,
  };
}

/** Relative rank of each value among its prefix (earlier ties rank lower). */
export function relativeRanks(values: number[]): number[] {
  return values.map(
    (v, k) => 1 + values.slice(0, k).filter((u) => u <= v).length,
  );
}

/** Rebuild a timeline from a recorded (closed) session for replay mode. */
export function replayFromRecord(record: RevealRecord): SessionViewState {
  const ranks = relativeRanks(record.values);
  const events: GameEvent[] = [
    { id: 1, event: "created", data: { M: record.M, basket: record.basket } },
  ];
  let id = 2;
  record.decisions.forEach((decision, i) => {
    events.push({
      id: id++,
      event: "arrival",
      data: { t: record.times[i], rel_rank: ranks[i], index: i + 1 },
    });
    events.push({
      id: id++,
      event: "decision",
      data: {
        decision,
        forced: record.outcome.forced && i === record.decisions.length - 1,
      },
    });
  });
  events.push({
    id: id++,
    event: "closed",
    data: { status: record.status, final_rank: record.outcome.final_rank },
  });
  return mergeReveal(reduceAll(events), record);
}
