/** Browser entry point: minimal DOM wiring over the play loop. */

import { GameClient } from "./api.js";
import { PlayLoop } from "./play.js";
import { asciiTimeline, scoreboardHtml, timelineHtml } from "./render.js";
import { replayFromRecord } from "./state.js";
import { RevealRecordSchema } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function mount(): void {
  const client = new GameClient(
    (document.querySelector("meta[name=api-base]") as HTMLMetaElement)?.content ??
      "",
  );
  let loop: PlayLoop | null = null;

  const render = (state: ReturnType<PlayLoop["current"]>) => {
    el("timeline").innerHTML = timelineHtml(state);
    el("ascii").textContent = asciiTimeline(state);
    const canDecide =
      state.status === "OPEN" && state.timeline.decidableIndex !== null;
    (el("accept") as HTMLButtonElement).disabled = !canDecide;
    (el("pass") as HTMLButtonElement).disabled = !canDecide;
    (el("advance") as HTMLButtonElement).disabled =
      state.status !== "OPEN" || canDecide;
  };

  el("new-game").addEventListener("click", async () => {
    const m = Number((el("m-input") as HTMLInputElement).value) || 30;
    const secret = (el("secret-input") as HTMLInputElement).checked;
    const q = Number((el("objective-input") as HTMLInputElement).value) || 20;
    const id = await client.createSession({
      m,
      objective: { kind: "TOP_PERCENT", param: q },
      objective_secret: secret,
    });
    loop?.stop();
    loop = new PlayLoop(client, id, {
      onState: render,
      onReveal: (record, stats) => {
        el("reveal").textContent = JSON.stringify(record.outcome, null, 2);
        el("scoreboard").innerHTML = scoreboardHtml(stats);
      },
      onError: (err) => {
        el("reveal").textContent = String(err);
      },
    });
    loop.start();
    await loop.advance();
  });

  el("advance").addEventListener("click", () => void loop?.advance());
  el("accept").addEventListener("click", () => void loop?.decide("ACCEPT"));
  el("pass").addEventListener("click", () => void loop?.decide("PASS"));

  el("replay-file").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    const record = RevealRecordSchema.parse(JSON.parse(await file.text()));
    const state = replayFromRecord(record);
    el("timeline").innerHTML = timelineHtml(state);
    el("ascii").textContent = asciiTimeline(state);
    el("reveal").textContent = JSON.stringify(record.outcome, null, 2);
  });

  void client
    .stats()
    .then((stats) => {
      el("scoreboard").innerHTML = scoreboardHtml(stats);
    })
    .catch(() => undefined);
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", mount);
}
