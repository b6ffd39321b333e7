/**
 * Framework-free rendering: the timeline as text (the classic
 * a[..1..1...3...2..|t....]b display) and as HTML strings the browser
 * entry point mounts.
 */

import type { SessionViewState } from "./state.js";
import type { Stats } from "./types.js";

export function asciiTimeline(state: SessionViewState, width = 60): string {
  const { axisMin, axisMax, nowCursor, bullets } = state.timeline;
  const span = axisMax - axisMin || 1;
  const cells: string[] = Array.from({ length: width }, () => ".");
  const place = (t: number) =>
    Math.min(width - 1, Math.max(0, Math.floor(((t - axisMin) / span) * width)));
  for (const b of bullets) cells[place(b.t)] = String(b.relRank % 10);
  if (state.status === "OPEN") {
    const cursor = place(nowCursor);
    cells[cursor] = cells[cursor] === "." ? "|" : cells[cursor]!;
  }
  return `a[${cells.join("")}]b`;
}

export function timelineHtml(state: SessionViewState): string {
  const { bullets, decidableIndex } = state.timeline;
  const items = bullets
    .map((b) => {
      const cls = [
        "bullet",
        b.index === decidableIndex ? "decidable" : "",
        b.decision === "ACCEPT" || b.forced ? "accepted" : "",
      ]
        .filter(Boolean)
        .join(" ");
      const pos = (
        ((b.t - state.timeline.axisMin) /
          (state.timeline.axisMax - state.timeline.axisMin || 1)) *
        100
      ).toFixed(2);
      const value = b.value !== undefined ? ` data-value="${b.value}"` : "";
      return `<span class="${cls}" style="left:${pos}%" data-index="${b.index}"${value}>${b.relRank}</span>`;
    })
    .join("");
  const banner =
    state.status === "OPEN"
      ? "session open"
      : state.forcedClose
        ? `closed: forced acceptance, final rank ${state.finalRank}`
        : `closed: accepted, final rank ${state.finalRank}`;
  return `<div class="timeline">${items}</div><div class="banner">${banner}</div>`;
}

export function scoreboardHtml(stats: Stats): string {
  const rows = Object.entries(stats.scoreboard)
    .map(([player, s]) => {
      const mean = s.mean_rank === null ? "-" : s.mean_rank.toFixed(3);
      const rate =
        s.objective_success_rate === null
          ? "-"
          : `${(100 * s.objective_success_rate).toFixed(1)}%`;
      return `<tr><td>${player}</td><td>${s.games}</td><td>${mean}</td><td>${rate}</td></tr>`;
    })
    .join("");
  const maxW = Math.max(...stats.ledger.hypotheses.map((h) => h.weight), 1e-9);
  const strip = stats.ledger.hypotheses
    .map((h) => {
      const shade = Math.round(255 * (1 - h.weight / maxW));
      const label =
        h.kind === "TOP_PERCENT" ? `top ${h.param}%` : `rank ${h.param}`;
      return `<span class="cell" title="${label}: ${h.weight.toFixed(3)}" style="background:rgb(255,${shade},${shade})">${label}</span>`;
    })
    .join("");
  return (
    `<table><tr><th>player</th><th>games</th><th>mean rank</th><th>objective</th></tr>${rows}</table>` +
    `<div class="belief-strip">${strip}</div>`
  );
}
