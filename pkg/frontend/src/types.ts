/**
 * Wire types for the session service, with runtime schemas.
 *
 * The pre-close schemas are strict: any extra key is a contract
 * violation, which is how the client proves the server never leaks
 * values, the hidden count, or the chosen distribution before close.
 */

import { z } from "zod";

export const ArrivalSchema = z
  .object({
    t: z.number(),
    rel_rank: z.number().int().min(1),
  })
  .strict();

export const ObjectiveSchema = z
  .object({
    kind: z.enum(["EXACT_RANK", "TOP_PERCENT"]),
    param: z.number(),
  })
  .strict();

export const RedactedSessionSchema = z
  .object({
    id: z.string(),
    M: z.number().int().min(1),
    basket: z.array(z.string()),
    status: z.enum(["OPEN", "ACCEPTED", "EXHAUSTED"]),
    player: z.enum(["human", "machine"]),
    revealed: z.number().int().min(0),
    awaiting_decision: z.boolean(),
    arrivals: z.array(ArrivalSchema),
    decisions: z.array(z.enum(["ACCEPT", "PASS"])),
    objective: ObjectiveSchema.nullable(),
  })
  .strict();

export const RevealOutcomeSchema = z.object({
  final_rank: z.number().int().min(1),
  N: z.number().int().min(1),
  true_F: z.string(),
  forced: z.boolean(),
});

export const RevealRecordSchema = z
  .object({
    id: z.string(),
    M: z.number().int(),
    basket: z.array(z.string()),
    seed: z.number(),
    player: z.string(),
    objective: ObjectiveSchema.nullable(),
    objective_secret: z.boolean(),
    arrivals: z.array(ArrivalSchema),
    decisions: z.array(z.string()),
    outcome: RevealOutcomeSchema,
    values: z.array(z.number()),
    times: z.array(z.number()),
    belief_trace: z.array(z.unknown()),
    status: z.string(),
  })
  .passthrough();

export const StatsSchema = z.object({
  scoreboard: z.record(
    z.object({
      games: z.number().int(),
      mean_rank: z.number().nullable(),
      objective_success_rate: z.number().nullable(),
    }),
  ),
  ledger: z.object({
    hypotheses: z.array(
      z.object({ kind: z.string(), param: z.number(), weight: z.number() }),
    ),
    games: z.number().int(),
  }),
});

export type Arrival = z.infer<typeof ArrivalSchema>;
export type Objective = z.infer<typeof ObjectiveSchema>;
export type RedactedSession = z.infer<typeof RedactedSessionSchema>;
export type RevealRecord = z.infer<typeof RevealRecordSchema>;
export type Stats = z.infer<typeof StatsSchema>;

/** One frame of the server-sent event stream. */
export interface GameEvent {
  id: number;
  event: "created" | "arrival" | "decision" | "closed";
  data: Record<string, unknown>;
}
