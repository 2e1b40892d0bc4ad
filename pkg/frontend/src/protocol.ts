/**
 * Wire protocol schemas, mirroring docs/protocol.md one to one.
 *
 * Everything that leaves the client goes through ClientMessageSchema and
 * everything that arrives goes through ServerMessageSchema, so a malformed
 * message can never reach the renderer or the socket.
 */

import { z } from "zod";

const midiPitch = z.number().int().min(0).max(127);
const keyPitch = z.number().int().min(21).max(108);
const velocity = z.number().int().min(0).max(127);
const tick = z.number().int().min(0);
const count = z.number().int().min(0);

export const MODE_NAMES = [
  "guided_press",
  "rolling_improv",
  "onwait_roll",
  "expert_press",
] as const;

export const PRESS_CLASS_NAMES = [
  "chord_tone_hit",
  "approach_hit",
  "progression_hit",
  "out_of_set",
  "early",
  "late",
] as const;

// ---- client -> server ----

export const ClientMessageSchema = z.discriminatedUnion("type", [
  z.strictObject({ type: z.literal("note_on"), pitch: midiPitch, velocity }),
  z.strictObject({ type: z.literal("note_off"), pitch: midiPitch }),
  z.strictObject({ type: z.literal("set_mode"), mode: z.enum(MODE_NAMES) }),
  z.strictObject({ type: z.literal("toggle_approaches") }),
  z.strictObject({ type: z.literal("set_tempo"), tempo_bpm: z.number().positive() }),
  z.strictObject({ type: z.literal("set_swing"), ratio: z.number().min(1).max(3) }),
  z.strictObject({ type: z.literal("select_lesson"), lesson_id: z.number().int().positive() }),
  z.strictObject({ type: z.literal("start") }),
  z.strictObject({ type: z.literal("stop") }),
  z.strictObject({ type: z.literal("load_content"), content_id: z.string().min(1) }),
]);

export type ClientMessage = z.infer<typeof ClientMessageSchema>;
export type ModeName = (typeof MODE_NAMES)[number];

// ---- server -> client ----

// [pitch, hit_tick, duration_ticks, color]
const fallingNote = z.tuple([keyPitch, tick, z.number().int().positive(), z.number().int().min(0).max(3)]);

const activeChord = z
  .object({ root: z.number().int().min(0).max(11), quality: z.string(), name: z.string() })
  .nullable();

export const FrameSchema = z.object({
  type: z.literal("frame"),
  seq: z.number().int().positive(),
  frame_tick: tick,
  key_colors: z.string().regex(/^[0-3]{88}$/),
  falling: z.array(fallingNote),
  active_chord: activeChord,
});

const pressClassMessage = z.object({
  type: z.literal("press_class"),
  pitch: midiPitch,
  press_class: z.enum(PRESS_CLASS_NAMES),
  timing_error_ms: z.number().nullable(),
});

const relation = z.object({
  kind: z.enum(["repeat", "sequence", "rhythmic_variation", "melodic_variation", "unrelated"]),
  shift_degrees: z.number().int(),
});

// [pitch, onset_tick, duration_ticks] triples
const motifNotes = z.array(z.tuple([midiPitch, tick, z.number().int().positive()]));

const report = z.object({
  lesson_id: z.number().int().positive(),
  counts: z.object({
    chord_tone_hit: count,
    approach_hit: count,
    progression_hit: count,
    out_of_set: count,
    early: count,
    late: count,
  }),
  accuracy_percent: z.number().min(0).max(100),
  mean_abs_timing_error_ms: z.number().min(0),
  empty: z.boolean(),
  motif_results: z.array(relation),
  qa_results: z.array(
    z.object({
      question: motifNotes,
      answer: motifNotes,
      relation,
      rhythm_matched: z.boolean(),
    }),
  ),
});

const modeSettings = z.object({
  mode: z.enum(MODE_NAMES),
  approaches_on: z.boolean(),
  approach_kind: z.enum(["half_step", "scale_above", "both"]),
  gate_on_approaches: z.boolean(),
  hit_window_ms: z.number().positive(),
  lookahead_beats: z.number().positive(),
  required_hits: z.number().int().positive(),
  split_pitch: keyPitch,
});

const exercise = z.object({
  mode: modeSettings,
  key: z.object({ tonic: z.number().int().min(0).max(11), tonality: z.string() }),
  progression: z
    .object({
      name: z.string(),
      steps: z.array(
        z.object({ degree: z.number().int().min(1).max(7), quality: z.string(), beats: z.number().positive() }),
      ),
    })
    .nullable(),
  scale: z.object({ tonic: z.number().int().min(0).max(11), mode: z.string() }).nullable(),
  swing: z.object({ ratio: z.number().min(1).max(3), subdivision: z.string() }),
  content_ref: z.string().nullable(),
  evaluation: z.string(),
});

const lesson = z.object({
  id: z.number().int().positive(),
  title: z.string(),
  objective: z.string(),
  tools: z.array(z.string()),
  exercises: z.array(exercise),
});

const contentEntry = z.object({
  content_id: z.string(),
  title: z.string(),
  filename: z.string(),
  ppq: z.number().int().positive(),
  duration_ticks: tick,
  tags: z.array(z.string()),
});

export const ServerMessageSchema = z.discriminatedUnion("type", [
  FrameSchema,
  pressClassMessage,
  z.object({ type: z.literal("report"), report }),
  z.object({ type: z.literal("lesson_list"), lessons: z.array(lesson) }),
  z.object({ type: z.literal("content_list"), entries: z.array(contentEntry) }),
  z.object({ type: z.literal("metronome_event"), tick, accent: z.boolean() }),
  z.object({
    type: z.literal("accompaniment_event"),
    tick,
    kind: z.enum(["note_on", "note_off"]),
    pitch: midiPitch,
    velocity,
  }),
  z.object({ type: z.literal("error"), message: z.string() }),
]);

export type ServerMessage = z.infer<typeof ServerMessageSchema>;
export type Frame = z.infer<typeof FrameSchema>;
export type PressClassMessage = z.infer<typeof pressClassMessage>;
export type Report = z.infer<typeof report>;
export type Lesson = z.infer<typeof lesson>;
export type Exercise = z.infer<typeof exercise>;
export type ContentEntry = z.infer<typeof contentEntry>;

/** Parse one incoming text frame; null for anything that is not valid. */
export function parseServerText(text: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  const result = ServerMessageSchema.safeParse(raw);
  return result.success ? result.data : null;
}

/** Validate and serialize an outgoing message. Throws on schema violations. */
export function encodeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(ClientMessageSchema.parse(msg));
}
