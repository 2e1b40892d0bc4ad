/**
 * Message factories for every user control. Each one round-trips the
 * payload through the schema, so a control can only ever emit a valid
 * ClientMessage.
 */

import { ClientMessage, ClientMessageSchema, ModeName } from "./protocol.js";

function checked(msg: ClientMessage): ClientMessage {
  return ClientMessageSchema.parse(msg);
}

export const DEFAULT_VELOCITY = 80;

export function noteOnMessage(pitch: number, velocity: number = DEFAULT_VELOCITY): ClientMessage {
  return checked({ type: "note_on", pitch, velocity });
}

export function noteOffMessage(pitch: number): ClientMessage {
  return checked({ type: "note_off", pitch });
}

export function setModeMessage(mode: ModeName): ClientMessage {
  return checked({ type: "set_mode", mode });
}

export function toggleApproachesMessage(): ClientMessage {
  return checked({ type: "toggle_approaches" });
}

export function setTempoMessage(tempoBpm: number): ClientMessage {
  return checked({ type: "set_tempo", tempo_bpm: tempoBpm });
}

export function setSwingMessage(ratio: number): ClientMessage {
  return checked({ type: "set_swing", ratio });
}

export function selectLessonMessage(lessonId: number): ClientMessage {
  return checked({ type: "select_lesson", lesson_id: lessonId });
}

export function startMessage(): ClientMessage {
  return checked({ type: "start" });
}

export function stopMessage(): ClientMessage {
  return checked({ type: "stop" });
}

export function loadContentMessage(contentId: string): ClientMessage {
  return checked({ type: "load_content", content_id: contentId });
}
