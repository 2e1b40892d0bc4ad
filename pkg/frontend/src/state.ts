/**
 * ViewState and its reducers.
 *
 * All updates are pure: render code reads the state, never the socket.
 * Frames carry a strictly increasing seq; anything not newer than the
 * last applied frame is stale and dropped, so a reordered late frame
 * can never pull the roll backward.
 */

import {
  ClientMessage,
  ContentEntry,
  Frame,
  Lesson,
  ModeName,
  PressClassMessage,
  Report,
  ServerMessage,
  parseServerText,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface ViewState {
  connection: ConnectionStatus;
  lessons: Lesson[];
  entries: ContentEntry[];
  frame: Frame | null;
  lastSeq: number;
  mode: ModeName;
  tempoBpm: number;
  swingRatio: number;
  approachesOn: boolean;
  lessonId: number | null;
  contentId: string | null;
  lastPress: PressClassMessage | null;
  report: Report | null;
  errorBadge: string | null;
}

export function initialState(): ViewState {
  return {
    connection: "connecting",
    lessons: [],
    entries: [],
    frame: null,
    lastSeq: 0,
    mode: "guided_press",
    tempoBpm: 120,
    swingRatio: 1,
    approachesOn: false,
    lessonId: null,
    contentId: null,
    lastPress: null,
    report: null,
    errorBadge: null,
  };
}

/** Raw socket text in, new state out; bad input only raises the badge. */
export function applyServerText(state: ViewState, text: string): ViewState {
  const msg = parseServerText(text);
  if (msg === null) {
    return { ...state, errorBadge: "unreadable message from server" };
  }
  return applyServerMessage(state, msg);
}

export function applyServerMessage(state: ViewState, msg: ServerMessage): ViewState {
  switch (msg.type) {
    case "frame":
      if (msg.seq <= state.lastSeq) return state; // stale
      return { ...state, frame: msg, lastSeq: msg.seq, errorBadge: null };
    case "press_class":
      return { ...state, lastPress: msg, errorBadge: null };
    case "report":
      return { ...state, report: msg.report, errorBadge: null };
    case "lesson_list":
      return { ...state, lessons: msg.lessons, errorBadge: null };
    case "content_list":
      return { ...state, entries: msg.entries, errorBadge: null };
    case "error":
      return { ...state, errorBadge: msg.message };
    case "metronome_event":
    case "accompaniment_event":
      // sound only; the synth consumes these outside the reducer
      return state;
  }
}

export function setConnection(state: ViewState, connection: ConnectionStatus): ViewState {
  return { ...state, connection };
}

/** Mirror a control the user just sent, so the panel reflects it immediately. */
export function applyLocalControl(state: ViewState, msg: ClientMessage): ViewState {
  switch (msg.type) {
    case "set_mode":
      return { ...state, mode: msg.mode };
    case "toggle_approaches":
      return { ...state, approachesOn: !state.approachesOn };
    case "set_tempo":
      return { ...state, tempoBpm: msg.tempo_bpm };
    case "set_swing":
      return { ...state, swingRatio: msg.ratio };
    case "select_lesson": {
      const lesson = state.lessons.find((l) => l.id === msg.lesson_id);
      const first = lesson?.exercises[0];
      if (!first) return { ...state, lessonId: msg.lesson_id, report: null };
      // the engine activates the lesson's first exercise, so adopt its settings
      return {
        ...state,
        lessonId: msg.lesson_id,
        mode: first.mode.mode,
        approachesOn: first.mode.approaches_on,
        swingRatio: first.swing.ratio,
        report: null,
      };
    }
    case "load_content":
      return { ...state, contentId: msg.content_id };
    default:
      return state;
  }
}
