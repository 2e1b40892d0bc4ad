/**
 * Browser entry point: builds the DOM once, then runs a single
 * requestAnimationFrame loop that repaints from ViewState. Network
 * and MIDI callbacks only ever swap the state object; nothing else
 * is shared between the event handlers and the renderer.
 */

import {
  DEFAULT_VELOCITY,
  loadContentMessage,
  noteOffMessage,
  noteOnMessage,
  selectLessonMessage,
  setModeMessage,
  setSwingMessage,
  setTempoMessage,
  startMessage,
  stopMessage,
  toggleApproachesMessage,
} from "./controls.js";
import { digitAt, keyboardGeometry, WHITE_KEY_COUNT } from "./keyboard.js";
import { connectMidiInputs } from "./midi.js";
import { ClientMessage, MODE_NAMES, ModeName, encodeClientMessage, parseServerText } from "./protocol.js";
import { layoutRoll } from "./roll.js";
import { EngineSocket } from "./socket.js";
import {
  ViewState,
  applyLocalControl,
  applyServerMessage,
  initialState,
  setConnection,
} from "./state.js";
import { Synth } from "./synth.js";
import { THEME, highlightColor, rollColor } from "./theme.js";

const DEFAULT_PPQ = 480;
const ROLL_HEIGHT = 300;

let state: ViewState = initialState();
const synth = new Synth();
const geometry = keyboardGeometry();

function wsUrl(): string {
  const override = new URLSearchParams(location.search).get("ws");
  if (override) return override;
  return `ws://${location.hostname || "localhost"}:8765/ws`;
}

const socket = new EngineSocket(wsUrl());

function send(msg: ClientMessage): boolean {
  if (!socket.send(encodeClientMessage(msg))) return false;
  state = applyLocalControl(state, msg);
  return true;
}

socket.onStatus((status) => {
  state = setConnection(state, status);
  if (status !== "open") synth.allOff();
});

socket.onText((text) => {
  const msg = parseServerText(text);
  if (msg === null) {
    state = { ...state, errorBadge: "unreadable message from server" };
    return;
  }
  if (msg.type === "metronome_event") synth.click(msg.accent);
  else if (msg.type === "accompaniment_event") {
    if (msg.kind === "note_on") synth.noteOn(msg.pitch, msg.velocity);
    else synth.noteOff(msg.pitch);
  }
  state = applyServerMessage(state, msg);
});

// ---- static DOM ----

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

const root = document.getElementById("app") ?? document.body;

const connectionBadge = el("span", { class: "badge" });
const errorBadge = el("span", { class: "badge error" });
const midiBadge = el("span", { class: "badge", hidden: "" });
const chordLabel = el("span", { class: "chord" });
const feedbackLabel = el("span", { class: "feedback" });

const header = el("header");
header.append(el("h1", {}, "keycoach"), connectionBadge, midiBadge, errorBadge);

const rollCanvas = el("canvas", { id: "roll" });
rollCanvas.height = ROLL_HEIGHT;

const keyboardDiv = el("div", { id: "keyboard" });
const keyDivs = new Map<number, HTMLDivElement>();
for (const key of geometry) {
  const div = el("div", { class: key.black ? "key black" : "key white" });
  div.style.left = `${(key.x / WHITE_KEY_COUNT) * 100}%`;
  div.style.width = `${(key.w / WHITE_KEY_COUNT) * 100}%`;
  div.dataset.pitch = String(key.pitch);
  keyDivs.set(key.pitch, div);
  keyboardDiv.append(div);
}

const lessonSelect = el("select", { id: "lesson" });
const contentSelect = el("select", { id: "content" });
const modeSelect = el("select", { id: "mode" });
for (const mode of MODE_NAMES) modeSelect.append(el("option", { value: mode }, mode));
const approachesButton = el("button", {}, "approaches: off");
const startButton = el("button", {}, "start");
const stopButton = el("button", {}, "stop");
const tempoSlider = el("input", { type: "range", min: "40", max: "240", step: "1", value: "120" });
const tempoLabel = el("span", {}, "120 bpm");
const swingSlider = el("input", { type: "range", min: "1", max: "3", step: "0.05", value: "1" });
const swingLabel = el("span", {}, "swing 1.00");
const latencySlider = el("input", { type: "range", min: "-200", max: "200", step: "5", value: "0" });
const latencyLabel = el("span", {}, "audio offset 0 ms");
const objectiveLabel = el("p", { class: "objective" });
const reportPanel = el("pre", { id: "report", hidden: "" });

function labelled(text: string, ...nodes: (HTMLElement | string)[]): HTMLLabelElement {
  const label = el("label", {}, text);
  label.append(...nodes);
  return label;
}

const controlsBox = el("fieldset", { id: "controls" });
controlsBox.append(
  labelled("lesson ", lessonSelect),
  labelled("content ", contentSelect),
  labelled("mode ", modeSelect),
  approachesButton,
  startButton,
  stopButton,
  labelled("", tempoSlider, tempoLabel),
  labelled("", swingSlider, swingLabel),
  labelled("", latencySlider, latencyLabel),
);

const statusLine = el("div", { class: "status" });
statusLine.append(chordLabel, feedbackLabel);

root.append(header, rollCanvas, keyboardDiv, statusLine, controlsBox, objectiveLabel, reportPanel);

// ---- input handlers ----

let firstGesture = true;
function unlockAudio(): void {
  if (!firstGesture) return;
  firstGesture = false;
  synth.click(false); // wakes the AudioContext inside a user gesture
}
document.addEventListener("pointerdown", unlockAudio, { once: true });

for (const [pitch, div] of keyDivs) {
  div.addEventListener("pointerdown", (ev) => {
    ev.preventDefault();
    if (send(noteOnMessage(pitch, DEFAULT_VELOCITY))) synth.noteOn(pitch, DEFAULT_VELOCITY);
  });
  const release = () => {
    if (send(noteOffMessage(pitch))) synth.noteOff(pitch);
  };
  div.addEventListener("pointerup", release);
  div.addEventListener("pointerleave", release);
}

lessonSelect.addEventListener("change", () => {
  const id = Number(lessonSelect.value);
  if (Number.isInteger(id) && id > 0) send(selectLessonMessage(id));
});
contentSelect.addEventListener("change", () => {
  if (contentSelect.value) send(loadContentMessage(contentSelect.value));
});
modeSelect.addEventListener("change", () => send(setModeMessage(modeSelect.value as ModeName)));
approachesButton.addEventListener("click", () => send(toggleApproachesMessage()));
startButton.addEventListener("click", () => send(startMessage()));
stopButton.addEventListener("click", () => send(stopMessage()));
tempoSlider.addEventListener("change", () => send(setTempoMessage(Number(tempoSlider.value))));
swingSlider.addEventListener("change", () => send(setSwingMessage(Number(swingSlider.value))));
latencySlider.addEventListener("input", () => {
  synth.latencyMs = Number(latencySlider.value);
  latencyLabel.textContent = `audio offset ${latencySlider.value} ms`;
});

void connectMidiInputs((msg) => {
  midiBadge.hidden = false;
  midiBadge.textContent = "midi";
  send(msg);
});

// ---- rendering ----

function lookaheadTicks(current: ViewState): number {
  const lesson = current.lessons.find((l) => l.id === current.lessonId);
  const beats = lesson?.exercises[0]?.mode.lookahead_beats ?? 4;
  return beats * DEFAULT_PPQ;
}

function refreshOptions(select: HTMLSelectElement, options: [string, string][]): void {
  const signature = options.map(([v]) => v).join("|");
  if (select.dataset.sig === signature) return;
  select.dataset.sig = signature;
  select.innerHTML = "";
  select.append(el("option", { value: "" }, "--"));
  for (const [value, text] of options) select.append(el("option", { value }, text));
}

function renderKeyboard(current: ViewState): void {
  const colors = current.frame?.key_colors ?? "";
  for (const [pitch, div] of keyDivs) {
    const digit = colors ? digitAt(colors, pitch) : 0;
    const lit = highlightColor(digit);
    div.style.background = lit ?? (div.classList.contains("black") ? THEME.blackKey : THEME.whiteKey);
  }
}

function renderRoll(current: ViewState): void {
  const ctx = rollCanvas.getContext("2d");
  if (!ctx) return;
  const width = rollCanvas.clientWidth || 800;
  if (rollCanvas.width !== width) rollCanvas.width = width;
  ctx.fillStyle = THEME.panel;
  ctx.fillRect(0, 0, width, ROLL_HEIGHT);
  ctx.fillStyle = THEME.edgeLine;
  ctx.fillRect(0, ROLL_HEIGHT - 1, width, 1);
  if (!current.frame) return;
  const unit = width / WHITE_KEY_COUNT;
  for (const rect of layoutRoll(current.frame, lookaheadTicks(current), ROLL_HEIGHT)) {
    const key = geometry[rect.pitch - 21];
    if (!key) continue;
    ctx.fillStyle = rollColor(rect.color);
    const w = key.w * unit * 0.8;
    const x = (key.x + key.w / 2) * unit - w / 2;
    ctx.fillRect(x, rect.top, w, Math.max(2, rect.bottom - rect.top));
  }
}

let lastRendered: ViewState | null = null;

function render(): void {
  if (state !== lastRendered) {
    lastRendered = state;

    connectionBadge.textContent = state.connection;
    connectionBadge.className = `badge ${state.connection}`;
    errorBadge.textContent = state.errorBadge ?? "";
    errorBadge.hidden = state.errorBadge === null;
    controlsBox.disabled = state.connection !== "open";

    refreshOptions(
      lessonSelect,
      state.lessons.map((l) => [String(l.id), `${String(l.id).padStart(2, "0")} ${l.title}`]),
    );
    refreshOptions(
      contentSelect,
      state.entries.map((e) => [e.content_id, e.title]),
    );
    if (state.lessonId !== null) lessonSelect.value = String(state.lessonId);
    if (state.contentId !== null) contentSelect.value = state.contentId;
    modeSelect.value = state.mode;
    approachesButton.textContent = `approaches: ${state.approachesOn ? "on" : "off"}`;
    tempoLabel.textContent = `${state.tempoBpm} bpm`;
    swingLabel.textContent = `swing ${state.swingRatio.toFixed(2)}`;

    const lesson = state.lessons.find((l) => l.id === state.lessonId);
    objectiveLabel.textContent = lesson ? `${lesson.title}: ${lesson.objective}` : "";

    chordLabel.textContent = state.frame?.active_chord?.name ?? "";
    if (state.lastPress) {
      const timing =
        state.lastPress.timing_error_ms === null
          ? ""
          : ` (${state.lastPress.timing_error_ms > 0 ? "early" : "late"} ${Math.abs(state.lastPress.timing_error_ms).toFixed(0)} ms)`;
      feedbackLabel.textContent = `${state.lastPress.press_class}${timing}`;
    } else {
      feedbackLabel.textContent = "";
    }

    if (state.report) {
      reportPanel.hidden = false;
      reportPanel.textContent = JSON.stringify(state.report, null, 2);
    } else {
      reportPanel.hidden = true;
      reportPanel.textContent = "";
    }

    renderKeyboard(state);
    renderRoll(state);
  }
  requestAnimationFrame(render);
}

requestAnimationFrame(render);
