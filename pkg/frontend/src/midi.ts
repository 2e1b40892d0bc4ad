/**
 * Optional hardware input via the Web MIDI API. Note-ons with velocity
 * zero are note-offs in disguise, same as on the wire protocol.
 */

import { ClientMessage } from "./protocol.js";
import { noteOffMessage, noteOnMessage } from "./controls.js";

export function midiBytesToMessage(data: ArrayLike<number>): ClientMessage | null {
  if (data.length < 3) return null;
  const status = (data[0] ?? 0) & 0xf0;
  const pitch = data[1] ?? 0;
  const value = data[2] ?? 0;
  if (pitch > 127) return null;
  if (status === 0x90 && value > 0) return noteOnMessage(pitch, Math.min(value, 127));
  if (status === 0x80 || (status === 0x90 && value === 0)) return noteOffMessage(pitch);
  return null;
}

/**
 * Hook every current and future MIDI input up to the callback.
 * Resolves to false when the browser has no Web MIDI support or the
 * user declines access.
 */
export async function connectMidiInputs(onMessage: (msg: ClientMessage) => void): Promise<boolean> {
  if (!("requestMIDIAccess" in navigator)) return false;
  let access: MIDIAccess;
  try {
    access = await navigator.requestMIDIAccess();
  } catch {
    return false;
  }
  const attach = (input: MIDIInput) => {
    input.onmidimessage = (ev: MIDIMessageEvent) => {
      const msg = ev.data ? midiBytesToMessage(ev.data) : null;
      if (msg) onMessage(msg);
    };
  };
  for (const input of access.inputs.values()) attach(input);
  access.onstatechange = (ev) => {
    const port = (ev as MIDIConnectionEvent).port;
    if (port && port.type === "input" && port.state === "connected") attach(port as MIDIInput);
  };
  return true;
}
