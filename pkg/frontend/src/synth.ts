/**
 * Built-in synth for the click track, accompaniment events, and local
 * key presses. Nothing fancy: one oscillator voice per note with a
 * short attack/release envelope, clicks as decaying blips.
 *
 * The latency slider shifts scheduling so the audible click can be
 * lined up with the visual roll on a given machine.
 */

export function pitchToFrequency(pitch: number): number {
  return 440 * Math.pow(2, (pitch - 69) / 12);
}

/** Clock time to schedule at; never in the past. */
export function scheduleTime(now: number, latencyMs: number): number {
  return Math.max(now, now + latencyMs / 1000);
}

interface Voice {
  osc: OscillatorNode;
  gain: GainNode;
}

export class Synth {
  latencyMs = 0;
  private ctx: AudioContext | null = null;
  private voices = new Map<number, Voice>();

  private context(): AudioContext {
    if (!this.ctx) this.ctx = new AudioContext();
    if (this.ctx.state === "suspended") void this.ctx.resume();
    return this.ctx;
  }

  click(accent: boolean): void {
    const ctx = this.context();
    const at = scheduleTime(ctx.currentTime, this.latencyMs);
    const osc = ctx.createOscillator();
    const gain = ctx.createGain();
    osc.type = "square";
    osc.frequency.value = accent ? 1760 : 1175;
    gain.gain.setValueAtTime(accent ? 0.28 : 0.18, at);
    gain.gain.exponentialRampToValueAtTime(0.001, at + 0.06);
    osc.connect(gain).connect(ctx.destination);
    osc.start(at);
    osc.stop(at + 0.07);
  }

  noteOn(pitch: number, velocity: number): void {
    const ctx = this.context();
    this.noteOff(pitch); // retrigger
    const at = scheduleTime(ctx.currentTime, this.latencyMs);
    const osc = ctx.createOscillator();
    const gain = ctx.createGain();
    osc.type = "triangle";
    osc.frequency.value = pitchToFrequency(pitch);
    const level = 0.04 + (velocity / 127) * 0.22;
    gain.gain.setValueAtTime(0.0001, at);
    gain.gain.exponentialRampToValueAtTime(level, at + 0.01);
    osc.connect(gain).connect(ctx.destination);
    osc.start(at);
    this.voices.set(pitch, { osc, gain });
  }

  noteOff(pitch: number): void {
    const voice = this.voices.get(pitch);
    if (!voice) return;
    this.voices.delete(pitch);
    const ctx = this.context();
    const at = scheduleTime(ctx.currentTime, this.latencyMs);
    voice.gain.gain.cancelScheduledValues(at);
    voice.gain.gain.setValueAtTime(Math.max(voice.gain.gain.value, 0.0001), at);
    voice.gain.gain.exponentialRampToValueAtTime(0.0001, at + 0.12);
    voice.osc.stop(at + 0.15);
  }

  allOff(): void {
    for (const pitch of [...this.voices.keys()]) this.noteOff(pitch);
  }
}
