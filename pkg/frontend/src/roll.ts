/**
 * Falling-note layout. Vertical only: the roll shares its horizontal
 * scale with the keyboard below it.
 *
 * A note's bottom edge travels from the top of the lane (hit_tick a
 * full lookahead away) to the keyboard edge (hit_tick == frame_tick),
 * so it touches the keys at exactly the moment it should be played.
 */

import { Frame } from "./protocol.js";

export interface RollRect {
  pitch: number;
  /** key_colors digit, 1 yellow or 2 pink */
  color: number;
  /** px from the lane top */
  top: number;
  /** px from the lane top; equals laneHeight when the note is due now */
  bottom: number;
}

export function layoutRoll(frame: Frame, lookaheadTicks: number, laneHeight: number): RollRect[] {
  if (lookaheadTicks <= 0 || laneHeight <= 0) return [];
  const rects: RollRect[] = [];
  for (const [pitch, hitTick, durationTicks, color] of frame.falling) {
    const dt = hitTick - frame.frame_tick;
    if (dt < 0 || dt > lookaheadTicks) continue; // past the edge or beyond the horizon
    const bottom = (laneHeight * (lookaheadTicks - dt)) / lookaheadTicks;
    const top = Math.max(0, bottom - (laneHeight * durationTicks) / lookaheadTicks);
    rects.push({ pitch, color, top, bottom });
  }
  return rects;
}
