/**
 * 88-key keyboard model, pitch 21 (A0) through 108 (C8).
 *
 * Pure geometry and color classification; DOM work lives in app.ts so
 * frames can be snapshot-tested against expected key sets.
 */

export const PITCH_MIN = 21;
export const PITCH_MAX = 108;
export const KEY_COUNT = 88;
export const WHITE_KEY_COUNT = 52;

const BLACK_PCS = new Set([1, 3, 6, 8, 10]);

export function isBlackKey(pitch: number): boolean {
  return BLACK_PCS.has(((pitch % 12) + 12) % 12);
}

/** key_colors digit for one pitch; 0 when out of range. */
export function digitAt(keyColors: string, pitch: number): number {
  if (pitch < PITCH_MIN || pitch > PITCH_MAX) return 0;
  const code = keyColors.charCodeAt(pitch - PITCH_MIN) - 48;
  return code >= 0 && code <= 3 ? code : 0;
}

export interface KeySets {
  yellow: number[];
  pink: number[];
  purple: number[];
}

/** Group the lit pitches of a frame by highlight color. */
export function keySets(keyColors: string): KeySets {
  const sets: KeySets = { yellow: [], pink: [], purple: [] };
  for (let pitch = PITCH_MIN; pitch <= PITCH_MAX; pitch++) {
    switch (digitAt(keyColors, pitch)) {
      case 1:
        sets.yellow.push(pitch);
        break;
      case 2:
        sets.pink.push(pitch);
        break;
      case 3:
        sets.purple.push(pitch);
        break;
    }
  }
  return sets;
}

export interface KeyGeometry {
  pitch: number;
  black: boolean;
  /** left edge in white-key widths from the keyboard's left border */
  x: number;
  /** width in white-key widths */
  w: number;
}

const BLACK_W = 0.62;

/**
 * Key positions in white-key units. White keys tile [0, 52); each black
 * key straddles the boundary after its lower white neighbour.
 */
export function keyboardGeometry(): KeyGeometry[] {
  const keys: KeyGeometry[] = [];
  let white = 0;
  for (let pitch = PITCH_MIN; pitch <= PITCH_MAX; pitch++) {
    if (isBlackKey(pitch)) {
      keys.push({ pitch, black: true, x: white - BLACK_W / 2, w: BLACK_W });
    } else {
      keys.push({ pitch, black: false, x: white, w: 1 });
      white++;
    }
  }
  return keys;
}

/** Horizontal center of a pitch, in white-key units; used to align the roll. */
export function keyCenter(geometry: KeyGeometry[], pitch: number): number | null {
  const key = geometry[pitch - PITCH_MIN];
  return key ? key.x + key.w / 2 : null;
}
