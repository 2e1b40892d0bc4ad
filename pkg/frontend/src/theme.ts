/**
 * Color theme. The three highlight colors track the engine's key_colors
 * digits: 1 yellow (progression guidance), 2 pink (chord tones),
 * 3 purple (approach notes, deliberately the darker of the three).
 */

export const THEME = {
  background: "#15151d",
  panel: "#1e1e28",
  text: "#e8e6df",
  dimText: "#8f8d98",
  whiteKey: "#f4f0e5",
  blackKey: "#23232c",
  keyBorder: "#3a3a46",
  progressionYellow: "#f5c842",
  chordTonePink: "#f06292",
  approachPurple: "#6a3fb5",
  rollYellow: "#f5c842",
  rollPink: "#f06292",
  edgeLine: "#5c5c6e",
  accentClick: "#ffffff",
} as const;

/** Fill color for a key_colors digit, or null when the key is unlit. */
export function highlightColor(digit: number): string | null {
  switch (digit) {
    case 1:
      return THEME.progressionYellow;
    case 2:
      return THEME.chordTonePink;
    case 3:
      return THEME.approachPurple;
    default:
      return null;
  }
}

/** Falling notes only come in yellow (1) and pink (2). */
export function rollColor(digit: number): string {
  return digit === 2 ? THEME.rollPink : THEME.rollYellow;
}
