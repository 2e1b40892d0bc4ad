import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { Frame, FrameSchema } from "../src/protocol.js";
import { layoutRoll } from "../src/roll.js";

const LOOKAHEAD = 1920;
const LANE = 300;

function fixture(name: string): Frame {
  const path = fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));
  return FrameSchema.parse(JSON.parse(readFileSync(path, "utf-8")));
}

function syntheticFrame(frameTick: number, falling: [number, number, number, number][]): Frame {
  return FrameSchema.parse({
    type: "frame",
    seq: 1,
    frame_tick: frameTick,
    key_colors: "0".repeat(88),
    falling,
    active_chord: null,
  });
}

describe("keyboard edge", () => {
  it("places every note due now exactly at the keyboard edge", () => {
    const frame = fixture("rolling-edge-frame.json");
    const due = frame.falling.filter(([, hit]) => hit === frame.frame_tick);
    expect(due.length).toBeGreaterThan(0);
    const rects = layoutRoll(frame, LOOKAHEAD, LANE);
    for (const [pitch] of due) {
      const rect = rects.find((r) => r.pitch === pitch && r.bottom === LANE);
      expect(rect, `pitch ${pitch} should touch the edge`).toBeDefined();
    }
  });

  it("keeps a synthetic hit_tick == frame_tick note on the edge at any tick", () => {
    const frame = syntheticFrame(7777, [[60, 7777, 480, 2]]);
    const rects = layoutRoll(frame, LOOKAHEAD, LANE);
    expect(rects).toHaveLength(1);
    expect(rects[0]!.bottom).toBe(LANE);
  });
});

describe("windowing", () => {
  it("draws nothing beyond the lookahead horizon", () => {
    const frame = syntheticFrame(0, [[60, LOOKAHEAD + 1, 480, 2]]);
    expect(layoutRoll(frame, LOOKAHEAD, LANE)).toHaveLength(0);
  });

  it("drops notes already past the edge", () => {
    const frame = syntheticFrame(1000, [[60, 999, 480, 2]]);
    expect(layoutRoll(frame, LOOKAHEAD, LANE)).toHaveLength(0);
  });

  it("places a note half a lookahead away in the middle of the lane", () => {
    const frame = syntheticFrame(0, [[60, LOOKAHEAD / 2, 480, 2]]);
    expect(layoutRoll(frame, LOOKAHEAD, LANE)[0]!.bottom).toBe(LANE / 2);
  });

  it("clamps long notes at the lane top", () => {
    const frame = syntheticFrame(0, [[60, 480, LOOKAHEAD * 2, 2]]);
    const rect = layoutRoll(frame, LOOKAHEAD, LANE)[0]!;
    expect(rect.top).toBe(0);
    expect(rect.bottom).toBeGreaterThan(rect.top);
  });
});

describe("motion", () => {
  it("moves notes monotonically toward the keyboard as ticks advance", () => {
    const falling: [number, number, number, number][] = [[64, 1800, 240, 2]];
    let previousBottom = -1;
    for (const tick of [0, 1, 600, 1200, 1799, 1800]) {
      const rects = layoutRoll(syntheticFrame(tick, falling), LOOKAHEAD, LANE);
      expect(rects).toHaveLength(1);
      expect(rects[0]!.bottom).toBeGreaterThan(previousBottom);
      previousBottom = rects[0]!.bottom;
    }
    expect(previousBottom).toBe(LANE);
  });

  it("keeps its proportional placement for the real fixture", () => {
    const frame = fixture("rolling-edge-frame.json");
    for (const rect of layoutRoll(frame, LOOKAHEAD, LANE)) {
      expect(rect.bottom).toBeGreaterThanOrEqual(0);
      expect(rect.bottom).toBeLessThanOrEqual(LANE);
      expect(rect.top).toBeLessThanOrEqual(rect.bottom);
    }
  });
});
