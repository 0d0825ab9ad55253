import { describe, expect, it } from "vitest";

import {
  clampSwa,
  encodeDisturb,
  encodeMode,
  encodeRecord,
  encodeSteer,
  isValidCommand,
  parseServerMessage,
} from "../src/protocol.js";

const tick = {
  type: "tick",
  t: 1.25,
  pose: { x: 10.0, y: -0.2, psi: 0.01 },
  v: 16.0,
  swa: 0.5,
  kappa: 0.001,
  y_off: -0.2,
  d_l: 1.075,
  d_r: 0.675,
  frame_png_b64: "aGVsbG8=",
  recording: false,
  mode: "human",
};

describe("parseServerMessage", () => {
  it("accepts a well-formed tick", () => {
    const msg = parseServerMessage(JSON.stringify(tick));
    expect(msg).not.toBeNull();
    expect(msg!.type).toBe("tick");
    if (msg!.type === "tick") {
      expect(msg!.pose.x).toBe(10.0);
      expect(msg!.mode).toBe("human");
    }
  });

  it("accepts error messages", () => {
    expect(parseServerMessage('{"type":"error","reason":"nope"}')).toEqual({
      type: "error",
      reason: "nope",
    });
  });

  it.each([
    ["not json", "{oops"],
    ["wrong type", JSON.stringify({ type: "mystery" })],
    ["missing field", JSON.stringify({ ...tick, v: undefined })],
    ["bad mode", JSON.stringify({ ...tick, mode: "autopilot" })],
    ["non-numeric", JSON.stringify({ ...tick, d_l: "0.5" })],
    ["bad pose", JSON.stringify({ ...tick, pose: { x: 1, y: 2 } })],
  ])("rejects %s", (_name, text) => {
    expect(parseServerMessage(text)).toBeNull();
  });
});

describe("command encoding", () => {
  it("steer clamps to +-9 rad", () => {
    expect(encodeSteer(12)).toEqual({ type: "steer", swa: 9 });
    expect(encodeSteer(-12)).toEqual({ type: "steer", swa: -9 });
    expect(clampSwa(0.5)).toBe(0.5);
  });

  it("record toggles encode the documented shape", () => {
    expect(encodeRecord(true)).toEqual({ type: "record", value: true });
    expect(encodeRecord(false)).toEqual({ type: "record", value: false });
  });

  it("disturb encodes swa and duration", () => {
    expect(encodeDisturb(1.0, 0.5)).toEqual({ type: "disturb", swa: 1.0, duration_s: 0.5 });
    expect(() => encodeDisturb(1.0, 0)).toThrow();
  });

  it("every encoder output passes the schema check", () => {
    const cmds = [
      encodeSteer(-3.3),
      encodeMode("policy"),
      encodeRecord(true),
      encodeDisturb(0.7, 1.5),
    ];
    for (const cmd of cmds) expect(isValidCommand(cmd)).toBe(true);
  });

  it("schema check rejects out-of-protocol objects", () => {
    expect(isValidCommand({ type: "steer", swa: 99 })).toBe(false);
    expect(isValidCommand({ type: "mode", value: "ludicrous" })).toBe(false);
    expect(isValidCommand({ type: "steer", swa: 1, extra: 1 })).toBe(false);
    expect(isValidCommand({ type: "disturb", swa: 1, duration_s: -1 })).toBe(false);
    expect(isValidCommand(null)).toBe(false);
  });
});
