import { describe, expect, it } from "vitest";

import { BridgeClient, WebSocketLike } from "../src/client.js";
import { TickMessage } from "../src/protocol.js";
import { Painter, Readouts, View } from "../src/view.js";

function tick(over: Partial<TickMessage> = {}): TickMessage {
  return {
    type: "tick",
    t: 0,
    pose: { x: 0, y: 0, psi: 0 },
    v: 19.44,
    swa: 0.1,
    kappa: 0.001,
    y_off: 0,
    d_l: 0.875,
    d_r: 0.875,
    frame_png_b64: "QUJD",
    recording: false,
    mode: "expert",
    ...over,
  };
}

class FakePainter implements Painter {
  frames: string[] = [];
  strips: Array<{ frac: number; crossed: boolean }> = [];
  readouts: Readouts[] = [];
  banners: Array<string | null> = [];

  drawCameraFrame(png: string) { this.frames.push(png); }
  drawLaneStrip(frac: number, crossed: boolean) { this.strips.push({ frac, crossed }); }
  drawReadouts(r: Readouts) { this.readouts.push(r); }
  showBanner(text: string | null) { this.banners.push(text); }
}

class FakeSocket implements WebSocketLike {
  sent: string[] = [];
  readyState = 1;
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  send(data: string) { this.sent.push(data); }
  close() { this.readyState = 3; }
}

describe("View", () => {
  it("centered vehicle renders in the middle of the strip", () => {
    const p = new FakePainter();
    new View(p).renderTick(tick({ y_off: 0 }));
    expect(p.strips[0]).toEqual({ frac: 0, crossed: false });
    expect(p.frames).toEqual(["QUJD"]);
  });

  it("crossing a marking flags the warning state", () => {
    const p = new FakePainter();
    new View(p).renderTick(tick({ d_l: -0.02, y_off: 0.9 }));
    expect(p.strips[0].crossed).toBe(true);
    expect(p.strips[0].frac).toBeCloseTo(0.9 / 1.875, 10);
  });

  it("readouts convert speed to km/h and carry the recording flag", () => {
    const p = new FakePainter();
    new View(p).renderTick(tick({ recording: true }));
    expect(p.readouts[0].speedKmh).toBeCloseTo(69.98, 1);
    expect(p.readouts[0].recording).toBe(true);
  });
});

describe("BridgeClient tick coalescing", () => {
  it("keeps only the newest of queued ticks", () => {
    const ws = new FakeSocket();
    const client = new BridgeClient(ws);
    for (let i = 0; i < 100; i++) {
      ws.onmessage!({ data: JSON.stringify(tick({ t: i * 0.05 })) });
    }
    const latest = client.takeLatest();
    expect(latest!.t).toBeCloseTo(99 * 0.05, 10);
    expect(client.dropped).toBe(99);
    expect(client.takeLatest()).toBeNull();
  });

  it("routes error messages and malformed text to handlers", () => {
    const ws = new FakeSocket();
    const errors: string[] = [];
    const bad: string[] = [];
    new BridgeClient(ws, {
      onError: (e) => errors.push(e.reason),
      onBadMessage: (raw) => bad.push(raw),
    });
    ws.onmessage!({ data: '{"type":"error","reason":"boom"}' });
    ws.onmessage!({ data: "garbage" });
    expect(errors).toEqual(["boom"]);
    expect(bad).toEqual(["garbage"]);
  });

  it("never sends when the socket is not open", () => {
    const ws = new FakeSocket();
    ws.readyState = 0;
    const client = new BridgeClient(ws);
    client.send({ type: "steer", swa: 1 });
    expect(ws.sent).toEqual([]);
  });
});
