// Browser entry point: wires the websocket client, steering input, and view.

import { BridgeClient } from "./client.js";
import { gamepadAxisToSwa, SteeringRamp, SteerSender, STEER_INTERVAL_MS } from "./input.js";
import { encodeDisturb, encodeMode, encodeRecord, encodeSteer, isMode } from "./protocol.js";
import { CanvasPainter, View } from "./view.js";

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

const params = new URLSearchParams(location.search);
const server =
  params.get("server") ?? `ws://${location.host || "127.0.0.1:8700"}/ws`;

const painter = new CanvasPainter(
  $("camera") as HTMLCanvasElement,
  $("lane-strip") as HTMLCanvasElement,
  $("readouts"),
  $("banner"),
);
const view = new View(painter);
const status = $("status");

const client = new BridgeClient(new WebSocket(server), {
  onOpen: () => (status.textContent = `connected to ${server}`),
  onClose: () => (status.textContent = "disconnected - reload to retry"),
  onError: (err) => painter.showBanner(`server: ${err.reason}`),
  onBadMessage: () => painter.showBanner("malformed message from server"),
});

const ramp = new SteeringRamp();
const sender = new SteerSender((swa) => client.send(encodeSteer(swa)));

const KEYMAP: Record<string, "left" | "right"> = {
  ArrowLeft: "left",
  a: "left",
  ArrowRight: "right",
  d: "right",
};
window.addEventListener("keydown", (ev) => {
  const dir = KEYMAP[ev.key];
  if (dir) {
    ramp.keyDown(dir);
    ev.preventDefault();
  }
});
window.addEventListener("keyup", (ev) => {
  const dir = KEYMAP[ev.key];
  if (dir) ramp.keyUp(dir);
});

for (const mode of ["human", "policy", "expert"] as const) {
  $(`mode-${mode}`).addEventListener("click", () => client.send(encodeMode(mode)));
}
let recording = false;
$("record").addEventListener("click", () => {
  recording = !recording;
  client.send(encodeRecord(recording));
});
$("disturb").addEventListener("click", () => client.send(encodeDisturb(1.0, 0.5)));
$("banner").addEventListener("click", () => painter.showBanner(null));

let lastInput = performance.now();
setInterval(() => {
  const now = performance.now();
  const dt = (now - lastInput) / 1000;
  lastInput = now;
  let swa = ramp.tick(dt);
  const pad = navigator.getGamepads?.()[0];
  if (pad && Math.abs(pad.axes[0] ?? 0) > 0.08) {
    swa = gamepadAxisToSwa(pad.axes[0]);
  }
  sender.set(swa);
  sender.poll(now);
}, STEER_INTERVAL_MS / 2);

function paint() {
  const tick = client.takeLatest();
  if (tick) {
    view.renderTick(tick);
    recording = tick.recording;
    ($("record") as HTMLButtonElement).textContent = tick.recording
      ? "stop recording"
      : "start recording";
    if (!isMode(tick.mode)) painter.showBanner(`unknown mode ${tick.mode}`);
  }
  requestAnimationFrame(paint);
}
requestAnimationFrame(paint);
