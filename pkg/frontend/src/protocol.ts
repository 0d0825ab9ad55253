// Wire protocol of the lanekeep serve bridge. One JSON text message per frame
// or command; anything outside these shapes is rejected.

export type Mode = "human" | "policy" | "expert";

export interface TickMessage {
  type: "tick";
  t: number;
  pose: { x: number; y: number; psi: number };
  v: number;
  swa: number;
  kappa: number;
  y_off: number;
  d_l: number;
  d_r: number;
  frame_png_b64: string;
  recording: boolean;
  mode: Mode;
}

export interface ErrorMessage {
  type: "error";
  reason: string;
}

export type ServerMessage = TickMessage | ErrorMessage;

export type ClientCommand =
  | { type: "steer"; swa: number }
  | { type: "mode"; value: Mode }
  | { type: "record"; value: boolean }
  | { type: "disturb"; swa: number; duration_s: number };

export const MAX_SWA = 9.0;

export function clampSwa(swa: number): number {
  return Math.min(MAX_SWA, Math.max(-MAX_SWA, swa));
}

export function encodeSteer(swa: number): ClientCommand {
  return { type: "steer", swa: clampSwa(swa) };
}

export function encodeMode(value: Mode): ClientCommand {
  return { type: "mode", value };
}

export function encodeRecord(value: boolean): ClientCommand {
  return { type: "record", value };
}

export function encodeDisturb(swa: number, durationS: number): ClientCommand {
  if (durationS <= 0) throw new Error("disturbance duration must be > 0");
  return { type: "disturb", swa: clampSwa(swa), duration_s: durationS };
}

const isNum = (x: unknown): x is number => typeof x === "number" && Number.isFinite(x);

export function isMode(x: unknown): x is Mode {
  return x === "human" || x === "policy" || x === "expert";
}

export function parseServerMessage(text: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const msg = raw as Record<string, unknown>;
  if (msg.type === "error") {
    return typeof msg.reason === "string" ? { type: "error", reason: msg.reason } : null;
  }
  if (msg.type !== "tick") return null;
  const pose = msg.pose as Record<string, unknown> | undefined;
  if (
    !pose || !isNum(pose.x) || !isNum(pose.y) || !isNum(pose.psi) ||
    !isNum(msg.t) || !isNum(msg.v) || !isNum(msg.swa) || !isNum(msg.kappa) ||
    !isNum(msg.y_off) || !isNum(msg.d_l) || !isNum(msg.d_r) ||
    typeof msg.frame_png_b64 !== "string" ||
    typeof msg.recording !== "boolean" || !isMode(msg.mode)
  ) {
    return null;
  }
  return {
    type: "tick",
    t: msg.t,
    pose: { x: pose.x as number, y: pose.y as number, psi: pose.psi as number },
    v: msg.v,
    swa: msg.swa,
    kappa: msg.kappa,
    y_off: msg.y_off,
    d_l: msg.d_l,
    d_r: msg.d_r,
    frame_png_b64: msg.frame_png_b64,
    recording: msg.recording,
    mode: msg.mode,
  };
}

// Validates an outbound command object; used by tests to guarantee the client
// never emits anything outside the documented protocol.
export function isValidCommand(cmd: unknown): cmd is ClientCommand {
  if (typeof cmd !== "object" || cmd === null) return false;
  const c = cmd as Record<string, unknown>;
  switch (c.type) {
    case "steer":
      return isNum(c.swa) && Math.abs(c.swa as number) <= MAX_SWA && Object.keys(c).length === 2;
    case "mode":
      return isMode(c.value) && Object.keys(c).length === 2;
    case "record":
      return typeof c.value === "boolean" && Object.keys(c).length === 2;
    case "disturb":
      return (
        isNum(c.swa) && Math.abs(c.swa as number) <= MAX_SWA &&
        isNum(c.duration_s) && (c.duration_s as number) > 0 && Object.keys(c).length === 3
      );
    default:
      return false;
  }
}
