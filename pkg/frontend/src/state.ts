import { Mode, TickMessage } from "./protocol.js";

export type Connection = "connecting" | "open" | "closed";

export interface ClientState {
  connection: Connection;
  mode: Mode;
  steering: number; // radians, clamped to +-9 by the input layer
  recording: boolean;
  lastTick: TickMessage | null;
}

export function initialState(): ClientState {
  return {
    connection: "connecting",
    mode: "expert",
    steering: 0,
    recording: false,
    lastTick: null,
  };
}

export function applyTick(state: ClientState, tick: TickMessage): ClientState {
  return { ...state, lastTick: tick, mode: tick.mode, recording: tick.recording };
}
