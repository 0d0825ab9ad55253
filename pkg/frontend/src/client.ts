// Websocket wrapper around the bridge protocol: validates inbound messages,
// serializes outbound commands, coalesces ticks to the newest one.

import {
  ClientCommand,
  ErrorMessage,
  parseServerMessage,
  TickMessage,
} from "./protocol.js";

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev: any) => void) | null;
  onclose: ((ev: any) => void) | null;
  onmessage: ((ev: any) => void) | null;
  readyState: number;
}

export interface BridgeEvents {
  onTick?: (tick: TickMessage) => void;
  onError?: (err: ErrorMessage) => void;
  onBadMessage?: (raw: string) => void;
  onOpen?: () => void;
  onClose?: () => void;
}

const OPEN = 1;

export class BridgeClient {
  /** Newest unconsumed tick; older ones are dropped, we only render the latest. */
  latest: TickMessage | null = null;
  dropped = 0;

  constructor(private ws: WebSocketLike, private events: BridgeEvents = {}) {
    ws.onopen = () => this.events.onOpen?.();
    ws.onclose = () => this.events.onClose?.();
    ws.onmessage = (ev) => this.handle(String(ev.data));
  }

  handle(text: string): void {
    const msg = parseServerMessage(text);
    if (msg === null) {
      this.events.onBadMessage?.(text);
      return;
    }
    if (msg.type === "error") {
      this.events.onError?.(msg);
      return;
    }
    if (this.latest !== null) this.dropped += 1;
    this.latest = msg;
    this.events.onTick?.(msg);
  }

  /** Returns and clears the newest tick (render-latest policy). */
  takeLatest(): TickMessage | null {
    const tick = this.latest;
    this.latest = null;
    return tick;
  }

  send(cmd: ClientCommand): void {
    if (this.ws.readyState === OPEN) this.ws.send(JSON.stringify(cmd));
  }

  close(): void {
    this.ws.close();
  }
}
