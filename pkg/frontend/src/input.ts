// Steering input: keyboard ramp with spring-back, gamepad axis, and the
// rate-limited sender. Humans cannot type radians, so holding an arrow key
// ramps the wheel at 4 rad/s and releasing springs it back at 8 rad/s.
// Right turns are negative SWA.

import { clampSwa, MAX_SWA } from "./protocol.js";

export const RAMP_RATE = 4.0; // rad/s while a key is held
export const SPRING_RATE = 8.0; // rad/s back toward zero when released
export const STEER_INTERVAL_MS = 50; // at most one steer message per interval

export class SteeringRamp {
  value = 0;
  private left = false;
  private right = false;

  keyDown(key: "left" | "right"): void {
    if (key === "left") this.left = true;
    else this.right = true;
  }

  keyUp(key: "left" | "right"): void {
    if (key === "left") this.left = false;
    else this.right = false;
  }

  /** Advance the ramp by dt seconds and return the current SWA. */
  tick(dt: number): number {
    const dir = (this.left ? 1 : 0) - (this.right ? 1 : 0);
    if (dir !== 0) {
      this.value = clampSwa(this.value + dir * RAMP_RATE * dt);
    } else if (this.value !== 0) {
      const step = SPRING_RATE * dt;
      this.value = Math.abs(this.value) <= step ? 0 : this.value - Math.sign(this.value) * step;
    }
    return this.value;
  }

  reset(): void {
    this.value = 0;
    this.left = this.right = false;
  }
}

/** Linear gamepad mapping: full right deflection (+1) is -MAX_SWA. */
export function gamepadAxisToSwa(axis: number): number {
  return clampSwa(-axis * MAX_SWA);
}

/**
 * Rate limiter for steer messages: last-writer-wins, at most one send per
 * STEER_INTERVAL_MS. `now` is a millisecond clock, injectable for tests.
 */
export class SteerSender {
  private pending: number | null = null;
  private lastSent = -Infinity;
  private lastValue: number | null = null;

  constructor(
    private send: (swa: number) => void,
    private intervalMs: number = STEER_INTERVAL_MS,
  ) {}

  set(swa: number): void {
    this.pending = clampSwa(swa);
  }

  /** Flush the newest value if the rate limit allows; call this frequently. */
  poll(now: number): void {
    if (this.pending === null) return;
    if (now - this.lastSent < this.intervalMs) return;
    if (this.pending === this.lastValue) return; // nothing new to say
    this.send(this.pending);
    this.lastSent = now;
    this.lastValue = this.pending;
    this.pending = null;
  }
}
