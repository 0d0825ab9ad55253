// View layer: camera frame, schematic lane strip, numeric readouts.
// Drawing goes through the Painter interface so the logic is testable
// without a canvas; CanvasPainter is the browser implementation.

import { TickMessage } from "./protocol.js";

export interface Readouts {
  speedKmh: number;
  swa: number;
  dLeft: number;
  dRight: number;
  mode: string;
  recording: boolean;
}

export interface Painter {
  drawCameraFrame(pngBase64: string): void;
  drawLaneStrip(yOffFrac: number, crossed: boolean): void;
  drawReadouts(r: Readouts): void;
  showBanner(text: string | null): void;
}

export class View {
  constructor(private painter: Painter, private laneHalfWidth = 1.875) {}

  renderTick(tick: TickMessage): void {
    this.painter.drawCameraFrame(tick.frame_png_b64);
    const crossed = tick.d_l < 0 || tick.d_r < 0;
    const frac = Math.max(-1.2, Math.min(1.2, tick.y_off / this.laneHalfWidth));
    this.painter.drawLaneStrip(frac, crossed);
    this.painter.drawReadouts({
      speedKmh: tick.v * 3.6,
      swa: tick.swa,
      dLeft: tick.d_l,
      dRight: tick.d_r,
      mode: tick.mode,
      recording: tick.recording,
    });
  }
}

export class CanvasPainter implements Painter {
  private ctx: CanvasRenderingContext2D;
  private stripCtx: CanvasRenderingContext2D;
  private img = new Image();
  private pendingFrame: string | null = null;
  private drawing = false;

  constructor(
    camera: HTMLCanvasElement,
    strip: HTMLCanvasElement,
    private readouts: HTMLElement,
    private banner: HTMLElement,
  ) {
    this.ctx = camera.getContext("2d")!;
    this.stripCtx = strip.getContext("2d")!;
    this.img.onload = () => {
      this.ctx.drawImage(this.img, 0, 0, camera.width, camera.height);
      this.drawing = false;
      if (this.pendingFrame) {
        const next = this.pendingFrame;
        this.pendingFrame = null;
        this.drawCameraFrame(next);
      }
    };
  }

  drawCameraFrame(pngBase64: string): void {
    if (this.drawing) {
      this.pendingFrame = pngBase64; // decode in flight: keep only the newest
      return;
    }
    this.drawing = true;
    this.img.src = `data:image/png;base64,${pngBase64}`;
  }

  drawLaneStrip(yOffFrac: number, crossed: boolean): void {
    const c = this.stripCtx;
    const { width, height } = c.canvas;
    c.fillStyle = crossed ? "#5a1111" : "#222";
    c.fillRect(0, 0, width, height);
    c.strokeStyle = "#ddd";
    c.setLineDash([]);
    for (const x of [4, width - 4]) {
      c.beginPath();
      c.moveTo(x, 0);
      c.lineTo(x, height);
      c.stroke();
    }
    // vehicle marker: yOffFrac +1 = at the left marking
    const usable = width / 2 - 14;
    const cx = width / 2 - yOffFrac * usable;
    c.fillStyle = crossed ? "#ff5050" : "#6fc36f";
    c.fillRect(cx - 9, height / 2 - 16, 18, 32);
  }

  drawReadouts(r: Readouts): void {
    this.readouts.textContent =
      `${r.speedKmh.toFixed(0)} km/h | swa ${r.swa.toFixed(2)} rad | ` +
      `d_l ${r.dLeft.toFixed(2)} m | d_r ${r.dRight.toFixed(2)} m | ` +
      `${r.mode}${r.recording ? " | REC" : ""}`;
    this.readouts.classList.toggle("recording", r.recording);
  }

  showBanner(text: string | null): void {
    this.banner.textContent = text ?? "";
    this.banner.style.display = text ? "block" : "none";
  }
}
