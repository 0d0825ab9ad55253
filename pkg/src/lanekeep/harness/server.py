"""Live websocket bridge: real-time sim loop, human/policy/expert driving,
recording, and disturbance injection.

Protocol (JSON text messages):
    server -> client, one per tick:
        {"type":"tick","t":f,"pose":{"x":f,"y":f,"psi":f},"v":f,"swa":f,
         "kappa":f,"y_off":f,"d_l":f,"d_r":f,"frame_png_b64":s,
         "recording":b,"mode":"human"|"policy"|"expert"}
    client -> server:
        {"type":"steer","swa":f}
        {"type":"mode","value":"human"|"policy"|"expert"}
        {"type":"record","value":true|false}
        {"type":"disturb","swa":f,"duration_s":f}
    Invalid messages are answered with {"type":"error","reason":s}.

One sim loop owns all mutable state; websocket clients only enqueue messages
and receive immutable snapshots. If the vehicle is lost or runs out of road it
respawns at the scenario start and any active recording stops.
"""

from __future__ import annotations

import asyncio
import base64
import contextlib
import json
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from ..camera.pngio import png_bytes
from ..camera.render import CameraConfig, render
from ..errors import VehicleLostError
from ..expert import ExpertParams, expert_action
from ..geometry.centerline import localize
from ..metrics import marking_distances
from ..nn.network import Network
from ..policy.architecture import infer
from ..vehicle import VehicleParams, curvature_to_swa, step, swa_to_curvature
from .collect import DatasetSink
from .loop import FaultEvent, Scenario, frame_seed, initial_state

MODES = ("human", "policy", "expert")


class SimBridge:
    """Authoritative simulation state plus the message protocol around it."""

    def __init__(
        self,
        sc: Scenario,
        vehicle: VehicleParams = VehicleParams(),
        camera: CameraConfig = CameraConfig(),
        expert: ExpertParams = ExpertParams(),
        model: Network | None = None,
        out_dir=None,
    ):
        self.sc = sc
        self.vehicle = vehicle
        self.camera = camera
        self.expert = expert
        self.net = model
        self.out_dir = Path(out_dir) if out_dir else None
        self.state = initial_state(sc)
        self.rng = np.random.default_rng(sc.seed)
        self.mode = "expert"
        self.recording = False
        self.human_swa = 0.0
        self.tick_index = 0
        self.faults: list[FaultEvent] = []
        self.clients: set[asyncio.Queue] = set()
        self._sink: DatasetSink | None = None
        self._session = 0

    # ------------------------------------------------------------- messages

    def handle_message(self, text: str) -> dict | None:
        """Apply one client message; returns an error reply or None."""
        try:
            msg = json.loads(text)
        except json.JSONDecodeError:
            return {"type": "error", "reason": "not valid JSON"}
        if not isinstance(msg, dict):
            return {"type": "error", "reason": "message must be a JSON object"}
        kind = msg.get("type")
        try:
            if kind == "steer":
                swa = float(msg["swa"])
                if abs(swa) > self.vehicle.max_swa:
                    return {"type": "error", "reason": f"|swa| > {self.vehicle.max_swa}"}
                self.human_swa = swa
            elif kind == "mode":
                value = msg["value"]
                if value not in MODES:
                    return {"type": "error", "reason": f"mode must be one of {MODES}"}
                if value == "policy" and self.net is None:
                    return {"type": "error", "reason": "no model loaded; policy mode unavailable"}
                self.mode = value
            elif kind == "record":
                value = msg["value"]
                if not isinstance(value, bool):
                    return {"type": "error", "reason": "record value must be a boolean"}
                if value:
                    self._start_recording()
                else:
                    self._stop_recording()
            elif kind == "disturb":
                duration = float(msg["duration_s"])
                swa = float(msg["swa"])
                if duration <= 0 or abs(swa) > self.vehicle.max_swa:
                    return {"type": "error", "reason": "bad disturbance parameters"}
                self.faults.append(
                    FaultEvent(t_start=self.tick_index * self.sc.tick_dt, duration=duration, swa_override=swa)
                )
            else:
                return {"type": "error", "reason": f"unknown message type {kind!r}"}
        except (KeyError, TypeError, ValueError) as e:
            return {"type": "error", "reason": f"malformed {kind} message: {e}"}
        return None

    def _start_recording(self):
        if self.recording:
            return
        if self.out_dir is None:
            raise ValueError("server started without --out; recording unavailable")
        self._session += 1
        expedition = f"{self.sc.name}-{self.sc.seed}-live{self._session}"
        self._sink = DatasetSink(self.out_dir, expedition)
        self.recording = True

    def _stop_recording(self):
        if self._sink is not None:
            self._sink.close()
            self._sink = None
        self.recording = False

    # ----------------------------------------------------------------- tick

    def _respawn(self):
        self.state = initial_state(self.sc)
        self._stop_recording()

    def tick(self, want_frame: bool) -> dict | None:
        """Advance one tick; returns the tick message (None while headless)."""
        t = self.tick_index * self.sc.tick_dt
        sc, vehicle = self.sc, self.vehicle
        try:
            pose = localize(sc.road, self.state.x, self.state.y, self.state.psi, sc.lane_index)
        except VehicleLostError:
            self._respawn()
            pose = localize(sc.road, self.state.x, self.state.y, self.state.psi, sc.lane_index)
        if pose.s >= sc.road.total_length - (sc.speed * sc.tick_dt + 5.0):
            self._respawn()
            pose = localize(sc.road, self.state.x, self.state.y, self.state.psi, sc.lane_index)

        need_frame = want_frame or self.recording or self.mode == "policy"
        frame = None
        if need_frame:
            frame = render(sc.road, self.state, sc.lane_index, self.camera,
                           seed=frame_seed(sc.seed, self.tick_index))

        if self.mode == "human":
            kappa = swa_to_curvature(self.human_swa, vehicle)
        elif self.mode == "policy":
            kappa = infer(self.net, frame)
        else:
            kappa = expert_action(pose, sc.road, self.expert, rng=self.rng, vehicle=vehicle)

        self.faults = [f for f in self.faults if t < f.t_start + f.duration]
        active = next((f for f in self.faults if f.active(t)), None)
        if active is not None:
            swa = active.swa_override
            kappa = swa_to_curvature(swa, vehicle)
        elif self.mode == "human":
            swa = self.human_swa
        else:
            kappa = min(max(kappa, -vehicle.max_kappa), vehicle.max_kappa)
            swa = curvature_to_swa(kappa, vehicle)

        if self.recording and self._sink is not None:
            self._sink.add(frame=frame, swa=swa, speed=self.state.v, t=t)
            self._sink.writer.flush()

        d_l, d_r = marking_distances(pose.y_off, sc.road.lane_width, vehicle.width)
        msg = None
        if want_frame:
            msg = {
                "type": "tick",
                "t": t,
                "pose": {"x": self.state.x, "y": self.state.y, "psi": self.state.psi},
                "v": self.state.v,
                "swa": swa,
                "kappa": kappa,
                "y_off": pose.y_off,
                "d_l": float(d_l),
                "d_r": float(d_r),
                "frame_png_b64": base64.b64encode(png_bytes(frame)).decode("ascii"),
                "recording": self.recording,
                "mode": self.mode,
            }
        self.state = step(self.state, kappa, sc.tick_dt, vehicle)
        self.tick_index += 1
        return msg

    def broadcast(self, msg: dict) -> None:
        for q in self.clients:
            if q.full():  # slow client: drop the oldest tick
                with contextlib.suppress(asyncio.QueueEmpty):
                    q.get_nowait()
            q.put_nowait(msg)

    async def run(self) -> None:
        """Real-time 20 Hz loop; headless ticks are skipped cheaply."""
        loop = asyncio.get_running_loop()
        next_deadline = loop.time()
        while True:
            want_frame = bool(self.clients)
            msg = self.tick(want_frame)
            if msg is not None and self.clients:
                self.broadcast(msg)
            next_deadline += self.sc.tick_dt
            delay = next_deadline - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                next_deadline = loop.time()  # fell behind; don't accumulate debt


def create_app(bridge: SimBridge, ui_dir=None) -> FastAPI:
    import contextlib as _ctx

    @_ctx.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(bridge.run())
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task
            bridge._stop_recording()

    app = FastAPI(lifespan=lifespan)

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        queue: asyncio.Queue = asyncio.Queue(maxsize=8)
        bridge.clients.add(queue)

        async def sender():
            while True:
                await ws.send_text(json.dumps(await queue.get()))

        send_task = asyncio.create_task(sender())
        try:
            while True:
                reply = bridge.handle_message(await ws.receive_text())
                if reply is not None:
                    await ws.send_text(json.dumps(reply))
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await send_task
            bridge.clients.discard(queue)
            if not bridge.clients and bridge.recording:
                bridge._stop_recording()  # sim continues; recording pauses

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app


def serve(
    port: int,
    sc: Scenario,
    model: Network | None = None,
    vehicle: VehicleParams = VehicleParams(),
    camera: CameraConfig = CameraConfig(),
    expert: ExpertParams = ExpertParams(),
    out_dir=None,
    ui_dir=None,
    host: str = "127.0.0.1",
) -> None:
    """Run the bridge until interrupted."""
    import uvicorn

    bridge = SimBridge(sc, vehicle=vehicle, camera=camera, expert=expert, model=model, out_dir=out_dir)
    app = create_app(bridge, ui_dir=ui_dir)
    print(f"serving on ws://{host}:{port}/ws (mode: expert-drive; ui: {ui_dir or 'none'})")
    uvicorn.run(app, host=host, port=port, log_level="warning")
