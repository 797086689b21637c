"""Live streaming endpoint over the scenario runtime.

One stepping task owns the runtime and advances it at wall-clock rate
(h simulated seconds per h wall seconds). Steering commands arrive over
the websocket, queue in a mailbox, and are drained once per step, so a
snapshot always reflects a whole number of commands: pre- or post-command
configuration, never a mixture.

Endpoints:
    WS  /ws        state stream + command channel
    GET /motions   {"limits": {...}, "motions": [manifest entries]}
    GET /health    liveness probe

Wire messages (UTF-8 JSON):
    out  {"type":"state","t","phi","y","ydot","f","motion","period",
          "v3","dphi","gamma"}                   every `decimation` steps
         {"type":"ack","seq"} | {"type":"err","seq","reason"}   per command
    in   {"type":"set_motion","id","period"?}
         {"type":"set_gamma","value"}
         {"type":"reset","y0"?,"ydot0"?,"phi0"?}
         {"type":"pause"} | {"type":"resume"}

"seq" echoes the command's own "seq" field when present, else its arrival
index on that connection (1-based). The service uses only the first
timeline event of the scenario for the initial motion; later events are a
batch-run concern and live steering replaces them here. A subscriber whose
outbound queue fills up is disconnected rather than allowed to stall the
stepping loop.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import logging
from dataclasses import replace
from typing import Optional

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .analysis import lyapunov_v3
from .cpg import _advance, init_from_robot, switch_motion
from .errors import CpgenError
from .oscillator import bounded_rhs, output_map, output_rate
from .scenario import Scenario, build_runtime, load_scenario

__all__ = ["create_app", "serve"]

log = logging.getLogger("cpgen.service")

# Outbound queue depth per subscriber; at the default decimation this is
# several seconds of backlog before a client counts as stalled.
_QUEUE_LIMIT = 64
# If the loop falls this far behind wall time (seconds), re-anchor instead
# of sprinting to catch up.
_MAX_LAG = 0.25


class _Hub:
    """Runtime owner: stepping loop, mailbox, and subscriber fan-out."""

    def __init__(self, sc: Scenario, decimation: int, realtime: bool):
        self.rt = build_runtime(sc)
        self.decimation = decimation
        self.realtime = realtime
        self.mailbox: asyncio.Queue = asyncio.Queue()
        self.subscribers: dict[int, tuple[asyncio.Queue, WebSocket]] = {}
        self._next_id = 0
        self.paused = False
        self._reanchor = True
        self._step_no = 0

    def register(self, queue: asyncio.Queue, ws: WebSocket) -> int:
        self._next_id += 1
        self.subscribers[self._next_id] = (queue, ws)
        return self._next_id

    def unregister(self, conn_id: int) -> None:
        self.subscribers.pop(conn_id, None)

    def snapshot(self) -> dict:
        rt = self.rt
        y = output_map(rt.state.s1, rt.limits)
        ydot = output_rate(rt.state.s1, rt.state.s2, rt.limits)
        f, _, _ = rt.active_trajectory.evaluate(rt.state.phi)
        deriv = bounded_rhs(rt.active_trajectory, rt.limits, rt.params, rt.state)
        return {
            "type": "state",
            "t": rt.t,
            "phi": rt.state.phi,
            "y": y.tolist(),
            "ydot": ydot.tolist(),
            "f": f.tolist(),
            "motion": rt.active_motion,
            "period": rt.active_trajectory.period,
            "v3": lyapunov_v3(rt.active_trajectory, rt.limits, rt.params, rt.state),
            "dphi": deriv.dphi,
            "gamma": rt.params.gamma,
        }

    def broadcast(self, message: dict) -> None:
        stalled = []
        for conn_id, (queue, ws) in self.subscribers.items():
            try:
                queue.put_nowait(message)
            except asyncio.QueueFull:
                stalled.append((conn_id, ws))
        for conn_id, ws in stalled:
            log.warning("dropping stalled subscriber %d", conn_id)
            self.unregister(conn_id)
            task = asyncio.get_running_loop().create_task(ws.close(code=1013))
            task.add_done_callback(lambda t: t.exception())

    def _reply(self, queue: asyncio.Queue, message: dict) -> None:
        try:
            queue.put_nowait(message)
        except asyncio.QueueFull:
            pass  # the broadcast path will drop this subscriber

    def apply_command(self, queue: asyncio.Queue, seq, obj: dict) -> None:
        rt = self.rt
        kind = obj.get("type")
        try:
            if kind == "set_motion":
                if "id" not in obj:
                    raise ValueError("set_motion needs an 'id'")
                period = obj.get("period")
                switch_motion(rt, str(obj["id"]),
                              None if period is None else float(period))
            elif kind == "set_gamma":
                if "value" not in obj:
                    raise ValueError("set_gamma needs a 'value'")
                rt.params = replace(rt.params, gamma=float(obj["value"]))
            elif kind == "reset":
                n = rt.limits.n
                y0 = obj.get("y0")
                ydot0 = obj.get("ydot0")
                y0 = rt.limits.y_avg if y0 is None else np.asarray(
                    [float(v) for v in y0], dtype=float)
                ydot0 = np.zeros(n) if ydot0 is None else np.asarray(
                    [float(v) for v in ydot0], dtype=float)
                rt.state = init_from_robot(
                    y0, ydot0, float(obj.get("phi0", 0.0)), rt.limits)
            elif kind == "pause":
                self.paused = True
            elif kind == "resume":
                self.paused = False
                self._reanchor = True
            else:
                raise ValueError(f"unknown command type: {kind!r}")
        except (CpgenError, ValueError, TypeError) as exc:
            self._reply(queue, {"type": "err", "seq": seq, "reason": str(exc)})
            return
        self._reply(queue, {"type": "ack", "seq": seq})

    def drain_mailbox(self) -> None:
        while True:
            try:
                queue, seq, obj = self.mailbox.get_nowait()
            except asyncio.QueueEmpty:
                return
            self.apply_command(queue, seq, obj)

    async def pump(self) -> None:
        loop = asyncio.get_running_loop()
        anchor_wall = loop.time()
        anchor_sim = self.rt.t
        while True:
            self.drain_mailbox()
            if self.paused:
                await asyncio.sleep(0.02)
                continue
            try:
                _advance(self.rt, 1, 0, False)
            except CpgenError:
                log.exception("stepping failed; pausing the loop")
                self.paused = True
                continue
            self._step_no += 1
            if self._step_no % self.decimation == 0:
                self.broadcast(self.snapshot())
            if not self.realtime:
                await asyncio.sleep(0)
                continue
            if self._reanchor:
                anchor_wall = loop.time()
                anchor_sim = self.rt.t
                self._reanchor = False
            target = anchor_wall + (self.rt.t - anchor_sim)
            now = loop.time()
            if now < target:
                await asyncio.sleep(target - now)
            elif now - target > _MAX_LAG:
                anchor_wall = now
                anchor_sim = self.rt.t
            else:
                await asyncio.sleep(0)


def create_app(
    sc: Scenario, decimation: int = 10, realtime: bool = True
) -> FastAPI:
    """Application factory; the stepping task runs for the app's lifespan."""
    if decimation < 1:
        raise ValueError("decimation must be >= 1")
    hub = _Hub(sc, decimation, realtime)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(hub.pump())
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(lifespan=lifespan)
    app.state.hub = hub

    @app.get("/health")
    async def health():
        return {
            "status": "ok",
            "t": hub.rt.t,
            "paused": hub.paused,
            "subscribers": len(hub.subscribers),
        }

    @app.get("/motions")
    async def motions():
        return {
            "limits": hub.rt.limits.to_json(),
            "motions": hub.rt.library.manifest(),
        }

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        queue: asyncio.Queue = asyncio.Queue(maxsize=_QUEUE_LIMIT)
        conn_id = hub.register(queue, ws)

        async def sender():
            while True:
                message = await queue.get()
                await ws.send_text(json.dumps(message))

        send_task = asyncio.create_task(sender())
        arrival = 0
        try:
            while True:
                text = await ws.receive_text()
                arrival += 1
                try:
                    obj = json.loads(text)
                    if not isinstance(obj, dict):
                        raise ValueError("command must be a JSON object")
                except ValueError:
                    queue.put_nowait(
                        {"type": "err", "seq": arrival, "reason": "malformed command"}
                    )
                    continue
                seq = obj.get("seq", arrival)
                hub.mailbox.put_nowait((queue, seq, obj))
        except WebSocketDisconnect:
            pass
        except RuntimeError:
            # receive after the hub force-closed a stalled connection
            pass
        finally:
            hub.unregister(conn_id)
            send_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await send_task

    return app


def serve(
    scenario_path, bind: str = "127.0.0.1:8000", decimation: int = 10
) -> None:
    """Load a scenario and run the service until terminated."""
    import uvicorn

    sc = load_scenario(scenario_path)
    app = create_app(sc, decimation=decimation)
    host, _, port = bind.rpartition(":")
    if not host:
        raise ValueError(f"bind must look like host:port, got {bind!r}")
    uvicorn.run(app, host=host, port=int(port), log_level="info")
