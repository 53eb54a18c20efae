"""Wire protocol and UI server for the messenger.

Messages are newline-terminated JSON documents over a local WebSocket.
Outbound kinds: layout, state_sync, cursor, speak, alarm_on, alarm_off.
The only inbound mutation accepted is the pointer_override debug message
(a mouse fallback for demos); all clicks originate from the dwell machine.
"""

from __future__ import annotations

import asyncio
import json
import logging
import time

from aiohttp import WSMsgType, web

from .calibration import GazeSample
from .dwell import DwellConfig, DwellState, IDLE_STATE, step
from .messenger import (
    CURSOR,
    SPEAK,
    MessengerLayout,
    MessengerState,
    SpeakSink,
    apply_click,
)

log = logging.getLogger(__name__)

CURSOR_RATE_HZ = 60.0


class MessengerSession:
    """Protocol logic independent of sockets: gaze samples in, messages out.

    All timing comes from sample timestamps, so the throttle and the dwell
    machine are fully deterministic under replay.
    """

    def __init__(
        self,
        layout: MessengerLayout,
        dwell_cfg: DwellConfig | None = None,
        sink: SpeakSink | None = None,
        state: MessengerState | None = None,
    ):
        self.layout = layout
        self.dwell_cfg = dwell_cfg or DwellConfig()
        self.sink = sink or SpeakSink()
        self.state = state or MessengerState()
        self.dwell_state: DwellState = IDLE_STATE
        self.clicks = []
        self._regions = layout.all_regions()
        self._last_cursor_ts: float | None = None
        self._min_cursor_gap = 1000.0 / CURSOR_RATE_HZ

    def hello_messages(self) -> list[dict]:
        """First messages of every connection: full layout, then state."""
        return [
            {
                "kind": "layout",
                "layout": self.layout.to_payload(),
                "dwell": {
                    "dwell_time": self.dwell_cfg.dwell_time,
                    "jitter_radius": self.dwell_cfg.jitter_radius,
                    "refractory": self.dwell_cfg.refractory,
                },
            },
            {"kind": "state_sync", "state": self.state.to_payload()},
        ]

    def on_gaze_sample(self, sample: GazeSample) -> list[dict]:
        """Advance dwell with one sample; returns the wire messages it caused."""
        messages: list[dict] = []
        if sample.valid:
            if (
                self._last_cursor_ts is None
                or sample.timestamp - self._last_cursor_ts >= self._min_cursor_gap
            ):
                self._last_cursor_ts = sample.timestamp
                messages.append(
                    {
                        "kind": CURSOR,
                        "x": sample.screen[0],
                        "y": sample.screen[1],
                        "t": sample.timestamp,
                        "valid": True,
                    }
                )
        self.dwell_state, click = step(self.dwell_state, sample, self._regions, self.dwell_cfg)
        if click is not None:
            self.clicks.append(click)
            messages.extend(self.apply_target_click(click.target_id))
        return messages

    def apply_target_click(self, target_id: str) -> list[dict]:
        self.state, events = apply_click(self.state, target_id, self.layout)
        messages = []
        for ev in events:
            if ev.kind == SPEAK:
                self.sink(ev.payload["text"])
            messages.append({"kind": ev.kind, **ev.payload})
        return messages

    def on_pointer_override(self, x: float, y: float, t: int) -> list[dict]:
        """Debug mouse fallback: treated exactly like a valid gaze sample."""
        return self.on_gaze_sample(
            GazeSample(screen=(float(x), float(y)), valid=True, timestamp=int(t))
        )


class UiServer:
    """Single-client WebSocket endpoint plus static assets for the UI.

    A new connection replaces the previous one (latest wins); the core keeps
    running across disconnects and accepts reconnects.
    """

    def __init__(
        self,
        session: MessengerSession,
        host: str = "127.0.0.1",
        port: int = 0,
        static_dir: str | None = None,
    ):
        self.session = session
        self.host = host
        self.port = port
        self.static_dir = static_dir
        self._ws: web.WebSocketResponse | None = None
        self._runner: web.AppRunner | None = None
        self._started = time.monotonic()

    def _now_ms(self) -> int:
        return int((time.monotonic() - self._started) * 1000.0)

    async def start(self) -> int:
        app = web.Application()
        app.router.add_get("/ws", self._ws_handler)
        if self.static_dir:
            app.router.add_get("/", self._index)
            app.router.add_static("/", self.static_dir)
        self._runner = web.AppRunner(app)
        await self._runner.setup()
        site = web.TCPSite(self._runner, self.host, self.port)
        await site.start()
        self.port = self._runner.addresses[0][1]
        log.info("ui server on http://%s:%d (ws at /ws)", self.host, self.port)
        return self.port

    async def _index(self, request: web.Request) -> web.FileResponse:
        return web.FileResponse(f"{self.static_dir}/index.html")

    async def _ws_handler(self, request: web.Request) -> web.WebSocketResponse:
        ws = web.WebSocketResponse()
        await ws.prepare(request)
        previous, self._ws = self._ws, ws
        if previous is not None and not previous.closed:
            await previous.close()
        for msg in self.session.hello_messages():
            await self._send(ws, msg)
        async for raw in ws:
            if raw.type != WSMsgType.TEXT:
                continue
            try:
                inbound = json.loads(raw.data)
            except json.JSONDecodeError:
                log.warning("ignoring unparseable client message")
                continue
            if inbound.get("kind") == "pointer_override":
                t = inbound.get("t", self._now_ms())
                out = self.session.on_pointer_override(inbound["x"], inbound["y"], t)
                await self.broadcast(out)
            else:
                log.warning("ignoring inbound %r (UI sends no mutations)", inbound.get("kind"))
        if self._ws is ws:
            self._ws = None
        return ws

    async def _send(self, ws: web.WebSocketResponse, message: dict):
        await ws.send_str(json.dumps(message) + "\n")

    async def broadcast(self, messages: list[dict]):
        ws = self._ws
        if ws is None or ws.closed:
            return
        for msg in messages:
            try:
                await self._send(ws, msg)
            except ConnectionResetError:
                self._ws = None
                return

    async def stop(self):
        if self._ws is not None and not self._ws.closed:
            await self._ws.close()
        if self._runner is not None:
            await self._runner.cleanup()


async def drive_session(
    server: UiServer,
    gaze_samples,
    realtime: bool = True,
):
    """Feed a gaze-sample iterable through the session, pacing by timestamps."""
    t0 = time.monotonic()
    for sample in gaze_samples:
        if realtime:
            lag = sample.timestamp / 1000.0 - (time.monotonic() - t0)
            if lag > 0:
                await asyncio.sleep(lag)
        else:
            await asyncio.sleep(0)
        await server.broadcast(server.session.on_gaze_sample(sample))
