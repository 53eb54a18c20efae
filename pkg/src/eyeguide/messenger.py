"""Messenger model: ten spoken command templates, an on-screen keyboard,
free-text composition, text-to-voice events and a caregiver alarm.

The state is a value; apply_click is a pure reducer emitting outbound
events, so any click sequence replays deterministically.
"""

from __future__ import annotations

import json
import logging
import subprocess
from dataclasses import dataclass, field, replace
from importlib import resources

from .dwell import TargetRegion, validate_layout
from .errors import LayoutError, UnknownTargetError

log = logging.getLogger(__name__)

TEMPLATE_COUNT = 10
MAX_TEXT = 500

SPEAK = "speak"
ALARM_ON = "alarm_on"
ALARM_OFF = "alarm_off"
STATE_SYNC = "state_sync"
CURSOR = "cursor"

KEY_ROWS = ["QWERTYUIOP", "ASDFGHJKL", "ZXCVBNM"]
SPACE = "SPACE"
BACKSPACE = "BACKSPACE"
CLEAR = "CLEAR"


@dataclass(frozen=True)
class OutboundEvent:
    kind: str
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == SPEAK and not self.payload.get("text"):
            raise ValueError("speak events need non-empty text")


@dataclass(frozen=True)
class MessengerState:
    composed_text: str = ""
    alarm_active: bool = False
    last_spoken: str | None = None
    revision: int = 0

    def to_payload(self) -> dict:
        return {
            "composed_text": self.composed_text,
            "alarm_active": self.alarm_active,
            "last_spoken": self.last_spoken,
            "revision": self.revision,
        }


@dataclass(frozen=True)
class MessengerLayout:
    templates: tuple[str, ...]
    template_regions: tuple[TargetRegion, ...]
    key_regions: tuple[TargetRegion, ...]
    speak_region: TargetRegion
    alarm_region: TargetRegion
    screen_size: tuple[int, int]

    def __post_init__(self):
        if len(self.templates) != TEMPLATE_COUNT:
            raise LayoutError(
                f"{len(self.templates)} templates; exactly {TEMPLATE_COUNT} required"
            )
        regions = self.all_regions()
        validate_layout(regions)
        w, h = self.screen_size
        for r in regions:
            x, y, rw, rh = r.rect
            if x < 0 or y < 0 or x + rw > w or y + rh > h:
                raise LayoutError(f"region {r.id!r} outside the {w}x{h} screen")

    def all_regions(self) -> list[TargetRegion]:
        return [*self.template_regions, *self.key_regions, self.speak_region, self.alarm_region]

    def to_payload(self) -> dict:
        def region(r):
            return {"id": r.id, "rect": list(r.rect)}

        return {
            "screen_size": list(self.screen_size),
            "templates": [
                {"text": t, **region(r)}
                for t, r in zip(self.templates, self.template_regions)
            ],
            "keys": [region(r) for r in self.key_regions],
            "speak": region(self.speak_region),
            "alarm": region(self.alarm_region),
        }


def default_templates() -> list[str]:
    with resources.files("eyeguide.data").joinpath("templates.json").open("r") as f:
        return json.load(f)


def load_templates(path: str | None) -> list[str]:
    if path is None:
        return default_templates()
    with open(path, "r", encoding="utf-8") as f:
        templates = json.load(f)
    if not isinstance(templates, list) or not all(isinstance(t, str) for t in templates):
        raise LayoutError("templates file must be a JSON list of strings")
    return templates


def build_layout(
    screen_size: tuple[int, int] = (1024, 768),
    templates: list[str] | None = None,
) -> MessengerLayout:
    """Geometry: template column on the right, keyboard grid at the bottom
    left, speak/alarm buttons above the keyboard."""
    if templates is None:
        templates = default_templates()
    w, h = screen_size
    margin = 8

    col_w = int(w * 0.24)
    col_x = w - col_w - margin
    row_h = (h - (TEMPLATE_COUNT + 1) * margin) // TEMPLATE_COUNT
    template_regions = tuple(
        TargetRegion(
            id=f"template_{i}",
            rect=(float(col_x), float(margin + i * (row_h + margin)), float(col_w), float(row_h)),
        )
        for i in range(TEMPLATE_COUNT)
    )

    kb_w = col_x - 2 * margin
    key_w = (kb_w - 9 * margin) // 10
    key_h = int(h * 0.085)
    kb_y = h - 4 * (key_h + margin)
    key_regions = []
    for ri, row in enumerate(KEY_ROWS):
        y = kb_y + ri * (key_h + margin)
        x0 = margin + ri * (key_w // 2)
        for ci, ch in enumerate(row):
            key_regions.append(
                TargetRegion(
                    id=f"key_{ch}",
                    rect=(float(x0 + ci * (key_w + margin)), float(y), float(key_w), float(key_h)),
                )
            )
    y = kb_y + 3 * (key_h + margin)
    wide = key_w * 3 + 2 * margin
    for i, name in enumerate((SPACE, BACKSPACE, CLEAR)):
        key_regions.append(
            TargetRegion(
                id=f"key_{name}",
                rect=(float(margin + i * (wide + margin)), float(y), float(wide), float(key_h)),
            )
        )

    btn_w = (kb_w - margin) // 2
    btn_h = int(h * 0.09)
    btn_y = kb_y - btn_h - margin
    speak_region = TargetRegion(id="speak", rect=(float(margin), float(btn_y), float(btn_w), float(btn_h)))
    alarm_region = TargetRegion(
        id="alarm", rect=(float(2 * margin + btn_w), float(btn_y), float(btn_w), float(btn_h))
    )

    return MessengerLayout(
        templates=tuple(templates),
        template_regions=template_regions,
        key_regions=tuple(key_regions),
        speak_region=speak_region,
        alarm_region=alarm_region,
        screen_size=tuple(screen_size),
    )


def apply_click(
    state: MessengerState, target_id: str, layout: MessengerLayout
) -> tuple[MessengerState, list[OutboundEvent]]:
    """Apply one dwell click to the messenger; returns (new state, events).

    Every applied click bumps the revision and ends with a state_sync event.
    """
    events: list[OutboundEvent] = []
    new = state

    if target_id.startswith("template_"):
        idx = int(target_id.split("_", 1)[1])
        if idx >= len(layout.templates):
            raise UnknownTargetError(target_id)
        text = layout.templates[idx]
        events.append(OutboundEvent(SPEAK, {"text": text}))
        new = replace(state, last_spoken=text)
    elif target_id.startswith("key_"):
        key = target_id[4:]
        known = {r.id for r in layout.key_regions}
        if target_id not in known:
            raise UnknownTargetError(target_id)
        text = state.composed_text
        if key == BACKSPACE:
            text = text[:-1]
        elif key == CLEAR:
            text = ""
        elif key == SPACE:
            if len(text) < MAX_TEXT:
                text = text + " "
        else:
            if len(text) < MAX_TEXT:
                text = text + key
        new = replace(state, composed_text=text)
    elif target_id == layout.speak_region.id:
        if state.composed_text:
            events.append(OutboundEvent(SPEAK, {"text": state.composed_text}))
            new = replace(state, last_spoken=state.composed_text)
    elif target_id == layout.alarm_region.id:
        active = not state.alarm_active
        events.append(OutboundEvent(ALARM_ON if active else ALARM_OFF))
        new = replace(state, alarm_active=active)
    else:
        raise UnknownTargetError(target_id)

    new = replace(new, revision=state.revision + 1)
    events.append(OutboundEvent(STATE_SYNC, {"state": new.to_payload()}))
    return new, events


@dataclass(frozen=True)
class SpeakRecord:
    text: str
    status: str  # "recorded" for the null sink, else "exit:<code>" or "spawn-failed"


class SpeakSink:
    """Forwards speak events to a configured external speaker command.

    With command=None (the null sink) invocations are only recorded, which
    keeps everything desk-testable. The text is passed as the final
    argument. Spawn failures are logged, never raised.
    """

    def __init__(self, command: list[str] | None = None):
        self.command = command
        self.records: list[SpeakRecord] = []

    def __call__(self, text: str) -> SpeakRecord:
        if self.command is None:
            rec = SpeakRecord(text=text, status="recorded")
        else:
            try:
                proc = subprocess.run([*self.command, text], capture_output=True)
                rec = SpeakRecord(text=text, status=f"exit:{proc.returncode}")
            except OSError as exc:
                log.warning("speaker command unavailable: %s", exc)
                rec = SpeakRecord(text=text, status="spawn-failed")
        self.records.append(rec)
        return rec
