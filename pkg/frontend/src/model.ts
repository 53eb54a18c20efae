// UiModel: a pure mirror of server messages plus derived dwell progress.
// The UI holds no state of its own beyond these mirrors, so reconnecting
// and replaying layout + state_sync reproduces the rendering exactly.

import {
  DwellPayload,
  LayoutPayload,
  RegionPayload,
  ServerMessage,
  StatePayload,
} from "./protocol.js";

export type Connection = "connected" | "reconnecting";

export interface Cursor {
  x: number;
  y: number;
  t: number;
}

export interface UiModel {
  layout: LayoutPayload | null;
  dwell: DwellPayload | null;
  state: StatePayload | null;
  cursor: Cursor | null;
  hoverTarget: string | null;
  hoverSince: number | null;
  dwellProgress: number; // 0..1 for the hovered target
  connection: Connection;
  lastSpoken: string | null;
}

export function initialModel(): UiModel {
  return {
    layout: null,
    dwell: null,
    state: null,
    cursor: null,
    hoverTarget: null,
    hoverSince: null,
    dwellProgress: 0,
    connection: "reconnecting",
    lastSpoken: null,
  };
}

function contains(region: RegionPayload, x: number, y: number): boolean {
  const [rx, ry, rw, rh] = region.rect;
  return rx <= x && x < rx + rw && ry <= y && y < ry + rh;
}

export function regionAt(layout: LayoutPayload, x: number, y: number): RegionPayload | null {
  const all: RegionPayload[] = [
    ...layout.templates,
    ...layout.keys,
    layout.speak,
    layout.alarm,
  ];
  for (const region of all) {
    if (contains(region, x, y)) return region;
  }
  return null;
}

function applyCursor(model: UiModel, x: number, y: number, t: number): UiModel {
  const next: UiModel = { ...model, cursor: { x, y, t } };
  if (!model.layout || !model.dwell) {
    return { ...next, hoverTarget: null, hoverSince: null, dwellProgress: 0 };
  }
  const region = regionAt(model.layout, x, y);
  if (!region) {
    return { ...next, hoverTarget: null, hoverSince: null, dwellProgress: 0 };
  }
  if (region.id !== model.hoverTarget || model.hoverSince === null) {
    return { ...next, hoverTarget: region.id, hoverSince: t, dwellProgress: 0 };
  }
  const progress = Math.min(1, (t - model.hoverSince) / model.dwell.dwell_time);
  return { ...next, hoverTarget: region.id, hoverSince: model.hoverSince, dwellProgress: progress };
}

export function applyMessage(model: UiModel, msg: ServerMessage): UiModel {
  switch (msg.kind) {
    case "layout":
      return { ...model, layout: msg.layout, dwell: msg.dwell, connection: "connected" };
    case "state_sync":
      return { ...model, state: msg.state };
    case "cursor":
      return applyCursor(model, msg.x, msg.y, msg.t);
    case "speak":
      return { ...model, lastSpoken: msg.text };
    case "alarm_on":
      return model.state
        ? { ...model, state: { ...model.state, alarm_active: true } }
        : model;
    case "alarm_off":
      return model.state
        ? { ...model, state: { ...model.state, alarm_active: false } }
        : model;
    default:
      return model;
  }
}

export function onDisconnect(model: UiModel): UiModel {
  // mirrors are kept so the next layout/state_sync can be diffed cheaply,
  // but nothing renders from stale data: render() keys off connection
  return {
    ...initialModel(),
    connection: "reconnecting",
  };
}
