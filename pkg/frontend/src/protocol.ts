// Wire protocol types: newline-terminated JSON messages over a local
// WebSocket. The UI only consumes; the lone permitted outbound message is
// the pointer_override debug fallback.

export interface RegionPayload {
  id: string;
  rect: [number, number, number, number]; // x, y, w, h
}

export interface TemplatePayload extends RegionPayload {
  text: string;
}

export interface LayoutPayload {
  screen_size: [number, number];
  templates: TemplatePayload[];
  keys: RegionPayload[];
  speak: RegionPayload;
  alarm: RegionPayload;
}

export interface DwellPayload {
  dwell_time: number;
  jitter_radius: number;
  refractory: number;
}

export interface StatePayload {
  composed_text: string;
  alarm_active: boolean;
  last_spoken: string | null;
  revision: number;
}

export type ServerMessage =
  | { kind: "layout"; layout: LayoutPayload; dwell: DwellPayload }
  | { kind: "state_sync"; state: StatePayload }
  | { kind: "cursor"; x: number; y: number; t: number; valid: boolean }
  | { kind: "speak"; text: string }
  | { kind: "alarm_on" }
  | { kind: "alarm_off" };

export interface PointerOverride {
  kind: "pointer_override";
  x: number;
  y: number;
  t?: number;
}

export function parseMessage(raw: string): ServerMessage | null {
  try {
    const msg = JSON.parse(raw);
    if (typeof msg === "object" && msg !== null && typeof msg.kind === "string") {
      return msg as ServerMessage;
    }
  } catch {
    // fall through: malformed frames are dropped, never crash the UI
  }
  return null;
}
