// Shared test fixtures: a layout like the core builds, plus a scripted
// fake socket so sessions run fully headless.

import { SocketLike } from "../src/connect.js";
import { DwellPayload, LayoutPayload, StatePayload } from "../src/protocol.js";

export function makeLayout(): LayoutPayload {
  const templates = Array.from({ length: 10 }, (_, i) => ({
    id: `template_${i}`,
    text: `phrase ${i}`,
    rect: [780, 8 + i * 74, 236, 66] as [number, number, number, number],
  }));
  const letters = "QWERTYUIOPASDFGHJKLZXCVBNM".split("");
  const keys = letters.map((ch, i) => ({
    id: `key_${ch}`,
    rect: [8 + (i % 10) * 74, 430 + Math.floor(i / 10) * 74, 66, 66] as [
      number, number, number, number,
    ],
  }));
  keys.push(
    { id: "key_SPACE", rect: [8, 652, 214, 66] },
    { id: "key_BACKSPACE", rect: [230, 652, 214, 66] },
    { id: "key_CLEAR", rect: [452, 652, 214, 66] },
  );
  return {
    screen_size: [1024, 768],
    templates,
    keys,
    speak: { id: "speak", rect: [8, 340, 300, 70] },
    alarm: { id: "alarm", rect: [316, 340, 300, 70] },
  };
}

export const DWELL: DwellPayload = {
  dwell_time: 1000,
  jitter_radius: 60,
  refractory: 500,
};

export function state(partial: Partial<StatePayload> = {}): StatePayload {
  return {
    composed_text: "",
    alarm_active: false,
    last_spoken: null,
    revision: 0,
    ...partial,
  };
}

export class FakeSocket implements SocketLike {
  onopen: (() => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: (() => void) | null = null;
  readonly sent: string[] = [];
  closedByClient = false;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closedByClient = true;
    this.onclose?.();
  }

  // test-side controls
  open(): void {
    this.onopen?.();
  }

  push(msg: object): void {
    this.onmessage?.({ data: JSON.stringify(msg) + "\n" });
  }

  drop(): void {
    this.onclose?.();
  }
}
