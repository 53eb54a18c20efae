import { describe, expect, it } from "vitest";

import { connect, SocketLike } from "../src/connect.js";
import { ServerMessage } from "../src/protocol.js";
import { FakeSocket } from "./helpers.js";

function harness() {
  const sockets: FakeSocket[] = [];
  const scheduled: Array<{ fn: () => void; ms: number }> = [];
  const received: ServerMessage[] = [];
  const events: string[] = [];
  const session = connect(
    "ws://test/ws",
    {
      onMessage: (m) => received.push(m),
      onConnect: () => events.push("connect"),
      onDisconnect: () => events.push("disconnect"),
    },
    (() => {
      const s = new FakeSocket();
      sockets.push(s);
      return s as SocketLike;
    }),
    { backoffMs: 100, backoffMax: 1000, schedule: (fn, ms) => scheduled.push({ fn, ms }) },
  );
  return { session, sockets, scheduled, received, events };
}

describe("session", () => {
  it("delivers parsed messages to the handler", () => {
    const h = harness();
    h.sockets[0].open();
    h.sockets[0].push({ kind: "alarm_on" });
    expect(h.received).toEqual([{ kind: "alarm_on" }]);
  });

  it("reconnects with exponential backoff after a drop", () => {
    const h = harness();
    h.sockets[0].open();
    h.sockets[0].drop();
    expect(h.events).toEqual(["connect", "disconnect"]);
    expect(h.scheduled.map((s) => s.ms)).toEqual([100]);
    h.scheduled[0].fn(); // reconnect attempt
    expect(h.sockets).toHaveLength(2);
    h.sockets[1].drop(); // fails again: backoff doubles
    expect(h.scheduled.map((s) => s.ms)).toEqual([100, 200]);
    h.scheduled[1].fn();
    h.sockets[2].open(); // success resets the backoff
    h.sockets[2].drop();
    expect(h.scheduled.map((s) => s.ms)).toEqual([100, 200, 100]);
  });

  it("stops reconnecting once closed", () => {
    const h = harness();
    h.sockets[0].open();
    h.session.close();
    expect(h.scheduled).toHaveLength(0);
    expect(h.sockets).toHaveLength(1);
  });

  it("sends nothing but pointer_override", () => {
    const h = harness();
    h.sockets[0].open();
    h.sockets[0].push({ kind: "layout", layout: {}, dwell: {} });
    h.sockets[0].push({ kind: "cursor", x: 1, y: 2, t: 3, valid: true });
    expect(h.sockets[0].sent).toEqual([]);
    h.session.pointerOverride(10, 20, 30);
    expect(h.sockets[0].sent).toHaveLength(1);
    const sent = JSON.parse(h.sockets[0].sent[0]);
    expect(sent).toEqual({ kind: "pointer_override", x: 10, y: 20, t: 30 });
    // never any click-like message
    for (const raw of h.session.sent) {
      expect(JSON.parse(raw).kind).toBe("pointer_override");
    }
  });

  it("survives malformed frames", () => {
    const h = harness();
    h.sockets[0].open();
    h.sockets[0].onmessage?.({ data: "garbage{{{" });
    h.sockets[0].push({ kind: "alarm_off" });
    expect(h.received).toEqual([{ kind: "alarm_off" }]);
  });
});
