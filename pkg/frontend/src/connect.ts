// WebSocket session with auto-reconnect and exponential backoff.
// The socket factory is injectable so tests run fully headless.
// The UI never mutates core state except the pointer_override debug message.

import { parseMessage, PointerOverride, ServerMessage } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface SessionHandlers {
  onMessage(msg: ServerMessage): void;
  onConnect?(): void;
  onDisconnect?(): void;
}

export interface SessionOptions {
  backoffMs?: number;
  backoffMax?: number;
  schedule?: (fn: () => void, ms: number) => void;
}

export class Session {
  private socket: SocketLike | null = null;
  private closed = false;
  private backoff: number;
  readonly sent: string[] = [];

  constructor(
    private url: string,
    private handlers: SessionHandlers,
    private factory: SocketFactory,
    private options: SessionOptions = {},
  ) {
    this.backoff = options.backoffMs ?? 250;
  }

  start(): void {
    if (this.closed) return;
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.backoff = this.options.backoffMs ?? 250;
      this.handlers.onConnect?.();
    };
    socket.onmessage = (ev) => {
      const msg = parseMessage(ev.data);
      if (msg) this.handlers.onMessage(msg);
    };
    socket.onclose = () => {
      this.socket = null;
      this.handlers.onDisconnect?.();
      if (this.closed) return;
      const delay = this.backoff;
      this.backoff = Math.min(this.backoff * 2, this.options.backoffMax ?? 5000);
      const schedule = this.options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
      schedule(() => this.start(), delay);
    };
  }

  pointerOverride(x: number, y: number, t?: number): void {
    const msg: PointerOverride = { kind: "pointer_override", x, y, ...(t !== undefined && { t }) };
    const data = JSON.stringify(msg);
    this.sent.push(data);
    this.socket?.send(data);
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}

export function connect(
  url: string,
  handlers: SessionHandlers,
  factory?: SocketFactory,
  options?: SessionOptions,
): Session {
  const makeSocket: SocketFactory =
    factory ?? ((u) => new WebSocket(u) as unknown as SocketLike);
  const session = new Session(url, handlers, makeSocket, options);
  session.start();
  return session;
}
