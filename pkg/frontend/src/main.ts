// Browser entry point: connect to the core, mirror its messages, render.
// Endpoint via ?ws=ws://host:port/ws (defaults to the serving host).
// Holding the mouse down acts as the pointer-override debug fallback.

import { connect } from "./connect.js";
import { applyMessage, initialModel, onDisconnect, UiModel } from "./model.js";
import { mount } from "./dom.js";
import { render } from "./view.js";

const params = new URLSearchParams(window.location.search);
const endpoint =
  params.get("ws") ?? `ws://${window.location.host}/ws`;

const container = document.getElementById("app") as HTMLElement;
let model: UiModel = initialModel();
const started = performance.now();

function redraw(): void {
  mount(render(model), container);
}

const session = connect(endpoint, {
  onMessage(msg) {
    model = applyMessage(model, msg);
    redraw();
  },
  onConnect() {
    model = { ...model, connection: "connected" };
    redraw();
  },
  onDisconnect() {
    model = onDisconnect(model);
    redraw();
  },
});

let mouseDown = false;
container.addEventListener("mousedown", () => (mouseDown = true));
container.addEventListener("mouseup", () => (mouseDown = false));
container.addEventListener("mousemove", (ev) => {
  if (!mouseDown) return;
  const rect = container.getBoundingClientRect();
  session.pointerOverride(
    ev.clientX - rect.left,
    ev.clientY - rect.top,
    Math.round(performance.now() - started),
  );
});

redraw();
