import { describe, expect, it } from "vitest";

import { applyMessage, initialModel } from "../src/model.js";
import { countByClass, findByRole, render } from "../src/view.js";
import { DWELL, makeLayout, state } from "./helpers.js";

function modelWith(...msgs: object[]) {
  let m = initialModel();
  m = applyMessage(m, { kind: "layout", layout: makeLayout(), dwell: DWELL });
  m = applyMessage(m, { kind: "state_sync", state: state() });
  for (const msg of msgs) m = applyMessage(m, msg as never);
  return m;
}

describe("render", () => {
  it("shows a connecting splash before the layout arrives", () => {
    const tree = render(initialModel());
    expect(tree.attrs.class).toBe("splash");
  });

  it("renders exactly 10 template buttons in the right-hand column", () => {
    const tree = render(modelWith());
    expect(countByClass(tree, "template")).toBe(10);
    const templates = tree.children.filter((c) =>
      c.attrs.class?.includes("template"),
    );
    for (const t of templates) {
      expect(t.attrs.style).toContain("left:780px");
    }
  });

  it("renders the keyboard grid and action buttons", () => {
    const tree = render(modelWith());
    expect(countByClass(tree, "key")).toBe(29); // 26 letters + space/backspace/clear
    expect(countByClass(tree, "speak")).toBe(1);
    expect(countByClass(tree, "alarm")).toBe(1);
  });

  it("mirrors composed text in the text field", () => {
    const tree = render(
      modelWith({ kind: "state_sync", state: state({ composed_text: "HELP", revision: 4 }) }),
    );
    expect(findByRole(tree, "composed-text")?.text).toBe("HELP");
  });

  it("shows the alarm latched then cleared", () => {
    const on = render(modelWith({ kind: "alarm_on" }));
    const alarmOn = on.children.find((c) => c.attrs.class?.includes("alarm"));
    expect(alarmOn?.attrs.class).toContain("active");
    expect(alarmOn?.text).toBe("Alarm ON");
    const off = render(modelWith({ kind: "alarm_on" }, { kind: "alarm_off" }));
    const alarmOff = off.children.find((c) => c.attrs.class?.includes("alarm"));
    expect(alarmOff?.attrs.class).not.toContain("active");
  });

  it("draws the cursor dot at the last cursor message", () => {
    const tree = render(modelWith({ kind: "cursor", x: 123, y: 45, t: 10, valid: true }));
    const dot = tree.children.find((c) => c.attrs.class === "cursor-dot");
    expect(dot?.attrs.style).toBe("left:123px;top:45px");
  });

  it("fills the dwell ring proportionally to hover time", () => {
    const tree = render(
      modelWith(
        { kind: "cursor", x: 790, y: 20, t: 0, valid: true },
        { kind: "cursor", x: 790, y: 20, t: 500, valid: true },
      ),
    );
    const ring = tree.children.find((c) => c.attrs.class === "dwell-ring");
    expect(ring?.attrs["data-target"]).toBe("template_0");
    expect(ring?.attrs["data-progress"]).toBe("0.500");
    expect(ring?.attrs.style).toContain("--progress:180.0deg");
  });

  it("renders identically from identical models (stateless view)", () => {
    const a = render(modelWith({ kind: "cursor", x: 10, y: 10, t: 5, valid: true }));
    const b = render(modelWith({ kind: "cursor", x: 10, y: 10, t: 5, valid: true }));
    expect(a).toEqual(b);
  });
});
