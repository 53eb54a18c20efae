// Pure rendering: UiModel -> a plain virtual tree. The DOM adapter realizes
// it; headless tests assert on the tree directly.

import { RegionPayload } from "./protocol.js";
import { UiModel } from "./model.js";

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: VNode[];
  text?: string;
}

function node(
  tag: string,
  attrs: Record<string, string> = {},
  children: VNode[] = [],
  text?: string,
): VNode {
  return { tag, attrs, children, text };
}

function px(v: number): string {
  return `${v}px`;
}

function place(region: RegionPayload): string {
  const [x, y, w, h] = region.rect;
  return `left:${px(x)};top:${px(y)};width:${px(w)};height:${px(h)}`;
}

export function render(model: UiModel): VNode {
  if (!model.layout || !model.state) {
    return node("div", { class: "splash" }, [
      node("p", {}, [], "connecting to the gaze core..."),
    ]);
  }
  const layout = model.layout;
  const state = model.state;

  const templates = layout.templates.map((t) =>
    node(
      "button",
      { class: "template", "data-id": t.id, style: place(t) },
      [],
      t.text,
    ),
  );
  const keys = layout.keys.map((k) =>
    node(
      "button",
      { class: "key", "data-id": k.id, style: place(k) },
      [],
      k.id.replace(/^key_/, ""),
    ),
  );
  const speak = node(
    "button",
    { class: "speak", "data-id": layout.speak.id, style: place(layout.speak) },
    [],
    "Speak",
  );
  const alarm = node(
    "button",
    {
      class: model.state.alarm_active ? "alarm active" : "alarm",
      "data-id": layout.alarm.id,
      style: place(layout.alarm),
    },
    [],
    state.alarm_active ? "Alarm ON" : "Alarm",
  );
  const textField = node(
    "div",
    { class: "composed", "data-role": "composed-text" },
    [],
    state.composed_text,
  );

  const overlay = [];
  if (model.cursor) {
    overlay.push(
      node("div", {
        class: "cursor-dot",
        style: `left:${px(model.cursor.x)};top:${px(model.cursor.y)}`,
      }),
    );
    if (model.hoverTarget) {
      overlay.push(
        node("div", {
          class: "dwell-ring",
          "data-target": model.hoverTarget,
          "data-progress": model.dwellProgress.toFixed(3),
          style:
            `left:${px(model.cursor.x)};top:${px(model.cursor.y)};` +
            `--progress:${(model.dwellProgress * 360).toFixed(1)}deg`,
        }),
      );
    }
  }

  return node(
    "div",
    {
      class: "board",
      style: `width:${px(layout.screen_size[0])};height:${px(layout.screen_size[1])}`,
    },
    [textField, ...templates, ...keys, speak, alarm, ...overlay],
  );
}

export function countByClass(tree: VNode, cls: string): number {
  const own = tree.attrs.class?.split(" ").includes(cls) ? 1 : 0;
  return own + tree.children.reduce((acc, c) => acc + countByClass(c, cls), 0);
}

export function findByRole(tree: VNode, role: string): VNode | null {
  if (tree.attrs["data-role"] === role) return tree;
  for (const child of tree.children) {
    const hit = findByRole(child, role);
    if (hit) return hit;
  }
  return null;
}
