// Minimal DOM adapter: realize a virtual tree into a container.
// Full re-render per message is fine at protocol rates (<= 60 cursor/s).

import { VNode } from "./view.js";

export function realize(vnode: VNode, doc: Document): HTMLElement {
  const el = doc.createElement(vnode.tag);
  for (const [key, value] of Object.entries(vnode.attrs)) {
    el.setAttribute(key, value);
  }
  if (vnode.text !== undefined) {
    el.textContent = vnode.text;
  }
  for (const child of vnode.children) {
    el.appendChild(realize(child, doc));
  }
  return el;
}

export function mount(vnode: VNode, container: HTMLElement): void {
  const doc = container.ownerDocument;
  container.replaceChildren(realize(vnode, doc));
}
