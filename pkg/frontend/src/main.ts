/** Browser entry point: canvas, key handling, and the websocket. */

import { CockpitClient } from "./client.js";
import { DEFAULT_KEYMAP, InputTracker, KeyMap } from "./input.js";
import { defaultView } from "./view.js";
import { render } from "./render.js";

const KEYMAP_STORAGE_KEY = "gatelab-cockpit-keymap";

function loadKeymap(): KeyMap {
  try {
    const stored = localStorage.getItem(KEYMAP_STORAGE_KEY);
    if (stored !== null) {
      return { ...DEFAULT_KEYMAP, ...JSON.parse(stored) };
    }
  } catch {
    // Fall through to defaults on any storage/parse trouble.
  }
  return DEFAULT_KEYMAP;
}

export function saveKeymap(keymap: KeyMap): void {
  localStorage.setItem(KEYMAP_STORAGE_KEY, JSON.stringify(keymap));
}

export function start(canvas: HTMLCanvasElement, url: string): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) {
    throw new Error("2d canvas context unavailable");
  }
  const view = defaultView(canvas.width, canvas.height);
  const client = new CockpitClient(new InputTracker(loadKeymap()));

  const keys = new Set<string>();
  let drag: { dx: number; dy: number } | null = null;
  let dragging = false;

  window.addEventListener("keydown", (e) => keys.add(e.key));
  window.addEventListener("keyup", (e) => keys.delete(e.key));
  canvas.addEventListener("pointerdown", () => {
    dragging = true;
  });
  window.addEventListener("pointerup", () => {
    dragging = false;
    drag = null;
  });
  canvas.addEventListener("pointermove", (e) => {
    if (dragging) {
      drag = { dx: e.movementX, dy: e.movementY };
    }
  });

  function connect(): void {
    const ws = new WebSocket(url);
    ws.addEventListener("open", () => client.attach(ws));
    ws.addEventListener("message", (e) =>
      client.onMessage(String(e.data), performance.now()),
    );
    ws.addEventListener("close", () => {
      client.detach();
      setTimeout(connect, 1000);
    });
  }
  connect();

  function frame(): void {
    client.pump(keys, drag, performance.now());
    drag = null;
    render(ctx!, client.vm, view, performance.now());
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}
