/**
 * DOM renderer for the virtual console.
 *
 * Pure view-model computation lives in state.ts; this module only binds
 * those models to elements. The whole console re-renders on every state
 * change except while a drag is in progress on a control, whose element
 * follows the pointer (optimistic echo) until the server confirms.
 */

import type { Command, ConfigDoc, ControlSpec } from "./protocol.js";
import {
  faderDragCommand,
  faderModel,
  groupedControls,
  knobTurnCommand,
  panelModel,
  renderedValue,
  selectorStepCommand,
  type ViewState,
} from "./state.js";

export interface RenderContext {
  root: HTMLElement;
  config: ConfigDoc;
  send: (command: Command) => void;
}

const GROUP_CAPTIONS: Record<string, string> = {
  system: "system",
  modes: "modes",
  presets: "presets",
  personality: "personality",
  filters: "filters",
  effects: "effects",
};

let dragging: string | null = null;
let pendingWord: string | null = null;

export function render(context: RenderContext, view: ViewState): void {
  const { root, config } = context;
  root.innerHTML = "";
  root.appendChild(banner(view));
  const deck = el("div", "deck");
  deck.appendChild(knobColumn(context, view));
  deck.appendChild(faderBank(context, view));
  deck.appendChild(slatePanel(context, view));
  root.appendChild(deck);
  root.appendChild(responsePanel(context, view));
  root.appendChild(toastRack(view));
}

function banner(view: ViewState): HTMLElement {
  const node = el("div", `banner banner-${view.connection}`);
  node.textContent =
    view.connection === "connected"
      ? "console online"
      : view.connection === "connecting"
        ? "connecting…"
        : "disconnected — showing last known state";
  return node;
}

function knobColumn(context: RenderContext, view: ViewState): HTMLElement {
  const column = el("div", "knob-column");
  const groups = groupedControls(view.server?.specs ?? context.config.controls);
  for (const group of ["system", "modes", "presets", "filters", "effects"]) {
    const specs = groups.get(group) ?? [];
    if (group === "system" && specs.length === 0) continue;
    const cluster = el("fieldset", `cluster cluster-${group}`);
    const legend = document.createElement("legend");
    legend.textContent = GROUP_CAPTIONS[group] ?? group;
    cluster.appendChild(legend);
    for (const spec of specs) {
      cluster.appendChild(
        spec.kind === "selector-knob"
          ? selectorKnob(context, view, spec)
          : rotaryKnob(context, view, spec),
      );
    }
    if (group === "presets") cluster.appendChild(mixerlessSwitch(context, view));
    column.appendChild(cluster);
  }
  return column;
}

function selectorKnob(
  context: RenderContext,
  view: ViewState,
  spec: ControlSpec,
): HTMLElement {
  const index = Math.round(renderedValue(view, spec.id));
  const labels = spec.position_labels ?? [];
  const wrap = el("div", "knob selector-knob");
  wrap.dataset.control = spec.id;
  const dial = el("button", "dial");
  dial.setAttribute("aria-label", spec.id);
  const sweep = 270 * (index / Math.max((spec.positions ?? 2) - 1, 1)) - 135;
  dial.style.transform = `rotate(${sweep}deg)`;
  // selector knobs step between detents; no free rotation
  dial.addEventListener("click", () =>
    context.send(selectorStepCommand(spec, index)),
  );
  wrap.appendChild(dial);
  wrap.appendChild(caption(labels[index] ?? String(index)));
  if (spec.id === "personality_preset") {
    const row = el("div", "preset-buttons");
    labels.forEach((label, i) => {
      const button = el("button", i === index ? "preset active" : "preset");
      button.textContent = label;
      button.dataset.preset = label;
      button.addEventListener("click", () =>
        context.send({ kind: "select_personality_preset", id: label }),
      );
      row.appendChild(button);
    });
    wrap.appendChild(row);
  }
  if (spec.id === "mode") {
    const row = el("div", "preset-buttons");
    labels.forEach((label, i) => {
      const button = el("button", i === index ? "preset active" : "preset");
      button.textContent = label;
      button.addEventListener("click", () =>
        context.send({ kind: "select_mode", id: label }),
      );
      row.appendChild(button);
    });
    wrap.appendChild(row);
  }
  return wrap;
}

function rotaryKnob(
  context: RenderContext,
  view: ViewState,
  spec: ControlSpec,
): HTMLElement {
  const value = renderedValue(view, spec.id);
  const fraction =
    spec.kind === "bipolar-knob" ? (value + 1) / 2 : value;
  const wrap = el("div", "knob rotary-knob");
  wrap.dataset.control = spec.id;
  const dial = el("div", "dial");
  dial.style.transform = `rotate(${fraction * 270 - 135}deg)`;
  attachVerticalDrag(dial, (dragFraction) => {
    context.send(knobTurnCommand(spec, dragFraction));
  });
  wrap.appendChild(dial);
  const labels = spec.pole_labels ?? [];
  wrap.appendChild(caption(labels.join(" — ") || spec.id));
  return wrap;
}

function mixerlessSwitch(context: RenderContext, view: ViewState): HTMLElement {
  const on = view.server?.mixerless ?? false;
  const wrap = el("div", "knob mixerless-switch");
  const button = el("button", on ? "switch on" : "switch");
  button.textContent = on ? "mixerless" : "mixer";
  button.addEventListener("click", () =>
    context.send({ kind: "set_mixerless", enabled: !on }),
  );
  wrap.appendChild(button);
  wrap.appendChild(caption("mixer bypass"));
  return wrap;
}

function faderBank(context: RenderContext, view: ViewState): HTMLElement {
  const bank = el("fieldset", "cluster fader-bank");
  const legend = document.createElement("legend");
  legend.textContent = GROUP_CAPTIONS.personality;
  bank.appendChild(legend);
  const groups = groupedControls(view.server?.specs ?? context.config.controls);
  for (const spec of groups.get("personality") ?? []) {
    bank.appendChild(faderWidget(context, view, spec));
  }
  return bank;
}

function faderWidget(
  context: RenderContext,
  view: ViewState,
  spec: ControlSpec,
): HTMLElement {
  const model = faderModel(view, spec);
  const wrap = el("div", "fader");
  wrap.dataset.control = spec.id;
  wrap.appendChild(caption(model.topLabel));
  const track = el("div", "fader-track");
  const handle = el("div", "fader-handle");
  handle.style.top = `${model.handleFraction * 100}%`;
  track.appendChild(handle);
  attachTrackDrag(track, spec.id, (fraction) => {
    context.send(faderDragCommand(spec, fraction));
  });
  wrap.appendChild(track);
  wrap.appendChild(caption(model.bottomLabel));
  return wrap;
}

function slatePanel(context: RenderContext, view: ViewState): HTMLElement {
  const { config } = context;
  const panel = el("fieldset", "cluster slate-panel");
  const legend = document.createElement("legend");
  legend.textContent = "slate";
  panel.appendChild(legend);

  const board = new Map<string, string>();
  for (const tile of view.server?.board ?? []) {
    board.set(`${tile.row},${tile.col}`, tile.word);
  }
  const grid = el("div", "slate-grid");
  grid.style.gridTemplateColumns = `repeat(${config.slate.cols}, 1fr)`;
  for (let row = 0; row < config.slate.rows; row++) {
    for (let col = 0; col < config.slate.cols; col++) {
      const cell = el("div", "slate-cell");
      const word = board.get(`${row},${col}`);
      if (word) {
        const tile = el("span", "tile");
        tile.textContent = word;
        cell.appendChild(tile);
        cell.addEventListener("click", () =>
          context.send({ kind: "remove_tile", row, col }),
        );
      } else {
        cell.addEventListener("dragover", (e) => e.preventDefault());
        cell.addEventListener("drop", (e) => {
          e.preventDefault();
          const word =
            (e as DragEvent).dataTransfer?.getData("text/plain") || pendingWord;
          if (word) context.send({ kind: "place_tile", row, col, word });
          pendingWord = null;
        });
        cell.addEventListener("click", () => {
          if (pendingWord) {
            context.send({ kind: "place_tile", row, col, word: pendingWord });
            pendingWord = null;
          }
        });
      }
      grid.appendChild(cell);
    }
  }
  panel.appendChild(grid);

  const tray = el("div", "tray");
  for (const word of config.vocabulary.slice(0, 120)) {
    const tile = el("span", "tile tray-tile");
    tile.textContent = word;
    tile.draggable = true;
    tile.addEventListener("dragstart", (e) =>
      (e as DragEvent).dataTransfer?.setData("text/plain", word),
    );
    tile.addEventListener("click", () => {
      pendingWord = word;
    });
    tray.appendChild(tile);
  }
  panel.appendChild(tray);
  return panel;
}

function responsePanel(context: RenderContext, view: ViewState): HTMLElement {
  const model = panelModel(view);
  const panel = el("div", "response-panel");
  const input = el("div", "panel-input");
  input.textContent = model.inputText;
  const output = el("div", "panel-response");
  output.textContent = model.showPlaceholder
    ? model.busy
      ? "…"
      : ""
    : model.responseText;
  panel.appendChild(input);
  panel.appendChild(output);
  const submit = el("button", "submit") as HTMLButtonElement;
  submit.textContent = model.busy ? "thinking…" : "submit";
  submit.disabled = model.busy;
  submit.addEventListener("click", () => context.send({ kind: "submit" }));
  panel.appendChild(submit);
  return panel;
}

function toastRack(view: ViewState): HTMLElement {
  const rack = el("div", "toasts");
  for (const toast of view.toasts) {
    const node = el("div", "toast");
    node.textContent = toast.text;
    rack.appendChild(node);
  }
  return rack;
}

// --- drag plumbing ---

function attachTrackDrag(
  track: HTMLElement,
  controlId: string,
  onFraction: (fraction: number) => void,
): void {
  const report = (event: PointerEvent) => {
    const rect = track.getBoundingClientRect();
    onFraction((event.clientY - rect.top) / Math.max(rect.height, 1));
  };
  track.addEventListener("pointerdown", (event) => {
    dragging = controlId;
    track.setPointerCapture(event.pointerId);
    report(event);
  });
  track.addEventListener("pointermove", (event) => {
    if (dragging === controlId) report(event);
  });
  track.addEventListener("pointerup", () => {
    dragging = null;
  });
}

function attachVerticalDrag(
  dial: HTMLElement,
  onFraction: (fraction: number) => void,
): void {
  let startY = 0;
  let startFraction = 0.5;
  dial.addEventListener("pointerdown", (event) => {
    startY = event.clientY;
    const match = /rotate\((-?\d+\.?\d*)deg\)/.exec(dial.style.transform);
    startFraction = match ? (parseFloat(match[1]) + 135) / 270 : 0.5;
    dial.setPointerCapture(event.pointerId);
    dragging = "knob";
  });
  dial.addEventListener("pointermove", (event) => {
    if (dragging !== "knob") return;
    const delta = (startY - event.clientY) / 150; // 150 px for full sweep
    onFraction(Math.min(Math.max(startFraction + delta, 0), 1));
  });
  dial.addEventListener("pointerup", () => {
    dragging = null;
  });
}

function caption(text: string): HTMLElement {
  const node = el("div", "caption");
  node.textContent = text;
  return node;
}

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}

export function isDragInProgress(): boolean {
  return dragging !== null;
}
