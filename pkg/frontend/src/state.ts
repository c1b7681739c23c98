/**
 * ViewState store: a pure reducer over server events plus optimistic
 * local echo for direct control drags.
 *
 * The server is authoritative: every `state_changed` replaces the mirrored
 * state and clears any optimistic value it confirms or contradicts.
 * `fader_moved` ticks update rendered fader positions between state events
 * so motorized recall animates with the server's own trajectory.
 */

import type {
  Command,
  ControlSpec,
  ServerEvent,
  StateDoc,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface Toast {
  id: number;
  text: string;
}

export interface ViewState {
  connection: ConnectionStatus;
  server: StateDoc | null;
  /** direct-drag echo, reconciled away on the next state_changed */
  optimistic: Record<string, number>;
  /** motor tick overlay from fader_moved events */
  motor: Record<string, number>;
  toasts: Toast[];
  lastUnknownKind: string | null;
}

export function initialViewState(): ViewState {
  return {
    connection: "connecting",
    server: null,
    optimistic: {},
    motor: {},
    toasts: [],
    lastUnknownKind: null,
  };
}

let toastCounter = 0;

export function applyServerEvent(view: ViewState, event: unknown): ViewState {
  const record = event as Partial<ServerEvent> & { kind?: string };
  switch (record.kind) {
    case "state_changed": {
      const state = (record as { state: StateDoc }).state;
      return {
        ...view,
        server: state,
        optimistic: {},
        motor: {},
      };
    }
    case "fader_moved": {
      const values = (record as { values: Record<string, number> }).values;
      return { ...view, motor: { ...view.motor, ...values } };
    }
    case "response_ready":
      // the state_changed that follows carries the same data; nothing to do
      return view;
    case "error": {
      const err = record as { error: string; message: string };
      const toast = { id: ++toastCounter, text: `${err.error}: ${err.message}` };
      return { ...view, toasts: [...view.toasts, toast].slice(-5) };
    }
    default:
      // forward compatibility: log and ignore, never break the stream
      console.warn("ignoring unknown event kind", record.kind);
      return { ...view, lastUnknownKind: record.kind ?? null };
  }
}

export function applyLocalEcho(view: ViewState, command: Command): ViewState {
  if (command.kind !== "set_control") return view;
  return {
    ...view,
    optimistic: { ...view.optimistic, [command.id]: command.raw },
  };
}

export function setConnection(
  view: ViewState,
  connection: ConnectionStatus,
): ViewState {
  return { ...view, connection };
}

/** The value a control should render at: optimistic > motor > server. */
export function renderedValue(view: ViewState, id: string): number {
  if (id in view.optimistic) return view.optimistic[id];
  if (id in view.motor) return view.motor[id];
  return view.server?.values[id] ?? 0;
}

// --- interaction -> command normalization ---

/**
 * Fraction is the handle position along the fader track, 0 at the top.
 * Top of the track is the high end (+1 bipolar / 1 polar), matching the
 * protocol: dragging a personality fader to the top sends +1.0.
 */
export function faderDragCommand(
  spec: ControlSpec,
  fraction: number,
): Command {
  const clamped = Math.min(Math.max(fraction, 0), 1);
  const raw =
    spec.kind === "polar-knob"
      ? 1 - clamped
      : 1 - 2 * clamped;
  return { kind: "set_control", id: spec.id, raw };
}

/** Rotary drag over a knob: fraction 0..1 of the sweep, 0 at the left stop. */
export function knobTurnCommand(spec: ControlSpec, fraction: number): Command {
  const clamped = Math.min(Math.max(fraction, 0), 1);
  const raw = spec.kind === "bipolar-knob" ? 2 * clamped - 1 : clamped;
  return { kind: "set_control", id: spec.id, raw };
}

/** Click-step for selector knobs: advance one detent, wrapping. */
export function selectorStepCommand(
  spec: ControlSpec,
  currentIndex: number,
): Command {
  const positions = spec.positions ?? 2;
  return {
    kind: "set_control",
    id: spec.id,
    raw: (currentIndex + 1) % positions,
  };
}

// --- view models consumed by the renderer ---

export interface PanelModel {
  inputText: string;
  responseText: string;
  busy: boolean;
  showPlaceholder: boolean;
}

/** The response panel pairs the submitted input text with the response. */
export function panelModel(view: ViewState): PanelModel {
  const state = view.server;
  const inputText = state?.last_submitted_text ?? "";
  const responseText = state?.last_response ?? "";
  return {
    inputText,
    responseText,
    busy: state?.busy ?? false,
    showPlaceholder: !responseText,
  };
}

export interface FaderModel {
  id: string;
  topLabel: string;
  bottomLabel: string;
  /** handle position as a fraction of track height, 0 = top */
  handleFraction: number;
  value: number;
}

export function faderModel(view: ViewState, spec: ControlSpec): FaderModel {
  const value = renderedValue(view, spec.id);
  const labels = spec.pole_labels ?? ["", ""];
  return {
    id: spec.id,
    // +1 end sits at the top of the track, so the second pole labels it
    topLabel: labels[1] ?? "",
    bottomLabel: labels[0] ?? "",
    handleFraction: (1 - value) / 2,
    value,
  };
}

export function groupedControls(
  specs: ControlSpec[],
): Map<string, ControlSpec[]> {
  const groups = new Map<string, ControlSpec[]>();
  for (const spec of specs) {
    const bucket = groups.get(spec.group) ?? [];
    bucket.push(spec);
    groups.set(spec.group, bucket);
  }
  return groups;
}
