/**
 * Wire protocol types, mirroring docs/protocol.md (field names and enum
 * spellings are normative there). The client only ever sends Commands and
 * receives Events; it never assembles prompt text.
 */

export type ControlKindTag =
  | "bipolar-fader"
  | "polar-knob"
  | "bipolar-knob"
  | "selector-knob";

export type GroupTag =
  | "system"
  | "modes"
  | "presets"
  | "personality"
  | "filters"
  | "effects";

export interface ControlSpec {
  id: string;
  kind: ControlKindTag;
  group: GroupTag;
  default: number;
  pole_labels?: string[];
  positions?: number;
  position_labels?: string[];
}

export interface TilePlacement {
  row: number;
  col: number;
  word: string;
}

export interface StateDoc {
  revision: number;
  specs: ControlSpec[];
  values: Record<string, number>;
  board: TilePlacement[];
  input_text: string;
  last_submitted_text: string | null;
  last_response: string | null;
  busy: boolean;
  mixerless: boolean;
  mode: string;
  personality_preset: string;
}

export interface ModePresetDoc {
  id: string;
  description: string;
  task_instruction: string;
}

export interface PersonalityPresetDoc {
  id: string;
  description: string;
  fader_targets: Record<string, number>;
}

export interface ConfigDoc {
  controls: ControlSpec[];
  mode_presets: ModePresetDoc[];
  personality_presets: PersonalityPresetDoc[];
  recall: { duration_ms: number; easing: string; tick_interval_ms: number };
  temperature_range: [number, number];
  slate: { rows: number; cols: number };
  vocabulary: string[];
}

// --- Commands (client -> server) ---

export interface SetControlCommand {
  kind: "set_control";
  id: string;
  raw: number;
}

export interface SelectPersonalityPresetCommand {
  kind: "select_personality_preset";
  id: string;
}

export interface SelectModeCommand {
  kind: "select_mode";
  id: string;
}

export interface PlaceTileCommand {
  kind: "place_tile";
  row: number;
  col: number;
  word: string;
}

export interface RemoveTileCommand {
  kind: "remove_tile";
  row: number;
  col: number;
}

export interface SubmitCommand {
  kind: "submit";
}

export interface SetMixerlessCommand {
  kind: "set_mixerless";
  enabled: boolean;
}

export type Command =
  | SetControlCommand
  | SelectPersonalityPresetCommand
  | SelectModeCommand
  | PlaceTileCommand
  | RemoveTileCommand
  | SubmitCommand
  | SetMixerlessCommand;

// --- Events (server -> client) ---

export interface StateChangedEvent {
  kind: "state_changed";
  state: StateDoc;
}

export interface FaderMovedEvent {
  kind: "fader_moved";
  t_ms: number;
  values: Record<string, number>;
}

export interface ResponseReadyEvent {
  kind: "response_ready";
  text: string;
  input_text: string;
}

export interface ErrorEvent {
  kind: "error";
  error: string;
  message: string;
  command: string | null;
}

export type ServerEvent =
  | StateChangedEvent
  | FaderMovedEvent
  | ResponseReadyEvent
  | ErrorEvent;

export const SERVER_EVENT_KINDS = [
  "state_changed",
  "fader_moved",
  "response_ready",
  "error",
] as const;
