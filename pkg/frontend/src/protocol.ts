/**
 * Wire types shared with the story engine: the canonical story document,
 * resolved world state, animation plans, the session WebSocket protocol,
 * and authoring edit commands. These mirror the server's JSON shapes
 * exactly; the browser never invents state of its own.
 */

export type Vec3 = [number, number, number];

export type DeviceKind = "light" | "fan" | "speaker";

export interface DeviceDecl {
  id: string;
  kind: DeviceKind;
  name: string;
  position: Vec3;
}

export interface AssetDecl {
  id: string;
  kind: string;
  name: string;
  position: Vec3;
  half_extent_m: number;
}

export type TriggerDoc =
  | { type: "tap" }
  | { type: "keyword"; phrase: string }
  | { type: "touch"; target: string; threshold_m: number };

export type BehaviorDoc =
  | { type: "light"; device: string; on?: boolean; brightness_pct?: number; hue_deg?: number; effect?: string | null }
  | { type: "fan"; device: string; on?: boolean; intensity?: number }
  | { type: "speaker"; device: string; on?: boolean; volume_pct?: number; sound?: string | null }
  | { type: "place"; asset: string; position: Vec3; anchor?: string }
  | { type: "remove"; asset: string }
  | { type: "effect"; asset: string; effect: string | null };

export interface SceneDoc {
  behaviors: BehaviorDoc[];
  narration?: string;
}

export interface StepDoc {
  trigger: TriggerDoc;
  scene: SceneDoc;
}

export interface StoryDocument {
  format_version: number;
  title: string;
  narrator: "user" | "system";
  devices: DeviceDecl[];
  assets: AssetDecl[];
  initial: SceneDoc;
  steps: StepDoc[];
}

// -- resolved world state ----------------------------------------------------

export interface LightView {
  on: boolean;
  brightness_pct: number;
  hue_deg: number;
  effect: string | null;
}

export interface FanView {
  on: boolean;
  intensity: number;
}

export interface SpeakerView {
  on: boolean;
  volume_pct: number;
  sound: string | null;
}

export interface AssetView {
  present: boolean;
  position: Vec3;
  anchor: string | null;
  effect: string | null;
}

export interface WorldView {
  lights: Record<string, LightView>;
  fans: Record<string, FanView>;
  speakers: Record<string, SpeakerView>;
  assets: Record<string, AssetView>;
}

// -- animation plans -----------------------------------------------------------

export type PlanEffect =
  | { kind: "fade_in"; asset: string; duration_s: number; state: AssetView }
  | { kind: "fade_out"; asset: string; duration_s: number }
  | { kind: "translate"; asset: string; from: Vec3; to: Vec3; duration_s: number; state: AssetView }
  | { kind: "asset_cue"; asset: string; state: AssetView }
  | { kind: "device_cue"; device: string; device_kind: DeviceKind; changes: Record<string, unknown> };

// -- session protocol ------------------------------------------------------------

export interface RoleDoc {
  kind: "narrator" | "actor" | "audience";
  name?: string;
}

export type ServerMessage =
  | {
      type: "snapshot";
      seq: number;
      client_id: string;
      story: StoryDocument;
      cursor: number;
      world: WorldView;
      roles: Record<string, RoleDoc>;
      finished: boolean;
    }
  | { type: "transition"; seq: number; entered_scene: number; plan: PlanEffect[]; narration?: string; finished: boolean }
  | { type: "role_result"; seq: number; ok: boolean; role: RoleDoc; reason: string | null }
  | { type: "roles"; seq: number; roles: Record<string, RoleDoc> }
  | { type: "diagnostic"; seq: number; text: string }
  | { type: "rejected"; seq: number; reason: string | null };

export type ClientEvent =
  | { kind: "transcript"; text: string }
  | { kind: "tap" }
  | { kind: "touch"; position: Vec3 };

export type ClientMessage =
  | { type: "claim_role"; role: RoleDoc }
  | { type: "event"; event: ClientEvent };

// -- authoring edit commands -------------------------------------------------------

export type EditCommand =
  | { op: "append_scene"; trigger: TriggerDoc }
  | { op: "set_trigger"; step: number; trigger: TriggerDoc }
  | { op: "upsert_behavior"; scene: number; behavior: BehaviorDoc }
  | { op: "remove_behavior"; scene: number; target: string }
  | { op: "place_asset"; scene: number; name: string; position: Vec3; anchor?: string }
  | { op: "set_narration"; scene: number; text: string | null }
  | { op: "delete_scene"; step: number };
