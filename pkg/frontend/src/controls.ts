/**
 * Editor control logic, kept pure so every control's mapping onto exactly
 * one EditCommand shape is testable without a browser.
 *
 * The semicircular hue palette turns a pointer position into a hue: 0
 * degrees at the left end of the arc, 360 at the right, tracing over the
 * top (the AR original tilted the phone; here the pointer traces the arc).
 */

import type { BehaviorDoc, EditCommand, TriggerDoc, Vec3 } from "./protocol.js";

export interface PaletteGeometry {
  cx: number; // arc center x, px
  cy: number; // arc center y (the flat edge), px
  radius: number;
}

export function hueFromPointer(geometry: PaletteGeometry, x: number, y: number): number {
  const dx = x - geometry.cx;
  const dy = geometry.cy - y; // screen y grows downward; the arc is above the center
  let theta = Math.atan2(dy, dx); // 0 = right, PI = left
  if (theta < 0) theta = dy >= -1e-9 ? 0 : Math.PI; // clamp below the flat edge
  theta = Math.min(Math.max(theta, 0), Math.PI);
  return Math.round(((Math.PI - theta) / Math.PI) * 360);
}

export function pointerFromHue(geometry: PaletteGeometry, hue: number): { x: number; y: number } {
  const theta = Math.PI - (hue / 360) * Math.PI;
  return {
    x: geometry.cx + geometry.radius * Math.cos(theta),
    y: geometry.cy - geometry.radius * Math.sin(theta),
  };
}

/** Brightness slider: plain percent, where 0 *is* off (the engine folds it). */
export function snapBrightness(raw: number): number {
  const clamped = Math.min(Math.max(Math.round(raw), 0), 100);
  return clamped < 3 ? 0 : clamped; // snap the bottom of the slider to off
}

export function clampFanLevel(raw: number): number {
  return Math.min(Math.max(Math.round(raw), 0), 3);
}

// -- control -> command builders (one control, one command shape) --------------

export function hueCommand(scene: number, device: string, hue: number): EditCommand {
  return { op: "upsert_behavior", scene, behavior: { type: "light", device, hue_deg: hue } };
}

export function brightnessCommand(scene: number, device: string, pct: number): EditCommand {
  return { op: "upsert_behavior", scene, behavior: { type: "light", device, brightness_pct: pct } };
}

export function lightEffectCommand(scene: number, device: string, effect: string | null): EditCommand {
  return { op: "upsert_behavior", scene, behavior: { type: "light", device, effect } };
}

export function fanLevelCommand(scene: number, device: string, level: number): EditCommand {
  const behavior: BehaviorDoc = level > 0
    ? { type: "fan", device, on: true, intensity: level }
    : { type: "fan", device, intensity: 0 };
  return { op: "upsert_behavior", scene, behavior };
}

export function soundCommand(scene: number, device: string, sound: string | null): EditCommand {
  return { op: "upsert_behavior", scene, behavior: { type: "speaker", device, sound } };
}

export function volumeCommand(scene: number, device: string, pct: number): EditCommand {
  return { op: "upsert_behavior", scene, behavior: { type: "speaker", device, volume_pct: pct } };
}

export function placeAssetCommand(scene: number, name: string, position: Vec3, anchor?: string): EditCommand {
  return anchor
    ? { op: "place_asset", scene, name, position, anchor }
    : { op: "place_asset", scene, name, position };
}

export function trashAssetCommand(scene: number, asset: string): EditCommand {
  return { op: "upsert_behavior", scene, behavior: { type: "remove", asset } };
}

export function assetEffectCommand(scene: number, asset: string, effect: string | null): EditCommand {
  return { op: "upsert_behavior", scene, behavior: { type: "effect", asset, effect } };
}

export function narrationCommand(scene: number, text: string): EditCommand {
  return { op: "set_narration", scene, text: text === "" ? null : text };
}

export function appendSceneCommand(trigger: TriggerDoc): EditCommand {
  return { op: "append_scene", trigger };
}

export function setTriggerCommand(step: number, trigger: TriggerDoc): EditCommand {
  return { op: "set_trigger", step, trigger };
}

export function deleteSceneCommand(step: number): EditCommand {
  return { op: "delete_scene", step };
}
