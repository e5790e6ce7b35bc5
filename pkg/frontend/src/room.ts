/**
 * 2D top-down room map. World positions reuse the engine's Vec3 with the
 * y (height) axis ignored in projection: the map plane is x across, z down.
 * Devices render as fixed icons with live state badges; assets render as
 * dots that fade and glide according to the animation plan durations.
 */

import type {
  AssetView, FanView, LightView, PlanEffect, SpeakerView, StoryDocument, Vec3, WorldView,
} from "./protocol.js";

export interface MapGeometry {
  width: number;
  height: number;
  worldMin: number; // world x/z covered by the map edge
  worldMax: number;
}

export const DEFAULT_GEOMETRY: MapGeometry = { width: 480, height: 480, worldMin: -3.5, worldMax: 3.5 };

export function project(geometry: MapGeometry, position: Vec3): { x: number; y: number } {
  const span = geometry.worldMax - geometry.worldMin;
  return {
    x: ((position[0] - geometry.worldMin) / span) * geometry.width,
    y: ((position[2] - geometry.worldMin) / span) * geometry.height,
  };
}

export function unproject(geometry: MapGeometry, x: number, y: number, worldY: number): Vec3 {
  const span = geometry.worldMax - geometry.worldMin;
  const wx = geometry.worldMin + (x / geometry.width) * span;
  const wz = geometry.worldMin + (y / geometry.height) * span;
  return [round2(wx), worldY, round2(wz)];
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

export function lightBadge(state: LightView): string {
  if (!state.on) return "OFF";
  const effect = state.effect ? ` ${state.effect}` : "";
  return `${state.brightness_pct}%${effect}`;
}

export function fanBadge(state: FanView): string {
  return state.on ? `level ${state.intensity}` : "OFF";
}

export function speakerBadge(state: SpeakerView): string {
  if (!state.on) return "OFF";
  return state.sound ? `♪ ${state.sound}` : "silent";
}

const DEVICE_GLYPH: Record<string, string> = { light: "☀", fan: "❊", speaker: "♫" };

export type TouchHandler = (assetId: string, position: Vec3) => void;

export class RoomView {
  readonly root: HTMLElement;
  private readonly geometry: MapGeometry;
  private onTouch: TouchHandler | null = null;
  private deviceEls = new Map<string, HTMLElement>();
  private assetEls = new Map<string, HTMLElement>();
  private assetPositions = new Map<string, Vec3>();

  constructor(document: Document, geometry: MapGeometry = DEFAULT_GEOMETRY) {
    this.geometry = geometry;
    this.root = document.createElement("div");
    this.root.className = "room-map";
    this.root.style.position = "relative";
    this.root.style.width = `${geometry.width}px`;
    this.root.style.height = `${geometry.height}px`;
  }

  setTouchHandler(handler: TouchHandler): void {
    this.onTouch = handler;
  }

  mountStory(story: StoryDocument): void {
    this.root.textContent = "";
    this.deviceEls.clear();
    this.assetEls.clear();
    this.assetPositions.clear();
    const doc = this.root.ownerDocument;
    for (const device of story.devices) {
      const el = doc.createElement("div");
      el.className = `device device-${device.kind}`;
      el.dataset.deviceId = device.id;
      const { x, y } = project(this.geometry, device.position);
      el.style.position = "absolute";
      el.style.left = `${x}px`;
      el.style.top = `${y}px`;
      el.innerHTML = `<span class="glyph">${DEVICE_GLYPH[device.kind] ?? "?"}</span>` +
        `<span class="label">${device.name}</span> <span class="badge"></span>`;
      this.root.appendChild(el);
      this.deviceEls.set(device.id, el);
    }
    for (const asset of story.assets) {
      const el = doc.createElement("div");
      el.className = "asset";
      el.dataset.assetId = asset.id;
      el.style.position = "absolute";
      el.style.opacity = "0";
      el.title = asset.name;
      el.textContent = "●";
      el.addEventListener("click", () => {
        const position = this.assetPositions.get(asset.id);
        if (position && el.style.opacity !== "0" && this.onTouch) {
          this.onTouch(asset.id, position);
        }
      });
      this.root.appendChild(el);
      this.assetEls.set(asset.id, el);
    }
  }

  /** Redraw every badge and asset from the authoritative world. */
  renderWorld(world: WorldView): void {
    for (const [id, el] of this.deviceEls) {
      const badge = el.querySelector(".badge");
      if (!badge) continue;
      if (world.lights[id]) badge.textContent = lightBadge(world.lights[id]);
      else if (world.fans[id]) badge.textContent = fanBadge(world.fans[id]);
      else if (world.speakers[id]) badge.textContent = speakerBadge(world.speakers[id]);
    }
    for (const [id, el] of this.assetEls) {
      const state = world.assets[id];
      if (!state) continue;
      this.placeAsset(el, id, state);
      el.style.opacity = state.present ? "1" : "0";
    }
  }

  /** Apply one transition's effects with their authored durations. */
  animate(world: WorldView, plan: PlanEffect[]): void {
    this.renderWorld(world);
    for (const effect of plan) {
      if (effect.kind === "device_cue") continue; // immediate, badge already updated
      const el = this.assetEls.get(effect.asset);
      if (!el) continue;
      if (effect.kind === "fade_in" || effect.kind === "fade_out") {
        el.style.transitionProperty = "opacity";
        el.style.transitionDuration = `${effect.duration_s}s`;
      } else if (effect.kind === "translate") {
        el.style.transitionProperty = "left, top";
        el.style.transitionDuration = `${effect.duration_s}s`;
      }
    }
  }

  private placeAsset(el: HTMLElement, id: string, state: AssetView): void {
    const { x, y } = project(this.geometry, state.position);
    el.style.left = `${x}px`;
    el.style.top = `${y}px`;
    this.assetPositions.set(id, state.position);
  }
}
