/**
 * Server-authoritative session state.
 *
 * The store only ever changes in response to server messages: a Snapshot
 * replaces everything (first join and reconnects), a Transition folds its
 * animation plan into the world. Nothing in the UI may simulate a
 * transition locally, so a late joiner and a client present from the start
 * converge on identical views.
 */

import type {
  PlanEffect, RoleDoc, ServerMessage, StoryDocument, WorldView,
} from "./protocol.js";

export type StoreListener = (store: SessionStore) => void;

function deepCopy<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

export function foldPlan(world: WorldView, plan: PlanEffect[]): WorldView {
  const next = deepCopy(world);
  for (const effect of plan) {
    switch (effect.kind) {
      case "fade_in":
      case "translate":
      case "asset_cue":
        next.assets[effect.asset] = deepCopy(effect.state);
        break;
      case "fade_out": {
        const asset = next.assets[effect.asset];
        if (asset) asset.present = false;
        break;
      }
      case "device_cue": {
        if (effect.device_kind === "light") {
          const state = next.lights[effect.device];
          if (!state) break;
          Object.assign(state, effect.changes);
          if (state.brightness_pct === 0) state.on = false;
        } else if (effect.device_kind === "fan") {
          const state = next.fans[effect.device];
          if (!state) break;
          Object.assign(state, effect.changes);
          if (state.intensity === 0) state.on = false;
        } else {
          const state = next.speakers[effect.device];
          if (!state) break;
          Object.assign(state, effect.changes);
        }
        break;
      }
    }
  }
  return next;
}

export class SessionStore {
  story: StoryDocument | null = null;
  world: WorldView | null = null;
  cursor = -1;
  finished = false;
  clientId = "";
  roles: Record<string, RoleDoc> = {};
  narration: string | null = null;
  diagnostics: string[] = [];
  lastPlan: PlanEffect[] = [];
  lastRejection: string | null = null;

  private listeners: StoreListener[] = [];

  subscribe(listener: StoreListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this);
  }

  /** The single entry point for state change; everything else is read-only. */
  applyServerMessage(message: ServerMessage): void {
    switch (message.type) {
      case "snapshot":
        this.story = message.story;
        this.world = deepCopy(message.world);
        this.cursor = message.cursor;
        this.finished = message.finished;
        this.clientId = message.client_id;
        this.roles = message.roles;
        this.narration = null;
        this.lastPlan = [];
        break;
      case "transition":
        if (this.world) this.world = foldPlan(this.world, message.plan);
        this.cursor = message.entered_scene;
        this.finished = message.finished;
        this.narration = message.narration ?? null;
        this.lastPlan = message.plan;
        break;
      case "roles":
        this.roles = message.roles;
        break;
      case "role_result":
        if (!message.ok) this.lastRejection = message.reason ?? "role conflict";
        break;
      case "rejected":
        this.lastRejection = message.reason ?? "rejected";
        break;
      case "diagnostic":
        this.diagnostics.push(message.text);
        break;
    }
    this.emit();
  }

  myRole(): RoleDoc | null {
    return this.roles[this.clientId] ?? null;
  }

  /** Story line to read next: the upcoming step's narration, if any. */
  prompt(): string | null {
    if (!this.story || this.finished) return null;
    const next = this.story.steps[this.cursor + 1];
    return next?.scene.narration ?? null;
  }
}
