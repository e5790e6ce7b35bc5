/**
 * Play mode: claim a role, read the narration prompt, and drive the story.
 * Typing a line sends a Transcript event, the big button sends a Tap, and
 * clicking a visible asset on the map sends a Touch at that asset's
 * position. The view only moves when the server broadcasts a Transition.
 */

import type { SessionConnection } from "./api.js";
import { RoomView } from "./room.js";
import type { SessionStore } from "./stateStore.js";

export class PlayMode {
  readonly root: HTMLElement;
  readonly room: RoomView;
  private readonly promptEl: HTMLElement;
  private readonly narrationEl: HTMLElement;
  private readonly statusEl: HTMLElement;
  private readonly input: HTMLInputElement;
  private mounted = false;

  constructor(
    document: Document,
    private readonly store: SessionStore,
    private readonly connection: SessionConnection,
  ) {
    this.root = document.createElement("section");
    this.root.className = "play-mode";

    const controls = document.createElement("div");
    controls.className = "play-controls";

    this.promptEl = document.createElement("p");
    this.promptEl.className = "prompt";
    controls.appendChild(this.promptEl);

    this.input = document.createElement("input");
    this.input.type = "text";
    this.input.placeholder = "read the line aloud (type it here)";
    this.input.className = "transcript-input";
    this.input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") this.submitTranscript();
    });
    controls.appendChild(this.input);

    const sendBtn = document.createElement("button");
    sendBtn.className = "send-transcript";
    sendBtn.textContent = "Speak";
    sendBtn.addEventListener("click", () => this.submitTranscript());
    controls.appendChild(sendBtn);

    const tapBtn = document.createElement("button");
    tapBtn.className = "tap-button";
    tapBtn.textContent = "Tap";
    tapBtn.addEventListener("click", () => this.connection.sendEvent({ kind: "tap" }));
    controls.appendChild(tapBtn);

    const roleRow = document.createElement("div");
    roleRow.className = "role-row";
    const narratorBtn = document.createElement("button");
    narratorBtn.className = "claim-narrator";
    narratorBtn.textContent = "Claim narrator";
    narratorBtn.addEventListener("click", () => this.connection.claimRole({ kind: "narrator" }));
    roleRow.appendChild(narratorBtn);
    controls.appendChild(roleRow);

    this.narrationEl = document.createElement("p");
    this.narrationEl.className = "narration";
    controls.appendChild(this.narrationEl);

    this.statusEl = document.createElement("p");
    this.statusEl.className = "status";
    controls.appendChild(this.statusEl);

    this.room = new RoomView(document);
    this.room.setTouchHandler((_assetId, position) => {
      this.connection.sendEvent({ kind: "touch", position });
    });

    this.root.appendChild(this.room.root);
    this.root.appendChild(controls);

    store.subscribe(() => this.render());
  }

  private submitTranscript(): void {
    const text = this.input.value.trim();
    if (!text) return;
    this.connection.sendEvent({ kind: "transcript", text });
    this.input.value = "";
  }

  private render(): void {
    const { store } = this;
    if (!store.story || !store.world) return;
    if (!this.mounted) {
      this.room.mountStory(store.story);
      this.mounted = true;
    }
    if (store.lastPlan.length > 0) {
      this.room.animate(store.world, store.lastPlan);
    } else {
      this.room.renderWorld(store.world);
    }
    const prompt = store.prompt();
    this.promptEl.textContent = prompt ? `Next line: ${prompt}` : "";
    this.narrationEl.textContent = store.narration ?? "";
    const role = store.myRole();
    const scene = store.finished
      ? "story finished"
      : `scene ${store.cursor + 1}/${store.story.steps.length}`;
    const rejection = store.lastRejection ? ` — ${store.lastRejection}` : "";
    this.statusEl.textContent = `${scene} · role: ${role?.kind ?? "none"}${rejection}`;
  }
}
