/**
 * Author mode: a scene timeline plus per-scene editors. Every control emits
 * exactly one EditCommand through the authoring API; the document that
 * comes back re-renders the editor, so the authored story is always the
 * server's revision, never a local guess. Rejected edits surface inline
 * with the validation issue's path.
 */

import type { AuthoringApi } from "./api.js";
import { ApiError } from "./api.js";
import {
  appendSceneCommand, brightnessCommand, clampFanLevel, fanLevelCommand, hueCommand,
  hueFromPointer, narrationCommand, placeAssetCommand, snapBrightness, soundCommand,
  trashAssetCommand, PaletteGeometry,
} from "./controls.js";
import { DEFAULT_GEOMETRY, fanBadge, lightBadge, project, speakerBadge, unproject } from "./room.js";
import type { EditCommand, StoryDocument, TriggerDoc, WorldView } from "./protocol.js";

const SOUND_CHOICES = ["", "lullaby", "thunder", "wind"];

export class AuthorMode {
  readonly root: HTMLElement;
  story: StoryDocument | null = null;
  selectedScene = -1; // -1 = initial scene
  private draggingAsset: string | null = null;
  private readonly issueEl: HTMLElement;
  private readonly timelineEl: HTMLElement;
  private readonly editorEl: HTMLElement;
  private readonly previewEl: HTMLElement;
  private readonly mapEl: HTMLElement;
  private readonly trashEl: HTMLElement;
  private readonly palette: PaletteGeometry = { cx: 90, cy: 100, radius: 80 };

  constructor(
    private readonly document: Document,
    private readonly api: AuthoringApi,
    private readonly storyId: string,
  ) {
    this.root = document.createElement("section");
    this.root.className = "author-mode";
    this.timelineEl = this.el("div", "timeline");
    this.editorEl = this.el("div", "scene-editor");
    this.issueEl = this.el("p", "issues");
    this.previewEl = this.el("div", "preview-panel");
    this.mapEl = this.el("div", "author-map");
    this.mapEl.style.position = "relative";
    this.mapEl.style.width = `${DEFAULT_GEOMETRY.width}px`;
    this.mapEl.style.height = `${DEFAULT_GEOMETRY.height}px`;
    this.trashEl = this.el("div", "trash");
    this.trashEl.textContent = "\u{1F5D1}";
    for (const child of [this.timelineEl, this.editorEl, this.mapEl, this.trashEl,
                         this.issueEl, this.previewEl]) {
      this.root.appendChild(child);
    }
    this.mapEl.addEventListener("mouseup", (event) => this.dropOnMap(event as MouseEvent));
    this.trashEl.addEventListener("mouseup", () => this.dropOnTrash());
  }

  private el(tag: string, className: string): HTMLElement {
    const element = this.document.createElement(tag);
    element.className = className;
    return element;
  }

  private queue: Promise<unknown> = Promise.resolve();

  /** Controls fire and forget; edits still apply strictly in click order. */
  private enqueue<T>(task: () => Promise<T>): Promise<T> {
    const next = this.queue.then(task);
    this.queue = next.catch(() => undefined);
    return next;
  }

  /** Resolves once every queued edit/preview has been applied. */
  flush(): Promise<void> {
    return this.queue.then(() => undefined);
  }

  async load(): Promise<void> {
    this.story = await this.api.getStory(this.storyId);
    this.render();
  }

  /** Single funnel for every control: send the command, adopt the revision. */
  submit(command: EditCommand): Promise<void> {
    return this.enqueue(async () => {
      try {
        this.story = await this.api.applyEdit(this.storyId, command);
        this.issueEl.textContent = "";
      } catch (error) {
        if (error instanceof ApiError) {
          const detail = Array.isArray(error.detail) ? error.detail.join("; ") : String(error.detail);
          this.issueEl.textContent = detail;
        } else {
          throw error;
        }
      }
      this.render();
    });
  }

  addScene(trigger: TriggerDoc): Promise<void> {
    return this.submit(appendSceneCommand(trigger)).then(() => {
      if (this.story) this.selectedScene = this.story.steps.length - 1;
      this.render();
    });
  }

  preview(): Promise<void> {
    return this.enqueue(async () => {
      const result = await this.api.preview(this.storyId, this.selectedScene);
      this.renderPreview(result.world);
    });
  }

  // -- drag placement ---------------------------------------------------------

  startDrag(assetId: string): void {
    this.draggingAsset = assetId;
  }

  private dropOnMap(event: MouseEvent): void {
    if (!this.draggingAsset || !this.story) return;
    const decl = this.story.assets.find((a) => a.id === this.draggingAsset);
    this.draggingAsset = null;
    if (!decl) return;
    const rect = (this.mapEl as HTMLElement & { getBoundingClientRect(): DOMRect }).getBoundingClientRect();
    const position = unproject(DEFAULT_GEOMETRY, event.clientX - rect.left, event.clientY - rect.top,
                               decl.position[1]);
    void this.submit(placeAssetCommand(this.selectedScene, decl.kind, position));
  }

  private dropOnTrash(): void {
    if (!this.draggingAsset) return;
    const asset = this.draggingAsset;
    this.draggingAsset = null;
    void this.submit(trashAssetCommand(this.selectedScene, asset));
  }

  // -- rendering ----------------------------------------------------------------

  private render(): void {
    if (!this.story) return;
    this.renderTimeline();
    this.renderEditor();
    this.renderMapChips();
  }

  private renderTimeline(): void {
    const story = this.story!;
    this.timelineEl.textContent = "";
    const entries: { index: number; label: string }[] = [{ index: -1, label: "initial" }];
    story.steps.forEach((step, i) => {
      const trigger = step.trigger;
      const label = trigger.type === "keyword" ? `“${trigger.phrase}”`
        : trigger.type === "touch" ? `touch ${trigger.target}` : "tap";
      entries.push({ index: i, label: `${i + 1}: ${label}` });
    });
    for (const entry of entries) {
      const button = this.document.createElement("button");
      button.className = "timeline-entry" + (entry.index === this.selectedScene ? " selected" : "");
      button.dataset.scene = String(entry.index);
      button.textContent = entry.label;
      button.addEventListener("click", () => {
        this.selectedScene = entry.index;
        this.render();
      });
      this.timelineEl.appendChild(button);
    }
    const addKeyword = this.document.createElement("button");
    addKeyword.className = "add-scene-keyword";
    addKeyword.textContent = "+ scene (keyword)";
    addKeyword.addEventListener("click", () => {
      const phrase = (this.editorEl.querySelector(".new-keyword") as HTMLInputElement | null)?.value
        ?? this.pendingKeyword;
      void this.addScene({ type: "keyword", phrase: phrase || "untitled" });
    });
    this.timelineEl.appendChild(addKeyword);
    const addTap = this.document.createElement("button");
    addTap.className = "add-scene-tap";
    addTap.textContent = "+ scene (tap)";
    addTap.addEventListener("click", () => void this.addScene({ type: "tap" }));
    this.timelineEl.appendChild(addTap);
  }

  pendingKeyword = "";

  private scene(index: number) {
    const story = this.story!;
    return index === -1 ? story.initial : story.steps[index]!.scene;
  }

  private renderEditor(): void {
    const story = this.story!;
    this.editorEl.textContent = "";
    const doc = this.document;

    const keywordInput = doc.createElement("input");
    keywordInput.className = "new-keyword";
    keywordInput.placeholder = "keyword for the next scene";
    keywordInput.addEventListener("input", () => {
      this.pendingKeyword = keywordInput.value;
    });
    this.editorEl.appendChild(keywordInput);

    const scene = this.scene(this.selectedScene);

    const narration = doc.createElement("input");
    narration.className = "narration-input";
    narration.placeholder = "narration line";
    narration.value = scene.narration ?? "";
    narration.addEventListener("change", () => {
      void this.submit(narrationCommand(this.selectedScene, narration.value));
    });
    this.editorEl.appendChild(narration);

    for (const device of story.devices) {
      const row = doc.createElement("div");
      row.className = `editor-row editor-${device.kind}`;
      row.dataset.deviceId = device.id;
      const label = doc.createElement("span");
      label.textContent = device.name;
      row.appendChild(label);

      if (device.kind === "light") {
        const slider = doc.createElement("input");
        slider.type = "range";
        slider.min = "0";
        slider.max = "100";
        slider.className = "brightness-slider";
        slider.addEventListener("change", () => {
          void this.submit(brightnessCommand(this.selectedScene, device.id,
                                             snapBrightness(Number(slider.value))));
        });
        row.appendChild(slider);

        const palette = doc.createElement("div");
        palette.className = "hue-palette";
        palette.style.width = `${this.palette.cx * 2}px`;
        palette.style.height = `${this.palette.cy}px`;
        palette.addEventListener("click", (event) => {
          const rect = (palette as HTMLElement & { getBoundingClientRect(): DOMRect }).getBoundingClientRect();
          const mouse = event as MouseEvent;
          const hue = hueFromPointer(this.palette, mouse.clientX - rect.left, mouse.clientY - rect.top);
          void this.submit(hueCommand(this.selectedScene, device.id, hue));
        });
        row.appendChild(palette);
      } else if (device.kind === "fan") {
        const level = doc.createElement("input");
        level.type = "range";
        level.min = "0";
        level.max = "3";
        level.className = "fan-level";
        level.addEventListener("change", () => {
          void this.submit(fanLevelCommand(this.selectedScene, device.id,
                                           clampFanLevel(Number(level.value))));
        });
        row.appendChild(level);
      } else {
        const picker = doc.createElement("select");
        picker.className = "sound-picker";
        for (const sound of SOUND_CHOICES) {
          const option = doc.createElement("option");
          option.value = sound;
          option.textContent = sound || "(silent)";
          picker.appendChild(option);
        }
        picker.addEventListener("change", () => {
          void this.submit(soundCommand(this.selectedScene, device.id, picker.value || null));
        });
        row.appendChild(picker);
      }
      this.editorEl.appendChild(row);
    }

    const previewBtn = doc.createElement("button");
    previewBtn.className = "preview-button";
    previewBtn.textContent = "Preview";
    previewBtn.addEventListener("click", () => void this.preview());
    this.editorEl.appendChild(previewBtn);
  }

  private renderMapChips(): void {
    const story = this.story!;
    this.mapEl.textContent = "";
    for (const device of story.devices) {
      const dot = this.el("div", `map-device map-${device.kind}`);
      const { x, y } = project(DEFAULT_GEOMETRY, device.position);
      dot.style.position = "absolute";
      dot.style.left = `${x}px`;
      dot.style.top = `${y}px`;
      dot.textContent = device.name;
      this.mapEl.appendChild(dot);
    }
    const chips = this.el("div", "asset-chips");
    for (const asset of story.assets) {
      const chip = this.el("button", "asset-chip");
      chip.dataset.assetId = asset.id;
      chip.textContent = asset.name;
      chip.addEventListener("mousedown", () => this.startDrag(asset.id));
      chips.appendChild(chip);
    }
    this.mapEl.appendChild(chips);
  }

  private renderPreview(world: WorldView): void {
    this.previewEl.textContent = "";
    const list = this.document.createElement("ul");
    for (const [id, state] of Object.entries(world.lights)) {
      list.appendChild(this.previewItem(`${id}: ${lightBadge(state)}`, "light"));
    }
    for (const [id, state] of Object.entries(world.fans)) {
      list.appendChild(this.previewItem(`${id}: ${fanBadge(state)}`, "fan"));
    }
    for (const [id, state] of Object.entries(world.speakers)) {
      list.appendChild(this.previewItem(`${id}: ${speakerBadge(state)}`, "speaker"));
    }
    for (const [id, state] of Object.entries(world.assets)) {
      if (state.present) list.appendChild(this.previewItem(`${id} @ ${state.position.join(", ")}`, "asset"));
    }
    this.previewEl.appendChild(list);
  }

  private previewItem(text: string, kind: string): HTMLElement {
    const item = this.document.createElement("li");
    item.className = `preview-${kind}`;
    item.textContent = text;
    return item;
  }
}
