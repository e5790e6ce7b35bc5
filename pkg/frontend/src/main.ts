/**
 * Page bootstrap: list the server's stories, then either join a live
 * session (play mode) or open the editor (author mode).
 */

import { AuthoringApi, SessionConnection } from "./api.js";
import { AuthorMode } from "./authorMode.js";
import { PlayMode } from "./playMode.js";
import { SessionStore } from "./stateStore.js";

function wsUrl(baseUrl: string, sessionId: string): string {
  return `${baseUrl.replace(/^http/, "ws")}/session/${sessionId}`;
}

export async function boot(root: HTMLElement, baseUrl: string = ""): Promise<void> {
  const doc = root.ownerDocument;
  const api = new AuthoringApi(baseUrl || `${location.protocol}//${location.host}`);
  const stories = await api.listStories();

  const picker = doc.createElement("div");
  picker.className = "story-picker";
  for (const story of stories) {
    const row = doc.createElement("div");
    row.textContent = `${story.title} (${story.steps} steps) `;

    const playBtn = doc.createElement("button");
    playBtn.textContent = "Play";
    playBtn.addEventListener("click", async () => {
      const sessionId = await api.createSession(story.id);
      const store = new SessionStore();
      const connection = new SessionConnection(
        wsUrl(api.baseUrl, sessionId),
        (message) => store.applyServerMessage(message),
        WebSocket,
      );
      root.textContent = "";
      root.appendChild(new PlayMode(doc, store, connection).root);
      connection.connect();
    });
    row.appendChild(playBtn);

    const editBtn = doc.createElement("button");
    editBtn.textContent = "Author";
    editBtn.addEventListener("click", async () => {
      const editor = new AuthorMode(doc, api, story.id);
      root.textContent = "";
      root.appendChild(editor.root);
      await editor.load();
    });
    row.appendChild(editBtn);
    picker.appendChild(row);
  }
  root.textContent = "";
  root.appendChild(picker);
}
