/**
 * Thin clients for the engine's two external surfaces: the authoring HTTP
 * API and the session WebSocket. Both take their transport (fetch /
 * WebSocket constructor) as parameters so tests can run under Node.
 */

import type {
  ClientEvent, ClientMessage, EditCommand, RoleDoc, ServerMessage, StoryDocument, WorldView,
} from "./protocol.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, readonly status: number, readonly detail: unknown) {
    super(message);
  }
}

async function expectOk(response: Response): Promise<unknown> {
  const body = response.status === 204 ? null : await response.json().catch(() => null);
  if (!response.ok) {
    const detail = (body as { detail?: unknown } | null)?.detail ?? body;
    throw new ApiError(`HTTP ${response.status}`, response.status, detail);
  }
  return body;
}

export interface PreviewResult {
  cursor: number;
  world: WorldView;
  devices: Record<string, Record<string, unknown>>;
}

export class AuthoringApi {
  constructor(readonly baseUrl: string, private readonly fetchFn: FetchLike = fetch) {}

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    return expectOk(await this.fetchFn(`${this.baseUrl}${path}`, init));
  }

  listStories(): Promise<{ id: string; title: string; steps: number }[]> {
    return this.request("GET", "/stories") as Promise<{ id: string; title: string; steps: number }[]>;
  }

  getStory(id: string): Promise<StoryDocument> {
    return this.request("GET", `/stories/${id}`) as Promise<StoryDocument>;
  }

  putStory(id: string, document: StoryDocument): Promise<unknown> {
    return this.request("PUT", `/stories/${id}`, document);
  }

  /** Apply one edit; resolves to the revised document, rejects with issue paths. */
  applyEdit(id: string, command: EditCommand): Promise<StoryDocument> {
    return this.request("POST", `/stories/${id}/edits`, command) as Promise<StoryDocument>;
  }

  preview(id: string, upTo: number): Promise<PreviewResult> {
    return this.request("POST", `/stories/${id}/preview`, { up_to: upTo }) as Promise<PreviewResult>;
  }

  createSession(storyFile: string): Promise<string> {
    return this.request("POST", "/sessions", { story_file: storyFile })
      .then((body) => (body as { id: string }).id);
  }

  sessionLog(id: string): Promise<string> {
    return this.fetchFn(`${this.baseUrl}/sessions/${id}/log`).then((r) => r.text());
  }
}

// -- WebSocket session connection --------------------------------------------------

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "message" | "close", listener: (event: { data?: unknown }) => void): void;
}

export type WebSocketCtor = new (url: string) => WebSocketLike;

export interface SessionConnectionOptions {
  reconnectDelayMs?: number;
  maxReconnects?: number;
}

/**
 * Session socket that survives connection loss: on close it reopens and the
 * server's fresh Snapshot (always the first message) resets the view.
 */
export class SessionConnection {
  private socket: WebSocketLike | null = null;
  private closed = false;
  private reconnects = 0;

  constructor(
    private readonly url: string,
    private readonly onMessage: (message: ServerMessage) => void,
    private readonly WS: WebSocketCtor,
    private readonly options: SessionConnectionOptions = {},
  ) {}

  connect(): void {
    const socket = new this.WS(this.url);
    this.socket = socket;
    socket.addEventListener("message", (event) => {
      this.onMessage(JSON.parse(String(event.data)) as ServerMessage);
    });
    socket.addEventListener("close", () => {
      if (this.closed) return;
      const max = this.options.maxReconnects ?? 5;
      if (this.reconnects >= max) return;
      this.reconnects += 1;
      setTimeout(() => this.connect(), this.options.reconnectDelayMs ?? 500);
    });
  }

  private sendMessage(message: ClientMessage): void {
    if (!this.socket) throw new Error("not connected");
    this.socket.send(JSON.stringify(message));
  }

  claimRole(role: RoleDoc): void {
    this.sendMessage({ type: "claim_role", role });
  }

  sendEvent(event: ClientEvent): void {
    this.sendMessage({ type: "event", event });
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
