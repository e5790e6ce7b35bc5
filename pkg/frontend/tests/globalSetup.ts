/**
 * Boots the story engine's real server (the frontend's only counterpart)
 * for the integration tests. Everything the suite touches goes through the
 * public HTTP and WebSocket interfaces of that process.
 */

import { spawn, type ChildProcess } from "node:child_process";
import net from "node:net";
import type { TestProject } from "vitest/node";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = net.createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        server.close(() => reject(new Error("no port")));
      }
    });
  });
}

async function waitReady(baseUrl: string, timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${baseUrl}/stories`);
      if (response.ok) return;
    } catch (error) {
      lastError = error;
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`backend at ${baseUrl} never became ready: ${lastError}`);
}

let proc: ChildProcess | null = null;

export default async function setup(project: TestProject): Promise<() => void> {
  const port = await freePort();
  const baseUrl = `http://127.0.0.1:${port}`;
  proc = spawn(
    "python3",
    ["-m", "uvicorn", "--factory", "loomcast.server:create_app",
     "--host", "127.0.0.1", "--port", String(port), "--log-level", "warning"],
    { stdio: ["ignore", "inherit", "inherit"] },
  );
  await waitReady(baseUrl);
  project.provide("backendUrl", baseUrl);
  return () => {
    proc?.kill("SIGTERM");
  };
}

declare module "vitest" {
  export interface ProvidedContext {
    backendUrl: string;
  }
}
