// Thin client for the session service. Error bodies are {code, message,
// detail}; non-2xx responses raise with the service's message so the UI
// can surface it inline.

import type { ServiceError, SessionHandle, Snapshot, TurnUpdate } from "./types.js";

export class ApiError extends Error {
  code: string;

  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }
}

async function jsonOrThrow<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let code = `http_${response.status}`;
  let message = response.statusText;
  try {
    const body = (await response.json()) as ServiceError;
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body; keep the HTTP status text
  }
  throw new ApiError(code, message);
}

export class ServiceClient {
  constructor(private base: string = "") {}

  async createSession(caseId: string | null, seed: number): Promise<SessionHandle> {
    const response = await fetch(`${this.base}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(caseId ? { case_id: caseId, seed } : { seed }),
    });
    return jsonOrThrow<SessionHandle>(response);
  }

  async pushTurn(sessionId: string, role: string, text: string): Promise<TurnUpdate> {
    const response = await fetch(`${this.base}/sessions/${sessionId}/turns`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ role, text }),
    });
    return jsonOrThrow<TurnUpdate>(response);
  }

  async snapshot(sessionId: string): Promise<Snapshot> {
    const response = await fetch(`${this.base}/sessions/${sessionId}/snapshot`);
    return jsonOrThrow<Snapshot>(response);
  }

  async trace(sessionId: string): Promise<string> {
    const response = await fetch(`${this.base}/sessions/${sessionId}/trace`);
    if (!response.ok) {
      throw new ApiError(`http_${response.status}`, response.statusText);
    }
    return response.text();
  }

  subscribe(sessionId: string, onUpdate: (update: TurnUpdate) => void): () => void {
    const source = new EventSource(`${this.base}/sessions/${sessionId}/updates`);
    source.onmessage = (event) => onUpdate(JSON.parse(event.data) as TurnUpdate);
    return () => source.close();
  }
}
