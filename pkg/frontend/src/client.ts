import type { Move, SessionOptions, SessionView } from './protocol.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public reason: string,
  ) {
    super(`${status}: ${reason}`);
  }
}

async function parseError(resp: Response): Promise<never> {
  let reason = resp.statusText;
  try {
    const body = (await resp.json()) as { error?: string };
    if (body && body.error) reason = body.error;
  } catch {
    // keep the status text
  }
  throw new ApiError(resp.status, reason);
}

/** Thin fetch wrapper over the session endpoints. One in-flight request per
 * session is the caller's responsibility (the UI disables inputs while a
 * request runs). */
export class SessionClient {
  constructor(readonly baseUrl: string) {}

  private async request(method: string, path: string, body?: unknown): Promise<Response> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) await parseError(resp);
    return resp;
  }

  async createSession(options: SessionOptions): Promise<SessionView> {
    const resp = await this.request('POST', '/sessions', options);
    return (await resp.json()) as SessionView;
  }

  async getSession(id: string): Promise<SessionView> {
    const resp = await this.request('GET', `/sessions/${id}`);
    return (await resp.json()) as SessionView;
  }

  async submitMove(id: string, move: Move): Promise<SessionView> {
    const resp = await this.request('POST', `/sessions/${id}/moves`, { move });
    return (await resp.json()) as SessionView;
  }

  async fork(id: string, round: number): Promise<SessionView> {
    const resp = await this.request('POST', `/sessions/${id}/fork`, { round });
    return (await resp.json()) as SessionView;
  }

  async deleteSession(id: string): Promise<void> {
    await this.request('DELETE', `/sessions/${id}`);
  }
}
