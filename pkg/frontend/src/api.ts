// Typed client for the synthesis service JSON API. Patterns travel as
// seven-line strings; row index is y, column index is x.

export type ListenerKind = 'l0' | 'l1' | 'lp';

export interface TopEntry {
  pattern: string;
  prob: number;
}

export interface SessionPayload {
  session_id: string;
  listener: ListenerKind;
  stimulus_id: number;
  n_examples: number;
  n_consistent: number;
  top1: string;
  top_k: TopEntry[];
  solved: boolean;
  stimulus?: string;
}

export interface StimulusEntry {
  id: number;
  pattern: string;
  program: string;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, `server unreachable: ${err}`);
  }
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    throw new ApiError(resp.status, (body as { error?: string }).error ?? `HTTP ${resp.status}`);
  }
  return body as T;
}

export class SynthApi {
  constructor(private baseUrl: string = '') {}

  health(): Promise<{ status: string; n_hypotheses: number }> {
    return request(`${this.baseUrl}/api/health`);
  }

  listStimuli(): Promise<{ stimuli: StimulusEntry[] }> {
    return request(`${this.baseUrl}/api/stimuli`);
  }

  createSession(listener: ListenerKind, stimulusId: number): Promise<SessionPayload> {
    return request(`${this.baseUrl}/api/sessions`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ listener, stimulus_id: stimulusId }),
    });
  }

  postExample(sessionId: string, x: number, y: number, symbol: number): Promise<SessionPayload> {
    return request(`${this.baseUrl}/api/sessions/${sessionId}/examples`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ x, y, symbol }),
    });
  }

  undo(sessionId: string): Promise<SessionPayload> {
    return request(`${this.baseUrl}/api/sessions/${sessionId}/undo`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({}),
    });
  }
}
