// Session state mirror. The scratch grid is marked optimistically on click
// and rolled back if the server rejects the placement; the guess panel only
// ever shows server responses. Mutations run one at a time: clicks arriving
// while a request is in flight are queued.

import { ApiError, ListenerKind, SessionPayload, SynthApi } from './api.js';

export const GRID = 7;
export const SYMBOL_CHARS = '.rgbRGB';
export const SYMBOL_NAMES = [
  'pebble', 'chicken_red', 'chicken_green', 'chicken_blue',
  'pig_red', 'pig_green', 'pig_blue',
];

export type Cell = { x: number; y: number };

export interface UiSessionState {
  sessionId: string;
  listener: ListenerKind;
  stimulusId: number;
  target: string;
  placed: Map<string, number>;
  guess: string | null;
  topK: { pattern: string; prob: number }[];
  solved: boolean;
  moves: number;
  nConsistent: number;
  pending: Cell | null;
  lastError: string | null;
}

export function cellKey(x: number, y: number): string {
  return `${x},${y}`;
}

export function patternCharAt(pattern: string, x: number, y: number): string {
  return pattern.split('\n')[y][x];
}

export interface SessionEvents {
  onChange: (state: UiSessionState) => void;
  onFatal?: (message: string) => void;
}

export class SessionController {
  state: UiSessionState | null = null;
  private queue: Promise<void> = Promise.resolve();

  constructor(private api: SynthApi, private events: SessionEvents) {}

  /** Promise that settles after every queued mutation has been processed. */
  whenIdle(): Promise<void> {
    return this.queue;
  }

  private applyPayload(payload: SessionPayload): void {
    const s = this.state!;
    s.guess = payload.top1;
    s.topK = payload.top_k;
    s.solved = payload.solved;
    s.moves = payload.n_examples;
    s.nConsistent = payload.n_consistent;
    this.events.onChange(s);
  }

  async start(listener: ListenerKind, stimulusId: number): Promise<void> {
    try {
      const payload = await this.api.createSession(listener, stimulusId);
      this.state = {
        sessionId: payload.session_id,
        listener,
        stimulusId,
        target: payload.stimulus ?? '',
        placed: new Map(),
        guess: null,
        topK: [],
        solved: false,
        moves: 0,
        nConsistent: 0,
        pending: null,
        lastError: null,
      };
      this.applyPayload(payload);
    } catch (err) {
      this.events.onFatal?.(err instanceof Error ? err.message : String(err));
      throw err;
    }
  }

  /** Start a fresh session with another robot on the same stimulus. */
  switchRobot(listener: ListenerKind): Promise<void> {
    const stimulusId = this.state?.stimulusId ?? 0;
    return this.start(listener, stimulusId);
  }

  placeSymbol(x: number, y: number, symbol: number): Promise<void> {
    const run = async () => {
      const s = this.state;
      if (!s || s.solved) return;
      const key = cellKey(x, y);
      const previous = s.placed.get(key);
      // optimistic mark; the guess panel waits for the acknowledgment
      s.placed.set(key, symbol);
      s.pending = { x, y };
      s.lastError = null;
      this.events.onChange(s);
      try {
        const payload = await this.api.postExample(s.sessionId, x, y, symbol);
        s.pending = null;
        this.applyPayload(payload);
      } catch (err) {
        if (previous === undefined) {
          s.placed.delete(key);
        } else {
          s.placed.set(key, previous);
        }
        s.pending = null;
        if (err instanceof ApiError && err.status === 0) {
          this.events.onFatal?.(err.message);
        } else {
          s.lastError = err instanceof Error ? err.message : String(err);
        }
        this.events.onChange(s);
      }
    };
    this.queue = this.queue.then(run);
    return this.queue;
  }

  undo(): Promise<void> {
    const run = async () => {
      const s = this.state;
      if (!s || s.moves === 0) return;
      try {
        const payload = await this.api.undo(s.sessionId);
        // drop the most recent placement mark
        const last = [...s.placed.keys()].pop();
        if (last !== undefined) s.placed.delete(last);
        s.lastError = null;
        this.applyPayload(payload);
      } catch (err) {
        s.lastError = err instanceof Error ? err.message : String(err);
        this.events.onChange(s);
      }
    };
    this.queue = this.queue.then(run);
    return this.queue;
  }
}
