// REST client plus the server-push event stream reader.
//
// The stream is SSE-framed over a long-lived fetch; on reconnect we resume
// from the last seen index, and the index guard below drops any replayed
// duplicates, so consumers observe each event exactly once, in order.

import type { EngineEvent, GuiActionRequest, ScenarioInfo } from './types.js';

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      headers: { 'Content-Type': 'application/json' },
      ...init,
    });
    if (!response.ok) {
      const body = await response.text();
      throw new Error(`${init?.method ?? 'GET'} ${path} -> ${response.status}: ${body}`);
    }
    return response.json();
  }

  listScenarios(): Promise<ScenarioInfo[]> {
    return this.request('/scenarios') as Promise<ScenarioInfo[]>;
  }

  async createSession(scenarioId: string, mode = 'maestro'): Promise<string> {
    const body = await this.request('/sessions', {
      method: 'POST',
      body: JSON.stringify({ scenarioId, mode }),
    }) as { sessionId: string };
    return body.sessionId;
  }

  postMessage(sessionId: string, text: string): Promise<{ events: number; lastIndex: number }> {
    return this.request(`/sessions/${sessionId}/message`, {
      method: 'POST',
      body: JSON.stringify({ text }),
    }) as Promise<{ events: number; lastIndex: number }>;
  }

  postAction(sessionId: string, action: GuiActionRequest): Promise<{ events: number; lastIndex: number }> {
    return this.request(`/sessions/${sessionId}/action`, {
      method: 'POST',
      body: JSON.stringify(action),
    }) as Promise<{ events: number; lastIndex: number }>;
  }

  getState(sessionId: string): Promise<Record<string, unknown>> {
    return this.request(`/sessions/${sessionId}/state`) as Promise<Record<string, unknown>>;
  }
}

interface SseFrame {
  id?: string;
  event?: string;
  data?: string;
}

export function parseSseChunk(buffer: string): { frames: SseFrame[]; rest: string } {
  const frames: SseFrame[] = [];
  const parts = buffer.split('\n\n');
  const rest = parts.pop() ?? '';
  for (const part of parts) {
    const frame: SseFrame = {};
    for (const line of part.split('\n')) {
      if (line.startsWith('data: ')) {
        frame.data = (frame.data ? frame.data + '\n' : '') + line.slice(6);
      } else if (line.startsWith('id: ')) {
        frame.id = line.slice(4);
      } else if (line.startsWith('event: ')) {
        frame.event = line.slice(7);
      }
    }
    frames.push(frame);
  }
  return { frames, rest };
}

export interface EventStreamOptions {
  follow?: boolean;
  maxReconnects?: number;
  onEnd?: () => void;
}

export class EventStream {
  private lastIndex = -1;
  private stopped = false;
  private controller: AbortController | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly sessionId: string,
    private readonly onEvent: (event: EngineEvent) => void,
    private readonly options: EventStreamOptions = {},
  ) {}

  async start(fromIndex = 0): Promise<void> {
    this.lastIndex = fromIndex - 1;
    const maxReconnects = this.options.maxReconnects ?? 20;
    let attempts = 0;
    while (!this.stopped && attempts <= maxReconnects) {
      try {
        const finished = await this.readOnce();
        if (finished || this.options.follow === false) {
          this.options.onEnd?.();
          return;
        }
        attempts = 0;
      } catch (error) {
        if (this.stopped) return;
        attempts += 1;
        await new Promise((resolve) => setTimeout(resolve, 250));
      }
    }
    this.options.onEnd?.();
  }

  stop(): void {
    this.stopped = true;
    this.controller?.abort();
  }

  /** One connection; resolves true when the server signalled end-of-stream. */
  private async readOnce(): Promise<boolean> {
    this.controller = new AbortController();
    const follow = this.options.follow !== false;
    const url = `${this.baseUrl}/sessions/${this.sessionId}/events` +
      `?fromIndex=${this.lastIndex + 1}&follow=${follow}`;
    const response = await fetch(url, { signal: this.controller.signal });
    if (!response.ok || !response.body) {
      throw new Error(`event stream failed: ${response.status}`);
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = '';
    let ended = false;
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      const { frames, rest } = parseSseChunk(buffer);
      buffer = rest;
      for (const frame of frames) {
        if (frame.event === 'end') {
          ended = true;
          continue;
        }
        if (!frame.data) continue;
        const event = JSON.parse(frame.data) as EngineEvent;
        if (event.index <= this.lastIndex) continue; // replayed duplicate
        this.lastIndex = event.index;
        this.onEvent(event);
      }
    }
    return ended || !follow;
  }
}
