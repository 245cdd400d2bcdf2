// UI conformance against a live server replaying the teaser script:
// four adaptation banners in order, the filtered/sorted/highlighted stage
// view, a SHOW ALL affordance, and scroll-sync back to the pre-adaptation
// snapshot.

import { spawn, type ChildProcess } from 'node:child_process';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient, EventStream } from '../src/api.js';
import { App } from '../src/main.js';
import { initialState, reduceEvent, type AppState } from '../src/state.js';
import { snapshotAtOrBefore } from '../src/scrollSync.js';
import { renderStage } from '../src/render.js';
import type { EngineEvent } from '../src/types.js';

const PORT = 18000 + (process.pid % 2000);
const BASE = `http://127.0.0.1:${PORT}`;
const TEASER = 'I would like to watch a blockbuster on an IMAX screen. ' +
  'The closer the better!';

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i += 1) {
    try {
      const response = await fetch(`${BASE}/scenarios`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error('server did not come up');
}

beforeAll(async () => {
  server = spawn('python3', ['-m', 'usher.cli', 'serve', '--listen',
                             `127.0.0.1:${PORT}`],
                 { cwd: '..', stdio: 'ignore' });
  await waitForServer();
});

afterAll(() => {
  server?.kill();
});

function mountDom(): void {
  document.body.innerHTML = `
    <div id="breadcrumb"></div>
    <div id="banner"></div>
    <div id="stage"></div>
    <div id="conversation"></div>
    <form id="composer"><input id="composer-input" /></form>`;
}

async function collectEvents(sessionId: string): Promise<EngineEvent[]> {
  const events: EngineEvent[] = [];
  const stream = new EventStream(BASE, sessionId, (event) => events.push(event),
                                 { follow: false });
  await stream.start(0);
  return events;
}

describe('teaser-script conformance', () => {
  it('renders banners, adapted view, show-all, and scroll-synced history', async () => {
    const api = new ApiClient(BASE);
    const scenarios = await api.listScenarios();
    expect(scenarios.map((s) => s.id)).toContain('starfall_circuit');

    const sessionId = await api.createSession('starfall_circuit', 'maestro');
    await api.postMessage(sessionId, TEASER);

    const events = await collectEvents(sessionId);
    let state: AppState = initialState();
    for (const event of events) state = reduceEvent(state, event);

    // Four adaptation banners, in operator order.
    expect(state.bannerLog).toHaveLength(4);
    expect(state.bannerLog[0]).toContain('updating labels');
    expect(state.bannerLog[1]).toContain('filtering');
    expect(state.bannerLog[2]).toContain('sorting');
    expect(state.bannerLog[3]).toContain('highlighting');

    // Live stage view: filtered to the two IMAX theaters, closest first,
    // best option bordered, SHOW ALL affordance present.
    mountDom();
    const stage = document.getElementById('stage')!;
    const live = state.snapshots[state.snapshots.length - 1];
    renderStage(stage, live.payload, { historical: false, onAction: () => {} });
    const labels = [...stage.querySelectorAll('button.option')]
      .map((b) => b.textContent);
    expect(labels).toEqual([
      'Cedar Commons 6 — 4.6 mi, IMAX Available',
      'Riverview 8 — 6.3 mi, IMAX Available',
    ]);
    expect(stage.querySelector('button.option.highlighted')?.textContent)
      .toContain('Cedar Commons 6');
    expect(stage.querySelector('button.show-all')).not.toBeNull();

    // Every adaptation badge has a snapshot reachable via scroll sync.
    for (const entry of state.conversation) {
      if (entry.kind === 'adaptationBadge') {
        expect(snapshotAtOrBefore(state.snapshots, entry.eventIndex!)).not.toBeNull();
      }
    }

    // Scroll-sync to the elicitation message shows the pre-adaptation
    // snapshot, read-only, with all three theaters.
    const preAdaptationIndex = events.find((e) => e.kind === 'message')!.index;
    const historic = snapshotAtOrBefore(state.snapshots, preAdaptationIndex)!;
    expect(historic.eventIndex).toBeLessThan(live.eventIndex);
    renderStage(stage, historic.payload, { historical: true, onAction: () => {} });
    const names = [...stage.querySelectorAll('button.option')]
      .map((b) => b.textContent);
    expect(names).toEqual(['CloseUp 12', 'Riverview 8', 'Cedar Commons 6']);
    for (const button of stage.querySelectorAll('button')) {
      expect((button as HTMLButtonElement).disabled).toBe(true);
    }
  });

  it('full app flow: select via UI, stream follows, reconnect resumes', async () => {
    const api = new ApiClient(BASE);
    const sessionId = await api.createSession('starfall_circuit', 'maestro');
    mountDom();
    const app = new App(document, api, { animate: false });
    await app.start(sessionId);

    await app.say(TEASER);
    await waitFor(() => app.state.bannerLog.length === 4);

    // Click the highlighted theater in the rendered DOM.
    const stage = document.getElementById('stage')!;
    const before = app.state.lastIndex;
    (stage.querySelector('button.option.highlighted') as HTMLButtonElement).click();
    await waitFor(() => app.state.lastIndex > before);
    const texts = app.state.conversation.map((e) => e.text);
    expect(texts.some((t) => t.includes('Selected Cedar Commons 6'))).toBe(true);
    app.stop();

    // A second subscriber resuming from a mid-stream index sees exactly
    // the remaining events, no duplicates.
    const all = await collectEvents(sessionId);
    const resumeFrom = 3;
    const resumed: EngineEvent[] = [];
    const stream = new EventStream(BASE, sessionId,
                                   (event) => resumed.push(event), { follow: false });
    await stream.start(resumeFrom);
    expect(resumed.map((e) => e.index)).toEqual(
      all.slice(resumeFrom).map((e) => e.index));
  });

  it('scroll sync through the App selects historical then live', async () => {
    const api = new ApiClient(BASE);
    const sessionId = await api.createSession('starfall_circuit', 'maestro');
    mountDom();
    const app = new App(document, api, { animate: false });
    await app.start(sessionId);
    await app.say(TEASER);
    await waitFor(() => app.state.bannerLog.length === 4);

    const stage = document.getElementById('stage')!;
    app.syncToConversationPosition(1, false); // elicitation message
    expect(stage.classList.contains('historical')).toBe(true);
    expect(stage.querySelectorAll('button.option')).toHaveLength(3);

    app.syncToConversationPosition(null, true); // back to bottom: live view
    expect(stage.classList.contains('historical')).toBe(false);
    expect(stage.querySelectorAll('button.option')).toHaveLength(2);
    app.stop();
  });
});

async function waitFor(check: () => boolean, timeoutMs = 10_000): Promise<void> {
  const start = Date.now();
  while (!check()) {
    if (Date.now() - start > timeoutMs) throw new Error('condition never met');
    await new Promise((resolve) => setTimeout(resolve, 50));
  }
}
