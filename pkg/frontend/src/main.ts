// Application bootstrap: wires the API client and event stream into the
// split-panel layout. All engine state renders only after server events
// arrive; the client never updates optimistically.

import { ApiClient, EventStream } from './api.js';
import {
  addUserEcho,
  initialState,
  liveSnapshot,
  orderedConversation,
  pendingProposal,
  reduceEvent,
  type AppState,
} from './state.js';
import { renderBanner, renderBreadcrumb, renderConversation, renderStage } from './render.js';
import { isAtBottom, snapshotAtOrBefore, topmostVisibleIndex } from './scrollSync.js';
import type { EngineEvent, GuiActionRequest } from './types.js';

interface AppOptions {
  serverUrl: string;
  scenarioId: string | null;
  mode: string;
  showBrief: boolean;
  animate: boolean;
}

function optionsFromLocation(location: Location): AppOptions {
  const params = new URLSearchParams(location.search);
  const reducedMotion = typeof window.matchMedia === 'function'
    && window.matchMedia('(prefers-reduced-motion: reduce)').matches;
  return {
    serverUrl: params.get('server') ?? location.origin,
    scenarioId: params.get('scenario'),
    mode: params.get('mode') ?? 'maestro',
    showBrief: params.get('brief') === '1',
    animate: params.get('motion') !== 'off' && !reducedMotion,
  };
}

export class App {
  state: AppState = initialState();
  private stream: EventStream | null = null;
  private viewingIndex: number | null = null; // null = live snapshot
  private queue: Promise<void> = Promise.resolve();

  constructor(
    readonly root: Document,
    readonly api: ApiClient,
    readonly options: { animate: boolean },
  ) {}

  private element(id: string): HTMLElement {
    const node = this.root.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node;
  }

  async start(sessionId: string, fromIndex = 0): Promise<void> {
    this.sessionId = sessionId;
    this.stream = new EventStream(
      this.api.baseUrl, sessionId,
      (event) => this.enqueue(event),
      { follow: true, onEnd: () => undefined },
    );
    void this.stream.start(fromIndex);
    this.wireInput();
    this.wireScroll();
  }

  sessionId = '';

  stop(): void {
    this.stream?.stop();
  }

  /** Events render strictly in order; each adaptation banner completes
   * before anything later in the same turn appears. */
  private enqueue(event: EngineEvent): void {
    this.queue = this.queue.then(() => this.apply(event));
  }

  private async apply(event: EngineEvent): Promise<void> {
    if (event.kind === 'adaptation' && this.options.animate) {
      renderBanner(this.element('banner'), String(event.payload.banner ?? ''));
      await new Promise((resolve) => setTimeout(resolve, 350));
    }
    this.state = reduceEvent(this.state, event);
    if (event.kind === 'guiSnapshot') {
      renderBanner(this.element('banner'), null);
    }
    this.render();
  }

  async say(text: string): Promise<void> {
    const ack = await this.api.postMessage(this.sessionId, text);
    this.state = addUserEcho(this.state, text, ack.lastIndex - ack.events + 1);
    this.render();
  }

  async act(action: GuiActionRequest): Promise<void> {
    await this.api.postAction(this.sessionId, action);
  }

  render(): void {
    const conversation = this.element('conversation');
    const wasAtBottom = isAtBottom(conversation);
    renderConversation(conversation, orderedConversation(this.state), {
      proposal: this.state.submitted ? null : pendingProposal(this.state),
      onReply: (text) => void this.say(text),
    });
    if (wasAtBottom) conversation.scrollTop = conversation.scrollHeight;
    this.renderGuiPanel();
  }

  renderGuiPanel(): void {
    const live = liveSnapshot(this.state);
    const snapshot = this.viewingIndex === null
      ? live
      : snapshotAtOrBefore(this.state.snapshots, this.viewingIndex);
    if (!snapshot) return;
    const historical = this.viewingIndex !== null
      && snapshot.eventIndex !== (live?.eventIndex ?? -1);
    renderBreadcrumb(this.element('breadcrumb'), snapshot.payload);
    renderStage(this.element('stage'), snapshot.payload, {
      historical,
      onAction: (action) => void this.act(action),
    });
  }

  /** Scroll-sync entry point; also called directly by tests. */
  syncToConversationPosition(topIndex: number | null, atBottom: boolean): void {
    this.viewingIndex = atBottom || topIndex === null ? null : topIndex;
    this.renderGuiPanel();
  }

  private wireInput(): void {
    const form = this.element('composer') as HTMLFormElement;
    const input = this.element('composer-input') as HTMLInputElement;
    form.addEventListener('submit', (submitEvent) => {
      submitEvent.preventDefault();
      const text = input.value.trim();
      if (!text) return;
      input.value = '';
      void this.say(text);
    });
  }

  private wireScroll(): void {
    const conversation = this.element('conversation');
    conversation.addEventListener('scroll', () => {
      this.syncToConversationPosition(
        topmostVisibleIndex(conversation), isAtBottom(conversation));
    });
  }
}

async function boot(): Promise<void> {
  const options = optionsFromLocation(window.location);
  const api = new ApiClient(options.serverUrl);
  const scenarios = await api.listScenarios();
  const scenario = scenarios.find((s) => s.id === options.scenarioId) ?? scenarios[0];
  if (!scenario) {
    document.body.textContent = 'No scenarios available on the server.';
    return;
  }
  if (options.showBrief) {
    const brief = document.getElementById('brief');
    if (brief) {
      brief.hidden = false;
      brief.textContent = `${scenario.title} — ${scenario.brief}`;
    }
  }
  const sessionId = await api.createSession(scenario.id, options.mode);
  const app = new App(document, api, { animate: options.animate });
  await app.start(sessionId);
}

declare global {
  interface Window { __usherBooted?: boolean }
}

if (typeof window !== 'undefined' && typeof document !== 'undefined'
    && document.getElementById('stage') && !window.__usherBooted) {
  window.__usherBooted = true;
  void boot();
}
