import { describe, expect, it } from 'vitest';

import {
  addUserEcho,
  initialState,
  liveSnapshot,
  orderedConversation,
  pendingProposal,
  reduceEvent,
} from '../src/state.js';
import { parseSseChunk } from '../src/api.js';
import type { EngineEvent } from '../src/types.js';

function event(index: number, kind: EngineEvent['kind'],
               payload: Record<string, unknown> = {}): EngineEvent {
  return { index, kind, payload };
}

const snapshotPayload = {
  stage: 'movie', uiKind: 'buttonGroup', stageTitle: 'Select Movie',
  view: { visible: [], labels: {}, highlighted: [], hiddenCount: 0,
          showAllEngaged: false, nonMatching: [], allOrdered: [], appliedActions: [] },
  breadcrumb: [],
};

describe('reduceEvent', () => {
  it('keeps conversation entries in event-stream order', () => {
    let state = initialState();
    const stream = [
      event(0, 'guiSnapshot', snapshotPayload),
      event(1, 'message', { text: 'hello' }),
      event(2, 'adaptation', { kind: 'sort', banner: 'Agent is sorting' }),
      event(3, 'guiSnapshot', snapshotPayload),
      event(4, 'message', { text: 'done' }),
    ];
    for (const ev of stream) state = reduceEvent(state, ev);
    const entries = orderedConversation(state);
    expect(entries.map((e) => e.eventIndex)).toEqual([1, 2, 4]);
    expect(state.snapshots.map((s) => s.eventIndex)).toEqual([0, 3]);
    expect(state.bannerLog).toEqual(['Agent is sorting']);
  });

  it('drops replayed duplicates on reconnect', () => {
    let state = initialState();
    const events = [
      event(0, 'guiSnapshot', snapshotPayload),
      event(1, 'message', { text: 'a' }),
    ];
    for (const ev of events) state = reduceEvent(state, ev);
    for (const ev of events) state = reduceEvent(state, ev); // replay
    expect(state.events).toHaveLength(2);
    expect(orderedConversation(state)).toHaveLength(1);
  });

  it('user echoes slot in before the turn they caused', () => {
    let state = initialState();
    state = reduceEvent(state, event(0, 'guiSnapshot', snapshotPayload));
    state = reduceEvent(state, event(1, 'message', { text: 'elicitation' }));
    // Turn: user says something, events 2..3 follow.
    state = addUserEcho(state, 'my preference', 2);
    state = reduceEvent(state, event(2, 'adaptation', { banner: 'Agent is filtering' }));
    state = reduceEvent(state, event(3, 'message', { text: 'follow-up' }));
    const texts = orderedConversation(state).map((e) => e.text);
    expect(texts).toEqual(['elicitation', 'my preference',
                           'Agent is filtering', 'follow-up']);
  });

  it('marks submission', () => {
    let state = initialState();
    state = reduceEvent(state, event(0, 'submission', { finalPath: [] }));
    expect(state.submitted).toBe(true);
  });
});

describe('pendingProposal', () => {
  it('is active when the ask is the latest turn activity', () => {
    let state = initialState();
    state = reduceEvent(state, event(0, 'message', { text: 'best option is X' }));
    state = reduceEvent(state, event(1, 'confirmationAsk',
                                     { optionId: 'x', label: 'X' }));
    const proposal = pendingProposal(state);
    expect(proposal?.kind).toBe('confirmSelection');
    expect(proposal?.optionId).toBe('x');
  });

  it('clears once a later turn produced activity', () => {
    let state = initialState();
    state = reduceEvent(state, event(0, 'confirmationAsk', { optionId: 'x' }));
    state = reduceEvent(state, event(1, 'message', { text: 'moving on' }));
    expect(pendingProposal(state)).toBeNull();
  });

  it('reports backtrack proposals with their target', () => {
    let state = initialState();
    state = reduceEvent(state, event(0, 'backtrackProposal',
                                     { targetStageId: 'theater' }));
    expect(pendingProposal(state)?.targetStage).toBe('theater');
  });
});

describe('liveSnapshot', () => {
  it('is the most recent snapshot', () => {
    let state = initialState();
    state = reduceEvent(state, event(0, 'guiSnapshot', snapshotPayload));
    state = reduceEvent(state, event(5, 'guiSnapshot',
                                     { ...snapshotPayload, stage: 'theater' }));
    expect(liveSnapshot(state)?.eventIndex).toBe(5);
  });
});

describe('parseSseChunk', () => {
  it('splits frames and keeps the partial tail', () => {
    const chunk = 'id: 0\nevent: message\ndata: {"index":0}\n\nid: 1\ndata: {"in';
    const { frames, rest } = parseSseChunk(chunk);
    expect(frames).toHaveLength(1);
    expect(frames[0]).toEqual({ id: '0', event: 'message', data: '{"index":0}' });
    expect(rest).toBe('id: 1\ndata: {"in');
  });
});
