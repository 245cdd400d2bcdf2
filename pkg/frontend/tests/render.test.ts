import { beforeEach, describe, expect, it, vi } from 'vitest';

import { renderConversation, renderStage } from '../src/render.js';
import { snapshotAtOrBefore } from '../src/scrollSync.js';
import type { SnapshotPayload } from '../src/types.js';

function stageRoot(): HTMLElement {
  document.body.innerHTML = '<div id="stage"></div>';
  return document.getElementById('stage')!;
}

const theaterSnapshot: SnapshotPayload = {
  stage: 'theater',
  uiKind: 'buttonGroup',
  stageTitle: 'Select Theater',
  breadcrumb: [{ stage: 'movie', label: 'Starfall Circuit' }],
  view: {
    visible: ['t_cedar', 't_riverview'],
    allOrdered: ['t_cedar', 't_riverview', 't_closeup'],
    labels: {
      t_cedar: 'Cedar Commons 6 — 4.6 mi, IMAX Available',
      t_riverview: 'Riverview 8 — 6.3 mi, IMAX Available',
      t_closeup: 'CloseUp 12 — 3.1 mi',
    },
    highlighted: ['t_cedar'],
    hiddenCount: 1,
    showAllEngaged: false,
    nonMatching: ['t_closeup'],
    appliedActions: [],
  },
};

describe('renderStage buttonGroup', () => {
  it('renders augmented labels, highlight border, and SHOW ALL', () => {
    const root = stageRoot();
    renderStage(root, theaterSnapshot, { historical: false, onAction: () => {} });
    const buttons = [...root.querySelectorAll('button.option')];
    expect(buttons.map((b) => b.textContent)).toEqual([
      'Cedar Commons 6 — 4.6 mi, IMAX Available',
      'Riverview 8 — 6.3 mi, IMAX Available',
    ]);
    expect(buttons[0].classList.contains('highlighted')).toBe(true);
    expect(buttons[1].classList.contains('highlighted')).toBe(false);
    expect(root.querySelector('button.show-all')?.textContent).toBe('SHOW ALL');
    expect(root.querySelector('button.back')).not.toBeNull();
    expect(root.querySelector('button.continue')).not.toBeNull();
  });

  it('clicking an option posts a select action', () => {
    const root = stageRoot();
    const onAction = vi.fn();
    renderStage(root, theaterSnapshot, { historical: false, onAction });
    (root.querySelector('button.option') as HTMLButtonElement).click();
    expect(onAction).toHaveBeenCalledWith(
      { kind: 'select', params: { optionId: 't_cedar' } });
  });

  it('show all reveals non-matching options dimmed', () => {
    const root = stageRoot();
    const engaged = {
      ...theaterSnapshot,
      view: { ...theaterSnapshot.view!, showAllEngaged: true, hiddenCount: 0 },
    };
    renderStage(root, engaged, { historical: false, onAction: () => {} });
    const buttons = [...root.querySelectorAll('button.option')];
    expect(buttons).toHaveLength(3);
    expect(buttons[2].classList.contains('non-matching')).toBe(true);
  });

  it('empty highlight set renders no borders', () => {
    const root = stageRoot();
    const plain = {
      ...theaterSnapshot,
      view: { ...theaterSnapshot.view!, highlighted: [] },
    };
    renderStage(root, plain, { historical: false, onAction: () => {} });
    expect(root.querySelector('button.option.highlighted')).toBeNull();
  });

  it('historical snapshots disable all controls', () => {
    const root = stageRoot();
    renderStage(root, theaterSnapshot, { historical: true, onAction: () => {} });
    for (const button of root.querySelectorAll('button')) {
      expect((button as HTMLButtonElement).disabled).toBe(true);
    }
    expect(root.classList.contains('historical')).toBe(true);
    expect(root.querySelector('.history-note')).not.toBeNull();
  });
});

describe('renderStage seatMap', () => {
  const seatSnapshot: SnapshotPayload = {
    stage: 'seat',
    uiKind: 'seatMap',
    stageTitle: 'Select Seats',
    breadcrumb: [],
    seatGrid: [
      { id: 'D3', row: 'D', column: 3, tier: 'premium', taken: false, back: true },
      { id: 'D4', row: 'D', column: 4, tier: 'premium', taken: false, back: true },
      { id: 'D5', row: 'D', column: 5, tier: 'premium', taken: true, back: true },
      { id: 'A1', row: 'A', column: 1, tier: 'standard', taken: false, back: false },
    ],
    view: {
      visible: ['D3+D4'],
      allOrdered: ['D3+D4'],
      labels: { 'D3+D4': 'D3 & D4' },
      highlighted: ['D3+D4'],
      hiddenCount: 0,
      showAllEngaged: false,
      nonMatching: [],
      appliedActions: [],
    },
  };

  it('renders the grid with taken, tier, and highlight states', () => {
    const root = stageRoot();
    renderStage(root, seatSnapshot, { historical: false, onAction: () => {} });
    const d3 = root.querySelector('button.seat[data-seat-id="D3"]')!;
    const d5 = root.querySelector('button.seat[data-seat-id="D5"]')!;
    const a1 = root.querySelector('button.seat[data-seat-id="A1"]')!;
    expect(d3.classList.contains('premium')).toBe(true);
    expect(d3.classList.contains('highlighted')).toBe(true);
    expect(d5.classList.contains('taken')).toBe(true);
    expect(a1.classList.contains('premium')).toBe(false);
    expect(a1.classList.contains('highlighted')).toBe(false);
  });

  it('clicking a seat selects its pair option', () => {
    const root = stageRoot();
    const onAction = vi.fn();
    renderStage(root, seatSnapshot, { historical: false, onAction });
    (root.querySelector('button.seat[data-seat-id="D4"]') as HTMLButtonElement).click();
    expect(onAction).toHaveBeenCalledWith(
      { kind: 'select', params: { optionId: 'D3+D4' } });
  });
});

describe('renderStage other kinds', () => {
  it('confirmation renders a summary and submit control', () => {
    const root = stageRoot();
    const onAction = vi.fn();
    renderStage(root, {
      stage: 'confirm', uiKind: 'confirmation', stageTitle: 'Confirmation',
      breadcrumb: [{ stage: 'movie', label: 'Pocket Parade' }],
      view: null,
    }, { historical: false, onAction });
    expect(root.querySelector('.summary-item')?.textContent).toBe('movie: Pocket Parade');
    (root.querySelector('button.submit') as HTMLButtonElement).click();
    expect(onAction).toHaveBeenCalledWith({ kind: 'submit', params: {} });
  });

  it('unknown uiKind falls back to a list with a visible warning', () => {
    const root = stageRoot();
    renderStage(root, {
      ...theaterSnapshot, uiKind: 'hologram',
    }, { historical: false, onAction: () => {} });
    expect(root.querySelector('.render-warning')).not.toBeNull();
    expect(root.querySelectorAll('.fallback-item')).toHaveLength(2);
  });
});

describe('renderConversation', () => {
  it('renders proposal affordances that reply yes/no', () => {
    document.body.innerHTML = '<div id="conversation"></div>';
    const root = document.getElementById('conversation')!;
    const onReply = vi.fn();
    renderConversation(root, [
      { sortKey: 0, eventIndex: 0, kind: 'agentMessage', text: 'Go with X?' },
    ], {
      proposal: { kind: 'confirmSelection', eventIndex: 1, optionId: 'x', label: 'X' },
      onReply,
    });
    (root.querySelector('button.accept') as HTMLButtonElement).click();
    expect(onReply).toHaveBeenCalledWith('yes');
    (root.querySelector('button.decline') as HTMLButtonElement).click();
    expect(onReply).toHaveBeenCalledWith('no');
  });
});

describe('snapshotAtOrBefore', () => {
  const refs = [
    { eventIndex: 0, payload: theaterSnapshot },
    { eventIndex: 6, payload: theaterSnapshot },
    { eventIndex: 11, payload: theaterSnapshot },
  ];

  it('picks the nearest snapshot at or before the index', () => {
    expect(snapshotAtOrBefore(refs, 6)?.eventIndex).toBe(6);
    expect(snapshotAtOrBefore(refs, 10)?.eventIndex).toBe(6);
    expect(snapshotAtOrBefore(refs, 99)?.eventIndex).toBe(11);
  });

  it('falls back to the earliest snapshot for pre-history indices', () => {
    expect(snapshotAtOrBefore(refs, -1)?.eventIndex).toBe(0);
    expect(snapshotAtOrBefore([], 3)).toBeNull();
  });
});
