// DOM renderers for the GUI panel (stage views) and conversation panel.
//
// Historical snapshots render read-only: controls disabled, inputs inert.

import type { GuiActionRequest, SeatCell, SnapshotPayload, ViewPayload } from './types.js';
import type { ConversationEntry, PendingProposal } from './state.js';

export interface StageRenderOptions {
  historical: boolean;
  onAction: (action: GuiActionRequest) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document, tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderBreadcrumb(root: HTMLElement, snapshot: SnapshotPayload): void {
  root.replaceChildren();
  const doc = root.ownerDocument;
  for (const step of snapshot.breadcrumb) {
    root.appendChild(el(doc, 'span', 'crumb done', `${step.stage}: ${step.label}`));
  }
  root.appendChild(el(doc, 'span', 'crumb current', snapshot.stageTitle));
}

function optionButton(doc: Document, view: ViewPayload, optionId: string,
                      options: StageRenderOptions, extraClass = ''): HTMLButtonElement {
  const button = el(doc, 'button', `option ${extraClass}`.trim());
  button.dataset.optionId = optionId;
  button.textContent = view.labels[optionId] ?? optionId;
  if (view.highlighted.includes(optionId)) button.classList.add('highlighted');
  if (view.nonMatching.includes(optionId) && view.showAllEngaged) {
    button.classList.add('non-matching');
  }
  button.disabled = options.historical;
  button.addEventListener('click', () =>
    options.onAction({ kind: 'select', params: { optionId } }));
  return button;
}

function showAllLink(doc: Document, options: StageRenderOptions): HTMLButtonElement {
  const link = el(doc, 'button', 'show-all', 'SHOW ALL');
  link.disabled = options.historical;
  link.addEventListener('click', () => options.onAction({ kind: 'showAll', params: {} }));
  return link;
}

function controls(doc: Document, snapshot: SnapshotPayload,
                  options: StageRenderOptions): HTMLElement {
  const bar = el(doc, 'div', 'controls');
  const back = el(doc, 'button', 'back', 'Back');
  const target = snapshot.breadcrumb.length
    ? snapshot.breadcrumb[snapshot.breadcrumb.length - 1].stage
    : null;
  back.disabled = options.historical || target === null;
  if (target !== null) {
    back.addEventListener('click', () =>
      options.onAction({ kind: 'back', params: { targetStage: target } }));
  }
  const cont = el(doc, 'button', 'continue', 'Continue');
  cont.disabled = options.historical;
  cont.addEventListener('click', () => options.onAction({ kind: 'continue', params: {} }));
  bar.append(back, cont);
  return bar;
}

function renderButtonGroup(root: HTMLElement, snapshot: SnapshotPayload,
                           options: StageRenderOptions, cellClass = ''): void {
  const doc = root.ownerDocument;
  const view = snapshot.view;
  if (!view) return;
  if (view.hiddenCount > 0 || view.showAllEngaged) {
    root.appendChild(showAllLink(doc, options));
  }
  const list = el(doc, 'div', cellClass ? `options ${cellClass}` : 'options');
  const ids = view.showAllEngaged ? view.allOrdered : view.visible;
  for (const optionId of ids) {
    list.appendChild(optionButton(doc, view, optionId, options,
      cellClass && 'calendar-cell'));
  }
  root.appendChild(list);
}

function renderSeatMap(root: HTMLElement, snapshot: SnapshotPayload,
                       options: StageRenderOptions): void {
  const doc = root.ownerDocument;
  const view = snapshot.view;
  const grid = snapshot.seatGrid ?? [];
  const highlightedSeats = new Set<string>();
  for (const optionId of view?.highlighted ?? []) {
    for (const seat of optionId.split('+')) highlightedSeats.add(seat);
  }
  const pairFor = (seatId: string): string | null => {
    for (const optionId of view?.visible ?? []) {
      if (optionId.split('+').includes(seatId)) return optionId;
    }
    return null;
  };

  const rows = new Map<string, SeatCell[]>();
  for (const cell of grid) {
    const row = rows.get(cell.row) ?? [];
    row.push(cell);
    rows.set(cell.row, row);
  }
  const screen = el(doc, 'div', 'screen', 'SCREEN');
  root.appendChild(screen);
  const map = el(doc, 'div', 'seat-map');
  for (const [rowId, cells] of [...rows.entries()].sort()) {
    const rowEl = el(doc, 'div', 'seat-row');
    rowEl.appendChild(el(doc, 'span', 'row-label', rowId));
    for (const cell of cells.sort((a, b) => a.column - b.column)) {
      const seat = el(doc, 'button', 'seat', String(cell.column));
      seat.dataset.seatId = cell.id;
      if (cell.taken) seat.classList.add('taken');
      if (cell.tier === 'premium') seat.classList.add('premium');
      if (highlightedSeats.has(cell.id)) seat.classList.add('highlighted');
      const pair = pairFor(cell.id);
      seat.disabled = options.historical || cell.taken || pair === null;
      if (pair !== null) {
        seat.addEventListener('click', () =>
          options.onAction({ kind: 'select', params: { optionId: pair } }));
      }
      rowEl.appendChild(seat);
    }
    map.appendChild(rowEl);
  }
  root.appendChild(map);

  // Seat groups as explicit buttons too, mirroring the selectable options.
  const pairs = el(doc, 'div', 'seat-pairs');
  for (const optionId of view?.visible ?? []) {
    pairs.appendChild(optionButton(doc, view!, optionId, options, 'pair'));
  }
  root.appendChild(pairs);
}

function renderConfirmation(root: HTMLElement, snapshot: SnapshotPayload,
                            options: StageRenderOptions): void {
  const doc = root.ownerDocument;
  const summary = el(doc, 'ul', 'summary');
  for (const step of snapshot.breadcrumb) {
    summary.appendChild(el(doc, 'li', 'summary-item', `${step.stage}: ${step.label}`));
  }
  root.appendChild(summary);
  const submit = el(doc, 'button', 'submit', 'Submit');
  submit.disabled = options.historical;
  submit.addEventListener('click', () => options.onAction({ kind: 'submit', params: {} }));
  root.appendChild(submit);
}

function renderFallback(root: HTMLElement, snapshot: SnapshotPayload): void {
  const doc = root.ownerDocument;
  root.appendChild(el(doc, 'div', 'render-warning',
    `Unknown stage widget "${snapshot.uiKind}"; showing a plain list.`));
  const list = el(doc, 'ul', 'fallback');
  for (const optionId of snapshot.view?.visible ?? []) {
    list.appendChild(el(doc, 'li', 'fallback-item',
      snapshot.view?.labels[optionId] ?? optionId));
  }
  root.appendChild(list);
}

export function renderStage(root: HTMLElement, snapshot: SnapshotPayload,
                            options: StageRenderOptions): void {
  root.replaceChildren();
  root.classList.toggle('historical', options.historical);
  const doc = root.ownerDocument;
  root.appendChild(el(doc, 'h2', 'stage-title', snapshot.stageTitle));
  if (options.historical) {
    root.appendChild(el(doc, 'div', 'history-note', 'Viewing an earlier step (read-only)'));
  }
  switch (snapshot.uiKind) {
    case 'buttonGroup':
      renderButtonGroup(root, snapshot, options);
      break;
    case 'calendar':
      renderButtonGroup(root, snapshot, options, 'calendar');
      break;
    case 'seatMap':
      renderSeatMap(root, snapshot, options);
      break;
    case 'confirmation':
      renderConfirmation(root, snapshot, options);
      return; // confirmation has its own submit control
    default:
      renderFallback(root, snapshot);
      break;
  }
  if (snapshot.uiKind !== 'confirmation') {
    root.appendChild(controls(doc, snapshot, options));
  }
}

export function renderBanner(root: HTMLElement, banner: string | null): void {
  root.replaceChildren();
  if (banner === null) {
    root.classList.remove('active');
    return;
  }
  root.classList.add('active');
  root.textContent = banner;
}

export interface ConversationRenderOptions {
  proposal: PendingProposal | null;
  onReply: (text: string) => void;
}

export function renderConversation(root: HTMLElement, entries: ConversationEntry[],
                                   options: ConversationRenderOptions): void {
  root.replaceChildren();
  const doc = root.ownerDocument;
  for (const entry of entries) {
    const classes: Record<ConversationEntry['kind'], string> = {
      agentMessage: 'bubble agent',
      userMessage: 'bubble user',
      adaptationBadge: 'badge adaptation',
      stageLabel: 'stage-label',
      submission: 'badge submission',
    };
    const node = el(doc, 'div', classes[entry.kind], entry.text);
    if (entry.eventIndex !== null) node.dataset.eventIndex = String(entry.eventIndex);
    if (entry.warning) node.classList.add('warning');
    if (entry.error) node.classList.add('error');
    root.appendChild(node);
  }
  if (options.proposal) {
    const bar = el(doc, 'div', 'proposal');
    const label = options.proposal.kind === 'backtrack'
      ? `Go back to ${options.proposal.targetStage}?`
      : `Go with ${options.proposal.label}?`;
    bar.appendChild(el(doc, 'span', 'proposal-label', label));
    const accept = el(doc, 'button', 'accept', 'Yes');
    accept.addEventListener('click', () => options.onReply('yes'));
    const decline = el(doc, 'button', 'decline', 'No');
    decline.addEventListener('click', () => options.onReply('no'));
    bar.append(accept, decline);
    root.appendChild(bar);
  }
}
