// Conversation-scroll to GUI-snapshot synchronization.
//
// The snapshot event index is the join key: scrolling the conversation
// renders the snapshot nearest at-or-before the topmost visible message;
// scrolling to the bottom restores the live view.

import type { SnapshotRef } from './state.js';

export function snapshotAtOrBefore(snapshots: SnapshotRef[],
                                   eventIndex: number): SnapshotRef | null {
  let best: SnapshotRef | null = null;
  for (const snapshot of snapshots) {
    if (snapshot.eventIndex <= eventIndex) {
      if (best === null || snapshot.eventIndex > best.eventIndex) {
        best = snapshot;
      }
    }
  }
  // A message older than every snapshot still shows the earliest state.
  if (best === null && snapshots.length > 0) {
    return snapshots[0];
  }
  return best;
}

export function isAtBottom(container: HTMLElement, slack = 8): boolean {
  return container.scrollTop + container.clientHeight >= container.scrollHeight - slack;
}

/** Event index of the topmost visible conversation entry, from DOM geometry. */
export function topmostVisibleIndex(container: HTMLElement): number | null {
  const top = container.scrollTop;
  let result: number | null = null;
  for (const child of Array.from(container.children)) {
    const element = child as HTMLElement;
    if (!element.dataset.eventIndex) continue;
    if (element.offsetTop + element.offsetHeight >= top) {
      result = Number(element.dataset.eventIndex);
      break;
    }
  }
  return result;
}
